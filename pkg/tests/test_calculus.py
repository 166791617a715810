import random

import pytest
from hypothesis import given, settings, strategies as st

from kpmahlo import ordinals as O
from kpmahlo.calculus import (
    BRANCHING,
    BUDGET,
    CUT_RANK,
    MH_CLASS,
    MH_VECTOR,
    ORDINAL,
    AndRule,
    CalcConfig,
    CalculusError,
    CutRule,
    Derivation,
    MhRule,
    OrRule,
    check,
    cut,
    cut_elim_full,
    cut_elim_once,
    dumps,
    embed_foundation,
    embed_mh_axiom,
    embed_pi2,
    embed_tautology,
    embed_truth,
    invert,
    loads,
    parse_budget,
    pipeline,
    reduce,
    rehome,
    weaken,
    with_rank,
)
from kpmahlo.classes import ClassOracle
from kpmahlo.generate import DerivationSampler, random_sentence
from kpmahlo.hf import HFSet, OrdinalBudget, Universe, closure, rank, stage, von_neumann
from kpmahlo.index import vec
from kpmahlo.logic import Exists, Mem, Var, dp, negate, parse_formula, sequent

from oracles import fm_depth

P = parse_formula
E0, E1, E2 = von_neumann(0), von_neumann(1), von_neumann(2)
ROOT = Universe(E2)
V3 = Universe(closure(HFSet(stage(3))))
DELTA = P("(exists x (in {} x))")
ORACLE = ClassOracle(vectors={(2, vec(0)): [E1]})
CFG = CalcConfig(3, 1, vec(1), oracle=ORACLE)
WIDE = CalcConfig(3, 1, vec(1), oracle=ORACLE, root=ROOT, world=V3)
TRUE0 = Mem(E0, E1)
FALSE0 = Mem(E1, E1)


def sampler(seed, cfg=CFG):
    return DerivationSampler(cfg, random.Random(seed), (vec(0), DELTA))


def leaf(a, p=ROOT):
    return Derivation(p, O.ZERO, 0, sequent(a), AndRule(a))


def decreasing(d):
    return all(q.ordinal < n.ordinal for _, n in d.nodes() for q in n.premises)


# -- config -----------------------------------------------------------------------

def test_config_validation():
    with pytest.raises(CalculusError):
        CalcConfig(1, 1, vec())
    with pytest.raises(CalculusError):
        CalcConfig(3, 1, vec(0))
    with pytest.raises(CalculusError):
        CalcConfig(3, 1, vec(1, 2))
    assert CalcConfig(2, 1, vec()).world == ROOT
    assert parse_budget("strict:5") == OrdinalBudget(5)
    with pytest.raises(O.ParseError):
        parse_budget("loose")


# -- check --------------------------------------------------------------------------

def test_true_bounded_leaf_is_accepted():
    assert check(leaf(TRUE0), CFG).ok
    v = check(leaf(FALSE0), CFG)
    assert not v.ok


def test_cut_at_its_own_depth_is_a_rank_violation():
    c = P("(exists x (in {} x))")
    d = cut(embed_tautology(c, CFG), embed_truth(c, CFG), c)
    assert d.rank == 2 and check(d, CFG).ok
    v = check(with_rank(d, 1), CFG)
    assert v.categories == {CUT_RANK}
    assert v.violations[0].path == ()


def test_missing_mh_premise_is_incomplete_branching():
    d = embed_mh_axiom(vec(0), DELTA, CFG)
    assert check(d, CFG).ok
    v = check(d.replace(premises=d.premises[:-1]), CFG)
    assert v.categories == {BRANCHING}


def test_mh_class_and_vector_violations():
    d = embed_mh_axiom(vec(0), DELTA, CFG)
    pi3 = P("(forall x (exists y (forall z (in x y))))")
    v = check(d.replace(rule=MhRule(vec(0), frozenset({pi3}))), CFG)
    assert MH_CLASS in v.categories
    v = check(d.replace(rule=MhRule(vec(1), d.rule.delta)), CFG)
    assert v.categories == {MH_VECTOR}


def test_mh_premise_bounds_may_differ_between_groups():
    d = embed_mh_axiom(vec(0), DELTA, CFG)
    left, right = d.premises
    assert left.ordinal != right.ordinal
    assert check(d, CFG).ok


def test_budget_violation():
    strict = Universe(E2, OrdinalBudget(3))
    d = leaf(TRUE0, strict).replace(ordinal=O.parse("K+w^(w^w)"))
    assert check(d, CFG).categories == {BUDGET}


# -- weaken / invert ------------------------------------------------------------------

def test_weaken_examples():
    d = embed_truth(P("(exists x (in x #1))"), CFG)
    assert weaken(d) is d
    w = weaken(d, O.OMEGA, [TRUE0])
    assert w.sequent == d.sequent | {TRUE0} and w.ordinal == O.OMEGA
    assert check(w, CFG).ok
    with pytest.raises(CalculusError):
        weaken(d, O.ZERO)
    with pytest.raises(CalculusError):
        weaken(d, extra=[Mem(E0, von_neumann(4))])


def test_invert_and_node():
    a = P("(forall x (notin x x))")
    d = embed_truth(a, CFG)
    inv = invert(d, a, E1, CFG)
    assert inv.sequent == {negate(FALSE0)}
    assert inv.ordinal == d.ordinal
    assert inv.rule == d.premises[1].rule
    assert check(inv, CFG).ok


def test_invert_leaf_has_no_index():
    with pytest.raises(CalculusError):
        invert(leaf(TRUE0), TRUE0, E0, CFG)


def test_invert_commutes_with_weaken():
    rng = random.Random(3)
    done = 0
    for _ in range(200):
        a = random_sentence(rng, list(ROOT.carrier), 2)
        if dp(a) == 0:
            continue
        d = embed_tautology(a, WIDE)
        conj = next(f for f in d.sequent if WIDE.decompose(f).kind == "and")
        extra = [TRUE0]
        for index in WIDE.decompose(conj).indices:
            one = invert(weaken(d, O.OMEGA, extra), conj, index, WIDE)
            two = weaken(invert(d, conj, index, WIDE), O.OMEGA, extra)
            assert (one.sequent, one.ordinal, one.universe) == (two.sequent, two.ordinal, two.universe)
            assert check(one, WIDE).ok and check(two, WIDE).ok
            assert invert(d, conj, index, WIDE).ordinal <= d.ordinal
        done += 1
    assert done >= 50


# -- reduce ------------------------------------------------------------------------------

def test_reduce_false_bounded_cut_formula():
    g, dd = P("(exists x (in x #1))"), P("(forall x (notin x x))")
    d1 = weaken(embed_truth(negate(FALSE0), CFG), extra=[g])
    d2 = weaken(embed_truth(dd, CFG), extra=[FALSE0])
    out = reduce(d1, d2, FALSE0, CFG)
    assert out.sequent == {g, dd}
    assert out.ordinal == O.add(d1.ordinal, d2.ordinal)
    assert all(FALSE0 not in n.sequent for _, n in out.nodes())
    assert check(out, CFG).ok


def test_reduce_existential_single_witness():
    c = P("(exists x (in x #1))")
    d1 = embed_tautology(c, CFG)
    d2 = Derivation(ROOT, O.ONE, 0, sequent(c), OrRule(c, E0), (leaf(TRUE0),))
    out = reduce(d1, d2, c, CFG)
    assert out.cuts() == [TRUE0]
    assert dp(TRUE0) < dp(c)
    assert out.sequent == {c}
    assert out.ordinal <= O.add(d1.ordinal, d2.ordinal)
    assert check(out, CFG).ok


def test_reduce_rejects_conjunctive_cut_formula():
    c = P("(forall x (notin x x))")
    with pytest.raises(CalculusError):
        reduce(embed_tautology(c, CFG), embed_truth(c, CFG), c, CFG)


@pytest.mark.parametrize("cfg", [CFG, WIDE], ids=["narrow", "wide"])
def test_reduce_generated(cfg):
    s = sampler(11, cfg)
    for _ in range(40):
        d1, d2, c = s.reduce_pair()
        out = reduce(d1, d2, c, cfg)
        v = check(out, cfg)
        assert v.ok, v.report()
        assert out.ordinal <= O.add(d1.ordinal, d2.ordinal)
        assert out.sequent == (d1.sequent - {negate(c)}) | (d2.sequent - {c})
        principal = isinstance(d2.rule, OrRule) and d2.rule.principal == c
        if dp(c) > 0 and not principal:
            assert out.rule == d2.rule


# -- cut elimination ------------------------------------------------------------------

def test_cut_elim_cut_free():
    d = embed_truth(P("(exists x (in x #1))"), CFG)
    assert cut_elim_once(d, CFG) is d
    d1 = with_rank(d, 1)
    out = cut_elim_once(d1, CFG)
    assert out.rank == 0 and out.ordinal <= O.omega_pow(d1.ordinal)
    assert check(out, CFG).ok


def test_single_cut_at_two():
    g = negate(FALSE0)
    left = weaken(leaf(g), O.ONE, [negate(TRUE0)])
    right = weaken(leaf(TRUE0), O.ONE)
    d = cut(left, right, TRUE0)
    assert d.ordinal == O.nat(2) and d.rank == 1
    assert check(d, CFG).ok
    out = cut_elim_once(d, CFG)
    assert out.rank == 0 and out.cuts() == []
    assert out.sequent == d.sequent
    assert out.ordinal <= O.parse("w^2")
    assert check(out, CFG).ok


@pytest.mark.parametrize("c", [0, 1, 2])
def test_cut_elim_once_generated(c):
    s = sampler(20 + c)
    for _ in range(15):
        d = s.rank_sample(c)
        assert check(d, CFG).ok
        out = cut_elim_once(d, CFG)
        v = check(out, CFG)
        assert v.ok, v.report()
        assert out.rank == c
        assert all(dp(f) < c for f in out.cuts())
        assert out.sequent == d.sequent and out.universe == d.universe
        assert out.ordinal <= O.omega_pow(d.ordinal)
        assert decreasing(out)


def test_cut_elim_full():
    d = embed_truth(P("(exists x (in x #1))"), CFG)
    assert cut_elim_full(d, CFG) is d
    d2 = weaken(with_rank(sampler(5).rank_sample(1), 2), O.OMEGA)
    out = cut_elim_full(d2, CFG)
    assert out.rank == 0 and out.cuts() == []
    assert out.ordinal <= O.parse("w^(w^w)")
    assert check(out, CFG).ok


def test_pipeline_bounds():
    runs = pipeline(P("(notin z z)"), CFG, p=2, beta=vec(0), delta=DELTA)
    assert [r.name for r in runs] == ["pi2-instance", "mh-axiom"]
    for r in runs:
        assert r.start == O.mul(O.K, O.nat(2))
        assert r.final.rank == 0 and check(r.final, CFG).ok
        assert r.bound == O.omega_tower(r.rank + 1, O.add(O.K, O.ONE))
        assert r.below


# -- embeddings -----------------------------------------------------------------------

def test_tautology_examples():
    assert embed_tautology(TRUE0, CFG).ordinal == O.ZERO
    d = embed_tautology(Exists("x", Mem(Var("x"), E1)), CFG)
    assert d.ordinal == O.nat(2)
    assert check(d, CFG).ok
    with pytest.raises(CalculusError):
        embed_tautology(Mem(E0, von_neumann(3)), CFG)


@settings(max_examples=60, deadline=None)
@given(st.randoms(use_true_random=False), st.sampled_from([CFG, WIDE]))
def test_tautology_bound_is_twice_depth(rng, cfg):
    a = random_sentence(rng, list(ROOT.carrier), 3)
    d = embed_tautology(a, cfg)
    assert d.ordinal == O.nat(2 * fm_depth(a))
    assert d.rank == 0 and d.sequent == {a, negate(a)}
    assert check(d, cfg).ok and decreasing(d)


BODIES = [
    P("(in x x)"),
    P("(notin x x)"),
    P("(exists y (in x y))"),
    P("(forall y (or (notin y x) (exists z (in y z))))"),
    P("(or (exists-in y x (in y y)) (forall z (notin x z)))"),
]


def test_foundation_examples():
    body = BODIES[2]
    d0 = embed_foundation(E0, body, WIDE)
    assert d0.ordinal == O.nat(2) and not d0.premises
    d1 = embed_foundation(E1, body, WIDE)
    assert d1.ordinal == O.nat(2 + 3)
    assert check(d1, WIDE).ok


@pytest.mark.parametrize("body", BODIES, ids=range(len(BODIES)))
def test_foundation_bound_on_all_of_v3(body):
    for a in V3.carrier:
        d = embed_foundation(a, body, WIDE)
        assert d.ordinal == O.nat(2 * fm_depth(body) + 3 * rank(a))
        assert d.rank == 0
        v = check(d, WIDE)
        assert v.ok, v.report()


def test_foundation_needs_room_in_the_world():
    with pytest.raises(CalculusError):
        embed_foundation(parse_formula("(in {#1} #2)").left, BODIES[2], CFG)


@pytest.mark.parametrize(
    "theta",
    ["(notin z z)", "(or (in x y) (notin x y))", "(forall-in w z (and (in w x) (in w y)))", "(eq z x)"],
)
def test_pi2_bound_is_three(theta):
    for cfg in (CFG, WIDE):
        d = embed_pi2(P(theta), cfg)
        assert d.ordinal == O.nat(3) and d.rank == 0
        assert check(d, cfg).ok
        assert all(n.rule.tag == "and" and n.ordinal == O.ZERO for _, n in d.nodes() if not n.premises)


@pytest.mark.parametrize("theta", ["(in z z)", "(and (in x z) (in y z))"])
def test_pi2_without_witness(theta):
    with pytest.raises(CalculusError, match="axiom fails"):
        embed_pi2(P(theta), CFG)


@pytest.mark.parametrize("members", [[], [E1], [E0, E1]])
def test_mh_axiom(members):
    cfg = CalcConfig(3, 1, vec(1), oracle=ClassOracle(vectors={(2, vec(0)): members}))
    d = embed_mh_axiom(vec(0), DELTA, cfg)
    assert d.ordinal == O.OMEGA
    assert isinstance(d.rule, MhRule)
    assert len(d.premises) == 1 + len(members)
    assert d.premises[0].ordinal == O.nat(2 * dp(DELTA))
    for q, r in zip(sorted(members), d.premises[1:]):
        assert r.ordinal == O.ONE
        assert r.rule == OrRule(r.rule.principal, q)
    assert check(d, cfg).ok


def test_mh_axiom_rejects_bad_inputs():
    with pytest.raises(CalculusError):
        embed_mh_axiom(vec(0), P("(forall x (exists y (forall z (in x y))))"), CFG)
    with pytest.raises(CalculusError):
        embed_mh_axiom(vec(2), DELTA, CFG)
    far = CalcConfig(3, 1, vec(1), oracle=ClassOracle(vectors={(2, vec(0)): [von_neumann(3)]}))
    with pytest.raises(CalculusError):
        embed_mh_axiom(vec(0), DELTA, far)


# -- structural properties ---------------------------------------------------------------

def test_generated_derivations_decrease_along_paths():
    s = sampler(8, WIDE)
    for c in range(3):
        for _ in range(10):
            d = s.rank_sample(c)
            assert check(d, WIDE).ok and decreasing(d)


def test_rehome_keeps_derivations_valid():
    for text in ["(forall x (notin x x))", "(exists x (exists y (in x y)))"]:
        d = embed_tautology(P(text), CFG)
        moved = rehome(d, V3)
        assert moved.universe == V3
        assert check(moved, CFG).ok
    with pytest.raises(CalculusError):
        rehome(embed_tautology(TRUE0, WIDE, V3), ROOT)


def test_json_round_trip():
    items = [
        embed_mh_axiom(vec(0), DELTA, CFG),
        embed_pi2(P("(eq z y)"), CFG),
        sampler(1).rank_sample(2),
    ]
    for d in items:
        text = dumps(CFG, d)
        cfg, back = loads(text)
        assert back == d and cfg == CFG
        assert cfg.oracle.to_json() == CFG.oracle.to_json()
        assert dumps(cfg, back) == text


@pytest.mark.parametrize("text", ["", "{}", '{"config": {"N": 3}}', '{"config": {"N": 1, "k": 1, "root": "#2"}}'])
def test_loads_rejects_malformed(text):
    with pytest.raises(O.ParseError):
        loads(text)


def test_cut_rule_json_tags():
    d = cut(embed_tautology(DELTA, CFG), embed_truth(DELTA, CFG), DELTA)
    assert isinstance(d.rule, CutRule)
    assert loads(dumps(CFG, d))[1].rule == d.rule
    assert check(d, CFG).ok and ORDINAL not in check(d, CFG).categories
