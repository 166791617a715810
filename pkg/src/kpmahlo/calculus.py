"""Operator-controlled derivations over finite universes.

A node ``P |-^a_c G`` records its universe ``P``, ordinal bound ``a``, cut
rank ``c``, conclusion ``G`` (a frozenset of sentences) and the rule that
produced it.  Rules:

* ``OrRule(A, i)``   one premise deriving ``A_i``
* ``AndRule(A)``     one premise per index of ``A``; a true bounded
  sentence has no indices, so ``AndRule`` with no premises is an axiom
* ``CutRule(C)``     premises for ``not C`` and ``C`` with equal bounds
* ``MhRule(b, D)``   left premises ``not d`` for ``d`` in ``D`` and right
  premises ``D^(Q)`` for every ``Q`` the oracle places in the Mahlo class
  indexed by ``bullet(b, alpha)``

Premise sequents may drop formulas (weakening is built in): a premise
only has to be contained in the conclusion plus the formula the rule adds.

Unbounded quantifiers range over ``CalcConfig.world``, a fixed finite
universe standing in for the whole set-theoretic universe.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Union

from . import ordinals as O
from .classes import EMPTY_ORACLE, ClassOracle, MhRef
from .hf import ALL, HFSet, OrdinalBudget, Universe, closure, extend, parse_hf, rank, transitive_closure, von_neumann
from .index import OrdVec, bullet, parse_vec, vec_lt
from .logic import (
    AND_KIND,
    OR_KIND,
    And,
    Exists,
    Forall,
    Formula,
    FormulaError,
    InClass,
    Sigma,
    Var,
    constants,
    decompose,
    dp,
    fresh_var,
    free_vars,
    in_class,
    is_delta0,
    is_sentence,
    negate,
    parse_formula,
    relativize,
    rename,
    sorted_formulas,
    substitute,
    to_sexpr,
    truth_delta0,
)
from .ordinals import Ord


class CalculusError(ValueError):
    pass


# -- rules and derivations ----------------------------------------------------

@dataclass(frozen=True)
class OrRule:
    principal: Formula
    index: Union[int, HFSet]

    tag = "or"


@dataclass(frozen=True)
class AndRule:
    principal: Formula

    tag = "and"


@dataclass(frozen=True)
class CutRule:
    formula: Formula

    tag = "cut"


@dataclass(frozen=True)
class MhRule:
    beta: OrdVec
    delta: frozenset

    tag = "mh"

    @property
    def ordered_delta(self) -> list:
        return sorted_formulas(self.delta)


Rule = Union[OrRule, AndRule, CutRule, MhRule]


@dataclass(frozen=True)
class Derivation:
    universe: Universe
    ordinal: Ord
    rank: int
    sequent: frozenset
    rule: Rule
    premises: tuple = ()

    def nodes(self, path: tuple = ()) -> Iterator[tuple[tuple, Derivation]]:
        """Pre-order traversal with node paths."""
        yield path, self
        for i, p in enumerate(self.premises):
            yield from p.nodes(path + (i,))

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)

    def height(self) -> int:
        return 1 + max((p.height() for p in self.premises), default=0)

    def cuts(self) -> list:
        return [n.rule.formula for _, n in self.nodes() if isinstance(n.rule, CutRule)]

    def replace(self, **changes) -> Derivation:
        return dataclasses.replace(self, **changes)

    def at(self, path: Iterable[int]) -> Derivation:
        node = self
        for i in path:
            node = node.premises[i]
        return node


@dataclass(frozen=True)
class CalcConfig:
    """``n`` and ``k`` with ``1 <= k < n``, the fixed vector ``alpha_vec`` of length
    ``n - k - 1``, the class oracle, the root universe and the quantifier world."""

    n: int
    k: int
    alpha_vec: OrdVec
    oracle: ClassOracle = field(default=EMPTY_ORACLE, compare=False)
    root: Universe = field(default_factory=lambda: Universe(von_neumann(2)))
    world: Optional[Universe] = None

    def __post_init__(self):
        if self.n < 2 or not 1 <= self.k < self.n:
            raise CalculusError(f"need n >= 2 and 1 <= k < n, got n={self.n}, k={self.k}")
        if len(self.alpha_vec) != self.n - self.k - 1:
            raise CalculusError(f"alpha has length {len(self.alpha_vec)}, expected {self.n - self.k - 1}")
        if len(self.alpha_vec) and self.alpha_vec.is_zero_vec:
            raise CalculusError("alpha must not be the zero vector")
        if self.world is None:
            object.__setattr__(self, "world", self.root)

    @property
    def budget(self) -> OrdinalBudget:
        return self.root.budget

    def mh_ref(self, beta: OrdVec) -> MhRef:
        return MhRef(self.k + 1, bullet(beta, self.alpha_vec))

    def mh_members(self, beta: OrdVec) -> list[HFSet]:
        return sorted(self.oracle.members(self.mh_ref(beta)))

    def decompose(self, a: Formula):
        return decompose(a, self.world, self.oracle)

    def with_root(self, root: Universe, world: Optional[Universe] = None) -> CalcConfig:
        return dataclasses.replace(self, root=root, world=world or self.world)

    def to_json(self) -> dict:
        return {
            "N": self.n,
            "k": self.k,
            "alpha": str(self.alpha_vec),
            "budget": str(self.budget),
            "root": str(self.root.carrier),
            "world": str(self.world.carrier),
            "oracle": self.oracle.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict) -> CalcConfig:
        budget = parse_budget(data.get("budget", "all"))
        root = Universe(parse_hf(data["root"]), budget)
        world = Universe(parse_hf(data["world"]), budget) if "world" in data else None
        return cls(
            n=int(data["N"]),
            k=int(data["k"]),
            alpha_vec=parse_vec(data.get("alpha", "[]")),
            oracle=ClassOracle.from_json(data.get("oracle", {})),
            root=root,
            world=world,
        )


def parse_budget(text: str) -> OrdinalBudget:
    """``all`` or ``strict`` (default size 12) or ``strict:n``."""
    if text == "all":
        return ALL
    if text == "strict":
        return OrdinalBudget(12)
    if text.startswith("strict:") and text[7:].isdigit():
        return OrdinalBudget(int(text[7:]))
    raise O.ParseError(f"unknown budget {text!r}")


# -- universes ----------------------------------------------------------------

def index_universe(p: Universe, index) -> Universe:
    """Premise universe for an index: binary indices keep ``p``."""
    return p if isinstance(index, int) else extend(p, index)


def join(p: Universe, q: Universe) -> Universe:
    if q.carrier.issubset(p.carrier):
        return p
    if p.carrier.issubset(q.carrier):
        return Universe(q.carrier, p.budget)
    return Universe(closure(p.carrier.union(q.carrier)), p.budget)


# -- checking -----------------------------------------------------------------

SIDE_CONDITION = "side-condition"
BUDGET = "budget"
ORDINAL = "ordinal"
CUT_RANK = "cut-rank"
BRANCHING = "incomplete-branching"
RULE = "rule"
PREMISE_SEQUENT = "premise-sequent"
UNIVERSE = "universe"
MH_CLASS = "mh-class"
MH_VECTOR = "mh-vector"

CATEGORIES = (
    SIDE_CONDITION, BUDGET, ORDINAL, CUT_RANK, BRANCHING, RULE, PREMISE_SEQUENT, UNIVERSE, MH_CLASS, MH_VECTOR,
)


def path_str(path: tuple) -> str:
    return "root" if not path else "root." + ".".join(str(i) for i in path)


@dataclass(frozen=True)
class Violation:
    path: tuple
    category: str
    reason: str

    def __str__(self) -> str:
        return f"{path_str(self.path)}: {self.category}: {self.reason}"


@dataclass(frozen=True)
class Verdict:
    violations: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    @property
    def categories(self) -> set:
        return {v.category for v in self.violations}

    def report(self) -> str:
        return "ok" if self.ok else "\n".join(str(v) for v in self.violations)


def check(d: Derivation, cfg: CalcConfig) -> Verdict:
    out: list[Violation] = []
    stack = [((), d)]
    while stack:
        path, node = stack.pop()
        _check_node(node, path, cfg, out)
        for i in reversed(range(len(node.premises))):
            stack.append((path + (i,), node.premises[i]))
    return Verdict(tuple(out))


def _sentence_problem(a: Formula, carrier: HFSet) -> Optional[str]:
    if not is_sentence(a):
        return f"{to_sexpr(a)} has free variables"
    outside = sorted(c for c in constants(a) if c not in carrier)
    if outside:
        return f"constant {outside[0]} of {to_sexpr(a)} is outside the universe"
    return None


def _check_node(d: Derivation, path: tuple, cfg: CalcConfig, out: list) -> None:
    def bad(category: str, reason: str) -> None:
        out.append(Violation(path, category, reason))

    carrier = d.universe.carrier
    for a in sorted_formulas(d.sequent):
        problem = _sentence_problem(a, carrier)
        if problem:
            bad(SIDE_CONDITION, problem)
    if not d.universe.admits(d.ordinal):
        bad(BUDGET, f"ordinal {d.ordinal} is outside the budget {d.universe.budget}")
    for i, p in enumerate(d.premises):
        if not p.ordinal < d.ordinal:
            bad(ORDINAL, f"premise {i} has bound {p.ordinal}, not below {d.ordinal}")
        if p.rank > d.rank:
            bad(CUT_RANK, f"premise {i} has cut rank {p.rank} above {d.rank}")

    rule = d.rule
    if isinstance(rule, CutRule):
        _check_cut(d, rule, bad)
    elif isinstance(rule, MhRule):
        _check_mh(d, rule, cfg, bad)
    elif isinstance(rule, (AndRule, OrRule)):
        _check_logical(d, rule, cfg, bad)
    else:
        bad(RULE, f"unknown rule {rule!r}")


def _subset(p: Derivation, allowed: frozenset, i: int, bad) -> None:
    extra = p.sequent - allowed
    if extra:
        bad(PREMISE_SEQUENT, f"premise {i} has {to_sexpr(sorted_formulas(extra)[0])} which the rule does not supply")


def _same_universe(p: Derivation, want: Universe, i: int, bad) -> None:
    if p.universe.carrier != want.carrier:
        bad(UNIVERSE, f"premise {i} lives in {p.universe}, expected {want}")


def _check_logical(d: Derivation, rule, cfg: CalcConfig, bad) -> None:
    a = rule.principal
    if a not in d.sequent:
        bad(RULE, f"principal formula {to_sexpr(a)} is not in the conclusion")
        return
    try:
        dec = cfg.decompose(a)
    except FormulaError as exc:
        bad(RULE, str(exc))
        return
    if isinstance(rule, AndRule):
        if dec.kind != AND_KIND:
            bad(RULE, f"{to_sexpr(a)} is not of conjunctive type")
            return
        if len(d.premises) != len(dec.items):
            bad(BRANCHING, f"{len(d.premises)} premises for {len(dec.items)} indices")
            return
        for i, ((index, comp), p) in enumerate(zip(dec.items, d.premises)):
            _subset(p, d.sequent | {comp}, i, bad)
            _same_universe(p, index_universe(d.universe, index), i, bad)
        return
    if dec.kind != OR_KIND:
        bad(RULE, f"{to_sexpr(a)} is not of disjunctive type")
        return
    if rule.index not in dec.indices:
        bad(RULE, f"index {rule.index} is not an index of {to_sexpr(a)}")
        return
    if isinstance(rule.index, HFSet) and rule.index not in d.universe.carrier:
        bad(SIDE_CONDITION, f"witness {rule.index} is outside the universe")
    if len(d.premises) != 1:
        bad(BRANCHING, f"disjunction rule needs one premise, got {len(d.premises)}")
        return
    _subset(d.premises[0], d.sequent | {dec.component(rule.index)}, 0, bad)
    _same_universe(d.premises[0], d.universe, 0, bad)


def _check_cut(d: Derivation, rule: CutRule, bad) -> None:
    c = rule.formula
    problem = _sentence_problem(c, d.universe.carrier)
    if problem:
        bad(SIDE_CONDITION, problem)
        return
    if not dp(c) < d.rank:
        bad(CUT_RANK, f"cut formula has depth {dp(c)}, rank is {d.rank}")
    if len(d.premises) != 2:
        bad(BRANCHING, f"cut needs two premises, got {len(d.premises)}")
        return
    left, right = d.premises
    _subset(left, d.sequent | {negate(c)}, 0, bad)
    _subset(right, d.sequent | {c}, 1, bad)
    if left.ordinal != right.ordinal:
        bad(ORDINAL, f"cut premises have bounds {left.ordinal} and {right.ordinal}")
    for i, p in enumerate(d.premises):
        _same_universe(p, d.universe, i, bad)


def _check_mh(d: Derivation, rule: MhRule, cfg: CalcConfig, bad) -> None:
    carrier = d.universe.carrier
    delta = rule.ordered_delta
    for a in delta:
        problem = _sentence_problem(a, carrier)
        if problem:
            bad(SIDE_CONDITION, problem)
            return
        if not in_class(a, Sigma(cfg.k + 1)):
            bad(MH_CLASS, f"{to_sexpr(a)} is not Sigma({cfg.k + 1})")
    beta = rule.beta
    if len(beta) != len(cfg.alpha_vec) or not vec_lt(beta, cfg.alpha_vec):
        bad(MH_VECTOR, f"{beta} is not below {cfg.alpha_vec}")
        return
    for e in tuple(beta) + tuple(cfg.alpha_vec):
        if not d.universe.admits(e):
            bad(BUDGET, f"index entry {e} is outside the budget")
        elif e.is_finite and von_neumann(e.to_int()) not in carrier:
            bad(MH_VECTOR, f"index entry {e} is not in the universe")
    qs = cfg.mh_members(beta)
    if len(d.premises) != len(delta) + len(qs):
        bad(BRANCHING, f"{len(d.premises)} premises, expected {len(delta)} left and {len(qs)} right")
        return
    left, right = d.premises[: len(delta)], d.premises[len(delta):]
    for i, (a, p) in enumerate(zip(delta, left)):
        _subset(p, d.sequent | {negate(a)}, i, bad)
        _same_universe(p, d.universe, i, bad)
    for j, (q, p) in enumerate(zip(qs, right)):
        i = len(delta) + j
        _subset(p, d.sequent | {relativize(a, q) for a in delta}, i, bad)
        _same_universe(p, extend(d.universe, q), i, bad)
    for name, group in (("left", left), ("right", right)):
        if len({p.ordinal for p in group}) > 1:
            bad(ORDINAL, f"{name} premises carry different bounds")


# -- structural operations ----------------------------------------------------

def _admit(p: Universe, ordinal: Ord, sequent: Iterable[Formula]) -> None:
    if not p.admits(ordinal):
        raise CalculusError(f"ordinal {ordinal} is outside the budget {p.budget}")
    for a in sequent:
        problem = _sentence_problem(a, p.carrier)
        if problem:
            raise CalculusError(problem)


def weaken(d: Derivation, ordinal: Optional[Ord] = None, extra: Iterable[Formula] = ()) -> Derivation:
    """Raise the bound to ``ordinal`` and add ``extra`` to the conclusion."""
    ordinal = d.ordinal if ordinal is None else ordinal
    if ordinal < d.ordinal:
        raise CalculusError(f"cannot lower the bound from {d.ordinal} to {ordinal}")
    extra = frozenset(extra)
    if ordinal == d.ordinal and extra <= d.sequent:
        return d
    _admit(d.universe, ordinal, extra)
    return d.replace(ordinal=ordinal, sequent=d.sequent | extra)


def with_rank(d: Derivation, c: int) -> Derivation:
    """Set the rank annotation of every node."""
    premises = tuple(with_rank(p, c) for p in d.premises)
    if d.rank == c and all(a is b for a, b in zip(premises, d.premises)):
        return d
    return d.replace(rank=c, premises=premises)


def rehome(d: Derivation, p: Universe) -> Derivation:
    """Move a derivation into a larger universe."""
    if p.carrier == d.universe.carrier:
        return d
    if not d.universe.carrier.issubset(p.carrier):
        raise CalculusError(f"{d.universe} is not contained in {p}")
    return d.replace(universe=p, premises=tuple(rehome(q, join(p, q.universe)) for q in d.premises))


def invert(d: Derivation, a: Formula, index, cfg: CalcConfig) -> Derivation:
    """From a derivation of ``G, A`` with ``A`` conjunctive, one of ``G, A_index``
    in the universe extended by the index."""
    dec = cfg.decompose(a)
    if dec.kind != AND_KIND:
        raise CalculusError(f"{to_sexpr(a)} is not of conjunctive type")
    if index not in dec.indices:
        raise CalculusError(f"no such index {index} for {to_sexpr(a)}")
    return _invert(d, a, index, dec.component(index), dec.indices.index(index))


def _invert(d: Derivation, a: Formula, index, comp: Formula, pos: int) -> Derivation:
    target = index_universe(d.universe, index)
    if a not in d.sequent:
        return rehome(d, target)
    sequent = (d.sequent - {a}) | {comp}
    if isinstance(d.rule, AndRule) and d.rule.principal == a:
        sub = _invert(d.premises[pos], a, index, comp, pos)
        return sub.replace(ordinal=d.ordinal, sequent=sub.sequent | sequent, rank=d.rank)
    premises = tuple(_invert(p, a, index, comp, pos) for p in d.premises)
    return d.replace(universe=target, sequent=sequent, premises=premises)


def strip(d: Derivation, a: Formula, oracle: ClassOracle = EMPTY_ORACLE) -> Derivation:
    """Remove a false bounded sentence from every sequent; it is never principal."""
    if not is_delta0(a) or truth_delta0(a, oracle):
        raise CalculusError(f"only false bounded sentences can be stripped: {to_sexpr(a)}")
    return _strip(d, a)


def _strip(d: Derivation, a: Formula) -> Derivation:
    if a not in d.sequent and not d.premises:
        return d
    return d.replace(sequent=d.sequent - {a}, premises=tuple(_strip(p, a) for p in d.premises))


# -- reduction and cut elimination ---------------------------------------------

def reduce(d1: Derivation, d2: Derivation, c: Formula, cfg: CalcConfig, rank: Optional[int] = None) -> Derivation:
    """Combine ``d1 |- G, not C`` and ``d2 |- C, D`` into a derivation of ``G, D``
    with bound ``ordinal(d1) + ordinal(d2)``.

    ``C`` must be bounded or of disjunctive type; the recursion runs through
    ``d2`` and inverts ``d1`` wherever ``C`` is introduced.  The output rank
    defaults to the least one covering both inputs and ``dp(C)``.
    """
    nc = negate(c)
    alpha, beta = d1.ordinal, d2.ordinal
    if rank is None:
        rank = max(d1.rank, d2.rank, dp(c))
    if dp(c) > rank:
        raise CalculusError(f"cut formula depth {dp(c)} exceeds rank {rank}")
    gamma = d1.sequent - {nc}
    delta = d2.sequent - {c}
    p = join(d1.universe, d2.universe)
    if is_delta0(c):
        if truth_delta0(c, cfg.oracle):
            out = _strip(d1, nc)
        else:
            out = _strip(d2, c)
        out = rehome(with_rank(out, rank), p)
    else:
        if cfg.decompose(c).kind != OR_KIND:
            raise CalculusError(f"{to_sexpr(c)} is of conjunctive type; reduce on its negation")
        out = _reduce(with_rank(d1, rank), with_rank(d2, rank), c, nc, gamma, rank, cfg)
    target = O.add(alpha, beta)
    _admit(p, target, gamma | delta)
    return out.replace(ordinal=target, sequent=out.sequent | gamma | delta)


def _reduce(d1, d2, c, nc, gamma, rank, cfg) -> Derivation:
    # returns a derivation of (d2.sequent - {c}) + gamma at exactly ordinal(d1) + ordinal(d2)
    p = join(d2.universe, d1.universe)
    d2 = rehome(d2, p)
    d1 = rehome(d1, p)
    alpha = d1.ordinal
    bound = O.add(alpha, d2.ordinal)
    sequent = (d2.sequent - {c}) | gamma
    if c not in d2.sequent:
        return weaken(d2, bound, gamma)
    if isinstance(d2.rule, OrRule) and d2.rule.principal == c:
        index = d2.rule.index
        comp = cfg.decompose(c).component(index)
        sub = _reduce(d1, d2.premises[0], c, nc, gamma, rank, cfg)
        if comp not in sub.sequent:
            return weaken(sub, bound, sequent)
        beta0 = d2.premises[0].ordinal
        mid = O.add(alpha, beta0)
        inv = invert(d1, nc, index, cfg)
        inv = rehome(inv, p).replace(ordinal=mid)
        _admit(p, bound, sequent)
        return Derivation(p, bound, rank, sequent, CutRule(comp), (inv, sub))
    premises = tuple(_reduce(d1, q, c, nc, gamma, rank, cfg) for q in d2.premises)
    _admit(p, bound, sequent)
    return d2.replace(ordinal=bound, sequent=sequent, premises=premises, rank=rank)


def _lift(d: Derivation, ordinal: Ord) -> Derivation:
    return d if d.ordinal == ordinal else d.replace(ordinal=ordinal)


def cut_elim_once(d: Derivation, cfg: CalcConfig) -> Derivation:
    """Lower the cut rank by one at the cost ``a -> w^a``."""
    if d.rank == 0:
        return d
    return _elim(d, d.rank - 1, cfg)


def _elim(d: Derivation, c: int, cfg: CalcConfig) -> Derivation:
    bound = O.omega_pow(d.ordinal)
    _admit(d.universe, bound, ())
    premises = tuple(_elim(p, c, cfg) for p in d.premises)
    if isinstance(d.rule, CutRule) and dp(d.rule.formula) >= c:
        f = d.rule.formula
        left, right = premises  # G, not f   and   G, f
        if is_delta0(f) or cfg.decompose(f).kind == OR_KIND:
            red = reduce(left, right, f, cfg)
        else:
            red = reduce(right, left, negate(f), cfg)
        red = with_rank(red, c)
        return red.replace(ordinal=bound, sequent=red.sequent | d.sequent)
    return d.replace(ordinal=bound, rank=c, premises=premises)


def cut_elim_full(d: Derivation, cfg: CalcConfig) -> Derivation:
    while d.rank > 0:
        d = cut_elim_once(d, cfg)
    return d


# -- embedding constructors ----------------------------------------------------

def _leaf(p: Universe, a: Formula, ordinal: Ord = O.ZERO, extra: Iterable[Formula] = ()) -> Derivation:
    """Axiom for a true bounded sentence."""
    return Derivation(p, ordinal, 0, frozenset(extra) | {a}, AndRule(a))


def _sides(a: Formula, cfg: CalcConfig) -> tuple[Formula, Formula]:
    # (conjunctive member, disjunctive member) of {a, not a}
    na = negate(a)
    if is_delta0(a):
        return (a, na) if truth_delta0(a, cfg.oracle) else (na, a)
    return (a, na) if cfg.decompose(a).kind == AND_KIND else (na, a)


def _need(p: Universe, a: Formula) -> None:
    problem = _sentence_problem(a, p.carrier)
    if problem:
        raise CalculusError(problem)


def embed_tautology(a: Formula, cfg: CalcConfig, p: Optional[Universe] = None) -> Derivation:
    """``P |- a, not a`` with bound exactly ``2 * dp(a)``."""
    p = p or cfg.root
    _need(p, a)
    return _taut(a, cfg, p)


def _taut(a: Formula, cfg: CalcConfig, p: Universe) -> Derivation:
    conj, disj = _sides(a, cfg)
    if is_delta0(a):
        return _leaf(p, conj, extra=(disj,))
    d = dp(a)
    top = O.nat(2 * d)
    premises = []
    for index, comp in cfg.decompose(conj).items:
        q = index_universe(p, index)
        sub = _taut(comp, cfg, q)
        premises.append(
            Derivation(q, O.nat(2 * d - 1), 0, frozenset({comp, disj}), OrRule(disj, index), (sub,))
        )
    return Derivation(p, top, 0, frozenset({conj, disj}), AndRule(conj), tuple(premises))


def foundation_formulas(a: HFSet, body: Formula, var: str = "x") -> tuple[Formula, Formula, callable]:
    """``B``, ``forall y in a . A(y)`` and the map ``b -> forall y in b . A(y)``.

    ``B`` is ``exists x (forall y in x . A(y) and not A(x))``.
    """
    if free_vars(body) - {var}:
        raise CalculusError(f"{to_sexpr(body)} has free variables besides {var}")
    y = fresh_var("y", body)
    inner = rename(body, var, y)

    def below(b) -> Formula:
        return Forall(y, inner, b)

    b_formula = Exists(var, And(below(Var(var)), negate(body)))
    return b_formula, below(a), below


def embed_foundation(a: HFSet, body: Formula, cfg: CalcConfig, var: str = "x") -> Derivation:
    """``P(a) |- B, forall y in a . A(y)`` with bound exactly ``2 dp(A) + 3 rank(a)``."""
    p = extend(cfg.root, a)
    if not p.carrier.issubset(cfg.world.carrier):
        raise CalculusError(f"the world does not contain {p}")
    b_formula, target, below = foundation_formulas(a, body, var)
    _need(p, b_formula)
    d = dp(body)

    def inst(x: HFSet) -> Formula:
        return substitute(body, var, x)

    def bound(x: HFSet) -> Ord:
        return O.nat(2 * d + 3 * rank(x))

    if is_delta0(target):
        top = bound(a)
        if truth_delta0(target, cfg.oracle):
            return _leaf(p, target, top, (b_formula,))
        # least counterexample below a: every member satisfies A, it does not
        bad = [x for x in transitive_closure(a) if not truth_delta0(inst(x), cfg.oracle)]
        c = min(bad, key=lambda x: (rank(x), x))
        comp = And(below(c), negate(inst(c)))
        leaf = _leaf(p, comp)
        return Derivation(p, top, 0, frozenset({b_formula, target}), OrRule(b_formula, c), (leaf,))

    def build(b: HFSet) -> Derivation:
        premises = []
        for c in b:
            ih = build(c)
            taut = _taut(inst(c), cfg, p)
            conj = And(below(c), negate(inst(c)))
            r = bound(c)
            mid = Derivation(
                p, O.add(r, O.ONE), 0, frozenset({b_formula, inst(c), conj}), AndRule(conj), (ih, taut)
            )
            premises.append(
                Derivation(p, O.add(r, O.nat(2)), 0, frozenset({b_formula, inst(c)}), OrRule(b_formula, c), (mid,))
            )
        return Derivation(p, bound(b), 0, frozenset({b_formula, below(b)}), AndRule(below(b)), tuple(premises))

    return build(a)


def embed_pi2(theta: Formula, cfg: CalcConfig, names: tuple = ("x", "y", "z")) -> Derivation:
    """``P |- forall x forall y exists z . theta`` with bound exactly 3."""
    x, y, z = names
    if not is_delta0(theta):
        raise CalculusError("theta must be bounded")
    if free_vars(theta) - set(names):
        raise CalculusError(f"{to_sexpr(theta)} has free variables besides {names}")
    p = cfg.root
    ex_z = Exists(z, theta)
    all_y = Forall(y, ex_z)
    axiom = Forall(x, all_y)
    _need(p, axiom)
    outer = []
    for a in cfg.world.carrier:
        pa = extend(p, a)
        ya = substitute(all_y, x, a)
        inner = []
        for b in cfg.world.carrier:
            pab = extend(pa, b)
            zab = substitute(substitute(ex_z, x, a), y, b)
            theta_ab = substitute(substitute(theta, x, a), y, b)
            wit = [c for c in pab.carrier if truth_delta0(substitute(theta_ab, z, c), cfg.oracle)]
            if not wit:
                raise CalculusError(f"axiom fails: no witness for x={a}, y={b} in {pab}")
            c = min(wit)
            body = substitute(theta_ab, z, c)
            leaf = _leaf(pab, body)
            inner.append(Derivation(pab, O.ONE, 0, frozenset({zab}), OrRule(zab, c), (leaf,)))
        outer.append(Derivation(pa, O.nat(2), 0, frozenset({ya}), AndRule(ya), tuple(inner)))
    return Derivation(p, O.nat(3), 0, frozenset({axiom}), AndRule(axiom), tuple(outer))


def mh_witness_formula(delta: Formula, cfg: CalcConfig, beta: OrdVec) -> Formula:
    """``exists x in Mh_{k+1}(beta . alpha) . not delta^(x)``."""
    x = fresh_var("q", delta)
    return Exists(x, And(InClass(Var(x), cfg.mh_ref(beta)), negate(relativize(delta, Var(x)))))


def embed_mh_axiom(beta: OrdVec, delta: Formula, cfg: CalcConfig) -> Derivation:
    """``P |-^w delta, exists x in Mh_{k+1}(beta . alpha) . not delta^(x)``, ending in a Mahlo rule."""
    if not in_class(delta, Sigma(cfg.k + 1)):
        raise CalculusError(f"{to_sexpr(delta)} is not Sigma({cfg.k + 1})")
    if len(beta) != len(cfg.alpha_vec) or not vec_lt(beta, cfg.alpha_vec):
        raise CalculusError(f"{beta} is not below {cfg.alpha_vec}")
    p = cfg.root
    _need(p, delta)
    e = mh_witness_formula(delta, cfg, beta)
    gamma = frozenset({delta, e})
    left = _taut(delta, cfg, p)
    right = []
    for q in cfg.mh_members(beta):
        if q not in cfg.world.carrier:
            raise CalculusError(f"class member {q} is outside the world")
        pq = extend(p, q)
        rel = relativize(delta, q)
        comp = cfg.decompose(e).component(q)
        leaf = _leaf(pq, rel) if truth_delta0(rel, cfg.oracle) else _leaf(pq, comp)
        right.append(Derivation(pq, O.ONE, 0, frozenset({e, rel}), OrRule(e, q), (leaf,)))
    return Derivation(p, O.OMEGA, 0, gamma, MhRule(beta, frozenset({delta})), (left, *right))


def embed_truth(a: Formula, cfg: CalcConfig, p: Optional[Universe] = None) -> Derivation:
    """A cut-free derivation of a sentence true in the world, with least bounds.

    Disjunctive witnesses must already lie in the current universe; raises
    when no such witness exists.
    """
    p = p or cfg.root
    _need(p, a)
    d = _truth(a, cfg, p)
    if d is None:
        raise CalculusError(f"no witnessed derivation of {to_sexpr(a)} in {p}")
    return d


def _truth(a: Formula, cfg: CalcConfig, p: Universe) -> Optional[Derivation]:
    if is_delta0(a):
        return _leaf(p, a) if truth_delta0(a, cfg.oracle) else None
    dec = cfg.decompose(a)
    if dec.kind == AND_KIND:
        subs = []
        for index, comp in dec.items:
            sub = _truth(comp, cfg, index_universe(p, index))
            if sub is None:
                return None
            subs.append(sub)
        top = O.add(max((s.ordinal for s in subs), default=O.ZERO), O.ONE) if subs else O.ZERO
        return Derivation(p, top, 0, frozenset({a}), AndRule(a), tuple(subs))
    for index, comp in dec.items:
        if isinstance(index, HFSet) and index not in p.carrier:
            continue
        sub = _truth(comp, cfg, p)
        if sub is not None:
            return Derivation(p, O.add(sub.ordinal, O.ONE), 0, frozenset({a}), OrRule(a, index), (sub,))
    return None


def cut(left: Derivation, right: Derivation, c: Formula, rank: Optional[int] = None) -> Derivation:
    """Cut ``left |- G, not C`` against ``right |- G', C``; bounds are equalized."""
    if left.universe.carrier != right.universe.carrier:
        p = join(left.universe, right.universe)
        left, right = rehome(left, p), rehome(right, p)
    top = max(left.ordinal, right.ordinal)
    left, right = _lift(left, top), _lift(right, top)
    rank = max(left.rank, right.rank, dp(c) + 1) if rank is None else rank
    sequent = (left.sequent - {negate(c)}) | (right.sequent - {c})
    return Derivation(
        left.universe, O.add(top, O.ONE), rank, sequent, CutRule(c), (with_rank(left, rank), with_rank(right, rank))
    )


# -- file format ------------------------------------------------------------------

def _index_json(index):
    return index if isinstance(index, int) else str(index)


def _index_from_json(value):
    return value if isinstance(value, int) else parse_hf(value)


def rule_to_json(rule: Rule) -> dict:
    if isinstance(rule, OrRule):
        return {"tag": "or", "principal": to_sexpr(rule.principal), "index": _index_json(rule.index)}
    if isinstance(rule, AndRule):
        return {"tag": "and", "principal": to_sexpr(rule.principal)}
    if isinstance(rule, CutRule):
        return {"tag": "cut", "formula": to_sexpr(rule.formula)}
    return {"tag": "mh", "beta": str(rule.beta), "delta": [to_sexpr(a) for a in rule.ordered_delta]}


def rule_from_json(data: dict) -> Rule:
    tag = data.get("tag")
    if tag == "or":
        return OrRule(parse_formula(data["principal"]), _index_from_json(data["index"]))
    if tag == "and":
        return AndRule(parse_formula(data["principal"]))
    if tag == "cut":
        return CutRule(parse_formula(data["formula"]))
    if tag == "mh":
        return MhRule(parse_vec(data["beta"]), frozenset(parse_formula(t) for t in data["delta"]))
    raise O.ParseError(f"unknown rule tag {tag!r}")


def to_json(d: Derivation) -> dict:
    return {
        "universe": str(d.universe.carrier),
        "ordinal": str(d.ordinal),
        "rank": d.rank,
        "sequent": [to_sexpr(a) for a in sorted_formulas(d.sequent)],
        "rule": rule_to_json(d.rule),
        "premises": [to_json(p) for p in d.premises],
    }


def from_json(data: dict, budget: OrdinalBudget = ALL) -> Derivation:
    try:
        return Derivation(
            Universe(parse_hf(data["universe"]), budget),
            O.parse(data["ordinal"]),
            int(data["rank"]),
            frozenset(parse_formula(t) for t in data["sequent"]),
            rule_from_json(data["rule"]),
            tuple(from_json(p, budget) for p in data.get("premises", [])),
        )
    except (KeyError, TypeError) as exc:
        raise O.ParseError(f"malformed derivation: {exc}") from exc
    except ValueError as exc:
        if isinstance(exc, O.ParseError):
            raise
        raise O.ParseError(str(exc)) from exc


def dumps(cfg: CalcConfig, d: Derivation) -> str:
    return json.dumps({"config": cfg.to_json(), "derivation": to_json(d)}, indent=1, sort_keys=True)


def loads(text: str) -> tuple[CalcConfig, Derivation]:
    try:
        data = json.loads(text)
        cfg = CalcConfig.from_json(data["config"])
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise O.ParseError(f"malformed derivation file: {exc}") from exc
    except CalculusError as exc:
        raise O.ParseError(str(exc)) from exc
    return cfg, from_json(data["derivation"], cfg.budget)


# -- embed, cut, eliminate ----------------------------------------------------------

def embed_diagonal(axiom: Formula, cfg: CalcConfig) -> Derivation:
    """``P |-^5 not Ax, forall x exists z . theta(x, x, z)`` for ``Ax = forall x forall y exists z . theta``."""
    p = cfg.root
    nax = negate(axiom)
    x, y = axiom.var, axiom.body.var
    ex_z = axiom.body.body
    target = Forall(x, substitute_var(ex_z, y, x))
    _need(p, target)
    premises = []
    for a in cfg.world.carrier:
        pa = extend(p, a)
        inst = cfg.decompose(target).component(a)
        step = cfg.decompose(nax).component(a)
        taut = _taut(inst, cfg, pa)
        mid = Derivation(pa, O.nat(3), 0, frozenset({step, inst}), OrRule(step, a), (taut,))
        premises.append(Derivation(pa, O.nat(4), 0, frozenset({nax, inst}), OrRule(nax, a), (mid,)))
    return Derivation(p, O.nat(5), 0, frozenset({nax, target}), AndRule(target), tuple(premises))


def substitute_var(a: Formula, old: str, new: str) -> Formula:
    """Replace the free variable ``old`` by the variable ``new``, which must be free for it."""
    return rename(a, old, new)


@dataclass(frozen=True)
class PipelineResult:
    name: str
    embedded: Derivation
    rank: int
    start: Ord
    final: Derivation
    bound: Ord

    @property
    def below(self) -> bool:
        return self.final.ordinal < self.bound


def run_pipeline(d: Derivation, cfg: CalcConfig, p: int = 1, name: str = "") -> PipelineResult:
    """Lift the bound to ``K * p``, eliminate all cuts, compare with ``w_{c+1}(K + 1)``."""
    start = O.mul(O.K, O.nat(p))
    lifted = weaken(d, start)
    final = cut_elim_full(lifted, cfg)
    bound = O.omega_tower(d.rank + 1, O.add(O.K, O.ONE))
    return PipelineResult(name, lifted, d.rank, start, final, bound)


def pipeline(theta: Formula, cfg: CalcConfig, p: int = 1, beta: Optional[OrdVec] = None,
             delta: Optional[Formula] = None) -> list[PipelineResult]:
    """Embed, assemble cuts and eliminate them.

    The first run cuts ``forall x forall y exists z . theta`` against its
    diagonal instance.  With ``beta`` and ``delta`` a second run cuts the
    Mahlo axiom for ``delta`` against the tautology for ``delta``.
    """
    ax = embed_pi2(theta, cfg)
    axiom = next(iter(ax.sequent))
    imp = embed_diagonal(axiom, cfg)
    runs = [run_pipeline(cut(imp, ax, axiom), cfg, p, "pi2-instance")]
    if beta is not None and delta is not None:
        mh = embed_mh_axiom(beta, delta, cfg)
        runs.append(run_pipeline(cut(embed_tautology(delta, cfg), mh, delta), cfg, p, "mh-axiom"))
    return runs
