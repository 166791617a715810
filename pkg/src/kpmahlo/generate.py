"""Seeded random sentences and derivations for property tests and the CLI."""

from __future__ import annotations

import random
from typing import Optional, Sequence

from . import ordinals as O
from .calculus import (
    AndRule,
    CalcConfig,
    CalculusError,
    Derivation,
    OrRule,
    cut,
    embed_mh_axiom,
    embed_tautology,
    embed_truth,
    weaken,
    with_rank,
)
from .hf import HFSet
from .index import OrdVec
from .logic import And, Exists, Forall, Formula, Mem, Or, Var, dp, evaluate, is_delta0, negate, sequent

VARS = ("x", "y", "z")


def random_formula(rng: random.Random, consts: Sequence[HFSet], depth: int, scope=(), unbounded: bool = True) -> Formula:
    terms = list(consts) + [Var(v) for v in scope]
    if depth <= 0 or rng.random() < 0.2:
        return Mem(rng.choice(terms), rng.choice(terms), rng.random() < 0.5)
    roll = rng.random()
    if roll < 0.3:
        cls = Or if rng.random() < 0.5 else And
        return cls(
            random_formula(rng, consts, depth - 1, scope, unbounded),
            random_formula(rng, consts, depth - 1, scope, unbounded),
        )
    var = VARS[len(scope) % len(VARS)]
    cls = Exists if rng.random() < 0.5 else Forall
    body = random_formula(rng, consts, depth - 1, scope + (var,), unbounded)
    if unbounded and rng.random() < 0.6:
        return cls(var, body)
    return cls(var, body, rng.choice(terms))


def random_sentence(rng: random.Random, consts: Sequence[HFSet], depth: int = 2, unbounded: bool = True) -> Formula:
    return random_formula(rng, consts, depth, (), unbounded)


def sentence_of_depth(rng: random.Random, cfg: CalcConfig, d: int, tries: int = 500) -> Formula:
    """A random sentence over the root carrier with ``dp`` exactly ``d``."""
    consts = list(cfg.root.carrier)
    for _ in range(tries):
        a = random_sentence(rng, consts, d + rng.randint(0, 1))
        if dp(a) == d:
            return a
    raise CalculusError(f"no sentence of depth {d} found")


def true_one(a: Formula, cfg: CalcConfig) -> Formula:
    """Whichever of ``a`` and its negation holds in the world."""
    return a if evaluate(cfg.world, a, cfg.oracle) else negate(a)


class DerivationSampler:
    """Random derivations of true sentences with cuts of bounded depth.

    ``mh`` optionally supplies ``(beta, delta)`` so that Mahlo axioms appear
    as lemmas.
    """

    def __init__(self, cfg: CalcConfig, rng: random.Random, mh: Optional[tuple[OrdVec, Formula]] = None):
        self.cfg = cfg
        self.rng = rng
        self.mh = mh

    def truth(self, t: Formula) -> Derivation:
        return embed_truth(t, self.cfg)

    def lemma(self, t: Formula, max_cut: int, fuel: int) -> Derivation:
        """A derivation of ``{t}`` for a true ``t``, possibly using cuts of depth ``<= max_cut``."""
        rng = self.rng
        roll = rng.random()
        if fuel <= 0 or roll < 0.35:
            return self.truth(t)
        if roll < 0.55 and dp(t) <= max_cut:
            # cut on t itself against its tautology
            return cut(embed_tautology(t, self.cfg), self.lemma(t, max_cut, fuel - 1), t)
        if roll < 0.8:
            s = true_one(sentence_of_depth(rng, self.cfg, rng.randint(0, max_cut)), self.cfg)
            left = weaken(self.lemma(t, max_cut, fuel - 1), extra=[negate(s)])
            return cut(left, self.lemma(s, max_cut, fuel - 1), s)
        if isinstance(t, Or) and not is_delta0(t):
            for i, part in ((0, t.left), (1, t.right)):
                if evaluate(self.cfg.world, part, self.cfg.oracle):
                    sub = self.lemma(part, max_cut, fuel - 1)
                    return Derivation(
                        sub.universe, O.add(sub.ordinal, O.ONE), sub.rank, sequent(t), OrRule(t, i), (sub,)
                    )
        return self.truth(t)

    def implication(self, t: Formula, g: Formula) -> Derivation:
        """``{not t, g}`` where ``g`` is ``t`` or a disjunction containing ``t``."""
        taut = embed_tautology(t, self.cfg)
        if g == t:
            return taut
        if is_delta0(g):
            return Derivation(taut.universe, O.ZERO, 0, sequent(negate(t), g), AndRule(g))
        i = 0 if g.left == t else 1
        return Derivation(taut.universe, O.add(taut.ordinal, O.ONE), 0, sequent(negate(t), g), OrRule(g, i), (taut,))

    def mh_lemma(self) -> Derivation:
        beta, delta = self.mh
        ax = embed_mh_axiom(beta, delta, self.cfg)
        e = next(a for a in ax.sequent if a != delta)
        g = Or(delta, e)
        p = ax.universe
        one = Derivation(p, O.add(ax.ordinal, O.ONE), 0, sequent(g, delta), OrRule(g, 1), (ax,))
        return Derivation(p, O.add(one.ordinal, O.ONE), 0, sequent(g), OrRule(g, 0), (one,))

    def rank_sample(self, c: int, max_nodes: int = 40, tries: int = 400) -> Derivation:
        """A derivation of rank ``c + 1`` whose top cut has depth exactly ``c``."""
        for _ in range(tries):
            try:
                d = self._rank_once(c)
            except CalculusError:
                continue
            if d.size() <= max_nodes:
                return d
        raise CalculusError(f"no derivation with at most {max_nodes} nodes found")

    def _rank_once(self, c: int) -> Derivation:
        rng = self.rng
        if self.mh is not None and rng.random() < 0.25:
            lemma = self.mh_lemma()
            t = next(iter(lemma.sequent))
            if dp(t) != c:
                raise CalculusError("depth mismatch")
        else:
            t = true_one(sentence_of_depth(rng, self.cfg, c), self.cfg)
            lemma = self.lemma(t, c, 2)
        g = t
        if rng.random() < 0.5:
            h = random_sentence(rng, list(self.cfg.root.carrier), 1)
            g = Or(t, h) if rng.random() < 0.5 else Or(h, t)
        imp = self.implication(t, g)
        if rng.random() < 0.5 or is_delta0(t):
            d = cut(imp, lemma, t)
        else:
            d = cut(lemma, imp, negate(t))
        return with_rank(d, c + 1)

    def reduce_pair(self, max_depth: int = 2, max_nodes: int = 40, tries: int = 400):
        """``(d1, d2, C)`` with ``d1 |- G, not C`` and ``d2 |- C, D``; ``C`` bounded or disjunctive."""
        for _ in range(tries):
            try:
                out = self._pair_once(max_depth)
            except CalculusError:
                continue
            if out[0].size() + out[1].size() <= 2 * max_nodes:
                return out
        raise CalculusError("no reduction pair found")

    def _pair_once(self, max_depth: int):
        rng = self.rng
        c = sentence_of_depth(rng, self.cfg, rng.randint(0, max_depth))
        if not is_delta0(c) and self.cfg.decompose(c).kind != "or":
            c = negate(c)
        nc = negate(c)
        true_c = evaluate(self.cfg.world, c, self.cfg.oracle)
        consts = list(self.cfg.root.carrier)
        extra = [random_sentence(rng, consts, 1) for _ in range(rng.randint(0, 2))]
        max_cut = rng.randint(0, max_depth)
        if true_c:
            d2 = weaken(self.lemma(c, max_cut, 2), extra=extra)
            if rng.random() < 0.5:
                d1 = embed_tautology(c, self.cfg)
            else:
                g = true_one(random_sentence(rng, consts, 1), self.cfg)
                d1 = weaken(self.lemma(g, max_cut, 1), extra=[nc])
        else:
            d1 = weaken(self.lemma(nc, max_cut, 2), extra=extra)
            if rng.random() < 0.5:
                d2 = embed_tautology(c, self.cfg)
            else:
                g = true_one(random_sentence(rng, consts, 1), self.cfg)
                d2 = weaken(self.lemma(g, max_cut, 1), extra=[c])
        rank = max(d1.rank, d2.rank, dp(c))
        return with_rank(d1, rank), with_rank(d2, rank), c
