"""Random generators shared by the property tests."""

from __future__ import annotations

import random

from hypothesis import strategies as st

from kpmahlo import ordinals as O


def random_ord(rng: random.Random, depth: int = 3, allow_l: bool = True) -> O.Ord:
    """A random normal term built through the public arithmetic."""
    roll = rng.random()
    if depth <= 0 or roll < 0.25:
        pick = rng.randrange(6 if allow_l else 5)
        return [O.ZERO, O.nat(rng.randint(1, 4)), O.OMEGA, O.K, O.nat(2), O.L][pick]
    if roll < 0.5:
        return O.add(random_ord(rng, depth - 1, allow_l), random_ord(rng, depth - 1, allow_l))
    if roll < 0.7:
        return O.mul(random_ord(rng, depth - 1, allow_l), O.nat(rng.randint(1, 3)))
    if roll < 0.85:
        return O.omega_pow(random_ord(rng, depth - 1, allow_l))
    return O.mul(random_ord(rng, depth - 1, allow_l), random_ord(rng, depth - 1, allow_l))


def random_below_lambda(rng: random.Random, depth: int = 3) -> O.Ord:
    return random_ord(rng, depth, allow_l=False)


_leaves = st.sampled_from([O.ZERO, O.ONE, O.nat(2), O.nat(3), O.OMEGA, O.K, O.L])


def ords(allow_l: bool = True):
    leaves = _leaves if allow_l else _leaves.filter(lambda t: t != O.L)

    def extend(children):
        return st.one_of(
            st.tuples(children, children).map(lambda p: O.add(*p)),
            st.tuples(children, st.integers(1, 3)).map(lambda p: O.mul(p[0], O.nat(p[1]))),
            children.map(O.omega_pow),
            st.tuples(children, children).map(lambda p: O.mul(*p)),
        )

    return st.recursive(leaves, extend, max_leaves=8)


# -- formulas -------------------------------------------------------------------

from kpmahlo import logic as F  # noqa: E402
from kpmahlo.hf import von_neumann  # noqa: E402

VARS = ("x", "y", "z")


def random_formula(rng: random.Random, consts, depth: int = 2, scope=(), unbounded: bool = True):
    """A random formula whose free variables are among ``scope``."""
    terms = list(consts) + [F.Var(v) for v in scope]
    if depth <= 0 or rng.random() < 0.2:
        a, b = rng.choice(terms), rng.choice(terms)
        return F.Mem(a, b, rng.random() < 0.5)
    roll = rng.random()
    if roll < 0.3:
        cls = F.Or if rng.random() < 0.5 else F.And
        return cls(
            random_formula(rng, consts, depth - 1, scope, unbounded),
            random_formula(rng, consts, depth - 1, scope, unbounded),
        )
    var = VARS[len(scope) % len(VARS)]
    cls = F.Exists if rng.random() < 0.5 else F.Forall
    body = random_formula(rng, consts, depth - 1, scope + (var,), unbounded)
    if unbounded and rng.random() < 0.5:
        return cls(var, body)
    return cls(var, body, rng.choice(terms))


def random_sentence(rng: random.Random, consts=None, depth: int = 2, unbounded: bool = True):
    consts = consts or [von_neumann(0), von_neumann(1), von_neumann(2)]
    return random_formula(rng, consts, depth, (), unbounded)


def sentences(consts=None, depth: int = 2, unbounded: bool = True):
    return st.randoms(use_true_random=False).map(
        lambda r: random_sentence(r, consts, depth, unbounded)
    )
