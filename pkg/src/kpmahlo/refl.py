"""Reflection operators over finite families of universes.

``m_op`` keeps the universes ``P`` of a family that reflect every pool
instance true in ``P`` down to some ``Q`` in ``X`` with ``Q in P``.  The
pool replaces "every Pi_k formula": its members are formulas whose free
variables are parameter slots, filled from the carrier of ``P``.

``iterate`` and ``mh`` are the well-founded recursions built on top of it.
Universes are compared by carrier; ``Q in P`` means ``carrier(Q)`` is an
element of ``carrier(P)``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .classes import ClassOracle
from .hf import HFSet, Universe, parse_hf, von_neumann
from .index import OrdVec, all_vectors, bullet, vec_lt
from .logic import Formula, Pi, constants, evaluate, free_vars, in_class, instantiate, parse_formula, to_sexpr
from .ordinals import nat


class ReflectionError(ValueError):
    pass


@dataclass(frozen=True)
class FormulaPool:
    """Formulas with parameter slots; each member is Pi(level) or lower."""

    formulas: tuple = ()
    level: int = 0

    def __post_init__(self):
        object.__setattr__(self, "formulas", tuple(self.formulas))
        for a in self.formulas:
            if not in_class(a, Pi(self.level)):
                raise ReflectionError(f"{to_sexpr(a)} is not Pi({self.level})")

    def at_level(self, k: int) -> FormulaPool:
        """The members usable for ``M_k``."""
        return FormulaPool(tuple(a for a in self.formulas if in_class(a, Pi(k))), k)

    def instances(self, carrier: HFSet) -> Iterable[Formula]:
        for a in self.formulas:
            slots = sorted(free_vars(a))
            for values in itertools.product(carrier.members, repeat=len(slots)):
                yield instantiate(a, dict(zip(slots, values)))

    def __len__(self) -> int:
        return len(self.formulas)

    def __iter__(self):
        return iter(self.formulas)


def _reflects(p: Universe, xs: Sequence[Universe], pool: FormulaPool) -> bool:
    below = [q for q in xs if q.carrier in p.carrier]
    for inst in pool.instances(p.carrier):
        if not evaluate(p, inst):
            continue
        if not any(_params_in(inst, q) and evaluate(q, inst) for q in below):
            return False
    return True


def _params_in(inst: Formula, q: Universe) -> bool:
    return all(c in q.carrier for c in constants(inst))


def m_op(k: int, xs: Iterable[Universe], pool: FormulaPool, family: Iterable[Universe]) -> frozenset:
    """``M_k(X)`` restricted to ``family``."""
    if pool.level > k:
        pool = _checked(pool, k)
    xs = sorted(set(xs), key=lambda u: u.carrier)
    return frozenset(p for p in family if _reflects(p, xs, pool))


def _checked(pool: FormulaPool, k: int) -> FormulaPool:
    for a in pool:
        if not in_class(a, Pi(k)):
            raise ReflectionError(f"{to_sexpr(a)} is not Pi({k})")
    return FormulaPool(pool.formulas, k)


# -- iteration along a well-founded relation ---------------------------------

def _check_well_founded(prec: Iterable[tuple[HFSet, HFSet]]) -> dict:
    below: dict = {}
    for b, a in prec:
        below.setdefault(a, set()).add(b)
    state: dict = {}

    def visit(x):
        if state.get(x) == 1:
            raise ReflectionError(f"relation has a cycle through {x}")
        if state.get(x) == 2:
            return
        state[x] = 1
        for y in below.get(x, ()):
            visit(y)
        state[x] = 2

    for x in list(below):
        visit(x)
    return below


class Iteration:
    """Memo table for ``M_k(a; prec)`` over one family."""

    def __init__(self, k: int, prec: Iterable[tuple[HFSet, HFSet]], pool: FormulaPool, family: Iterable[Universe]):
        self.k = k
        self.below = _check_well_founded(prec)
        self.pool = _checked(pool, k) if pool.level > k else pool
        self.family = tuple(sorted(set(family), key=lambda u: u.carrier))
        self._memo: dict = {}

    def __call__(self, a: HFSet) -> frozenset:
        if a not in self._memo:
            out = []
            for p in self.family:
                if all(
                    _reflects(p, sorted(self(b), key=lambda u: u.carrier), self.pool)
                    for b in sorted(self.below.get(a, ()))
                    if b in p.carrier
                ):
                    out.append(p)
            self._memo[a] = frozenset(out)
        return self._memo[a]


def iterate(k: int, prec, a: HFSet, pool: FormulaPool, family: Iterable[Universe]) -> frozenset:
    """``M_k(a; prec)``: the P with ``P in M_k(M_k(b; prec))`` for all ``b in P``, ``b prec a``."""
    return Iteration(k, prec, pool, family)(a)


def ordinal_order(m: int) -> list[tuple[HFSet, HFSet]]:
    """The strict order on the von Neumann ordinals ``0..m``."""
    return [(von_neumann(i), von_neumann(j)) for j in range(m + 1) for i in range(j)]


# -- ramified Mahlo classes ---------------------------------------------------

def _entry_int(e) -> int:
    if not e.is_finite:
        raise ReflectionError(f"vector entry {e} is not a natural number")
    return e.to_int()


def vector_in(v: OrdVec, carrier: HFSet) -> bool:
    """Every entry, read as a von Neumann ordinal, is an element of ``carrier``."""
    return all(von_neumann(_entry_int(e)) in carrier for e in v)


class MahloTable:
    """Memoized ``Mh_k(a)`` over a family, for vectors with entries in ``0..max_entry``.

    ``top`` is the class ``M_N``; the pool is cut to Pi(k) at level ``k``.
    """

    def __init__(
        self,
        n: int,
        pool: FormulaPool,
        family: Iterable[Universe],
        top: Iterable[Universe] | None = None,
        max_entry: int = 2,
    ):
        self.n = n
        self.pool = pool
        self.family = tuple(sorted(set(family), key=lambda u: u.carrier))
        self.top = frozenset(self.family if top is None else top)
        self.max_entry = max_entry
        self._memo: dict = {}

    def _check(self, k: int, a: OrdVec) -> None:
        if not 0 <= k <= self.n or len(a) != self.n - k:
            raise ReflectionError(f"level {k} needs a vector of length {self.n - k}, got {a}")
        for e in a:
            if _entry_int(e) > self.max_entry:
                raise ReflectionError(f"entry {e} is outside 0..{self.max_entry}")

    def __call__(self, k: int, a: OrdVec) -> frozenset:
        self._check(k, a)
        key = (k, a)
        if key not in self._memo:
            self._memo[key] = self._compute(k, a)
        return self._memo[key]

    def matrix(self, k: int, rows) -> frozenset:
        """Intersection of the row classes; the empty matrix is the top class."""
        out = self.top
        for i, row in enumerate(rows):
            part = self(k + i, row)
            out = part if i == 0 else out & part
        return out

    def _compute(self, k: int, a: OrdVec) -> frozenset:
        if k == self.n:
            return self.top
        pool = self.pool.at_level(k)
        smaller = [
            b for b in all_vectors(len(a), [nat(i) for i in range(self.max_entry + 1)]) if vec_lt(b, a)
        ]
        out = []
        for p in self.family:
            if not vector_in(a, p.carrier):
                continue
            ok = True
            for b in smaller:
                if not vector_in(b, p.carrier):
                    continue
                xs = sorted(self.matrix(k, bullet(b, a)), key=lambda u: u.carrier)
                if not _reflects(p, xs, pool):
                    ok = False
                    break
            if ok:
                out.append(p)
        return frozenset(out)

    def oracle(self, levels: Iterable[int] | None = None) -> ClassOracle:
        """All vector classes as a class oracle."""
        vectors = {}
        entries = [nat(i) for i in range(self.max_entry + 1)]
        for k in levels if levels is not None else range(self.n):
            for a in all_vectors(self.n - k, entries):
                vectors[(k, a)] = self(k, a)
        return ClassOracle(vectors=vectors, top=self.top)


def mh(
    k: int,
    a: OrdVec,
    pool: FormulaPool,
    family: Iterable[Universe],
    n: int,
    top: Iterable[Universe] | None = None,
    max_entry: int = 2,
) -> frozenset:
    """``Mh_k(a)`` over ``family``; ``top`` defaults to the whole family."""
    return MahloTable(n, pool, family, top, max_entry)(k, a)


# -- configuration files ------------------------------------------------------

@dataclass(frozen=True)
class ReflConfig:
    pool: FormulaPool
    family: tuple
    top: tuple | None = None
    n: int = 2
    max_entry: int = 2

    @classmethod
    def from_json(cls, data: Mapping) -> ReflConfig:
        pool = FormulaPool(
            tuple(parse_formula(t) for t in data.get("pool", [])), int(data.get("level", 0))
        ) if "level" in data else _auto_pool([parse_formula(t) for t in data.get("pool", [])])
        family = tuple(Universe(parse_hf(t)) for t in data.get("family", []))
        top = data.get("top")
        return cls(
            pool=pool,
            family=family,
            top=None if top is None else tuple(Universe(parse_hf(t)) for t in top),
            n=int(data.get("N", 2)),
            max_entry=int(data.get("max_entry", 2)),
        )

    def to_json(self) -> dict:
        out = {
            "N": self.n,
            "max_entry": self.max_entry,
            "level": self.pool.level,
            "pool": [to_sexpr(a) for a in self.pool],
            "family": [str(u.carrier) for u in self.family],
        }
        if self.top is not None:
            out["top"] = [str(u.carrier) for u in self.top]
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def _auto_pool(formulas: list) -> FormulaPool:
    level = 0
    while not all(in_class(a, Pi(level)) for a in formulas):
        level += 1
    return FormulaPool(tuple(formulas), level)
