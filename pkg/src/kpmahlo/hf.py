"""Hereditarily finite sets and finite universes.

Every set carries its Ackermann code ``sum(2**code(b) for b in a)``, which
is a canonical name: two constructions of the same extensional set get
the same code, and membership is a bit test.  Members are kept sorted by
code, giving the fixed total order used everywhere for iteration.

Literal syntax: ``{}``, ``{{},{{}}}`` and the von Neumann shorthand ``#n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator

from .ordinals import Ord, ParseError


class BudgetExceeded(RuntimeError):
    pass


class HFSet:
    __slots__ = ("code", "_members")

    def __init__(self, members: Iterable[HFSet] = ()):
        code = 0
        for m in members:
            code |= 1 << m.code
        self.code = code
        self._members = None

    @classmethod
    def from_code(cls, code: int) -> HFSet:
        if code < 0:
            raise ValueError("Ackermann codes are non-negative")
        s = cls.__new__(cls)
        s.code = code
        s._members = None
        return s

    @property
    def members(self) -> tuple[HFSet, ...]:
        if self._members is None:
            c, i, out = self.code, 0, []
            while c:
                if c & 1:
                    out.append(HFSet.from_code(i))
                c >>= 1
                i += 1
            self._members = tuple(out)
        return self._members

    def __contains__(self, x: HFSet) -> bool:
        return bool((self.code >> x.code) & 1)

    def __iter__(self) -> Iterator[HFSet]:
        return iter(self.members)

    def __len__(self) -> int:
        return bin(self.code).count("1")

    def __eq__(self, other) -> bool:
        return isinstance(other, HFSet) and self.code == other.code

    def __hash__(self) -> int:
        return hash(("HF", self.code))

    def __lt__(self, other: HFSet) -> bool:
        return self.code < other.code

    def __le__(self, other: HFSet) -> bool:
        return self.code <= other.code

    def __bool__(self) -> bool:
        return self.code != 0

    def issubset(self, other: HFSet) -> bool:
        return self.code & ~other.code == 0

    def union(self, other: HFSet) -> HFSet:
        return HFSet.from_code(self.code | other.code)

    def with_member(self, x: HFSet) -> HFSet:
        return HFSet.from_code(self.code | (1 << x.code))

    def __str__(self) -> str:
        n = von_neumann_index(self)
        if n is not None and n > 0:
            return f"#{n}"
        return "{" + ",".join(str(m) for m in self.members) + "}"

    def __repr__(self) -> str:
        return f"HFSet({str(self)!r})"

    def braces(self) -> str:
        """The literal without the ``#n`` shorthand."""
        return "{" + ",".join(m.braces() for m in self.members) + "}"


EMPTY = HFSet.from_code(0)


def hf(*members: HFSet) -> HFSet:
    return HFSet(members)


@lru_cache(maxsize=None)
def _vn_code(n: int) -> int:
    code = 0
    for _ in range(n):
        code |= 1 << code
    return code


def von_neumann(n: int) -> HFSet:
    return HFSet.from_code(_vn_code(n))


def von_neumann_index(a: HFSet) -> int | None:
    """``n`` when ``a`` is the von Neumann ordinal ``n``, else ``None``."""
    r = rank(a)
    return r if _vn_code(r) == a.code else None


@lru_cache(maxsize=1 << 16)
def _rank(code: int) -> int:
    best, i = 0, 0
    while code:
        if code & 1:
            best = max(best, _rank(i) + 1)
        code >>= 1
        i += 1
    return best


def rank(a: HFSet) -> int:
    return _rank(a.code)


def transitive_closure(a: HFSet) -> HFSet:
    seen: set[int] = set()
    todo = list(a.members)
    while todo:
        x = todo.pop()
        if x.code not in seen:
            seen.add(x.code)
            todo.extend(x.members)
    code = 0
    for c in seen:
        code |= 1 << c
    return HFSet.from_code(code)


def is_transitive(a: HFSet) -> bool:
    return all(m.issubset(a) for m in a.members)


def is_rank_closed(a: HFSet) -> bool:
    return all(von_neumann(rank(m)) in a for m in a.members)


def stage(n: int) -> list[HFSet]:
    """The cumulative stage ``V_n`` in code order."""
    size = 0
    for _ in range(n):
        size = 1 << size
    if size > 1 << 20:
        raise BudgetExceeded(f"V_{n} has {size} elements")
    return [HFSet.from_code(c) for c in range(size)]


# -- universes ---------------------------------------------------------------

@dataclass(frozen=True)
class OrdinalBudget:
    """Which ordinal codes count as members of a universe.

    The default admits every term; ``max_size`` bounds the symbol count.
    """

    max_size: int | None = None

    def admits(self, o: Ord) -> bool:
        return self.max_size is None or o.size() <= self.max_size

    def __str__(self) -> str:
        return "all" if self.max_size is None else f"strict:{self.max_size}"


ALL = OrdinalBudget()


@dataclass(frozen=True)
class Universe:
    """A nonempty transitive, rank-closed HF set together with an ordinal budget."""

    carrier: HFSet
    budget: OrdinalBudget = field(default=ALL)

    def __post_init__(self):
        if not self.carrier:
            raise ValueError("universes are nonempty")
        if not is_transitive(self.carrier):
            raise ValueError(f"carrier {self.carrier} is not transitive")
        if not is_rank_closed(self.carrier):
            raise ValueError(f"carrier {self.carrier} is not closed under rank")

    def __contains__(self, x: HFSet) -> bool:
        return x in self.carrier

    def __iter__(self):
        return iter(self.carrier.members)

    def __str__(self) -> str:
        return str(self.carrier)

    def admits(self, o: Ord) -> bool:
        return self.budget.admits(o)

    def with_budget(self, budget: OrdinalBudget) -> Universe:
        return Universe(self.carrier, budget)


@lru_cache(maxsize=1 << 16)
def _close(code: int) -> int:
    # least transitive, rank-closed superset of the given set of codes
    s = HFSet.from_code(code)
    while True:
        grown = transitive_closure(s).union(s)
        for m in list(grown.members):
            grown = grown.with_member(von_neumann(rank(m)))
        grown = transitive_closure(grown).union(grown)
        if grown == s:
            return s.code
        s = grown


def closure(a: HFSet) -> HFSet:
    return HFSet.from_code(_close(a.code))


def universe(*members: HFSet, budget: OrdinalBudget = ALL) -> Universe:
    """The least universe containing the given elements (and 0)."""
    return Universe(closure(HFSet(members + (EMPTY,))), budget)


def extend(p: Universe, *items: HFSet) -> Universe:
    carrier = p.carrier
    if all(i in carrier for i in items):
        return p
    for i in items:
        carrier = carrier.with_member(i)
    return Universe(closure(carrier), p.budget)


def enumerate_transitive(n: int, limit: int = 1 << 20) -> list[Universe]:
    """All nonempty transitive, rank-closed subsets of ``V_n``.

    Built rank by rank: the elements of rank ``r`` are subsets of the part
    already chosen, and any nonempty choice must include ``#r``.
    """
    if n > 5:
        raise BudgetExceeded("enumeration is limited to n <= 5")
    if n <= 0:
        return []
    out: list[HFSet] = []

    def grow(current: HFSet, r: int) -> None:
        out.append(current)
        if r >= n:
            return
        below = current.members
        vn = von_neumann(r)
        if not vn.issubset(current):
            return
        fresh = [x for x in _subsets(below) if rank(x) == r and x != vn]
        if len(fresh) > 40 or (1 << len(fresh)) > limit:
            raise BudgetExceeded(f"{1 << len(fresh)} choices at rank {r}")
        for mask in range(1 << len(fresh)):
            chosen = current.with_member(vn)
            for i, x in enumerate(fresh):
                if mask >> i & 1:
                    chosen = chosen.with_member(x)
            grow(chosen, r + 1)
            if len(out) > limit:
                raise BudgetExceeded(f"more than {limit} universes")

    grow(HFSet((EMPTY,)), 1)
    return [Universe(c) for c in out]


def _subsets(items: tuple[HFSet, ...]) -> Iterator[HFSet]:
    codes = [1 << x.code for x in items]
    for mask in range(1 << len(items)):
        code = 0
        for i, c in enumerate(codes):
            if mask >> i & 1:
                code |= c
        yield HFSet.from_code(code)


# -- literals ----------------------------------------------------------------

def parse_hf(text: str) -> HFSet:
    text = text.strip()
    value, pos = _parse_at(text, 0)
    if text[pos:].strip():
        raise ParseError(f"trailing input in HF literal {text!r}")
    return value


def _parse_at(text: str, pos: int) -> tuple[HFSet, int]:
    while pos < len(text) and text[pos].isspace():
        pos += 1
    if pos >= len(text):
        raise ParseError(f"unexpected end of HF literal {text!r}")
    if text[pos] == "#":
        end = pos + 1
        while end < len(text) and text[end].isdigit():
            end += 1
        if end == pos + 1:
            raise ParseError(f"missing number after '#' in {text!r}")
        return von_neumann(int(text[pos + 1:end])), end
    if text[pos] != "{":
        raise ParseError(f"unexpected {text[pos]!r} in HF literal {text!r}")
    pos += 1
    members = []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos < len(text) and text[pos] == "}":
            return HFSet(members), pos + 1
        m, pos = _parse_at(text, pos)
        members.append(m)
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos < len(text) and text[pos] == ",":
            pos += 1
        elif pos < len(text) and text[pos] == "}":
            continue
        else:
            raise ParseError(f"expected ',' or '}}' in HF literal {text!r}")
