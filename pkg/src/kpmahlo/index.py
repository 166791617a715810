"""Ordinal vectors, the bullet matrix and the tower encoding.

Vectors are written ``[t1,t2,...]`` using the ordinal term syntax; a
matrix prints as ``[[..],[..]]``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import ordinals as O
from .ordinals import Ord, ParseError


class IndexShapeError(ValueError):
    """Shape or range violation in the index algebra."""


@dataclass(frozen=True)
class OrdVec:
    """An immutable vector ``<a_k, ..., a_{N-1}>`` of ordinals below L."""

    entries: tuple = ()

    def __post_init__(self):
        items = tuple(O.nat(e) if isinstance(e, int) else e for e in self.entries)
        for e in items:
            if not isinstance(e, Ord):
                raise TypeError(f"vector entry {e!r} is not an ordinal")
            if not e < O.L:
                raise IndexShapeError(f"vector entry {e} is not below L")
        object.__setattr__(self, "entries", items)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __str__(self) -> str:
        return "[" + ",".join(str(e) for e in self.entries) + "]"

    def __repr__(self) -> str:
        return f"OrdVec({str(self)!r})"

    def tail(self, start: int) -> OrdVec:
        return OrdVec(self.entries[start:])

    @property
    def is_zero_vec(self) -> bool:
        return all(e.is_zero for e in self.entries)


def vec(*entries: Ord | int) -> OrdVec:
    return OrdVec(tuple(entries))


@dataclass(frozen=True)
class IndexMatrix:
    """Upper-triangular matrix: row ``i`` is one entry shorter than row ``i-1``
    and the last row has length one."""

    rows: tuple = ()

    def __post_init__(self):
        rows = tuple(self.rows)
        n = len(rows)
        for i, row in enumerate(rows):
            if not isinstance(row, OrdVec):
                raise TypeError("matrix rows must be OrdVec")
            if len(row) != n - i:
                raise IndexShapeError(f"row {i} has length {len(row)}, expected {n - i}")
        object.__setattr__(self, "rows", rows)

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def __getitem__(self, i):
        return self.rows[i]

    def __str__(self) -> str:
        return "[" + ",".join(str(r) for r in self.rows) + "]"

    def pretty(self) -> str:
        """One row per line, right-aligned like the displayed triangle."""
        cells = [[str(e) for e in row] for row in self.rows]
        width = max((len(c) for row in cells for c in row), default=1)
        n = len(self.rows)
        lines = []
        for i, row in enumerate(cells):
            pad = [" " * width] * i
            lines.append(" ".join(pad + [c.rjust(width) for c in row]).rstrip())
        return "\n".join(lines) if n else "[]"


def _same_length(b: OrdVec, a: OrdVec) -> None:
    if len(b) != len(a):
        raise IndexShapeError(f"length mismatch: {len(b)} vs {len(a)}")


def vec_lt(b: OrdVec, a: OrdVec) -> bool:
    """Componentwise strict order: every ``b_i < a_i``."""
    _same_length(b, a)
    return all(x < y for x, y in zip(b, a))


def bullet(b: OrdVec, a: OrdVec) -> IndexMatrix:
    """Row ``i`` is ``<b_i, a_{i+1}, ..., a_{N-1}>``.

    Two empty vectors give the empty matrix, which stands for the top class.
    """
    _same_length(b, a)
    return IndexMatrix(tuple(OrdVec((b[i],) + a.entries[i + 1:]) for i in range(len(a))))


def star(head: Ord | int, v: OrdVec | Sequence = ()) -> OrdVec:
    head = O.nat(head) if isinstance(head, int) else head
    entries = v.entries if isinstance(v, OrdVec) else tuple(v)
    return OrdVec((head,) + entries)


def star_rows(row: OrdVec, m: IndexMatrix) -> IndexMatrix:
    """Prepend ``row`` to the rows of ``m``."""
    return IndexMatrix((row,) + m.rows)


def lambda_power(t: Ord) -> Ord:
    """``L^t`` realized as ``w^(L*t)``; ``L^0 = 1``."""
    if t.is_zero:
        return O.ONE
    return O.omega_pow(O.mul(O.L, t))


def tower(a: OrdVec) -> Ord:
    """``t_{N-1} = a_{N-1}`` and ``t_i = L^(t_{i+1}) * a_i``."""
    if not len(a):
        raise IndexShapeError("tower of an empty vector")
    t = a[-1]
    for entry in reversed(a.entries[:-1]):
        t = O.mul(lambda_power(t), entry)
    return t


# -- text syntax -------------------------------------------------------------

def _split_top(body: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in body:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if cur or parts:
        parts.append("".join(cur))
    return parts


def parse_vec(text: str) -> OrdVec:
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise ParseError(f"vector literal must be bracketed: {text!r}")
    body = text[1:-1].strip()
    if not body:
        return OrdVec(())
    try:
        return OrdVec(tuple(O.parse(p) for p in _split_top(body)))
    except IndexShapeError as exc:
        raise ParseError(str(exc)) from exc


def parse_matrix(text: str) -> IndexMatrix:
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise ParseError(f"matrix literal must be bracketed: {text!r}")
    body = text[1:-1].strip()
    rows = [parse_vec(p) for p in _split_top(body)] if body else []
    try:
        return IndexMatrix(tuple(rows))
    except IndexShapeError as exc:
        raise ParseError(str(exc)) from exc


def parse_index(text: str) -> OrdVec | IndexMatrix:
    """A vector or a matrix, told apart by a nested bracket."""
    body = text.strip()[1:].lstrip()
    return parse_matrix(text) if body.startswith("[") else parse_vec(text)


def all_vectors(length: int, entries: Iterable[Ord]) -> list[OrdVec]:
    pool = list(entries)
    return [OrdVec(p) for p in itertools.product(pool, repeat=length)]
