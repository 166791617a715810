"""Class references and finite class oracles.

A class atom ``q in-class C`` is answered by a :class:`ClassOracle`, which
assigns a finite set of universe carriers to each class reference.  Matrix
references are never stored: ``Mh_k(<g_k, ..., g_{N-1}>)`` is computed as
the intersection of its row classes ``Mh_{k+i}(g_{k+i})``, and the empty
index is the top class ``M_N``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Union

from .hf import HFSet, Universe, parse_hf
from .index import IndexMatrix, OrdVec, parse_index


@dataclass(frozen=True)
class MhRef:
    level: int
    index: Union[OrdVec, IndexMatrix]

    def __str__(self) -> str:
        return f"(Mh {self.level} {self.index})"


@dataclass(frozen=True)
class NamedRef:
    name: str

    def __str__(self) -> str:
        return f"(class {self.name})"


ClassRef = Union[MhRef, NamedRef]


def _carrier(x: HFSet | Universe) -> HFSet:
    return x.carrier if isinstance(x, Universe) else x


class ClassOracle:
    """Finite assignment of universes to class references. Immutable."""

    def __init__(
        self,
        vectors: Mapping[tuple[int, OrdVec], Iterable[HFSet | Universe]] | None = None,
        top: Iterable[HFSet | Universe] = (),
        named: Mapping[str, Iterable[HFSet | Universe]] | None = None,
    ):
        self._vectors = {
            (lvl, v): frozenset(_carrier(x) for x in xs) for (lvl, v), xs in (vectors or {}).items()
        }
        self._top = frozenset(_carrier(x) for x in top)
        self._named = {k: frozenset(_carrier(x) for x in xs) for k, xs in (named or {}).items()}

    def members(self, ref: ClassRef) -> frozenset[HFSet]:
        if isinstance(ref, NamedRef):
            return self._named.get(ref.name, frozenset())
        idx = ref.index
        if len(idx) == 0:
            return self._top
        if isinstance(idx, OrdVec):
            return self._vectors.get((ref.level, idx), frozenset())
        out = None
        for i, row in enumerate(idx):
            part = self.members(MhRef(ref.level + i, row))
            out = part if out is None else out & part
        return out

    def contains(self, ref: ClassRef, x: HFSet) -> bool:
        return x in self.members(ref)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ClassOracle)
            and self._vectors == other._vectors
            and self._top == other._top
            and self._named == other._named
        )

    __hash__ = None

    # -- file format ----------------------------------------------------
    def to_json(self) -> dict:
        def lits(xs):
            return [str(x) for x in sorted(xs)]

        return {
            "top": lits(self._top),
            "vectors": [
                {"level": lvl, "index": str(v), "members": lits(xs)}
                for (lvl, v), xs in sorted(self._vectors.items(), key=lambda kv: (kv[0][0], str(kv[0][1])))
            ],
            "named": {k: lits(v) for k, v in sorted(self._named.items())},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> ClassOracle:
        vectors = {}
        for entry in data.get("vectors", []):
            idx = parse_index(entry["index"])
            if not isinstance(idx, OrdVec):
                raise ValueError("oracle entries are indexed by vectors; matrices are derived")
            vectors[(int(entry["level"]), idx)] = [parse_hf(m) for m in entry["members"]]
        return cls(
            vectors=vectors,
            top=[parse_hf(m) for m in data.get("top", [])],
            named={k: [parse_hf(m) for m in v] for k, v in data.get("named", {}).items()},
        )

    def __repr__(self) -> str:
        return f"ClassOracle({json.dumps(self.to_json())})"


EMPTY_ORACLE = ClassOracle()
