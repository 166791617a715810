"""Ordinal notations in Cantor normal form below epsilon_{K+2}.

A term is a finite sum ``w^e1*c1 + ... + w^em*cm`` with strictly decreasing
exponents and positive integer coefficients.  Besides 0 there are two
epsilon constants, ``K`` and ``L`` (the next epsilon number above ``K``);
both are fixed points of ``x -> w^x``, so ``w^K`` normalizes to ``K``.

Text syntax::

    0  3  w  K  L  w^(T)  w^2  T*n  T+T  (T)

The printer emits the canonical form and ``parse(str(t)) == t`` for every
normal term.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Union


class ParseError(ValueError):
    pass


class Comparison(enum.Enum):
    LESS = "<"
    EQUAL = "="
    GREATER = ">"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class _Eps:
    """An epsilon constant used as an exponent: ``w^K = K``."""

    level: int

    @property
    def name(self) -> str:
        return "KL"[self.level]


_K = _Eps(0)
_L = _Eps(1)

Exponent = Union[_Eps, "Ord"]


@dataclass(frozen=True, eq=True)
class Ord:
    """An ordinal in normal form.  Build values with the module helpers;
    ``terms`` holds ``(exponent, coefficient)`` pairs, largest first."""

    terms: tuple = ()

    # -- comparison -----------------------------------------------------
    def __lt__(self, other: Ord) -> bool:
        return _cmp_ord(self, other) < 0

    def __le__(self, other: Ord) -> bool:
        return _cmp_ord(self, other) <= 0

    def __gt__(self, other: Ord) -> bool:
        return _cmp_ord(self, other) > 0

    def __ge__(self, other: Ord) -> bool:
        return _cmp_ord(self, other) >= 0

    # -- arithmetic sugar ----------------------------------------------
    def __add__(self, other: Ord | int) -> Ord:
        return add(self, _coerce(other))

    def __radd__(self, other: int) -> Ord:
        return add(_coerce(other), self)

    def __mul__(self, other: Ord | int) -> Ord:
        return mul(self, _coerce(other))

    def __rmul__(self, other: int) -> Ord:
        return mul(_coerce(other), self)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms:
            if e == ZERO:
                parts.append(str(c))
                continue
            if isinstance(e, _Eps):
                base = e.name
            elif e == ONE:
                base = "w"
            else:
                base = f"w^({e})"
            parts.append(base if c == 1 else f"{base}*{c}")
        return "+".join(parts)

    def __repr__(self) -> str:
        return f"Ord({str(self)!r})"

    # -- inspection -----------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_finite(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.terms[0][0] == ZERO)

    def to_int(self) -> int:
        if not self.is_finite:
            raise ValueError(f"{self} is not finite")
        return self.terms[0][1] if self.terms else 0

    @property
    def is_successor(self) -> bool:
        return bool(self.terms) and self.terms[-1][0] == ZERO

    def size(self) -> int:
        """Number of symbols in the normal form; used by strict budgets."""
        n = 1
        for e, _ in self.terms:
            n += 2 if isinstance(e, _Eps) else 1 + e.size()
        return n

    def mentions(self, const: str) -> bool:
        """True when the epsilon constant ``"K"`` or ``"L"`` occurs."""
        for e, _ in self.terms:
            if isinstance(e, _Eps):
                if e.name == const:
                    return True
            elif e.mentions(const):
                return True
        return False


ZERO = Ord(())
ONE = Ord(((ZERO, 1),))
OMEGA = Ord(((ONE, 1),))
K = Ord(((_K, 1),))
L = Ord(((_L, 1),))


def nat(n: int) -> Ord:
    if n < 0:
        raise ValueError("ordinals are non-negative")
    return Ord(((ZERO, n),)) if n else ZERO


def _coerce(x: Ord | int) -> Ord:
    if isinstance(x, Ord):
        return x
    if isinstance(x, int):
        return nat(x)
    raise TypeError(f"cannot use {type(x).__name__} as an ordinal")


def _exp_value(e: Exponent) -> Ord:
    return Ord(((e, 1),)) if isinstance(e, _Eps) else e


def _as_exponent(o: Ord) -> Exponent:
    # an exponent equal to an epsilon constant collapses to that constant
    if len(o.terms) == 1 and o.terms[0][1] == 1 and isinstance(o.terms[0][0], _Eps):
        return o.terms[0][0]
    return o


@lru_cache(maxsize=1 << 17)
def _cmp_exp(x: Exponent, y: Exponent) -> int:
    if isinstance(x, _Eps) and isinstance(y, _Eps):
        return (x.level > y.level) - (x.level < y.level)
    return _cmp_ord(_exp_value(x), _exp_value(y))


def _cmp_ord(a: Ord, b: Ord) -> int:
    if a is b:
        return 0
    for (ea, ca), (eb, cb) in zip(a.terms, b.terms):
        s = _cmp_exp(ea, eb)
        if s:
            return s
        if ca != cb:
            return 1 if ca > cb else -1
    la, lb = len(a.terms), len(b.terms)
    return (la > lb) - (la < lb)


def cmp(a: Ord, b: Ord) -> Comparison:
    s = _cmp_ord(a, b)
    if s < 0:
        return Comparison.LESS
    return Comparison.GREATER if s > 0 else Comparison.EQUAL


def add(a: Ord, b: Ord) -> Ord:
    if not b.terms:
        return a
    lead, lead_c = b.terms[0]
    kept = []
    for e, c in a.terms:
        s = _cmp_exp(e, lead)
        if s > 0:
            kept.append((e, c))
        elif s == 0:
            kept.append((e, c + lead_c))
            return Ord(tuple(kept) + b.terms[1:])
        else:
            break
    return Ord(tuple(kept) + b.terms)


def _exp_add(e: Exponent, f: Exponent) -> Exponent:
    return _as_exponent(add(_exp_value(e), _exp_value(f)))


def mul(a: Ord, b: Ord) -> Ord:
    if not a.terms or not b.terms:
        return ZERO
    lead, lead_c = a.terms[0]
    out = ZERO
    for f, n in b.terms:
        if f == ZERO:
            part = Ord(((lead, lead_c * n),) + a.terms[1:])
        else:
            part = Ord(((_exp_add(lead, f), n),))
        out = add(out, part)
    return out


def omega_pow(a: Ord) -> Ord:
    return Ord(((_as_exponent(a), 1),))


def omega_tower(n: int, a: Ord) -> Ord:
    """``w_0(a) = a`` and ``w_{n+1}(a) = w^(w_n(a))``."""
    if n < 0:
        raise ValueError("tower height must be a natural number")
    for _ in range(n):
        a = omega_pow(a)
    return a


def normalize(text_or_term: str | Ord) -> Ord:
    """Canonical form of a raw term (given as text or as an ``Ord``)."""
    if isinstance(text_or_term, Ord):
        return text_or_term
    return parse(text_or_term)


def principal_parts(a: Ord) -> Iterator[Ord]:
    """Yield the summands ``w^e*c`` of ``a`` as separate ordinals."""
    for term in a.terms:
        yield Ord((term,))


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(\d+)|([KLwω𝕂Λ])|(\^|\*|\+|\(|\)))")


def _tokenize(text: str) -> list[str]:
    tokens, pos = [], 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r} at {pos} in {text!r}")
        tok = m.group(1) or m.group(2) or m.group(3)
        tokens.append({"ω": "w", "𝕂": "K", "Λ": "L"}.get(tok, tok))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> str | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise ParseError(f"expected {expected or 'a term'} in {self.text!r}")
        self.i += 1
        return tok

    def expr(self) -> Ord:
        value = self.product()
        while self.peek() == "+":
            self.take()
            value = add(value, self.product())
        return value

    def product(self) -> Ord:
        value = self.power()
        while self.peek() == "*":
            self.take()
            factor = self.power()
            if factor.is_zero:
                raise ParseError(f"non-positive coefficient in {self.text!r}")
            value = mul(value, factor)
        return value

    def power(self) -> Ord:
        tok = self.peek()
        if tok == "w":
            self.take()
            if self.peek() == "^":
                self.take()
                return omega_pow(self.atom())
            return OMEGA
        return self.atom()

    def atom(self) -> Ord:
        tok = self.take()
        if tok == "(":
            value = self.expr()
            self.take(")")
            return value
        if tok.isdigit():
            return nat(int(tok))
        if tok == "K":
            return K
        if tok == "L":
            return L
        if tok == "w":
            self.i -= 1
            return self.power()
        raise ParseError(f"unexpected {tok!r} in {self.text!r}")


def parse(text: str) -> Ord:
    p = _Parser(text)
    if not p.toks:
        raise ParseError("empty ordinal term")
    value = p.expr()
    if p.peek() is not None:
        raise ParseError(f"trailing input {p.peek()!r} in {text!r}")
    return value
