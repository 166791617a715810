"""Set-theoretic sentences over hereditarily finite constants.

Formulas are kept in negation normal form: negation lives on the atoms
``a in b`` and ``q in-class C``, and ``negate`` pushes through connectives
and quantifiers by de Morgan.  Quantifiers are either bounded by a term
(``exists-in x a``) or unbounded; unbounded ones range over the carrier of
whatever universe the sentence is evaluated in.

S-expression syntax::

    (in a b) (notin a b) (in-class q (Mh 2 [[1,4],[2]])) (notin-class q (class X))
    (or A B) (and A B) (exists x A) (forall x A) (exists-in x a A) (forall-in x a A)

The parser also accepts ``(not A)``, ``(implies A B)`` and ``(eq a b)``;
the printer only emits the primitive forms.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Union

from .classes import EMPTY_ORACLE, ClassOracle, ClassRef, MhRef, NamedRef
from .hf import HFSet, Universe, parse_hf, von_neumann
from .index import parse_index
from .ordinals import ParseError


class FormulaError(ValueError):
    pass


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


Term = Union[Var, HFSet]


@dataclass(frozen=True)
class Mem:
    left: Term
    right: Term
    positive: bool = True


@dataclass(frozen=True)
class InClass:
    elem: Term
    ref: ClassRef
    positive: bool = True


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"
    bound: Optional[Term] = None


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"
    bound: Optional[Term] = None


Formula = Union[Mem, InClass, Or, And, Exists, Forall]
Sequent = frozenset


def sequent(*formulas: Formula) -> frozenset:
    return frozenset(formulas)


# -- basic syntax operations --------------------------------------------------

@lru_cache(maxsize=1 << 16)
def negate(a: Formula) -> Formula:
    if isinstance(a, Mem):
        return Mem(a.left, a.right, not a.positive)
    if isinstance(a, InClass):
        return InClass(a.elem, a.ref, not a.positive)
    if isinstance(a, Or):
        return And(negate(a.left), negate(a.right))
    if isinstance(a, And):
        return Or(negate(a.left), negate(a.right))
    if isinstance(a, Exists):
        return Forall(a.var, negate(a.body), a.bound)
    if isinstance(a, Forall):
        return Exists(a.var, negate(a.body), a.bound)
    raise TypeError(f"not a formula: {a!r}")


def _term_free(t: Term) -> frozenset:
    return frozenset((t.name,)) if isinstance(t, Var) else frozenset()


@lru_cache(maxsize=1 << 16)
def free_vars(a: Formula) -> frozenset:
    if isinstance(a, Mem):
        return _term_free(a.left) | _term_free(a.right)
    if isinstance(a, InClass):
        return _term_free(a.elem)
    if isinstance(a, (Or, And)):
        return free_vars(a.left) | free_vars(a.right)
    inner = free_vars(a.body) - {a.var}
    return inner | (_term_free(a.bound) if a.bound is not None else frozenset())


def is_sentence(a: Formula) -> bool:
    return not free_vars(a)


def _subst_term(t: Term, var: str, value: HFSet) -> Term:
    return value if isinstance(t, Var) and t.name == var else t


@lru_cache(maxsize=1 << 16)
def substitute(a: Formula, var: str, value: HFSet) -> Formula:
    """Replace free occurrences of ``var`` by the constant ``value``."""
    if isinstance(a, Mem):
        return Mem(_subst_term(a.left, var, value), _subst_term(a.right, var, value), a.positive)
    if isinstance(a, InClass):
        return InClass(_subst_term(a.elem, var, value), a.ref, a.positive)
    if isinstance(a, Or):
        return Or(substitute(a.left, var, value), substitute(a.right, var, value))
    if isinstance(a, And):
        return And(substitute(a.left, var, value), substitute(a.right, var, value))
    bound = _subst_term(a.bound, var, value) if a.bound is not None else None
    body = a.body if a.var == var else substitute(a.body, var, value)
    return type(a)(a.var, body, bound)


def variables(a: Formula) -> frozenset:
    """Every variable name occurring in ``a``, bound or free."""
    if isinstance(a, Mem):
        return _term_free(a.left) | _term_free(a.right)
    if isinstance(a, InClass):
        return _term_free(a.elem)
    if isinstance(a, (Or, And)):
        return variables(a.left) | variables(a.right)
    out = variables(a.body) | {a.var}
    return out | (_term_free(a.bound) if a.bound is not None else frozenset())


def fresh_var(base: str, *formulas: Formula) -> str:
    taken = frozenset().union(*(variables(f) for f in formulas))
    name = base
    while name in taken:
        name += "'"
    return name


def rename(a: Formula, old: str, new: str) -> Formula:
    """Rename the free variable ``old``; ``new`` must not occur in ``a``."""
    def t(x: Term) -> Term:
        return Var(new) if isinstance(x, Var) and x.name == old else x

    if isinstance(a, Mem):
        return Mem(t(a.left), t(a.right), a.positive)
    if isinstance(a, InClass):
        return InClass(t(a.elem), a.ref, a.positive)
    if isinstance(a, (Or, And)):
        return type(a)(rename(a.left, old, new), rename(a.right, old, new))
    bound = t(a.bound) if a.bound is not None else None
    body = a.body if a.var == old else rename(a.body, old, new)
    return type(a)(a.var, body, bound)


def instantiate(a: Formula, binding: dict) -> Formula:
    for name, value in binding.items():
        a = substitute(a, name, value)
    return a


@lru_cache(maxsize=1 << 16)
def is_delta0(a: Formula) -> bool:
    if isinstance(a, (Mem, InClass)):
        return True
    if isinstance(a, (Or, And)):
        return is_delta0(a.left) and is_delta0(a.right)
    return a.bound is not None and is_delta0(a.body)


def is_unbounded(a: Formula) -> bool:
    return not is_delta0(a)


@lru_cache(maxsize=1 << 16)
def dp(a: Formula) -> int:
    """Depth: 0 on bounded sentences, one more than the components otherwise."""
    if is_delta0(a):
        return 0
    if isinstance(a, (Or, And)):
        return max(dp(a.left), dp(a.right)) + 1
    return dp(a.body) + 1


def _term_consts(t: Optional[Term]) -> frozenset:
    return frozenset((t,)) if isinstance(t, HFSet) else frozenset()


@lru_cache(maxsize=1 << 16)
def constants(a: Formula) -> frozenset:
    """The set constants occurring in ``a``."""
    if isinstance(a, Mem):
        return _term_consts(a.left) | _term_consts(a.right)
    if isinstance(a, InClass):
        return _term_consts(a.elem)
    if isinstance(a, (Or, And)):
        return constants(a.left) | constants(a.right)
    return constants(a.body) | _term_consts(a.bound)


def sequent_constants(gamma: Iterable[Formula]) -> frozenset:
    out = frozenset()
    for a in gamma:
        out |= constants(a)
    return out


def relativize(a: Formula, q: Term) -> Formula:
    """Bound every unbounded quantifier by ``q``."""
    if isinstance(a, (Mem, InClass)):
        return a
    if isinstance(a, Or):
        return Or(relativize(a.left, q), relativize(a.right, q))
    if isinstance(a, And):
        return And(relativize(a.left, q), relativize(a.right, q))
    bound = q if a.bound is None else a.bound
    return type(a)(a.var, relativize(a.body, q), bound)


# -- Levy classification ------------------------------------------------------

@dataclass(frozen=True, order=True)
class LevyClass:
    """``Delta0`` (kind ``"D"``, n = 0), ``Sigma(n)`` or ``Pi(n)``."""

    kind: str
    n: int

    def __str__(self) -> str:
        return "Delta0" if self.kind == "D" else f"{'Sigma' if self.kind == 'S' else 'Pi'}({self.n})"

    @property
    def dual(self) -> LevyClass:
        return LevyClass({"D": "D", "S": "P", "P": "S"}[self.kind], self.n)

    def within(self, other: LevyClass) -> bool:
        """Class inclusion ``self ⊆ other``."""
        if self.kind == "D":
            return True
        if other.kind == "D":
            return False
        if self.kind == other.kind:
            return self.n <= other.n
        return self.n < other.n


DELTA0 = LevyClass("D", 0)


def Sigma(n: int) -> LevyClass:
    return LevyClass("S", n)


def Pi(n: int) -> LevyClass:
    return LevyClass("P", n)


@lru_cache(maxsize=1 << 16)
def _levels(a: Formula) -> tuple[int, int]:
    # least n with a in Sigma(n), least n with a in Pi(n); 0 stands for Delta0
    if is_delta0(a):
        return 0, 0
    if isinstance(a, (Or, And)):
        sl, pl = _levels(a.left)
        sr, pr = _levels(a.right)
        return max(sl, sr), max(pl, pr)
    s, p = _levels(a.body)
    if a.bound is not None:
        return s, p
    if isinstance(a, Exists):
        s2 = max(1, min(s, p + 1))
        return s2, s2 + 1
    p2 = max(1, min(p, s + 1))
    return p2 + 1, p2


def classify(a: Formula) -> LevyClass:
    """Least Levy class of ``a``; when a Sigma and a Pi class of the same
    level are both least, disjunctive forms get Sigma and conjunctive
    forms get Pi, so that ``classify(negate(a))`` is the dual class."""
    s, p = _levels(a)
    if s == p == 0:
        return DELTA0
    if s < p:
        return Sigma(s)
    if p < s:
        return Pi(p)
    return Sigma(s) if isinstance(a, (Or, Exists)) else Pi(p)


def in_class(a: Formula, cls: LevyClass) -> bool:
    """Membership of ``a`` in ``cls`` (not only of its least class)."""
    s, p = _levels(a)
    if cls.kind == "D":
        return s == p == 0
    return (s if cls.kind == "S" else p) <= cls.n


# -- evaluation ---------------------------------------------------------------

def _value(t: Term, env: dict) -> HFSet:
    if isinstance(t, HFSet):
        return t
    try:
        return env[t.name]
    except KeyError:
        raise FormulaError(f"free variable {t.name}") from None


def _holds(a: Formula, env: dict, domain: Optional[HFSet], oracle: ClassOracle) -> bool:
    if isinstance(a, Mem):
        return (_value(a.left, env) in _value(a.right, env)) == a.positive
    if isinstance(a, InClass):
        return oracle.contains(a.ref, _value(a.elem, env)) == a.positive
    if isinstance(a, Or):
        return _holds(a.left, env, domain, oracle) or _holds(a.right, env, domain, oracle)
    if isinstance(a, And):
        return _holds(a.left, env, domain, oracle) and _holds(a.right, env, domain, oracle)
    if a.bound is not None:
        rng = _value(a.bound, env).members
    elif domain is None:
        raise FormulaError("unbounded quantifier outside a universe")
    else:
        rng = domain.members
    test = any if isinstance(a, Exists) else all
    return test(_holds(a.body, {**env, a.var: x}, domain, oracle) for x in rng)


def truth_delta0(a: Formula, oracle: ClassOracle = EMPTY_ORACLE) -> bool:
    """Truth of a bounded sentence; absolute for transitive universes."""
    if not is_delta0(a):
        raise FormulaError("truth_delta0 needs a bounded sentence")
    return _holds(a, {}, None, oracle)


def evaluate(p: Universe | HFSet, a: Formula, oracle: ClassOracle = EMPTY_ORACLE) -> bool:
    """``p |= a`` with unbounded quantifiers ranging over the carrier of ``p``."""
    carrier = p.carrier if isinstance(p, Universe) else p
    if free_vars(a):
        raise FormulaError(f"not a sentence: {to_sexpr(a)}")
    outside = [c for c in constants(a) if c not in carrier]
    if outside:
        raise FormulaError(f"constant {outside[0]} is not in the universe {carrier}")
    return _holds(a, {}, carrier, oracle)


# -- disjunction / conjunction assignment -------------------------------------

OR_KIND = "or"
AND_KIND = "and"


@dataclass(frozen=True)
class Decomposition:
    kind: str
    items: tuple  # ((index, component), ...)

    @property
    def indices(self) -> tuple:
        return tuple(i for i, _ in self.items)

    def component(self, index) -> Formula:
        for i, c in self.items:
            if i == index:
                return c
        raise KeyError(index)


def decompose(a: Formula, world: Universe | HFSet, oracle: ClassOracle = EMPTY_ORACLE) -> Decomposition:
    """Read ``a`` as a disjunction or conjunction of its components.

    Bounded sentences have no components and are a conjunction exactly when
    true.  Binary connectives are indexed by 0 and 1, bounded quantifiers by
    the members of the bound, unbounded ones by the members of ``world``.
    """
    if is_delta0(a):
        return Decomposition(AND_KIND if truth_delta0(a, oracle) else OR_KIND, ())
    if isinstance(a, (Or, And)):
        return Decomposition(OR_KIND if isinstance(a, Or) else AND_KIND, ((0, a.left), (1, a.right)))
    if a.bound is not None:
        if not isinstance(a.bound, HFSet):
            raise FormulaError("decompose needs a sentence")
        rng = a.bound.members
    else:
        rng = (world.carrier if isinstance(world, Universe) else world).members
    kind = OR_KIND if isinstance(a, Exists) else AND_KIND
    return Decomposition(kind, tuple((x, substitute(a.body, a.var, x)) for x in rng))


def index_as_set(i) -> HFSet:
    """Index values as sets: 0 and 1 become von Neumann ordinals."""
    return von_neumann(i) if isinstance(i, int) else i


# -- convenience constructors --------------------------------------------------

def mem(a, b) -> Mem:
    return Mem(_term(a), _term(b))


def notmem(a, b) -> Mem:
    return Mem(_term(a), _term(b), False)


def implies(a: Formula, b: Formula) -> Formula:
    return Or(negate(a), b)


_fresh = itertools.count()


def equals(a, b) -> Formula:
    """Extensional equality as a bounded sentence."""
    a, b = _term(a), _term(b)
    taken = {t.name for t in (a, b) if isinstance(t, Var)}
    z = "z"
    while z in taken:
        z = f"z{next(_fresh)}"
    return And(Forall(z, Mem(Var(z), b), a), Forall(z, Mem(Var(z), a), b))


def exists_in_class(var: str, ref: ClassRef, body: Formula) -> Formula:
    """``exists x in C . body`` written as ``exists x (x in C and body)``."""
    return Exists(var, And(InClass(Var(var), ref), body))


def _term(t) -> Term:
    if isinstance(t, (Var, HFSet)):
        return t
    if isinstance(t, str):
        return _parse_term(t)
    raise TypeError(f"not a term: {t!r}")


# -- printing -------------------------------------------------------------------

def _term_str(t: Term) -> str:
    return str(t)


def to_sexpr(a: Formula) -> str:
    if isinstance(a, Mem):
        return f"({'in' if a.positive else 'notin'} {_term_str(a.left)} {_term_str(a.right)})"
    if isinstance(a, InClass):
        return f"({'in-class' if a.positive else 'notin-class'} {_term_str(a.elem)} {a.ref})"
    if isinstance(a, Or):
        return f"(or {to_sexpr(a.left)} {to_sexpr(a.right)})"
    if isinstance(a, And):
        return f"(and {to_sexpr(a.left)} {to_sexpr(a.right)})"
    head = "exists" if isinstance(a, Exists) else "forall"
    if a.bound is None:
        return f"({head} {a.var} {to_sexpr(a.body)})"
    return f"({head}-in {a.var} {_term_str(a.bound)} {to_sexpr(a.body)})"


def sort_key(a: Formula) -> str:
    return to_sexpr(a)


def sorted_formulas(gamma: Iterable[Formula]) -> list:
    return sorted(gamma, key=sort_key)


# -- parsing --------------------------------------------------------------------

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")


def _tokens(text: str) -> list[str]:
    out, i, n = [], 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "()":
            out.append(ch)
            i += 1
        elif ch in "{[":
            close = "}" if ch == "{" else "]"
            depth, j = 0, i
            while j < n:
                if text[j] in "{[(":
                    depth += 1
                elif text[j] in "}])":
                    depth -= 1
                    if depth == 0:
                        break
                j += 1
            if j >= n or text[j] != close:
                raise ParseError(f"unbalanced literal in {text!r}")
            out.append(text[i:j + 1])
            i = j + 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "()":
                j += 1
            out.append(text[i:j])
            i = j
    return out


def _read(tokens: list[str], pos: int):
    if pos >= len(tokens):
        raise ParseError("unexpected end of formula")
    tok = tokens[pos]
    if tok == ")":
        raise ParseError("unexpected ')'")
    if tok != "(":
        return tok, pos + 1
    items, pos = [], pos + 1
    while True:
        if pos >= len(tokens):
            raise ParseError("missing ')'")
        if tokens[pos] == ")":
            return items, pos + 1
        item, pos = _read(tokens, pos)
        items.append(item)


def _parse_term(tok) -> Term:
    if not isinstance(tok, str):
        raise ParseError(f"expected a term, got a list {tok!r}")
    if tok.startswith("{") or tok.startswith("#"):
        return parse_hf(tok)
    if _IDENT.match(tok):
        return Var(tok)
    raise ParseError(f"bad term {tok!r}")


def _parse_ref(node) -> ClassRef:
    if not isinstance(node, list) or not node:
        raise ParseError(f"bad class reference {node!r}")
    if node[0] == "Mh" and len(node) == 3:
        try:
            return MhRef(int(node[1]), parse_index(node[2]))
        except ValueError as exc:
            raise ParseError(str(exc)) from exc
    if node[0] == "class" and len(node) == 2:
        return NamedRef(node[1])
    raise ParseError(f"bad class reference {node!r}")


def _build(node) -> Formula:
    if not isinstance(node, list) or not node or not isinstance(node[0], str):
        raise ParseError(f"expected a formula, got {node!r}")
    head, args = node[0], node[1:]

    def need(n):
        if len(args) != n:
            raise ParseError(f"{head} takes {n} arguments")

    if head in ("in", "notin"):
        need(2)
        return Mem(_parse_term(args[0]), _parse_term(args[1]), head == "in")
    if head in ("in-class", "notin-class"):
        need(2)
        return InClass(_parse_term(args[0]), _parse_ref(args[1]), head == "in-class")
    if head in ("or", "and"):
        if len(args) < 2:
            raise ParseError(f"{head} takes at least 2 arguments")
        parts = [_build(x) for x in args]
        cls = Or if head == "or" else And
        out = parts[-1]
        for p in reversed(parts[:-1]):
            out = cls(p, out)
        return out
    if head in ("exists", "forall"):
        need(2)
        cls = Exists if head == "exists" else Forall
        return cls(_var_name(args[0]), _build(args[1]))
    if head in ("exists-in", "forall-in"):
        need(3)
        cls = Exists if head == "exists-in" else Forall
        return cls(_var_name(args[0]), _build(args[2]), _parse_term(args[1]))
    if head == "not":
        need(1)
        return negate(_build(args[0]))
    if head == "implies":
        need(2)
        return implies(_build(args[0]), _build(args[1]))
    if head == "eq":
        need(2)
        return equals(_parse_term(args[0]), _parse_term(args[1]))
    raise ParseError(f"unknown connective {head!r}")


def _var_name(tok) -> str:
    if not isinstance(tok, str) or not _IDENT.match(tok):
        raise ParseError(f"bad variable {tok!r}")
    return tok


def parse_formula(text: str) -> Formula:
    tokens = _tokens(text)
    node, pos = _read(tokens, 0)
    if pos != len(tokens):
        raise ParseError(f"trailing input in {text!r}")
    return _build(node)


def parse_sequent(items: Iterable[str]) -> frozenset:
    gamma = frozenset(parse_formula(t) for t in items)
    for a in gamma:
        if not is_sentence(a):
            raise FormulaError(f"sequents hold sentences only: {to_sexpr(a)}")
    return gamma
