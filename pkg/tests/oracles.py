"""Independent brute-force oracles used by the test-suite.

Nothing here imports the code under test except for converting values at
the boundary; the arithmetic itself is re-derived from first principles.
"""

from __future__ import annotations

import itertools


# -- ordinals below w^w as coefficient lists --------------------------------
# index i holds the coefficient of w^i; trailing zeros are stripped.

def cl_trim(xs):
    xs = list(xs)
    while xs and xs[-1] == 0:
        xs.pop()
    return tuple(xs)


def cl_degree(xs):
    xs = cl_trim(xs)
    return len(xs) - 1


def cl_cmp(a, b):
    a, b = cl_trim(a), cl_trim(b)
    if len(a) != len(b):
        return -1 if len(a) < len(b) else 1
    for x, y in zip(reversed(a), reversed(b)):
        if x != y:
            return -1 if x < y else 1
    return 0


def cl_add(a, b):
    a, b = cl_trim(a), cl_trim(b)
    if not b:
        return a
    d = len(b) - 1
    out = [0] * max(len(a), len(b))
    for i in range(d + 1, len(a)):
        out[i] = a[i]
    out[d] = (a[d] if d < len(a) else 0) + b[d]
    for i in range(d):
        out[i] = b[i]
    return cl_trim(out)


def cl_mul(a, b):
    """Right distributivity: a*(w^j*n + rest) = a*w^j*n + a*rest."""
    a, b = cl_trim(a), cl_trim(b)
    if not a or not b:
        return ()
    deg = len(a) - 1
    total = ()
    for j in range(len(b) - 1, -1, -1):
        n = b[j]
        if n == 0:
            continue
        if j == 0:
            part = list(a)
            part[deg] = a[deg] * n
        else:
            part = [0] * (deg + j + 1)
            part[deg + j] = n
        total = cl_add(total, part)
    return total


def cl_to_text(xs):
    xs = cl_trim(xs)
    if not xs:
        return "0"
    parts = []
    for i in range(len(xs) - 1, -1, -1):
        c = xs[i]
        if not c:
            continue
        base = "1" if i == 0 else ("w" if i == 1 else f"w^({i})")
        parts.append(f"{base}*{c}" if (c != 1 and i) else (str(c) if i == 0 else base))
    return "+".join(parts)


def all_coefficient_lists(length, max_coef):
    for xs in itertools.product(range(max_coef + 1), repeat=length):
        yield cl_trim(xs)


# -- hereditarily finite sets as frozensets --------------------------------

def fs_rank(s):
    return max((fs_rank(x) + 1 for x in s), default=0)


def fs_stage(n):
    """The cumulative stage V_n as a set of frozensets."""
    stage = set()
    for _ in range(n):
        items = list(stage)
        stage = {
            frozenset(c)
            for r in range(len(items) + 1)
            for c in itertools.combinations(items, r)
        }
    return stage


def fs_vn(n):
    out = frozenset()
    for _ in range(n):
        out = out | {out}
    return out


def fs_transitive_rank_closed(subsets_of):
    """All nonempty subsets T of ``subsets_of`` that are transitive and
    contain the von Neumann rank of each member (brute force)."""
    items = list(subsets_of)
    found = []
    for r in range(1, len(items) + 1):
        for combo in itertools.combinations(items, r):
            t = set(combo)
            if all(x in t for y in t for x in y) and all(fs_vn(fs_rank(y)) in t for y in t):
                found.append(frozenset(t))
    return found


# -- reflection, recomputed without memo tables ------------------------------
# Universes are handled as carriers; ``holds(carrier, sentence)`` and
# ``instances(carrier)`` are supplied by the caller, ``consts(sentence)``
# lists the parameters.

def refl_ok(p, xs, instances, holds, consts):
    for inst in instances(p):
        if holds(p, inst) and not any(
            q in p and all(c in q for c in consts(inst)) and holds(q, inst) for q in xs
        ):
            return False
    return True


def mh_direct(k, a, n, family, top, instances_at, holds, consts, max_entry, vn):
    """Plain recursion for Mh_k(a); ``a`` is a tuple of ints, ``vn(i)`` the i-th ordinal."""
    if k == n:
        return set(top)
    out = set()
    for p in family:
        if any(vn(e) not in p for e in a):
            continue
        good = True
        for b in itertools.product(range(max_entry + 1), repeat=len(a)):
            if not all(x < y for x, y in zip(b, a)) or any(vn(e) not in p for e in b):
                continue
            # row i of the bullet matrix sits at level k + i
            xs = None
            for i in range(len(a)):
                row = (b[i],) + tuple(a[i + 1:])
                part = mh_direct(k + i, row, n, family, top, instances_at, holds, consts, max_entry, vn)
                xs = part if xs is None else xs & part
            if not refl_ok(p, xs, lambda c: instances_at(k, c), holds, consts):
                good = False
                break
        if good:
            out.add(p)
    return out


# -- formula depth by direct recursion ------------------------------------------

def fm_bounded(a):
    """No unbounded quantifier anywhere in ``a``."""
    if hasattr(a, "left") and hasattr(a, "right") and not hasattr(a, "positive"):
        return fm_bounded(a.left) and fm_bounded(a.right)
    if hasattr(a, "body"):
        return a.bound is not None and fm_bounded(a.body)
    return True


def fm_depth(a):
    if fm_bounded(a):
        return 0
    if hasattr(a, "body"):
        return fm_depth(a.body) + 1
    return max(fm_depth(a.left), fm_depth(a.right)) + 1
