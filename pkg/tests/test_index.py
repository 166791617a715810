import random

import pytest
from hypothesis import given, strategies as st

from kpmahlo import ordinals as O
from kpmahlo.index import (
    IndexMatrix,
    IndexShapeError,
    OrdVec,
    bullet,
    parse_index,
    parse_matrix,
    parse_vec,
    star,
    star_rows,
    tower,
    vec,
    vec_lt,
)

from strategies import ords, random_below_lambda


def expand_bullet(b, a):
    """Direct reading of the definition, entry by entry."""
    n = len(a)
    rows = []
    for i in range(n):
        row = [b[i]]
        for j in range(i + 1, n):
            row.append(a[j])
        rows.append(row)
    return [[str(x) for x in r] for r in rows]


def test_vec_lt_examples():
    assert vec_lt(vec(1, 2), vec(3, 4))
    assert not vec_lt(vec(1, 4), vec(3, 4))
    assert vec_lt(vec(0, 0, 0), vec(1, O.OMEGA, O.K))
    with pytest.raises(IndexShapeError):
        vec_lt(vec(1), vec(1, 2))


def test_bullet_examples():
    assert str(bullet(vec(1, 2), vec(3, 4))) == "[[1,4],[2]]"
    assert str(bullet(vec(5), vec(7))) == "[[5]]"
    m = bullet(vec(0, 1, 2), vec(5, 3, 4))
    assert str(m) == "[[0,3,4],[1,4],[2]]"
    assert [[str(x) for x in r] for r in m] == expand_bullet(vec(0, 1, 2), vec(5, 3, 4))
    # the same matrix via the star identity
    assert m == star_rows(star(0, vec(3, 4)), bullet(vec(1, 2), vec(3, 4)))
    with pytest.raises(IndexShapeError):
        bullet(vec(1), vec(1, 2))


def test_star_examples():
    a = O.K + 3
    assert star(a, ()) == vec(a)
    assert star(0, vec(3, 4)) == vec(0, 3, 4)
    with pytest.raises(IndexShapeError):
        star(O.K, vec(O.L))
    with pytest.raises(IndexShapeError):
        OrdVec((O.parse("L+1"),))


def test_zero_vector_flag():
    assert vec(0, 0).is_zero_vec
    assert not vec(0, 1).is_zero_vec
    assert OrdVec(()).is_zero_vec


def test_tower_examples():
    alpha = O.parse("w^(K+1)+3")
    assert tower(vec(alpha)) == alpha
    assert tower(vec(0, alpha)) == O.ZERO
    assert tower(vec(2, 1)) == O.parse("L*2")
    assert str(tower(vec(2, 1))) == "L*2"
    assert tower(vec(1, 0)) == O.ONE
    # three levels: t2 = 1, t1 = L*1, t0 = L^L * 3 = w^(L*L)*3 = w^(w^(L*2))*3
    assert tower(vec(3, 1, 1)) == O.parse("w^(w^(L*2))*3")


def test_tower_values_are_normal_terms():
    rng = random.Random(3)
    for _ in range(200):
        v = OrdVec(tuple(random_below_lambda(rng, 2) for _ in range(rng.randint(1, 4))))
        t = tower(v)
        assert O.parse(str(t)) == t
        if len(v) > 1 and all(not e.is_zero for e in v):
            assert t >= O.L


def test_matrix_shape_enforced():
    with pytest.raises(IndexShapeError):
        IndexMatrix((vec(1), vec(2)))
    with pytest.raises(IndexShapeError):
        IndexMatrix((vec(1, 2, 3), vec(2)))


@pytest.mark.parametrize("text", ["[]", "[1]", "[w^(K+1)*2+1,K,0]", "[[1,4],[2]]", "[[w,K],[1]]"])
def test_literal_round_trip(text):
    value = parse_index(text)
    assert parse_index(str(value)) == value


def test_literal_errors():
    with pytest.raises(O.ParseError):
        parse_vec("1,2")
    with pytest.raises(O.ParseError):
        parse_vec("[L]")
    with pytest.raises(O.ParseError):
        parse_matrix("[[1],[2]]")


below_l = ords(allow_l=False)


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(*[below_l] * (2 * n))))
def test_bullet_rows_are_star_of_tails(flat):
    n = len(flat) // 2
    b, a = OrdVec(flat[:n]), OrdVec(flat[n:])
    m = bullet(b, a)
    for i in range(n):
        assert m[i] == star(b[i], a.tail(i + 1))


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(*[below_l.filter(bool)] * (2 * n))))
def test_tower_monotone(flat):
    n = len(flat) // 2
    b, a = OrdVec(flat[:n]), OrdVec(flat[n:])
    if vec_lt(b, a):
        assert tower(b) < tower(a)
