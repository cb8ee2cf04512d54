from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from cycloproj.qz import (
    AffineQZ,
    qz,
    qz_add,
    qz_halve,
    qz_neg,
    qz_scale,
    solve_scalar_affine,
)

rationals = st.fractions(max_denominator=10**4)


def test_add_examples():
    assert qz_add(F(1, 3), F(1, 2)) == F(5, 6)
    assert qz_neg(F(0)) == 0
    assert qz_scale(4, F(1, 6)) == F(2, 3)


def test_halve_examples():
    assert qz_halve(F(1, 3)) == F(1, 6)
    assert qz_halve(F(1, 2)) == F(1, 4)
    assert qz_halve(F(0)) == 0


def test_solve_scalar_affine_examples():
    assert solve_scalar_affine(2, F(1, 3)) == {F(1, 6), F(2, 3)}
    assert solve_scalar_affine(3, F(0)) == {F(0), F(1, 3), F(2, 3)}
    assert solve_scalar_affine(1, F(5, 7)) == {F(5, 7)}


@given(rationals, rationals)
def test_add_neg_inverse(a, b):
    a, b = qz(a), qz(b)
    assert qz_add(a, qz_neg(a)) == 0
    assert qz_add(a, b) == qz_add(b, a)


@given(rationals)
def test_halve_doubles_back(a):
    a = qz(a)
    assert qz_scale(2, qz_halve(a)) == a


@given(rationals, st.integers(min_value=-40, max_value=40).filter(bool))
def test_solve_scalar_complete(c0, c1):
    c0 = qz(c0)
    sols = solve_scalar_affine(c1, c0)
    assert len(sols) == abs(c1)
    for x in sols:
        assert qz_scale(c1, x) == c0


def test_affine_arithmetic():
    x = AffineQZ.var("x")
    e = x.scale(3) + AffineQZ(F(1, 2))
    assert e.evaluate({"x": F(1, 4)}) == qz(F(3, 4) + F(1, 2))
    assert (e - e) == 0
    assert e.halve().scale(2) == e


def test_affine_substitute():
    x, y = AffineQZ.var("x"), AffineQZ.var("y")
    e = x.scale(2) + y + AffineQZ(F(1, 3))
    s = e.substitute({"x": y + AffineQZ(F(1, 6))})
    assert s == y.scale(3) + AffineQZ(F(2, 3))


def test_affine_is_hashable_and_ordered_repr():
    e1 = AffineQZ.var("x") + AffineQZ(F(1, 2))
    e2 = AffineQZ(F(1, 2)) + AffineQZ.var("x")
    assert e1 == e2 and hash(e1) == hash(e2)
