from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holonomy_lab.polynomial import PolyFn

N = 3
x, y, z = (PolyFn.var(N, i) for i in range(N))


def test_basic_arithmetic():
    p = (x + y) * (x - y)
    assert p == x * x - y * y
    assert (x + 1) ** 2 == x * x + 2 * x + 1
    assert (x - x).is_zero()
    assert p.degree() == 2
    assert p.variables() == {0, 1}


def test_monomials_are_canonical():
    assert PolyFn(N, {(2, 0): 1}) == PolyFn(N, {(0, 2): 1})
    assert PolyFn(N, {(0,): 1, (1,): 0}).terms == {(0,): 1}


def test_diff():
    p = x * x * y + 3 * z
    assert p.diff(0) == 2 * x * y
    assert p.diff(1) == x * x
    assert p.diff(2) == PolyFn.const(N, 3)


def test_evaluate_exact_and_float():
    p = x * y - Fraction(1, 2) * z
    assert p([2, 3, 1]) == Fraction(11, 2)
    assert p([0.5, 2.0, 1.0]) == pytest.approx(0.5)


def test_linear_with_offset():
    p = PolyFn.linear(5, [1, 2], offset=3)
    assert p == PolyFn.var(5, 3) + 2 * PolyFn.var(5, 4)


def test_errors():
    with pytest.raises(ValueError):
        PolyFn(2, {(2,): 1})
    with pytest.raises(ValueError):
        PolyFn.var(2, 0) + PolyFn.var(3, 0)
    with pytest.raises(ValueError):
        x([1, 2])


coef = st.integers(-4, 4)
mono = st.lists(st.integers(0, N - 1), max_size=3).map(tuple)
polys = st.dictionaries(mono, coef, max_size=5).map(lambda d: PolyFn(N, d))
points = st.lists(st.fractions(-3, 3, max_denominator=3), min_size=N, max_size=N)


@settings(max_examples=60, deadline=None)
@given(polys, polys, polys)
def test_ring_axioms(p, q, r):
    assert p * (q + r) == p * q + p * r
    assert (p * q) * r == p * (q * r)
    assert p * q == q * p


@settings(max_examples=60, deadline=None)
@given(polys, polys, points)
def test_evaluation_is_a_homomorphism(p, q, pt):
    assert (p * q)(pt) == p(pt) * q(pt)
    assert (p + q)(pt) == p(pt) + q(pt)


@settings(max_examples=60, deadline=None)
@given(polys, polys, st.integers(0, N - 1))
def test_leibniz_rule(p, q, i):
    assert (p * q).diff(i) == p.diff(i) * q + p * q.diff(i)
