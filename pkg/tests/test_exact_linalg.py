from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holonomy_lab import exact_linalg as xl
from holonomy_lab.exact_linalg import GaussianRational


def det_expand(m):
    """Laplace expansion along the first row (oracle, small matrices only)."""
    n = len(m)
    if n == 0:
        return Fraction(1)
    total = Fraction(0)
    for j in range(n):
        if m[0][j]:
            minor = [row[:j] + row[j + 1:] for row in m[1:]]
            total += (-1) ** j * m[0][j] * det_expand(minor)
    return total


def rank_by_minors(m):
    rows, cols = len(m), len(m[0]) if m else 0
    for k in range(min(rows, cols), 0, -1):
        for ri in combinations(range(rows), k):
            for ci in combinations(range(cols), k):
                if det_expand([[m[i][j] for j in ci] for i in ri]):
                    return k
    return 0


def random_rational(rng, shape, rank=None):
    r, c = shape
    if rank is None:
        return [[Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, 4))) for _ in range(c)] for _ in range(r)]
    a = random_rational(rng, (r, rank))
    b = random_rational(rng, (rank, c))
    return [[sum(a[i][k] * b[k][j] for k in range(rank)) for j in range(c)] for i in range(r)]


@pytest.mark.parametrize("seed", range(6))
def test_rank_matches_minor_oracle(seed):
    rng = np.random.default_rng(seed)
    shape = (int(rng.integers(2, 7)), int(rng.integers(2, 7)))
    target = int(rng.integers(1, min(shape) + 1))
    m = random_rational(rng, shape, rank=target)
    assert xl.rank(m) == rank_by_minors(m)


def test_rank_full_6x6_against_oracle():
    rng = np.random.default_rng(42)
    m = random_rational(rng, (6, 6))
    assert xl.rank(m) == rank_by_minors(m)


def test_rank_small_cases():
    assert xl.rank([[1, 2], [2, 4]]) == 1
    assert xl.rank([[0, 0], [0, 0]]) == 0
    assert xl.rank([[1, 0], [0, 1]]) == 2


def test_float_entries_are_rejected():
    with pytest.raises(TypeError):
        xl.rank([[0.5, 1], [1, 2]])


@pytest.mark.parametrize("seed", range(5))
def test_nullspace_vectors_annihilate(seed):
    rng = np.random.default_rng(100 + seed)
    m = random_rational(rng, (4, 7), rank=int(rng.integers(1, 5)))
    ns = xl.nullspace(m)
    assert len(ns) == 7 - xl.rank(m)
    for v in ns:
        assert all(x == 0 for x in xl.matvec(m, v))
    assert xl.rank(ns) == len(ns)


def test_nullspace_sparse_input():
    rows = [{0: 1, 1: -1}, {2: 3}]
    ns = xl.nullspace((rows, 4))
    assert len(ns) == 2
    assert xl.span_contains(ns, [1, 1, 0, 0])
    assert xl.span_contains(ns, [0, 0, 0, 1])
    assert not xl.span_contains(ns, [1, 0, 0, 0])


def test_gaussian_rationals():
    i = GaussianRational(0, 1)
    assert i * i == -1
    assert (1 + i) / (1 - i) == i
    m = [[1, i], [i, -1]]        # second row = i * first
    assert xl.rank(m) == 1
    (v,) = xl.nullspace(m)
    assert all(x == 0 for x in xl.matvec(m, v))


def test_format_scalar():
    assert xl.format_scalar(Fraction(-3, 4)) == "-3/4"
    assert xl.format_scalar(Fraction(2)) == "2/1"
    assert "|" in xl.format_scalar(GaussianRational(Fraction(1, 2), 3))


def test_span_basis_and_intersection():
    e = [[1, 0, 0], [0, 1, 0]]
    f = [[0, 1, 0], [0, 0, 1]]
    inter = xl.intersect_subspaces(e, f, 3)
    assert len(inter) == 1
    assert xl.span_contains(inter, [0, 5, 0])
    assert len(xl.span_basis([[1, 1, 0], [2, 2, 0], [0, 0, 1]], 3)) == 2


def test_solve():
    m = [[2, 1], [1, 3]]
    x = xl.solve(m, [3, 5])
    assert xl.matvec(m, x) == [3, 5]
    assert xl.solve([[1, 1], [1, 1]], [1, 2]) is None


small = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(small, min_size=4, max_size=4), min_size=1, max_size=5))
def test_rank_nullity(m):
    assert xl.rank(m) + len(xl.nullspace(m)) == 4


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=1, max_size=4))
def test_rank_transpose_invariant(m):
    assert xl.rank(m) == xl.rank(xl.transpose(m))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=1, max_size=3),
       st.lists(small, min_size=3, max_size=3))
def test_combinations_lie_in_span(basis, coeffs):
    v = [sum(c * row[j] for c, row in zip(coeffs, basis)) for j in range(3)]
    assert xl.span_contains(basis, v)
