from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from holonomy_lab import poisson as ps
from holonomy_lab.polynomial import PolyFn
from holonomy_lab.rep_core import B_flat, RepSpec, bracket, get_rep

# generic half-ranks at c = 1 (64 random rational points, seed 0),
# frozen from an exact rank computation
FROZEN_SYMMETRY_DIM = {
    RepSpec.tensor_real(3, 0): 2,
    RepSpec.tensor_real(2, 1): 2,
    RepSpec.tensor_real(4, 0): 3,
    RepSpec.binary_cubic(): 1,
}


def unit(k, n):
    return tuple(1 if i == k else 0 for i in range(n))


def test_phi_value_at_flat_wedge():
    spec = RepSpec.tensor_real(3, 0)
    rep = get_rep(spec)
    a = B_flat(rep.wedge(unit(0, 3), unit(1, 3)))
    m = ps.make_phi(spec, 0).evaluate(list(a))
    # e1 (x) x1 is V-index 0, e2 (x) x1 is V-index 3
    assert m[0][3] == 3
    assert m[3][0] == -3


def test_float_evaluation_matches_exact():
    spec = RepSpec.tensor_real(2, 1)
    phi = ps.make_phi(spec, 2)
    rng = np.random.default_rng(1)
    a = [Fraction(int(rng.integers(-5, 6)), 3) for _ in range(get_rep(spec).dim_g)]
    exact = np.array(phi.evaluate(a), dtype=float)
    assert np.allclose(phi.evaluate_float(np.array(a, dtype=float)), exact)


@pytest.mark.parametrize("spec", [RepSpec.tensor_real(3, 0), RepSpec.tensor_real(2, 1),
                                  RepSpec.binary_cubic(), RepSpec.tensor_complex(3)], ids=str)
@pytest.mark.parametrize("c", [0, 1, -2])
def test_phi2_plus_c_sigma_is_admissible(spec, c):
    assert ps.admissibility_check(ps.make_phi(spec, c)).passed


def test_sigma_alone_is_admissible():
    assert ps.admissibility_check(ps.sigma_only(RepSpec.tensor_real(2, 1), 3)).passed


@pytest.mark.parametrize("seed", [0, 1])
def test_random_quadratic_fails_dphi_condition(seed):
    rep_ = ps.admissibility_check(ps.random_quadratic_map(RepSpec.tensor_real(2, 1), seed))
    assert not rep_.dphi_in_K
    assert not rep_.passed
    assert any(f["condition"] == "dphi in K" for f in rep_.failures)


def test_bracket_of_linear_functions():
    spec = RepSpec.tensor_real(2, 1)
    rep = get_rep(spec)
    P = ps.PoissonStructure(ps.make_phi(spec, 1))
    gs = rep.g_basis()
    for A in gs:
        for B in gs:
            assert P.bracket(P.linear_a(A.coeffs), P.linear_a(B.coeffs)) == P.linear_a(bracket(A, B).coeffs)
    x = [1, 0, 2, 0, -1, 0]
    y = [0, 1, 0, 3, 0, 1]
    expected = PolyFn.zero(P.n)
    for i in range(rep.dim_V):
        for j in range(rep.dim_V):
            if x[i] and y[j]:
                expected = expected + x[i] * y[j] * P.phi.poly(i, j)
    assert P.bracket(P.linear_b(x), P.linear_b(y)) == expected


def test_bivector_is_antisymmetric():
    P = ps.PoissonStructure(ps.make_phi(RepSpec.tensor_real(2, 1), 1))
    for k in range(P.n):
        for l in range(P.n):
            assert P.Pi[k][l] == -P.Pi[l][k]


@pytest.mark.parametrize("c", [0, 1, -2])
def test_jacobi_identity(c):
    scan = ps.PoissonStructure(ps.make_phi(RepSpec.tensor_real(2, 1), c)).jacobi_scan()
    assert scan["triples"] == 220
    assert scan["nonzero"] == 0


def test_jacobiator_of_general_functions():
    P = ps.PoissonStructure(ps.make_phi(RepSpec.binary_cubic(), 1))
    v = [PolyFn.var(P.n, k) for k in range(P.n)]
    f = v[0] * v[3] + v[4]
    g = v[1] * v[1] - v[5]
    h = v[2] * v[6]
    assert P.jacobiator(f, g, h).is_zero()


def test_negative_control_breaks_jacobi():
    P = ps.PoissonStructure(ps.random_quadratic_map(RepSpec.tensor_real(2, 1), 0))
    scan = P.jacobi_scan(stop_at_first=True)
    assert scan["nonzero"] == 1
    assert not P.coordinate_jacobiator(*scan["witnesses"][0]).is_zero()


@pytest.mark.parametrize("spec", [RepSpec.tensor_real(3, 0), RepSpec.tensor_real(2, 2)], ids=str)
def test_rank_at_origin_is_dim_V(spec):
    P = ps.PoissonStructure(ps.make_phi(spec, 1))
    assert P.rank_at([0] * P.n) == get_rep(spec).dim_V
    assert ps.PoissonStructure(ps.make_phi(spec, 0)).rank_at([0] * P.n) == 0


def test_float_rank_agrees_with_exact_rank():
    spec = RepSpec.tensor_real(2, 1)
    phi = ps.make_phi(spec, 1)
    P = ps.PoissonStructure(phi)
    rng = np.random.default_rng(5)
    dg = get_rep(spec).dim_g
    for _ in range(5):
        pt = ps.random_rational_point(spec, rng)
        f = np.array(pt, dtype=float)
        assert ps.rank_float(phi, f[:dg], f[dg:]) == P.rank_at(pt)


@pytest.mark.parametrize("spec", list(FROZEN_SYMMETRY_DIM), ids=str)
def test_generic_symmetry_dimension(spec):
    scan = ps.generic_rank_scan(spec, c=1, seed=0)
    assert scan.symmetry_dim == FROZEN_SYMMETRY_DIM[spec]
    assert all(r % 2 == 0 for r in scan.ranks)


def test_odd_dimension_forces_a_symmetry():
    spec = RepSpec.tensor_real(4, 0)
    assert ps.dim_W(spec) == 17
    assert ps.generic_rank_scan(spec, points=8, seed=1).symmetry_dim >= 1


def test_symmetry_dimension_validates():
    with pytest.raises(ValueError):
        ps.symmetry_dimension(RepSpec.tensor_real(2, 1), 7)


@pytest.mark.parametrize("spec", [RepSpec.tensor_real(3, 0), RepSpec.binary_cubic()], ids=str)
def test_lemma_reps_spanned_by_sigma(spec):
    r = ps.lemma_reps_solution_space(spec)
    assert r.dim == 1 and r.antisymmetric and r.spanned_by_sigma


def test_lemma_reps_even_power_control():
    assert ps.lemma_reps_solution_space(RepSpec.sym_power(2)).dim == 0


def test_float_c_is_taken_exactly():
    phi = ps.make_phi(RepSpec.tensor_real(2, 1), 0.5)
    assert phi.c == Fraction(1, 2)
