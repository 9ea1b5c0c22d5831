from __future__ import annotations

from itertools import product

import pytest

from holonomy_lab import exact_linalg as xl
from holonomy_lab.rep_core import (BINARY_CUBIC, SYM_POWER, TENSOR_COMPLEX, TENSOR_REAL, B_flat, B_sharp,
                                   RepSpec, SpecMismatch, act, bracket, dims, get_rep, pair_B, sigma)

E1, E2 = (1, 0), (0, 1)


def unit(k, n):
    return tuple(1 if i == k else 0 for i in range(n))


SPECS = [RepSpec.tensor_real(3, 0), RepSpec.tensor_real(2, 1), RepSpec.tensor_real(2, 2),
         RepSpec.tensor_complex(3), RepSpec.binary_cubic(), RepSpec.sym_power(2),
         RepSpec.tensor_complex(3, center=True)]


def test_so_action_on_x2():
    rep = get_rep(RepSpec.tensor_real(3, 0))
    x1, x2 = unit(0, 3), unit(1, 3)
    assert list(rep.apply_so(rep.wedge(x1, x2), x2)) == [-1, 0, 0]


def test_sl2_action_on_e1():
    rep = get_rep(RepSpec.tensor_real(3, 0))
    assert list(rep.apply_sl2(rep.sym2(E1, E2), E1)) == [-1, 0]


def test_wedge_bracket():
    rep = get_rep(RepSpec.tensor_real(3, 0))
    x1, x2, x3 = (unit(k, 3) for k in range(3))
    assert bracket(rep.wedge(x1, x2), rep.wedge(x2, x3)) == -rep.wedge(x1, x3)


def test_killing_like_form_values():
    rep = get_rep(RepSpec.tensor_real(3, 0))
    m = rep.wedge(unit(0, 3), unit(1, 3))
    assert pair_B(m, m) == 1
    a = rep.sym2(E1, E2)
    assert pair_B(a, a) == -1


def test_sigma_value():
    rep = get_rep(RepSpec.tensor_real(3, 0))
    x1 = unit(0, 3)
    assert sigma(rep.tensor(E1, x1), rep.tensor(E2, x1)) == 1


def test_binary_cubic_dims():
    d = dims(RepSpec.binary_cubic())
    assert (d["dim_g"], d["dim_V"]) == (3, 4)


@pytest.mark.parametrize("p,q", [(3, 0), (2, 1), (4, 1), (3, 2)])
def test_tensor_dims(p, q):
    n = p + q
    rep = get_rep(RepSpec.tensor_real(p, q))
    assert rep.dim_g == 3 + n * (n - 1) // 2
    assert rep.dim_V == 2 * n


def test_center_adds_one_dimension():
    a = get_rep(RepSpec.tensor_complex(3))
    b = get_rep(RepSpec.tensor_complex(3, center=True))
    assert b.dim_g == a.dim_g + 1
    z = b.center_elem()
    assert all(bracket(z, g).is_zero() for g in b.g_basis())


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.label)
def test_action_is_a_representation(spec):
    rep = get_rep(spec)
    gs, vs = rep.g_basis(), rep.v_basis()
    for a, b in product(gs, gs):
        ab = bracket(a, b)
        for v in vs[:4]:
            assert act(ab, v) == act(a, act(b, v)) - act(b, act(a, v))


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.label)
def test_bracket_antisymmetric_and_jacobi(spec):
    gs = get_rep(spec).g_basis()
    for a, b in product(gs, gs):
        assert bracket(a, b) == -bracket(b, a)
    for a, b, c in product(gs[:4], gs[:4], gs):
        j = bracket(a, bracket(b, c)) + bracket(b, bracket(c, a)) + bracket(c, bracket(a, b))
        assert j.is_zero()


@pytest.mark.parametrize("spec", [s for s in SPECS if not s.center], ids=lambda s: s.label)
def test_forms_are_invariant(spec):
    rep = get_rep(spec)
    gs, vs = rep.g_basis(), rep.v_basis()
    for c in gs:
        for a, b in product(gs, gs):
            assert pair_B(bracket(c, a), b) + pair_B(a, bracket(c, b)) == 0
        for u, v in product(vs, vs):
            assert sigma(act(c, u), v) + sigma(u, act(c, v)) == 0


@pytest.mark.parametrize("spec", [s for s in SPECS if s.family != SYM_POWER and not s.center],
                         ids=lambda s: s.label)
def test_sigma_antisymmetric_nondegenerate(spec):
    rep = get_rep(spec)
    S = rep.gram_sigma
    n = rep.dim_V
    assert all(S[i][j] == -S[j][i] for i in range(n) for j in range(n))
    assert xl.rank(S) == n


@pytest.mark.parametrize("spec", [RepSpec.tensor_real(2, 1), RepSpec.tensor_complex(3)], ids=str)
def test_B_flat_sharp_roundtrip(spec):
    rep = get_rep(spec)
    for a in rep.g_basis():
        assert B_sharp(spec, B_flat(a)) == a


def test_mixing_representations_is_an_error():
    a = get_rep(RepSpec.tensor_real(3, 0)).g_basis()[0]
    b = get_rep(RepSpec.tensor_real(2, 1)).g_basis()[0]
    with pytest.raises(SpecMismatch):
        bracket(a, b)


@pytest.mark.parametrize("kwargs", [dict(family=TENSOR_REAL, p=1, q=0),
                                    dict(family=TENSOR_REAL, p=2, q=1, field="C"),
                                    dict(family=TENSOR_COMPLEX, p=3, field="R"),
                                    dict(family=BINARY_CUBIC, degree=2),
                                    dict(family=SYM_POWER, degree=0),
                                    dict(family=SYM_POWER, degree=2, center=True),
                                    dict(family="nope")])
def test_invalid_specs(kwargs):
    with pytest.raises(ValueError):
        RepSpec(**kwargs)
