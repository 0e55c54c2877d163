from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import (
    dense,
    evaluate,
    forms,
    pullback_oracle,
    rational_matrices,
    wedge_oracle,
)

from sgkit import linalg
from sgkit.errors import (
    DimensionMismatch,
    ModeMismatch,
    NotPositiveDefinite,
    SgkitError,
    SingularError,
)
from sgkit.exterior import (
    Form,
    endo_derivation,
    gl_action,
    hodge_star,
    infinitesimal_action,
    interior_product,
    wedge,
)
from sgkit.structures import model_form, stabilizer_algebra

P = Form.parse
phi0 = model_form("phi0")
psi0 = model_form("psi0")
omega0 = model_form("omega0")
rho0 = model_form("rho0")


def e(n, i):
    v = [0] * n
    v[i - 1] = 1
    return v


# --- construction ---------------------------------------------------------


def test_canonical_form_drops_zeros_and_sorts():
    a = Form.basis(6, [2, 1], 3)
    assert a.terms == {(1, 2): -3}
    assert (a - a).terms == {}
    with pytest.raises(SgkitError):
        Form(6, {(2, 1): 1})
    with pytest.raises(DimensionMismatch):
        Form(9, {})


def test_modes_do_not_mix():
    with pytest.raises(ModeMismatch):
        Form(5, {(1,): Fraction(1), (2,): 0.5})
    with pytest.raises(ModeMismatch):
        P(5, "12") + P(5, "34").to_float()


def test_json_round_trip_exact_and_float():
    for a in (phi0, phi0.to_float() * 0.25):
        assert Form.from_json(a.to_json()) == a
    assert phi0.to_json()["terms"][0] == {"idx": [1, 2, 3], "c": "1"}


# --- wedge ------------------------------------------------------------------


def test_wedge_basic():
    assert wedge(P(7, "1"), P(7, "2")) == P(7, "12")
    assert wedge(P(7, "2"), P(7, "1")) == -P(7, "12")


def test_half_omega_squared_is_sigma0():
    assert wedge(omega0, omega0) / 2 == model_form("sigma0")
    assert model_form("sigma0") == P(6, "1234 1256 3456")


def test_rho_contraction_product():
    prod = wedge(rho0, interior_product(e(6, 1), rho0), P(6, "2"))
    assert prod == P(6, "2*123456")


@given(forms(dim=6, max_terms=3), forms(dim=6, max_terms=3))
def test_wedge_matches_permutation_oracle(a, b):
    if a.grade + b.grade > 6:
        return
    assert wedge(a, b) == wedge_oracle(a, b)


@given(forms(dim=6), forms(dim=6))
def test_graded_commutativity(a, b):
    sign = (-1) ** (a.grade * b.grade)
    assert wedge(a, b) == wedge(b, a) * sign


@given(forms(dim=7, grade=1), forms(dim=7, grade=2), forms(dim=7, grade=2))
def test_wedge_associative(a, b, c):
    assert wedge(wedge(a, b), c) == wedge(a, wedge(b, c))


def test_wedge_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        wedge(P(5, "1"), P(6, "2"))


# --- contraction ---------------------------------------------------------


def test_contractions_of_model_forms():
    assert interior_product(e(7, 1), P(7, "12")) == P(7, "2")
    assert interior_product(e(7, 1), phi0) == P(7, "23 45 67")
    assert interior_product(e(7, 1), psi0) == P(7, "-247 357 -346 -256")


def test_contraction_of_function_rejected():
    with pytest.raises(SgkitError):
        interior_product(e(5, 1), Form(5, {(): 1}))


@given(forms(dim=7, max_terms=3), forms(dim=7, max_terms=3), st.lists(st.integers(-2, 2), min_size=7, max_size=7))
def test_contraction_is_antiderivation(a, b, x):
    lhs = interior_product(x, wedge(a, b))
    rhs = wedge(interior_product(x, a), b) + wedge(a, interior_product(x, b)) * (-1) ** a.grade
    assert lhs == rhs


@given(forms(dim=6, max_terms=3), st.lists(st.integers(-2, 2), min_size=6, max_size=6))
def test_contraction_fills_first_slot(a, x):
    # (x -| a)(v...) = a(x, v...)
    arr = dense(a)
    want = np.tensordot(np.array(x, dtype=object), arr, axes=([0], [0]))
    got = interior_product(x, a)
    if a.grade == 1:
        assert got.terms.get((), 0) == want
    else:
        assert np.all(dense(got, a.grade - 1) == want)


# --- gl action -------------------------------------------------------------


def test_identity_action():
    assert gl_action(linalg.identity(7), phi0) == phi0


def test_scaling_action_on_psi():
    c = Fraction(3, 2)
    assert gl_action(linalg.identity(7) * c, psi0) == psi0 * c**-4


@given(rational_matrices(5))
def test_inverse_action_on_volume_is_determinant(A):
    eps = Form.volume(5)
    assert gl_action(linalg.inv(A), eps) == eps * linalg.det(A)


@given(rational_matrices(5), forms(dim=5, max_terms=3))
def test_action_is_inverse_pullback(A, a):
    assert gl_action(A, a) == pullback_oracle(linalg.inv(A), a)


@given(rational_matrices(5), rational_matrices(5), forms(dim=5, max_terms=3))
def test_left_group_action(A, B, a):
    assert gl_action(A @ B, a) == gl_action(A, gl_action(B, a))


@given(rational_matrices(6), forms(dim=6, max_terms=2), forms(dim=6, max_terms=2))
def test_action_commutes_with_wedge(A, a, b):
    assert gl_action(A, wedge(a, b)) == wedge(gl_action(A, a), gl_action(A, b))


def test_singular_action_rejected():
    with pytest.raises(SingularError):
        gl_action(linalg.zeros((7, 7)), phi0)


def test_float_action_matches_exact():
    A = linalg.identity(7)
    A[0, 3] = Fraction(1, 2)
    A[5, 2] = Fraction(-2, 3)
    assert gl_action(linalg.to_float(A), phi0.to_float()).allclose(gl_action(A, phi0).to_float(), 1e-14)


# --- derivations -----------------------------------------------------------


def test_infinitesimal_action_trivial_cases():
    assert infinitesimal_action(linalg.zeros((7, 7)), psi0).is_zero()
    assert infinitesimal_action(linalg.identity(7), psi0) == psi0 * -4
    assert endo_derivation(linalg.identity(7), psi0) == psi0 * 4


def test_stabilizer_kills_psi0():
    basis = stabilizer_algebra([psi0], 7)
    assert len(basis) == 14
    assert all(infinitesimal_action(B, psi0).is_zero() for B in basis)


@given(rational_matrices(6, invertible=False), forms(dim=6, max_terms=2), forms(dim=6, max_terms=2))
def test_endo_derivation_leibniz(B, a, b):
    lhs = endo_derivation(B, wedge(a, b))
    rhs = wedge(endo_derivation(B, a), b) + wedge(a, endo_derivation(B, b))
    assert lhs == rhs


@given(rational_matrices(5, invertible=False), forms(dim=5, max_terms=3))
def test_endo_derivation_slot_sum(B, a):
    # sum_j a(.., B X_j, ..) evaluated on basis vectors
    k = a.grade
    got = endo_derivation(B, a)
    I = np.eye(5, dtype=int)
    for idx in [(1, 2, 3, 4, 5)[:k], (2, 4, 5, 1, 3)[:k]]:
        vecs = [list(I[i - 1]) for i in idx]
        want = sum(
            evaluate(a, vecs[:j] + [list(B @ np.array(vecs[j], dtype=object))] + vecs[j + 1 :]) for j in range(k)
        )
        assert evaluate(got, vecs) == want


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_infinitesimal_action_is_derivative(seed):
    rng = np.random.default_rng(seed)
    B = rng.normal(size=(7, 7))
    a = psi0.to_float()
    D = infinitesimal_action(B, a)
    errs = []
    for h in (1e-3, 5e-4):
        fd = (gl_action(linalg.expm(h * B), a) - a) / h
        errs.append((fd - D).norm())
    assert errs[0] < 1e-1
    assert 1.6 < errs[0] / errs[1] < 2.4  # first-order difference quotient


def test_mode_mismatch_in_derivation():
    with pytest.raises(ModeMismatch):
        endo_derivation(np.eye(7), psi0)


# --- hodge star -------------------------------------------------------------


def test_hodge_star_model_values():
    I7 = linalg.identity(7)
    assert hodge_star(Form(7, {(): 1}), I7) == Form.volume(7)
    assert hodge_star(phi0, I7, Form.volume(7)) == psi0
    assert hodge_star(hodge_star(omega0, linalg.identity(6)), linalg.identity(6)) == omega0


@given(forms(dim=5), st.sampled_from([1, -1]))
def test_double_star_sign(a, o):
    g = linalg.identity(5)
    g[0, 0] = g[0, 1] = g[1, 0] = Fraction(2)
    g[1, 1] = Fraction(3)  # det 4, so sqrt(det g) stays rational
    g[2, 2] = Fraction(2)
    k = a.grade
    assert hodge_star(hodge_star(a, g, o), g, o) == a * (-1) ** (k * (5 - k))


@given(forms(dim=5, grade=2), forms(dim=5, grade=2))
def test_star_defines_inner_product(a, b):
    # a ^ *b = <a, b> vol for the identity metric
    inner = sum(c * b.terms.get(t, 0) for t, c in a.terms.items())
    assert wedge(a, hodge_star(b, linalg.identity(5))) == Form.volume(5) * inner


def test_star_needs_positive_metric():
    g = linalg.identity(5)
    g[4, 4] = -1
    with pytest.raises(NotPositiveDefinite):
        hodge_star(P(5, "12"), g)
