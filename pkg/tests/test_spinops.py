import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_spinor
from twistorlab.clifford import vector_matrix
from twistorlab.solutions import cahen_wallach_parallel_family, flat_family, hypersurface_family, mpm_family
from twistorlab.spaces import CahenWallach, Flat, Frame, PseudoSphere, m_minus
from twistorlab.spinops import (
    NotTwistorError, SpinorField, dirac, integrability_check, koszul_connection, penrose_pair_check,
    residual_sweep, spinor_derivative, twistor_residual,
)


def _linear_field(space, w0, w):
    """``phi(p) = w0 + sum_a p^a w_a`` (not a twistor spinor in general)."""
    return SpinorField(lambda p: w0 + sum(pa * wa for pa, wa in zip(p, w)), lambda p, a: w[a])


def test_derivative_along_t_and_x_is_plain_partial(rng):
    space = CahenWallach((2.0, -1.0))
    N = space.model.dim
    w = [random_spinor(rng, N) for _ in range(4)]
    field = _linear_field(space, random_spinor(rng, N), w)
    p = np.array([0.3, -0.2, 0.5, 1.1])
    for a in (1, 2, 3):
        X = np.eye(4)[a]
        np.testing.assert_allclose(spinor_derivative(space, field, X, p), w[a], atol=1e-14)


def test_derivative_along_s_has_curvature_term(rng):
    lam = (2.0, -1.0)
    space = CahenWallach(lam)
    N = space.model.dim
    w = [random_spinor(rng, N) for _ in range(4)]
    field = _linear_field(space, random_spinor(rng, N), w)
    p = np.array([0.3, -0.2, 0.5, 1.1])
    gens = space.model.generators
    V = gens[1] - gens[0]
    expected = w[0] + 0.5 * sum(l * x * gens[2 + j] @ V for j, (l, x) in enumerate(zip(lam, p[2:]))) @ field(p)
    np.testing.assert_allclose(spinor_derivative(space, field, np.eye(4)[0], p), expected, atol=1e-13)


@pytest.mark.parametrize("lam", [(2.0, -1.0), (-1.0, -4.0, 0.5), (1.0,)])
def test_closed_form_connection_matches_koszul(lam, rng):
    space = CahenWallach(lam)
    omega = koszul_connection(space)
    for p in space.sample_points(rng, 5):
        for X in np.eye(space.n):
            assert np.max(np.abs(space.connection(X, p) - omega(X, p))) <= 1e-8


@pytest.mark.parametrize("n,k", [(3, 0), (4, 1), (5, 2)])
def test_flat_dirac_of_linear_field(n, k, rng):
    space = Flat(n, k)
    N = space.model.dim
    u, v = random_spinor(rng, N), random_spinor(rng, N)
    field = SpinorField(lambda p: u + vector_matrix(space.model, p) @ v,
                        lambda p, a: space.model.generators[a] @ v)
    for p in space.sample_points(rng, 3):
        np.testing.assert_allclose(dirac(space, field, p), -n * v, atol=1e-12)
        assert twistor_residual(space, field, p).max_norm <= 1e-12


def test_zero_field_has_zero_residual(rng):
    for space in (Flat(4, 1), CahenWallach((2.0, -1.0)), PseudoSphere(4, 1.0)):
        p = space.sample_points(rng, 1)[0]
        assert twistor_residual(space, SpinorField.zero(space.model.dim), p).max_norm == 0.0


def test_non_twistor_constant_on_cw(rng):
    space = CahenWallach((2.0, -1.0))
    phi = np.zeros(space.model.dim, dtype=complex)
    phi[0] = 1.0
    field = SpinorField(lambda p: phi, lambda p, a: np.zeros_like(phi))
    p = np.array([0.0, 0.0, 1.0, 0.0])
    assert twistor_residual(space, field, p).max_norm > 0.1


def test_penrose_pair():
    space = m_minus(4)
    fam = mpm_family(4, -1)
    rng = np.random.default_rng(0)
    field = fam.instantiate(random_spinor(rng, fam.dimension))
    p = space.sample_points(rng, 1)[0]
    assert penrose_pair_check(space, field, p)
    # a constant outside Delta_V is not
    phi = np.zeros(space.model.dim, dtype=complex)
    phi[0] = 1.0
    bad = SpinorField(lambda q: phi, lambda q, a: np.zeros_like(phi))
    assert not penrose_pair_check(space, bad, np.array([0.4, 0.1, 1.0, -0.5]))


def test_integrability_on_twistor_fields(rng):
    space = m_minus(4)
    fam = mpm_family(4, -1)
    field = fam.instantiate(random_spinor(rng, fam.dimension))
    for p in space.sample_points(rng, 2):
        rep = integrability_check(space, field, p)
        assert rep.ok, rep.to_dict()
    cw = CahenWallach((2.0, -1.0, 0.5))
    par = cahen_wallach_parallel_family(cw)
    rep = integrability_check(cw, par.instantiate(random_spinor(rng, par.dimension)), np.ones(5) * 0.3)
    assert rep.ok and rep.weyl_defect <= 1e-12
    assert json.loads(json.dumps(rep.to_dict()))["pass"] is True


def test_weyl_kills_only_delta_V():
    # (lambda_j + Lambda0/(n-2)) a_j . V . phi = 0 fails off Delta_V
    cw = CahenWallach((2.0, -1.0))
    phi = np.zeros(cw.model.dim, dtype=complex)
    phi[0] = 1.0
    field = SpinorField(lambda p: phi, lambda p, a: np.zeros_like(phi))
    with pytest.raises(NotTwistorError):
        integrability_check(cw, field, np.array([0.0, 0.0, 1.0, 0.5]))


def test_integrability_unavailable_on_hypersurfaces(rng):
    space = PseudoSphere(4, 1.0)
    fam = hypersurface_family("sphere", 4)
    with pytest.raises(TypeError):
        integrability_check(space, fam.instantiate(np.ones(fam.dimension)), space.sample_points(rng, 1)[0])


@settings(max_examples=20, deadline=None)
@given(a=st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False),
       b=st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False),
       seed=st.integers(0, 2 ** 16))
def test_residual_is_linear(a, b, seed):
    rng = np.random.default_rng(seed)
    space = CahenWallach((2.0, -1.0))
    N = space.model.dim
    f = _linear_field(space, random_spinor(rng, N), [random_spinor(rng, N) for _ in range(4)])
    g = _linear_field(space, random_spinor(rng, N), [random_spinor(rng, N) for _ in range(4)])
    p = space.sample_points(rng, 1)[0]
    lhs = twistor_residual(space, a * f + b * g, p).residuals
    rhs = a * twistor_residual(space, f, p).residuals + b * twistor_residual(space, g, p).residuals
    assert np.max(np.abs(lhs - rhs)) <= 1e-10 * max(1.0, np.max(np.abs(rhs)))


def _boost(signs, rng):
    """Random element of O(signature) acting on frame indices."""
    n = len(signs)
    time = [i for i in range(n) if signs[i] < 0]
    space_idx = [i for i in range(n) if signs[i] > 0]
    Q, _ = np.linalg.qr(rng.standard_normal((len(space_idx), len(space_idx))))
    L = np.eye(n)
    L[np.ix_(space_idx, space_idx)] = Q
    if time:
        t, x = time[0], space_idx[0]
        B = np.eye(n)
        eta = rng.uniform(-1.0, 1.0)
        B[t, t] = B[x, x] = np.cosh(eta)
        B[t, x] = B[x, t] = np.sinh(eta)
        L = B @ L
    return L


def _frame_independence(space, field, p, rng, tol=1e-8):
    fr = space.frame_at(p)
    L = _boost(fr.signs, rng)
    boosted = Frame(L.T @ fr.vectors, fr.signs)
    assert boosted.orthonormality_defect(space.tangent_metric(p)) <= 1e-10
    r0 = twistor_residual(space, field, p)
    r1 = twistor_residual(space, field, p, frame=boosted)
    # the residual is tensorial in the direction: R(s'_j) = sum_i L_ij R(s_i)
    np.testing.assert_allclose(r1.residuals, np.einsum("ij,i...->j...", L, r0.residuals), atol=tol)
    return r0.max_norm, r1.max_norm


def test_frame_independence_for_generic_field(rng):
    space = CahenWallach((2.0, -1.0))
    N = space.model.dim
    f = _linear_field(space, random_spinor(rng, N), [random_spinor(rng, N) for _ in range(4)])
    for p in space.sample_points(rng, 3):
        _frame_independence(space, f, p, rng)


@pytest.mark.parametrize("make", [lambda: (m_minus(5), mpm_family(5, -1)),
                                  lambda: (Flat(4, 1), flat_family(4, 1)),
                                  lambda: (PseudoSphere(4, 1.0), hypersurface_family("sphere", 4))])
def test_frame_independence_of_twistor_residual(make, rng):
    space, fam = make()
    field = fam.instantiate(random_spinor(rng, fam.dimension))
    tol = 1e-5 if space.kind == "pseudo-sphere" else 1e-8
    for p in space.sample_points(rng, 2):
        m0, m1 = _frame_independence(space, field, p, rng, tol)
        assert abs(m0 - m1) <= tol and m0 <= tol


def test_analytic_partials_agree_with_finite_differences(rng):
    fam = mpm_family(5, 1)
    field = fam.instantiate(random_spinor(rng, fam.dimension))
    for p in fam.space.sample_points(rng, 5):
        assert field.finite_difference_defect(p) <= 1e-5


def test_residual_rows_serialize(rng):
    space = Flat(3, 0)
    fam = flat_family(3)
    field = fam.instantiate(random_spinor(rng, fam.dimension))
    sweep = residual_sweep(space, field, space.sample_points(rng, 2))
    rows = json.loads(sweep[0].to_json())
    assert len(rows) == 3 and set(rows[0]) == {"point", "direction", "residual_norm"}
    assert rows[0]["residual_norm"] <= 1e-12
