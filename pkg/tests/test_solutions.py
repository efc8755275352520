import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_nonflat_lambda, random_spinor
from twistorlab.clifford import build_model, half_spinor_basis, u_vector, vector_matrix
from twistorlab.solutions import (
    SolutionFamily, affine_ansatz, cahen_wallach_parallel_family, complex_to_pairs, covering_family,
    covering_map, delta_V_basis, flat_family, hypersurface_family, in_delta_V, mpm_family, mpm_profile,
    pairs_to_complex, twistor_family,
)
from twistorlab.spaces import CahenWallach, Covering, Flat, PseudoHyperbolic, m_minus, m_plus
from twistorlab.spinops import spinor_derivative, twistor_residual

UP, UM = u_vector(1), u_vector(-1)


def _pair(phi1, phi2):
    return np.kron(phi1, UP) + np.kron(phi2, UM)


@pytest.mark.parametrize("n", [3, 4, 5, 6, 7])
def test_family_dimensions(n):
    N = 2 ** (n // 2)
    assert flat_family(n, 1).dimension == 2 * N
    assert mpm_family(n, 1).dimension == mpm_family(n, -1).dimension == 2 * N
    lam = (2.0,) + (-1.0,) * (n - 3)
    assert cahen_wallach_parallel_family(lam).dimension == N // 2
    assert hypersurface_family("sphere", n).dimension == 2 * N
    assert affine_ansatz(CahenWallach(lam)).dimension == (n + 1) * N


def test_mpm_frozen_value():
    # M_-: f = sin, at s = pi/2 we have f = 1, f' = 0; w1 = (1, 0), x = (1, 0)
    fam = mpm_family(4, -1)
    c = np.zeros(8, dtype=complex)
    c[0] = 1.0
    phi = fam.evaluate([math.pi / 2, 0.5, 1.0, 0.0]) @ c
    expected = np.array([1j - 1, 1 - 1j, 0, 0]) / math.sqrt(2)
    np.testing.assert_allclose(phi, expected, atol=1e-15)


@pytest.mark.parametrize("sign", [1, -1])
def test_mpm_at_origin(sign, rng):
    # phi(0) = (-+ w3) (x) u(1) + w2 (x) u(-1), upper sign on M_+
    fam = mpm_family(5, sign)
    w = [random_spinor(rng, 2) for _ in range(4)]
    phi = fam.evaluate(np.zeros(5)) @ np.concatenate(w)
    np.testing.assert_allclose(phi, _pair(-sign * w[2], w[1]), atol=1e-14)


@pytest.mark.parametrize("n", [4, 5])
def test_mpm_w2_is_parallel(n, rng):
    for sign in (1, -1):
        fam = mpm_family(n, sign)
        K = fam.dimension // 4
        c = np.zeros(fam.dimension, dtype=complex)
        c[K:2 * K] = random_spinor(rng, K)
        field = fam.instantiate(c)
        for p in fam.space.sample_points(rng, 3):
            for X in fam.space.frame_at(p).vectors:
                assert np.max(np.abs(spinor_derivative(fam.space, field, X, p))) <= 1e-12


@pytest.mark.parametrize("sign", [1, -1])
def test_profile_satisfies_ode(sign):
    f, fp, fpp = mpm_profile(sign)
    for s in np.linspace(-3, 3, 13):
        assert abs(fpp(s) - sign * f(s)) <= 1e-12
        assert abs((fp(s + 1e-6) - fp(s - 1e-6)) / 2e-6 - fpp(s)) <= 1e-6


def test_m_minus_periodic_in_s(rng):
    fam = mpm_family(4, -1)
    p = fam.space.sample_points(rng, 1)[0]
    q = p.copy()
    q[0] += 2 * math.pi
    np.testing.assert_allclose(fam.evaluate(p), fam.evaluate(q), atol=1e-12)


@pytest.mark.parametrize("n", [4, 5, 6])
def test_clifford_action_table(n, rng):
    model = build_model((n, 1))
    inner = build_model((n - 2, 0))
    K = inner.dim
    p1, p2 = random_spinor(rng, K), random_spinor(rng, K)
    phi = _pair(p1, p2)
    e = model.generators
    np.testing.assert_allclose(e[0] @ phi, _pair(-p2, -p1), atol=1e-14)
    np.testing.assert_allclose(e[1] @ phi, _pair(-p2, p1), atol=1e-14)
    np.testing.assert_allclose((e[1] - e[0]) @ phi, _pair(0 * p1, 2 * p1), atol=1e-14)
    x = rng.standard_normal(n - 2)
    X = np.concatenate([[0, 0], x])
    Xi = vector_matrix(inner, x)
    np.testing.assert_allclose(vector_matrix(model, X) @ phi, _pair(-Xi @ p1, Xi @ p2), atol=1e-13)


def test_delta_V_membership(rng):
    space = CahenWallach((2.0, -1.0, 0.5))
    B = delta_V_basis(5)
    assert B.shape == (4, 2)
    assert in_delta_V(space, B @ random_spinor(rng, 2))
    phi = np.zeros(4, dtype=complex)
    phi[0] = 1.0
    assert not in_delta_V(space, phi)


@pytest.mark.parametrize("n", [3, 4, 5, 6, 7])
def test_parallel_family_has_zero_derivative(n, rng):
    space = CahenWallach(random_nonflat_lambda(rng, n - 2) if n > 3 else (1.5,))
    fam = cahen_wallach_parallel_family(space)
    field = fam.instantiate(random_spinor(rng, fam.dimension))
    for p in space.sample_points(rng, 5):
        for X in space.frame_at(p).vectors:
            assert np.max(np.abs(spinor_derivative(space, field, X, p))) <= 1e-8


def test_parity_blocks():
    fam = hypersurface_family("sphere", 5)
    P = half_spinor_basis(fam.space.model, 1)
    M = half_spinor_basis(fam.space.model, -1)
    assert P.shape == M.shape == (8, 4)
    np.testing.assert_allclose(P.conj().T @ M, 0, atol=1e-12)
    free = hypersurface_family("sphere", 5, enforce_parity=False)
    assert free.dimension == 16 and fam.dimension == 8
    with pytest.raises(ValueError):
        hypersurface_family("torus", 4)


def test_covering_map_formula():
    y = np.array([math.cos(0.4) * 2, math.sin(0.4) * 2, 0.3, -1.0])
    np.testing.assert_allclose(covering_map(3, 1.0, y),
                               [2 * math.cos(1.2), 2 * math.sin(1.2), 0.3, -1.0], atol=1e-15)


def test_covering_m1_equals_hyperbolic(rng):
    cov = covering_family(1, 4)
    base = hypersurface_family("hyperbolic", 4)
    for p in cov.space.sample_points(rng, 4):
        np.testing.assert_allclose(cov.evaluate(p), base.evaluate(cov.space.embed(p)), atol=1e-14)


def test_covering_residual(rng):
    fam = covering_family(None, 4)
    field = fam.instantiate(random_spinor(rng, fam.dimension))
    for p in fam.space.sample_points(rng, 5):
        assert twistor_residual(fam.space, field, p).max_norm <= 1e-8
        assert field.finite_difference_defect(p) <= 1e-5


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2 ** 16),
       which=st.sampled_from(["flat", "m-plus", "m-minus", "cw", "sphere", "hyperbolic", "covering"]))
def test_instantiate_is_linear(seed, which):
    rng = np.random.default_rng(seed)
    fam = {
        "flat": lambda: flat_family(4, 1),
        "m-plus": lambda: mpm_family(4, 1),
        "m-minus": lambda: mpm_family(5, -1),
        "cw": lambda: cahen_wallach_parallel_family((2.0, -1.0)),
        "sphere": lambda: hypersurface_family("sphere", 5),
        "hyperbolic": lambda: hypersurface_family("hyperbolic", 4),
        "covering": lambda: covering_family(2, 5),
    }[which]()
    a, b = complex(*rng.standard_normal(2)), complex(*rng.standard_normal(2))
    x, y = random_spinor(rng, fam.dimension), random_spinor(rng, fam.dimension)
    p = fam.space.sample_points(rng, 1)[0]
    lhs = fam.instantiate(a * x + b * y)(p)
    rhs = a * fam.instantiate(x)(p) + b * fam.instantiate(y)(p)
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * max(1.0, np.max(np.abs(rhs)))


@pytest.mark.parametrize("make", [lambda: flat_family(3), lambda: mpm_family(4, 1),
                                  lambda: hypersurface_family("hyperbolic", 5), lambda: covering_family(3, 4)])
def test_instantiated_fields_are_twistor(make, rng):
    fam = make()
    tol = 1e-5 if isinstance(fam.space, (PseudoHyperbolic, Covering)) else 1e-6
    field = fam.instantiate(random_spinor(rng, fam.dimension))
    for p in fam.space.sample_points(rng, 20):
        assert twistor_residual(fam.space, field, p).max_norm <= tol


def test_instantiate_checks_shape():
    with pytest.raises(ValueError):
        flat_family(3).instantiate(np.ones(3))


def test_twistor_family_dispatch():
    assert twistor_family(Flat(3, 0)).name == "flat"
    assert twistor_family(m_plus(4)).name == "m-plus"
    assert twistor_family(CahenWallach((2.0, -1.0))).name == "cw-parallel"
    assert twistor_family(Covering(4, 1.0, 2)).name == "covering"
    with pytest.raises(ValueError):
        twistor_family(CahenWallach((3.0, 3.0)))


def test_json_round_trip(rng):
    fam = mpm_family(4, -1)
    c = random_spinor(rng, fam.dimension)
    doc = json.loads(fam.to_json(c))
    assert doc["family"] == "m-minus" and doc["dimension"] == 8
    np.testing.assert_array_equal(pairs_to_complex(doc["params"]), c)
    assert complex_to_pairs([1 + 2j]) == [[1.0, 2.0]]


def test_transformed_family(rng):
    fam = flat_family(3)
    Q, _ = np.linalg.qr(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
    R, _ = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
    t = fam.transformed(Q, R)
    assert isinstance(t, SolutionFamily) and t.dimension == 4
    p = rng.standard_normal(3)
    np.testing.assert_allclose(t.evaluate(p), Q @ fam.evaluate(p) @ R, atol=1e-14)
