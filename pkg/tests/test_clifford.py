import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twistorlab.clifford import (
    MAX_DIMENSION, Signature, T, U, V, _all_deltas, build_model, dump_generators, half_spinor_basis,
    omega_element, split_projectors, u_basis, u_vector, vector_multiply,
)

SQ2 = np.sqrt(2.0)


def test_n2_generators_are_U_and_V():
    model = build_model((2, 0))
    np.testing.assert_array_equal(model.gen(1), np.array([[1j, 0], [0, -1j]]))
    np.testing.assert_array_equal(model.gen(2), np.array([[0, 1j], [1j, 0]]))


def test_n3_last_generator_is_iT():
    e3 = build_model((3, 0)).gen(3)
    np.testing.assert_array_equal(e3, np.array([[0, 1], [-1, 0]]))


def test_timelike_generator_squares_to_plus_one():
    e1 = build_model((4, 1)).gen(1)
    np.testing.assert_allclose(e1 @ e1, np.eye(4), atol=1e-15)


def test_kronecker_slot_convention():
    # e_{a+2}(n, 1) = e_a(n-2, 0) (x) T
    big, small = build_model((6, 1)), build_model((4, 0))
    for a in range(1, 5):
        np.testing.assert_allclose(big.gen(a + 2), np.kron(small.gen(a), T), atol=0)


@pytest.mark.parametrize("n", range(1, 11))
@pytest.mark.parametrize("k", [0, 1, 2])
def test_anticommutation(n, k):
    if k > n or (n % 2 and k == n):
        pytest.skip("invalid signature")
    assert build_model((n, k)).anticommutator_defect() <= 1e-12


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 9), k=st.integers(0, 2), i=st.integers(0, 8), j=st.integers(0, 8))
def test_pairwise_relation_property(n, k, i, j):
    if k > n or (n % 2 and k == n):
        return
    model = build_model((n, k))
    i, j = i % n, j % n
    ei, ej = model.generators[i], model.generators[j]
    target = -2 * model.eps[j] * np.eye(model.dim) if i == j else 0
    assert np.max(np.abs(ei @ ej + ej @ ei - target)) <= 1e-12


def test_invalid_signatures_rejected():
    with pytest.raises(ValueError):
        Signature(3, 4)
    with pytest.raises(ValueError):
        Signature(0, 0)
    with pytest.raises(ValueError):
        build_model((MAX_DIMENSION + 1, 0))


def test_u_vector_value():
    np.testing.assert_allclose(u_vector(1), np.array([1, -1j]) / SQ2)
    np.testing.assert_allclose(u_vector(-1), np.array([1, 1j]) / SQ2)
    with pytest.raises(ValueError):
        u_vector(0)


def test_u_basis_orthonormal_examples():
    model = build_model((4, 0))
    a = u_basis(model, (1, -1))
    b, c = u_basis(model, (1, 1)), u_basis(model, (-1, 1))
    assert abs(np.vdot(a, a) - 1) < 1e-15
    assert abs(np.vdot(b, c)) < 1e-15
    with pytest.raises(ValueError):
        u_basis(model, (1,))


@pytest.mark.parametrize("n,k", [(2, 0), (4, 1), (6, 2), (8, 1), (10, 0), (5, 1), (7, 2)])
def test_u_basis_family_orthonormal(n, k):
    model = build_model((n, k))
    B = np.stack([u_basis(model, d) for d in _all_deltas(model.sig.half)], axis=1)
    assert np.max(np.abs(B.conj().T @ B - np.eye(model.dim))) <= 1e-12


@pytest.mark.parametrize("n,k", [(2, 0), (4, 1), (6, 1), (6, 2), (8, 0), (10, 1)])
def test_chirality_of_u_basis(n, k):
    model = build_model((n, k))
    P, M = split_projectors(model)
    for d in _all_deltas(model.sig.half):
        u = u_basis(model, d)
        target = P if np.prod(d) == 1 else M
        assert np.max(np.abs(target @ u - u)) <= 1e-12


@pytest.mark.parametrize("n,k", [(2, 0), (6, 1), (4, 2), (8, 1)])
def test_projectors(n, k):
    model = build_model((n, k))
    P, M = split_projectors(model)
    eye = np.eye(model.dim)
    np.testing.assert_allclose(P + M, eye, atol=1e-12)
    np.testing.assert_allclose(P @ P, P, atol=1e-12)
    np.testing.assert_allclose(P @ model.volume, model.volume @ P, atol=1e-12)
    assert round(np.trace(P).real) == model.dim // 2 == round(np.trace(M).real)
    m = n // 2
    np.testing.assert_allclose(model.volume @ model.volume, (1j ** (m + k)) ** 2 * eye, atol=1e-12)


def test_rank_examples():
    assert round(np.trace(split_projectors(build_model((2, 0)))[0]).real) == 1
    P, M = split_projectors(build_model((6, 1)))
    assert round(np.trace(P).real) == 4 == round(np.trace(M).real)


def test_split_rejected_for_odd_n():
    with pytest.raises(ValueError):
        split_projectors(build_model((5, 1)))


def test_half_spinor_basis_shapes():
    model = build_model((6, 1))
    assert half_spinor_basis(model, 1).shape == (8, 4)
    with pytest.raises(ValueError):
        half_spinor_basis(build_model((5, 0)), 1)


def test_vector_multiply_examples(rng):
    model = build_model((2, 0))
    np.testing.assert_allclose(vector_multiply(model, [1, 0], np.array([1, 0])), [1j, 0])
    model = build_model((5, 1))
    s = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    np.testing.assert_allclose(vector_multiply(model, np.zeros(5), s), 0)
    for j in range(5):
        np.testing.assert_allclose(vector_multiply(model, np.eye(5)[j], s), model.generators[j] @ s)
    with pytest.raises(ValueError):
        vector_multiply(model, np.zeros(4), s)
    with pytest.raises(ValueError):
        vector_multiply(model, np.zeros(5), s[:2])


def test_vector_multiply_bilinear(rng):
    model = build_model((6, 1))
    x, y = rng.standard_normal(6), rng.standard_normal(6)
    s, t = rng.standard_normal(8) + 0j, rng.standard_normal(8) * 1j
    lhs = vector_multiply(model, 2 * x - y, s + 3 * t)
    rhs = (2 * vector_multiply(model, x, s) + 6 * vector_multiply(model, x, t)
           - vector_multiply(model, y, s) - 3 * vector_multiply(model, y, t))
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_omega_element():
    model = build_model((8, 0))
    np.testing.assert_array_equal(omega_element(model, []), np.eye(16))
    with pytest.raises(ValueError):
        omega_element(model, [1, 1])
    with pytest.raises(ValueError):
        omega_element(model, [9])


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(1, 8), min_size=0, max_size=8, unique=True).filter(lambda v: len(v) % 2 == 0))
def test_omega_square_rule(indices):
    model = build_model((8, 0))
    w = omega_element(model, indices)
    s = len(indices)
    np.testing.assert_allclose(w @ w, (-1) ** (s // 2) * np.eye(16), atol=1e-12)


def test_dump_generators_round_trip():
    model = build_model((3, 1))
    dump = dump_generators(model)
    back = np.array(dump)[..., 0] + 1j * np.array(dump)[..., 1]
    np.testing.assert_array_equal(back, np.array(model.generators))
    assert dump_generators(build_model((2, 0)))[0] == [[[0.0, 1.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, -1.0]]]


def test_models_are_immutable():
    model = build_model((4, 1))
    with pytest.raises(ValueError):
        model.generators[0][0, 0] = 5
    assert U.shape == V.shape == (2, 2)
