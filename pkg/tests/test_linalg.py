import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from waveop.linalg import commutator, expm


def test_commutator_self_is_zero(rng):
    m = rng.normal(size=(5, 5))
    np.testing.assert_array_equal(commutator(m, m), np.zeros((5, 5)))


def test_commutator_pauli():
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    sz = np.array([[1.0, 0.0], [0.0, -1.0]])
    # [sx, sz] = -2 i sy = [[0, -2], [2, 0]]
    np.testing.assert_array_equal(commutator(sx, sz), [[0.0, -2.0], [2.0, 0.0]])


def test_commutator_shape_mismatch():
    with pytest.raises(ValueError):
        commutator(np.eye(2), np.eye(3))


def test_expm_zero_is_identity_exactly():
    np.testing.assert_array_equal(expm(np.zeros((4, 4))), np.eye(4))


def test_expm_diagonal():
    d = np.array([-3.0, 0.1, 2.5])
    np.testing.assert_allclose(expm(np.diag(d)), np.diag(np.exp(d)), rtol=1e-14)


def test_expm_rotation():
    theta = 0.7
    a = np.array([[0.0, theta], [-theta, 0.0]])
    expected = [[np.cos(theta), np.sin(theta)], [-np.sin(theta), np.cos(theta)]]
    np.testing.assert_allclose(expm(a), expected, atol=1e-15)


def test_expm_nilpotent():
    a = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]])
    np.testing.assert_allclose(expm(a), [[1, 1, 0.5], [0, 1, 1], [0, 0, 1]], atol=1e-15)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dim=st.integers(1, 12), scale=st.sampled_from([1e-3, 0.3, 2.0, 12.0]))
def test_expm_matches_scipy(seed, dim, scale):
    a = scale * np.random.default_rng(seed).normal(size=(dim, dim))
    ref = scipy.linalg.expm(a)
    np.testing.assert_allclose(expm(a), ref, rtol=1e-11, atol=1e-12 * np.abs(ref).max())


def test_expm_antisymmetric_is_orthogonal(rng):
    a = rng.normal(size=(8, 8))
    q = expm(a - a.T)
    np.testing.assert_allclose(q.T @ q, np.eye(8), atol=1e-13)
