import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import charpoly_roots_3x3
from pcretain.matrixcore import (
    NotPositiveSemidefiniteError,
    SymmetricMatrix,
    eigen_decompose,
    psd_sqrt,
)
from pcretain.simkit import default_population

# roots of det(A - t I) for the seed-42 matrix below, by bisection (oracles.charpoly_roots_3x3)
SEED42_ROOTS = [0.7227158896860153, -0.13661853154250253, -2.2492166245472065]


def seed42_matrix():
    a = np.random.default_rng(42).standard_normal((3, 3))
    return (a + a.T) / 2


def check_spectrum(a, spec):
    a = np.asarray(a, dtype=float)
    v = spec.vectors
    assert np.all(np.diff(spec.values) <= 0)
    assert np.max(np.abs(v.T @ v - np.eye(a.shape[0]))) <= 1e-10
    recon = (v * spec.values) @ v.T
    assert np.max(np.abs(recon - a)) <= 1e-8 * (1 + np.max(np.abs(a)))


def test_symmetrizes_and_flags():
    m = SymmetricMatrix([[1.0, 2.0], [2.5, 1.0]])
    assert m.was_asymmetric
    assert m.entries[0, 1] == m.entries[1, 0] == 2.25
    assert not SymmetricMatrix(np.eye(3)).was_asymmetric
    with pytest.raises(ValueError):
        SymmetricMatrix(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        m.entries[0, 0] = 5.0


def test_identity_spectrum():
    spec = eigen_decompose(SymmetricMatrix.identity(4))
    np.testing.assert_array_equal(spec.values, [1, 1, 1, 1])
    check_spectrum(np.eye(4), spec)


def test_diagonal_already_solved():
    spec = eigen_decompose(SymmetricMatrix.diag([4.0, 1.0]))
    np.testing.assert_allclose(spec.values, [4, 1])
    np.testing.assert_allclose(spec.vectors, np.eye(2))


def test_unsorted_diagonal_is_sorted():
    spec = eigen_decompose(np.diag([1.0, 5.0, 3.0]))
    np.testing.assert_allclose(spec.values, [5, 3, 1])
    np.testing.assert_allclose(spec.vectors[:, 0], [0, 1, 0])


def test_seed42_matches_charpoly_roots():
    a = seed42_matrix()
    np.testing.assert_allclose(charpoly_roots_3x3(a), SEED42_ROOTS, atol=1e-9)
    spec = eigen_decompose(a)
    np.testing.assert_allclose(spec.values, SEED42_ROOTS, atol=1e-9)
    check_spectrum(a, spec)


def test_sign_convention_and_determinism(rng):
    a = rng.standard_normal((6, 6))
    a = a + a.T
    s1 = eigen_decompose(a)
    s2 = eigen_decompose(a.copy())
    np.testing.assert_array_equal(s1.values, s2.values)
    np.testing.assert_array_equal(s1.vectors, s2.vectors)
    for k in range(6):
        col = s1.vectors[:, k]
        assert col[np.argmax(np.abs(col))] > 0


def test_rejects_non_finite():
    a = np.eye(3)
    a[1, 2] = a[2, 1] = np.nan
    with pytest.raises(ValueError, match=r"\(1, 2\)"):
        eigen_decompose(a)


def test_zero_and_scalar_matrices():
    spec = eigen_decompose(np.zeros((3, 3)))
    np.testing.assert_array_equal(spec.values, [0, 0, 0])
    spec = eigen_decompose([[7.5]])
    assert spec.values[0] == 7.5


def test_matches_numpy_on_larger_matrix(rng):
    g = rng.standard_normal((40, 25))
    a = g.T @ g / 40
    spec = eigen_decompose(a)
    np.testing.assert_allclose(spec.values, np.sort(np.linalg.eigvalsh(a))[::-1], rtol=1e-10, atol=1e-12)
    check_spectrum(a, spec)


def test_rank_deficient_matrix(rng):
    g = rng.standard_normal((3, 10))
    a = g.T @ g
    spec = eigen_decompose(a)
    check_spectrum(a, spec)
    assert np.sum(spec.values > 1e-10 * spec.values[0]) == 3


symmetric_inputs = st.integers(1, 7).flatmap(
    lambda p: arrays(np.float64, (p, p), elements=st.floats(-50, 50, allow_nan=False, allow_infinity=False))
).map(lambda a: (a + a.T) / 2)


@settings(max_examples=60, deadline=None)
@given(symmetric_inputs)
def test_trace_and_reconstruction(a):
    spec = eigen_decompose(a)
    check_spectrum(a, spec)
    tr = np.trace(a)
    assert abs(spec.values.sum() - tr) <= 1e-8 * (1 + abs(tr))


@settings(max_examples=40, deadline=None)
@given(symmetric_inputs, st.floats(0.01, 100))
def test_scale_equivariance(a, c):
    v1 = eigen_decompose(a).values
    v2 = eigen_decompose(c * a).values
    scale = max(np.max(np.abs(c * v1)), 1e-300)
    assert np.max(np.abs(v2 - c * v1)) <= 1e-10 * scale


def test_psd_sqrt_trivial():
    np.testing.assert_allclose(psd_sqrt(np.eye(3)).entries, np.eye(3))
    np.testing.assert_allclose(psd_sqrt(np.diag([9.0, 4.0])).entries, np.diag([3.0, 2.0]), atol=1e-14)


def test_psd_sqrt_population_multiply_back():
    sigma = default_population().sigma.entries
    b = psd_sqrt(sigma).entries
    np.testing.assert_array_equal(b, b.T)
    assert np.max(np.abs(b @ b - sigma)) <= 1e-8 * (1 + np.max(np.abs(sigma)))


def test_psd_sqrt_shares_eigenvectors(rng):
    q, _ = np.linalg.qr(rng.standard_normal((5, 5)))
    lam = np.array([9.0, 5.0, 2.0, 1.0, 0.25])
    a = (q * lam) @ q.T
    va = eigen_decompose(a).vectors
    vb = eigen_decompose(psd_sqrt(a)).vectors
    # distinct eigenvalues: each eigenvector agrees up to sign
    overlap = np.abs(np.sum(va * vb, axis=0))
    np.testing.assert_allclose(overlap, 1.0, atol=1e-6)


def test_psd_sqrt_clamps_tiny_negative_and_rejects_indefinite():
    a = np.diag([4.0, -1e-12])
    np.testing.assert_allclose(psd_sqrt(a).entries, np.diag([2.0, 0.0]))
    with pytest.raises(NotPositiveSemidefiniteError, match="not positive semi-definite"):
        psd_sqrt(np.diag([4.0, -0.5]))
