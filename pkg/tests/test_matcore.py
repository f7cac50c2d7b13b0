import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from effectseq.matcore import (
    DimensionError,
    NotHermitianError,
    NotPositiveError,
    Order,
    eig_hermitian,
    hermitian,
    lambda_min,
    loewner_compare,
    operator_norm,
    psd_sqrt,
    quad_form,
    sesq_form,
)


def random_hermitian(d, rng):
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (z + z.conj().T) / 2


def random_psd(d, rng, rank=None):
    k = d if rank is None else rank
    z = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    return z @ z.conj().T


hermitians = st.integers(1, 8).flatmap(
    lambda d: st.integers(0, 2**32 - 1).map(lambda s: random_hermitian(d, np.random.default_rng(s)))
)


def test_quarter_J_spectrum():
    spec = eig_hermitian(np.full((2, 2), 0.25))
    np.testing.assert_allclose(spec.eigenvalues, [0.0, 0.5], atol=1e-15)


def test_eigenvalues_ascending_with_ties():
    spec = eig_hermitian(np.diag([3.0, 1.0, 1.0, 2.0]))
    assert list(spec.eigenvalues) == [1.0, 1.0, 2.0, 3.0]


def test_eigenvector_phase_convention(rng):
    spec = eig_hermitian(random_hermitian(5, rng))
    for j in range(5):
        col = spec.eigenvectors[:, j]
        first = col[np.nonzero(np.abs(col) > 1e-8)[0][0]]
        assert abs(first.imag) < 1e-15 and first.real > 0


def test_eig_deterministic_bits(rng):
    M = random_hermitian(7, rng)
    a, b = eig_hermitian(M), eig_hermitian(M.copy())
    assert a.eigenvalues.tobytes() == b.eigenvalues.tobytes()
    assert a.eigenvectors.tobytes() == b.eigenvectors.tobytes()


@given(hermitians)
def test_eig_matches_lapack(M):
    spec = eig_hermitian(M)
    scale = max(1.0, np.abs(M).max())
    np.testing.assert_allclose(spec.eigenvalues, np.linalg.eigvalsh(M), atol=1e-12 * scale * M.shape[0])
    V = spec.eigenvectors
    np.testing.assert_allclose(V.conj().T @ V, np.eye(M.shape[0]), atol=1e-12)
    np.testing.assert_allclose((V * spec.eigenvalues) @ V.conj().T, M, atol=1e-11 * scale)


def test_hermitian_rejects_and_symmetrizes():
    with pytest.raises(NotHermitianError):
        hermitian([[0, 1], [0, 0]])
    M = np.array([[1, 1 + 1e-12], [1, 2]], dtype=complex)
    H = hermitian(M)
    assert np.array_equal(H, H.conj().T)


@pytest.mark.parametrize("bad", [np.zeros((2, 3)), np.zeros((0, 0)), np.zeros(3)])
def test_shape_errors(bad):
    with pytest.raises(DimensionError):
        eig_hermitian(bad)


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        eig_hermitian([[np.nan, 0], [0, 1]])


@given(st.integers(1, 8), st.integers(0, 2**32 - 1), st.integers(0, 8))
def test_sqrt_roundtrip_and_psd(d, seed, rank):
    A = random_psd(d, np.random.default_rng(seed), rank=min(rank, d))
    R = psd_sqrt(A)
    scale = max(1.0, np.abs(A).max())
    assert operator_norm(R @ R - A) <= 1e-10 * scale
    assert lambda_min(R) >= -1e-10 * np.sqrt(scale)
    assert np.array_equal(R, R.conj().T)


def test_sqrt_clamps_tiny_negative_and_rejects_real_negative():
    R = psd_sqrt(np.diag([-1e-12, 4.0]))
    np.testing.assert_allclose(R, np.diag([0.0, 2.0]))
    with pytest.raises(NotPositiveError):
        psd_sqrt(np.diag([-1e-3, 1.0]))


def test_loewner_compare_tags():
    I, Z = np.eye(2), np.zeros((2, 2))
    assert loewner_compare(Z, I).tag is Order.LESS_EQ
    assert loewner_compare(I, Z).tag is Order.GREATER_EQ
    assert loewner_compare(I, I).tag is Order.EQUAL
    v = loewner_compare(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))
    assert v.tag is Order.INCOMPARABLE and v.margin == pytest.approx(-1.0)


def test_loewner_margin_is_least_eigenvalue(rng):
    A = random_psd(4, rng)
    B = A + random_psd(4, rng)
    v = loewner_compare(A, B)
    assert v.le and v.margin == pytest.approx(np.linalg.eigvalsh(B - A)[0], abs=1e-12)


@given(hermitians, st.integers(0, 2**32 - 1))
def test_loewner_antisymmetry(M, seed):
    P = random_psd(M.shape[0], np.random.default_rng(seed))
    v = loewner_compare(M, M + P)
    w = loewner_compare(M + P, M)
    assert v.le and w.ge


@given(st.integers(1, 7), st.integers(0, 2**32 - 1))
def test_operator_norm_matches_svd(d, seed):
    r = np.random.default_rng(seed)
    M = r.standard_normal((d, d)) + 1j * r.standard_normal((d, d))
    assert operator_norm(M) == pytest.approx(np.linalg.norm(M, 2), rel=1e-10)
    H = (M + M.conj().T) / 2
    assert operator_norm(H) == pytest.approx(np.linalg.norm(H, 2), rel=1e-10)


def test_sesq_form_convention():
    M = np.array([[0, 1], [0, 0]], dtype=complex)
    x, y = np.array([0, 1j]), np.array([1, 0])
    # <Mx, y> = sum_i (Mx)_i conj(y_i)
    assert sesq_form(M, x, y) == pytest.approx(1j)
    assert quad_form(np.diag([2.0, 3.0]), np.array([1, 1j]) / np.sqrt(2)) == pytest.approx(2.5)
    with pytest.raises(DimensionError):
        quad_form(np.eye(2), np.ones(3))


@given(arrays(np.float64, 3, elements=st.floats(-5, 5)))
def test_lambda_min_diagonal(v):
    assert lambda_min(np.diag(v)) == v.min()
