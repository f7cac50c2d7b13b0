"""Dense Hermitian linear algebra kernel.

Everything here works on plain ``numpy`` complex arrays.  The eigensolver is a
cyclic Jacobi iteration (deterministic sweep order) compiled with numba when it
is available; results are bit-reproducible for identical input bits.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


HERM_TOL = 1e-10
EIG_TOL = 1e-12
SQRT_TOL = 1e-10
PSD_TOL_PER_DIM = 1e-9
ROTATION_THRESHOLD = 1e-14
MAX_SWEEPS = 100


class DimensionError(ValueError):
    pass


class NotHermitianError(ValueError):
    pass


class NotPositiveError(ValueError):
    pass


class EigenConvergenceError(ArithmeticError):
    pass


def psd_tol_for(dim: int) -> float:
    return PSD_TOL_PER_DIM * dim


def as_matrix(M) -> np.ndarray:
    """Validate a square, finite complex matrix and return a complex128 copy."""
    a = np.array(M, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise DimensionError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def hermitian(M, herm_tol: float = HERM_TOL) -> np.ndarray:
    """Return ``(M + M*) / 2`` after checking ``M`` is Hermitian to ``herm_tol``.

    The result is exactly Hermitian bit for bit.
    """
    a = as_matrix(M)
    dev = np.max(np.abs(a - a.conj().T))
    if dev > herm_tol:
        raise NotHermitianError(f"max |M - M*| = {dev:.3e} exceeds {herm_tol:.1e}")
    return (a + a.conj().T) / 2


def _check_same_dim(*mats) -> int:
    dims = {m.shape[0] for m in mats}
    if len(dims) != 1:
        raise DimensionError(f"dimension mismatch: {sorted(dims)}")
    return dims.pop()


@njit(cache=True)
def _jacobi(a, threshold, max_sweeps):
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                r = abs(a[p, q])
                if r > off:
                    off = r
        if off <= threshold:
            return a, v, sweep, True
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r <= threshold:
                    continue
                # phase e^{i phi} of a_pq; the rotation first makes a_pq real
                ph = apq / r
                cph = np.conj(ph)
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * r)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * cph * akq
                    a[k, q] = s * akp + c * cph * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * ph * aqk
                    a[q, k] = s * apk + c * ph * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = app - t * r
                a[q, q] = aqq + t * r
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * cph * vkq
                    v[k, q] = s * vkp + c * cph * vkq
    return a, v, max_sweeps, False


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0

    def apply(self, f) -> np.ndarray:
        """Functional calculus ``V f(diag) V*``, exactly symmetrized."""
        v = self.eigenvectors
        m = (v * f(self.eigenvalues)) @ v.conj().T
        return (m + m.conj().T) / 2


def eig_hermitian(
    M,
    threshold: float = ROTATION_THRESHOLD,
    max_sweeps: int = MAX_SWEEPS,
) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Eigenvalues come back ascending (stable order for ties); each eigenvector is
    rephased so its first non-negligible component is real and positive.
    ``threshold`` is relative to the Frobenius norm of ``M``.
    """
    a = hermitian(M)
    scale = np.linalg.norm(a)
    diag, vecs, sweeps, ok = _jacobi(a.copy(), threshold * scale, max_sweeps)
    if not ok:
        raise EigenConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")
    vals = np.diag(diag).real.copy()
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    vecs = vecs[:, order]
    for j in range(vecs.shape[1]):
        col = vecs[:, j]
        big = np.nonzero(np.abs(col) > 1e-8)[0]
        if big.size:
            z = col[big[0]]
            vecs[:, j] = col * (np.conj(z) / abs(z))
    return Spectrum(vals, vecs, sweeps)


def lambda_min(M) -> float:
    return float(eig_hermitian(M).eigenvalues[0])


def psd_sqrt(A, psd_tol: float | None = None, spectrum: Spectrum | None = None) -> np.ndarray:
    """Unique positive semidefinite square root ``V diag(sqrt(l)) V*``.

    Eigenvalues in ``(-psd_tol, 0)`` are clamped to zero; anything more
    negative is rejected.
    """
    a = hermitian(A)
    tol = psd_tol_for(a.shape[0]) if psd_tol is None else psd_tol
    spec = eig_hermitian(a) if spectrum is None else spectrum
    if spec.eigenvalues[0] < -tol:
        raise NotPositiveError(f"eigenvalue {spec.eigenvalues[0]:.3e} below -{tol:.1e}")
    return spec.apply(lambda lam: np.sqrt(np.clip(lam, 0.0, None)))


class Order(enum.Enum):
    LESS_EQ = "LessEq"
    GREATER_EQ = "GreaterEq"
    EQUAL = "Equal"
    INCOMPARABLE = "Incomparable"


@dataclass(frozen=True)
class OrderVerdict:
    tag: Order
    margin: float

    @property
    def le(self) -> bool:
        return self.tag in (Order.LESS_EQ, Order.EQUAL)

    @property
    def ge(self) -> bool:
        return self.tag in (Order.GREATER_EQ, Order.EQUAL)


def loewner_compare(A, B, tol: float = 0.0) -> OrderVerdict:
    """Compare ``A`` and ``B`` in the Loewner order.

    ``margin`` is the least eigenvalue of ``B - A`` for LessEq, of ``A - B``
    for GreaterEq, the smaller of the two for Equal and the larger of the two
    (hence negative) for Incomparable.
    """
    a, b = hermitian(A), hermitian(B)
    _check_same_dim(a, b)
    up = lambda_min(b - a)
    down = lambda_min(a - b)
    le, ge = up >= -tol, down >= -tol
    if le and ge:
        return OrderVerdict(Order.EQUAL, min(up, down))
    if le:
        return OrderVerdict(Order.LESS_EQ, up)
    if ge:
        return OrderVerdict(Order.GREATER_EQ, down)
    return OrderVerdict(Order.INCOMPARABLE, max(up, down))


def operator_norm(M) -> float:
    """Largest singular value."""
    a = as_matrix(M)
    if np.array_equal(a, a.conj().T):
        vals = eig_hermitian(a).eigenvalues
        return float(max(abs(vals[0]), abs(vals[-1])))
    gram = a.conj().T @ a
    return float(np.sqrt(max(eig_hermitian((gram + gram.conj().T) / 2).eigenvalues[-1], 0.0)))


def sesq_form(M, x, y) -> complex:
    """``<M x, y>`` with the inner product linear in the first slot."""
    a = as_matrix(M)
    x = np.asarray(x, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128)
    if x.shape != (a.shape[0],) or y.shape != (a.shape[0],):
        raise DimensionError(f"vectors {x.shape}, {y.shape} vs matrix {a.shape}")
    return complex(np.vdot(y, a @ x))


def quad_form(M, x) -> complex:
    return sesq_form(M, x, x)
