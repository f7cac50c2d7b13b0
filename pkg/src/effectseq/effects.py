"""The sequential effect algebra of a finite-dimensional Hilbert space.

Effects are Hermitian matrices with spectrum in [0, 1].  The partial sum
``oplus`` and difference ``ominus`` return a :class:`PartialResult` instead of
raising: undefinedness is ordinary algebra, not an error.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

from .matcore import (
    DimensionError,
    Spectrum,
    eig_hermitian,
    hermitian,
    loewner_compare,
    operator_norm,
    psd_tol_for,
)

TRACE_TOL = 1e-10
PROB_FLOOR = 1e-12


class NotAnEffectError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Effect:
    """A quantum effect ``0 <= A <= I``.

    Eigenvalues within ``psd_tol`` outside [0, 1] are clamped on construction;
    if none are outside, the (symmetrized) input matrix is kept verbatim.
    """

    matrix: np.ndarray
    psd_tol: Optional[float] = None
    spectrum: Spectrum = field(init=False, repr=False)

    def __post_init__(self):
        m = hermitian(self.matrix)
        spec = eig_hermitian(m)
        tol = psd_tol_for(m.shape[0]) if self.psd_tol is None else self.psd_tol
        lo, hi = spec.eigenvalues[0], spec.eigenvalues[-1]
        if lo < -tol or hi > 1 + tol:
            raise NotAnEffectError(f"spectrum [{lo:.3e}, {hi:.3e}] outside [0, 1]")
        if lo < 0 or hi > 1:
            vals = np.clip(spec.eigenvalues, 0.0, 1.0)
            spec = Spectrum(vals, spec.eigenvectors, spec.sweeps)
            m = spec.apply(lambda lam: lam)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "spectrum", spec)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def sqrt(self) -> np.ndarray:
        r = self.spectrum.apply(lambda lam: np.sqrt(np.clip(lam, 0.0, None)))
        r.setflags(write=False)
        return r

    @classmethod
    def identity(cls, dim: int) -> "Effect":
        return cls(np.eye(dim))

    @classmethod
    def zero(cls, dim: int) -> "Effect":
        return cls(np.zeros((dim, dim)))

    @classmethod
    def projection(cls, vectors) -> "Effect":
        """Orthogonal projection onto the span of the given column vectors."""
        v = np.atleast_2d(np.asarray(vectors, dtype=np.complex128))
        if v.shape[0] == 1 and v.shape[1] > 1:
            v = v.T
        q, _ = np.linalg.qr(v)
        return cls(q @ q.conj().T)

    @classmethod
    def from_spectrum(cls, eigenvalues, unitary) -> "Effect":
        u = np.asarray(unitary, dtype=np.complex128)
        return cls((u * np.asarray(eigenvalues, dtype=float)) @ u.conj().T)

    def scaled(self, c: float) -> "Effect":
        return Effect(c * self.matrix)

    def allclose(self, other: "Effect", atol: float = 1e-10) -> bool:
        return self.dim == other.dim and operator_norm(self.matrix - other.matrix) <= atol

    def digest(self) -> str:
        return hashlib.sha256(self.matrix.tobytes()).hexdigest()[:12]

    def __repr__(self) -> str:
        return f"Effect(dim={self.dim}, spectrum=[{self.spectrum.eigenvalues[0]:.4g}, {self.spectrum.eigenvalues[-1]:.4g}])"


@dataclass(frozen=True)
class PartialResult:
    defined: bool
    value: Optional[Effect] = None

    def __post_init__(self):
        if self.defined != (self.value is not None):
            raise ValueError("value must be present exactly when defined")

    def __bool__(self) -> bool:
        return self.defined


UNDEFINED = PartialResult(False)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    matrix: np.ndarray

    def __post_init__(self):
        m = hermitian(self.matrix)
        lo = eig_hermitian(m).eigenvalues[0]
        if lo < -psd_tol_for(m.shape[0]):
            raise ValueError(f"density operator has eigenvalue {lo:.3e}")
        tr = np.trace(m).real
        if abs(tr - 1) > TRACE_TOL:
            raise ValueError(f"density operator has trace {tr!r}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _same_dim(*effects) -> int:
    dims = {e.dim for e in effects}
    if len(dims) != 1:
        raise DimensionError(f"dimension mismatch: {sorted(dims)}")
    return dims.pop()


def _order_tol(dim: int) -> float:
    return psd_tol_for(dim)


def oplus(A: Effect, B: Effect, tol: Optional[float] = None) -> PartialResult:
    """``A + B`` when ``A + B <= I``, undefined otherwise."""
    d = _same_dim(A, B)
    tol = _order_tol(d) if tol is None else tol
    s = A.matrix + B.matrix
    if not loewner_compare(s, np.eye(d), tol).le:
        return UNDEFINED
    return PartialResult(True, Effect(s))


def complement(A: Effect) -> Effect:
    return Effect(np.eye(A.dim) - A.matrix)


def ominus(B: Effect, A: Effect, tol: Optional[float] = None) -> PartialResult:
    """``B - A`` when ``A <= B``."""
    d = _same_dim(A, B)
    tol = _order_tol(d) if tol is None else tol
    if not loewner_compare(A.matrix, B.matrix, tol).le:
        return UNDEFINED
    return PartialResult(True, Effect(B.matrix - A.matrix))


def orthogonal(A: Effect, B: Effect) -> bool:
    return oplus(A, B).defined


def seq_product(A: Effect, B: Effect) -> Effect:
    """Sequential product ``A^(1/2) B A^(1/2)``: measure ``A``, then ``B``."""
    _same_dim(A, B)
    r = A.sqrt
    return Effect(r @ B.matrix @ r)


def interferes(A: Effect, B: Effect, tol: float = 1e-10) -> bool:
    return operator_norm(seq_product(A, B).matrix - seq_product(B, A).matrix) > tol


@dataclass(frozen=True)
class LudersResult:
    state: np.ndarray
    probability: float
    post_state: Optional[DensityOperator] = None


def luders(B: Effect, T: DensityOperator, prob_floor: float = PROB_FLOOR) -> LudersResult:
    """Unnormalized Lueders update ``B^(1/2) T B^(1/2)`` and its probability.

    The renormalized post-measurement state is attached when the outcome
    probability exceeds ``prob_floor``.
    """
    if B.dim != T.dim:
        raise DimensionError(f"effect dim {B.dim} vs state dim {T.dim}")
    r = B.sqrt
    state = r @ T.matrix @ r
    state = (state + state.conj().T) / 2
    p = float(np.trace(state).real)
    post = DensityOperator(state / p) if p > prob_floor else None
    return LudersResult(state, p, post)


# -- random sampling -------------------------------------------------------

def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_effect(dim: int, rng: np.random.Generator, low: float = 0.0, high: float = 1.0) -> Effect:
    return Effect.from_spectrum(rng.uniform(low, high, dim), haar_unitary(dim, rng))


def random_density(dim: int, rng: np.random.Generator) -> DensityOperator:
    w = rng.dirichlet(np.ones(dim))
    u = haar_unitary(dim, rng)
    return DensityOperator((u * w) @ u.conj().T)


# -- axiom suites ----------------------------------------------------------

MAX_DRAW_FACTOR = 20
AXIOMS = ("E1", "E2", "E3", "E4", "SE1", "SE2", "SE3", "SE4", "SE5")


@dataclass
class AxiomReport:
    axiom_id: str
    trials: int = 0
    failures: list = field(default_factory=list)
    max_residual: float = 0.0
    vacuous: int = 0

    @property
    def passed(self) -> bool:
        return not self.failures

    def record(self, inputs: Sequence[Effect], residual: float, tol: float) -> None:
        self.max_residual = max(self.max_residual, residual)
        if not residual <= tol:
            digest = hashlib.sha256(b"".join(e.matrix.tobytes() for e in inputs)).hexdigest()[:12]
            self.failures.append((digest, residual))

    def to_dict(self) -> dict:
        return {
            "axiom_id": self.axiom_id,
            "trials": self.trials,
            "vacuous": self.vacuous,
            "max_residual": self.max_residual,
            "failures": [{"inputs": d, "residual": r} for d, r in self.failures],
            "passed": self.passed,
        }


def _diff(X: Effect, Y: Effect) -> float:
    return operator_norm(X.matrix - Y.matrix)


def _commuting_pair(dim: int, rng) -> tuple[Effect, Effect]:
    u = haar_unitary(dim, rng)
    return Effect.from_spectrum(rng.uniform(0, 1, dim), u), Effect.from_spectrum(rng.uniform(0, 1, dim), u)


def _orthogonal_range_pair(dim: int, rng) -> tuple[Effect, Effect]:
    u = haar_unitary(dim, rng)
    k = int(rng.integers(1, dim)) if dim > 1 else 1
    a = np.concatenate([rng.uniform(0.05, 1, k), np.zeros(dim - k)])
    b = np.concatenate([np.zeros(k), rng.uniform(0.05, 1, dim - k)])
    return Effect.from_spectrum(a, u), Effect.from_spectrum(b, u)


def _block_commutant_triple(dim: int, rng) -> tuple[Effect, Effect, Effect]:
    """``c`` with a degenerate spectrum; ``a``, ``b`` block diagonal in its
    eigenbasis, so both commute with ``c`` but generally not with each other."""
    u = haar_unitary(dim, rng)
    k = int(rng.integers(1, dim)) if dim > 1 else 1
    c_vals = np.concatenate([np.full(k, rng.uniform()), np.full(dim - k, rng.uniform())])
    c = Effect.from_spectrum(c_vals, u)

    def block_effect(scale):
        m = np.zeros((dim, dim), dtype=np.complex128)
        for lo, hi in ((0, k), (k, dim)):
            if hi > lo:
                m[lo:hi, lo:hi] = random_effect(hi - lo, rng).matrix
        return Effect(scale * (u @ m @ u.conj().T))

    return block_effect(0.5), block_effect(0.5), c


def _axiom_trial(axiom: str, dim: int, rng, tol: float, rep: AxiomReport) -> None:
    eye = Effect.identity(dim)
    if axiom == "E1":
        a = random_effect(dim, rng).scaled(rng.uniform(0, 0.6))
        b = random_effect(dim, rng).scaled(rng.uniform(0, 0.6))
        ab, ba = oplus(a, b), oplus(b, a)
        if ab.defined != ba.defined:
            rep.record((a, b), np.inf, tol)
        else:
            # both undefined is itself agreement
            rep.record((a, b), _diff(ab.value, ba.value) if ab.defined else 0.0, tol)
    elif axiom == "E2":
        w = rng.uniform(0, 0.45, 3)
        a, b, c = (random_effect(dim, rng).scaled(x) for x in w)
        ab = oplus(a, b)
        abc = oplus(ab.value, c) if ab.defined else UNDEFINED
        if not abc.defined:
            rep.vacuous += 1
            return
        bc = oplus(b, c)
        a_bc = oplus(a, bc.value) if bc.defined else UNDEFINED
        rep.record((a, b, c), _diff(abc.value, a_bc.value) if a_bc.defined else np.inf, tol)
    elif axiom == "E3":
        a = random_effect(dim, rng)
        ac = oplus(a, complement(a))
        rep.record((a,), _diff(ac.value, eye) if ac.defined else np.inf, tol)
        # uniqueness: a perturbed candidate must not also sum to I
        eps = float(rng.choice([0.0, 1e-3, 1e-1]))
        h = random_effect(dim, rng)
        x_mat = complement(a).matrix - eps * h.matrix
        lo = eig_hermitian(x_mat).eigenvalues[0]
        if lo < 0:
            return
        x = Effect(x_mat)
        s = oplus(a, x)
        if s.defined and _diff(s.value, eye) <= tol:
            rep.record((a, x), _diff(x, complement(a)), tol * dim)
    elif axiom == "E4":
        a = random_effect(dim, rng).scaled(float(rng.choice([0.0, 1e-14, 1e-3, 1.0])))
        if oplus(a, eye).defined:
            rep.record((a,), operator_norm(a.matrix), tol)
        else:
            rep.vacuous += 1
    elif axiom == "SE1":
        a = random_effect(dim, rng)
        b = random_effect(dim, rng).scaled(rng.uniform(0, 0.5))
        c = random_effect(dim, rng).scaled(rng.uniform(0, 0.5))
        bc = oplus(b, c)
        if not bc.defined:
            rep.vacuous += 1
            return
        ab, ac = seq_product(a, b), seq_product(a, c)
        s = oplus(ab, ac)
        if not s.defined:
            rep.record((a, b, c), np.inf, tol)
            return
        rep.record((a, b, c), _diff(seq_product(a, bc.value), s.value), tol)
    elif axiom == "SE2":
        a = random_effect(dim, rng)
        rep.record((a,), _diff(seq_product(eye, a), a), tol)
    elif axiom == "SE3":
        a, b = _orthogonal_range_pair(dim, rng)
        ab = seq_product(a, b)
        if operator_norm(ab.matrix) > 1e-10:
            rep.record((a, b), np.inf, tol)
            return
        rep.record((a, b), _diff(ab, seq_product(b, a)), tol)
    elif axiom == "SE4":
        a, b = _commuting_pair(dim, rng)
        c = random_effect(dim, rng)
        if _diff(seq_product(a, b), seq_product(b, a)) > tol:
            rep.record((a, b, c), np.inf, tol)
            return
        bc_ = complement(b)
        r1 = _diff(seq_product(a, bc_), seq_product(bc_, a))
        r2 = _diff(seq_product(a, seq_product(b, c)), seq_product(seq_product(a, b), c))
        rep.record((a, b, c), max(r1, r2), tol)
    elif axiom == "SE5":
        a, b, c = _block_commutant_triple(dim, rng)
        if max(_diff(seq_product(c, a), seq_product(a, c)), _diff(seq_product(c, b), seq_product(b, c))) > tol:
            rep.record((a, b, c), np.inf, tol)
            return
        ab = seq_product(a, b)
        r1 = _diff(seq_product(c, ab), seq_product(ab, c))
        s = oplus(a, b)
        r2 = _diff(seq_product(c, s.value), seq_product(s.value, c)) if s.defined else np.inf
        rep.record((a, b, c), max(r1, r2), tol)
    else:
        raise ValueError(f"unknown axiom {axiom!r}")


def check_axioms(
    dims: Iterable[int] | int = range(2, 9),
    trials: int = 100,
    seed: int = 42,
    tol_per_dim: float = 1e-9,
    axioms: Sequence[str] = AXIOMS,
) -> list[AxiomReport]:
    """Run randomized instances of every effect-algebra and sequential axiom.

    Trials cycle through ``dims``; the residual tolerance for a trial at
    dimension ``d`` is ``tol_per_dim * d``.  Only draws whose premise holds
    count toward ``trials``; the rest are tallied as ``vacuous`` and redrawn
    (at most ``MAX_DRAW_FACTOR * trials`` draws).  Failures are reported, not
    raised.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    dims = [dims] if isinstance(dims, int) else list(dims)
    reports = []
    for k, axiom in enumerate(axioms):
        rng = np.random.default_rng([seed, k])
        rep = AxiomReport(axiom)
        draws = 0
        while rep.trials < trials and draws < MAX_DRAW_FACTOR * trials:
            d = dims[draws % len(dims)]
            before = rep.vacuous
            _axiom_trial(axiom, d, rng, tol_per_dim * d, rep)
            draws += 1
            if rep.vacuous == before:
                rep.trials += 1
        reports.append(rep)
    return reports
