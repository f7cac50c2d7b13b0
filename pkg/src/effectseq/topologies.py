"""Finite-trace convergence diagnostics for integer-indexed effect families.

A family is evaluated on a finite schedule of indices.  Verdicts follow one
rule everywhere:

* ``Converges``: the last residual is ``<= tol`` and the trailing 20% of the
  trace is nonincreasing up to ``10 * tol`` jitter;
* ``FailsToConverge``: the trailing window stays above a gap ``> 10 * tol``
  and makes no net progress (a positive liminf is witnessed);
* ``Inconclusive`` otherwise.

Families with algebraic rates can be evaluated on :func:`extended_indices`,
which appends a geometric tail reaching far beyond the dense part.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .effects import Effect
from .matcore import DimensionError, lambda_min, loewner_compare, operator_norm, psd_sqrt, quad_form

DEFAULT_TOL = 1e-6
WINDOW_FRACTION = 0.2
JITTER = 10.0


class Mode(enum.Enum):
    NORM = "Norm"
    SOT = "SOT"
    WOT = "WOT"
    ORDER_WITNESS = "OrderWitness"
    INTERVAL = "IntervalCriterion"


class Verdict(enum.Enum):
    CONVERGES = "Converges"
    FAILS = "FailsToConverge"
    INCONCLUSIVE = "Inconclusive"


class MonotonicityError(ValueError):
    def __init__(self, msg, pair=None, margin=None):
        super().__init__(msg)
        self.pair = pair
        self.margin = margin


def dense_indices(n0: int, n_max: int) -> list[int]:
    if n_max < n0:
        raise ValueError(f"empty index range {n0}..{n_max}")
    return list(range(n0, n_max + 1))


def extended_indices(n0: int, n_max: int, horizon: int, tail_points: int = 40) -> list[int]:
    """``n0..n_max`` followed by ``tail_points`` geometrically spaced indices up to ``horizon``."""
    idx = dense_indices(n0, n_max)
    if horizon > n_max and tail_points > 0:
        tail = np.geomspace(n_max, horizon, tail_points + 1)[1:]
        idx.extend(sorted({int(round(t)) for t in tail} - set(idx)))
    return idx


class IndexedEffectFamily:
    """``n -> Effect`` on a finite increasing schedule of indices.

    Values are memoized; ``at`` must be deterministic in ``n``.
    """

    def __init__(self, at: Callable[[int], Effect], indices: Iterable[int], description: str = ""):
        self._at = at
        self.indices = list(indices)
        if not self.indices or any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError("indices must be a nonempty increasing sequence")
        self.description = description
        self._cache: dict[int, Effect] = {}

    @classmethod
    def constant(cls, effect: Effect, indices: Iterable[int], description: str = "constant") -> "IndexedEffectFamily":
        return cls(lambda n: effect, indices, description)

    def at(self, n: int) -> Effect:
        e = self._cache.get(n)
        if e is None:
            e = self._cache[n] = self._at(n)
        return e

    def dim_at(self, n: int) -> int:
        return self.at(n).dim

    def map(self, f: Callable[[Effect], Effect], description: str = "") -> "IndexedEffectFamily":
        return IndexedEffectFamily(lambda n: f(self.at(n)), self.indices, description or self.description)

    @property
    def n0(self) -> int:
        return self.indices[0]

    @property
    def n_max(self) -> int:
        return self.indices[-1]

    def __iter__(self):
        return ((n, self.at(n)) for n in self.indices)

    def __len__(self) -> int:
        return len(self.indices)


@dataclass
class ProbeSet:
    """Unit probe vectors; padded with zeros (never renormalized) to larger
    dims, truncated to smaller ones and renormalized only if ``renormalize``."""

    vectors: list
    renormalize: bool = False
    labels: Optional[list] = None

    def __post_init__(self):
        if not self.vectors:
            raise ValueError("empty probe set")
        vs = []
        for v in self.vectors:
            v = np.asarray(v, dtype=np.complex128).ravel()
            if abs(np.linalg.norm(v) - 1) > 1e-12:
                raise ValueError(f"probe has norm {np.linalg.norm(v)!r}")
            vs.append(v)
        self.vectors = vs
        if self.labels is None:
            self.labels = [f"probe_{k}" for k in range(len(vs))]

    @classmethod
    def of(cls, vectors, labels=None, renormalize=False) -> "ProbeSet":
        vs = [np.asarray(v, dtype=np.complex128) / np.linalg.norm(v) for v in vectors]
        return cls(vs, renormalize, labels)

    @classmethod
    def basis(cls, dim: int, count: Optional[int] = None) -> "ProbeSet":
        count = dim if count is None else count
        return cls(list(np.eye(dim)[:count]), labels=[f"e{k + 1}" for k in range(count)])

    @classmethod
    def standard(cls, dim: int, rng: np.random.Generator, n_random: int = 4) -> "ProbeSet":
        """Basis vectors, normalized neighbour sums ``e_k + i e_{k+1}``, and random unit vectors."""
        eye = np.eye(dim)
        vs = list(eye)
        labels = [f"e{k + 1}" for k in range(dim)]
        for k in range(dim - 1):
            vs.append((eye[k] + 1j * eye[k + 1]) / np.sqrt(2))
            labels.append(f"e{k + 1}+ie{k + 2}")
        for k in range(n_random):
            z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
            vs.append(z / np.linalg.norm(z))
            labels.append(f"rand{k}")
        return cls(vs, labels=labels)

    def for_dim(self, dim: int) -> list[np.ndarray]:
        out = []
        for v in self.vectors:
            if v.size >= dim:
                w = v[:dim].copy()
                if self.renormalize and v.size > dim:
                    nrm = np.linalg.norm(w)
                    if nrm > 0:
                        w /= nrm
            else:
                w = np.concatenate([v, np.zeros(dim - v.size, dtype=np.complex128)])
            out.append(w)
        return out

    def __len__(self) -> int:
        return len(self.vectors)


@dataclass
class ConvergenceReport:
    mode: Mode
    verdict: Verdict
    indices: list
    residuals: dict  # series id -> np.ndarray aligned with indices
    tol: float
    witness: Optional[dict] = None
    notes: dict = field(default_factory=dict)

    @property
    def converges(self) -> bool:
        return self.verdict is Verdict.CONVERGES

    @property
    def fails(self) -> bool:
        return self.verdict is Verdict.FAILS

    def trace(self, series: str = "max") -> list[tuple[int, float]]:
        return [(n, float(r)) for n, r in zip(self.indices, self.residuals[series])]

    def to_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "verdict": self.verdict.value,
            "tol": self.tol,
            "witness": self.witness,
            "notes": self.notes,
            "traces": {k: self.trace(k) for k in sorted(self.residuals)},
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "probe_id", "residual"])
        for k in sorted(self.residuals):
            for n, r in self.trace(k):
                w.writerow([n, k, repr(r)])
        return buf.getvalue()


def decide(residuals, tol: float) -> tuple[Verdict, Optional[dict]]:
    """Apply the finite-trace decision rule to a residual trace."""
    r = np.asarray(residuals, dtype=float)
    w = max(1, math.ceil(WINDOW_FRACTION * r.size))
    if r.size >= 2:
        w = max(w, 2)
    window = r[-w:]
    steps = np.diff(window)
    if r[-1] <= tol and np.all(steps <= JITTER * tol):
        return Verdict.CONVERGES, None
    gap = float(window.min())
    if gap > JITTER * tol and window[-1] >= window[0] - JITTER * tol:
        k = r.size - w + int(np.argmin(window))
        return Verdict.FAILS, {"gap": gap, "position": k}
    return Verdict.INCONCLUSIVE, None


def _embed(m: np.ndarray, dim: int) -> np.ndarray:
    if m.shape[0] == dim:
        return m
    out = np.zeros((dim, dim), dtype=np.complex128)
    out[: m.shape[0], : m.shape[0]] = m
    return out


def _difference(F: IndexedEffectFamily, n: int, L: Effect) -> np.ndarray:
    a = F.at(n)
    if a.dim < L.dim:
        raise DimensionError(f"family dim {a.dim} at n={n} below limit dim {L.dim}")
    return a.matrix - _embed(L.matrix, a.dim)


def _report(mode, F, per_series: dict, tol, probes: Optional[ProbeSet] = None) -> ConvergenceReport:
    series = {k: np.asarray(v, dtype=float) for k, v in per_series.items()}
    if "max" not in series:
        series["max"] = np.max(np.vstack(list(series.values())), axis=0)
    verdict, wit = decide(series["max"], tol)
    if wit is not None:
        pos = wit.pop("position")
        n = F.indices[pos]
        wit["index"] = n
        if probes is not None:
            k = int(np.argmax([series[lab][pos] for lab in probes.labels]))
            wit["probe"] = probes.labels[k]
            wit["probe_vector"] = probes.vectors[k]
    return ConvergenceReport(mode, verdict, list(F.indices), series, tol, wit)


def norm_convergence(F: IndexedEffectFamily, L: Effect, tol: float = DEFAULT_TOL) -> ConvergenceReport:
    r = [operator_norm(_difference(F, n, L)) for n in F.indices]
    return _report(Mode.NORM, F, {"max": r}, tol)


def _per_probe(F, L, probes: ProbeSet, metric) -> dict:
    out = {lab: [] for lab in probes.labels}
    for n in F.indices:
        d = _difference(F, n, L)
        for lab, x in zip(probes.labels, probes.for_dim(d.shape[0])):
            out[lab].append(metric(d, x))
    return out


def sot_convergence(F, L, probes: ProbeSet, tol: float = DEFAULT_TOL) -> ConvergenceReport:
    """Residual ``max_x ||(F(n) - L) x||`` over the probes."""
    per = _per_probe(F, L, probes, lambda d, x: float(np.linalg.norm(d @ x)))
    return _report(Mode.SOT, F, per, tol, probes)


def wot_convergence(F, L, probes: ProbeSet, tol: float = DEFAULT_TOL) -> ConvergenceReport:
    """Residual ``max_x |<(F(n) - L) x, x>|``; polarization makes diagonal
    probes sufficient."""
    per = _per_probe(F, L, probes, lambda d, x: abs(quad_form(d, x)))
    return _report(Mode.WOT, F, per, tol, probes)


@dataclass(frozen=True)
class MonotoneLimit:
    limit: Effect
    error: float
    index: int


def _check_monotone(F: IndexedEffectFamily, direction: str, tol: float) -> None:
    if direction not in ("up", "down"):
        raise ValueError(f"direction must be 'up' or 'down', not {direction!r}")
    for a, b in zip(F.indices, F.indices[1:]):
        lo, hi = (F.at(a), F.at(b)) if direction == "up" else (F.at(b), F.at(a))
        margin = lambda_min(hi.matrix - lo.matrix)
        if margin < -tol:
            raise MonotonicityError(
                f"family not monotone {direction} between n={a} and n={b} (margin {margin:.3e})",
                pair=(a, b),
                margin=margin,
            )


def monotone_sup(
    F: IndexedEffectFamily,
    direction: str = "up",
    probes: Optional[ProbeSet] = None,
    tol: float = DEFAULT_TOL,
    tail_fraction: float = 0.5,
) -> MonotoneLimit:
    """Approximate the supremum (``up``) or infimum (``down``) of a monotone family.

    Returns ``F(N)`` together with an error estimate: the largest quad-form
    increment over the probes across the trailing ``tail_fraction`` of the
    schedule.  Raises :class:`MonotonicityError` on the first offending pair.
    """
    _check_monotone(F, direction, tol)
    last = F.at(F.n_max)
    probes = probes or ProbeSet.basis(last.dim)
    sign = 1.0 if direction == "up" else -1.0
    qs = np.array([[quad_form(F.at(n).matrix, x).real for x in probes.for_dim(F.dim_at(n))] for n in F.indices])
    steps = sign * np.diff(qs, axis=0)
    if steps.size and steps.min() < -tol:
        k = int(np.argmin(steps.min(axis=1)))
        raise MonotonicityError(
            f"quad form not monotone {direction} between n={F.indices[k]} and n={F.indices[k + 1]}",
            pair=(F.indices[k], F.indices[k + 1]),
            margin=float(steps.min()),
        )
    start = (len(F) - 1) - int(tail_fraction * (len(F) - 1))
    start = min(start, len(F) - 1)
    err = float(np.max(np.abs(qs[-1] - qs[start]))) if len(F) > 1 else 0.0
    return MonotoneLimit(last, err, F.n_max)


@dataclass
class WitnessNets:
    lower: IndexedEffectFamily
    upper: IndexedEffectFamily


def order_convergence_witness_check(
    F: IndexedEffectFamily,
    L: Effect,
    W: WitnessNets,
    probes: ProbeSet,
    tol: float = DEFAULT_TOL,
) -> ConvergenceReport:
    """Check ``C_n <= F(n) <= D_n`` with ``C_n`` increasing and ``D_n``
    decreasing, both approaching ``L`` on the probes.

    Any failed clause gives ``FailsToConverge`` with the clause and index.
    """
    if not (F.indices == W.lower.indices == W.upper.indices):
        raise DimensionError("family and witness nets must share an index schedule")
    per = {"lower_gap": [], "upper_gap": []}
    for n in F.indices:
        vs = probes.for_dim(F.dim_at(n))
        lo = W.lower.at(n).matrix - _embed(L.matrix, F.dim_at(n))
        hi = W.upper.at(n).matrix - _embed(L.matrix, F.dim_at(n))
        per["lower_gap"].append(max(abs(quad_form(lo, x)) for x in vs))
        per["upper_gap"].append(max(abs(quad_form(hi, x)) for x in vs))
    series = {k: np.asarray(v) for k, v in per.items()}
    series["max"] = np.maximum(series["lower_gap"], series["upper_gap"])

    def fail(clause, **info):
        return ConvergenceReport(Mode.ORDER_WITNESS, Verdict.FAILS, list(F.indices), series, tol, {"clause": clause, **info})

    for direction, fam in (("up", W.lower), ("down", W.upper)):
        try:
            _check_monotone(fam, direction, tol)
        except MonotonicityError as e:
            return fail("i", net="lower" if direction == "up" else "upper", index=e.pair[0], margin=e.margin)

    for n in F.indices:
        f = F.at(n).matrix
        lo = loewner_compare(W.lower.at(n).matrix, f, tol)
        if not lo.le:
            return fail("ii", side="lower", index=n, margin=lo.margin)
        hi = loewner_compare(f, W.upper.at(n).matrix, tol)
        if not hi.le:
            return fail("ii", side="upper", index=n, margin=hi.margin)

    sup = monotone_sup(W.lower, "up", probes, tol)
    inf = monotone_sup(W.upper, "down", probes, tol)
    d = sup.limit.dim
    for name, lim in (("lower", sup), ("upper", inf)):
        diff = lim.limit.matrix - _embed(L.matrix, d)
        gap = max(abs(quad_form(diff, x)) for x in probes.for_dim(d))
        if gap > tol:
            return fail("iii", net=name, gap=float(gap), index=lim.index)
    rep = ConvergenceReport(Mode.ORDER_WITNESS, Verdict.CONVERGES, list(F.indices), series, tol)
    rep.notes = {"sup_error": sup.error, "inf_error": inf.error}
    return rep


def interval_criterion_check(
    F: IndexedEffectFamily,
    L: Effect,
    bounds: Sequence[Effect] = (),
    tol: float = DEFAULT_TOL,
    tail_fraction: float = 0.5,
    include_defaults: bool = True,
) -> ConvergenceReport:
    """Refutation test for interval-topology convergence against a finite bound set.

    For each bound ``r`` and direction: if every ``F(n)`` in the trailing
    ``tail_fraction`` of the schedule is ``>= r`` (resp. ``<= r``) then ``L``
    must be too.  A violation yields ``FailsToConverge`` naming ``r``;
    otherwise the verdict is ``Converges`` relative to the recorded bounds.
    """
    if not 0 < tail_fraction <= 1:
        raise ValueError("tail_fraction must lie in (0, 1]")
    d = L.dim
    named = [(f"bound_{k}", b) for k, b in enumerate(bounds)]
    if include_defaults:
        named += [
            ("zero", Effect.zero(d)),
            ("identity", Effect.identity(d)),
            ("limit", L),
            ("first", F.at(F.n0)),
            ("last", F.at(F.n_max)),
        ]
    if not named:
        raise ValueError("no bounds to check")
    for name, b in named:
        if b.dim != d:
            raise DimensionError(f"bound {name} has dim {b.dim}, limit has dim {d}")
    k0 = len(F) - max(1, math.ceil(tail_fraction * len(F)))
    tail = F.indices[k0:]

    series = {}
    witness = None
    for name, b in named:
        # signed margins of F(n) >= b and F(n) <= b over the tail
        ge = np.array([lambda_min(F.at(n).matrix - b.matrix) for n in tail])
        le = np.array([lambda_min(b.matrix - F.at(n).matrix) for n in tail])
        series[f"{name}:ge"] = ge
        series[f"{name}:le"] = le
        if witness is not None:
            continue
        v = loewner_compare(L.matrix, b.matrix, tol)
        if np.all(ge >= -tol) and not v.ge:
            witness = {"bound": name, "bound_matrix": b.matrix, "direction": "ge", "limit_margin": v.margin}
        elif np.all(le >= -tol) and not v.le:
            witness = {"bound": name, "bound_matrix": b.matrix, "direction": "le", "limit_margin": v.margin}
    verdict = Verdict.FAILS if witness else Verdict.CONVERGES
    rep = ConvergenceReport(Mode.INTERVAL, verdict, list(tail), series, tol, witness)
    rep.notes = {"bounds": [name for name, _ in named]}
    return rep


@dataclass
class ShiftCheck:
    lambdas: list
    margins: list
    companion_margins: list
    tol: float

    @property
    def ok(self) -> bool:
        return all(m >= -self.tol for m in self.margins + self.companion_margins)


def sqrt_shift_inequality_check(
    A: Effect,
    lambdas: Sequence[float],
    pairs: Sequence[tuple[Effect, Effect]] = (),
    tol: float = 1e-10,
) -> ShiftCheck:
    """Check ``(lam I + A)^(1/2) <= sqrt(lam) I + A^(1/2)`` for every ``lam``,
    and ``||X^(1/2) Y + Y X^(1/2)|| <= 2`` for every supplied pair ``(X, Y)``.

    Margins are least eigenvalues of the slack (resp. ``2 - norm``).
    """
    eye = np.eye(A.dim)
    margins = []
    for lam in lambdas:
        if lam <= 0:
            raise ValueError("lambdas must be positive")
        lhs = psd_sqrt(lam * eye + A.matrix)
        rhs = np.sqrt(lam) * eye + A.sqrt
        margins.append(lambda_min(rhs - lhs))
    companion = []
    for X, Y in pairs:
        s = X.sqrt @ Y.matrix
        companion.append(2.0 - operator_norm(s + s.conj().T))
    return ShiftCheck(list(lambdas), margins, companion, tol)
