"""Self-checking reconstructions of the continuity results and counterexamples.

Every scenario is a pure function of its parameters (and seed) returning a
:class:`ScenarioResult`: a list of claims with expected and observed verdicts,
residual traces, and for the audits a list of findings.
"""

from __future__ import annotations

import inspect
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np

from .effects import Effect, haar_unitary, interferes, random_effect, seq_product
from .matcore import (
    Order,
    lambda_min,
    loewner_compare,
    operator_norm,
    psd_sqrt,
    quad_form,
)
from .topologies import (
    DEFAULT_TOL,
    IndexedEffectFamily,
    MonotonicityError,
    ProbeSet,
    Verdict,
    WitnessNets,
    decide,
    dense_indices,
    extended_indices,
    interval_criterion_check,
    monotone_sup,
    norm_convergence,
    order_convergence_witness_check,
    sot_convergence,
    sqrt_shift_inequality_check,
    wot_convergence,
)

HOLDS = "Holds"
VIOLATED = "Violated"
CONFIRMED = "ConfirmedNumerically"
REFUTED = "RefutedNumerically"
NOT_CHECKABLE = "NotDeskCheckable"

DEFAULT_HORIZON = 10**8
DEFAULT_LAMBDAS = tuple(10.0**-k for k in range(13))


class ScenarioParamError(ValueError):
    pass


@dataclass
class Claim:
    claim_id: str
    expected: str
    observed: str
    witness: Any = None

    @property
    def matched(self) -> bool:
        return self.expected == self.observed


@dataclass
class AuditFinding:
    claim: str
    status: str
    evidence: dict = field(default_factory=dict)


@dataclass
class ScenarioResult:
    scenario: str
    params: dict
    claims: list = field(default_factory=list)
    traces: dict = field(default_factory=dict)
    findings: list = field(default_factory=list)

    def claim(self, claim_id, expected, observed, witness=None) -> Claim:
        c = Claim(claim_id, expected, observed if isinstance(observed, str) else observed.value, witness)
        self.claims.append(c)
        return c

    def holds(self, claim_id, ok: bool, witness=None) -> Claim:
        return self.claim(claim_id, HOLDS, HOLDS if ok else VIOLATED, witness)

    def __getitem__(self, claim_id) -> Claim:
        for c in self.claims:
            if c.claim_id == claim_id:
                return c
        raise KeyError(claim_id)

    @property
    def status(self) -> str:
        bad = [c for c in self.claims if not c.matched]
        if not bad:
            return "pass"
        if any(c.observed == Verdict.INCONCLUSIVE.value for c in bad):
            return "inconclusive"
        return "fail"

    @property
    def passed(self) -> bool:
        return self.status == "pass"


# -- norm topology: joint continuity ---------------------------------------

def telescoping_bound(An: Effect, A: Effect, Bn: Effect, B: Effect) -> tuple[float, float]:
    """``(||An o Bn - A o B||, 2 ||An^(1/2) - A^(1/2)|| + ||Bn - B||)``."""
    lhs = operator_norm(seq_product(An, Bn).matrix - seq_product(A, B).matrix)
    rhs = 2 * operator_norm(An.sqrt - A.sqrt) + operator_norm(Bn.matrix - B.matrix)
    return lhs, rhs


def _toward(limit: Effect, start: Effect) -> Callable[[int], Effect]:
    return lambda n: Effect((1 - 1 / n) * limit.matrix + (1 / n) * start.matrix)


def scenario_norm_joint(dim=4, n_max=200, seed=42, tol=DEFAULT_TOL, horizon=DEFAULT_HORIZON, bound_tol=1e-9):
    if dim < 2:
        raise ScenarioParamError("norm_joint needs dim >= 2")
    rng = np.random.default_rng(seed)
    A, B, RA, RB = (random_effect(dim, rng) for _ in range(4))
    idx = extended_indices(1, n_max, horizon)
    An = IndexedEffectFamily(_toward(A, RA), idx, "A_n -> A")
    Bn = IndexedEffectFamily(_toward(B, RB), idx, "B_n -> B")
    res = ScenarioResult("norm_joint", dict(dim=dim, n_max=n_max, seed=seed, tol=tol, horizon=horizon))

    lhs, rhs = [], []
    for n in idx:
        l, r = telescoping_bound(An.at(n), A, Bn.at(n), B)
        lhs.append(l)
        rhs.append(r)
    slack = np.asarray(rhs) + bound_tol - np.asarray(lhs)
    worst = int(np.argmin(slack))
    res.holds("telescoping_bound", bool(slack.min() >= 0), {"index": idx[worst], "slack": float(slack[worst] - bound_tol)})
    res.traces["product_residual"] = list(zip(idx, lhs))
    res.traces["telescoping_rhs"] = list(zip(idx, rhs))

    roots = IndexedEffectFamily(lambda n: Effect(An.at(n).sqrt), idx)
    rep = norm_convergence(roots, Effect(A.sqrt), tol)
    res.claim("sqrt_norm_convergence", Verdict.CONVERGES.value, rep.verdict)
    prod = IndexedEffectFamily(lambda n: seq_product(An.at(n), Bn.at(n)), idx)
    rep = norm_convergence(prod, seq_product(A, B), tol)
    res.claim("product_norm_convergence", Verdict.CONVERGES.value, rep.verdict, rep.witness)
    return res


# -- weak operator topology ------------------------------------------------

def pn_projection(n: int, dim: int) -> Effect:
    """Rank-one projection onto ``(e_1 + e_{n+1}) / sqrt(2)``."""
    v = np.zeros(dim)
    v[0] = v[n] = 1 / np.sqrt(2)
    return Effect(np.outer(v, v))


def scenario_wot_first_fails(dim=12, n_max=10, tol=DEFAULT_TOL, seed=42):
    if n_max < 3:
        raise ScenarioParamError("wot_first_fails needs n_max >= 3")
    if dim < n_max + 2:
        raise ScenarioParamError(f"wot_first_fails needs dim >= n_max + 2 (got dim={dim}, n_max={n_max})")
    res = ScenarioResult("wot_first_fails", dict(dim=dim, n_max=n_max, tol=tol))
    e = np.eye(dim)
    idx = dense_indices(2, n_max)
    P = IndexedEffectFamily(lambda n: pn_projection(n, dim), idx, "P_n")
    P0 = Effect(0.5 * np.outer(e[0], e[0]))
    B = Effect(0.5 * np.outer(e[0] + e[1], e[0] + e[1]))
    PB = P.map(lambda p: seq_product(p, B), "P_n o B")

    # probes supported below every index of the trailing window
    w = max(2, math.ceil(0.2 * len(idx)))
    support = min(6, idx[-w])
    probes = ProbeSet.basis(dim, support)
    probes.vectors.append((e[0] + e[1]) / np.sqrt(2))
    probes.labels.append("(e1+e2)/sqrt2")

    r1 = wot_convergence(P, P0, probes, tol)
    res.claim("wot_Pn_to_P0", "Converges", r1.verdict)
    r2 = wot_convergence(PB, P0.scaled(0.25), probes, tol)
    res.claim("wot_PnB_to_quarter_P0", "Converges", r2.verdict)
    P0B = seq_product(P0, B)
    r3 = wot_convergence(PB, P0B, probes, tol)
    res.claim("wot_PnB_to_P0B", "FailsToConverge", r3.verdict, r3.witness)
    gap = r3.witness["gap"] if r3.witness else float("nan")
    res.holds(
        "gap_is_one_eighth_at_e1",
        bool(r3.witness and r3.witness["probe"] == "e1" and abs(gap - 0.125) <= 1e-12),
        {"gap": gap},
    )
    res.holds("P0B_is_half_P0", operator_norm(P0B.matrix - 0.5 * P0.matrix) <= 1e-12)

    rng = np.random.default_rng(seed)
    law = 0.0
    tests = list(probes.vectors) + [z / np.linalg.norm(z) for z in rng.standard_normal((4, dim)) + 1j * rng.standard_normal((4, dim))]
    for n in idx:
        for x in tests:
            law = max(law, abs(quad_form(PB.at(n).matrix, x).real - abs(x[0] + x[n]) ** 2 / 8))
    res.holds("quad_form_law", law <= 1e-12, {"max_error": law})

    res.claim("norm_Pn_to_P0", "FailsToConverge", norm_convergence(P, P0, tol).verdict)
    r4 = sot_convergence(P, P0, probes, tol)
    res.claim("sot_Pn_to_P0", "FailsToConverge", r4.verdict, r4.witness)
    res.holds("Pn_B_interfere", all(interferes(P.at(n), B) for n in idx))
    res.traces["wot_PnB_vs_P0B"] = r3.trace()
    res.traces["wot_PnB_vs_quarter_P0"] = r2.trace()
    return res


def scenario_wot_second(dim=4, n_max=200, seed=42, tol=DEFAULT_TOL, horizon=DEFAULT_HORIZON):
    if dim < 2:
        raise ScenarioParamError("wot_second needs dim >= 2")
    rng = np.random.default_rng(seed)
    A, B, R = (random_effect(dim, rng) for _ in range(3))
    probes = ProbeSet.standard(dim, rng)
    idx = extended_indices(1, n_max, horizon)
    Bn = IndexedEffectFamily(_toward(B, R), idx, "B_n -> B")
    ABn = Bn.map(lambda b: seq_product(A, b), "A o B_n")
    res = ScenarioResult("wot_second", dict(dim=dim, n_max=n_max, seed=seed, tol=tol, horizon=horizon))
    res.claim("wot_Bn_to_B", "Converges", wot_convergence(Bn, B, probes, tol).verdict)
    rep = wot_convergence(ABn, seq_product(A, B), probes, tol)
    res.claim("wot_ABn_to_AB", "Converges", rep.verdict)
    res.claim("norm_ABn_to_AB", "Converges", norm_convergence(ABn, seq_product(A, B), tol).verdict)
    res.claim("sot_ABn_to_AB", "Converges", sot_convergence(ABn, seq_product(A, B), probes, tol).verdict)
    res.traces["wot_ABn_vs_AB"] = rep.trace()
    return res


# -- order convergence -----------------------------------------------------

def scenario_order_second(dim=4, n_max=200, seed=42, tol=DEFAULT_TOL, horizon=DEFAULT_HORIZON):
    """``C_n = (1-1/n) B`` increases to ``B``, ``D_n = C_n + I/n`` decreases to
    it, and ``B_n = C_n + S/n`` for a random effect ``S`` sits in between."""
    if dim < 2:
        raise ScenarioParamError("order_second needs dim >= 2")
    rng = np.random.default_rng(seed)
    A, B, S = (random_effect(dim, rng) for _ in range(3))
    probes = ProbeSet.standard(dim, rng)
    idx = extended_indices(1, n_max, horizon)
    eye = np.eye(dim)
    C = IndexedEffectFamily(lambda n: Effect((1 - 1 / n) * B.matrix), idx, "C_n")
    D = IndexedEffectFamily(lambda n: Effect((1 - 1 / n) * B.matrix + eye / n), idx, "D_n")
    Bn = IndexedEffectFamily(lambda n: Effect((1 - 1 / n) * B.matrix + S.matrix / n), idx, "B_n")
    res = ScenarioResult("order_second", dict(dim=dim, n_max=n_max, seed=seed, tol=tol, horizon=horizon))

    rep = order_convergence_witness_check(Bn, B, WitnessNets(C, D), probes, tol)
    res.claim("order_Bn_to_B", "Converges", rep.verdict, rep.witness)
    left = lambda fam: fam.map(lambda x: seq_product(A, x))
    AB = seq_product(A, B)
    rep = order_convergence_witness_check(left(Bn), AB, WitnessNets(left(C), left(D)), probes, tol)
    res.claim("order_ABn_to_AB", "Converges", rep.verdict, rep.witness)
    sot = sot_convergence(left(Bn), AB, probes, tol)
    res.claim("sot_ABn_to_AB", "Converges", sot.verdict)
    res.traces["order_ABn_gap"] = rep.trace()
    return res


@dataclass(frozen=True)
class QuadraticWitness:
    """Closed forms of the 2x2 first-variable counterexample at index ``n``
    for the candidate lower witness ``diag(a, 0)``.

    ``p = 1 - 1/n - sqrt(1 - 2/n)`` and ``q = 1 - 1/n + sqrt(1 - 2/n)``, so that
    ``p q = 1/n^2``.  ``f(t) = -p t^2 + (2/n) t + 2a - q``.
    """

    n: float
    a: float
    stable: bool = True

    @property
    def s(self) -> float:
        return math.sqrt(1 - 2 / self.n)

    @property
    def p(self) -> float:
        n = self.n
        if self.stable:
            return (1 / n**2) / ((1 - 1 / n) + self.s)
        return 1 - 1 / n - self.s

    @property
    def q(self) -> float:
        return 1 - 1 / self.n + self.s

    @property
    def f_coeffs(self) -> tuple[float, float, float]:
        return (-self.p, 2 / self.n, 2 * self.a - self.q)

    def f(self, t: float) -> float:
        c2, c1, c0 = self.f_coeffs
        return c2 * t * t + c1 * t + c0

    @property
    def delta(self) -> float:
        return 8 * self.a * self.p

    @property
    def delta_direct(self) -> float:
        c2, c1, c0 = self.f_coeffs
        return c1 * c1 - 4 * c2 * c0

    @property
    def vertex(self) -> float:
        return (1 / self.n) / self.p

    def sqrt_closed(self) -> np.ndarray:
        s = self.s
        return 0.5 * np.array([[s + 1, s - 1], [s - 1, s + 1]])

    def product_closed(self) -> np.ndarray:
        return 0.5 * np.array([[self.q, -1 / self.n], [-1 / self.n, self.p]])

    def margin(self, x) -> float:
        """``<(diag(a, 0) - A_n o B) x, x>`` from the closed form."""
        x1, x2 = float(x[0]), float(x[1])
        return 0.5 * (x1 * x1 * (2 * self.a - self.q) - self.p * x2 * x2 + (2 / self.n) * x1 * x2)


def counterexample_An(n: int) -> Effect:
    return Effect(np.eye(2) - np.ones((2, 2)) / n)


COUNTEREXAMPLE_B = np.array([[1.0, 0.0], [0.0, 0.0]])


def find_violating_probe(n: float, a: float) -> np.ndarray:
    """Unit vector ``x`` along ``(1, t*)``, ``t*`` the vertex of ``f``.

    At this probe ``<(diag(a, 0) - A_n o B) x, x> = a / (1 + t*^2) > 0``.
    """
    if n < 3:
        raise ValueError("need n >= 3")
    if a <= 0:
        raise ValueError("a = 0 admits no violating probe: 0 <= A_n o B")
    t = QuadraticWitness(n, a).vertex
    x = np.array([1.0, t])
    return x / np.linalg.norm(x)


def a_grid(n: int) -> tuple[float, ...]:
    return (0.1, 0.5, 0.9, 1 - 1 / n)


def scenario_order_first_fails(n_max=200, tol=DEFAULT_TOL, order_tol=1e-14):
    if n_max < 3:
        raise ScenarioParamError("order_first_fails needs n_max >= 3")
    res = ScenarioResult("order_first_fails", dict(n_max=n_max, tol=tol))
    B = Effect(COUNTEREXAMPLE_B)
    idx = dense_indices(3, n_max)
    An = IndexedEffectFamily(counterexample_An, idx, "A_n = I - J/n")
    AnB = An.map(lambda a: seq_product(a, B), "A_n o B")

    sqrt_err, prod_err, delta_err, margins = [], [], [], []
    tags = set()
    bad_probe = None
    for n in idx:
        w = QuadraticWitness(n, 1.0)
        sqrt_err.append(float(np.max(np.abs(psd_sqrt(An.at(n).matrix) - w.sqrt_closed()))))
        M = AnB.at(n).matrix
        prod_err.append(float(np.max(np.abs(M - w.product_closed()))))
        worst = 0.0
        for a in a_grid(n):
            qw = QuadraticWitness(n, a)
            worst = max(worst, abs(qw.delta_direct - qw.delta) / qw.delta)
            x = find_violating_probe(n, a)
            m = quad_form(np.diag([a, 0.0]) - M, x).real
            margins.append(m)
            if m <= 0 and bad_probe is None:
                bad_probe = {"n": n, "a": a, "margin": m}
            tags.add(loewner_compare(np.diag([a, 0.0]), M, order_tol).tag)
        delta_err.append(worst)

    res.holds("closed_form_sqrt", max(sqrt_err) <= 1e-12, {"max_error": max(sqrt_err)})
    res.holds("closed_form_product", max(prod_err) <= 1e-12, {"max_error": max(prod_err)})
    res.holds("discriminant_identity", max(delta_err) <= 1e-10, {"max_rel_error": max(delta_err)})
    res.holds("violating_probe_positive", bad_probe is None, bad_probe or {"min_margin": min(margins)})
    res.holds("candidate_not_below", Order.LESS_EQ not in tags and Order.EQUAL not in tags, sorted(t.value for t in tags))
    res.holds(
        "zero_candidate_is_below",
        all(loewner_compare(np.zeros((2, 2)), AnB.at(n).matrix, order_tol).le for n in idx),
    )
    try:
        sup = monotone_sup(An, "up", ProbeSet.basis(2), tol)
        res.holds("An_increases_to_I", operator_norm(sup.limit.matrix - np.eye(2)) <= 2 / n_max + 1e-12, {"error_estimate": sup.error})
    except MonotonicityError as e:
        res.holds("An_increases_to_I", False, {"pair": e.pair, "margin": e.margin})

    # the forced lower witness diag(a_n, 0) with a_n = 1 - 1/n increasing to 1,
    # paired with a genuine upper witness diag(1, 1/n) decreasing to B
    C = IndexedEffectFamily(lambda n: Effect(np.diag([1 - 1 / n, 0.0])), idx)
    D = IndexedEffectFamily(lambda n: Effect(np.diag([1.0, 1 / n])), idx)
    rep = order_convergence_witness_check(AnB, B, WitnessNets(C, D), ProbeSet.basis(2), tol)
    res.claim("order_AnB_to_B", "FailsToConverge", rep.verdict, rep.witness)
    res.holds("failure_is_lower_sandwich", bool(rep.witness and rep.witness.get("clause") == "ii" and rep.witness.get("side") == "lower"))

    res.traces["sqrt_closed_form_error"] = list(zip(idx, sqrt_err))
    res.traces["discriminant_rel_error"] = list(zip(idx, delta_err))
    res.traces["violation_margin_a_1_minus_1_over_n"] = [(n, margins[4 * k + 3]) for k, n in enumerate(idx)]
    return res


def scenario_tau_o_first_fails(n_max=200, tol=DEFAULT_TOL, horizon=DEFAULT_HORIZON):
    base = scenario_order_first_fails(n_max=n_max, tol=tol)
    res = ScenarioResult("tau_o_first_fails", dict(n_max=n_max, tol=tol, horizon=horizon))
    for c in base.claims:
        res.claims.append(Claim("order." + c.claim_id, c.expected, c.observed, c.witness))
    res.traces.update({"order." + k: v for k, v in base.traces.items()})

    B = Effect(COUNTEREXAMPLE_B)
    idx = extended_indices(3, n_max, horizon)
    AnB = IndexedEffectFamily(lambda n: seq_product(counterexample_An(n), B), idx)
    probes = ProbeSet.of(
        [[1, 0], [0, 1], [1, 1], [1, 1j]],
        labels=["(1,0)", "(0,1)", "(1,1)/sqrt2", "(1,i)/sqrt2"],
    )
    rep = wot_convergence(AnB, B, probes, tol)
    res.claim("wot_AnB_to_B", "Converges", rep.verdict)
    res.traces["wot_AnB_vs_B"] = rep.trace()
    res.findings.append(
        AuditFinding(
            "the image set {A_n o B} is closed in the order topology",
            NOT_CHECKABLE,
            {"reason": "closedness quantifies over all order-convergent nets in the set"},
        )
    )
    res.claim("order_topology_closedness", NOT_CHECKABLE, NOT_CHECKABLE)
    return res


# -- interval topology -----------------------------------------------------

def scenario_tau_i_second(dim=4, seed=42, lambdas=DEFAULT_LAMBDAS, tol=DEFAULT_TOL, margin_tol=1e-8):
    if dim < 2:
        raise ScenarioParamError("tau_i_second needs dim >= 2")
    lambdas = sorted(lambdas, reverse=True)
    if not lambdas or min(lambdas) <= 0:
        raise ScenarioParamError("lambdas must be positive")
    rng = np.random.default_rng(seed)
    A, B, S1, S2 = (random_effect(dim, rng) for _ in range(4))
    eye = np.eye(dim)
    X = seq_product(A, B)
    C1 = seq_product(X, S1)  # <= X
    Y = Effect(eye - X.matrix)
    C2 = Effect(X.matrix + seq_product(Y, S2).matrix)  # >= X
    res = ScenarioResult("tau_i_second", dict(dim=dim, seed=seed, lambdas=list(lambdas), tol=tol))
    res.holds(
        "hypotheses",
        lambda_min(X.matrix - C1.matrix) >= -1e-12 and lambda_min(C2.matrix - X.matrix) >= -1e-12,
    )

    low, inv, up, up_cmp = [], [], [], []
    for lam in lambdas:
        S = psd_sqrt(lam * eye + A.matrix)
        SBS = S @ B.matrix @ S
        Sinv = np.linalg.inv(S)
        low.append(lambda_min(SBS - C1.matrix))
        inv.append(lambda_min(B.matrix - Sinv @ C1.matrix @ Sinv))
        up.append(lambda_min((lam + 2 * np.sqrt(lam)) * eye + C2.matrix - SBS))
        up_cmp.append(lambda_min(C2.matrix - SBS))
    shift = sqrt_shift_inequality_check(A, lambdas, [(A, B), (B, A)], tol=1e-10)

    res.holds("lower_chain", min(low) >= -margin_tol, {"min_margin": min(low)})
    res.holds("inverse_form", min(inv) >= -margin_tol, {"min_margin": min(inv)})
    res.holds("shift_inequality", min(shift.margins) >= -1e-10, {"min_margin": min(shift.margins)})
    res.holds("companion_bound", min(shift.companion_margins) >= -1e-10, {"min_margin": min(shift.companion_margins)})
    res.holds("upper_chain", min(up) >= -margin_tol, {"min_margin": min(up)})
    low0 = lambda_min(X.matrix - C1.matrix)
    up0 = lambda_min(C2.matrix - X.matrix)
    drift = max(abs(low[-1] - low0), abs(up_cmp[-1] - up0))
    res.holds("limit_recovers_comparisons", drift <= tol, {"drift": drift, "smallest_lambda": lambdas[-1]})

    # The congruence step (lam I + A)^(1/2) B (lam I + A)^(1/2)
    #   <= (sqrt(lam) I + A^(1/2)) B (sqrt(lam) I + A^(1/2))
    # does not follow from the operator inequality between the two roots.
    A0 = Effect(np.diag([0.0, 1.0]))
    B0 = Effect(np.full((2, 2), 0.5))
    S = psd_sqrt(np.eye(2) + A0.matrix)
    T = np.eye(2) + A0.sqrt
    m = lambda_min(T @ B0.matrix @ T - S @ B0.matrix @ S)
    status = REFUTED if m < -1e-12 else CONFIRMED
    res.findings.append(
        AuditFinding(
            "congruence by the smaller root is dominated by congruence by the larger root",
            status,
            {"A": A0.matrix, "B": B0.matrix, "lambda": 1.0, "margin": m},
        )
    )
    res.claim("congruence_step", REFUTED, status, {"margin": m})
    res.traces["lower_margin"] = list(zip(lambdas, low))
    res.traces["upper_margin"] = list(zip(lambdas, up))
    return res


def pairing_projection(m: int) -> np.ndarray:
    """Projection of rank ``m`` in dim ``2m`` onto span{(e_i + e_{i+m})/sqrt 2}."""
    half = 0.5 * np.eye(m)
    return np.block([[half, half], [half, half]])


def _common_range_dim(mats, dim: int) -> int:
    stack = []
    for E in mats:
        full = np.zeros((dim, dim))
        full[: E.shape[0], : E.shape[0]] = E
        stack.append(np.eye(dim) - full)
    sv = np.linalg.svd(np.vstack(stack), compute_uv=False)
    return int(np.sum(sv < 1e-10))


def scenario_tau_i_first_audit(m_max=200, tol=DEFAULT_TOL, tail_fraction=0.5, seed=42):
    if m_max < 2:
        raise ScenarioParamError("tau_i_first_audit needs m_max >= 2")
    rng = np.random.default_rng(seed)
    res = ScenarioResult("tau_i_first_audit", dict(m_max=m_max, tol=tol, tail_fraction=tail_fraction, seed=seed))

    # (i) projections approach I/2 weakly on fixed-support probes
    z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    probes = [np.array([1, 0]), np.array([1, 1]) / np.sqrt(2), np.array([1, 1j]) / np.sqrt(2), z / np.linalg.norm(z)]
    ms = dense_indices(2, m_max)
    dens = []
    for m in ms:
        E = pairing_projection(m)
        worst = 0.0
        for x in probes:
            xx = np.concatenate([x, np.zeros(2 * m - 2)])
            worst = max(worst, abs(quad_form(E, xx).real - 0.5))
        dens.append(worst)
    verdict, _ = decide(dens, tol)
    proj_err = max(float(np.max(np.abs(pairing_projection(m) @ pairing_projection(m) - pairing_projection(m)))) for m in (2, m_max))
    res.findings.append(
        AuditFinding(
            "projections are weak-operator dense in the positive unit ball (target I/2)",
            CONFIRMED if verdict is Verdict.CONVERGES and proj_err <= 1e-15 else REFUTED,
            {"max_residual": max(dens), "verdict": verdict.value, "idempotence_error": proj_err},
        )
    )
    res.traces["pairing_wot_residual"] = list(zip(ms, dens))

    # (ii) any projection family above a common projection B fixes B
    d0 = 6
    e1 = np.eye(d0)[0]
    Bp = Effect(np.outer(e1, e1))
    idx = dense_indices(1, m_max)

    def above_B(n):
        r = np.random.default_rng([seed, n])
        k = int(r.integers(1, d0))
        u = haar_unitary(d0 - 1, r)[:, :k]
        v = np.vstack([np.zeros((1, k)), u])
        return Effect(np.outer(e1, e1) + v @ v.conj().T)

    En = IndexedEffectFamily(above_B, idx, "E_n >= B")
    fix = max(operator_norm(seq_product(E, Bp).matrix - Bp.matrix) for _, E in En)
    res.findings.append(
        AuditFinding(
            "E_n o B = E_n B E_n = B whenever B <= E_n are projections",
            CONFIRMED if fix <= 1e-10 else REFUTED,
            {"max_error": fix},
        )
    )

    # (iii) B <= E_n is incompatible with E_n -> I/2 weakly
    half = Effect(0.5 * np.eye(d0))
    wrep = wot_convergence(En, half, ProbeSet.basis(d0, 1), tol)
    meet_dim = _common_range_dim([pairing_projection(m) for m in dense_indices(2, min(m_max, 24))], 2 * min(m_max, 24))
    refuted = wrep.fails and wrep.witness["probe"] == "e1" and abs(wrep.witness["gap"] - 0.5) <= 1e-12
    res.findings.append(
        AuditFinding(
            "a nonzero common lower projection B coexists with weak convergence to I/2",
            REFUTED if refuted else CONFIRMED,
            {
                "probe": e1,
                "quad_form_E_n": 1.0,
                "required_limit": 0.5,
                "gap": wrep.witness["gap"] if wrep.witness else None,
                "pairing_family_common_range_dim": meet_dim,
            },
        )
    )

    # (iv) the infinite-dimensional meet
    res.findings.append(
        AuditFinding(
            "the meet of the projections E_n is nonzero",
            NOT_CHECKABLE,
            {"reason": "infimum in the projection lattice of an infinite-dimensional space", "truncated_meet_dim": meet_dim},
        )
    )

    # interval criterion: E_n o B = B for all n, candidate limit B/2
    EB = En.map(lambda E: seq_product(E, Bp))
    irep = interval_criterion_check(EB, Bp.scaled(0.5), [Bp], tol, tail_fraction, include_defaults=False)
    res.claim("interval_EnB_to_half_B", "FailsToConverge", irep.verdict, irep.witness)
    res.holds("interval_witness_is_B", bool(irep.witness and irep.witness["bound"] == "bound_0" and irep.witness["direction"] == "ge"))
    expected = [CONFIRMED, CONFIRMED, REFUTED, NOT_CHECKABLE]
    for k, (f, want) in enumerate(zip(res.findings, expected), 1):
        res.claim(f"finding_{k}", want, f.status)
    return res


# -- registry --------------------------------------------------------------

@dataclass(frozen=True)
class Scenario:
    name: str
    func: Callable[..., ScenarioResult]
    description: str
    anchor: str
    aliases: tuple = ()

    def run(self, **params) -> ScenarioResult:
        sig = inspect.signature(self.func).parameters
        for new, old in self.aliases:
            if old in params and new not in params:
                params[new] = params[old]
        return self.func(**{k: v for k, v in params.items() if k in sig})


REGISTRY = {
    s.name: s
    for s in (
        Scenario("norm_joint", scenario_norm_joint,
                 "joint norm continuity with the telescoping bound on random families",
                 "norm topology, joint continuity theorem"),
        Scenario("wot_second", scenario_wot_second,
                 "second-variable continuity in the weak operator topology",
                 "weak operator topology, second-variable theorem"),
        Scenario("wot_first_fails", scenario_wot_first_fails,
                 "rank-one projections P_n -> P_0 weakly while P_n o B misses P_0 o B",
                 "weak operator topology, first-variable counterexample"),
        Scenario("order_second", scenario_order_second,
                 "second-variable continuity for order convergence via witness nets",
                 "order convergence, second-variable theorem"),
        Scenario("order_first_fails", scenario_order_first_fails,
                 "A_n = I - J/n increases to I but A_n o B is not order convergent to B",
                 "order convergence, 2x2 first-variable counterexample"),
        Scenario("tau_o_first_fails", scenario_tau_o_first_fails,
                 "order-topology failure: order-convergence core plus the weak limit step",
                 "order topology, first-variable counterexample"),
        Scenario("tau_i_second", scenario_tau_i_second,
                 "interval-topology second-variable proof inequalities on a lambda grid",
                 "interval topology, second-variable theorem"),
        Scenario("tau_i_first_audit", scenario_tau_i_first_audit,
                 "step-by-step audit of the interval-topology first-variable counterexample",
                 "interval topology, first-variable counterexample",
                 aliases=(("m_max", "n_max"),)),
    )
}


def run_scenario(name: str, **params) -> ScenarioResult:
    try:
        scenario = REGISTRY[name]
    except KeyError:
        raise ScenarioParamError(f"unknown scenario {name!r}") from None
    return scenario.run(**params)
