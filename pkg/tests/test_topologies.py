import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from effectseq.effects import Effect, random_effect, seq_product
from effectseq.matcore import DimensionError
from effectseq.scenarios import COUNTEREXAMPLE_B, counterexample_An, pn_projection
from effectseq.topologies import (
    IndexedEffectFamily,
    Mode,
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

LONG = extended_indices(1, 200, 10**8)


def scalar_family(f, dim=2, idx=LONG):
    return IndexedEffectFamily(lambda n: Effect(f(n) * np.eye(dim)), idx)


# -- decision rule ------------------------------------------------------------

def test_decide_rule():
    assert decide([1.0, 0.5, 1e-7, 1e-8], 1e-6)[0] is Verdict.CONVERGES
    v, w = decide([0.3, 0.25, 0.25, 0.25, 0.25], 1e-6)
    assert v is Verdict.FAILS and w == {"gap": 0.25, "position": 3}
    # slow decay is neither witnessed convergence nor witnessed failure
    assert decide([1 / n for n in range(1, 201)], 1e-6)[0] is Verdict.INCONCLUSIVE
    # final residual small but window rising
    assert decide([1.0] + [0.0] * 11 + [0.0, 0.5, 1e-7], 1e-6)[0] is Verdict.INCONCLUSIVE


def test_index_schedules():
    assert dense_indices(3, 7) == [3, 4, 5, 6, 7]
    idx = extended_indices(1, 200, 10**8)
    assert idx[:200] == list(range(1, 201)) and idx[-1] == 10**8
    assert all(a < b for a, b in zip(idx, idx[1:]))


# -- families and probes ----------------------------------------------------

def test_family_is_memoized_and_deterministic():
    calls = []

    def at(n):
        calls.append(n)
        return Effect(np.eye(2) / (n + 1))

    F = IndexedEffectFamily(at, range(1, 5))
    F.at(2), F.at(2)
    assert calls == [2]
    assert [n for n, _ in F] == [1, 2, 3, 4] and len(F) == 4


def test_probe_padding_and_validation():
    P = ProbeSet.of([[1, 1]])
    np.testing.assert_allclose(P.vectors[0], [2**-0.5, 2**-0.5])
    assert np.allclose(P.for_dim(4)[0], [2**-0.5, 2**-0.5, 0, 0])
    with pytest.raises(ValueError):
        ProbeSet([np.array([1.0, 1.0])])
    Q = ProbeSet.of([[1, 1, 1, 1]], renormalize=True)
    assert np.linalg.norm(Q.for_dim(2)[0]) == pytest.approx(1.0)
    assert ProbeSet.basis(5, 3).labels == ["e1", "e2", "e3"]


# -- norm / SOT / WOT --------------------------------------------------------

def test_norm_examples():
    rep = norm_convergence(scalar_family(lambda n: 1 - 1 / n), Effect.identity(2))
    assert rep.verdict is Verdict.CONVERGES and rep.mode is Mode.NORM
    np.testing.assert_allclose(rep.residuals["max"][:5], [1, 1 / 2, 1 / 3, 1 / 4, 1 / 5], rtol=1e-14)

    idx = extended_indices(3, 200, 10**8)
    An = IndexedEffectFamily(counterexample_An, idx)
    rep = norm_convergence(An, Effect.identity(2))
    assert rep.converges
    np.testing.assert_allclose(rep.residuals["max"], [2 / n for n in idx], rtol=1e-12, atol=1e-15)

    P = IndexedEffectFamily(lambda n: pn_projection(n, 12), dense_indices(2, 10))
    P0 = Effect(0.5 * np.diag([1.0] + [0] * 11))
    rep = norm_convergence(P, P0)
    assert rep.fails and rep.witness["gap"] >= 0.5


def test_sot_examples():
    P = IndexedEffectFamily(lambda n: pn_projection(n, 12), dense_indices(2, 10))
    P0 = Effect(0.5 * np.diag([1.0] + [0] * 11))
    rep = sot_convergence(P, P0, ProbeSet.basis(12, 2))
    # (P_n - P_0) e1 = (e_{n+1}) / 2 never shrinks
    assert rep.fails and rep.witness["probe"] == "e1"
    assert rep.witness["gap"] == pytest.approx(0.5, abs=1e-15)


def test_wot_examples():
    dim = 12
    e = np.eye(dim)
    P = IndexedEffectFamily(lambda n: pn_projection(n, dim), dense_indices(2, 10))
    P0 = Effect(0.5 * np.outer(e[0], e[0]))
    B = Effect(0.5 * np.outer(e[0] + e[1], e[0] + e[1]))
    PB = P.map(lambda p: seq_product(p, B))
    probes = ProbeSet.basis(dim, 6)
    assert wot_convergence(P, P0, ProbeSet.basis(dim, 1)).converges
    assert wot_convergence(PB, P0.scaled(0.25), probes).converges
    rep = wot_convergence(PB, seq_product(P0, B), probes)
    assert rep.fails and rep.witness["probe"] == "e1"
    assert abs(rep.witness["gap"] - 0.125) <= 1e-12


def test_dimension_mismatch():
    F = IndexedEffectFamily.constant(Effect.identity(2), range(1, 4))
    with pytest.raises(DimensionError):
        norm_convergence(F, Effect.identity(3))


@settings(max_examples=15)
@given(st.integers(2, 5), st.integers(0, 2**32 - 1))
def test_topology_strength_chain(d, seed):
    r = np.random.default_rng(seed)
    L, R = random_effect(d, r), random_effect(d, r)
    F = IndexedEffectFamily(lambda n: Effect((1 - 1 / n) * L.matrix + R.matrix / n), LONG)
    probes = ProbeSet.standard(d, r)
    n, s, w = norm_convergence(F, L), sot_convergence(F, L, probes), wot_convergence(F, L, probes)
    assert n.converges and s.converges and w.converges


@settings(max_examples=15)
@given(st.integers(2, 5), st.integers(0, 2**32 - 1))
def test_second_variable_wot(d, seed):
    r = np.random.default_rng(seed)
    A, B, R = (random_effect(d, r) for _ in range(3))
    Bn = IndexedEffectFamily(lambda n: Effect((1 - 1 / n) * B.matrix + R.matrix / n), LONG)
    rep = wot_convergence(Bn.map(lambda b: seq_product(A, b)), seq_product(A, B), ProbeSet.standard(d, r))
    assert rep.converges


def test_report_csv_and_dict():
    F = scalar_family(lambda n: 1 - 1 / n, idx=range(1, 4))
    rep = wot_convergence(F, Effect.identity(2), ProbeSet.basis(2))
    lines = rep.to_csv().splitlines()
    assert lines[0] == "n,probe_id,residual" and "1,e1,1.0" in lines
    assert rep.to_dict()["mode"] == "WOT"


# -- monotone supremum -------------------------------------------------------

def test_monotone_sup_examples():
    F = scalar_family(lambda n: 1 - 1 / n, idx=range(1, 201))
    sup = monotone_sup(F, "up")
    assert sup.limit.allclose(Effect.identity(2), atol=1 / 200 + 1e-15)
    assert sup.error == pytest.approx(1 / 200, rel=0.05)

    An = IndexedEffectFamily(counterexample_An, range(3, 201))
    assert monotone_sup(An, "up").limit.allclose(Effect.identity(2), atol=2 / 200 + 1e-12)

    G = IndexedEffectFamily(lambda n: Effect(np.diag([1 / n, 0.0])), range(1, 201))
    assert monotone_sup(G, "down").limit.allclose(Effect.zero(2), atol=1 / 200 + 1e-15)


def test_monotone_sup_reports_offending_pair():
    F = IndexedEffectFamily(lambda n: Effect(np.eye(2) * (0.5 if n == 3 else 0.1 * n)), range(1, 6))
    with pytest.raises(MonotonicityError) as e:
        monotone_sup(F, "up")
    assert e.value.pair == (3, 4) and e.value.margin < 0


@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_monotone_quad_forms_nondecreasing(d, seed):
    r = np.random.default_rng(seed)
    B, S = random_effect(d, r), random_effect(d, r)
    F = IndexedEffectFamily(lambda n: Effect((1 - 1 / n) * B.matrix), range(1, 60))
    probes = ProbeSet.standard(d, r)
    sup = monotone_sup(F, "up", probes)
    for x in probes.vectors:
        q = [np.vdot(x, F.at(n).matrix @ x).real for n in F.indices]
        assert all(b >= a - 1e-15 for a, b in zip(q, q[1:]))
        assert q[-1] == pytest.approx(np.vdot(x, sup.limit.matrix @ x).real)


# -- order convergence ------------------------------------------------------

def test_order_constant_family():
    L = Effect(np.diag([0.3, 0.6]))
    F = IndexedEffectFamily.constant(L, range(1, 20))
    assert order_convergence_witness_check(F, L, WitnessNets(F, F), ProbeSet.basis(2)).converges


def test_order_second_variable_and_sot_chain(rng):
    d = 3
    A, B, S = (random_effect(d, rng) for _ in range(3))
    C = IndexedEffectFamily(lambda n: Effect((1 - 1 / n) * B.matrix), LONG)
    D = IndexedEffectFamily(lambda n: Effect((1 - 1 / n) * B.matrix + np.eye(d) / n), LONG)
    Bn = IndexedEffectFamily(lambda n: Effect((1 - 1 / n) * B.matrix + S.matrix / n), LONG)
    left = lambda fam: fam.map(lambda x: seq_product(A, x))
    probes = ProbeSet.standard(d, rng)
    AB = seq_product(A, B)
    rep = order_convergence_witness_check(left(Bn), AB, WitnessNets(left(C), left(D)), probes)
    assert rep.converges
    assert sot_convergence(left(Bn), AB, probes).converges


def test_order_counterexample_fails_clause_ii():
    idx = range(3, 60)
    B = Effect(COUNTEREXAMPLE_B)
    AnB = IndexedEffectFamily(lambda n: seq_product(counterexample_An(n), B), idx)
    C = IndexedEffectFamily(lambda n: Effect(np.diag([1 - 1 / n, 0.0])), idx)
    D = IndexedEffectFamily(lambda n: Effect(np.diag([1.0, 1 / n])), idx)
    rep = order_convergence_witness_check(AnB, B, WitnessNets(C, D), ProbeSet.basis(2))
    assert rep.fails and rep.witness["clause"] == "ii" and rep.witness["side"] == "lower"
    assert rep.witness["index"] == 3 and rep.witness["margin"] < 0


def test_order_clause_i_and_iii():
    idx = range(1, 10)
    L = Effect(np.diag([0.5, 0.5]))
    F = IndexedEffectFamily.constant(L, idx)
    bad_lower = IndexedEffectFamily(lambda n: Effect(np.eye(2) * (0.5 - 0.01 * n)), idx)
    rep = order_convergence_witness_check(F, L, WitnessNets(bad_lower, F), ProbeSet.basis(2))
    assert rep.fails and rep.witness["clause"] == "i" and rep.witness["net"] == "lower"
    low = IndexedEffectFamily.constant(Effect(np.eye(2) * 0.25), idx)
    rep = order_convergence_witness_check(F, L, WitnessNets(low, F), ProbeSet.basis(2))
    assert rep.fails and rep.witness["clause"] == "iii" and rep.witness["gap"] == pytest.approx(0.25)


def test_witness_index_mismatch():
    F = IndexedEffectFamily.constant(Effect.identity(2), range(1, 5))
    G = IndexedEffectFamily.constant(Effect.identity(2), range(1, 6))
    with pytest.raises(DimensionError):
        order_convergence_witness_check(F, Effect.identity(2), WitnessNets(G, G), ProbeSet.basis(2))


# -- interval criterion -----------------------------------------------------

def test_interval_examples(rng):
    B = Effect(np.diag([1.0, 0.0, 0.0]))
    F = IndexedEffectFamily.constant(B, range(1, 30))
    assert interval_criterion_check(F, B, [random_effect(3, rng)]).converges
    rep = interval_criterion_check(F, B.scaled(0.5), [B], include_defaults=False)
    assert rep.fails and rep.witness["bound"] == "bound_0" and rep.witness["direction"] == "ge"
    np.testing.assert_array_equal(rep.witness["bound_matrix"], B.matrix)

    Bc = Effect(COUNTEREXAMPLE_B)
    AnB = IndexedEffectFamily(lambda n: seq_product(counterexample_An(n), Bc), range(3, 51))
    rep = interval_criterion_check(AnB, Bc, [Effect.zero(2), Bc, Effect.identity(2)], include_defaults=False)
    assert rep.converges


@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_interval_trivial_bounds_never_refute(d, seed):
    r = np.random.default_rng(seed)
    fam = [random_effect(d, r) for _ in range(8)]
    F = IndexedEffectFamily(lambda n: fam[n], range(8))
    rep = interval_criterion_check(F, random_effect(d, r), [Effect.zero(d), Effect.identity(d)], include_defaults=False)
    assert not rep.fails


# -- shift inequality -------------------------------------------------------

def test_shift_examples(rng):
    z = sqrt_shift_inequality_check(Effect.zero(3), [1e-3, 1.0])
    assert max(abs(m) for m in z.margins) <= 1e-15
    one = sqrt_shift_inequality_check(Effect.identity(2), [1.0])
    assert one.margins[0] == pytest.approx(2 - np.sqrt(2), abs=1e-14)
    A, B = random_effect(5, rng), random_effect(5, rng)
    rep = sqrt_shift_inequality_check(A, [1e-3, 1e-1, 1.0], [(A, B)])
    assert rep.ok and min(rep.margins) >= -1e-10
    with pytest.raises(ValueError):
        sqrt_shift_inequality_check(A, [0.0])
