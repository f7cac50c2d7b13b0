import time

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from effectseq.effects import Effect, haar_unitary

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

SUITE_BUDGET_S = 60.0

# criterion label -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@st.composite
def effects(draw, min_dim=1, max_dim=6, dim=None):
    """Effects built from a drawn spectrum in [0, 1] and a seeded unitary."""
    d = dim if dim is not None else draw(st.integers(min_dim, max_dim))
    vals = draw(arrays(np.float64, d, elements=st.floats(0.0, 1.0, allow_nan=False)))
    seed = draw(st.integers(0, 2**32 - 1))
    u = haar_unitary(d, np.random.default_rng(seed))
    return Effect.from_spectrum(vals, u)


@st.composite
def effect_pairs(draw, max_dim=6):
    d = draw(st.integers(1, max_dim))
    return draw(effects(dim=d)), draw(effects(dim=d))


def pytest_sessionstart(session):
    session.config._effectseq_t0 = time.perf_counter()


def pytest_sessionfinish(session, exitstatus):
    elapsed = time.perf_counter() - session.config._effectseq_t0
    session.config._effectseq_elapsed = elapsed
    if elapsed > SUITE_BUDGET_S:
        for label, (ok, detail) in list(ACCEPTANCE.items()):
            if label.startswith("9 "):
                ACCEPTANCE[label] = (False, detail + f"; suite took {elapsed:.1f}s")
        session.exitstatus = pytest.ExitCode.TESTS_FAILED


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    elapsed = getattr(config, "_effectseq_elapsed", time.perf_counter() - config._effectseq_t0)
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for label in sorted(ACCEPTANCE, key=lambda s: int(s.split()[0])):
            ok, detail = ACCEPTANCE[label]
            terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
    terminalreporter.write_line(f"suite wall time {elapsed:.1f}s (budget {SUITE_BUDGET_S:.0f}s)")
