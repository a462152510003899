import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from shapedbmd import DiscreteChannel, JointDistribution

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@st.composite
def distributions(draw, m=None, positive=False, zeros=False):
    m = draw(st.integers(1, 3)) if m is None else m
    lo = 0.01 if positive else 0.0
    w = np.array(draw(st.lists(st.floats(lo, 1.0), min_size=1 << m, max_size=1 << m)))
    # probabilities at or below ZERO_PROB count as zero; keep draws clear of it
    w[w < 1e-6] = 0.0
    if zeros:
        idx = draw(st.lists(st.integers(0, (1 << m) - 1), min_size=1, max_size=(1 << m) - 1, unique=True))
        w[idx] = 0.0
    if w.sum() <= 0:
        w[0] = 1.0
    return JointDistribution.from_weights(m, w)


@st.composite
def channels(draw, m, max_outputs=4):
    k = draw(st.integers(1, max_outputs))
    rows = [draw(st.lists(st.floats(0.0, 1.0), min_size=k, max_size=k)) for _ in range(1 << m)]
    t = np.array(rows)
    t[t < 1e-6] = 0.0
    t += 1e-3 * draw(st.booleans())
    t[t.sum(axis=1) == 0, 0] = 1.0
    t /= t.sum(axis=1, keepdims=True)
    return DiscreteChannel(m, t)


def random_dmc(rng, m, k):
    t = rng.dirichlet(np.full(k, 0.7), size=1 << m)
    return DiscreteChannel(m, t)


def random_dist(rng, m, n_zero=0):
    w = rng.dirichlet(np.ones(1 << m))
    if n_zero:
        w[rng.choice(1 << m, n_zero, replace=False)] = 0.0
    return JointDistribution.from_weights(m, w)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    if test_acceptance.REPORT:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.REPORT:
            terminalreporter.write_line(line)
