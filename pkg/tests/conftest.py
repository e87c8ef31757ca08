import numpy as np
import pytest
from hypothesis import settings, strategies as st

from timedgh.generators import gen_random, gen_random_small
from timedgh.space import validate_space

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def make_space(dist, time=None, **extra):
    dist = np.asarray(dist, dtype=float)
    n = len(dist)
    doc = {"points": [f"p{i}" for i in range(n)], "dist": dist,
           "time": np.zeros(n) if time is None else time}
    doc.update(extra)
    return validate_space(doc)


def line(xs, time=None):
    xs = np.asarray(xs, dtype=float)
    return make_space(np.abs(xs[:, None] - xs[None, :]), time)


def corpus(count=200, max_n=30, start=0):
    """Seeded random spaces, sizes 1..max_n."""
    out = []
    for s in range(start, start + count):
        n = int(np.random.default_rng(s).integers(1, max_n + 1))
        out.append(gen_random(n, s))
    return out


random_spaces = st.builds(
    lambda n, seed: gen_random(n, seed),
    st.integers(1, 14), st.integers(0, 10**6),
)
tiny_spaces = st.builds(
    lambda n, seed: gen_random_small(n, seed),
    st.integers(1, 4), st.integers(0, 10**6),
)


@pytest.fixture(scope="session")
def random_corpus():
    return corpus()


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
