from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from semantic_it.probability import Channel, Distribution, JointDistribution
from semantic_it.semantic import SynonymousMapping

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

settings.register_profile("default", deadline=None)
settings.load_profile("default")


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def _normalize(w):
    a = np.asarray(w, dtype=float)
    if a.sum() <= 0:
        a = np.ones_like(a)
    return a / a.sum()


# weights with a fair share of exact zeros so support edge cases get exercised
_weight = st.one_of(st.just(0.0), st.floats(1e-3, 1.0))


@st.composite
def distributions(draw, min_size=1, max_size=8):
    n = draw(st.integers(min_size, max_size))
    return Distribution(_normalize(draw(st.lists(_weight, min_size=n, max_size=n))))


@st.composite
def mappings(draw, n):
    """Random surjective mapping of n symbols, classes relabelled densely by first appearance."""
    raw = draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n))
    _, dense = np.unique(raw, return_inverse=True)
    return SynonymousMapping(dense)


@st.composite
def channels(draw, n_in=None, n_out=None, max_size=5):
    n_in = n_in or draw(st.integers(1, max_size))
    n_out = n_out or draw(st.integers(1, max_size))
    rows = [_normalize(draw(st.lists(_weight, min_size=n_out, max_size=n_out))) for _ in range(n_in)]
    return Channel(rows)


@st.composite
def joints(draw, max_size=5):
    nx = draw(st.integers(1, max_size))
    ny = draw(st.integers(1, max_size))
    w = draw(st.lists(_weight, min_size=nx * ny, max_size=nx * ny))
    return JointDistribution(_normalize(w).reshape(nx, ny))


def random_instance(rng, n_max=16):
    """(p, f) pair with random support and random class structure."""
    n = int(rng.integers(1, n_max + 1))
    w = rng.random(n) * (rng.random(n) > 0.25)
    if w.sum() == 0:
        w[rng.integers(n)] = 1.0
    _, labels = np.unique(rng.integers(0, n, size=n), return_inverse=True)
    return Distribution(w / w.sum()), SynonymousMapping(labels)


def random_joint(rng, n_max=6):
    nx, ny = rng.integers(1, n_max + 1, size=2)
    c = rng.random((nx, ny)) * (rng.random((nx, ny)) > 0.2)
    if c.sum() == 0:
        c[0, 0] = 1.0
    _, fx = np.unique(rng.integers(0, nx, size=nx), return_inverse=True)
    _, fy = np.unique(rng.integers(0, ny, size=ny), return_inverse=True)
    return JointDistribution(c / c.sum()), SynonymousMapping(fx), SynonymousMapping(fy)


# -- acceptance summary --------------------------------------------------------

ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
