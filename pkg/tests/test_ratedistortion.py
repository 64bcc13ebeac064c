import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semantic_it.capacity import SolverConfig
from semantic_it.errors import InstanceTooLarge, ValidationError
from semantic_it.probability import Distribution, binary_entropy, entropy
from semantic_it.ratedistortion import (
    DistortionMatrix,
    LambdaSweep,
    ba_rd_point,
    brute_force_rd,
    rate_at_distortion,
    rd_curve,
    semantic_rate_at_distortion,
    semantic_rd_curve,
    zero_rate_distortion,
)
from semantic_it.semantic import SynonymousMapping, semantic_entropy

from conftest import distributions, mappings

HAM2 = DistortionMatrix.hamming(2)


def bern(p):
    return Distribution([p, 1 - p])


def binary_rd(p, D):
    return np.where(D < min(p, 1 - p), binary_entropy(p) - np.array([binary_entropy(x) for x in np.atleast_1d(D)]), 0.0)


def test_distortion_matrix_validation():
    with pytest.raises(ValidationError, match="row 1, column 0"):
        DistortionMatrix([[0, 1], [-0.5, 0]])
    with pytest.raises(ValidationError):
        DistortionMatrix([[np.inf, np.inf], [0, 1]])
    with pytest.raises(ValidationError):
        DistortionMatrix([[np.nan, 0]])
    d = DistortionMatrix([[0, np.inf], [1, 0]])
    assert d.shape == (2, 2)


def test_lambda_sweep():
    assert LambdaSweep(0.01, 64, 64).values()[0] == pytest.approx(0.01)
    v = LambdaSweep(0.0, 10, 5).values()
    assert v[0] == 0 and v[-1] == pytest.approx(10) and len(v) == 5
    np.testing.assert_allclose(LambdaSweep(0, 1, 3, geometric=False).values(), [0, 0.5, 1])
    with pytest.raises(ValidationError):
        LambdaSweep(1, 1, 4)
    with pytest.raises(ValidationError):
        LambdaSweep(0, 1, 1)


def test_ba_rd_point_zero_lambda_is_best_single_reconstruction():
    p = Distribution([0.2, 0.5, 0.3])
    d = DistortionMatrix([[0, 2, 1], [1, 0, 3], [4, 1, 0]])
    pt = ba_rd_point(p, d, 0.0)
    assert pt.rate == 0.0
    assert pt.distortion == pytest.approx(min(p.probs @ d.cells))
    assert pt.distortion == pytest.approx(zero_rate_distortion(p, d))


def test_ba_rd_point_large_lambda_is_lossless():
    pt = ba_rd_point(bern(0.5), HAM2, 60.0)
    assert pt.rate == pytest.approx(1.0, abs=1e-9)
    assert pt.distortion < 1e-15


def test_ba_rd_point_rejects_negative_lambda_and_mismatch():
    with pytest.raises(ValidationError):
        ba_rd_point(bern(0.5), HAM2, -1.0)
    with pytest.raises(ValidationError):
        ba_rd_point(Distribution.uniform(3), HAM2, 1.0)


def test_rate_at_distortion_bernoulli_half():
    pt = rate_at_distortion(bern(0.5), HAM2, 0.11)
    assert pt.distortion == pytest.approx(0.11, abs=1e-6)
    assert pt.rate == pytest.approx(0.500084041835472, abs=1e-5)
    assert rate_at_distortion(bern(0.5), HAM2, 0.5).rate == 0.0
    assert rate_at_distortion(bern(0.5), HAM2, 0.0).rate == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(ValidationError):
        rate_at_distortion(bern(0.5), HAM2, -0.1)


@pytest.mark.parametrize("p", [0.3, 0.5])
def test_binary_hamming_curve(p):
    c = rd_curve(bern(p), HAM2, LambdaSweep(1e-2, 64, 64))
    assert c.converged
    np.testing.assert_allclose(c.rates, binary_rd(p, c.distortions), atol=1e-6)


def test_degenerate_curves():
    c = rd_curve(Distribution([1.0, 0.0, 0.0]), DistortionMatrix.hamming(3))
    assert np.all(c.rates == 0)
    c = rd_curve(Distribution.uniform(2), DistortionMatrix(np.zeros((2, 2))))
    assert np.all(c.rates < 1e-12)


def test_semantic_rd_examples():
    p = Distribution([0.5, 0.25, 0.125, 0.125])
    sweep = LambdaSweep(1e-2, 64, 16)
    ident = SynonymousMapping.identity(4)
    a = semantic_rd_curve(p, ident, DistortionMatrix.hamming(4), sweep)
    b = rd_curve(p, DistortionMatrix.hamming(4), sweep)
    np.testing.assert_array_equal(a.rates, b.rates)
    c = semantic_rd_curve(p, SynonymousMapping.single(4), DistortionMatrix.hamming(1), sweep)
    assert np.all(c.rates == 0)
    f = SynonymousMapping([0, 0, 1, 1])
    pt = semantic_rate_at_distortion(p, f, DistortionMatrix.hamming(2), 0.0)
    assert pt.rate == pytest.approx(0.811278124459133, abs=1e-6)
    with pytest.raises(ValidationError):
        semantic_rd_curve(p, f, DistortionMatrix.hamming(3))


def test_brute_force_examples():
    assert brute_force_rd(bern(0.3), HAM2, 0.3) == pytest.approx(0.0, abs=1e-12)
    assert brute_force_rd(bern(0.5), HAM2, 0.11, 0.01) == pytest.approx(0.500084041835472, abs=5e-3)
    with pytest.raises(InstanceTooLarge):
        brute_force_rd(Distribution.uniform(4), DistortionMatrix.hamming(4), 0.1)


@settings(max_examples=20)
@given(st.floats(0.05, 0.95), st.lists(st.floats(0.0, 2.0), min_size=4, max_size=4), st.floats(0.05, 0.95))
def test_brute_force_upper_bounds_ba(a, cells, frac):
    p = bern(a)
    cells = np.array(cells).reshape(2, 2)
    cells[0, 0] = cells[1, 1] = 0.0
    d = DistortionMatrix(cells)
    lo, hi = (p.probs @ d.cells.min(axis=1)), zero_rate_distortion(p, d)
    target = lo + frac * (hi - lo)
    ref = rate_at_distortion(p, d, target)
    assert brute_force_rd(p, d, target, 0.02) >= ref.rate - 1e-3


@settings(max_examples=30)
@given(distributions(max_size=5))
def test_curve_is_monotone_convex_and_hits_entropy(p):
    n = len(p)
    c = rd_curve(p, DistortionMatrix.hamming(n), LambdaSweep(1e-2, 64, 24))
    D, R = c.distortions, c.rates
    assert np.all(R >= 0)
    assert np.all(np.diff(R) <= 1e-9)
    # convexity: slopes between consecutive points are nondecreasing
    dD = np.diff(D)
    keep = dD > 1e-7
    slopes = np.diff(R)[keep] / dD[keep]
    assert np.all(np.diff(slopes) >= -1e-5 * (1 + np.abs(slopes[1:])))
    assert rate_at_distortion(p, DistortionMatrix.hamming(n), 0.0).rate == pytest.approx(entropy(p), abs=1e-6)


@settings(max_examples=30)
@given(distributions(min_size=2, max_size=6), st.data())
def test_semantic_never_harder_than_lifted_classical(p, data):
    f = data.draw(mappings(len(p)))
    m = f.n_classes
    raw = np.array(data.draw(st.lists(st.floats(0.05, 1.0), min_size=m * m, max_size=m * m))).reshape(m, m)
    np.fill_diagonal(raw, 0.0)
    ds = DistortionMatrix(raw)
    lifted = ds.lift(f)
    assert semantic_rate_at_distortion(p, f, ds, 0.0).rate == pytest.approx(semantic_entropy(p, f), abs=1e-6)
    for D in np.linspace(0, zero_rate_distortion(p, lifted), 4):
        sem = semantic_rate_at_distortion(p, f, ds, D).rate
        cls = rate_at_distortion(p, lifted, D).rate
        assert sem <= cls + 1e-6
