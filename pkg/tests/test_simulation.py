import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semantic_it.errors import ValidationError
from semantic_it.probability import Channel, Distribution
from semantic_it.ratedistortion import DistortionMatrix
from semantic_it.rng import make_generator
from semantic_it.semantic import SynonymousMapping
from semantic_it.simulation import BLOCK, run_channel_sim, sample_source

from conftest import channels, distributions, mappings

ID2 = SynonymousMapping.identity(2)
PAIRS = SynonymousMapping([0, 0, 1, 1])
WITHIN = Channel([[0.6, 0.4, 0, 0], [0.3, 0.7, 0, 0], [0, 0, 0.5, 0.5], [0, 0, 0.2, 0.8]])
DYADIC = Distribution([0.5, 0.25, 0.125, 0.125])


def test_rng_streams_are_independent_and_reproducible():
    a = make_generator(42, 0).random(4)
    np.testing.assert_array_equal(a, make_generator(42, 0).random(4))
    assert not np.array_equal(a, make_generator(42, 1).random(4))
    assert not np.array_equal(a, make_generator(43, 0).random(4))


def test_noiseless_channel():
    r = run_channel_sim(Distribution([0.3, 0.7]), Channel.identity(2), ID2, ID2, 10_000, 0)
    assert r.syntactic_error_rate == 0 and r.semantic_error_rate == 0


def test_bsc_error_rate():
    n = 100_000
    r = run_channel_sim(Distribution.uniform(2), Channel.bsc(0.1), ID2, ID2, n, 9)
    sigma = np.sqrt(0.1 * 0.9 / n)
    assert abs(r.syntactic_error_rate - 0.1) < 3 * sigma
    assert r.semantic_error_rate == r.syntactic_error_rate


def test_within_class_channel():
    r = run_channel_sim(DYADIC, WITHIN, PAIRS, PAIRS, 100_000, 1)
    assert r.semantic_error_rate == 0.0
    assert r.mean_semantic_distortion == 0.0
    # expected symbol error rate 0.5*0.4 + 0.25*0.3 + 0.125*0.5 + 0.125*0.2 = 0.3625
    assert abs(r.syntactic_error_rate - 0.3625) < 3 * np.sqrt(0.3625 * 0.6375 / 100_000)
    assert r.measured_bits_per_symbol == pytest.approx(0.811278124459133, rel=0.02)


def test_semantic_distortion_matrix():
    ds = DistortionMatrix([[0, 0.25], [0.25, 0]])
    w = Channel(np.full((4, 4), 0.25))
    r = run_channel_sim(DYADIC, w, PAIRS, PAIRS, 50_000, 2, ds)
    assert r.mean_semantic_distortion == pytest.approx(0.25 * r.semantic_error_rate)
    with pytest.raises(ValidationError):
        run_channel_sim(DYADIC, w, PAIRS, PAIRS, 10, 2, DistortionMatrix.hamming(3))


def test_validation():
    with pytest.raises(ValidationError):
        run_channel_sim(DYADIC, WITHIN, PAIRS, PAIRS, 0, 1)
    with pytest.raises(ValidationError):
        run_channel_sim(DYADIC, Channel.bsc(0.1), PAIRS, ID2, 10, 1)


def test_multi_block_runs_are_deterministic():
    n = 2 * BLOCK + 17
    a = run_channel_sim(DYADIC, WITHIN, PAIRS, PAIRS, n, 5)
    assert a == run_channel_sim(DYADIC, WITHIN, PAIRS, PAIRS, n, 5)
    assert a != run_channel_sim(DYADIC, WITHIN, PAIRS, PAIRS, n, 6)
    xs = sample_source(DYADIC, n, 5)
    assert xs.size == n and set(np.unique(xs).tolist()) <= {0, 1, 2, 3}


def test_zero_probability_symbols_never_drawn():
    xs = sample_source(Distribution([0.0, 0.5, 0.0, 0.5]), 20_000, 3)
    assert set(np.unique(xs).tolist()) == {1, 3}


@settings(max_examples=50)
@given(distributions(max_size=6), st.integers(0, 2**64 - 1), st.data())
def test_semantic_errors_imply_symbol_errors(p, seed, data):
    w = data.draw(channels(n_in=len(p), n_out=len(p)))
    f = data.draw(mappings(len(p)))
    r = run_channel_sim(p, w, f, f, 500, seed)
    assert 0 <= r.semantic_error_rate <= r.syntactic_error_rate <= 1
    assert r.measured_bits_per_symbol >= 0
