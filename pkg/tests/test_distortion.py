import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from semantic_it.distortion import (
    DistortionFileError,
    DistortionParseError,
    FeatureTable,
    NegativeEntryError,
    RaggedRowsError,
    class_mismatch_distortion,
    cosine_distortion,
    format_distortion,
    load_distortion,
)
from semantic_it.errors import ValidationError
from semantic_it.probability import Distribution
from semantic_it.ratedistortion import semantic_rate_at_distortion
from semantic_it.semantic import SynonymousMapping, semantic_entropy

from conftest import distributions, mappings


def test_cosine_examples():
    d = cosine_distortion(FeatureTable([[1.0, 2.0], [1.0, 2.0], [2.0, -1.0], [1.0, 0.0], [1.0, 1.0]]))
    assert d.cells[0, 1] == 0.0
    assert d.cells[0, 2] == pytest.approx(0.5, abs=1e-15)
    assert d.cells[3, 4] == pytest.approx(0.146446609406726, abs=1e-12)


def test_feature_table_validation():
    with pytest.raises(ValidationError):
        FeatureTable([[0.0, 0.0], [1.0, 0.0]])
    with pytest.raises(ValidationError):
        FeatureTable([[np.inf, 0.0]])
    with pytest.raises(ValidationError):
        FeatureTable([1.0, 2.0])


def test_class_mismatch():
    assert class_mismatch_distortion(1).cells.tolist() == [[0.0]]
    assert class_mismatch_distortion(2).cells.tolist() == [[0, 1], [1, 0]]
    np.testing.assert_array_equal(class_mismatch_distortion(3).cells, 1 - np.eye(3))
    with pytest.raises(ValidationError):
        class_mismatch_distortion(0)


vectors = arrays(float, st.tuples(st.integers(1, 6), st.integers(1, 4)), elements=st.floats(-10, 10, allow_nan=False)).filter(
    lambda v: np.all(np.abs(v).max(axis=1) > 1e-3)
)


@given(vectors, st.data())
def test_cosine_properties(v, data):
    d = cosine_distortion(FeatureTable(v)).cells
    np.testing.assert_array_equal(d, d.T)
    assert np.all(np.diag(d) == 0)
    assert np.all((d >= 0) & (d <= 1))
    scale = np.array(data.draw(st.lists(st.floats(1e-2, 1e2), min_size=len(v), max_size=len(v))))
    np.testing.assert_allclose(cosine_distortion(FeatureTable(v * scale[:, None])).cells, d, atol=1e-12)


@given(distributions(max_size=8), st.data())
def test_class_mismatch_zero_distortion_rate_is_semantic_entropy(p, data):
    f = data.draw(mappings(len(p)))
    pt = semantic_rate_at_distortion(p, f, class_mismatch_distortion(f.n_classes), 0.0)
    assert pt.rate == pytest.approx(semantic_entropy(p, f), abs=1e-6)


def test_load_distortion(tmp_path):
    good = tmp_path / "good.csv"
    good.write_text("# 2x2\n0, 1\n0.5\t0\n")
    assert load_distortion(good).cells.tolist() == [[0, 1], [0.5, 0]]

    neg = tmp_path / "neg.csv"
    neg.write_text("0,1\n1,-2\n")
    with pytest.raises(NegativeEntryError, match="row 1, column 1"):
        load_distortion(neg)

    ragged = tmp_path / "ragged.csv"
    ragged.write_text("0,1\n1,0\n1,0,2\n")
    with pytest.raises(RaggedRowsError, match="ragged.csv:3"):
        load_distortion(ragged)

    junk = tmp_path / "junk.csv"
    junk.write_text("0,x\n")
    with pytest.raises(DistortionParseError):
        load_distortion(junk)

    nan = tmp_path / "nan.csv"
    nan.write_text("0,nan\n")
    with pytest.raises(DistortionParseError):
        load_distortion(nan)

    for err in (NegativeEntryError, RaggedRowsError, DistortionParseError):
        assert issubclass(err, DistortionFileError) and issubclass(err, ValidationError)
    assert len({NegativeEntryError, RaggedRowsError, DistortionParseError}) == 3


def test_format_round_trip(tmp_path):
    d = cosine_distortion(FeatureTable([[1, 0, 0], [0.3, 0.9, 0.1], [0.2, 0.2, 1]]))
    path = tmp_path / "d.csv"
    path.write_text(format_distortion(d))
    np.testing.assert_allclose(load_distortion(path).cells, d.cells, atol=1e-12)


def test_feature_file(tmp_path, fixtures_dir):
    ft = FeatureTable.load(fixtures_dir / "four_features.csv")
    assert ft.vectors.shape == (4, 3)
    bad = tmp_path / "f.csv"
    bad.write_text("0, 1, 0\n2, 0, 1\n")
    with pytest.raises(ValidationError, match="0..1"):
        FeatureTable.load(bad)
    ragged = tmp_path / "r.csv"
    ragged.write_text("0, 1, 0\n1, 0\n")
    with pytest.raises(RaggedRowsError):
        FeatureTable.load(ragged)
