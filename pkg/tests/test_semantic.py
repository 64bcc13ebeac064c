import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from semantic_it.errors import ValidationError
from semantic_it.probability import Channel, Distribution, JointDistribution, entropy, joint_entropy, joint_from, mutual_information
from semantic_it.semantic import (
    JointSynonymousMapping,
    SynonymousMapping,
    Variant,
    pushforward,
    pushforward_joint,
    semantic_entropy,
    semantic_joint_entropy,
    semantic_mutual_information,
    semantic_resilience_indicator,
)

from conftest import distributions, joints, mappings

PAIRS = SynonymousMapping([0, 0, 1, 1])
DYADIC = Distribution([0.5, 0.25, 0.125, 0.125])


def test_mapping_validation():
    with pytest.raises(ValidationError):
        SynonymousMapping([0, 2, 2])  # class 1 missing
    with pytest.raises(ValidationError):
        SynonymousMapping([-1, 0])
    with pytest.raises(ValidationError):
        SynonymousMapping([0.5, 1])
    with pytest.raises(ValidationError):
        SynonymousMapping([])
    f = SynonymousMapping([1, 0, 1])
    assert f.n_classes == 2 and f.n_symbols == 3
    assert f.members(1).tolist() == [0, 2]


def test_pushforward_examples():
    np.testing.assert_allclose(pushforward(Distribution.uniform(4), PAIRS).probs, [0.5, 0.5])
    np.testing.assert_array_equal(pushforward(DYADIC, SynonymousMapping.identity(4)).probs, DYADIC.probs)
    np.testing.assert_allclose(pushforward(DYADIC, PAIRS).probs, [0.75, 0.25], atol=1e-15)
    with pytest.raises(ValidationError):
        pushforward(Distribution.uniform(3), PAIRS)


def test_semantic_entropy_examples():
    assert semantic_entropy(Distribution.uniform(4), PAIRS) == pytest.approx(1.0, abs=1e-15)
    assert semantic_entropy(DYADIC, SynonymousMapping.single(4)) == 0.0
    assert semantic_entropy(DYADIC, PAIRS) == pytest.approx(0.811278124459133, abs=1e-12)


def test_semantic_joint_entropy_examples():
    j = joint_from(Distribution([0.2, 0.3, 0.5]), Channel([[0.1, 0.9], [0.5, 0.5], [0.7, 0.3]]))
    assert semantic_joint_entropy(j, JointSynonymousMapping.identity(3, 2)) == pytest.approx(joint_entropy(j), abs=1e-14)
    assert semantic_joint_entropy(j, JointSynonymousMapping.single(3, 2)) == 0.0
    f = SynonymousMapping.single(2)
    diag = JointDistribution(np.diag([0.5, 0.5]))
    assert semantic_joint_entropy(diag, JointSynonymousMapping.product(f, f)) == 0.0
    with pytest.raises(ValidationError):
        semantic_joint_entropy(diag, JointSynonymousMapping.identity(3, 2))


def test_semantic_mi_examples():
    j = joint_from(Distribution.uniform(4), Channel.identity(4))
    assert mutual_information(j) == pytest.approx(2.0)
    assert semantic_mutual_information(j, PAIRS, PAIRS, variant=Variant.EQ5) == pytest.approx(1.0, abs=1e-14)
    assert semantic_mutual_information(j, PAIRS, PAIRS, variant=Variant.UP) == pytest.approx(3.0, abs=1e-14)
    ident = SynonymousMapping.identity(4)
    for v in Variant:
        assert semantic_mutual_information(j, ident, ident, variant=v) == pytest.approx(2.0, abs=1e-14)


def test_variant_parsing():
    j = JointDistribution(np.diag([0.5, 0.5]))
    f = SynonymousMapping.identity(2)
    assert semantic_mutual_information(j, f, f, variant="up") == pytest.approx(1.0)
    with pytest.raises(ValueError):
        semantic_mutual_information(j, f, f, variant="eq6")


def test_resilience_indicator():
    assert semantic_resilience_indicator(0, 1, PAIRS, PAIRS) == "semantic-preserved"
    assert semantic_resilience_indicator(0, 2, PAIRS, PAIRS) == "semantic-error"
    for x in range(4):
        assert semantic_resilience_indicator(x, x, PAIRS, PAIRS) == "semantic-preserved"
    with pytest.raises(ValidationError):
        semantic_resilience_indicator(4, 0, PAIRS, PAIRS)


def test_product_mapping_is_recognised_up_to_relabelling():
    fx, fy = SynonymousMapping([0, 1, 1]), SynonymousMapping([1, 0])
    jm = JointSynonymousMapping.product(fx, fy)
    assert jm.is_product_of(fx, fy)
    relabelled = JointSynonymousMapping(3 - jm.class_of_pair)
    assert relabelled.is_product_of(fx, fy)
    assert not JointSynonymousMapping.single(3, 2).is_product_of(fx, fy)


@given(distributions(max_size=10), st.data())
def test_semantic_entropy_bound(p, data):
    f = data.draw(mappings(len(p)))
    hs, h = semantic_entropy(p, f), entropy(p)
    assert hs <= h + 1e-12
    injective = len(set(f.class_of[p.support].tolist())) == p.support.size
    if injective:
        assert hs == pytest.approx(h, abs=1e-12)
    else:
        assert hs < h - 1e-12


@given(distributions(max_size=8), st.data())
def test_pushforward_composes(p, data):
    f = data.draw(mappings(len(p)))
    g = data.draw(mappings(f.n_classes))
    np.testing.assert_allclose(pushforward(pushforward(p, f), g).probs, pushforward(p, f.then(g)).probs, atol=1e-14)


@given(joints(), st.data())
def test_mi_variant_inequalities(j, data):
    fx = data.draw(mappings(j.shape[0]))
    fy = data.draw(mappings(j.shape[1]))
    i = mutual_information(j)
    n_joint = j.shape[0] * j.shape[1]
    _, labels = np.unique(data.draw(st.lists(st.integers(0, n_joint - 1), min_size=n_joint, max_size=n_joint)), return_inverse=True)
    jm = JointSynonymousMapping(labels.reshape(j.shape))
    assert semantic_joint_entropy(j, jm) <= joint_entropy(j) + 1e-12
    assert semantic_mutual_information(j, fx, fy, jm, Variant.UP) >= i - 1e-9
    eq5 = semantic_mutual_information(j, fx, fy, None, Variant.EQ5)
    assert eq5 <= i + 1e-9
    assert eq5 == pytest.approx(mutual_information(pushforward_joint(j, fx, fy)), abs=1e-10)
