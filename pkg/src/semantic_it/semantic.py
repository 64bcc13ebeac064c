"""Synonymous mappings, semantic entropy and semantic mutual information."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ValidationError
from .probability import (
    Distribution,
    JointDistribution,
    entropy,
    joint_entropy,
    marginals,
    plogp_sum,
)


class Variant(str, Enum):
    """Which semantic mutual information to compute.

    EQ5 uses semantic entropies for all three terms. UP keeps the syntactic
    marginal entropies and only coarsens the joint term, so it dominates the
    classical mutual information for every joint law.
    """

    EQ5 = "eq5"
    UP = "up"


def _dense_classes(labels: np.ndarray, what: str) -> int:
    if labels.size == 0:
        raise ValidationError(f"{what}: empty mapping")
    if labels.min() < 0:
        raise ValidationError(f"{what}: negative class index")
    m = int(labels.max()) + 1
    missing = np.setdiff1d(np.arange(m), labels)
    if missing.size:
        raise ValidationError(f"{what}: class indices must be dense 0..{m - 1}; missing {missing.tolist()}")
    return m


def _int_array(values, ndim: int, what: str) -> np.ndarray:
    a = np.asarray(values)
    if a.ndim != ndim:
        raise ValidationError(f"{what}: expected {ndim}-d integer array")
    if a.size and not np.issubdtype(a.dtype, np.integer):
        if not np.all(np.equal(np.mod(a, 1), 0)):
            raise ValidationError(f"{what}: class indices must be integers")
    a = a.astype(np.int64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SynonymousMapping:
    """Surjective map from symbols 0..n-1 onto classes 0..m-1."""

    class_of: np.ndarray

    def __post_init__(self):
        a = _int_array(self.class_of, 1, "synonymous mapping")
        object.__setattr__(self, "class_of", a)
        object.__setattr__(self, "n_classes", _dense_classes(a, "synonymous mapping"))

    @property
    def n_symbols(self) -> int:
        return self.class_of.size

    @classmethod
    def identity(cls, n: int) -> "SynonymousMapping":
        return cls(np.arange(n))

    @classmethod
    def single(cls, n: int) -> "SynonymousMapping":
        return cls(np.zeros(n, dtype=int))

    def members(self, c: int) -> np.ndarray:
        """Symbols whose class is ``c`` (the synonymous set)."""
        return np.flatnonzero(self.class_of == c)

    def __call__(self, x):
        return self.class_of[x]

    def then(self, g: "SynonymousMapping") -> "SynonymousMapping":
        """Composition: first self, then g on the classes of self."""
        if g.n_symbols != self.n_classes:
            raise ValidationError("composition: class count does not match domain of second mapping")
        return SynonymousMapping(g.class_of[self.class_of])

    def is_identity(self) -> bool:
        return self.n_classes == self.n_symbols and bool(np.all(self.class_of == np.arange(self.n_symbols)))

    def __eq__(self, other):
        if not isinstance(other, SynonymousMapping):
            return NotImplemented
        return np.array_equal(self.class_of, other.class_of)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class JointSynonymousMapping:
    """Assigns every (x, y) pair a joint class index."""

    class_of_pair: np.ndarray

    def __post_init__(self):
        a = _int_array(self.class_of_pair, 2, "joint synonymous mapping")
        object.__setattr__(self, "class_of_pair", a)
        object.__setattr__(self, "n_classes", _dense_classes(a.ravel(), "joint synonymous mapping"))

    @property
    def shape(self) -> tuple[int, int]:
        return self.class_of_pair.shape

    @classmethod
    def product(cls, fx: SynonymousMapping, fy: SynonymousMapping) -> "JointSynonymousMapping":
        return cls(fx.class_of[:, None] * fy.n_classes + fy.class_of[None, :])

    @classmethod
    def identity(cls, nx: int, ny: int) -> "JointSynonymousMapping":
        return cls(np.arange(nx * ny).reshape(nx, ny))

    @classmethod
    def single(cls, nx: int, ny: int) -> "JointSynonymousMapping":
        return cls(np.zeros((nx, ny), dtype=int))

    def is_product_of(self, fx: SynonymousMapping, fy: SynonymousMapping) -> bool:
        """True if this mapping induces the same partition of pairs as product(fx, fy)."""
        if self.shape != (fx.n_symbols, fy.n_symbols):
            return False
        ref = JointSynonymousMapping.product(fx, fy).class_of_pair.ravel()
        mine = self.class_of_pair.ravel()
        # same partition iff the pairing (mine, ref) is a bijection between labels
        pairs = set(zip(mine.tolist(), ref.tolist()))
        return len(pairs) == len(set(mine.tolist())) == len(set(ref.tolist()))


def pushforward(p: Distribution, f: SynonymousMapping) -> Distribution:
    if len(p) != f.n_symbols:
        raise ValidationError(f"distribution has {len(p)} symbols, mapping expects {f.n_symbols}")
    return Distribution(np.bincount(f.class_of, weights=p.probs, minlength=f.n_classes))


def semantic_entropy(p: Distribution, f: SynonymousMapping) -> float:
    return entropy(pushforward(p, f))


def coarsen_joint(j: JointDistribution, jm: JointSynonymousMapping) -> np.ndarray:
    if j.shape != jm.shape:
        raise ValidationError(f"joint has shape {j.shape}, joint mapping has shape {jm.shape}")
    return np.bincount(jm.class_of_pair.ravel(), weights=j.cells.ravel(), minlength=jm.n_classes)


def pushforward_joint(j: JointDistribution, fx: SynonymousMapping, fy: SynonymousMapping) -> JointDistribution:
    """Joint law of (fx(X), fy(Y))."""
    if j.shape != (fx.n_symbols, fy.n_symbols):
        raise ValidationError(f"joint has shape {j.shape}, mappings expect {(fx.n_symbols, fy.n_symbols)}")
    cells = coarsen_joint(j, JointSynonymousMapping.product(fx, fy))
    return JointDistribution(cells.reshape(fx.n_classes, fy.n_classes))


def semantic_joint_entropy(j: JointDistribution, jm: JointSynonymousMapping) -> float:
    return plogp_sum(coarsen_joint(j, jm))


def semantic_mutual_information(
    j: JointDistribution,
    fx: SynonymousMapping,
    fy: SynonymousMapping,
    jm: JointSynonymousMapping | None = None,
    variant: Variant | str = Variant.EQ5,
) -> float:
    variant = Variant(variant)
    if j.shape != (fx.n_symbols, fy.n_symbols):
        raise ValidationError(f"joint has shape {j.shape}, mappings expect {(fx.n_symbols, fy.n_symbols)}")
    if jm is None:
        jm = JointSynonymousMapping.product(fx, fy)
    px, py = marginals(j)
    hj = semantic_joint_entropy(j, jm)
    if variant is Variant.EQ5:
        return semantic_entropy(px, fx) + semantic_entropy(py, fy) - hj
    return entropy(px) + entropy(py) - hj


def semantic_resilience_indicator(x: int, y: int, fx: SynonymousMapping, fy: SynonymousMapping) -> str:
    """'semantic-preserved' when x and y fall in the same class, else 'semantic-error'."""
    if not 0 <= x < fx.n_symbols:
        raise ValidationError(f"input symbol {x} out of range 0..{fx.n_symbols - 1}")
    if not 0 <= y < fy.n_symbols:
        raise ValidationError(f"output symbol {y} out of range 0..{fy.n_symbols - 1}")
    return "semantic-preserved" if fx(x) == fy(y) else "semantic-error"
