"""Finite-alphabet distributions, channels and the classical Shannon quantities.

Everything is in bits. Values are immutable: the wrapped arrays are marked
read-only after validation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

SUM_TOL = 1e-9
CLAMP_TOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


def _check_probs(a: np.ndarray, what: str) -> np.ndarray:
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{what}: non-finite entry")
    if np.any(a < -CLAMP_TOL):
        i = np.unravel_index(int(np.argmin(a)), a.shape)
        raise ValidationError(f"{what}: negative entry {a[i]!r} at index {tuple(int(v) for v in i)}")
    a = np.where(a < 0, 0.0, a)
    total = a.sum()
    if abs(total - 1.0) > SUM_TOL:
        raise ValidationError(f"{what}: entries sum to {total!r}, expected 1")
    return a


def plogp_sum(a) -> float:
    """-sum a log2 a over the positive entries (0 log 0 = 0)."""
    a = np.asarray(a, dtype=float).ravel()
    nz = a[a > 0]
    return float(-np.sum(nz * np.log2(nz)))


@dataclass(frozen=True, eq=False)
class Distribution:
    probs: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.probs, dtype=float)
        if a.ndim != 1 or a.size < 1:
            raise ValidationError("distribution: expected a non-empty 1-d vector")
        object.__setattr__(self, "probs", _frozen(_check_probs(a, "distribution")))

    @classmethod
    def uniform(cls, n: int) -> "Distribution":
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def point_mass(cls, n: int, i: int) -> "Distribution":
        a = np.zeros(n)
        a[i] = 1.0
        return cls(a)

    def __len__(self) -> int:
        return self.probs.size

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.probs > 0)


@dataclass(frozen=True, eq=False)
class Channel:
    """Row-stochastic matrix w[x, y] = p(y|x)."""

    rows: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.rows, dtype=float)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise ValidationError("channel: expected a non-empty 2-d matrix")
        a = np.stack([_check_probs(r, f"channel row {i}") for i, r in enumerate(a)])
        object.__setattr__(self, "rows", _frozen(a))

    @property
    def n_in(self) -> int:
        return self.rows.shape[0]

    @property
    def n_out(self) -> int:
        return self.rows.shape[1]

    @classmethod
    def identity(cls, n: int) -> "Channel":
        return cls(np.eye(n))

    @classmethod
    def bsc(cls, eps: float) -> "Channel":
        return cls([[1 - eps, eps], [eps, 1 - eps]])


@dataclass(frozen=True, eq=False)
class JointDistribution:
    cells: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.cells, dtype=float)
        if a.ndim != 2 or a.size < 1:
            raise ValidationError("joint distribution: expected a non-empty 2-d matrix")
        object.__setattr__(self, "cells", _frozen(_check_probs(a, "joint distribution")))

    @property
    def shape(self) -> tuple[int, int]:
        return self.cells.shape

    @property
    def T(self) -> "JointDistribution":
        return JointDistribution(self.cells.T)


def binary_entropy(q: float) -> float:
    return plogp_sum([q, 1.0 - q])


def entropy(p: Distribution) -> float:
    return plogp_sum(p.probs)


def joint_entropy(j: JointDistribution) -> float:
    return plogp_sum(j.cells)


def joint_from(p: Distribution, w: Channel) -> JointDistribution:
    if len(p) != w.n_in:
        raise ValidationError(f"input distribution has {len(p)} symbols, channel has {w.n_in} inputs")
    return JointDistribution(p.probs[:, None] * w.rows)


def marginals(j: JointDistribution) -> tuple[Distribution, Distribution]:
    return Distribution(j.cells.sum(axis=1)), Distribution(j.cells.sum(axis=0))


def mutual_information(j: JointDistribution) -> float:
    px, py = marginals(j)
    return entropy(px) + entropy(py) - joint_entropy(j)


def conditional_entropy(j: JointDistribution) -> float:
    """H(X|Y) where X indexes rows and Y columns."""
    return joint_entropy(j) - entropy(marginals(j)[1])


def kl_divergence(p, q) -> float:
    """D(p||q) in bits; inf when p puts mass where q does not."""
    p = np.asarray(getattr(p, "probs", p), dtype=float)
    q = np.asarray(getattr(q, "probs", q), dtype=float)
    m = p > 0
    if np.any(q[m] <= 0):
        return float("inf")
    return float(np.sum(p[m] * np.log2(p[m] / q[m])))
