"""Generative priors as side information known to encoder and decoder.

The prior state K selects a conditional law p(x|k). The semantic state is a
deterministic function of X given by a synonymous mapping; the transmitted
message is identified with the reconstruction.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .capacity import SolverConfig
from .errors import ValidationError
from .probability import Distribution, entropy, plogp_sum
from .ratedistortion import (
    DistortionMatrix,
    LambdaSweep,
    RDPoint,
    RDCurve,
    _grid_min_rate,
    assemble_curve,
    ba_rd_point,
    rate_at_distortion,
)
from .rng import make_generator
from .semantic import SynonymousMapping, pushforward


@dataclass(frozen=True, eq=False)
class SideInfoModel:
    pk: Distribution
    px_given_k: tuple[Distribution, ...]
    semantic_map: SynonymousMapping

    def __post_init__(self):
        rows = tuple(r if isinstance(r, Distribution) else Distribution(r) for r in self.px_given_k)
        object.__setattr__(self, "px_given_k", rows)
        if len(rows) != len(self.pk):
            raise ValidationError(f"{len(self.pk)} prior states but {len(rows)} conditionals")
        sizes = {len(r) for r in rows}
        if len(sizes) != 1:
            raise ValidationError("conditionals p(x|k) have different alphabet sizes")
        if sizes.pop() != self.semantic_map.n_symbols:
            raise ValidationError("semantic map does not cover the source alphabet")

    @property
    def n_k(self) -> int:
        return len(self.pk)

    @property
    def n_x(self) -> int:
        return len(self.px_given_k[0])

    @property
    def conditional_matrix(self) -> np.ndarray:
        return np.stack([r.probs for r in self.px_given_k])

    @property
    def px(self) -> Distribution:
        return Distribution(self.pk.probs @ self.conditional_matrix)


@dataclass(frozen=True, eq=False)
class SampleSet:
    pairs: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.pairs, dtype=np.int64).reshape(-1, 2) if np.size(self.pairs) else np.zeros((0, 2), np.int64)
        if a.shape[0] == 0:
            raise ValidationError("sample set is empty")
        if a.min() < 0:
            raise ValidationError("sample indices must be nonnegative")
        a.setflags(write=False)
        object.__setattr__(self, "pairs", a)

    def counts(self, n_k: int, n_x: int) -> np.ndarray:
        k, x = self.pairs[:, 0], self.pairs[:, 1]
        if k.max() >= n_k or x.max() >= n_x:
            raise ValidationError(f"sample index out of range for {n_k} prior states and {n_x} symbols")
        c = np.zeros((n_k, n_x), dtype=np.int64)
        np.add.at(c, (k, x), 1)
        return c

    @classmethod
    def load(cls, path) -> "SampleSet":
        """Two integer columns (k, x); comma, tab or whitespace separated; '#' starts a comment."""
        pairs = []
        with open(path, newline="") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                fields = line.replace(",", " ").split()
                if len(fields) != 2:
                    raise ValidationError(f"{path}:{lineno}: expected 2 columns (k, x), got {len(fields)}")
                try:
                    pairs.append((int(fields[0]), int(fields[1])))
                except ValueError:
                    raise ValidationError(f"{path}:{lineno}: non-integer field") from None
        return cls(np.array(pairs, dtype=np.int64))


def conditional_entropy_given_prior(m: SideInfoModel) -> float:
    return float(sum(pk * entropy(r) for pk, r in zip(m.pk.probs, m.px_given_k)))


def prior_gain(m: SideInfoModel) -> float:
    """I(X;K) = H(X) - H(X|K)."""
    return max(entropy(m.px) - conditional_entropy_given_prior(m), 0.0)


def _check_ds(m: SideInfoModel, ds: DistortionMatrix):
    c = m.semantic_map.n_classes
    if ds.shape != (c, c):
        raise ValidationError(f"semantic distortion must be {c}x{c}, got {ds.shape}")


def conditional_rd_point(m: SideInfoModel, ds: DistortionMatrix, lam: float, cfg: SolverConfig | None = None) -> RDPoint:
    """Per-state Blahut-Arimoto at one shared multiplier, averaged over p(k)."""
    _check_ds(m, ds)
    rate = dist = 0.0
    conv, iters = True, 0
    for pk, row in zip(m.pk.probs, m.px_given_k):
        if pk == 0:
            continue
        pt = ba_rd_point(pushforward(row, m.semantic_map), ds, lam, cfg)
        rate += pk * pt.rate
        dist += pk * pt.distortion
        conv &= pt.converged
        iters = max(iters, pt.iterations)
    return RDPoint(float(lam), rate, dist, conv, iters)


def conditional_rd_curve(
    m: SideInfoModel, ds: DistortionMatrix, sweep: LambdaSweep | None = None, cfg: SolverConfig | None = None
) -> RDCurve:
    sweep = sweep or LambdaSweep()
    return assemble_curve(conditional_rd_point(m, ds, float(lam), cfg) for lam in sweep.values())


def conditional_rate_at_distortion(m: SideInfoModel, ds: DistortionMatrix, target: float, cfg=None) -> RDPoint:
    _check_ds(m, ds)
    return rate_at_distortion(
        pushforward(m.px, m.semantic_map), ds, target, cfg, point_fn=lambda lam: conditional_rd_point(m, ds, lam, cfg)
    )


def brute_force_conditional_rd(m: SideInfoModel, ds: DistortionMatrix, target: float, grid_step: float = 0.01, refine_rounds: int = 0) -> float:
    """Grid search over all per-state conditionals p(xhat|x,k) under one shared distortion budget."""
    _check_ds(m, ds)
    d = ds.lift(m.semantic_map).cells
    blocks = [(row.probs, d, float(pk)) for pk, row in zip(m.pk.probs, m.px_given_k)]
    return _grid_min_rate(blocks, target, grid_step, refine_rounds)


def estimate_conditional_entropy(samples: SampleSet, n_k: int, n_x: int, smoothing: float = 1.0) -> float:
    """Plug-in H(X|K) from add-``smoothing`` conditionals weighted by empirical p(k)."""
    if smoothing < 0:
        raise ValidationError("smoothing must be >= 0")
    c = samples.counts(n_k, n_x).astype(float)
    nk = c.sum(axis=1)
    total = nk.sum()
    h = 0.0
    for k in np.flatnonzero(nk):
        row = (c[k] + smoothing) / (nk[k] + smoothing * n_x)
        h += nk[k] / total * plogp_sum(row)
    return h


def sample_model(m: SideInfoModel, n: int, seed: int, *stream: int) -> SampleSet:
    rng = make_generator(seed, *stream)
    k = rng.choice(m.n_k, size=n, p=m.pk.probs)
    cum = np.cumsum(m.conditional_matrix, axis=1)
    u = rng.random(n)
    x = np.minimum((u[:, None] >= cum[k]).sum(axis=1), m.n_x - 1)
    return SampleSet(np.column_stack([k, x]))


@dataclass(frozen=True)
class ScalingTrend:
    sizes: tuple[int, ...]
    estimates: tuple[float, ...]
    true_value: float
    smoothing: float
    seed: int


def scaling_trend_report(generator: SideInfoModel, sizes, seed: int, smoothing: float = 1.0) -> ScalingTrend:
    """Estimated H(X|K) from growing samples of ``generator``; size i uses substream i."""
    sizes = tuple(int(s) for s in sizes)
    if any(s < 1 for s in sizes) or any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValidationError("sizes must be positive and strictly increasing")
    est = tuple(
        estimate_conditional_entropy(sample_model(generator, n, seed, i), generator.n_k, generator.n_x, smoothing)
        for i, n in enumerate(sizes)
    )
    return ScalingTrend(sizes, est, conditional_entropy_given_prior(generator), smoothing, seed)
