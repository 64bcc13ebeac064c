"""Rate-distortion functions: Blahut-Arimoto, lambda sweeps, brute-force oracle.

The Lagrange multiplier ``lam`` is in bits per unit distortion: each BA point
minimizes I(X; Xhat) + lam * E[d], so the curve's slope at that point is -lam.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .capacity import SolverConfig, simplex_grid
from .errors import InstanceTooLarge, ValidationError
from .probability import Distribution
from .semantic import SynonymousMapping, pushforward


@dataclass(frozen=True, eq=False)
class DistortionMatrix:
    cells: np.ndarray

    def __post_init__(self):
        a = np.array(self.cells, dtype=float)
        if a.ndim != 2 or a.size == 0:
            raise ValidationError("distortion matrix: expected a non-empty 2-d matrix")
        if np.any(np.isnan(a)):
            raise ValidationError("distortion matrix: NaN entry")
        if np.any(a < 0):
            r, c = np.argwhere(a < 0)[0]
            raise ValidationError(f"distortion matrix: negative entry at row {r}, column {c}")
        if not np.all(np.isfinite(a.min(axis=1))):
            r = int(np.flatnonzero(~np.isfinite(a.min(axis=1)))[0])
            raise ValidationError(f"distortion matrix: row {r} has no finite entry")
        a.setflags(write=False)
        object.__setattr__(self, "cells", a)

    @property
    def shape(self) -> tuple[int, int]:
        return self.cells.shape

    @classmethod
    def hamming(cls, n: int) -> "DistortionMatrix":
        return cls(1.0 - np.eye(n))

    def lift(self, f: SynonymousMapping, g: SynonymousMapping | None = None) -> "DistortionMatrix":
        """Symbol-level matrix d(x, xhat) = self[f(x), g(xhat)]."""
        g = g or f
        if self.shape != (f.n_classes, g.n_classes):
            raise ValidationError("lift: class counts do not match the distortion matrix")
        return DistortionMatrix(self.cells[np.ix_(f.class_of, g.class_of)])


@dataclass(frozen=True)
class RDPoint:
    lam: float
    rate: float
    distortion: float
    converged: bool = True
    iterations: int = 0


@dataclass(frozen=True)
class RDCurve:
    points: tuple[RDPoint, ...]

    @property
    def rates(self) -> np.ndarray:
        return np.array([pt.rate for pt in self.points])

    @property
    def distortions(self) -> np.ndarray:
        return np.array([pt.distortion for pt in self.points])

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([pt.lam for pt in self.points])

    @property
    def converged(self) -> bool:
        return all(pt.converged for pt in self.points)

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class LambdaSweep:
    lambda_min: float = 1e-2
    lambda_max: float = 64.0
    steps: int = 64
    geometric: bool = True

    def __post_init__(self):
        if not (self.lambda_min >= 0 and self.lambda_max > self.lambda_min):
            raise ValidationError("sweep needs 0 <= lambda_min < lambda_max")
        if self.steps < 2:
            raise ValidationError("sweep needs at least 2 steps")

    def values(self) -> np.ndarray:
        if not self.geometric:
            return np.linspace(self.lambda_min, self.lambda_max, self.steps)
        if self.lambda_min == 0:
            # geometric spacing cannot start at 0: keep 0, space the rest over 4 decades
            return np.concatenate([[0.0], np.geomspace(self.lambda_max * 1e-4, self.lambda_max, self.steps - 1)])
        return np.geomspace(self.lambda_min, self.lambda_max, self.steps)


def _check_pair(p: Distribution, d: DistortionMatrix):
    if len(p) != d.shape[0]:
        raise ValidationError(f"source has {len(p)} symbols, distortion matrix has {d.shape[0]} rows")


def zero_rate_distortion(p: Distribution, d: DistortionMatrix) -> float:
    """Smallest distortion achievable at rate 0: best single reconstruction."""
    _check_pair(p, d)
    return float(np.min(p.probs @ d.cells))


def min_distortion(p: Distribution, d: DistortionMatrix) -> float:
    _check_pair(p, d)
    return float(p.probs @ d.cells.min(axis=1))


def _mutual_information(px: np.ndarray, q_cond: np.ndarray) -> float:
    joint = px[:, None] * q_cond
    out = joint.sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(joint > 0, joint * (np.log2(q_cond) - np.log2(np.where(out > 0, out, 1.0))[None, :]), 0.0)
    return max(float(t.sum()), 0.0)


def ba_rd_point(p: Distribution, d: DistortionMatrix, lam: float, cfg: SolverConfig | None = None) -> RDPoint:
    """One point of R(D) by Blahut-Arimoto at slope -lam.

    Stops when the gap between Blahut's upper and lower bounds on R falls
    below ``cfg.tol``.
    """
    cfg = cfg or SolverConfig()
    _check_pair(p, d)
    if lam < 0:
        raise ValidationError("lambda must be >= 0")
    px = p.probs
    if lam == 0:
        # limit lam -> 0+: all mass on the single best reconstruction
        return RDPoint(0.0, 0.0, zero_rate_distortion(p, d), True, 0)
    sup = px > 0
    ps = px[sup]
    dm = d.cells[sup]
    shifted = dm - dm.min(axis=1, keepdims=True)
    with np.errstate(invalid="ignore"):
        a = np.where(np.isfinite(shifted), np.exp2(-lam * shifted), 0.0)
    # Below the critical slope the optimum is the zero-rate vertex, which BA
    # only approaches geometrically. Its dual gap certifies it directly.
    best = int(np.argmin(ps @ np.where(np.isfinite(dm), dm, np.inf)))
    if a[:, best].min() > 0 and np.log2(((ps / a[:, best]) @ a).max()) < cfg.tol:
        return RDPoint(float(lam), 0.0, float(ps @ dm[:, best]), True, 0)
    q = np.full(d.shape[1], 1.0 / d.shape[1])
    converged = False
    it = 0
    for it in range(1, cfg.max_iter + 1):
        z = a @ q
        c = (ps / z) @ a
        live = q > 0
        logc = np.log2(np.maximum(c, 1e-300))
        if logc.max() - float(q[live] @ logc[live]) < cfg.tol:
            converged = True
            break
        q = q * c
        q /= q.sum()
    z = a @ q
    q_cond = q[None, :] * a / z[:, None]
    rate = _mutual_information(ps, q_cond)
    with np.errstate(invalid="ignore"):
        dist = float(ps @ np.where(q_cond > 0, q_cond * dm, 0.0).sum(axis=1))
    return RDPoint(float(lam), rate, dist, converged, it)


def assemble_curve(points) -> RDCurve:
    """Sort by distortion (ties: higher rate first) and drop near-duplicates."""
    pts = sorted(points, key=lambda pt: (pt.distortion, -pt.rate, pt.lam))
    kept = []
    for pt in pts:
        if kept and abs(pt.distortion - kept[-1].distortion) <= 1e-9 and abs(pt.rate - kept[-1].rate) <= 1e-9:
            continue
        kept.append(pt)
    return RDCurve(tuple(kept))


def rd_curve(p: Distribution, d: DistortionMatrix, sweep: LambdaSweep | None = None, cfg: SolverConfig | None = None) -> RDCurve:
    sweep = sweep or LambdaSweep()
    return assemble_curve(ba_rd_point(p, d, float(lam), cfg) for lam in sweep.values())


def _check_semantic(p: Distribution, f: SynonymousMapping, ds: DistortionMatrix):
    if ds.shape != (f.n_classes, f.n_classes):
        raise ValidationError(f"semantic distortion must be {f.n_classes}x{f.n_classes} over classes, got {ds.shape}")
    return pushforward(p, f)


def semantic_rd_curve(
    p: Distribution, f: SynonymousMapping, ds: DistortionMatrix, sweep: LambdaSweep | None = None, cfg: SolverConfig | None = None
) -> RDCurve:
    """Semantic R(D): the classical curve of the class-level source under ds.

    Any class-level test channel is realized by a symbol-level one that picks
    a reconstruction inside the target class, and every symbol-level channel
    induces a class-level one with the same objective and distortion.
    """
    return rd_curve(_check_semantic(p, f, ds), ds, sweep, cfg)


def _large_lambda(d: DistortionMatrix) -> float:
    gaps = d.cells - d.cells.min(axis=1, keepdims=True)
    pos = gaps[np.isfinite(gaps) & (gaps > 0)]
    return 128.0 / float(pos.min()) if pos.size else 1.0


def _slide(pt: RDPoint, target: float) -> RDPoint:
    """Move along the tangent (slope -lam) from a BA point to the requested distortion."""
    rate = max(pt.rate - pt.lam * (target - pt.distortion), 0.0)
    return RDPoint(pt.lam, rate, target, pt.converged, pt.iterations)


def rate_at_distortion(
    p: Distribution,
    d: DistortionMatrix,
    target: float,
    cfg: SolverConfig | None = None,
    *,
    point_fn=None,
    d_tol: float = 1e-6,
) -> RDPoint:
    """R(target) by bisection on lambda.

    If the distortion jumps across ``target`` (a linear piece of the curve)
    the chord between the bracketing points is returned, which is exact on
    that piece. ``point_fn(lam)`` overrides the per-lambda solver.
    """
    point_fn = point_fn or (lambda lam: ba_rd_point(p, d, lam, cfg))
    zero = point_fn(0.0)
    if target >= zero.distortion - 1e-15:
        return RDPoint(0.0, 0.0, target, True, 0)
    lam_cap = _large_lambda(d)
    dmin = min_distortion(p, d)
    if target < dmin - 1e-12:
        raise ValidationError(f"distortion {target} is below the minimum achievable {dmin}")
    if target <= dmin + 1e-15:
        # the curve is steep here; solve the endpoint directly instead of bisecting
        return point_fn(lam_cap)
    # d_tol is absolute for unit-scale problems and shrinks with the distortion span
    d_tol = d_tol * min(1.0, zero.distortion - dmin)
    lo_pt = zero
    lam = 1.0
    hi_pt = point_fn(lam)
    while hi_pt.distortion > target + d_tol and lam < lam_cap:
        lo_pt = hi_pt
        lam = min(lam * 2.0, lam_cap)
        hi_pt = point_fn(lam)
    if hi_pt.distortion > target + d_tol:
        raise ValidationError(f"distortion {target} is below the minimum achievable {hi_pt.distortion}")
    if abs(hi_pt.distortion - target) <= d_tol:
        return _slide(hi_pt, target)
    for _ in range(200):
        mid = 0.5 * (lo_pt.lam + hi_pt.lam)
        if mid in (lo_pt.lam, hi_pt.lam):
            break
        pt = point_fn(mid)
        if abs(pt.distortion - target) <= d_tol:
            return _slide(pt, target)
        if pt.distortion > target:
            lo_pt = pt
        else:
            hi_pt = pt
    t = (lo_pt.distortion - target) / (lo_pt.distortion - hi_pt.distortion)
    rate = lo_pt.rate + t * (hi_pt.rate - lo_pt.rate)
    return RDPoint(hi_pt.lam, rate, target, lo_pt.converged and hi_pt.converged, hi_pt.iterations)


def semantic_rate_at_distortion(p, f, ds, target, cfg=None) -> RDPoint:
    return rate_at_distortion(_check_semantic(p, f, ds), ds, target, cfg)


# -- brute-force oracle ------------------------------------------------------

GRID_POINT_LIMIT = 20_000_000
_CHUNK = 200_000


def _batch_rates(weights, blocks, Q):
    """sum_k w_k I(X_k; Xhat_k) for a batch Q of stacked conditionals (K, rows, m)."""
    total = np.zeros(Q.shape[0])
    for w, px, sl in zip(weights, (b[0] for b in blocks), (b[2] for b in blocks)):
        qc = Q[:, sl, :]
        joint = px[None, :, None] * qc
        out = joint.sum(axis=1, keepdims=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(joint > 0, joint * np.log2(qc / out), 0.0)
        total += w * t.sum(axis=(1, 2))
    return total


class _SurfaceGrid:
    """Conditionals on the constraint surface E[d] = D, parametrized by free grid coordinates.

    Rows are the stacked source symbols of all blocks. One pivot row absorbs
    the distortion slack by splitting the mass it leaves on two pivot
    reconstructions a, b.
    """

    def __init__(self, row_weight, dist, target, pivot):
        self.row_weight = row_weight
        self.dist = dist
        self.target = target
        n, m = dist.shape
        spread = np.abs(dist[pivot][:, None] - dist[pivot][None, :])
        self.a, self.b = np.unravel_index(int(np.argmax(spread)), spread.shape)
        self.pivot = pivot
        self.ok = row_weight[pivot] * spread.max() > 0
        self.n, self.m = n, m
        self.others = [c for c in range(m) if c not in (self.a, self.b)]

    def build(self, free_rows, pivot_others):
        """free_rows: (K, n-1, m) rows except the pivot; pivot_others: (K, m-2) masses off {a, b}."""
        k = free_rows.shape[0]
        n, m = self.n, self.m
        Q = np.empty((k, n, m))
        rest = [r for r in range(n) if r != self.pivot]
        Q[:, rest, :] = free_rows
        s = 1.0 - pivot_others.sum(axis=1)
        rw, dm = self.row_weight, self.dist
        used = np.einsum("r,krm,rm->k", rw[rest], free_rows, dm[rest]) if rest else np.zeros(k)
        used = used + rw[self.pivot] * (pivot_others @ dm[self.pivot, self.others] + s * dm[self.pivot, self.b])
        slope = rw[self.pivot] * (dm[self.pivot, self.a] - dm[self.pivot, self.b])
        t = (self.target - used) / slope
        Q[:, self.pivot, self.others] = pivot_others
        Q[:, self.pivot, self.a] = t
        Q[:, self.pivot, self.b] = s - t
        valid = (s >= -1e-12) & (t >= -1e-12) & (s - t >= -1e-12)
        return np.clip(Q, 0.0, 1.0), valid


def _grid_min_rate(blocks, target, step, refine_rounds):
    """Minimize the weighted rate over gridded conditionals meeting the shared constraint.

    blocks: list of (px, dist, weight); all blocks share the reconstruction alphabet.
    """
    m = blocks[0][1].shape[1]
    row_weight = np.concatenate([w * px for px, _, w in blocks])
    dist = np.vstack([dm for _, dm, _ in blocks])
    bounds, start = [], 0
    for px, dm, w in blocks:
        bounds.append((px, dm, slice(start, start + px.size)))
        start += px.size
    weights = [w for _, _, w in blocks]
    n = dist.shape[0]

    zero_rate = float(np.min(row_weight @ dist))
    if target >= zero_rate - 1e-15:
        return 0.0
    if target < float(row_weight @ dist.min(axis=1)) - 1e-12:
        return math.inf

    total = int(round(1.0 / step))
    row_pts = simplex_grid(total, m) / total
    g = row_pts.shape[0]
    pivot_pts = simplex_grid(total, m - 1)[:, : m - 2] / total if m > 2 else np.zeros((1, 0))
    n_free = g ** (n - 1)
    surfaces = [s for s in (_SurfaceGrid(row_weight, dist, target, r) for r in range(n)) if s.ok]
    count = n_free * pivot_pts.shape[0] * len(surfaces)
    if count > GRID_POINT_LIMIT:
        raise InstanceTooLarge(f"{count} grid points exceed the limit {GRID_POINT_LIMIT}; use a coarser step")

    # Every row takes a turn as pivot: a pivot stuck on a simplex face at the
    # optimum would otherwise leave no feasible grid points nearby.
    best_rate, best = math.inf, None
    for surf in surfaces:
        # free rows enumerated as mixed-radix indices into row_pts
        for start_idx in range(0, n_free * pivot_pts.shape[0], _CHUNK):
            idx = np.arange(start_idx, min(start_idx + _CHUNK, n_free * pivot_pts.shape[0]))
            piv_idx, free_idx = np.divmod(idx, n_free)
            digits = np.stack([(free_idx // g**r) % g for r in range(n - 1)], axis=1)
            free_rows = row_pts[digits]
            Q, valid = surf.build(free_rows, pivot_pts[piv_idx])
            if not valid.any():
                continue
            rates = np.where(valid, _batch_rates(weights, bounds, Q), np.inf)
            i = int(np.argmin(rates))
            if rates[i] < best_rate:
                best_rate = float(rates[i])
                best = (surf, free_rows[i].copy(), pivot_pts[piv_idx[i]].copy())
    if best is None:
        return math.inf
    if refine_rounds:
        best_rate = _refine(best[0], weights, bounds, best[1:], best_rate, step, refine_rounds)
    return best_rate


def _refine(surf, weights, bounds, theta, rate, step, rounds):
    """Local exhaustive grids on the constraint surface, halving the spacing when stuck."""
    free_rows, piv = theta
    m = surf.m
    # free coordinates: first m-1 entries of each free row, then the pivot's off-pair masses
    x0 = np.concatenate([free_rows[:, : m - 1].ravel(), piv])
    dim = x0.size
    offsets = np.array(np.meshgrid(*([np.arange(-2, 3)] * dim), indexing="ij")).reshape(dim, -1).T
    h = step / 2
    for _ in range(rounds):
        cand = x0[None, :] + h * offsets
        nf = free_rows.shape[0]
        fr = cand[:, : nf * (m - 1)].reshape(-1, nf, m - 1)
        last = 1.0 - fr.sum(axis=2, keepdims=True)
        rows = np.concatenate([fr, last], axis=2)
        ok = np.all(rows >= -1e-15, axis=(1, 2)) & np.all(cand >= -1e-15, axis=1)
        Q, valid = surf.build(np.clip(rows, 0, 1), cand[:, nf * (m - 1):])
        valid &= ok
        rates = np.where(valid, _batch_rates(weights, bounds, Q), np.inf)
        i = int(np.argmin(rates))
        if rates[i] < rate - 1e-15:
            rate = float(rates[i])
            x0 = cand[i]
        else:
            h /= 2
    return rate


def brute_force_rd(
    p: Distribution, d: DistortionMatrix, target: float, channel_grid_step: float = 0.01, refine_rounds: int = 0
) -> float:
    """Grid-search R(target): min I(X; Xhat) over gridded conditionals with E[d] <= target.

    The grid is laid on the surface E[d] = target (one pivot entry is solved
    for), so every grid point is feasible and the result is an upper bound on
    the true R(target). ``refine_rounds`` adds local grid searches around the
    best point with successively halved spacing.
    """
    _check_pair(p, d)
    if d.shape[0] * d.shape[1] > 9:
        raise InstanceTooLarge(f"brute force supports n_src * n_rec <= 9, got {d.shape}")
    return _grid_min_rate([(p.probs, d.cells, 1.0)], target, channel_grid_step, refine_rounds)
