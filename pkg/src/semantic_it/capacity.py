"""Classical and semantic channel capacity.

Classical capacity uses Blahut-Arimoto with a duality-gap stopping rule.
Semantic capacity maximizes a semantic mutual information over input laws,
either exactly (EQ5 with a product joint mapping, by enumerating one
representative input per class) or by multi-start projected gradient ascent.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InstanceTooLarge, ValidationError
from .probability import Channel, Distribution
from .rng import make_generator
from .semantic import JointSynonymousMapping, SynonymousMapping, Variant

MAX_TUPLES = 100_000
TIE_TOL = 1e-12


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-9
    max_iter: int = 10_000
    starts: int = 32
    seed: int = 0
    grid_step: float = 1e-2

    def __post_init__(self):
        if not self.tol > 0:
            raise ValidationError("tol must be > 0")
        if self.max_iter < 1:
            raise ValidationError("max_iter must be >= 1")
        if self.starts < 1:
            raise ValidationError("starts must be >= 1")
        if not 0 < self.grid_step <= 0.5:
            raise ValidationError("grid_step must lie in (0, 0.5]")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class CapacityResult:
    value: float
    argmax_input: Distribution
    iterations: int
    converged: bool
    method: str
    notes: tuple[str, ...] = ()
    history: tuple[float, ...] = field(default=(), repr=False)


def _log2_safe(a: np.ndarray) -> np.ndarray:
    return np.log2(np.maximum(a, 1e-300))


def _row_divergences(p: np.ndarray, w: np.ndarray) -> np.ndarray:
    """D(w[x] || p @ w) for every input x, in bits."""
    q = p @ w
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(w > 0, w * (np.log2(w) - _log2_safe(q)), 0.0)
    return t.sum(axis=1)


def _ba_step(p: np.ndarray, d: np.ndarray, rows: np.ndarray, mu: float) -> tuple[np.ndarray, float]:
    """Plain BA update, or an over-relaxed one (exponent mu > 1) when it does better.

    The plain step never decreases I(p), and the extrapolated step is only
    taken when it beats the plain one, so the value sequence stays monotone.
    Near-useless channels need this: plain BA's bound gap closes very slowly there.
    """
    base = p * np.exp2(d - d.max())
    base /= base.sum()
    if mu <= 1.0:
        return base, 2.0
    cand = p * np.exp2(mu * (d - d.max()))
    cand /= cand.sum()
    if cand @ _row_divergences(cand, rows) >= base @ _row_divergences(base, rows):
        return cand, mu * 2.0
    return base, max(1.0, mu / 4.0)


def blahut_arimoto_capacity(
    w: Channel, cfg: SolverConfig | None = None, *, record_history: bool = False
) -> CapacityResult:
    cfg = cfg or SolverConfig()
    rows = w.rows
    p = np.full(w.n_in, 1.0 / w.n_in)
    history = []
    converged = False
    value = 0.0
    it = 0
    mu = 1.0
    for it in range(1, cfg.max_iter + 1):
        d = _row_divergences(p, rows)
        value = float(p @ d)
        if record_history:
            history.append(value)
        # value <= C <= max_x d[x]
        if d.max() - value < cfg.tol:
            converged = True
            break
        p, mu = _ba_step(p, d, rows, mu)
    return CapacityResult(
        value=max(value, 0.0),
        argmax_input=Distribution(p),
        iterations=it,
        converged=converged,
        method="blahut-arimoto",
        history=tuple(history),
    )


def _indicator(labels: np.ndarray, m: int) -> np.ndarray:
    out = np.zeros((labels.size, m))
    out[np.arange(labels.size), labels] = 1.0
    return out


def _coarsen_columns(w: np.ndarray, labels: np.ndarray, m: int) -> np.ndarray:
    return w @ _indicator(labels, m)


class SemanticObjective:
    """p -> semantic mutual information of joint_from(p, w), with its gradient.

    Each of the three entropy terms is the entropy of a linear image of p:
    input term p @ mx, output term p @ my, joint term p @ mj.
    """

    def __init__(self, w: Channel, fx, fy, jm, variant):
        rows = w.rows
        self.variant = Variant(variant)
        if self.variant is Variant.EQ5:
            self.mx = _indicator(fx.class_of, fx.n_classes)
            self.my = _coarsen_columns(rows, fy.class_of, fy.n_classes)
        else:
            self.mx = np.eye(w.n_in)
            self.my = rows
        self.mj = np.zeros((w.n_in, jm.n_classes))
        for x in range(w.n_in):
            np.add.at(self.mj[x], jm.class_of_pair[x], rows[x])

    @staticmethod
    def _h(a: np.ndarray) -> float:
        nz = a[a > 0]
        return float(-np.sum(nz * np.log2(nz)))

    def value(self, p: np.ndarray) -> float:
        return self._h(p @ self.mx) + self._h(p @ self.my) - self._h(p @ self.mj)

    def gradient(self, p: np.ndarray) -> np.ndarray:
        # Evaluated a hair inside the simplex: at exactly-zero coordinates the
        # -p log p and joint terms cancel only in the limit.
        p = (1.0 - 1e-10) * p + 1e-10 / p.size
        # constant -1/ln2 offsets cancel on the simplex and are dropped
        return (
            -self.mx @ _log2_safe(p @ self.mx)
            - self.my @ _log2_safe(p @ self.my)
            + self.mj @ _log2_safe(p @ self.mj)
        )


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex."""
    n = v.size
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    rho = np.nonzero(u * np.arange(1, n + 1) > css)[0][-1]
    theta = css[rho] / (rho + 1)
    out = np.maximum(v - theta, 0.0)
    return out / out.sum()


def _ascend(obj: SemanticObjective, p0: np.ndarray, cfg: SolverConfig):
    p = project_simplex(p0)
    f = obj.value(p)
    step = 1.0
    for it in range(1, cfg.max_iter + 1):
        g = obj.gradient(p)
        while True:
            q = project_simplex(p + step * g)
            fq = obj.value(q)
            if fq >= f + 1e-4 * float(g @ (q - p)):
                break
            step *= 0.5
            if step < 1e-18:
                return p, f, it, True
        moved = float(np.max(np.abs(q - p)))
        gain = fq - f
        p, f = q, fq
        if moved < 1e-13 or (gain < cfg.tol * 1e-3 and moved < 1e-9):
            return p, f, it, True
        step = min(step * 2.0, 1e6)
    return p, f, cfg.max_iter, False


def _pick_best(candidates):
    """First candidate (in deterministic order) within TIE_TOL of the maximum value."""
    best = max(c[0] for c in candidates)
    for c in candidates:
        if c[0] >= best - TIE_TOL:
            return c
    raise AssertionError("unreachable")


def _check_dims(w: Channel, fx, fy, jm):
    if fx.n_symbols != w.n_in:
        raise ValidationError(f"input mapping covers {fx.n_symbols} symbols, channel has {w.n_in} inputs")
    if fy.n_symbols != w.n_out:
        raise ValidationError(f"output mapping covers {fy.n_symbols} symbols, channel has {w.n_out} outputs")
    if jm is not None and jm.shape != (w.n_in, w.n_out):
        raise ValidationError(f"joint mapping has shape {jm.shape}, channel is {(w.n_in, w.n_out)}")


def _enumerate_representatives(w: Channel, fx, fy, cfg: SolverConfig) -> CapacityResult:
    v = _coarsen_columns(w.rows, fy.class_of, fy.n_classes)
    classes = [fx.members(c) for c in range(fx.n_classes)]
    candidates = []
    for reps in itertools.product(*classes):
        reps = np.asarray(reps)
        res = blahut_arimoto_capacity(Channel(v[reps]), cfg)
        p = np.zeros(w.n_in)
        p[reps] = res.argmax_input.probs
        candidates.append((res.value, p, res.iterations, res.converged))
    value, p, iters, conv = _pick_best(candidates)
    return CapacityResult(
        value=value,
        argmax_input=Distribution(p),
        iterations=iters,
        converged=conv,
        method="representative-enum",
    )


def _multi_start(w: Channel, fx, fy, jm, variant, cfg: SolverConfig, notes=()) -> CapacityResult:
    obj = SemanticObjective(w, fx, fy, jm, variant)
    starts = [blahut_arimoto_capacity(w, cfg).argmax_input.probs]
    if cfg.starts > 1:
        starts.append(np.full(w.n_in, 1.0 / w.n_in))
    rng = make_generator(cfg.seed)
    while len(starts) < cfg.starts:
        starts.append(rng.dirichlet(np.ones(w.n_in)))
    candidates = [(f, p, it, conv) for p, f, it, conv in (_ascend(obj, s, cfg) for s in starts)]
    value, p, iters, conv = _pick_best(candidates)
    return CapacityResult(
        value=value,
        argmax_input=Distribution(p),
        iterations=iters,
        converged=conv,
        method="multi-start",
        notes=tuple(notes),
    )


def semantic_capacity(
    w: Channel,
    fx: SynonymousMapping,
    fy: SynonymousMapping,
    jm: JointSynonymousMapping | None = None,
    variant: Variant | str = Variant.EQ5,
    cfg: SolverConfig | None = None,
    method: str = "auto",
) -> CapacityResult:
    """Maximize semantic mutual information over the input distribution.

    ``method`` is ``auto``, ``enumerate`` or ``multi-start``. Enumeration is
    exact but only valid for EQ5 with a product joint mapping; if requested
    elsewhere it falls back to multi-start and says so in ``notes``.
    """
    cfg = cfg or SolverConfig()
    variant = Variant(variant)
    _check_dims(w, fx, fy, jm)
    if method not in ("auto", "enumerate", "multi-start"):
        raise ValidationError(f"unknown method {method!r}")
    is_product = jm is None or jm.is_product_of(fx, fy)
    if jm is None:
        jm = JointSynonymousMapping.product(fx, fy)
    exact_ok = variant is Variant.EQ5 and is_product
    n_tuples = math.prod(np.bincount(fx.class_of).tolist())
    notes = []
    if method == "enumerate" and not exact_ok:
        notes.append("enumeration requires variant eq5 with a product joint mapping; used multi-start")
    elif exact_ok and method != "multi-start" and n_tuples > MAX_TUPLES:
        notes.append(f"{n_tuples} representative tuples exceed {MAX_TUPLES}; used multi-start")
    elif exact_ok and method != "multi-start":
        return _enumerate_representatives(w, fx, fy, cfg)
    return _multi_start(w, fx, fy, jm, variant, cfg, notes)


@dataclass(frozen=True)
class CapacityComparison:
    C: float
    C_s: float
    gap: float
    classical: CapacityResult
    semantic: CapacityResult


def capacity_comparison_report(w, fx, fy, jm=None, variant=Variant.EQ5, cfg=None) -> CapacityComparison:
    classical = blahut_arimoto_capacity(w, cfg)
    semantic = semantic_capacity(w, fx, fy, jm, variant, cfg)
    gap = semantic.value - classical.value
    if Variant(variant) is Variant.UP and gap < -1e-6:
        raise RuntimeError(f"UP semantic capacity fell below classical capacity by {-gap:.3g}")
    return CapacityComparison(classical.value, semantic.value, gap, classical, semantic)


# -- exhaustive oracle -------------------------------------------------------

GRID_POINT_LIMIT = 200_000_000


def simplex_grid(total: int, n: int) -> np.ndarray:
    """All nonnegative integer vectors of length n summing to ``total``."""
    if n == 1:
        return np.array([[total]])
    if n == 2:
        a = np.arange(total + 1)
        return np.stack([a, total - a], axis=1)
    return np.concatenate(
        [np.column_stack([np.full(len(sub), i), sub]) for i in range(total + 1) for sub in [simplex_grid(total - i, n - 1)]]
    )


def _grid_objective(P: np.ndarray, rows: np.ndarray, fx, fy, jm, variant: Variant) -> np.ndarray:
    """Semantic mutual information for a batch of input laws, from the definition."""

    def h(a):
        with np.errstate(divide="ignore", invalid="ignore"):
            return -np.sum(np.where(a > 0, a * np.log2(a), 0.0), axis=1)

    joint = P[:, :, None] * rows[None, :, :]
    k = P.shape[0]
    coarse = np.zeros((k, jm.n_classes))
    flat = jm.class_of_pair.ravel()
    for c in range(jm.n_classes):
        coarse[:, c] = joint.reshape(k, -1)[:, flat == c].sum(axis=1)
    px = joint.sum(axis=2)
    py = joint.sum(axis=1)
    if variant is Variant.EQ5:
        px = np.stack([px[:, fx.class_of == c].sum(axis=1) for c in range(fx.n_classes)], axis=1)
        py = np.stack([py[:, fy.class_of == c].sum(axis=1) for c in range(fy.n_classes)], axis=1)
    return h(px) + h(py) - h(coarse)


def grid_oracle_capacity(
    w: Channel,
    fx: SynonymousMapping,
    fy: SynonymousMapping,
    jm: JointSynonymousMapping | None = None,
    variant: Variant | str = Variant.EQ5,
    grid_step: float = 1e-2,
) -> float:
    """Maximum of the semantic objective over a regular grid on the input simplex."""
    variant = Variant(variant)
    _check_dims(w, fx, fy, jm)
    if w.n_in > 4:
        raise InstanceTooLarge(f"grid oracle supports at most 4 inputs, got {w.n_in}")
    if not 0 < grid_step <= 0.5:
        raise ValidationError("grid_step must lie in (0, 0.5]")
    if jm is None:
        jm = JointSynonymousMapping.product(fx, fy)
    total = int(round(1.0 / grid_step))
    if math.comb(total + w.n_in - 1, w.n_in - 1) > GRID_POINT_LIMIT:
        raise InstanceTooLarge("grid too fine for this alphabet")
    best = -math.inf
    rows = w.rows
    if w.n_in <= 2:
        chunks = [simplex_grid(total, w.n_in)]
    else:
        chunks = (
            np.column_stack([np.full(len(sub), i), sub])
            for i in range(total + 1)
            for sub in [simplex_grid(total - i, w.n_in - 1)]
        )
    for ints in chunks:
        vals = _grid_objective(ints / total, rows, fx, fy, jm, variant)
        best = max(best, float(vals.max()))
    return best
