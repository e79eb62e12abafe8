"""Bond percolation engine.

Samplers keep each edge independently with probability p; components come
from union-find.  Newman-Ziff sweeps add one random edge permutation at a
time and record microcanonical statistics for every edge count m, which
binomial smoothing converts to canonical (fixed-p) statistics for any p.
Multi-phase sprinkling expresses one retention probability as a union of
independent phases via (1-p1)(1-p2) = 1-p.

Trial t of any Monte Carlo run draws from stream (seed, t); accumulator
reduction happens in a fixed trial-block order, so results are reproducible
and independent of the worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy import stats as _sps

from ._kernels import batch_cluster_stats, root_labels_from_mask, sweep_trial
from ._rng import stream
from .errors import PreconditionError
from .graphs import Graph

_TRIAL_BLOCK = 64  # trials per reduction block; fixed so results are thread-count invariant


class Estimate(NamedTuple):
    """A Monte Carlo estimate with its standard error."""

    value: float
    se: float


# ---------------------------------------------------------------------------
# Large-component thresholds
# ---------------------------------------------------------------------------

def as_fraction(x) -> Fraction:
    """Exact rational view of a threshold parameter.

    Floats are interpreted by their shortest decimal representation, so 0.2
    means exactly 1/5 rather than its binary neighbour.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise PreconditionError(f"fraction parameter must be finite, got {x}")
        return Fraction(str(x))
    raise PreconditionError(f"cannot interpret {x!r} as a fraction")


def large_threshold(n: int, c=None, omega: Optional[float] = None) -> int:
    """Smallest component size that counts as large.

    Linear mode: size >= c*n (c rational in (0,1]).  Power mode: size >=
    n**omega with omega in (0,1); the ceiling is taken with a 1e-9 slack to
    absorb float noise in the power.
    """
    if (c is None) == (omega is None):
        raise PreconditionError("exactly one of c and omega must be given")
    if c is not None:
        cf = as_fraction(c)
        if not (0 < cf <= 1):
            raise PreconditionError(f"c must be in (0, 1], got {c}")
        return max(1, math.ceil(cf * n))
    if not (0.0 < omega < 1.0):
        raise PreconditionError(f"omega must be in (0, 1), got {omega}")
    return max(1, math.ceil(n ** omega - 1e-9))


# ---------------------------------------------------------------------------
# Single configurations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PercSample:
    """One percolation configuration with its component decomposition.

    sizes is sorted descending; labels[v] indexes sizes_by_label, which keeps
    component sizes in label order.
    """

    graph: Graph
    open: np.ndarray
    labels: np.ndarray
    sizes_by_label: np.ndarray
    sizes: np.ndarray
    p: float


def from_open_mask(g: Graph, open_mask: np.ndarray, p: float) -> PercSample:
    """Wrap an explicit open-edge indicator vector into a PercSample."""
    open_mask = np.ascontiguousarray(np.asarray(open_mask, dtype=bool))
    if open_mask.shape != (g.m,):
        raise PreconditionError(f"open mask must have shape ({g.m},)")
    roots = np.empty(g.n, dtype=np.int64)
    eu = np.ascontiguousarray(g.edges[:, 0])
    ev = np.ascontiguousarray(g.edges[:, 1])
    root_labels_from_mask(g.n, eu, ev, open_mask, roots)
    _, labels, counts = np.unique(roots, return_inverse=True, return_counts=True)
    sizes = np.sort(counts.astype(np.int64))[::-1]
    return PercSample(graph=g, open=open_mask, labels=labels.astype(np.int64),
                      sizes_by_label=counts.astype(np.int64), sizes=sizes, p=float(p))


def sample(g: Graph, p: float, seed: int) -> PercSample:
    """Retain each edge independently with probability p.

    With a shared seed the per-edge uniforms are shared across p values, so
    open(p) is a subset of open(p') whenever p <= p' (monotone coupling).
    """
    _check_prob(p, "p")
    rng = stream(seed)
    open_mask = rng.random(g.m) < p
    return from_open_mask(g, open_mask, p)


class ComponentStats(NamedTuple):
    l1: int
    l2: int
    counts: dict  # threshold -> number of components at least that size


def component_stats(s: PercSample, thresholds: Sequence[int]) -> ComponentStats:
    """Exact L1, L2 and per-threshold component counts for one sample."""
    sizes = s.sizes
    l1 = int(sizes[0]) if sizes.size else 0
    l2 = int(sizes[1]) if sizes.size > 1 else 0
    counts = {int(t): int(np.count_nonzero(sizes >= int(t))) for t in thresholds}
    return ComponentStats(l1=l1, l2=l2, counts=counts)


def count_large_components(s: PercSample, c=None, omega: Optional[float] = None) -> int:
    """Number of components of size at least the large threshold."""
    t = large_threshold(s.graph.n, c=c, omega=omega)
    return int(np.count_nonzero(s.sizes >= t))


# ---------------------------------------------------------------------------
# Newman-Ziff sweeps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SmoothedCurves:
    """Canonical statistics on a p-grid, with standard errors across sweeps."""

    p_grid: np.ndarray
    l1_frac: np.ndarray
    l1_frac_se: np.ndarray
    l2_frac: np.ndarray
    l2_frac_se: np.ndarray
    two_ge: np.ndarray     # (num thresholds, len(p_grid))
    two_ge_se: np.ndarray


@dataclass(frozen=True)
class SweepRecord:
    """Accumulated microcanonical statistics for every edge count m."""

    n: int
    m_max: int
    trials: int
    thresholds: tuple[int, ...]
    l1_mean: np.ndarray            # (m_max+1,)
    l2_mean: np.ndarray
    count_ge_mean: np.ndarray      # (k, m_max+1)
    two_ge_mean: np.ndarray        # (k, m_max+1), mean of the >=2 indicator
    curves: Optional[SmoothedCurves] = None


class _BlockAcc:
    """Per-block accumulator; blocks are reduced in index order."""

    def __init__(self, m: int, k: int, grid_len: int):
        self.l1 = np.zeros(m + 1)
        self.l2 = np.zeros(m + 1)
        self.cnt = np.zeros((k, m + 1))
        self.two = np.zeros((k, m + 1))
        if grid_len:
            self.sm = np.zeros((2 + k, grid_len))
            self.smsq = np.zeros((2 + k, grid_len))
        else:
            self.sm = self.smsq = None


def newman_ziff_sweep(g: Graph, trials: int, thresholds: Sequence[int], seed: int,
                      p_grid: Optional[Sequence[float]] = None,
                      threads: int = 1) -> SweepRecord:
    """Run `trials` independent sweeps and average their trajectories.

    When p_grid is given, every sweep trajectory is also binomially smoothed
    onto the grid so the returned curves carry proper per-point standard
    errors across sweeps.
    """
    if trials < 1:
        raise PreconditionError(f"trials must be >= 1, got {trials}")
    th = tuple(int(t) for t in thresholds)
    if any(t < 1 for t in th):
        raise PreconditionError("thresholds must be >= 1")
    th_arr = np.asarray(th, dtype=np.int64)
    m, n, k = g.m, g.n, len(th)
    eu = np.ascontiguousarray(g.edges[:, 0])
    ev = np.ascontiguousarray(g.edges[:, 1])

    grid = None
    weights_t = None
    if p_grid is not None:
        grid = np.asarray([float(p) for p in p_grid])
        for p in grid:
            _check_prob(p, "p_grid entry")
        weights_t = binom_weight_matrix(m, grid).T  # (m+1, G)

    grid_len = 0 if grid is None else len(grid)
    starts = list(range(0, trials, _TRIAL_BLOCK))

    def run_block(start: int) -> _BlockAcc:
        acc = _BlockAcc(m, k, grid_len)
        parent = np.empty(n, dtype=np.int64)
        size = np.empty(n, dtype=np.int64)
        cnt = np.empty(n + 1, dtype=np.int64)
        l1_traj = np.empty(m + 1)
        l2_traj = np.empty(m + 1)
        cnt_traj = np.empty((k, m + 1))
        two_traj = np.empty((k, m + 1))
        stack = np.empty((2 + k, m + 1)) if grid_len else None
        for t in range(start, min(start + _TRIAL_BLOCK, trials)):
            order = stream(seed, t).permutation(m).astype(np.int64)
            sweep_trial(n, eu, ev, order, th_arr,
                        l1_traj, l2_traj, cnt_traj, two_traj, parent, size, cnt)
            acc.l1 += l1_traj
            acc.l2 += l2_traj
            acc.cnt += cnt_traj
            acc.two += two_traj
            if grid_len:
                stack[0] = l1_traj
                stack[1] = l2_traj
                stack[2:] = two_traj
                sm = stack @ weights_t
                acc.sm += sm
                acc.smsq += sm * sm
        return acc

    if threads <= 1 or len(starts) == 1:
        accs = [run_block(s) for s in starts]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            accs = list(pool.map(run_block, starts))

    total = _BlockAcc(m, k, grid_len)
    for acc in accs:  # fixed block order keeps the reduction deterministic
        total.l1 += acc.l1
        total.l2 += acc.l2
        total.cnt += acc.cnt
        total.two += acc.two
        if grid_len:
            total.sm += acc.sm
            total.smsq += acc.smsq

    curves = None
    if grid_len:
        mean = total.sm / trials
        if trials > 1:
            var = np.maximum(total.smsq - trials * mean * mean, 0.0) / (trials - 1)
            se = np.sqrt(var / trials)
        else:
            se = np.zeros_like(mean)
        curves = SmoothedCurves(
            p_grid=grid,
            l1_frac=mean[0] / n, l1_frac_se=se[0] / n,
            l2_frac=mean[1] / n, l2_frac_se=se[1] / n,
            two_ge=mean[2:], two_ge_se=se[2:],
        )
    return SweepRecord(
        n=n, m_max=m, trials=trials, thresholds=th,
        l1_mean=total.l1 / trials, l2_mean=total.l2 / trials,
        count_ge_mean=total.cnt / trials, two_ge_mean=total.two / trials,
        curves=curves,
    )


# ---------------------------------------------------------------------------
# Binomial smoothing
# ---------------------------------------------------------------------------

def binom_weights(m: int, p: float) -> np.ndarray:
    """Binomial(m, p) pmf over 0..m; endpoints are exact unit vectors."""
    _check_prob(p, "p")
    w = np.zeros(m + 1)
    if p == 0.0:
        w[0] = 1.0
    elif p == 1.0:
        w[m] = 1.0
    else:
        w = _sps.binom.pmf(np.arange(m + 1), m, p)
    return w


def binom_weight_matrix(m: int, p_grid: np.ndarray) -> np.ndarray:
    return np.stack([binom_weights(m, float(p)) for p in p_grid])


class SmoothedStats(NamedTuple):
    p: float
    l1: float
    l2: float
    count_ge: dict  # threshold -> E_p[count of components >= threshold]
    two_ge: dict    # threshold -> P_p(count >= 2)


def binomial_smooth(rec: SweepRecord, p: float) -> SmoothedStats:
    """Canonical means at retention probability p from a sweep record."""
    w = binom_weights(rec.m_max, p)
    count_ge = {s: float(rec.count_ge_mean[j] @ w) for j, s in enumerate(rec.thresholds)}
    two_ge = {s: float(rec.two_ge_mean[j] @ w) for j, s in enumerate(rec.thresholds)}
    return SmoothedStats(p=float(p), l1=float(rec.l1_mean @ w), l2=float(rec.l2_mean @ w),
                         count_ge=count_ge, two_ge=two_ge)


# ---------------------------------------------------------------------------
# Sprinkling
# ---------------------------------------------------------------------------

def sprinkle_split(p: float, p1: float) -> float:
    """The p2 with (1-p1)(1-p2) = 1-p: sprinkling phase completion."""
    _check_prob(p, "p")
    _check_prob(p1, "p1")
    if p1 > p:
        raise PreconditionError(f"p1={p1} must not exceed p={p}")
    if p == 1.0:
        return 0.0 if p1 == 1.0 else 1.0
    if p1 == 1.0:
        raise PreconditionError("p1 = 1 with p < 1 is infeasible")
    return 1.0 - (1.0 - p) / (1.0 - p1)


@dataclass(frozen=True)
class SprinklePlan:
    """Phase retention probabilities; the union retains with 1 - prod(1-p_i)."""

    phases: tuple[float, ...]

    def __post_init__(self):
        if not self.phases:
            raise PreconditionError("a sprinkle plan needs at least one phase")
        for p in self.phases:
            _check_prob(p, "phase probability")

    @property
    def union_p(self) -> float:
        miss = 1.0
        for p in self.phases:
            miss *= 1.0 - p
        return 1.0 - miss


@dataclass(frozen=True)
class SprinkleResult:
    phase_open: np.ndarray  # (num phases, m) bool
    union: PercSample


def sprinkle_union(g: Graph, plan: SprinklePlan, seed: int) -> SprinkleResult:
    """Sample every phase independently and union the open sets.

    Phase i draws from stream (seed, i); the union edge-marginal is exactly
    plan.union_p.
    """
    masks = np.zeros((len(plan.phases), g.m), dtype=bool)
    for i, p in enumerate(plan.phases):
        masks[i] = stream(seed, i).random(g.m) < p
    union_mask = masks.any(axis=0)
    return SprinkleResult(phase_open=masks, union=from_open_mask(g, union_mask, plan.union_p))


# ---------------------------------------------------------------------------
# Direct Monte Carlo estimation
# ---------------------------------------------------------------------------

class MCClusterProbs(NamedTuple):
    trials: int
    p_l1_ge: dict    # threshold -> Estimate of P(L1 >= threshold)
    p_two_ge: dict   # threshold -> Estimate of P(count >= 2)
    mean_l1: Estimate
    mean_l2: Estimate


def mc_cluster_probs(g: Graph, p: float, thresholds: Sequence[int], trials: int,
                     seed: int, batch_size: int = 16384) -> MCClusterProbs:
    """Estimate cluster-event probabilities by direct sampling.

    Batch b draws its open matrix from stream (seed, b); per-edge uniforms
    are shared across p for a fixed seed, preserving the monotone coupling.
    """
    _check_prob(p, "p")
    if trials < 1:
        raise PreconditionError(f"trials must be >= 1, got {trials}")
    th = tuple(int(t) for t in thresholds)
    th_arr = np.asarray(th, dtype=np.int64)
    eu = np.ascontiguousarray(g.edges[:, 0])
    ev = np.ascontiguousarray(g.edges[:, 1])
    k = len(th)
    l1_ge_hits = np.zeros(k, dtype=np.int64)
    two_hits = np.zeros(k, dtype=np.int64)
    sum_l1 = sumsq_l1 = sum_l2 = sumsq_l2 = 0.0
    done = 0
    block = 0
    while done < trials:
        bt = min(batch_size, trials - done)
        rng = stream(seed, block)
        open_mat = rng.random((bt, g.m)) < p
        l1 = np.empty(bt, dtype=np.int64)
        l2 = np.empty(bt, dtype=np.int64)
        cge = np.empty((bt, k), dtype=np.int64)
        batch_cluster_stats(g.n, eu, ev, open_mat, th_arr, l1, l2, cge)
        for j, s in enumerate(th):
            l1_ge_hits[j] += int(np.count_nonzero(l1 >= s))
            two_hits[j] += int(np.count_nonzero(cge[:, j] >= 2))
        sum_l1 += float(l1.sum())
        sumsq_l1 += float((l1.astype(float) ** 2).sum())
        sum_l2 += float(l2.sum())
        sumsq_l2 += float((l2.astype(float) ** 2).sum())
        done += bt
        block += 1

    def prob_estimate(hits: int) -> Estimate:
        q = hits / trials
        return Estimate(q, math.sqrt(q * (1.0 - q) / trials))

    def mean_estimate(total: float, total_sq: float) -> Estimate:
        mu = total / trials
        var = max(total_sq / trials - mu * mu, 0.0)
        if trials > 1:
            var *= trials / (trials - 1)
        return Estimate(mu, math.sqrt(var / trials))

    return MCClusterProbs(
        trials=trials,
        p_l1_ge={s: prob_estimate(int(l1_ge_hits[j])) for j, s in enumerate(th)},
        p_two_ge={s: prob_estimate(int(two_hits[j])) for j, s in enumerate(th)},
        mean_l1=mean_estimate(sum_l1, sumsq_l1),
        mean_l2=mean_estimate(sum_l2, sumsq_l2),
    )


# ---------------------------------------------------------------------------
# CSV emission
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def write_sweep_csv(rec: SweepRecord, path: str, config: dict) -> None:
    """Microcanonical table: m,L1_mean,L2_mean,count_ge_<s>_mean per threshold."""
    cols = ["m", "L1_mean", "L2_mean"] + [f"count_ge_{s}_mean" for s in rec.thresholds]
    with open(path, "w", encoding="utf-8") as fh:
        for key, value in config.items():
            fh.write(f"# {key}={value}\n")
        fh.write(",".join(cols) + "\n")
        for mm in range(rec.m_max + 1):
            row = [str(mm), _fmt(rec.l1_mean[mm]), _fmt(rec.l2_mean[mm])]
            row += [_fmt(rec.count_ge_mean[j, mm]) for j in range(len(rec.thresholds))]
            fh.write(",".join(row) + "\n")


def write_canonical_csv(rec: SweepRecord, path: str, config: dict) -> None:
    """Canonical table over the smoothing grid; P_two_large uses the first
    configured threshold."""
    if rec.curves is None:
        raise PreconditionError("sweep record has no smoothed curves; pass a p_grid")
    c = rec.curves
    with open(path, "w", encoding="utf-8") as fh:
        for key, value in config.items():
            fh.write(f"# {key}={value}\n")
        fh.write("p,L1_frac,L1_frac_se,L2_frac,P_two_large,P_two_large_se\n")
        for i, p in enumerate(c.p_grid):
            fh.write(",".join([
                _fmt(p), _fmt(c.l1_frac[i]), _fmt(c.l1_frac_se[i]), _fmt(c.l2_frac[i]),
                _fmt(c.two_ge[0, i]), _fmt(c.two_ge_se[0, i]),
            ]) + "\n")


def _check_prob(p: float, name: str) -> None:
    if not (0.0 <= float(p) <= 1.0):
        raise PreconditionError(f"{name} must be in [0, 1], got {p}")
