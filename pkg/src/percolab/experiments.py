"""Seeded experiment recipes that confront the theory with simulation.

Every recipe returns an ExperimentReport: full config echo, per-point
estimates with standard errors, and summary scalars.  Rerunning with the
same config and seed reproduces every estimate exactly; only runtime_s
varies.  Crossing locations are always reported as brackets at the grid
resolution, never as bare point claims.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ._rng import stream
from .errors import PreconditionError
from .graphs import FamilySpec, Graph, build_graph, cartesian_product, generate, girth
from .isoperimetry import edge_cheeger_exact
from .oracle import MAX_EDGES_STATS, exact_cluster_stats_grid
from .percolation import (Estimate, SprinklePlan, from_open_mask, large_threshold,
                          mc_cluster_probs, newman_ziff_sweep, sprinkle_split)
from .bounds import gw_survival

DEFAULT_GRID_POINTS = 101
BRACKET_BAND = 3.0  # crossing brackets cover the +-3 se band of the curve


@dataclass
class ExperimentReport:
    experiment: str
    config: dict
    points: list[dict]
    summary: dict
    seed: int
    runtime_s: float = 0.0

    def to_dict(self) -> dict:
        return {"id": self.experiment, "config": self.config, "points": self.points,
                "summary": self.summary, "seed": self.seed, "runtime_s": self.runtime_s}


def write_report_json(report: ExperimentReport, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def write_report_csv(report: ExperimentReport, path: str) -> None:
    """Flat per-point table with the config echoed in comment lines."""
    cols: list[str] = []
    for pt in report.points:
        for key in pt:
            if key not in cols:
                cols.append(key)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# experiment={report.experiment}\n")
        fh.write(f"# seed={report.seed}\n")
        for key in sorted(report.config):
            fh.write(f"# {key}={report.config[key]}\n")
        fh.write(",".join(cols) + "\n")
        for pt in report.points:
            fh.write(",".join(_csv_cell(pt.get(c)) for c in cols) + "\n")


def _csv_cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return format(x, ".12g")
    return str(x)


def _json_default(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not JSON serializable: {type(x)}")


def _default_grid(points: int = DEFAULT_GRID_POINTS) -> np.ndarray:
    return np.linspace(0.0, 1.0, points)


# ---------------------------------------------------------------------------
# Crossing brackets
# ---------------------------------------------------------------------------

def _first_crossing(grid: np.ndarray, values: np.ndarray, a: float) -> Optional[float]:
    """First p where the piecewise-linear curve reaches level a."""
    if values[0] >= a:
        return float(grid[0])
    for i in range(1, len(grid)):
        if values[i] >= a:
            lo, hi = values[i - 1], values[i]
            if hi == lo:
                return float(grid[i])
            frac = (a - lo) / (hi - lo)
            return float(grid[i - 1] + frac * (grid[i] - grid[i - 1]))
    return None


def crossing_bracket(grid: np.ndarray, mean: np.ndarray, se: np.ndarray, a: float,
                     band: float = BRACKET_BAND) -> Optional[dict]:
    """Bracket [p_lo, p_hi] for the location of the level-a transition.

    The lower edge is the first point where the curve plus band*se reaches a
    (earliest plausible crossing).  The upper edge is the first point where
    the curve minus band*se reaches 2a: inside a finite-size transition
    region the curve at the limiting threshold overshoots a small level a by
    an O(1) factor, so the doubling scale covers the limit location, and the
    bracket narrows as the transition sharpens with n.  Both edges are
    snapped outward to grid points (the stated resolution).
    """
    p_hat = _first_crossing(grid, mean, a)
    if p_hat is None:
        return None
    early = _first_crossing(grid, mean + band * se, a)
    late = _first_crossing(grid, mean - band * se, min(2.0 * a, 1.0))
    if early is None:
        early = p_hat
    if late is None:
        late = float(grid[-1])
    lo_idx = int(np.searchsorted(grid, early + 1e-12, side="right") - 1)
    hi_idx = int(np.searchsorted(grid, late - 1e-12, side="left"))
    lo_idx = max(lo_idx, 0)
    hi_idx = min(max(hi_idx, lo_idx + 1), len(grid) - 1)
    return {
        "p_hat": p_hat,
        "lo": float(grid[lo_idx]),
        "hi": float(grid[hi_idx]),
        "width": float(grid[hi_idx] - grid[lo_idx]),
        "resolution": float(grid[1] - grid[0]) if len(grid) > 1 else 0.0,
    }


# ---------------------------------------------------------------------------
# Threshold scan
# ---------------------------------------------------------------------------

def threshold_scan(specs: Sequence[FamilySpec], a: float, trials: int, seed: int,
                   grid_points: int = DEFAULT_GRID_POINTS, threads: int = 1) -> ExperimentReport:
    """Newman-Ziff sweep per family, smoothed giant fraction over a p-grid,
    and a bracketed estimate of where E[L1]/n crosses the fraction a."""
    if not (0.0 < a < 1.0):
        raise PreconditionError(f"crossing fraction a must be in (0, 1), got {a}")
    t0 = time.perf_counter()
    grid = _default_grid(grid_points)
    points: list[dict] = []
    summaries: list[dict] = []
    for idx, spec in enumerate(specs):
        g = generate(spec)
        rec = newman_ziff_sweep(g, trials, (), seed=_derive(seed, idx), p_grid=grid,
                                threads=threads)
        c = rec.curves
        for i, p in enumerate(grid):
            points.append({
                "family": spec.label(), "n": g.n, "p": float(p),
                "L1_frac": float(c.l1_frac[i]), "L1_frac_se": float(c.l1_frac_se[i]),
                "L2_frac": float(c.l2_frac[i]), "L2_frac_se": float(c.l2_frac_se[i]),
            })
        bracket = crossing_bracket(grid, c.l1_frac, c.l1_frac_se, a)
        l2_peak = int(np.argmax(c.l2_frac))
        entry = {"family": spec.label(), "n": g.n, "m": g.m,
                 "l2_peak_p": float(grid[l2_peak])}
        if bracket is None:
            entry["p_hat"] = None
        else:
            entry.update({"p_hat": bracket["p_hat"], "bracket_lo": bracket["lo"],
                          "bracket_hi": bracket["hi"], "bracket_width": bracket["width"],
                          "resolution": bracket["resolution"]})
        summaries.append(entry)
    report = ExperimentReport(
        experiment="threshold_scan",
        config={"families": [s.label() for s in specs], "a": a, "trials": trials,
                "grid_points": grid_points},
        points=points,
        summary={"per_family": summaries},
        seed=seed,
    )
    report.runtime_s = time.perf_counter() - t0
    return report


# ---------------------------------------------------------------------------
# Uniqueness scan
# ---------------------------------------------------------------------------

def uniqueness_scan(specs: Sequence[FamilySpec], c, trials: int, seed: int,
                    omega: Optional[float] = None, grid_points: int = DEFAULT_GRID_POINTS,
                    exact: bool = False, threads: int = 1) -> ExperimentReport:
    """Probability of two or more large components, smoothed over a p-grid.

    Large means size >= c*n, or >= n**omega when omega is given.  With
    exact=True the Monte Carlo ensemble is replaced by the full-enumeration
    oracle (tiny graphs only).  The giant-fraction curve comes from the same
    sweep ensemble, so the two summaries share their sampling noise.
    """
    t0 = time.perf_counter()
    grid = _default_grid(grid_points)
    points: list[dict] = []
    summaries: list[dict] = []
    for idx, spec in enumerate(specs):
        g = generate(spec)
        thr = large_threshold(g.n, c=c) if omega is None else large_threshold(g.n, omega=omega)
        if exact:
            if g.m > MAX_EDGES_STATS:
                raise PreconditionError(f"exact uniqueness scan needs m <= {MAX_EDGES_STATS}")
            stats = exact_cluster_stats_grid(g, [float(p) for p in grid], [thr])
            delta = np.array([s.p_two_ge[thr] for s in stats])
            delta_se = np.zeros_like(delta)
            l1_frac = np.array([s.e_l1 / g.n for s in stats])
            l1_se = np.zeros_like(l1_frac)
        else:
            rec = newman_ziff_sweep(g, trials, (thr,), seed=_derive(seed, idx), p_grid=grid,
                                    threads=threads)
            delta = rec.curves.two_ge[0]
            delta_se = rec.curves.two_ge_se[0]
            l1_frac = rec.curves.l1_frac
            l1_se = rec.curves.l1_frac_se
        for i, p in enumerate(grid):
            points.append({
                "family": spec.label(), "n": g.n, "p": float(p), "threshold": thr,
                "delta": float(delta[i]), "delta_se": float(delta_se[i]),
                "L1_frac": float(l1_frac[i]), "L1_frac_se": float(l1_se[i]),
            })
        peak = int(np.argmax(delta))
        summaries.append({
            "family": spec.label(), "n": g.n, "threshold": thr,
            "sup_delta": float(delta[peak]), "sup_delta_se": float(delta_se[peak]),
            "argmax_p": float(grid[peak]), "mode": "exact" if exact else "sweep",
        })
    report = ExperimentReport(
        experiment="uniqueness_scan",
        config={"families": [s.label() for s in specs], "c": _cfg_num(c), "omega": omega,
                "trials": trials, "grid_points": grid_points, "exact": exact},
        points=points,
        summary={"per_family": summaries},
        seed=seed,
    )
    report.runtime_s = time.perf_counter() - t0
    return report


# ---------------------------------------------------------------------------
# Counterexample demonstrations (long cycles and cycle products)
# ---------------------------------------------------------------------------

def counterexample_demo(kind: str, n: int, trials: int, seed: int,
                        exact: bool = False) -> ExperimentReport:
    """Uniqueness failure for families with huge diameter, at p close to 1.

    Estimates P(at least 2 components of size >= N/4), N the vertex count.
    Cycles run at p = 1 - 3/N (three closed edges expected).  The cycle *
    triangle product disconnects only when all 3 parallel edges of a ring
    section close, so its closeness rate is the cube root 1-p = (3/n)^(1/3),
    keeping the expected number of closed sections at three as n grows;
    at 1 - 3/N the failure probability would vanish like n^-4 instead of
    staying bounded away from zero.  For pure cycles an independent
    closed-edge placement simulation cross-checks the estimate, and
    exact=True adds the full-enumeration value.
    """
    t0 = time.perf_counter()
    if kind == "cycle":
        g = generate(FamilySpec.cycle(n))
        p = 1.0 - 3.0 / g.n
    elif kind == "cycle_product":
        g = cartesian_product(generate(FamilySpec.cycle(n)),
                              generate(FamilySpec.complete(3)))
        p = 1.0 - (3.0 / n) ** (1.0 / 3.0)
    else:
        raise PreconditionError(f"kind must be 'cycle' or 'cycle_product', got {kind!r}")
    big_n = g.n
    thr = large_threshold(big_n, c=0.25)
    if thr < 2:
        raise PreconditionError("n too small: the large threshold must be at least 2")
    mc = mc_cluster_probs(g, p, [thr], trials, seed=_derive(seed, 0))
    est = mc.p_two_ge[thr]
    summary = {"kind": kind, "n": big_n, "p": p, "threshold": thr,
               "estimate": est.value, "se": est.se}
    if kind == "cycle":
        oracle_est = _cycle_closed_placement_oracle(big_n, p, thr, trials, _derive(seed, 1))
        sigma = (abs(est.value - oracle_est.value)
                 / max(math.hypot(est.se, oracle_est.se), 1e-300))
        summary.update({"oracle_estimate": oracle_est.value, "oracle_se": oracle_est.se,
                        "agreement_sigma": sigma})
    if exact:
        if g.m > MAX_EDGES_STATS:
            raise PreconditionError(f"exact counterexample value needs m <= {MAX_EDGES_STATS}")
        stats = exact_cluster_stats_grid(g, [p], [thr])[0]
        summary["exact_value"] = stats.p_two_ge[thr]
    report = ExperimentReport(
        experiment="counterexample_demo",
        config={"kind": kind, "n": n, "trials": trials, "exact": exact},
        points=[summary.copy()],
        summary=summary,
        seed=seed,
    )
    report.runtime_s = time.perf_counter() - t0
    return report


def _cycle_closed_placement_oracle(n: int, p: float, thr: int, trials: int,
                                   seed: int) -> Estimate:
    """Independent estimator for cycles: place the closed edges directly.

    With k >= 1 closed edges the open components are the k cyclic arcs
    between them; k = 0 or 1 leaves a single component of n vertices.
    """
    rng = stream(seed)
    hits = 0
    q = 1.0 - p
    ks = rng.binomial(n, q, size=trials)
    for k in ks:
        k = int(k)
        if k < 2:
            continue  # single component of size n: count is 1, never 2
        pos = np.sort(rng.choice(n, size=k, replace=False))
        gaps = np.diff(pos)
        wrap = n - int(pos[-1]) + int(pos[0])
        count = int(np.count_nonzero(gaps >= thr)) + (1 if wrap >= thr else 0)
        if count >= 2:
            hits += 1
    val = hits / trials
    return Estimate(val, math.sqrt(val * (1.0 - val) / trials))


# ---------------------------------------------------------------------------
# Two-phase sprinkling mechanism
# ---------------------------------------------------------------------------

def sprinkling_giant_demo(spec: FamilySpec, eps: float, trials: int, seed: int,
                          m_mode="girth", p_mode: str = "degree") -> ExperimentReport:
    """Union of two sprinkling phases versus the branching-process survival.

    Phase 1 runs at p1 = (1+eps/2)/(d-1) and measures the fraction of
    vertices in components of size >= m; phase 2 completes the union to
    p = (1+eps)/(d-1).  The union giant fraction is compared against
    gw_survival(d, p), and the pooled per-edge union marginal against p.

    m_mode "girth" takes the floor m = (1+eps/3)^(girth/2); an integer sets
    it explicitly.  p_mode "lattice" targets p = (1+eps)/d instead (the box
    regime, where d counts both directions of every axis); such runs are
    exploratory and labelled so in the report, with no claim attached.
    """
    if eps <= 0:
        raise PreconditionError(f"eps must be > 0, got {eps}")
    if trials < 1:
        raise PreconditionError(f"trials must be >= 1, got {trials}")
    if p_mode not in ("degree", "lattice"):
        raise PreconditionError(f"p_mode must be 'degree' or 'lattice', got {p_mode!r}")
    t0 = time.perf_counter()
    g = generate(spec)
    degs = set(int(d) for d in g.degrees)
    if len(degs) != 1:
        raise PreconditionError("sprinkling demo needs a regular graph")
    d = degs.pop()
    if d < 2:
        raise PreconditionError(f"degree must be >= 2, got {d}")
    girth_val = girth(g)
    split = (d - 1) if p_mode == "degree" else d
    p = min(1.0, (1.0 + eps) / split)
    p1 = min(1.0, (1.0 + eps / 2.0) / split)
    p2 = sprinkle_split(p, p1)
    if m_mode == "girth":
        m_floor = None if girth_val is None else (1.0 + eps / 3.0) ** (girth_val / 2.0)
        m_thr = 1 if m_floor is None else max(1, math.ceil(m_floor - 1e-9))
    elif isinstance(m_mode, int) and m_mode >= 1:
        m_floor = float(m_mode)
        m_thr = int(m_mode)
    else:
        raise PreconditionError(f"m_mode must be 'girth' or a positive integer, got {m_mode!r}")

    union_fracs = np.empty(trials)
    phase1_fracs = np.empty(trials)
    open_edges = 0
    plan = SprinklePlan((p1, p2))
    points = []
    for t in range(trials):
        res = _sprinkle_union_trial(g, plan, seed, t, m_thr)
        union_fracs[t] = res["union_l1"] / g.n
        phase1_fracs[t] = res["phase1_mass"] / g.n
        open_edges += res["union_open"]
        points.append({"trial": t, "union_L1_frac": union_fracs[t],
                       "phase1_frac_ge_m": phase1_fracs[t],
                       "union_open_edges": res["union_open"]})
    survival = gw_survival(d, p)
    marginal = open_edges / (trials * g.m)
    marginal_se = math.sqrt(max(marginal * (1.0 - marginal), 1e-300) / (trials * g.m))
    summary = {
        "family": spec.label(), "n": g.n, "d": d, "girth": girth_val,
        "eps": eps, "p": p, "p1": p1, "p2": p2, "m_floor": m_floor, "m_threshold": m_thr,
        "p_mode": p_mode, "exploratory": p_mode == "lattice",
        "gw_survival": survival,
        "union_frac": float(union_fracs.mean()),
        "union_frac_se": float(union_fracs.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0,
        "phase1_frac_ge_m": float(phase1_fracs.mean()),
        "edge_marginal": marginal, "edge_marginal_se": marginal_se,
        "marginal_sigma": abs(marginal - p) / marginal_se,
        "gap_to_survival": abs(float(union_fracs.mean()) - survival),
    }
    report = ExperimentReport(
        experiment="sprinkling_giant_demo",
        config={"family": spec.label(), "eps": eps, "trials": trials,
                "m_mode": str(m_mode), "p_mode": p_mode},
        points=points,
        summary=summary,
        seed=seed,
    )
    report.runtime_s = time.perf_counter() - t0
    return report


def _sprinkle_union_trial(g: Graph, plan: SprinklePlan, seed: int, trial: int,
                          m_thr: int) -> dict:
    masks = np.zeros((len(plan.phases), g.m), dtype=bool)
    for i, pp in enumerate(plan.phases):
        masks[i] = stream(seed, trial, i).random(g.m) < pp
    union_mask = masks.any(axis=0)
    union = from_open_mask(g, union_mask, plan.union_p)
    phase1 = from_open_mask(g, masks[0], plan.phases[0])
    return {
        "union_l1": int(union.sizes[0]),
        "union_open": int(union_mask.sum()),
        "phase1_mass": int(phase1.sizes[phase1.sizes >= m_thr].sum()),
    }


# ---------------------------------------------------------------------------
# Expansion of percolated expanders
# ---------------------------------------------------------------------------

def percolated_expander_cheeger(spec: FamilySpec, p_list: Sequence[float], trials: int,
                                seed: int, work_limit: int = 10 ** 8) -> ExperimentReport:
    """Frequency that the percolated graph keeps edge constant >= 1/log2(n),
    exactly per sample, with a shared-uniform coupling audit across p.

    Adding edges never lowers any cut ratio, so with coupled samples a pass
    at p must persist at p' >= p; the audit counts violations (always 0)."""
    if trials < 1:
        raise PreconditionError(f"trials must be >= 1, got {trials}")
    t0 = time.perf_counter()
    g = generate(spec)
    if g.n < 2:
        raise PreconditionError("need at least 2 vertices")
    threshold = 1.0 / math.log2(g.n)
    ps = sorted(float(p) for p in p_list)
    full = edge_cheeger_exact(g, work_limit=work_limit)
    pass_matrix = np.zeros((trials, len(ps)), dtype=bool)
    for t in range(trials):
        uniforms = stream(seed, t).random(g.m)
        for j, p in enumerate(ps):
            open_mask = uniforms < p
            sub = build_graph(g.n, [tuple(e) for e in g.edges[open_mask]])
            cut = edge_cheeger_exact(sub, work_limit=work_limit)
            pass_matrix[t, j] = float(cut.edge_ratio) >= threshold
    violations = 0
    for t in range(trials):
        for j in range(1, len(ps)):
            if pass_matrix[t, j - 1] and not pass_matrix[t, j]:
                violations += 1
    points = []
    for j, p in enumerate(ps):
        freq = float(pass_matrix[:, j].mean())
        se = math.sqrt(freq * (1.0 - freq) / trials)
        points.append({"p": p, "pass_frequency": freq, "pass_frequency_se": se})
    summary = {
        "family": spec.label(), "n": g.n, "threshold": threshold,
        "full_graph_edge_constant": float(full.edge_ratio),
        "full_graph_passes": float(full.edge_ratio) >= threshold,
        "coupling_violations": violations,
    }
    report = ExperimentReport(
        experiment="percolated_expander_cheeger",
        config={"family": spec.label(), "p_list": ps, "trials": trials},
        points=points,
        summary=summary,
        seed=seed,
    )
    report.runtime_s = time.perf_counter() - t0
    return report


def _derive(seed: int, idx: int) -> int:
    """Distinct master seeds for the sub-experiments of one recipe."""
    return (int(seed) << 8) + idx


def _cfg_num(c):
    return None if c is None else float(c)
