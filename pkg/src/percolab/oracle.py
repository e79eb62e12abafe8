"""Exhaustive configuration enumeration on tiny graphs.

Ground truth for everything else: exact event probabilities, exact cluster
statistics, exact pivotal probabilities and monotonicity verification, all
by walking the full 2^m configuration lattice.  Components are recomputed
per configuration with a plain DFS, deliberately sharing no code with the
union-find engine these numbers are used to validate.

Size guards are hard errors, never silent truncation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import PreconditionError, SizeGuardError
from .graphs import Graph

MAX_EDGES_STATS = 24
MAX_EDGES_PIVOTAL = 20


def _guard(g: Graph, limit: int, what: str) -> None:
    if g.m > limit:
        raise SizeGuardError(f"{what} enumerates 2^m configurations and requires m <= {limit}, got m={g.m}")


def weights_by_popcount(m: int, p: float) -> np.ndarray:
    """w[k] = p^k (1-p)^(m-k): the weight of any configuration with k open edges."""
    if not (0.0 <= p <= 1.0):
        raise PreconditionError(f"p must be in [0, 1], got {p}")
    w = np.zeros(m + 1)
    if p == 0.0:
        w[0] = 1.0
    elif p == 1.0:
        w[m] = 1.0
    else:
        for k in range(m + 1):
            w[k] = math.exp(k * math.log(p) + (m - k) * math.log1p(-p))
    return w


def config_component_sizes(g: Graph, mask: int) -> list[int]:
    """Component sizes of the spanning subgraph keeping edges set in `mask`."""
    seen = bytearray(g.n)
    sizes: list[int] = []
    for start in range(g.n):
        if seen[start]:
            continue
        seen[start] = 1
        count = 1
        stack = [start]
        while stack:
            x = stack.pop()
            for slot in range(g.offsets[x], g.offsets[x + 1]):
                if (mask >> int(g.incident_edges[slot])) & 1:
                    y = int(g.neighbors[slot])
                    if not seen[y]:
                        seen[y] = 1
                        count += 1
                        stack.append(y)
        sizes.append(count)
    return sizes


@dataclass(frozen=True)
class ExactStats:
    """Exact canonical cluster statistics at a single retention probability."""

    p: float
    e_l1: float
    e_l2: float
    p_l1_ge: dict      # threshold -> P(L1 >= threshold)
    p_two_ge: dict     # threshold -> P(count of components >= threshold is >= 2)
    p_connected: float


class _ClassAccum:
    """Per-popcount-class accumulators; combined with weights per p."""

    def __init__(self, g: Graph, thresholds: tuple[int, ...]):
        m = g.m
        self.thresholds = thresholds
        self.configs = np.zeros(m + 1, dtype=np.int64)
        self.sum_l1 = np.zeros(m + 1, dtype=np.int64)
        self.sum_l2 = np.zeros(m + 1, dtype=np.int64)
        self.l1_ge = {s: np.zeros(m + 1, dtype=np.int64) for s in thresholds}
        self.two_ge = {s: np.zeros(m + 1, dtype=np.int64) for s in thresholds}
        self.connected = np.zeros(m + 1, dtype=np.int64)
        for mask in range(1 << m):
            k = mask.bit_count()
            sizes = config_component_sizes(g, mask)
            l1 = max(sizes)
            l2 = sorted(sizes)[-2] if len(sizes) > 1 else 0
            self.configs[k] += 1
            self.sum_l1[k] += l1
            self.sum_l2[k] += l2
            for s in thresholds:
                if l1 >= s:
                    self.l1_ge[s][k] += 1
                if sum(1 for x in sizes if x >= s) >= 2:
                    self.two_ge[s][k] += 1
            if len(sizes) == 1:
                self.connected[k] += 1

    def stats(self, p: float) -> ExactStats:
        w = weights_by_popcount(len(self.configs) - 1, p)
        return ExactStats(
            p=float(p),
            e_l1=float(w @ self.sum_l1),
            e_l2=float(w @ self.sum_l2),
            p_l1_ge={s: float(w @ self.l1_ge[s]) for s in self.thresholds},
            p_two_ge={s: float(w @ self.two_ge[s]) for s in self.thresholds},
            p_connected=float(w @ self.connected),
        )


def exact_cluster_stats(g: Graph, p: float, thresholds: Sequence[int]) -> ExactStats:
    """Full-enumeration cluster statistics at retention probability p."""
    _guard(g, MAX_EDGES_STATS, "exact_cluster_stats")
    return _ClassAccum(g, tuple(int(s) for s in thresholds)).stats(p)


def exact_cluster_stats_grid(g: Graph, ps: Sequence[float], thresholds: Sequence[int]) -> list[ExactStats]:
    """Cluster statistics for many p values from a single enumeration pass."""
    _guard(g, MAX_EDGES_STATS, "exact_cluster_stats_grid")
    acc = _ClassAccum(g, tuple(int(s) for s in thresholds))
    return [acc.stats(float(p)) for p in ps]


def _popcounts(m: int) -> np.ndarray:
    return np.bitwise_count(np.arange(1 << m, dtype=np.uint64)).astype(np.int64)


def _membership_table(g: Graph, upset) -> np.ndarray:
    table = np.zeros(1 << g.m, dtype=bool)
    for mask in range(1 << g.m):
        table[mask] = bool(upset.holds(g, mask))
    return table


def exact_event_prob(g: Graph, p: float, upset) -> float:
    """P_p(configuration lies in the event) by full enumeration."""
    _guard(g, MAX_EDGES_STATS, "exact_event_prob")
    table = _membership_table(g, upset)
    w = weights_by_popcount(g.m, p)
    counts = np.bincount(_popcounts(g.m)[table], minlength=g.m + 1)
    return float(w @ counts)


def exact_pivotal_prob(g: Graph, p: float, upset) -> float:
    """P(e is pivotal) for a uniform edge e and an independent Bernoulli(p)
    configuration, averaged exactly over the full lattice."""
    _guard(g, MAX_EDGES_PIVOTAL, "exact_pivotal_prob")
    if g.m == 0:
        raise PreconditionError("pivotal probability needs at least one edge")
    table = _membership_table(g, upset)
    w = weights_by_popcount(g.m, p)
    wts = w[_popcounts(g.m)]
    idx = np.arange(1 << g.m, dtype=np.int64)
    total = 0.0
    for e in range(g.m):
        bit = 1 << e
        pivotal = table[idx | bit] & ~table[idx & ~bit]
        total += float(wts[pivotal].sum())
    return total / g.m


def verify_monotone(g: Graph, upset) -> bool:
    """True iff no member configuration has a one-edge superset outside the
    event (sufficient for full monotonicity by transitivity)."""
    _guard(g, MAX_EDGES_PIVOTAL, "verify_monotone")
    table = _membership_table(g, upset)
    idx = np.arange(1 << g.m, dtype=np.int64)
    for e in range(g.m):
        bit = 1 << e
        without = (idx & bit) == 0
        if np.any(table[idx[without]] & ~table[idx[without] | bit]):
            return False
    return True
