"""Monotone events over edge sets, the joint (configuration, edge) sampler,
pivotality, and bridges between large components.

Configurations are edge-id sets, handled internally as integer bitmasks.
The merge score of a configuration rises by exactly one whenever an edge
joins two large components, so its integer thresholds are the monotone
events that catch every such bridge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Union

import numpy as np
from scipy import stats as _sps

from ._rng import stream
from .errors import PreconditionError
from .graphs import Graph
from .percolation import Estimate, PercSample, as_fraction, large_threshold

ConfigLike = Union[int, Iterable[int], np.ndarray]


def as_edge_mask(g: Graph, config: ConfigLike) -> int:
    """Normalize a configuration (bitmask, edge-id iterable, or boolean
    vector) to an integer bitmask over edge ids."""
    if isinstance(config, (int, np.integer)):
        mask = int(config)
        if mask < 0 or mask >> g.m:
            raise PreconditionError(f"edge mask {mask} out of range for m={g.m}")
        return mask
    if isinstance(config, np.ndarray) and config.dtype == bool:
        if config.shape != (g.m,):
            raise PreconditionError(f"boolean config must have shape ({g.m},)")
        mask = 0
        for eid in np.flatnonzero(config):
            mask |= 1 << int(eid)
        return mask
    mask = 0
    for eid in config:
        eid = int(eid)
        if not (0 <= eid < g.m):
            raise PreconditionError(f"edge id {eid} out of range for m={g.m}")
        mask |= 1 << eid
    return mask


def _components(g: Graph, mask: int) -> tuple[list[int], list[int]]:
    """(per-vertex component label, per-label size) for the open subgraph."""
    parent = list(range(g.n))

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    size = [1] * g.n
    rem = mask
    while rem:
        low = rem & -rem
        rem ^= low
        eid = low.bit_length() - 1
        u, v = g.edges[eid]
        ru, rv = find(int(u)), find(int(v))
        if ru != rv:
            if size[ru] < size[rv]:
                ru, rv = rv, ru
            parent[rv] = ru
            size[ru] += size[rv]
    label_of_root: dict[int, int] = {}
    labels = [0] * g.n
    sizes: list[int] = []
    for v in range(g.n):
        r = find(v)
        if r not in label_of_root:
            label_of_root[r] = len(sizes)
            sizes.append(size[r])
        labels[v] = label_of_root[r]
    return labels, sizes


def open_component_sizes(g: Graph, config: ConfigLike) -> list[int]:
    """Component sizes of the subgraph keeping exactly the edges in config."""
    _, sizes = _components(g, as_edge_mask(g, config))
    return sizes


# ---------------------------------------------------------------------------
# Merge score
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MergeScore:
    """Breakdown of the merge score at large-fraction c.

    value = vertices_in_large/(c*n) - large_count, kept exact as a Fraction.
    Adding an edge never decreases it, and joining two large components
    raises it by exactly one.
    """

    vertices_in_large: int
    large_count: int
    value: Fraction


def merge_score(s: PercSample, c) -> MergeScore:
    """Exact merge score of a percolation sample."""
    return merge_score_of_sizes([int(x) for x in s.sizes], s.graph.n, c)


def merge_score_of_sizes(sizes: Iterable[int], n: int, c) -> MergeScore:
    cf = as_fraction(c)
    if not (0 < cf <= 1):
        raise PreconditionError(f"c must be in (0, 1], got {c}")
    t = large_threshold(n, c=cf)
    large = [x for x in sizes if x >= t]
    y = sum(large)
    count = len(large)
    return MergeScore(vertices_in_large=y, large_count=count, value=Fraction(y) / (cf * n) - count)


# ---------------------------------------------------------------------------
# Up-sets (monotone events over edge subsets)
# ---------------------------------------------------------------------------

class UpSet:
    """A family of edge subsets, declared monotone unless stated otherwise.

    Monotonicity is an obligation on the definition, enforced exhaustively in
    tests below the enumeration size limit; the pivotal bound is simply false
    for non-monotone events.
    """

    monotone: bool = True

    def holds(self, g: Graph, mask: int) -> bool:  # pragma: no cover - interface
        raise NotImplementedError

    def label(self) -> str:  # pragma: no cover - interface
        raise NotImplementedError


@dataclass(frozen=True)
class LargeComponentExists(UpSet):
    """Some open component has at least s vertices."""

    s: int

    def holds(self, g: Graph, mask: int) -> bool:
        _, sizes = _components(g, mask)
        return max(sizes) >= self.s

    def label(self) -> str:
        return f"large_s{self.s}"


@dataclass(frozen=True)
class MergeScoreAtLeast(UpSet):
    """Merge score at fraction c reaches the integer i."""

    c: Fraction
    i: int

    def __post_init__(self):
        object.__setattr__(self, "c", as_fraction(self.c))
        object.__setattr__(self, "i", int(self.i))

    def holds(self, g: Graph, mask: int) -> bool:
        _, sizes = _components(g, mask)
        return merge_score_of_sizes(sizes, g.n, self.c).value >= self.i

    def label(self) -> str:
        return f"merge_c{float(self.c):g}_i{self.i}"


@dataclass(frozen=True)
class EdgeCountAtLeast(UpSet):
    """The configuration keeps at least t edges."""

    t: int

    def holds(self, g: Graph, mask: int) -> bool:
        return mask.bit_count() >= self.t

    def label(self) -> str:
        return f"edges_t{self.t}"


@dataclass(frozen=True)
class CustomUpSet(UpSet):
    """Caller-supplied predicate; monotonicity is the caller's declaration."""

    fn: Callable[[Graph, int], bool]
    declared_monotone: bool = True
    name: str = "custom"

    @property
    def monotone(self) -> bool:  # type: ignore[override]
        return self.declared_monotone

    def holds(self, g: Graph, mask: int) -> bool:
        return bool(self.fn(g, mask))

    def label(self) -> str:
        return f"custom_{self.name}"


def is_pivotal(g: Graph, config: ConfigLike, e: int, upset: UpSet) -> bool:
    """True iff config+e lies in the event and config-e does not.

    Components are recomputed from scratch on both configurations; pivotal
    queries are rare enough that simplicity wins over incremental tricks.
    """
    if not (0 <= e < g.m):
        raise PreconditionError(f"edge id {e} out of range for m={g.m}")
    mask = as_edge_mask(g, config)
    bit = 1 << e
    return upset.holds(g, mask | bit) and not upset.holds(g, mask & ~bit)


# ---------------------------------------------------------------------------
# The joint (A, e) sampler
# ---------------------------------------------------------------------------

def sample_pair(k: int, p: float, seed: int) -> tuple[frozenset, int]:
    """Draw (A, e): A product-Bernoulli(p) over k elements, e uniform,
    independent of A.

    Construction: a random ordering e_1 < ... < e_k, X ~ Binomial(k, p),
    A = {e_1..e_X}; e = e_X with probability X/k, else e_{X+1}.
    """
    if k < 1:
        raise PreconditionError(f"k must be >= 1, got {k}")
    if not (0.0 <= p <= 1.0):
        raise PreconditionError(f"p must be in [0, 1], got {p}")
    return _sample_pair_with(stream(seed), k, p)


def _sample_pair_with(rng: np.random.Generator, k: int, p: float) -> tuple[frozenset, int]:
    order = rng.permutation(k)
    x = int(rng.binomial(k, p))
    take_last = rng.random() < x / k
    e = int(order[x - 1]) if take_last else int(order[x])
    return frozenset(int(v) for v in order[:x]), e


def pivotal_prob_mc(g: Graph, p: float, upset: UpSet, trials: int, seed: int) -> Estimate:
    """Monte Carlo pivotal probability over sample_pair draws."""
    if not upset.monotone:
        raise PreconditionError("pivotal probability bound applies to monotone events only")
    if trials < 1:
        raise PreconditionError(f"trials must be >= 1, got {trials}")
    if g.m < 1:
        raise PreconditionError("graph has no edges")
    hits = 0
    for t in range(trials):
        subset, e = _sample_pair_with(stream(seed, t), g.m, p)
        mask = 0
        for eid in subset:
            mask |= 1 << eid
        if is_pivotal(g, mask, e, upset):
            hits += 1
    q = hits / trials
    return Estimate(q, math.sqrt(q * (1.0 - q) / trials))


def pivotal_bound(k: int, x: float) -> float:
    """((k+1)/k) * max over p in [x, 1-x] and m of Binomial(k, p){m}.

    The inner maximum is exact: for each m the maximizing p is m/k clamped
    to [x, 1-x].
    """
    if k < 1:
        raise PreconditionError(f"k must be >= 1, got {k}")
    if not (0.0 < x <= 0.5):
        raise PreconditionError(f"x must be in (0, 1/2], got {x}")
    ms = np.arange(k + 1)
    ps = np.clip(ms / k, x, 1.0 - x)
    pmf = _sps.binom.pmf(ms, k, ps)
    return float((k + 1) / k * pmf.max())


# ---------------------------------------------------------------------------
# Bridges between large components
# ---------------------------------------------------------------------------

def find_large_bridges(s: PercSample, c) -> list[int]:
    """All open edges whose removal leaves two distinct components of size at
    least the large threshold, joined by that edge."""
    g = s.graph
    t = large_threshold(g.n, c=as_fraction(c))
    mask = as_edge_mask(g, s.open)
    bridges: list[int] = []
    rem = mask
    while rem:
        low = rem & -rem
        rem ^= low
        eid = low.bit_length() - 1
        labels, sizes = _components(g, mask & ~low)
        u, v = g.edges[eid]
        lu, lv = labels[int(u)], labels[int(v)]
        if lu != lv and sizes[lu] >= t and sizes[lv] >= t:
            bridges.append(eid)
    return bridges


def write_pivotal_csv(rows: list[dict], path: str, config: dict) -> None:
    """Pivotal experiment table: k,p,upset,estimate,se,bound."""
    with open(path, "w", encoding="utf-8") as fh:
        for key, value in config.items():
            fh.write(f"# {key}={value}\n")
        fh.write("k,p,upset,estimate,se,bound\n")
        for row in rows:
            fh.write(f"{row['k']},{format(row['p'], '.12g')},{row['upset']},"
                     f"{format(row['estimate'], '.12g')},{format(row['se'], '.12g')},"
                     f"{format(row['bound'], '.12g')}\n")
