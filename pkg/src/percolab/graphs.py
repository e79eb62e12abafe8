"""Immutable undirected simple graphs, family generators and structural metrics.

A Graph stores its edge list in construction order (the position of an edge
is its id; all samplers address edges by this id) together with a CSR-style
adjacency index.  Generators cover the families used throughout the
experiments: complete graphs, cycles, paths, hypercubes, boxes/tori, random
regular graphs from the pairing model, and Cartesian products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from ._rng import stream
from .errors import PreconditionError


class Graph:
    """Immutable undirected simple graph with offset-indexed adjacency.

    Attributes:
        n: number of vertices (labelled 0..n-1).
        m: number of edges.
        edges: (m, 2) int64 array, one row per edge, construction order.
        offsets / neighbors / incident_edges: CSR adjacency; the neighbors of
            v are neighbors[offsets[v]:offsets[v+1]], and incident_edges holds
            the id of the edge realizing each adjacency slot.
        degrees: (n,) int64 array.
    """

    __slots__ = ("n", "m", "edges", "offsets", "neighbors", "incident_edges", "degrees")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        if n < 1:
            raise PreconditionError(f"vertex count must be >= 1, got {n}")
        edge_arr = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        seen: set[tuple[int, int]] = set()
        for u, v in edge_arr:
            u, v = int(u), int(v)
            if u == v:
                raise PreconditionError(f"self-loop at vertex {u} is not allowed")
            if not (0 <= u < n and 0 <= v < n):
                raise PreconditionError(f"edge endpoint out of range: ({u}, {v}) with n={n}")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise PreconditionError(f"duplicate edge ({u}, {v})")
            seen.add(key)

        self.n = int(n)
        self.m = int(edge_arr.shape[0])
        self.edges = edge_arr
        degrees = np.zeros(n, dtype=np.int64)
        if self.m:
            np.add.at(degrees, edge_arr[:, 0], 1)
            np.add.at(degrees, edge_arr[:, 1], 1)
        self.degrees = degrees
        offsets = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(degrees, out=offsets[1:])
        neighbors = np.zeros(2 * self.m, dtype=np.int64)
        incident = np.zeros(2 * self.m, dtype=np.int64)
        cursor = offsets[:-1].copy()
        for eid in range(self.m):
            u, v = edge_arr[eid]
            neighbors[cursor[u]] = v
            incident[cursor[u]] = eid
            cursor[u] += 1
            neighbors[cursor[v]] = u
            incident[cursor[v]] = eid
            cursor[v] += 1
        self.offsets = offsets
        self.neighbors = neighbors
        self.incident_edges = incident
        for arr in (self.edges, self.degrees, self.offsets, self.neighbors, self.incident_edges):
            arr.flags.writeable = False

    def neighbors_of(self, v: int) -> np.ndarray:
        return self.neighbors[self.offsets[v]:self.offsets[v + 1]]

    def adjacency_sets(self) -> list[set[int]]:
        return [set(self.neighbors_of(v).tolist()) for v in range(self.n)]

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Graph(n={self.n}, m={self.m})"


def build_graph(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    """Validate and build a Graph; edge ids are positions in `edges`."""
    return Graph(n, edges)


# ---------------------------------------------------------------------------
# Family specifications
# ---------------------------------------------------------------------------

_FAMILY_KINDS = ("complete", "cycle", "path", "hypercube", "box", "random_regular", "product")


@dataclass(frozen=True)
class FamilySpec:
    """Tagged description of a graph family instance.

    Exactly one of the classmethod constructors should be used; `generate`
    is deterministic given the spec (the random-regular seed is part of it).
    """

    kind: str
    n: int = 0
    d: int = 0
    side: int = 0
    torus: bool = False
    seed: int = 0
    left: Optional["FamilySpec"] = None
    right: Optional["FamilySpec"] = None

    @classmethod
    def complete(cls, n: int) -> "FamilySpec":
        return cls("complete", n=n)

    @classmethod
    def cycle(cls, n: int) -> "FamilySpec":
        return cls("cycle", n=n)

    @classmethod
    def path(cls, n: int) -> "FamilySpec":
        return cls("path", n=n)

    @classmethod
    def hypercube(cls, d: int) -> "FamilySpec":
        return cls("hypercube", d=d)

    @classmethod
    def box(cls, d: int, side: int, torus: bool = False) -> "FamilySpec":
        return cls("box", d=d, side=side, torus=torus)

    @classmethod
    def random_regular(cls, n: int, d: int, seed: int = 0) -> "FamilySpec":
        return cls("random_regular", n=n, d=d, seed=seed)

    @classmethod
    def product(cls, left: "FamilySpec", right: "FamilySpec") -> "FamilySpec":
        return cls("product", left=left, right=right)

    def validate(self) -> None:
        if self.kind not in _FAMILY_KINDS:
            raise PreconditionError(f"unknown family kind {self.kind!r}")
        if self.kind in ("complete", "path") and self.n < 1:
            raise PreconditionError(f"{self.kind} needs n >= 1, got {self.n}")
        if self.kind == "cycle" and self.n < 3:
            raise PreconditionError(f"cycle needs n >= 3 to stay simple, got {self.n}")
        if self.kind == "hypercube" and self.d < 1:
            raise PreconditionError(f"hypercube needs d >= 1, got {self.d}")
        if self.kind == "box":
            if self.d < 1 or self.side < 1:
                raise PreconditionError(f"box needs d >= 1 and side >= 1, got d={self.d}, side={self.side}")
            if self.torus and self.side == 2:
                raise PreconditionError("torus with side 2 would create parallel edges")
        if self.kind == "random_regular":
            if self.n < 1 or self.d < 1:
                raise PreconditionError("random_regular needs n >= 1 and d >= 1")
            if (self.n * self.d) % 2 != 0:
                raise PreconditionError(f"random_regular needs n*d even, got n={self.n}, d={self.d}")
            if self.d >= self.n:
                raise PreconditionError(f"random_regular needs d < n, got n={self.n}, d={self.d}")
        if self.kind == "product":
            if self.left is None or self.right is None:
                raise PreconditionError("product needs two factor specs")
            self.left.validate()
            self.right.validate()

    def label(self) -> str:
        """Shell-parsable label; `parse_family(spec.label())` round-trips."""
        if self.kind == "complete":
            return f"complete:{self.n}"
        if self.kind == "cycle":
            return f"cycle:{self.n}"
        if self.kind == "path":
            return f"path:{self.n}"
        if self.kind == "hypercube":
            return f"hypercube:{self.d}"
        if self.kind == "box":
            return f"box:{self.d},{self.side}" + (",torus" if self.torus else "")
        if self.kind == "random_regular":
            return f"rr:{self.n},{self.d},seed={self.seed}"
        return f"{self.left.label()}*{self.right.label()}"


def parse_family(text: str) -> FamilySpec:
    """Parse a family label such as `cycle:8`, `rr:10000,3,seed=7`,
    `box:3,8,torus` or the product form `cycle:100*complete:3`."""
    text = text.strip()
    if "*" in text:
        parts = text.split("*")
        spec = _parse_single(parts[0])
        for part in parts[1:]:
            spec = FamilySpec.product(spec, _parse_single(part))
        spec.validate()
        return spec
    spec = _parse_single(text)
    spec.validate()
    return spec


def _parse_single(text: str) -> FamilySpec:
    name, _, rest = text.strip().partition(":")
    name = name.strip().lower()
    args = [a.strip() for a in rest.split(",") if a.strip()] if rest else []

    def need(count: int) -> list[int]:
        if len(args) < count:
            raise PreconditionError(f"family {name!r} needs {count} parameter(s): {text!r}")
        try:
            return [int(a) for a in args[:count]]
        except ValueError as exc:
            raise PreconditionError(f"bad integer parameter in family spec {text!r}") from exc

    if name in ("complete", "k"):
        return FamilySpec.complete(need(1)[0])
    if name in ("cycle", "c"):
        return FamilySpec.cycle(need(1)[0])
    if name in ("path", "p"):
        return FamilySpec.path(need(1)[0])
    if name in ("hypercube", "q"):
        return FamilySpec.hypercube(need(1)[0])
    if name == "box":
        d, side = need(2)
        torus = any(a.lower() == "torus" for a in args[2:])
        return FamilySpec.box(d, side, torus)
    if name in ("rr", "random_regular"):
        n, d = need(2)
        seed = 0
        for a in args[2:]:
            if a.startswith("seed="):
                try:
                    seed = int(a[5:])
                except ValueError as exc:
                    raise PreconditionError(f"bad seed in family spec {text!r}") from exc
        return FamilySpec.random_regular(n, d, seed)
    raise PreconditionError(f"unknown family {name!r} in {text!r}")


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

def generate(spec: FamilySpec) -> Graph:
    """Build the graph described by `spec`; deterministic given the spec."""
    spec.validate()
    if spec.kind == "complete":
        return build_graph(spec.n, [(i, j) for i in range(spec.n) for j in range(i + 1, spec.n)])
    if spec.kind == "cycle":
        return build_graph(spec.n, [(i, (i + 1) % spec.n) for i in range(spec.n)])
    if spec.kind == "path":
        return build_graph(spec.n, [(i, i + 1) for i in range(spec.n - 1)])
    if spec.kind == "hypercube":
        n = 1 << spec.d
        edges = [(v, v | (1 << b)) for v in range(n) for b in range(spec.d) if not (v >> b) & 1]
        return build_graph(n, edges)
    if spec.kind == "box":
        return _box_graph(spec.d, spec.side, spec.torus)
    if spec.kind == "random_regular":
        return _random_regular(spec.n, spec.d, spec.seed)
    return cartesian_product(generate(spec.left), generate(spec.right))


def _box_graph(d: int, side: int, torus: bool) -> Graph:
    n = side ** d
    edges: list[tuple[int, int]] = []
    # vertex index = sum coords[i] * side**i
    strides = [side ** i for i in range(d)]
    for v in range(n):
        for axis in range(d):
            coord = (v // strides[axis]) % side
            if coord + 1 < side:
                edges.append((v, v + strides[axis]))
            elif torus and side >= 3:
                edges.append((v - (side - 1) * strides[axis], v))
    # deduplicate keeping first occurrence (wrap edges are emitted once)
    uniq: dict[tuple[int, int], None] = {}
    for u, v in edges:
        key = (u, v) if u < v else (v, u)
        uniq.setdefault(key, None)
    return build_graph(n, list(uniq.keys()))


def _random_regular(n: int, d: int, seed: int, max_tries: Optional[int] = None) -> Graph:
    """Pairing model with whole-matching rejection.

    A uniform perfect matching on the n*d stubs is drawn; the whole matching
    is rejected on any self-loop or parallel edge, which makes accepted
    outputs exactly uniform over simple d-regular graphs.  The retry budget
    defaults to ceil(10 * e^((d*d - 1)/4)), the reciprocal of the asymptotic
    acceptance rate with a 10x cushion.
    """
    if max_tries is None:
        max_tries = math.ceil(10.0 * math.exp((d * d - 1) / 4.0))
    rng = stream(seed)
    stubs = np.repeat(np.arange(n, dtype=np.int64), d)
    for _ in range(max_tries):
        perm = rng.permutation(stubs)
        u = perm[0::2]
        v = perm[1::2]
        if np.any(u == v):
            continue
        lo = np.minimum(u, v)
        hi = np.maximum(u, v)
        keys = lo * n + hi
        if np.unique(keys).size != keys.size:
            continue
        return build_graph(n, list(zip(lo.tolist(), hi.tolist())))
    raise PreconditionError(
        f"random_regular(n={n}, d={d}, seed={seed}): no simple matching within {max_tries} tries"
    )


def cartesian_product(g: Graph, h: Graph) -> Graph:
    """Cartesian product: (a,b) ~ (a',b') iff a=a', b~b' or b=b', a~a'.

    Vertex (a, b) maps to index a*h.n + b.
    """
    edges: list[tuple[int, int]] = []
    for a in range(g.n):
        base = a * h.n
        for u, v in h.edges:
            edges.append((base + int(u), base + int(v)))
    for u, v in g.edges:
        for b in range(h.n):
            edges.append((int(u) * h.n + b, int(v) * h.n + b))
    return build_graph(g.n * h.n, edges)


# ---------------------------------------------------------------------------
# Structural metrics
# ---------------------------------------------------------------------------

def ball(g: Graph, centers: Iterable[int], r: int) -> set[int]:
    """Exact ball B(A, r): all vertices within distance r of some center."""
    current = set(int(v) for v in centers)
    for v in current:
        if not (0 <= v < g.n):
            raise PreconditionError(f"ball center {v} out of range")
    if r < 0:
        raise PreconditionError("radius must be >= 0")
    reached = set(current)
    frontier = set(current)
    for _ in range(r):
        nxt: set[int] = set()
        for v in frontier:
            for w in g.neighbors_of(v):
                w = int(w)
                if w not in reached:
                    reached.add(w)
                    nxt.add(w)
        if not nxt:
            break
        frontier = nxt
    return reached


def girth(g: Graph) -> Optional[int]:
    """Length of the shortest cycle, or None for acyclic graphs.

    One BFS per start vertex with cross-edge detection; a BFS stops growing
    once it can no longer beat the best cycle found so far.
    """
    best: Optional[int] = None
    dist = np.empty(g.n, dtype=np.int64)
    parent = np.empty(g.n, dtype=np.int64)
    for src in range(g.n):
        dist.fill(-1)
        dist[src] = 0
        parent[src] = -1
        queue = [src]
        head = 0
        while head < len(queue):
            x = queue[head]
            head += 1
            if best is not None and 2 * dist[x] + 1 >= best:
                continue
            for slot in range(g.offsets[x], g.offsets[x + 1]):
                y = int(g.neighbors[slot])
                if dist[y] < 0:
                    dist[y] = dist[x] + 1
                    parent[y] = x
                    queue.append(y)
                elif y != parent[x]:
                    cand = int(dist[x] + dist[y] + 1)
                    if best is None or cand < best:
                        best = cand
    return best


ACYCLIC = None  # marker returned by girth() for forests


@dataclass(frozen=True)
class GraphMetrics:
    max_degree: int
    min_degree: int
    diameter: float  # math.inf when disconnected
    connected: bool


def graph_metrics(g: Graph) -> GraphMetrics:
    """Exact degree extremes, connectivity and diameter (inf if disconnected)."""
    comp = _component_labels(g)
    connected = bool(comp.max(initial=0) == 0)
    if not connected:
        diameter: float = math.inf
    else:
        diameter = float(_diameter(g))
    return GraphMetrics(
        max_degree=int(g.degrees.max()),
        min_degree=int(g.degrees.min()),
        diameter=diameter,
        connected=connected,
    )


def _component_labels(g: Graph) -> np.ndarray:
    labels = np.full(g.n, -1, dtype=np.int64)
    nxt = 0
    for src in range(g.n):
        if labels[src] >= 0:
            continue
        labels[src] = nxt
        queue = [src]
        while queue:
            x = queue.pop()
            for w in g.neighbors_of(x):
                w = int(w)
                if labels[w] < 0:
                    labels[w] = nxt
                    queue.append(w)
        nxt += 1
    return labels


def _diameter(g: Graph) -> int:
    from ._kernels import all_sources_eccentricity

    return int(all_sources_eccentricity(g.n, g.offsets, g.neighbors))


# ---------------------------------------------------------------------------
# Text format: line 1 "n m", then one "u v" line per edge; '#' comments.
# ---------------------------------------------------------------------------

def write_graph(g: Graph, path: str, header_comments: Sequence[str] = ()) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{g.n} {g.m}\n")
        for line in header_comments:
            fh.write(f"# {line}\n")
        for u, v in g.edges:
            fh.write(f"{int(u)} {int(v)}\n")


def read_graph(path: str) -> Graph:
    """Parse the text format written by write_graph; round-trip exact."""
    n = m = None
    edges: list[tuple[int, int]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if n is None:
                if len(parts) != 2:
                    raise PreconditionError(f"{path}:{lineno}: header must be 'n m'")
                try:
                    n, m = int(parts[0]), int(parts[1])
                except ValueError as exc:
                    raise PreconditionError(f"{path}:{lineno}: bad header") from exc
                continue
            if len(parts) != 2:
                raise PreconditionError(f"{path}:{lineno}: edge line must be 'u v'")
            try:
                edges.append((int(parts[0]), int(parts[1])))
            except ValueError as exc:
                raise PreconditionError(f"{path}:{lineno}: bad edge line") from exc
    if n is None:
        raise PreconditionError(f"{path}: missing header line")
    if len(edges) != m:
        raise PreconditionError(f"{path}: header promised {m} edges, found {len(edges)}")
    return build_graph(n, edges)
