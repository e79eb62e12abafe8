"""Exact edge and vertex isoperimetric constants with witness cuts, plus a
seeded local-search upper bound for instances too large to enumerate.

The exact routines enumerate candidate sets once each via canonical
extension from their lowest vertex.  For the edge constant it is lossless
to restrict to connected sets (a disconnected minimizer has a connected
part with ratio no larger).  The same claim fails for the vertex constant
(two leaves of a star beat every connected set), but it is lossless to
restrict to sets connected in the *square* graph: components of a
minimizer lying at distance >= 3 have disjoint external boundaries, so the
mediant inequality hands the minimum to one distance-2-linked clump.

Ratios are compared exactly (cross-multiplied integers); ties go to the
lexicographically smallest witness.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np
from numba import njit

from ._rng import stream
from .errors import PreconditionError, WorkLimitError
from .graphs import Graph

WORK_LIMIT_DEFAULT = 10 ** 8

_DEBRUIJN = np.uint64(0x03F79D71B4CB0A89)
_DB_TABLE = np.zeros(64, dtype=np.int64)
for _i in range(64):
    _DB_TABLE[(((1 << _i) * 0x03F79D71B4CB0A89) & ((1 << 64) - 1)) >> 58] = _i


@dataclass(frozen=True)
class CutResult:
    """A witness cut with both boundary sizes and exact ratios."""

    witness: tuple[int, ...]
    edge_boundary: int
    vertex_boundary: int
    edge_ratio: Fraction
    vertex_ratio: Fraction

    def record(self, objective: str = "edge") -> dict:
        """Serializable report record: value, sorted witness, boundary size."""
        if objective == "edge":
            return {"value": float(self.edge_ratio), "witness": list(self.witness),
                    "boundary": self.edge_boundary}
        if objective == "vertex":
            return {"value": float(self.vertex_ratio), "witness": list(self.witness),
                    "boundary": self.vertex_boundary}
        raise PreconditionError(f"objective must be 'edge' or 'vertex', got {objective!r}")


def evaluate_cut(g: Graph, vertices: Iterable[int]) -> CutResult:
    """Exact boundaries and ratios of an explicit vertex set."""
    A = sorted(set(int(v) for v in vertices))
    if not A:
        raise PreconditionError("cut witness must be nonempty")
    for v in A:
        if not (0 <= v < g.n):
            raise PreconditionError(f"witness vertex {v} out of range")
    inA = np.zeros(g.n, dtype=bool)
    inA[A] = True
    eb = int(np.count_nonzero(inA[g.edges[:, 0]] != inA[g.edges[:, 1]]))
    outside_touching = set()
    for v in A:
        for w in g.neighbors_of(v):
            if not inA[w]:
                outside_touching.add(int(w))
    vb = len(outside_touching)
    size = len(A)
    return CutResult(witness=tuple(A), edge_boundary=eb, vertex_boundary=vb,
                     edge_ratio=Fraction(eb, size), vertex_ratio=Fraction(vb, size))


# ---------------------------------------------------------------------------
# Exact constants by canonical-extension enumeration
# ---------------------------------------------------------------------------

def edge_cheeger_exact(g: Graph, work_limit: int = WORK_LIMIT_DEFAULT) -> CutResult:
    """Exact minimizer of |E(A, A^c)|/|A| over 0 < |A| <= n/2.

    Disconnected input returns ratio 0 with a whole component as witness.
    Raises WorkLimitError when the enumeration exceeds `work_limit`
    extension steps; the caller must shrink the instance.
    """
    return _exact_cut(g, objective="edge", work_limit=work_limit)


def vertex_iso_exact(g: Graph, work_limit: int = WORK_LIMIT_DEFAULT) -> CutResult:
    """Exact minimizer of the external vertex boundary ratio, enumerating
    sets connected in the square graph (lossless, see module docstring)."""
    return _exact_cut(g, objective="vertex", work_limit=work_limit)


def _exact_cut(g: Graph, objective: str, work_limit: int) -> CutResult:
    if g.n < 2:
        raise PreconditionError("isoperimetric constants need at least 2 vertices")
    comp = _smallest_component_if_disconnected(g)
    if comp is not None:
        return evaluate_cut(g, comp)

    base_masks = _adjacency_masks(g)
    if objective == "edge":
        link_masks = base_masks
    elif objective == "vertex":
        link_masks = _square_masks(g, base_masks)
    else:
        raise PreconditionError(f"objective must be 'edge' or 'vertex', got {objective!r}")

    half = g.n // 2
    if g.n <= 63:
        gm = np.array(base_masks, dtype=np.uint64)
        lm = np.array(link_masks, dtype=np.uint64)
        deg = g.degrees.astype(np.int64)
        num, den, mask, status = _enum_best_kernel(
            g.n, gm, lm, deg, half, 0 if objective == "edge" else 1, int(work_limit))
        if status != 0:
            raise WorkLimitError(
                f"{objective} enumeration exceeded work_limit={work_limit}; shrink the instance")
        witness = tuple(v for v in range(g.n) if (int(mask) >> v) & 1)
    else:
        num, den, witness_mask = _enum_best_python(
            g.n, base_masks, link_masks, [int(d) for d in g.degrees], half,
            objective, int(work_limit))
        witness = tuple(v for v in range(g.n) if (witness_mask >> v) & 1)
    del num, den  # ratios recomputed below from the witness for full records
    return evaluate_cut(g, witness)


def _smallest_component_if_disconnected(g: Graph) -> Optional[list[int]]:
    seen = bytearray(g.n)
    comps: list[list[int]] = []
    for start in range(g.n):
        if seen[start]:
            continue
        seen[start] = 1
        comp = [start]
        stack = [start]
        while stack:
            x = stack.pop()
            for w in g.neighbors_of(x):
                w = int(w)
                if not seen[w]:
                    seen[w] = 1
                    comp.append(w)
                    stack.append(w)
        comps.append(sorted(comp))
    if len(comps) == 1:
        return None
    comps.sort(key=lambda c: (len(c), c))
    return comps[0]


def _adjacency_masks(g: Graph) -> list[int]:
    masks = [0] * g.n
    for u, v in g.edges:
        masks[int(u)] |= 1 << int(v)
        masks[int(v)] |= 1 << int(u)
    return masks


def _square_masks(g: Graph, base: list[int]) -> list[int]:
    sq = list(base)
    for v in range(g.n):
        acc = base[v]
        for w in g.neighbors_of(v):
            acc |= base[int(w)]
        sq[v] = acc & ~(1 << v)
    return sq


@njit(cache=True, nogil=True)
def _popcnt(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return np.int64((x * np.uint64(0x0101010101010101)) >> np.uint64(56))


@njit(cache=True, nogil=True)
def _bit_index(low, table):
    return table[np.uint64(low * np.uint64(0x03F79D71B4CB0A89)) >> np.uint64(58)]


@njit(cache=True, nogil=True)
def _lex_less(x, y):
    """True iff the sorted vertex list of x precedes that of y."""
    if x == y:
        return False
    d = x ^ y
    low = d & (~d + np.uint64(1))
    upper = ~((low << np.uint64(1)) - np.uint64(1))
    if y & low:
        return (x & upper) == np.uint64(0)
    return (y & upper) != np.uint64(0)


@njit(cache=True, nogil=True)
def _enum_best_kernel(n, g_nbr, link_nbr, deg, half, objective, work_limit):
    """Best (boundary, size) over canonically-enumerated candidate sets.

    Returns (num, den, witness_mask, status); status 1 means the work budget
    ran out.  Subtrees fenced off from beating the incumbent via their dead
    vertices are pruned (strictly, so tie witnesses survive).
    """
    table = _DB_TABLE
    one = np.uint64(1)
    zero = np.uint64(0)
    # sentinel worse than any real cut but safe against int64 overflow in
    # cross-multiplied comparisons (boundary <= 2m, size <= n)
    best_num = np.int64(1) << np.int64(40)
    best_den = np.int64(1)
    best_mask = zero
    work = np.int64(0)
    cap = half + 2
    st_s = np.empty(cap, np.uint64)
    st_rem = np.empty(cap, np.uint64)
    st_dead = np.empty(cap, np.uint64)
    st_nbr = np.empty(cap, np.uint64)
    st_sumdeg = np.empty(cap, np.int64)
    st_internal = np.empty(cap, np.int64)
    st_edead = np.empty(cap, np.int64)

    for v in range(n):
        vbit = one << np.uint64(v)
        low_mask = vbit - one
        s0 = vbit
        dead0 = low_mask
        cand0 = link_nbr[v] & ~low_mask & ~vbit
        nbr0 = g_nbr[v]
        edead0 = _popcnt(g_nbr[v] & dead0)
        work += 1
        if work > work_limit:
            return best_num, best_den, best_mask, np.int64(1)
        # evaluate the singleton {v}
        if half >= 1:
            if objective == 0:
                boundary = deg[v]
            else:
                boundary = _popcnt(nbr0 & ~s0)
            if boundary * best_den < best_num or (
                    boundary * best_den == best_num and _lex_less(s0, best_mask)):
                best_num = boundary
                best_den = np.int64(1)
                best_mask = s0
        if half < 2 or cand0 == zero:
            continue
        sp = 0
        st_s[0] = s0
        st_rem[0] = cand0
        st_dead[0] = dead0
        st_nbr[0] = nbr0
        st_sumdeg[0] = deg[v]
        st_internal[0] = 0
        st_edead[0] = edead0
        while sp >= 0:
            if st_rem[sp] == zero:
                sp -= 1
                continue
            rem = st_rem[sp]
            u_low = rem & (~rem + one)
            st_rem[sp] = rem ^ u_low
            u = _bit_index(u_low, table)
            s_par = st_s[sp]
            dead_par = st_dead[sp]
            child_s = s_par | u_low
            child_size = _popcnt(child_s)
            child_sumdeg = st_sumdeg[sp] + deg[u]
            child_internal = st_internal[sp] + _popcnt(g_nbr[u] & s_par)
            child_nbr = st_nbr[sp] | g_nbr[u]
            child_edead = st_edead[sp] + _popcnt(g_nbr[u] & dead_par)
            work += 1
            if work > work_limit:
                return best_num, best_den, best_mask, np.int64(1)
            if objective == 0:
                boundary = child_sumdeg - 2 * child_internal
            else:
                boundary = _popcnt(child_nbr & ~child_s)
            if boundary * best_den < best_num * child_size:
                best_num = boundary
                best_den = child_size
                best_mask = child_s
            elif boundary * best_den == best_num * child_size and _lex_less(child_s, best_mask):
                best_num = boundary
                best_den = child_size
                best_mask = child_s
            # extend the child if it can still breed and is not fenced off
            if child_size < half:
                rem_after = st_rem[sp]
                new_nb = link_nbr[u] & ~(child_s | dead_par | rem_after) & ~low_mask
                child_cand = rem_after | new_nb
                if child_cand != zero:
                    if objective == 0:
                        fence = child_edead
                    else:
                        fence = _popcnt(child_nbr & dead_par)
                    if fence * best_den <= best_num * half:
                        sp += 1
                        st_s[sp] = child_s
                        st_rem[sp] = child_cand
                        st_dead[sp] = dead_par
                        st_nbr[sp] = child_nbr
                        st_sumdeg[sp] = child_sumdeg
                        st_internal[sp] = child_internal
                        st_edead[sp] = child_edead
                        # the parent resumes after the child subtree; ban u for it
                        st_dead[sp - 1] = dead_par | u_low
                        st_edead[sp - 1] += _popcnt(g_nbr[u] & s_par)
                        continue
            st_dead[sp] = dead_par | u_low
            st_edead[sp] += _popcnt(g_nbr[u] & s_par)
    return best_num, best_den, best_mask, np.int64(0)


def _enum_best_python(n, g_nbr, link_nbr, deg, half, objective, work_limit):
    """Arbitrary-n fallback of the enumeration kernel using Python ints."""
    best_num, best_den, best_mask = 1 << 62, 1, 0
    work = 0

    def lex_less(x: int, y: int) -> bool:
        if x == y:
            return False
        d = x ^ y
        low = d & -d
        upper = ~((low << 1) - 1)
        if y & low:
            return (x & upper) == 0
        return (y & upper) != 0

    def consider(mask: int, boundary: int, size: int) -> None:
        nonlocal best_num, best_den, best_mask
        if boundary * best_den < best_num * size or (
                boundary * best_den == best_num * size and lex_less(mask, best_mask)):
            best_num, best_den, best_mask = boundary, size, mask

    for v in range(n):
        vbit = 1 << v
        low_mask = vbit - 1
        work += 1
        if work > work_limit:
            raise WorkLimitError(f"enumeration exceeded work_limit={work_limit}; shrink the instance")
        if half >= 1:
            b0 = deg[v] if objective == "edge" else bin(g_nbr[v] & ~vbit).count("1")
            consider(vbit, b0, 1)
        cand0 = link_nbr[v] & ~low_mask & ~vbit
        if half < 2 or cand0 == 0:
            continue
        stack = [(vbit, cand0, low_mask, g_nbr[v], deg[v], 0, (g_nbr[v] & low_mask).bit_count())]
        while stack:
            s_par, rem, dead, nbrm, sumdeg, internal, edead = stack.pop()
            while rem:
                u_low = rem & -rem
                rem ^= u_low
                u = u_low.bit_length() - 1
                child_s = s_par | u_low
                child_size = child_s.bit_count()
                child_sumdeg = sumdeg + deg[u]
                child_internal = internal + (g_nbr[u] & s_par).bit_count()
                child_nbr = nbrm | g_nbr[u]
                child_edead = edead + (g_nbr[u] & dead).bit_count()
                work += 1
                if work > work_limit:
                    raise WorkLimitError(
                        f"enumeration exceeded work_limit={work_limit}; shrink the instance")
                boundary = (child_sumdeg - 2 * child_internal if objective == "edge"
                            else (child_nbr & ~child_s).bit_count())
                consider(child_s, boundary, child_size)
                if child_size < half:
                    new_nb = link_nbr[u] & ~(child_s | dead | rem) & ~low_mask
                    child_cand = rem | new_nb
                    if child_cand:
                        fence = child_edead if objective == "edge" else (child_nbr & dead).bit_count()
                        if fence * best_den <= best_num * half:
                            stack.append((s_par, rem, dead | u_low, nbrm, sumdeg, internal,
                                          edead + (g_nbr[u] & s_par).bit_count()))
                            stack.append((child_s, child_cand, dead, child_nbr, child_sumdeg,
                                          child_internal, child_edead))
                            break
                dead |= u_low
                edead += (g_nbr[u] & s_par).bit_count()
    return best_num, best_den, best_mask


# ---------------------------------------------------------------------------
# Heuristic upper bound
# ---------------------------------------------------------------------------

def cheeger_upper_bound(g: Graph, budget: int = 10 ** 4, seed: int = 0) -> CutResult:
    """A valid cut (hence an upper bound on the edge constant) from seeded
    BFS sweeps plus greedy single-vertex moves; deterministic per seed."""
    if g.n < 2:
        raise PreconditionError("isoperimetric constants need at least 2 vertices")
    comp = _smallest_component_if_disconnected(g)
    if comp is not None:
        raise PreconditionError("cheeger_upper_bound needs a connected graph")
    if budget < 1:
        raise PreconditionError(f"budget must be >= 1, got {budget}")

    rng = stream(seed)
    half = g.n // 2
    starts = [0] + [int(v) for v in rng.permutation(g.n)[: min(g.n, 8)]]
    work = 0
    best_ratio: Optional[Fraction] = None
    best_set: set[int] = set()

    nbr_sets = g.adjacency_sets()

    def sweep(start: int) -> None:
        nonlocal work, best_ratio, best_set
        order = _bfs_order(g, start)
        inA: set[int] = set()
        eb = 0
        for v in order[:half]:
            eb += int(g.degrees[v]) - 2 * len(nbr_sets[v] & inA)
            inA.add(v)
            work += 1
            ratio = Fraction(eb, len(inA))
            if best_ratio is None or ratio < best_ratio:
                best_ratio, best_set = ratio, set(inA)
            if work >= budget:
                return

    for s in starts:
        if work >= budget:
            break
        sweep(s)

    # greedy single-vertex improvement around the incumbent
    improved = True
    while improved and work < budget:
        improved = False
        eb = _edge_boundary(g, best_set)
        candidates = sorted(set().union(*(nbr_sets[v] for v in best_set)) - best_set)
        moves: list[tuple[Fraction, str, int]] = []
        for u in candidates:
            if len(best_set) + 1 > half:
                break
            delta = int(g.degrees[u]) - 2 * len(nbr_sets[u] & best_set)
            moves.append((Fraction(eb + delta, len(best_set) + 1), "add", u))
            work += 1
            if work >= budget:
                break
        if work < budget and len(best_set) > 1:
            for u in sorted(best_set):
                delta = 2 * len(nbr_sets[u] & best_set) - int(g.degrees[u])
                moves.append((Fraction(eb + delta, len(best_set) - 1), "remove", u))
                work += 1
                if work >= budget:
                    break
        for ratio, kind, u in sorted(moves, key=lambda t: (t[0], t[1], t[2])):
            if ratio < best_ratio:
                if kind == "add":
                    best_set.add(u)
                else:
                    best_set.remove(u)
                best_ratio = ratio
                improved = True
                break

    return evaluate_cut(g, best_set)


def _bfs_order(g: Graph, start: int) -> list[int]:
    dist = {start: 0}
    order = [start]
    frontier = [start]
    while frontier:
        nxt: list[int] = []
        for v in frontier:
            for w in sorted(int(x) for x in g.neighbors_of(v)):
                if w not in dist:
                    dist[w] = dist[v] + 1
                    nxt.append(w)
        nxt.sort()
        order.extend(nxt)
        frontier = nxt
    return order


def _edge_boundary(g: Graph, A: set[int]) -> int:
    return sum(1 for u, v in g.edges if (int(u) in A) != (int(v) in A))
