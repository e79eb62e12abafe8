import math
from fractions import Fraction

import pytest

from percolab import (FamilySpec, PreconditionError, WorkLimitError, ball,
                      ball_growth_radius, build_graph, cheeger_upper_bound,
                      edge_cheeger_exact, evaluate_cut, generate, vertex_iso_exact)
from percolab._rng import stream
from percolab.isoperimetry import _adjacency_masks, _enum_best_python, _square_masks


def brute_force_min_ratio(g, objective):
    """Independent full 2^n subset enumeration oracle."""
    nbr = _adjacency_masks(g)
    best = None
    for mask in range(1, 1 << g.n):
        size = mask.bit_count()
        if 2 * size > g.n:
            continue
        if objective == "edge":
            b = sum(1 for u, v in g.edges
                    if ((mask >> int(u)) & 1) != ((mask >> int(v)) & 1))
        else:
            acc = 0
            for v in range(g.n):
                if (mask >> v) & 1:
                    acc |= nbr[v]
            b = (acc & ~mask).bit_count()
        r = Fraction(b, size)
        if best is None or r < best:
            best = r
    return best


SMALL_ZOO = [
    ("grid3x3", FamilySpec.box(2, 3)),
    ("box2x2x2", FamilySpec.box(3, 2)),
    ("cycle9", FamilySpec.cycle(9)),
    ("path7", FamilySpec.path(7)),
    ("K5", FamilySpec.complete(5)),
    ("Q3", FamilySpec.hypercube(3)),
    ("torus3x3", FamilySpec.box(2, 3, torus=True)),
    ("rr12", FamilySpec.random_regular(12, 3, seed=3)),
]


@pytest.mark.parametrize("name,spec", SMALL_ZOO)
@pytest.mark.parametrize("objective", ["edge", "vertex"])
def test_exact_matches_full_subset_oracle(name, spec, objective):
    g = generate(spec)
    want = brute_force_min_ratio(g, objective)
    if objective == "edge":
        got = edge_cheeger_exact(g).edge_ratio
    else:
        got = vertex_iso_exact(g).vertex_ratio
    assert got == want
    # the arbitrary-n fallback must agree with the kernel
    base = _adjacency_masks(g)
    link = base if objective == "edge" else _square_masks(g, base)
    num, den, _ = _enum_best_python(g.n, base, link, [int(d) for d in g.degrees],
                                    g.n // 2, objective, 10 ** 8)
    assert Fraction(num, den) == want


def test_edge_examples():
    k4 = generate(FamilySpec.complete(4))
    cut = edge_cheeger_exact(k4)
    assert cut.edge_ratio == 2 and len(cut.witness) == 2
    c6 = generate(FamilySpec.cycle(6))
    cut = edge_cheeger_exact(c6)
    assert cut.edge_ratio == Fraction(2, 3)
    assert cut.witness == (0, 1, 2)  # lexicographically smallest 3-arc
    assert cut.edge_boundary == 2


def test_vertex_examples():
    assert vertex_iso_exact(generate(FamilySpec.cycle(6))).vertex_ratio == Fraction(2, 3)
    p4 = generate(FamilySpec.path(4))
    cut = vertex_iso_exact(p4)
    assert cut.vertex_ratio == Fraction(1, 2)
    assert cut.witness == (0, 1)
    assert vertex_iso_exact(generate(FamilySpec.complete(4))).vertex_ratio == 1


def test_vertex_minimizer_may_be_disconnected():
    # two leaves of a star: the connected-set restriction would miss this
    star = build_graph(4, [(0, 1), (0, 2), (0, 3)])
    cut = vertex_iso_exact(star)
    assert cut.vertex_ratio == Fraction(1, 2)
    assert cut.witness == (1, 2)


def test_disconnected_input_gives_zero_cut():
    g = build_graph(5, [(0, 1), (2, 3), (3, 4)])
    cut = edge_cheeger_exact(g)
    assert cut.edge_ratio == 0 and cut.witness == (0, 1)
    cut = vertex_iso_exact(g)
    assert cut.vertex_ratio == 0


def test_work_limit_is_enforced():
    g = generate(FamilySpec.hypercube(4))
    with pytest.raises(WorkLimitError):
        edge_cheeger_exact(g, work_limit=10)
    with pytest.raises(WorkLimitError):
        _enum_best_python(g.n, _adjacency_masks(g), _adjacency_masks(g),
                          [int(d) for d in g.degrees], g.n // 2, "edge", 10)


def test_single_vertex_rejected():
    with pytest.raises(PreconditionError):
        edge_cheeger_exact(generate(FamilySpec.path(1)))


def test_box_lower_bound_small():
    # the box family keeps edge constant >= 1/(2d); exact check at d=2
    cut = edge_cheeger_exact(generate(FamilySpec.box(2, 2)))
    assert cut.edge_ratio >= Fraction(1, 4)


def test_sandwich_invariants():
    for name, spec in SMALL_ZOO:
        g = generate(spec)
        e = edge_cheeger_exact(g).edge_ratio
        v = vertex_iso_exact(g).vertex_ratio
        delta = int(g.degrees.max())
        assert v <= e <= delta * v
        assert e <= int(g.degrees.min())


def test_upper_bound_examples():
    c100 = generate(FamilySpec.cycle(100))
    ub = cheeger_upper_bound(c100, budget=10 ** 4, seed=0)
    assert ub.edge_ratio <= Fraction(2, 50)
    exact = edge_cheeger_exact(c100)
    assert ub.edge_ratio >= exact.edge_ratio
    k10 = generate(FamilySpec.complete(10))
    assert cheeger_upper_bound(k10, budget=10 ** 4, seed=0).edge_ratio == 5


@pytest.mark.parametrize("name,spec", SMALL_ZOO)
def test_upper_bound_never_beats_exact(name, spec):
    g = generate(spec)
    ub = cheeger_upper_bound(g, budget=2000, seed=1)
    assert ub.edge_ratio >= edge_cheeger_exact(g).edge_ratio


def test_upper_bound_requires_connected():
    g = build_graph(4, [(0, 1), (2, 3)])
    with pytest.raises(PreconditionError):
        cheeger_upper_bound(g)


def test_evaluate_cut_matches_definition():
    g = generate(FamilySpec.cycle(6))
    cut = evaluate_cut(g, [0, 1, 2])
    assert cut.edge_boundary == 2 and cut.vertex_boundary == 2
    assert cut.record("edge") == {"value": 2 / 3, "witness": [0, 1, 2], "boundary": 2}


def test_ball_growth_radius_certificate():
    # on an exactly-certified vertex expander, |B(A, r)| >= k*n for every
    # sampled A with |A| >= c*n, with r from the closed-form radius
    c, k = 0.25, 0.75
    for name, spec in [("Q3", FamilySpec.hypercube(3)),
                       ("rr12", FamilySpec.random_regular(12, 3, seed=3)),
                       ("K5", FamilySpec.complete(5))]:
        g = generate(spec)
        b = float(vertex_iso_exact(g).vertex_ratio)
        r = ball_growth_radius(b, c, k)
        rng = stream(17)
        need = math.ceil(c * g.n)
        for _ in range(30):
            size = int(rng.integers(need, g.n + 1))
            A = rng.choice(g.n, size=size, replace=False).tolist()
            assert len(ball(g, A, r)) >= k * g.n


def test_witness_lex_tie_break_deterministic():
    g = generate(FamilySpec.cycle(8))
    assert edge_cheeger_exact(g).witness == (0, 1, 2, 3)
    assert vertex_iso_exact(g).witness == (0, 1, 2, 3)
