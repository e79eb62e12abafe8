"""Shared fixtures: the small-graph corpus used across oracle cross-checks."""

import pytest

from percolab import FamilySpec, cartesian_product, generate


def corpus_graphs():
    """[(name, graph)] for the standard tiny-instance corpus."""
    return [
        ("K3", generate(FamilySpec.complete(3))),
        ("K4", generate(FamilySpec.complete(4))),
        ("P3", generate(FamilySpec.path(3))),
        ("P5", generate(FamilySpec.path(5))),
        ("C6", generate(FamilySpec.cycle(6))),
        ("C8", generate(FamilySpec.cycle(8))),
        ("grid2x3", cartesian_product(generate(FamilySpec.path(2)),
                                      generate(FamilySpec.path(3)))),
        ("Q3", generate(FamilySpec.hypercube(3))),
    ]


@pytest.fixture(scope="session")
def corpus():
    return corpus_graphs()
