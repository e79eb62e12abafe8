"""percolab: a bond-percolation laboratory for finite graphs.

Samplers, Newman-Ziff sweeps and sprinkling couplings; exact small-instance
oracles; exact isoperimetric constants with witnesses; closed-form bound
evaluators; and seeded experiment recipes tying them together.
"""

from .errors import PercolabError, PreconditionError, SizeGuardError, WorkLimitError
from .graphs import (FamilySpec, Graph, GraphMetrics, ball, build_graph,
                     cartesian_product, generate, girth, graph_metrics,
                     parse_family, read_graph, write_graph)
from .isoperimetry import (CutResult, cheeger_upper_bound, edge_cheeger_exact,
                           evaluate_cut, vertex_iso_exact)
from .percolation import (ComponentStats, Estimate, MCClusterProbs, PercSample,
                          SmoothedCurves, SmoothedStats, SprinklePlan, SprinkleResult,
                          SweepRecord, as_fraction, binom_weights, binomial_smooth,
                          component_stats, count_large_components, from_open_mask,
                          large_threshold, mc_cluster_probs, newman_ziff_sweep,
                          sample, sprinkle_split, sprinkle_union, write_canonical_csv,
                          write_sweep_csv)
from .pivotal import (CustomUpSet, EdgeCountAtLeast, LargeComponentExists, MergeScore,
                      MergeScoreAtLeast, UpSet, as_edge_mask, find_large_bridges,
                      is_pivotal, merge_score, merge_score_of_sizes,
                      open_component_sizes, pivotal_bound, pivotal_prob_mc,
                      sample_pair, write_pivotal_csv)
from .oracle import (ExactStats, config_component_sizes, exact_cluster_stats,
                     exact_cluster_stats_grid, exact_event_prob, exact_pivotal_prob,
                     verify_monotone, weights_by_popcount)
from .bounds import (BoundParams, SprinklingConstants, ball_growth_radius,
                     coverage_radius, gw_survival, midsize_tail_linear,
                     midsize_tail_power, min_uniqueness_exponent,
                     percolated_expansion_tail, sprinkling_constants,
                     uniqueness_exponent_slack, uniqueness_failure_bound)
from .experiments import (ExperimentReport, counterexample_demo, crossing_bracket,
                          percolated_expander_cheeger, sprinkling_giant_demo,
                          threshold_scan, uniqueness_scan, write_report_csv,
                          write_report_json)

__version__ = "0.1.0"
