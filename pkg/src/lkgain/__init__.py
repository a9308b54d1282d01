"""Variable-depth k-opt tour improvement for the symmetric TSP.

The search grows alternating paths of deleted and added edges under a
selectable positive-gain admission rule (strict, homogeneous or tilted),
with nearest-neighbour or alpha-nearness candidate sets, exact oracles for
small instances, and a benchmark harness with CSV output.
"""

from .bench import (
    ExperimentConfig,
    ExperimentResult,
    RunReport,
    restart_tour,
    run_experiment,
    write_report,
)
from .candidates import (
    AlphaTable,
    CandidateKind,
    CandidateSets,
    OneTree,
    alpha_values,
    build_candidate_sets,
    held_karp_ascent,
    minimum_one_tree,
    nn_candidates,
)
from .engine import (
    AlternatingPath,
    Improvement,
    SearchConfig,
    find_sequential_edge_to_add,
    improve_from_vertex,
    run_trial,
    select_next_deleted_edge,
    try_close,
)
from .gains import (
    GainCursor,
    GainKind,
    GainPolicy,
    GainState,
    admits,
    assumed_g0,
    finish_move,
    init_state,
    record,
)
from .oracle import (
    OracleResult,
    brute_force_optimum,
    enumerate_closing_moves,
    held_karp_optimum,
)
from .tour import ExchangeMove, Tour, apply_move, close_up_is_tour, edge_key
from .tsplib import (
    Instance,
    WeightKind,
    cost_row,
    edge_cost,
    format_tsplib,
    parse_tsplib,
    read_optima,
    tour_cost,
)

__version__ = "0.1.0"
