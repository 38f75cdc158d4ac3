"""Strategy-proof selection of influential vertices in directed networks.

The library couples a random-walk diffusion model with three selection
mechanisms built on intersecting random paths, exact rational oracles for
their outcome laws and incentive properties, scale-free network generators,
and a reproducible experiment harness.
"""

from .errors import (
    DuplicateEdge,
    GraphError,
    GraphFileError,
    InvalidParams,
    MonotoneRejectionExhausted,
    NoSinks,
    NotADag,
    NotATree,
    SelfLoop,
    TooLargeForExact,
    TwoPathError,
    VertexOutOfRange,
)
from .graphs import (
    DiGraph,
    GraphClass,
    build_graph,
    classify,
    is_dag,
    is_forest,
    is_tree,
    read_graph,
    sinks,
    topological_order,
    write_graph,
)
from .influence import (
    BalanceReport,
    InfluenceTable,
    MonteCarloInfluence,
    PairwiseInfluence,
    balance_report,
    influence_dag,
    influence_dag_float,
    influence_exact_general,
    influence_montecarlo,
    influence_pair_dag,
    influence_pair_general,
    progeny_counts,
)
from .mechanisms import (
    AnalyticDistribution,
    ForestBatchResult,
    GeneralRunResult,
    Mechanism,
    MechanismTranscript,
    Outcome,
    RandomPath,
    RoundRecord,
    StopReason,
    analytic_two_path_distribution,
    first_meeting_weights,
    run_general_two_path,
    run_two_path,
    run_two_path_forest_batch,
    sample_analytic,
    sample_random_path,
    select_general_two_path,
)
from .oracle import (
    DeviationClass,
    DeviationReport,
    SelectionDistribution,
    all_dags_upto_iso,
    all_digraphs_upto_iso,
    all_trees_upto_iso,
    exact_general_two_path_distribution,
    exact_two_path_distribution,
    expected_influence,
    tree_selection_loss,
    verify_ic,
)
from .generators import (
    BaDagParams,
    PqrParams,
    gen_ba_dag,
    gen_pqr,
    gen_random_dag,
    gen_random_digraph,
    gen_random_forest,
    gen_random_monotone_dag,
    gen_random_tree,
)
from .experiments import (
    ExperimentRow,
    ExperimentSpec,
    RowAborted,
    derive_seed,
    estimate_istar_cyclic,
    pqr_params_from,
    read_experiment_csv,
    run_experiment,
)

__version__ = "0.1.0"
