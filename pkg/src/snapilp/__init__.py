"""snapilp: snapshot ensembles for anytime inductive logic programming.

A single anytime hypothesis search already visits a stream of improving
candidates on its way to the final answer.  This package pools those
intermediate hypotheses, weights them by training coverage and description
length, and predicts by weighted vote, alongside a plain single-answer
baseline and a bootstrap-aggregation baseline, with a benchmark harness,
an HTTP service, and a CLI on top.
"""

from .logic import (
    Atom,
    Bias,
    Clause,
    Const,
    DataError,
    EMPTY_HYPOTHESIS,
    ExampleSet,
    Hypothesis,
    Program,
    ResourceLimitError,
    SnapilpError,
    Var,
    canonical_clause,
    canonical_form,
)
from .parser import (
    LoadedTask,
    ParseError,
    load_task_dir,
    parse_bias,
    parse_examples,
    parse_hypothesis,
    parse_program,
)
from .evaluator import Confusion, Model, confusion, entails, least_model
from .costs import (
    CostFunction,
    CostKey,
    cost_key,
    coverage,
    mdl_score,
    parse_cost_function,
)
from .learner import CandidateStream, SearchOutcome, TaskEvaluator, search
from .ensemble import (
    PoolFilter,
    Snapshot,
    SnapshotPool,
    WeightedEnsemble,
    assign_weights,
    baseline_snapshot,
    collect_pool,
    coverage_cost_ratio,
    ensemble_score,
    filter_pool,
    parse_pool,
    pool_admission,
    predict,
    predict_batch,
    serialize_pool,
)
from .bagging import (
    BagConfig,
    BaggedEnsemble,
    ExampleBag,
    bootstrap_sample,
    predict_bagged,
    predict_bagged_batch,
    run_bagging,
)
from .harness import (
    ALPHA_GRID,
    DEFAULT_ALPHA,
    DEFAULT_BETA,
    RunConfig,
    Split,
    TaskResult,
    accuracy,
    bench,
    run_task,
    split_examples,
    sweep_alpha,
)
from .report import RESULT_COLUMNS, emit_report
from .stats import StatsSummary, mean_ci95, spearman_rho, summarize_diffs
from .tasks import (
    BUNDLED_NAMES,
    bundled_suite,
    bundled_task,
    export_task,
    noisy_suite,
    resolve_task,
)

__version__ = "0.1.0"
