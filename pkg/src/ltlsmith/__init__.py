"""Toolkit for synthesizing temporal-reasoning benchmarks from random event
graphs and random LTL formulas, labeling them with a built-in model checker,
rendering them to natural language, and scoring chat-model endpoints."""

from .checking import (
    CheckResult,
    KripkeStructure,
    Lasso,
    check,
    check_bruteforce,
    completeness_bound,
    totalize,
)
from .dataset import (
    BENCHMARK_COUNT,
    BENCHMARK_EVENTS,
    BENCHMARK_OPERATORS,
    DatasetSpec,
    Problem,
    build_dataset,
    build_problem,
    derive_seed,
    read_dataset,
    write_dataset,
)
from .errors import (
    BalanceUnreachableError,
    DomainError,
    EnvironmentFailure,
    FormulaSyntaxError,
    InvalidConfigError,
    NuSmvNotFoundError,
    NuSmvRunError,
    SchemaError,
    StateLimitError,
    TransportError,
    UnknownAtomError,
    UnknownEventError,
)
from .evaluation import (
    EVENT_SWEEP_VALUES,
    OPERATOR_SWEEP_VALUES,
    SWEEP_CELL_COUNT,
    EndpointConfig,
    EvalRecord,
    MetricsReport,
    SweepCell,
    compute_metrics,
    evaluate_dataset,
    parse_answer,
    query_model,
    read_records,
    run_sweep,
    sweep_dataset_spec,
    sweep_to_csv,
    write_records,
)
from .formulas import (
    BINARY_OPERATORS,
    OPERATORS,
    UNARY_OPERATORS,
    Atom,
    Binary,
    Formula,
    FormulaGenConfig,
    Unary,
    atoms,
    eval_on_lasso,
    event_name,
    generate_formulas,
    operator_count,
    parse_formula,
    print_formula,
)
from .graphs import EventGraph, generate_graph, successors
from .render import RenderedProblem, render_context, render_hypothesis, render_problem
from .smv import SmvDocument, emit_smv, run_nusmv

__version__ = "0.1.0"
