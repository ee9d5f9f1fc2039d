"""Proximal point scalarization for multi-objective problems with a logarithmic z-regularizer."""

from .errors import (
    EvaluationError,
    InputError,
    InternalError,
    LqdpsError,
    SaturationError,
    UnsupportedError,
    ValidationError,
)
from .quasi_metric import NormEquivalenceBounds, QuasiDistanceSpec, SubgradientBox, qd_axiom_audit, qd_eval, qd_sq_eval
from .scalarization import H_eval, Kind, LogRegularizerRef, ScalarizationModel, f_eval, f_partial_z
from .problem import (
    MultiObjectiveProblem,
    ParetoSetModel,
    SublevelRef,
    evaluate_objectives,
    pareto_set_distance,
    weak_pareto_local_check,
)
from .benchmarks import PROBLEMS, benchmark_eval, default_qspec, default_start, get_problem, ps_distance
from .subproblem import InnerSolverConfig, Mode, SubproblemInstance, phi_eval, solve_subproblem, solve_z_step
from .solver import (
    IterationTrace,
    LqdpsConfig,
    RunResult,
    Schedule,
    ScheduleKind,
    StopReason,
    audit_trace,
    fixed_point_weak_pareto,
    run_lqdps,
)
from .table import ExperimentRow, TableReport, run_table

__version__ = "0.1.0"
