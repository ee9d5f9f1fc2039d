"""Outer proximal-point loop, stop rules, iteration traces and trace audits."""

from __future__ import annotations

import csv
import enum
import io
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import InputError, LqdpsError, ValidationError
from .problem import (
    MultiObjectiveProblem,
    ParetoVerdict,
    SublevelRef,
    evaluate_objectives,
    weak_pareto_local_check,
)
from .quasi_metric import QuasiDistanceSpec
from .scalarization import ScalarizationModel, Z_POSITIVE
from .subproblem import InnerSolverConfig, Mode, SubproblemInstance, argmin_displacement, solve_subproblem

__all__ = [
    "ScheduleKind",
    "Schedule",
    "StopReason",
    "LqdpsConfig",
    "TraceRecord",
    "IterationTrace",
    "AuditSummary",
    "RunResult",
    "RunAborted",
    "schedule_eval",
    "run_lqdps",
    "audit_trace",
    "fixed_point_weak_pareto",
]

log = logging.getLogger(__name__)

MONOTONE_SLACK = 1e-9
FEAS_TOL = 1e-6
DEFAULT_MU_BOUNDS = (0.5, 10.0)


class ScheduleKind(str, enum.Enum):
    ONE_PLUS_INV_K = "1+1/k"
    K_LINEAR = "k"
    TWO_MINUS_INV_K = "2-1/k"
    INV_K = "1/k"
    CONSTANT = "const"


@dataclass(frozen=True)
class Schedule:
    kind: ScheduleKind
    value: float = 1.0  # only used by CONSTANT

    def __post_init__(self):
        object.__setattr__(self, "kind", ScheduleKind(self.kind))
        if self.kind is ScheduleKind.CONSTANT and not (self.value > 0 and math.isfinite(self.value)):
            raise InputError("constant schedule needs a finite positive value")

    @classmethod
    def constant(cls, value: float) -> "Schedule":
        return cls(ScheduleKind.CONSTANT, float(value))

    @classmethod
    def parse(cls, text: str) -> "Schedule":
        """Accepts ``1+1/k``, ``k``, ``2-1/k``, ``1/k``, ``const:<v>`` or a bare number."""
        t = text.replace(" ", "").lower()
        if t.startswith("const:"):
            t = t[len("const:"):]
        else:
            for kind in ScheduleKind:
                if kind is not ScheduleKind.CONSTANT and t == kind.value:
                    return cls(kind)
        try:
            return cls.constant(float(t))
        except ValueError:
            raise InputError(f"unknown schedule {text!r}") from None

    def __call__(self, k: int) -> float:
        return schedule_eval(self, k)

    @property
    def label(self) -> str:
        if self.kind is ScheduleKind.CONSTANT:
            return f"{self.value:g}"
        return self.kind.value


def schedule_eval(s: Schedule, k: int) -> float:
    if k < 1:
        raise InputError(f"schedules are indexed from k=1, got {k}")
    kind = s.kind
    if kind is ScheduleKind.ONE_PLUS_INV_K:
        return 1.0 + 1.0 / k
    if kind is ScheduleKind.K_LINEAR:
        return float(k)
    if kind is ScheduleKind.TWO_MINUS_INV_K:
        return 2.0 - 1.0 / k
    if kind is ScheduleKind.INV_K:
        return 1.0 / k
    return s.value


class StopReason(str, enum.Enum):
    TOL_REACHED = "TOL_REACHED"
    FIXED_POINT = "FIXED_POINT"
    MAX_ITER = "MAX_ITER"


@dataclass(frozen=True)
class LqdpsConfig:
    """Outer-loop settings.

    ``mu_bounds`` is the ``(l, L)`` interval that every squared-mode ``mu``
    value must lie strictly inside; pass ``None`` to skip the check. In plain
    mode ``mu`` must vanish: either ``1/k`` or ``mu_vanishing=True``.
    """

    mu: Schedule = Schedule.constant(1.0)
    beta: Schedule = Schedule.constant(1.0)
    mode: Mode = Mode.Q_SQUARED
    tol: float = 1e-2
    max_iter: int = 100
    inner: InnerSolverConfig = field(default_factory=InnerSolverConfig)
    mu_bounds: Optional[tuple[float, float]] = DEFAULT_MU_BOUNDS
    mu_vanishing: bool = False

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        self.validate()

    def validate(self) -> None:
        if not self.tol > 0:
            raise ValidationError("tol must be positive")
        if self.max_iter < 1:
            raise ValidationError("max_iter must be >= 1")
        if self.mode is Mode.Q_PLAIN:
            if self.mu.kind is not ScheduleKind.INV_K and not self.mu_vanishing:
                raise ValidationError(
                    f"plain quasi-distance mode needs a vanishing mu schedule, got {self.mu.label!r}"
                )
        elif self.mu_bounds is not None:
            l, L = self.mu_bounds
            if not 0 < l < L:
                raise ValidationError("mu_bounds must satisfy 0 < l < L")
            for k in range(1, self.max_iter + 1):
                v = self.mu(k)
                if not l < v < L:
                    raise ValidationError(f"mu({k}) = {v:g} outside ({l:g}, {L:g})")


@dataclass
class TraceRecord:
    """State at iteration ``k`` plus the transition to ``k + 1``.

    Transition fields are NaN on the last record.
    """

    k: int
    x: np.ndarray
    z: np.ndarray
    F: np.ndarray
    f: float
    mu: float = math.nan
    beta: float = math.nan
    q2: float = math.nan  # q(x^{k+1}, x^k)**2
    step: float = math.nan  # ||x^k - x^{k+1}||_inf
    z_residual: float = math.nan
    sublevel_violation: float = math.nan
    descent_margin: float = math.nan


_SCALAR_COLS = ("f", "mu", "beta", "q2", "step", "z_residual", "sublevel_violation", "descent_margin")


@dataclass
class IterationTrace:
    records: list[TraceRecord] = field(default_factory=list)
    stop: Optional[StopReason] = None

    def __len__(self) -> int:
        return len(self.records)

    def __getitem__(self, i) -> TraceRecord:
        return self.records[i]

    @property
    def xs(self) -> np.ndarray:
        return np.array([r.x for r in self.records])

    @property
    def zs(self) -> np.ndarray:
        return np.array([r.z for r in self.records])

    @property
    def fs(self) -> np.ndarray:
        return np.array([r.f for r in self.records])

    def transitions(self) -> list[TraceRecord]:
        return self.records[:-1]

    def to_csv(self, path=None) -> str:
        """Serialize with round-trip float formatting. Returns the CSV text."""
        if not self.records:
            raise InputError("empty trace")
        r0 = self.records[0]
        n, m = r0.x.size, r0.z.size
        header = (
            ["k"] + [f"x{i+1}" for i in range(n)] + [f"z{i+1}" for i in range(m)]
            + [f"F{i+1}" for i in range(m)] + list(_SCALAR_COLS) + ["stop"]
        )
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        last = len(self.records) - 1
        for i, r in enumerate(self.records):
            vals = [*r.x.tolist(), *r.z.tolist(), *r.F.tolist()] + [getattr(r, c) for c in _SCALAR_COLS]
            stop = self.stop.value if (i == last and self.stop is not None) else ""
            w.writerow([r.k] + [repr(float(v)) for v in vals] + [stop])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, source) -> "IterationTrace":
        """Read a trace written by :meth:`to_csv` (path or file-like)."""
        if hasattr(source, "read"):
            text = source.read()
        else:
            try:
                text = Path(source).read_text()
            except FileNotFoundError:
                raise InputError(f"trace file not found: {source}") from None
        rows = list(csv.reader(io.StringIO(text)))
        if len(rows) < 2:
            raise InputError("trace CSV has no data rows")
        header = rows[0]
        try:
            xi = [i for i, h in enumerate(header) if h.startswith("x")]
            zi = [i for i, h in enumerate(header) if h.startswith("z") and h[1:].isdigit()]
            Fi = [i for i, h in enumerate(header) if h.startswith("F")]
            si = {c: header.index(c) for c in _SCALAR_COLS}
            stop_i = header.index("stop")
            trace = cls()
            for row in rows[1:]:
                trace.records.append(
                    TraceRecord(
                        k=int(row[0]),
                        x=np.array([float(row[i]) for i in xi]),
                        z=np.array([float(row[i]) for i in zi]),
                        F=np.array([float(row[i]) for i in Fi]),
                        **{c: float(row[i]) for c, i in si.items()},
                    )
                )
                if row[stop_i]:
                    trace.stop = StopReason(row[stop_i])
        except (ValueError, IndexError) as exc:
            raise InputError(f"malformed trace CSV: {exc}") from exc
        return trace


@dataclass(frozen=True)
class AuditSummary:
    iterations: int
    monotonicity_violations: int
    q2_partial_sums: np.ndarray
    q2_last: float
    max_sublevel_violation: float
    max_nesting_excess: float  # max_i,k F_i(x^k) - F_i(x^0)
    max_z_residual: float
    min_descent_margin: float
    first_steps_max: float  # largest step among the first five transitions
    last_step: float

    @property
    def q2_sum(self) -> float:
        return float(self.q2_partial_sums[-1]) if self.q2_partial_sums.size else 0.0

    @property
    def partial_sums_ok(self) -> bool:
        s = self.q2_partial_sums
        return bool(np.all(np.isfinite(s)) and np.all(np.diff(s) >= 0))

    def ok(self, feas_tol: float = FEAS_TOL) -> bool:
        return (
            self.monotonicity_violations == 0
            and self.max_sublevel_violation <= feas_tol
            and self.partial_sums_ok
            and not self.min_descent_margin < -MONOTONE_SLACK
        )

    def as_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "monotonicity_violations": self.monotonicity_violations,
            "q2_sum": self.q2_sum,
            "q2_last": self.q2_last,
            "max_sublevel_violation": self.max_sublevel_violation,
            "max_nesting_excess": self.max_nesting_excess,
            "max_z_residual": self.max_z_residual,
            "min_descent_margin": self.min_descent_margin,
            "first_steps_max": self.first_steps_max,
            "last_step": self.last_step,
        }


def audit_trace(trace: IterationTrace) -> AuditSummary:
    """Check the descent, summability and feasibility facts a run must satisfy.

    Uses the trace alone; sublevel violations are recomputed from the
    recorded objective values.
    """
    if not trace.records:
        raise InputError("cannot audit an empty trace")
    fs = trace.fs
    Fs = np.array([r.F for r in trace.records])
    steps = trace.transitions()
    mono = int(np.count_nonzero(np.diff(fs) > MONOTONE_SLACK))
    q2 = np.array([r.q2 for r in steps])
    viol = np.maximum(0.0, np.max(Fs[1:] - Fs[:-1], axis=1)) if len(Fs) > 1 else np.zeros(0)
    recorded_viol = np.array([r.sublevel_violation for r in steps])

    def _max(a, default=0.0):
        a = a[np.isfinite(a)] if a.size else a
        return float(np.max(a)) if a.size else default

    step_vals = np.array([r.step for r in steps])
    return AuditSummary(
        iterations=len(steps),
        monotonicity_violations=mono,
        q2_partial_sums=np.cumsum(q2),
        q2_last=float(q2[-1]) if q2.size else 0.0,
        max_sublevel_violation=max(_max(viol), _max(recorded_viol)),
        max_nesting_excess=float(np.max(Fs - Fs[0])),
        max_z_residual=_max(np.array([r.z_residual for r in steps])),
        min_descent_margin=float(np.min([r.descent_margin for r in steps])) if steps else 0.0,
        first_steps_max=_max(step_vals[:5]),
        last_step=float(step_vals[-1]) if step_vals.size else 0.0,
    )


@dataclass
class RunResult:
    x: np.ndarray
    z: np.ndarray
    iterations: int
    stop: StopReason
    trace: IterationTrace
    audit: AuditSummary


class RunAborted(LqdpsError):
    """A subproblem failed; ``trace`` holds the iterations completed so far."""

    def __init__(self, message: str, trace: IterationTrace):
        super().__init__(message)
        self.trace = trace


def run_lqdps(
    problem: MultiObjectiveProblem,
    model: ScalarizationModel,
    qspec: QuasiDistanceSpec,
    config: LqdpsConfig,
    x0,
    z0,
    callback: Optional[Callable[[TraceRecord], None]] = None,
) -> RunResult:
    """Run the proximal scalarization method from ``(x0, z0)``.

    Outer iteration ``k`` (from 0) uses ``mu(k + 1)`` and ``beta(k + 1)`` and
    the sublevel set anchored at ``x^k``. Stops on an exact fixed point, on
    ``||x^k - x^{k+1}||_inf <= tol``, or after ``max_iter`` iterations.

    In plain mode a short step alone is not enough: the linear proximal term
    can pin ``x`` while ``mu`` is still large. The step rule additionally
    requires that dropping the proximal term moves ``x^{k+1}`` by at most
    ``tol``, i.e. ``x^{k+1}`` minimizes ``f(., z^{k+1})`` over the sublevel set.
    """
    config.validate()
    x = np.array(x0, dtype=float)
    z = np.array(z0, dtype=float)
    if x.shape != (problem.n,) or not problem.in_box(x):
        raise InputError("x0 must be a point of the box")
    if z.shape != (problem.m,) or np.any(z <= Z_POSITIVE):
        raise InputError("z0 must be strictly positive with length m")
    if model.m != problem.m or qspec.n != problem.n:
        raise InputError("model/quasi-distance dimensions do not match the problem")

    F = evaluate_objectives(problem, x)
    trace = IterationTrace()
    rec = TraceRecord(0, x, z, F, model.value(F, z))
    trace.records.append(rec)
    stop = StopReason.MAX_ITER
    for k in range(config.max_iter):
        mu, beta = config.mu(k + 1), config.beta(k + 1)
        inst = SubproblemInstance(problem, model, qspec, x, z, mu, beta, config.mode, SublevelRef(x, F))
        try:
            x_next, z_next, cert = solve_subproblem(inst, config.inner)
            F_next = evaluate_objectives(problem, x_next)
        except LqdpsError as exc:
            trace.stop = None
            raise RunAborted(f"iteration {k}: {exc}", trace) from exc
        q = qspec.fast(x_next.tolist(), x.tolist())
        rec.mu, rec.beta = mu, beta
        rec.q2 = q * q
        rec.step = float(np.max(np.abs(x - x_next)))
        rec.z_residual = cert.z_residual
        rec.sublevel_violation = cert.sublevel_violation
        rec.descent_margin = cert.descent_margin
        if callback is not None:
            callback(rec)
        fixed = np.array_equal(x_next, x) and np.array_equal(z_next, z)
        step = rec.step
        x, z, F = x_next, z_next, F_next
        rec = TraceRecord(k + 1, x, z, F, model.value(F, z))
        trace.records.append(rec)
        log.debug("k=%d step=%.3e f=%.12g", k + 1, step, rec.f)
        if fixed:
            stop = StopReason.FIXED_POINT
            break
        if step <= config.tol and (
            config.mode is Mode.Q_SQUARED or argmin_displacement(inst, x, z, config.inner) <= config.tol
        ):
            stop = StopReason.TOL_REACHED
            break
    trace.stop = stop
    return RunResult(x, z, len(trace) - 1, stop, trace, audit_trace(trace))


def fixed_point_weak_pareto(
    trace: IterationTrace | RunResult, problem: MultiObjectiveProblem, seed: int = 0
) -> ParetoVerdict:
    """Local weak-Pareto check at the point where a run stalled exactly."""
    if isinstance(trace, RunResult):
        trace = trace.trace
    if trace.stop is not StopReason.FIXED_POINT or not trace.records:
        raise InputError("trace did not end at a fixed point")
    return weak_pareto_local_check(problem, trace.records[-1].x, radius=1e-2, samples=5000, seed=seed)
