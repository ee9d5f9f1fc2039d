"""The 15-row experiment grid and its CSV / markdown reports."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .benchmarks import default_qspec, default_start, get_problem
from .errors import InputError, LqdpsError
from .problem import pareto_set_distance
from .scalarization import Kind, ScalarizationModel
from .solver import AuditSummary, LqdpsConfig, Schedule, run_lqdps
from .subproblem import InnerSolverConfig

__all__ = ["EXAMPLES", "ExperimentRow", "ExperimentRecord", "TableReport", "experiment_rows", "run_row", "run_table"]

EXAMPLES = {1: "fa", 2: "fb", 3: "fc"}
SCALARIZATIONS = (Kind.SUM_SHIFTED, Kind.EXPONENTIAL)
CSV_COLUMNS = ("row", "tol", "mu", "beta", "scalarization", "iters", "ps_dist", "stop", "descent_violations")


@dataclass(frozen=True)
class ExperimentRow:
    number: int
    tol: float
    mu: str
    beta: str


def experiment_rows() -> list[ExperimentRow]:
    pairs = [("1+1/k", "1+1/k"), ("1+1/k", "k"), ("2-1/k", "1/k"), ("2-1/k", "k"), ("1", "1")]
    rows = []
    for mu, beta in pairs:
        for tol in (1e-2, 1e-3, 1e-4):
            rows.append(ExperimentRow(len(rows) + 1, tol, mu, beta))
    return rows


@dataclass
class ExperimentRecord:
    row: ExperimentRow
    scalarization: Kind
    iterations: int = 0
    ps_dist: float = math.nan
    ps_dist_start: float = math.nan
    stop: str = ""
    audit: Optional[AuditSummary] = None
    in_box: bool = True
    x: Optional[np.ndarray] = None
    error: str = ""

    @property
    def descent_violations(self) -> int:
        return self.audit.monotonicity_violations if self.audit is not None else -1

    def csv_row(self) -> list:
        return [
            self.row.number, f"{self.row.tol:g}", self.row.mu, self.row.beta, self.scalarization.value,
            self.iterations, repr(float(self.ps_dist)), self.stop or f"ERROR: {self.error}", self.descent_violations,
        ]


@dataclass
class TableReport:
    example_id: int
    problem_id: str
    seed: int
    records: list[ExperimentRecord] = field(default_factory=list)

    def record(self, row_number: int, kind) -> ExperimentRecord:
        kind = Kind(kind)
        for r in self.records:
            if r.row.number == row_number and r.scalarization is kind:
                return r
        raise KeyError((row_number, kind))

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.records:
            w.writerow(r.csv_row())
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    def to_markdown(self, path=None) -> str:
        """One line per row, both scalarizations side by side."""
        lines = [
            f"Example {self.example_id} ({self.problem_id})",
            "",
            "| No. | tol | mu_k | beta_k | k_1* | dist_1 | k_2* | dist_2 |",
            "|---|---|---|---|---|---|---|---|",
        ]
        numbers = sorted({r.row.number for r in self.records})
        for n in numbers:
            cells = []
            row = None
            for kind in SCALARIZATIONS:
                try:
                    rec = self.record(n, kind)
                except KeyError:
                    cells += ["", ""]
                    continue
                row = rec.row
                cells += [str(rec.iterations), f"{rec.ps_dist:.6e}" if not rec.error else "error"]
            lines.append(f"| {n} | {row.tol:g} | {row.mu} | {row.beta} | " + " | ".join(cells) + " |")
        text = "\n".join(lines) + "\n"
        if path is not None:
            Path(path).write_text(text)
        return text


def run_row(problem_id: str, row: ExperimentRow, kind, max_iter: int = 100,
            inner: InnerSolverConfig = InnerSolverConfig()) -> ExperimentRecord:
    """One (row, scalarization) run from the default start. Errors are recorded, not raised."""
    kind = Kind(kind)
    problem = get_problem(problem_id)
    rec = ExperimentRecord(row, kind)
    try:
        config = LqdpsConfig(
            mu=Schedule.parse(row.mu), beta=Schedule.parse(row.beta), tol=row.tol, max_iter=max_iter, inner=inner
        )
        x0, z0 = default_start(problem_id)
        rec.ps_dist_start = pareto_set_distance(problem, x0)
        res = run_lqdps(problem, ScalarizationModel(kind, problem.m), default_qspec(problem.n), config, x0, z0)
    except LqdpsError as exc:
        rec.error = str(exc)
        return rec
    rec.iterations = res.iterations
    rec.stop = res.stop.value
    rec.audit = res.audit
    rec.x = res.x
    rec.in_box = all(problem.in_box(r.x) for r in res.trace.records)
    rec.ps_dist = pareto_set_distance(problem, res.x)
    return rec


def _run_row_args(args):
    return run_row(*args)


def run_table(example_id: int, overrides: Optional[dict] = None, seed: int = 0, jobs: int = 1) -> TableReport:
    """Run every row of the grid with both scalarizations.

    ``overrides`` may set ``rows`` (row numbers), ``scalarizations``,
    ``max_iter`` and ``inner`` (an :class:`InnerSolverConfig`). The runs are
    deterministic; ``seed`` is recorded with the report.
    """
    if example_id not in EXAMPLES:
        raise InputError(f"example must be one of {sorted(EXAMPLES)}")
    overrides = dict(overrides or {})
    wanted = overrides.pop("rows", None)
    kinds = [Kind(k) for k in overrides.pop("scalarizations", SCALARIZATIONS)]
    max_iter = overrides.pop("max_iter", 100)
    inner = overrides.pop("inner", InnerSolverConfig())
    if overrides:
        raise InputError(f"unknown overrides: {sorted(overrides)}")
    problem_id = EXAMPLES[example_id]
    rows = [r for r in experiment_rows() if wanted is None or r.number in wanted]
    tasks = [(problem_id, r, k, max_iter, inner) for r in rows for k in kinds]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_row_args, tasks))
    else:
        records = [_run_row_args(t) for t in tasks]
    return TableReport(example_id, problem_id, seed, records)
