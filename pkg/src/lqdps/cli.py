"""Command-line entry point: ``lqdps run|table|audit|props``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import load_config
from .errors import LqdpsError
from .problem import pareto_set_distance
from .props import format_report, run_all
from .solver import IterationTrace, RunAborted, audit_trace, run_lqdps
from .table import EXAMPLES, run_table

EXIT_OK, EXIT_INPUT, EXIT_AUDIT = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for audit failures here
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def _fmt(v) -> str:
    return "(" + ", ".join(f"{float(t):.10g}" for t in v) + ")"


def cmd_run(args) -> int:
    spec = load_config(args.config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    trace_path = out / f"{Path(args.config).stem}.trace.csv"
    try:
        res = run_lqdps(spec.problem, spec.model, spec.qspec, spec.config, spec.x0, spec.z0)
    except RunAborted as exc:
        exc.trace.to_csv(trace_path)
        print(f"run aborted: {exc}", file=sys.stderr)
        return EXIT_INPUT
    res.trace.to_csv(trace_path)
    print(f"problem      {spec.problem.name}")
    print(f"scalarizer   {spec.model.kind.value}")
    print(f"stop         {res.stop.value} after {res.iterations} iterations")
    print(f"x            {_fmt(res.x)}")
    print(f"z            {_fmt(res.z)}")
    print(f"F(x)         {_fmt(res.trace.records[-1].F)}")
    if spec.problem.pareto_set is not None:
        print(f"ps_distance  {pareto_set_distance(spec.problem, res.x):.6e}")
    for key, value in res.audit.as_dict().items():
        print(f"audit.{key} = {value:.6g}")
    print(f"trace        {trace_path}")
    return EXIT_OK if res.audit.ok() else EXIT_AUDIT


def cmd_table(args) -> int:
    report = run_table(args.example, seed=args.seed, jobs=args.jobs)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"example{args.example}"
    report.to_csv(out / f"{stem}.csv")
    md = report.to_markdown(out / f"{stem}.md")
    print(md, end="")
    failed = 0
    for rec in report.records:
        if rec.error:
            print(f"row {rec.row.number} {rec.scalarization.value}: error: {rec.error}", file=sys.stderr)
        elif not (rec.audit.ok() and rec.in_box):
            failed += 1
            print(f"row {rec.row.number} {rec.scalarization.value}: audit failed", file=sys.stderr)
    return EXIT_AUDIT if failed else EXIT_OK


def cmd_audit(args) -> int:
    path = Path(args.trace)
    if not path.is_file():
        print(f"trace file not found: {path}", file=sys.stderr)
        return EXIT_INPUT
    trace = IterationTrace.from_csv(path)
    summary = audit_trace(trace)
    for key, value in summary.as_dict().items():
        print(f"{key} = {value:.6g}")
    print(f"partial_sums_ok = {summary.partial_sums_ok}")
    ok = summary.ok()
    print("audit " + ("passed" if ok else "FAILED"))
    return EXIT_OK if ok else EXIT_AUDIT


def cmd_props(args) -> int:
    results = run_all(args.seed)
    print(format_report(results, args.seed), end="")
    return EXIT_OK if all(r.ok for r in results) else EXIT_AUDIT


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lqdps", description="Logarithmic quasi-distance proximal scalarization runs.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="single run from a key=value config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=".", help="directory for <config-stem>.trace.csv")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("table", help="15-row experiment grid for one benchmark")
    p.add_argument("--example", type=int, choices=sorted(EXAMPLES), required=True)
    p.add_argument("--out", default=".")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("audit", help="re-run the audits on a trace CSV")
    p.add_argument("--trace", required=True)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("props", help="run the seeded property suites")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_props)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except (LqdpsError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
