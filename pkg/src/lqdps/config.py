"""Plain-text ``key = value`` run configuration.

Example::

    problem = fa
    scalarization = sum_shifted
    mode = q2
    mu = 1+1/k
    beta = const:1
    tol = 1e-3
    x0 = 0.5,0.5,0.5
    inner.sweeps = 8
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .benchmarks import default_start, get_problem
from .errors import InputError, LqdpsError, ValidationError
from .problem import MultiObjectiveProblem
from .quasi_metric import QuasiDistanceSpec, parse_coefficients
from .scalarization import ScalarizationModel
from .solver import LqdpsConfig, Schedule
from .subproblem import InnerSolverConfig

__all__ = ["RunSpec", "parse_config", "load_config"]

_INNER_KEYS = {
    "penalty_weight": float,
    "sweeps": int,
    "step0": float,
    "shrink": float,
    "min_step": float,
    "max_violation": float,
    "max_evals": int,
}
_TOP_KEYS = {
    "problem", "scalarization", "mode", "mu", "beta", "tol", "max_iter", "x0", "z0",
    "c_plus", "c_minus", "seed", "mu_bounds", "mu_vanishing",
}


@dataclass(frozen=True)
class RunSpec:
    problem: MultiObjectiveProblem
    model: ScalarizationModel
    qspec: QuasiDistanceSpec
    config: LqdpsConfig
    x0: np.ndarray
    z0: np.ndarray
    seed: int = 0


def _vector(text: str) -> np.ndarray:
    try:
        return np.array([float(t) for t in text.split(",") if t.strip()])
    except ValueError:
        raise InputError(f"bad vector {text!r}") from None


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise InputError(f"bad boolean {text!r}")


def parse_config(text: str) -> RunSpec:
    try:
        return _parse(text)
    except LqdpsError:
        raise
    except (ValueError, TypeError) as exc:
        raise InputError(f"bad config value: {exc}") from None


def _parse(text: str) -> RunSpec:
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _TOP_KEYS and not (key.startswith("inner.") and key[6:] in _INNER_KEYS):
            raise InputError(f"line {lineno}: unknown key {key!r}")
        raw[key] = value

    problem = get_problem(raw.get("problem", "fa"))
    model = ScalarizationModel(raw.get("scalarization", "sum_shifted").lower(), problem.m)
    default_x0, default_z0 = default_start(problem.name) if problem.name in ("fa", "fb", "fc") else (None, None)
    c_plus = parse_coefficients(raw["c_plus"]) if "c_plus" in raw else (3.0,)
    c_minus = parse_coefficients(raw["c_minus"]) if "c_minus" in raw else (2.0,)
    if len(c_plus) == 1:
        c_plus = c_plus * problem.n
    if len(c_minus) == 1:
        c_minus = c_minus * problem.n
    qspec = QuasiDistanceSpec(c_plus, c_minus)

    inner_kw = {k[6:]: _INNER_KEYS[k[6:]](v) for k, v in raw.items() if k.startswith("inner.")}
    try:
        inner = InnerSolverConfig(**inner_kw)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc

    kw = {}
    if "mu_bounds" in raw:
        if raw["mu_bounds"].lower() == "none":
            kw["mu_bounds"] = None
        else:
            b = _vector(raw["mu_bounds"])
            if b.size != 2:
                raise InputError("mu_bounds needs two values: l,L")
            kw["mu_bounds"] = (float(b[0]), float(b[1]))
    if "mu_vanishing" in raw:
        kw["mu_vanishing"] = _bool(raw["mu_vanishing"])
    mode = raw.get("mode", "q2").lower()
    if mode not in ("q2", "q"):
        raise InputError(f"mode must be q2 or q, got {mode!r}")
    config = LqdpsConfig(
        mu=Schedule.parse(raw.get("mu", "1")),
        beta=Schedule.parse(raw.get("beta", "1")),
        mode=mode,
        tol=float(raw.get("tol", "1e-2")),
        max_iter=int(raw.get("max_iter", "100")),
        inner=inner,
        **kw,
    )
    x0 = _vector(raw["x0"]) if "x0" in raw else default_x0
    z0 = _vector(raw["z0"]) if "z0" in raw else default_z0
    return RunSpec(problem, model, qspec, config, x0, z0, int(raw.get("seed", "0")))


def load_config(path) -> RunSpec:
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise InputError(f"config file not found: {path}") from None
    return parse_config(text)
