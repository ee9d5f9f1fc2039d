"""Scalarization functions ``f(x, z)`` and the logarithmic regularizer.

Both models act on precomputed objective values ``F(x)`` instead of ``x``:

* ``SUM_SHIFTED``: ``sum_i z_i + h(F_i)`` with ``h(t) = 1/(2 - t)`` for
  ``t <= 1`` and ``t**2`` above. Its z-gradient is the all-ones vector.
* ``EXPONENTIAL``: ``sum_i exp(z_i + F_i)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, SaturationError

__all__ = [
    "Kind",
    "ScalarizationModel",
    "LogRegularizerRef",
    "ScalarRepAudit",
    "h_scalar",
    "f_eval",
    "f_partial_z",
    "H_eval",
    "scalar_rep_audit",
]

# smallest z component still treated as positive
Z_POSITIVE = 1e-300
EXP_LIMIT = 700.0


class Kind(str, enum.Enum):
    SUM_SHIFTED = "sum_shifted"
    EXPONENTIAL = "exponential"


def h_scalar(t: float) -> float:
    """Positive, convex, strictly increasing; continuous at ``t = 1``."""
    return 1.0 / (2.0 - t) if t <= 1.0 else t * t


@dataclass(frozen=True)
class ScalarizationModel:
    kind: Kind
    m: int

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.m < 1:
            raise InputError("need at least one objective")

    def _check(self, F_values, z, strict: bool = False):
        F = np.atleast_1d(np.asarray(F_values, dtype=float))
        z = np.atleast_1d(np.asarray(z, dtype=float))
        if F.shape != (self.m,) or z.shape != (self.m,):
            raise InputError(f"expected length {self.m}, got F {F.shape}, z {z.shape}")
        if strict and np.any(z <= Z_POSITIVE):
            raise InputError("z must be strictly positive")
        if not strict and np.any(z < 0.0):
            raise InputError("z must be nonnegative")
        return F, z

    def value(self, F_values, z) -> float:
        F, z = self._check(F_values, z)
        return self.fast_value(F.tolist(), z.tolist())

    def grad_z(self, F_values, z) -> np.ndarray:
        F, z = self._check(F_values, z)
        if self.kind is Kind.SUM_SHIFTED:
            return np.ones(self.m)
        return np.array(self.fast_h(F.tolist(), z.tolist()))

    def fast_value(self, F, z) -> float:
        """Unchecked aggregate on plain float sequences."""
        if self.kind is Kind.SUM_SHIFTED:
            return sum(zi + (1.0 / (2.0 - t) if t <= 1.0 else t * t) for zi, t in zip(z, F))
        total = 0.0
        for zi, t in zip(z, F):
            s = zi + t
            if s > EXP_LIMIT:
                raise SaturationError(f"exp({s:.3g}) would overflow")
            total += math.exp(s)
        return total

    def fast_h(self, F, z) -> list[float]:
        """z-gradient ``h(x, z)`` on plain sequences."""
        if self.kind is Kind.SUM_SHIFTED:
            return [1.0] * len(z)
        out = []
        for zi, t in zip(z, F):
            if zi + t > EXP_LIMIT:
                raise SaturationError(f"exp({zi + t:.3g}) would overflow")
            out.append(math.exp(zi + t))
        return out


def f_eval(model: ScalarizationModel, F_values, z) -> float:
    return model.value(F_values, z)


def f_partial_z(model: ScalarizationModel, F_values, z) -> np.ndarray:
    return model.grad_z(F_values, z)


@dataclass(frozen=True)
class LogRegularizerRef:
    """Reference point ``z_ref`` of ``H(z) = sum(z/z_ref - log(z/z_ref) - 1)``."""

    z_ref: np.ndarray

    def __post_init__(self):
        z = np.atleast_1d(np.asarray(self.z_ref, dtype=float))
        if np.any(~np.isfinite(z)) or np.any(z <= Z_POSITIVE):
            raise InputError("z_ref must be finite and strictly positive")
        object.__setattr__(self, "z_ref", z)


def H_eval(z, ref: LogRegularizerRef | np.ndarray) -> float:
    """Logarithmic regularizer; zero exactly at ``z == z_ref``."""
    if not isinstance(ref, LogRegularizerRef):
        ref = LogRegularizerRef(ref)
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if z.shape != ref.z_ref.shape:
        raise InputError(f"z has shape {z.shape}, reference {ref.z_ref.shape}")
    if np.any(z <= Z_POSITIVE):
        raise InputError("H is only defined for strictly positive z")
    return _H(z.tolist(), ref.z_ref.tolist())


def _H(z, z_ref) -> float:
    total = 0.0
    for zi, ri in zip(z, z_ref):
        t = zi / ri
        total += t - math.log(t) - 1.0
    return total


@dataclass(frozen=True)
class ScalarRepAudit:
    trials: int
    comparable_pairs: int
    violations: int

    @property
    def ok(self) -> bool:
        return self.violations == 0


def scalar_rep_audit(model: ScalarizationModel, trials: int, seed: int) -> ScalarRepAudit:
    """Monotonicity check of ``f`` in the objective values.

    Each trial draws ``v`` and a nonnegative shift ``d`` (zero in a random
    subset of components), then compares ``v`` against ``v + d``. Pairs where
    every component moved must compare strictly.
    """
    if trials < 1:
        raise InputError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    lo, hi = (-3.0, 3.0)
    bad = 0
    comparable = 0
    for _ in range(trials):
        v = rng.uniform(lo, hi, model.m)
        d = rng.uniform(0.0, 1.0, model.m) * (rng.random(model.m) < 0.7)
        z = rng.uniform(0.0, 3.0, model.m)
        w = v + d
        fv, fw = model.value(v, z), model.value(w, z)
        comparable += 1
        if fv > fw:
            bad += 1
        elif np.all(d > 0) and not fv < fw:
            bad += 1
    return ScalarRepAudit(trials, comparable, bad)
