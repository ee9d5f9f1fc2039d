"""Weighted asymmetric quasi-distances on R^n.

Each coordinate contributes ``max(c_plus[i] * (y[i] - x[i]), c_minus[i] * (x[i] - y[i]))``,
so moving "up" and moving "down" cost different amounts. The family is
sandwiched between two multiples of the Euclidean norm, which is what the
proximal scheme needs for coercivity and Lipschitz continuity.
"""

from __future__ import annotations

import abc
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError

__all__ = [
    "QuasiDistance",
    "QuasiDistanceSpec",
    "NormEquivalenceBounds",
    "SubgradientBox",
    "AxiomAudit",
    "qd_eval",
    "qd_sq_eval",
    "qd_norm_bounds",
    "qd_subgradient_first",
    "qd_axiom_audit",
    "parse_coefficients",
]

# slack for floating-point round-off in the triangle inequality
_AUDIT_SLACK = 1e-9


@dataclass(frozen=True)
class NormEquivalenceBounds:
    """Constants with ``alpha*||x-y||_2 <= q(x, y) <= beta*||x-y||_2``."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (0 < self.alpha <= self.beta):
            raise InputError(f"need 0 < alpha <= beta, got {self.alpha}, {self.beta}")


@dataclass(frozen=True)
class SubgradientBox:
    """Product of closed intervals ``[lo[i], hi[i]]``."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        if np.any(self.lo > self.hi):
            raise InputError("subgradient box has lo > hi")

    def corners(self) -> np.ndarray:
        """All 2**n vertices (deduplicated along degenerate coordinates)."""
        axes = [sorted({a, b}) for a, b in zip(self.lo.tolist(), self.hi.tolist())]
        grids = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)

    def contains(self, g, tol: float = 0.0) -> bool:
        g = np.asarray(g, dtype=float)
        return bool(np.all(g >= self.lo - tol) and np.all(g <= self.hi + tol))


class QuasiDistance(abc.ABC):
    """Interface every quasi-distance family implements."""

    n: int

    @abc.abstractmethod
    def __call__(self, x, y) -> float: ...

    def squared(self, x, y) -> float:
        return self(x, y) ** 2

    @abc.abstractmethod
    def norm_bounds(self) -> NormEquivalenceBounds: ...

    @abc.abstractmethod
    def subgradient_first(self, x, y_ref) -> SubgradientBox: ...


@dataclass(frozen=True)
class QuasiDistanceSpec(QuasiDistance):
    """Coordinate-wise weighted asymmetric quasi-distance.

    Args:
        c_plus: cost per unit when the second argument exceeds the first.
        c_minus: cost per unit when the first argument exceeds the second.
    """

    c_plus: tuple[float, ...]
    c_minus: tuple[float, ...]
    n: int = field(init=False)

    def __post_init__(self):
        cp = tuple(float(c) for c in np.atleast_1d(self.c_plus))
        cm = tuple(float(c) for c in np.atleast_1d(self.c_minus))
        if len(cp) != len(cm) or not cp:
            raise InputError(f"c_plus/c_minus lengths differ or are empty: {len(cp)} vs {len(cm)}")
        if not all(c > 0 and math.isfinite(c) for c in cp + cm):
            raise InputError("quasi-distance coefficients must be finite and positive")
        object.__setattr__(self, "c_plus", cp)
        object.__setattr__(self, "c_minus", cm)
        object.__setattr__(self, "n", len(cp))

    @classmethod
    def uniform(cls, n: int, c_plus: float, c_minus: float) -> "QuasiDistanceSpec":
        return cls((c_plus,) * n, (c_minus,) * n)

    def _check(self, *vecs):
        out = []
        for v in vecs:
            v = np.atleast_1d(np.asarray(v, dtype=float))
            if v.shape != (self.n,):
                raise InputError(f"expected vector of length {self.n}, got shape {v.shape}")
            out.append(v)
        return out

    def __call__(self, x, y) -> float:
        x, y = self._check(x, y)
        d = y - x
        return float(np.sum(np.maximum(np.array(self.c_plus) * d, -np.array(self.c_minus) * d)))

    def fast(self, x, y) -> float:
        """Unchecked evaluation on plain sequences (hot loop of the inner solver)."""
        total = 0.0
        for xi, yi, cp, cm in zip(x, y, self.c_plus, self.c_minus):
            d = yi - xi
            total += cp * d if d > 0 else -cm * d
        return total

    def norm_bounds(self) -> NormEquivalenceBounds:
        coeffs = self.c_plus + self.c_minus
        return NormEquivalenceBounds(min(coeffs), math.sqrt(self.n) * max(coeffs))

    def subgradient_first(self, x, y_ref) -> SubgradientBox:
        x, y = self._check(x, y_ref)
        cp, cm = np.array(self.c_plus), np.array(self.c_minus)
        lo = np.where(x < y, -cp, np.where(x > y, cm, -cp))
        hi = np.where(x < y, -cp, np.where(x > y, cm, cm))
        return SubgradientBox(lo, hi)

    def to_config(self) -> dict[str, str]:
        return {
            "c_plus": ",".join(repr(c) for c in self.c_plus),
            "c_minus": ",".join(repr(c) for c in self.c_minus),
        }


def parse_coefficients(text: str) -> tuple[float, ...]:
    """Parse a comma-separated list of positive reals, e.g. ``"3,3,3"``."""
    try:
        vals = tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise InputError(f"bad coefficient list {text!r}") from exc
    if not vals:
        raise InputError("empty coefficient list")
    return vals


def qd_eval(spec: QuasiDistanceSpec, x, y) -> float:
    return spec(x, y)


def qd_sq_eval(spec: QuasiDistanceSpec, x, y) -> float:
    return spec.squared(x, y)


def qd_norm_bounds(spec: QuasiDistanceSpec) -> NormEquivalenceBounds:
    return spec.norm_bounds()


def qd_subgradient_first(spec: QuasiDistanceSpec, x, y_ref) -> SubgradientBox:
    """Subdifferential of ``q(., y_ref)`` at ``x`` as a box of intervals."""
    return spec.subgradient_first(x, y_ref)


@dataclass(frozen=True)
class AxiomAudit:
    samples: int
    identity_violations: int
    triangle_violations: int
    worst_margin: float  # min over triples of q(x,y)+q(y,z)-q(x,z)

    @property
    def violations(self) -> int:
        return self.identity_violations + self.triangle_violations

    @property
    def ok(self) -> bool:
        return self.violations == 0


def qd_axiom_audit(spec: QuasiDistanceSpec, sample_count: int, seed: int) -> AxiomAudit:
    """Brute-force check of the identity and triangle axioms on random triples.

    Triples are drawn uniformly from ``[-10, 10]^n``. The identity axiom is
    checked both ways: ``q(x, x) == 0`` and ``q(x, y) > 0`` for ``x != y``.
    """
    if sample_count < 1:
        raise InputError("sample_count must be >= 1")
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-10.0, 10.0, size=(3, sample_count, spec.n))
    cp, cm = np.array(spec.c_plus), np.array(spec.c_minus)

    def q(a, b):
        d = b - a
        return np.sum(np.maximum(cp * d, -cm * d), axis=-1)

    x, y, z = pts
    q_xx = q(x, x)
    q_xy, q_yz, q_xz = q(x, y), q(y, z), q(x, z)
    distinct = np.any(x != y, axis=-1)
    identity_bad = int(np.count_nonzero(q_xx != 0.0) + np.count_nonzero(distinct & (q_xy <= 0.0)))
    margin = q_xy + q_yz - q_xz
    triangle_bad = int(np.count_nonzero(margin < -_AUDIT_SLACK * (1.0 + q_xz)))
    return AxiomAudit(sample_count, identity_bad, triangle_bad, float(margin.min()))
