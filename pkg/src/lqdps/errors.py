"""Exception hierarchy shared by every lqdps module."""


class LqdpsError(Exception):
    """Base class for all package errors."""


class InputError(LqdpsError, ValueError):
    """Malformed arguments: wrong dimensions, out-of-domain values."""


class EvaluationError(LqdpsError, ArithmeticError):
    """An objective evaluator produced a non-finite value."""


class SaturationError(EvaluationError):
    """Exponential scalarization would overflow."""


class UnsupportedError(LqdpsError):
    """The requested operation needs data the problem does not carry."""


class ValidationError(LqdpsError, ValueError):
    """Solver configuration rejected before the run starts."""


class InternalError(LqdpsError, RuntimeError):
    """A guarded invariant failed; indicates a bug."""
