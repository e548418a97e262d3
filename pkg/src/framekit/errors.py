"""Exception types raised by framekit.

Every error derives from :class:`FramekitError`.  Input problems derive from
:class:`InputError` and numerical breakdowns from :class:`NumericalError`;
the CLI maps these two families onto distinct exit codes.
"""


class FramekitError(Exception):
    """Base class for all framekit errors."""


class InputError(FramekitError, ValueError):
    """The caller supplied data that violates an operation's precondition."""


class NumericalError(FramekitError, ArithmeticError):
    """A computation could not be carried out reliably in floating point."""


class DimensionMismatch(InputError):
    pass


class InvalidShape(InputError):
    pass


class NotAFrame(InputError):
    """The vectors do not span the ambient space."""

    def __init__(self, rank, sigma, dim):
        self.rank = rank
        self.sigma = sigma
        self.dim = dim
        super().__init__(
            f"vectors span a {rank}-dimensional subspace of a {dim}-dimensional "
            f"space (offending singular value {sigma:.3e})"
        )


class IndexOutOfRange(InputError):
    pass


class InvalidPerturbation(InputError):
    def __init__(self, residual, tol):
        self.residual = residual
        super().__init__(
            f"perturbation constraint residual {residual:.3e} exceeds {tol:.1e}"
        )


class NoFreedom(InputError):
    """The frame is a basis, so the only dual perturbation is zero."""


class HypothesisViolated(InputError):
    pass


class InvalidM(InputError):
    pass


class TailNotABasis(InputError):
    pass


class ShapeMismatch(InputError):
    pass


class NotAProjection(InputError):
    pass


class ZeroRange(InputError):
    pass


class NotOrthonormal(InputError):
    pass


class OverlappingSets(InputError):
    pass


class MissingCoefficient(InputError):
    pass


class InvalidPlan(InputError):
    pass


class SubsetBudgetExceeded(InputError):
    pass


class ParseError(InputError):
    def __init__(self, message, path=None, field=None, line=None):
        self.path = path
        self.field = field
        self.line = line
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field}")
        prefix = ": ".join([", ".join(where)]) + ": " if where else ""
        super().__init__(prefix + message)


class NumericallySingular(NumericalError):
    pass


class NoBridge(FramekitError):
    """No bridge set makes the bridge equation solvable for the erasure set."""

    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)


class IoError(InputError, OSError):
    """Reading or writing a file failed."""
