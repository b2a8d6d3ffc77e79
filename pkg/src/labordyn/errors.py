"""Exception hierarchy shared by all labordyn modules."""


class LabordynError(Exception):
    """Base class for every error raised by this package."""


class InvalidParams(LabordynError, ValueError):
    """A model or configuration value violates its documented invariant.

    Attributes:
        field (str or None): name of the offending field, when known.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class DegenerateDenominator(LabordynError, ArithmeticError):
    """The Holling type II denominator ``1 + k*x`` vanished.

    Attributes:
        time (float or None): integration time at which it happened, when the
            error surfaced during time stepping.
    """

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


# integration

class NonFiniteState(LabordynError, ArithmeticError):
    """A state component became NaN/inf or crossed the blow-up threshold.

    Attributes:
        last_finite_time (float): last time at which the state was finite.
        last_finite_state (tuple): the state at that time.
    """

    def __init__(self, message, last_finite_time, last_finite_state=None):
        super().__init__(message)
        self.last_finite_time = last_finite_time
        self.last_finite_state = last_finite_state


class StepSizeUnderflow(NonFiniteState):
    """Adaptive step control shrank the step below its floor."""


# equilibrium

class EquilibriumError(LabordynError):
    pass


class SingularEquilibrium(EquilibriumError, ArithmeticError):
    """A guarded denominator of the equilibrium relations is (nearly) zero."""


class InvalidResponse(EquilibriumError, ValueError):
    """The functional responses do not match the requested solution path."""


class UnsupportedCase(EquilibriumError, ValueError):
    """The parameter combination has no implemented equilibrium path."""


class NoConvergence(EquilibriumError):
    """Fixed-point iteration ran out of iterations.

    Attributes:
        best (labordyn.equilibrium.EquilibriumPoint): lowest-residual iterate.
        residual (float): its residual.
    """

    def __init__(self, message, best=None, residual=float("nan")):
        super().__init__(message)
        self.best = best
        self.residual = residual


# dissimilarity / ingestion / analysis

class DimensionMismatch(LabordynError, ValueError):
    pass


class InvalidExponent(LabordynError, ValueError):
    pass


class EmptyInput(LabordynError, ValueError):
    pass


class InvalidLag(LabordynError, ValueError):
    pass


class ParseError(LabordynError, ValueError):
    """A field could not be parsed.

    Attributes:
        line (int): 1-based line number in the input.
        column (int): 1-based column number.
    """

    def __init__(self, message, line=None, column=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.line = line
        self.column = column


class SchemaError(ParseError):
    pass


class MonotonicityError(ParseError):
    pass


class GapError(ParseError):
    pass


class TooFewRecords(LabordynError, ValueError):
    pass


class TooShort(LabordynError, ValueError):
    pass


class ZeroVariance(LabordynError, ValueError):
    pass


class EmptyTrajectory(LabordynError, ValueError):
    pass
