"""Exception hierarchy shared by every module."""


class EntNewtonError(Exception):
    """Base class for all library errors."""


class InputShapeError(EntNewtonError, ValueError):
    pass


class ConfigError(EntNewtonError, ValueError):
    pass


class PreconditionError(EntNewtonError, ValueError):
    pass


class DegenerateWeightError(EntNewtonError, ValueError):
    pass


class ExpOverflowError(EntNewtonError, OverflowError):
    """exp(Ax) left the double range; ``index`` is the offending row."""

    def __init__(self, index, value):
        self.index = int(index)
        self.value = float(value)
        super().__init__(
            f"exp overflow at row {self.index}: (Ax)_i = {self.value:.6g}"
        )


class NumericalError(EntNewtonError, ArithmeticError):
    pass


class SymmetryError(NumericalError):
    pass


class RankError(NumericalError):
    pass


class IndefiniteHessianError(NumericalError):
    """Cholesky failed. ``trace`` holds the solver trace up to the failure, if any."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class ParseError(EntNewtonError, ValueError):
    def __init__(self, message, line=None, field=None):
        loc = []
        if line is not None:
            loc.append(f"line {line}")
        if field is not None:
            loc.append(f"field {field!r}")
        if loc:
            message = f"{message} ({', '.join(loc)})"
        super().__init__(message)
        self.line = line
        self.field = field


class VersionError(EntNewtonError, ValueError):
    pass
