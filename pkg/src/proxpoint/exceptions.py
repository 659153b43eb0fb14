"""Exception types raised across the package."""


class ProxPointError(Exception):
    """Base class for all package errors."""


class DimensionError(ProxPointError, ValueError):
    """Operands live in spaces of different dimension."""


class ParameterError(ProxPointError, ValueError):
    """A numeric parameter is outside its admissible range."""


class SetValuedError(ProxPointError):
    """The operator has no unique value at the requested point."""


class InnerSolveError(ProxPointError):
    """The inner Newton solve of a resolvent did not converge.

    Attributes
    ----------
    residual : float
        Norm of the Newton residual at the last inner iterate.
    iterations : int
        Number of inner iterations performed.
    """

    def __init__(self, residual, iterations):
        self.residual = residual
        self.iterations = iterations
        super().__init__(
            f"inner solve did not converge after {iterations} iterations "
            f"(residual norm {residual:.3e})"
        )


class NoSolutionError(ProxPointError):
    """The operator has an empty zero set."""

    def __init__(self, message="no solution exists: the zero set is empty"):
        super().__init__(message)


class DivergenceError(ProxPointError):
    """An iterate became non-finite."""

    def __init__(self, n):
        self.n = n
        super().__init__(f"non-finite iterate at n={n}")


class ValidationError(ProxPointError):
    """A schedule set fails its hypothesis set."""

    def __init__(self, report):
        self.report = report
        failed = ", ".join(c.name for c in report.failures())
        super().__init__(f"{report.hset} not satisfied: {failed}")


class ConfigError(ProxPointError):
    """An experiment config could not be parsed or is inconsistent."""

    def __init__(self, message, lineno=None, path=None):
        self.lineno = lineno
        self.path = path
        where = ""
        if path is not None:
            where = f"{path}:"
        if lineno is not None:
            where += f"{lineno}:"
        super().__init__(f"{where} {message}".strip())
