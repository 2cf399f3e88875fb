"""Exception hierarchy shared across the package.

Validation failures (bad parameters, malformed configs, out-of-domain
queries) are distinct from numerical-consistency failures (a computed
object violating an internal mathematical invariant); the CLI maps the
former to exit code 2 and the latter to exit code 3.
"""


class ValidationError(ValueError):
    """Bad user-supplied input: parameters, shapes, domains, configs."""


class ParameterError(ValidationError):
    """Distribution or operation parameters outside their legal range."""


class DimensionError(ValidationError):
    """Mismatched grid sizes or array shapes."""


class DomainError(ValidationError):
    """Query point outside the supported domain of an evaluator."""


class OracleScopeError(ValidationError):
    """Brute-force oracle invoked beyond its enumeration size limit."""


class NumericalConsistencyError(RuntimeError):
    """A computed result violates an invariant it must satisfy
    (non-monotone CDF, diverging ODE solution, failed marginal check)."""


class JobError(RuntimeError):
    """A parallel job failed; remembers which sample index raised."""

    def __init__(self, sample_index: int, cause: BaseException):
        self.sample_index = sample_index
        self.cause = cause
        super().__init__(f"job failed on sample {sample_index}: {cause!r}")
