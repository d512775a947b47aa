"""Exception types shared across the package."""


class LflowError(Exception):
    """Base class for every error raised by this package."""


class CatalogError(LflowError):
    """Catalog text could not be parsed."""

    def __init__(self, message: str, line_number: int | None = None, line: str | None = None):
        if line_number is not None:
            detail = f" ({line.strip()!r})" if line else ""
            message = f"line {line_number}: {message}{detail}"
        super().__init__(message)
        self.line_number = line_number
        self.line = line


class SingularCurveError(CatalogError):
    """The a-invariants describe a singular cubic (discriminant zero)."""


class SamplingError(LflowError):
    """The sampling plan cannot be satisfied by the catalog."""


class ConsistencyError(LflowError):
    """Point counts disagree with the conductor claimed by the catalog."""


class NumericError(LflowError):
    """A numeric routine failed to converge or left its validated domain."""


class CacheError(LflowError):
    """A coefficient cache file exists but its body is corrupt."""


class UndefinedCorrelationError(LflowError):
    """Rank correlation is undefined for the given inputs."""


class ConfigError(LflowError):
    """Run configuration is invalid or contradictory."""
