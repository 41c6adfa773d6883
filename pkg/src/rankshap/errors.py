"""Exception types shared across the package."""


class RankShapError(Exception):
    """Base class for all package-specific errors."""


class ParseError(RankShapError, ValueError):
    """Malformed input data; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class DimensionError(RankShapError, ValueError):
    """Feature-vector or permutation dimensions do not agree."""


class CapacityError(RankShapError, ValueError):
    """Requested exact enumeration exceeds the configured limit."""


class EstimationError(RankShapError, RuntimeError):
    """An estimator could not produce a result (e.g. singular regression)."""
