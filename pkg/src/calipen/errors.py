"""Exception types shared across the package."""


class CalipenError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(CalipenError):
    pass


class ConstantColumn(CalipenError):
    def __init__(self, j):
        self.column = j
        super().__init__(f"column {j} is constant and cannot be standardized")


class RankDeficient(CalipenError):
    pass


class SupportTooLarge(CalipenError):
    pass


class EmptyList(CalipenError):
    pass


class NotStandardized(CalipenError):
    pass


class DegenerateSSE(CalipenError):
    pass


class AllExcluded(CalipenError):
    pass


class TooManySurvivors(CalipenError):
    pass


class Separation(CalipenError):
    pass


class TooLargeForBruteForce(CalipenError):
    pass


class InvalidDesign(CalipenError):
    pass
