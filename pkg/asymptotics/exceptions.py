"""Exception hierarchy shared by the library modules and the commands."""


class GammaAsymError(Exception):
    """Root of every error raised by the asymptotics app."""


class ExactArithmeticError(GammaAsymError):
    """Ill-formed exact data: irrational discriminants, mixed extensions."""


class SeriesError(GammaAsymError):
    """Valuation or invertibility contract of a series operation violated."""


class DomainError(GammaAsymError):
    """Argument outside the domain of an evaluator (poles, nonpositive inputs)."""


class MeanError(GammaAsymError):
    """A mean cannot be evaluated or expanded with the given parameters."""


class FormulaError(GammaAsymError):
    """Formula shape invariants do not hold."""


class UnsupportedFit(GammaAsymError):
    """The sequential elimination cannot proceed on a coefficient."""

    def __init__(self, message, coefficient_index=None):
        super().__init__(message)
        self.coefficient_index = coefficient_index


class PrecisionWarning(UserWarning):
    """Numeric result is too close to the noise floor of the working precision."""
