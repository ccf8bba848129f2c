"""Exception hierarchy shared across the package."""


class WignerLabError(Exception):
    """Base class for all errors raised by this package."""


class InvalidSpecError(WignerLabError, ValueError):
    """A configuration object violates its contract (bad law name, variance, grid)."""


class NoDensityError(WignerLabError):
    """An operation requiring a probability density was given a discrete law."""


class HypothesisError(WignerLabError):
    """The entry law fails the score-regularity / moment hypothesis of an estimator."""


class EigensolverError(WignerLabError):
    """Dense eigendecomposition failed to converge; the trial is invalid."""


class DegenerateSelectionError(WignerLabError):
    """The six-index selection rule has no valid candidates (measure-zero input)."""
