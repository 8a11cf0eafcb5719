"""Exception hierarchy.

Every domain error carries a stable ``code`` used in the CLI error JSON.
"""


class LumpkitError(Exception):
    """Base class for domain errors."""

    code = "LumpkitError"


class DimensionMismatch(LumpkitError, ValueError):
    code = "DimensionMismatch"


class NotKinetic(LumpkitError):
    """The model has no inducing (generalized) compartmental network."""

    code = "NotKinetic"


class NotCompartmentalShape(LumpkitError):
    """A network complex holds two species, or a species sits in two complexes."""

    code = "NotCompartmentalShape"


class InvalidNetwork(LumpkitError, ValueError):
    code = "InvalidNetwork"


class NonRobustParameters(LumpkitError, ValueError):
    """Two eigenvalues coincide, so the closed-form eigenvectors are invalid."""

    code = "NonRobustParameters"


class RankDeficient(LumpkitError):
    code = "RankDeficient"


class ConvergenceFailure(LumpkitError):
    code = "ConvergenceFailure"


class Overflow(LumpkitError, ArithmeticError):
    code = "Overflow"


class NotLumpable(LumpkitError):
    code = "NotLumpable"


class DependentSelection(LumpkitError):
    code = "DependentSelection"


class InvalidLumpingMatrix(LumpkitError, ValueError):
    code = "InvalidLumpingMatrix"


class SingularP(LumpkitError):
    code = "SingularP"


class NegativeEntries(LumpkitError, ValueError):
    code = "NegativeEntries"


class GridTooCoarse(LumpkitError, ValueError):
    code = "GridTooCoarse"
