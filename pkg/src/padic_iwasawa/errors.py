"""Exception hierarchy.

Every error carries a short machine-readable ``kind`` which the command line
front end copies into its JSON error object.
"""


class PadicIwasawaError(ValueError):
    kind = "error"


class PrecisionError(PadicIwasawaError):
    kind = "precision"


class ShapeError(PadicIwasawaError):
    kind = "shape-mismatch"


class NotInvertibleError(PadicIwasawaError):
    kind = "not-invertible"


class EnumerationTooLarge(PadicIwasawaError):
    kind = "enumeration-too-large"


class FamilyRankError(PadicIwasawaError):
    kind = "family-rank"


class InadmissibleError(PadicIwasawaError):
    kind = "inadmissible-N"


class NoAdmissibleError(PadicIwasawaError):
    kind = "no-admissible-N"


class ZeroPolynomialError(PadicIwasawaError):
    kind = "zero-polynomial"


class AllZeroError(PadicIwasawaError):
    kind = "all-zero-at-precision"


class TruncationTooSmall(PadicIwasawaError):
    kind = "truncation-too-small"


class NotDistinguishedError(PadicIwasawaError):
    kind = "not-distinguished"


class IndeterminateError(PadicIwasawaError):
    kind = "indeterminate"


class DescentMismatch(PadicIwasawaError):
    kind = "descent-mismatch"


class UnsupportedIdeal(PadicIwasawaError):
    kind = "unsupported-ideal"


class InconsistentInput(PadicIwasawaError):
    kind = "inconsistent-input"


class UnsupportedProfile(PadicIwasawaError):
    kind = "unsupported-profile"


class MissingDecompositionData(PadicIwasawaError):
    kind = "missing-decomposition-data"


class NotStabilized(PadicIwasawaError):
    kind = "not-stabilized"


class NegativeEntry(PadicIwasawaError):
    kind = "negative-entry"


class SchemaError(PadicIwasawaError):
    kind = "schema"
