"""Typed failures raised by the numerical routines.

Every exception carries a short machine-readable ``code`` so the CLI and
the verification reports can name the failure without string matching.
"""


class GeometryError(ValueError):
    code = "GEOMETRY_ERROR"

    def __init__(self, message="", **details):
        super().__init__(message or self.code)
        self.details = details


class IllConditioned(GeometryError):
    code = "ILL_CONDITIONED"


class NotLorentzian(GeometryError):
    code = "NOT_LORENTZIAN"


class Degenerate(GeometryError):
    code = "DEGENERATE"


class ChartSingularity(GeometryError):
    code = "CHART_SINGULARITY"


class Boundary(GeometryError):
    code = "BOUNDARY"


class AtInfinity(GeometryError):
    code = "AT_INFINITY"


class DegenerateSplitting(GeometryError):
    code = "DEGENERATE_SPLITTING"


class InvalidR(GeometryError):
    code = "INVALID_R"


class NotRegular(GeometryError):
    code = "NOT_REGULAR"


class NotClosed(GeometryError):
    code = "NOT_CLOSED"


class WrongPolarisation(GeometryError):
    code = "WRONG_POLARISATION"


class StepTooCoarse(GeometryError):
    code = "STEP_TOO_COARSE"


class UnwrapFailure(GeometryError):
    code = "UNWRAP_FAILURE"


class NotLightlike(GeometryError):
    code = "NOT_LIGHTLIKE"


class Parabolic(GeometryError):
    code = "PARABOLIC"


class NotBacklund(GeometryError):
    code = "NOT_BACKLUND"


class DivideByMu(GeometryError):
    code = "DIVIDE_BY_MU"


class NotImmersed(GeometryError):
    code = "NOT_IMMERSED"
