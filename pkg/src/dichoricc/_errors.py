"""Exception hierarchy.

Every error carries a machine-readable ``code`` and an ``exit_code`` used by
the command line frontend: 1 marks a failed hypothesis (a legitimate
mathematical outcome), 2 bad input, 3 numerical non-convergence.
"""


class DichoRiccError(Exception):
    code = "ERROR"
    exit_code = 2

    def __init__(self, message="", **details):
        super().__init__(message)
        self.details = details

    def to_dict(self):
        return {"code": self.code, "message": str(self), "details": self.details}


# -- input / usage ---------------------------------------------------------

class InputError(DichoRiccError, ValueError):
    code = "INVALID_INPUT"


class DimensionMismatch(InputError):
    code = "DIMENSION_MISMATCH"


class NotHermitian(InputError):
    code = "NOT_HERMITIAN"


class InvalidParams(InputError):
    code = "INVALID_PARAMS"


# -- hypothesis failures ---------------------------------------------------

class HypothesisFailure(DichoRiccError):
    code = "HYPOTHESIS_FAILURE"
    exit_code = 1


class SpectrumOnAxis(HypothesisFailure):
    code = "SPECTRUM_ON_AXIS"


class AxisSpectrum(HypothesisFailure):
    code = "AXIS_SPECTRUM"


class SpectrumOnTestRay(HypothesisFailure):
    code = "SPECTRUM_ON_TEST_RAY"


class GapTooSmall(HypothesisFailure):
    code = "GAP_TOO_SMALL"


class NotAGraph(HypothesisFailure):
    code = "NOT_A_GRAPH"


class WrongDimension(HypothesisFailure):
    code = "WRONG_DIMENSION"


class SignMismatch(HypothesisFailure):
    code = "SIGN_MISMATCH"


class NotSectorial(HypothesisFailure):
    code = "NOT_SECTORIAL"


class DivergentIntegral(HypothesisFailure):
    code = "DIVERGENT_INTEGRAL"


class SingularS(HypothesisFailure):
    code = "SINGULAR_S"


class GapCollapse(HypothesisFailure):
    code = "GAP_COLLAPSE"


class SectorViolated(HypothesisFailure):
    code = "SECTOR_VIOLATED"


class DefectiveMatrix(HypothesisFailure):
    code = "DEFECTIVE_MATRIX"


# -- numerical breakdown ---------------------------------------------------

class NumericalError(DichoRiccError):
    code = "NUMERICAL_ERROR"
    exit_code = 3


class NoConvergence(NumericalError):
    code = "NO_CONVERGENCE"


class SingularIterate(NumericalError):
    code = "SINGULAR_ITERATE"


class RefinementLimit(NumericalError):
    code = "REFINEMENT_LIMIT"
