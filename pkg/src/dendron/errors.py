"""Exception hierarchy.

Every validation failure carries a short machine-readable ``code`` naming the
first violated invariant, plus a human-readable message with the witness.
"""

from __future__ import annotations


class DendronError(Exception):
    """Base class for all library errors."""

    code = "Error"

    def __init__(self, message: str = "", **witness):
        self.witness = witness
        if witness:
            detail = ", ".join(f"{k}={v!r}" for k, v in sorted(witness.items()))
            message = f"{message} [{detail}]" if message else detail
        super().__init__(f"{self.code}: {message}" if message else self.code)


class TreeValidationError(DendronError):
    pass


class NonInjectiveS(TreeValidationError):
    code = "NonInjectiveS"


class NonInjectiveT(TreeValidationError):
    code = "NonInjectiveT"


class RootCountNotOne(TreeValidationError):
    code = "RootCountNotOne"


class SuccessorDiverges(TreeValidationError):
    code = "SuccessorDiverges"


class MorphismValidationError(DendronError):
    pass


class SourceTargetMismatch(MorphismValidationError):
    code = "SourceTargetMismatch"


class SquareNotCommuting(MorphismValidationError):
    code = "SquareNotCommuting"


class MiddleSquareNotCartesian(MorphismValidationError):
    code = "MiddleSquareNotCartesian"


class OverlappingVertexImages(MorphismValidationError):
    code = "OverlappingVertexImages"


class ArityMismatch(DendronError):
    code = "ArityMismatch"


class ForestValidationError(DendronError):
    pass


class MapNotTotal(ForestValidationError):
    code = "MapNotTotal"


class NotInjective(ForestValidationError):
    code = "NotInjective"


class PullbackFails(ForestValidationError):
    code = "PullbackFails"


class NaturalityFails(ForestValidationError):
    code = "NaturalityFails"


class IndexOutOfRange(DendronError):
    code = "IndexOutOfRange"


class NotATree(DendronError):
    code = "NotATree"


class LabelMismatch(DendronError):
    code = "LabelMismatch"


class OperadValidationError(DendronError):
    pass


class AssociativityFails(OperadValidationError):
    code = "AssociativityFails"


class UnitFails(OperadValidationError):
    code = "UnitFails"


class EquivarianceFails(OperadValidationError):
    code = "EquivarianceFails"


class ColorMismatch(OperadValidationError):
    code = "ColorMismatch"


class ProfileMismatch(DendronError):
    code = "ProfileMismatch"


class NotAMap(DendronError):
    code = "NotAMap"


class ColorSetMismatch(DendronError):
    code = "ColorSetMismatch"


class SiteMismatch(DendronError):
    code = "SiteMismatch"


class NotSegal(DendronError):
    code = "NotSegal"


class SerializationError(DendronError):
    code = "SerializationError"


class WorkLimitExceeded(DendronError):
    """Raised when DENDRON_MAX_WORK caps an enumeration."""

    code = "WorkLimitExceeded"
