import enum

from edgematch.status import ExitCode


class ExceptionErrorCode(str, enum.Enum):
    # common
    ConfigurationError = "CO00"
    ContractViolationError = "CO01"

    # geometry
    PuzzleFormatError = "GE00"
    UnsolvablePuzzleError = "GE01"
    DegenerateFrameError = "GE02"

    # algebra
    RotationPreconditionError = "AL00"
    OrientationRecoveryError = "AL01"

    # kernels
    SolverFailureError = "KE00"

    # relaxation-lp
    InfeasibleRepresentationError = "LP00"
    DuplicatePresetError = "LP01"

    # relaxation-sdp
    ExtractionFailureError = "SD00"

    # oracle
    SearchSpaceTooLargeError = "OR00"
    DegenerateWitnessError = "OR01"


class BaseCustomException(Exception):
    """
        ## Error code ABCD means
        AB: resources. CO means common, GE geometry, AL algebra, KE kernels,
            LP and SD the two relaxation pipelines, OR the oracle.
        CD: numbering. You just need to number them in order.

        ## Usage
        def something():
            if some_bool:
                raise PuzzleFormatError("piece edges do not chain", {"piece": 3})

        try:
            something()
        except PuzzleFormatError as e:
            sys.exit(e.exit_code)

    """
    code_class = ExceptionErrorCode
    exit_code = ExitCode.CONTRACT_VIOLATION

    @property
    def message(self):
        return self.args[0]

    @property
    def info(self):
        try:
            info = self.args[1]
        except IndexError:
            return {}
        return info

    @property
    def error_code(self):
        return self.code_class[self.__class__.__name__]

    def __str__(self):
        return f"error_code: {self.error_code.value}, message: {self.message}"

    def __repr__(self):
        return f"<{self.__class__.__name__}:{self.error_code.value}>"

    def as_dict(self):
        return {
            "message": self.message,
            "error_code": self.error_code.value,
            "info": self.info
        }


class ConfigurationError(BaseCustomException):
    """Settings files could not be loaded or hold invalid values"""
    ...


class ContractViolationError(BaseCustomException):
    """An operation was called outside its precondition (dimension mismatch, bad option)"""
    ...


class PuzzleFormatError(BaseCustomException):
    """A puzzle or placement file is malformed"""
    exit_code = ExitCode.PARSE_ERROR


class UnsolvablePuzzleError(BaseCustomException):
    """Edge-type counts are unbalanced or areas disagree, so no solution exists"""
    exit_code = ExitCode.UNSOLVED


class DegenerateFrameError(BaseCustomException):
    """The frame region has zero area and cannot be normalized"""
    ...


class RotationPreconditionError(BaseCustomException):
    """Rotated frame copies overlap or orientations are outside the rotation group"""
    ...


class OrientationRecoveryError(BaseCustomException):
    """No rotated frame copy contains the recovered location"""
    exit_code = ExitCode.UNSOLVED


class SolverFailureError(BaseCustomException):
    """A convex kernel ended without an optimal status"""
    exit_code = ExitCode.NUMERICAL_FAILURE


class InfeasibleRepresentationError(BaseCustomException):
    """The relaxation excludes every placement"""
    exit_code = ExitCode.UNSOLVED


class DuplicatePresetError(BaseCustomException):
    """Two preset locations coincide"""
    ...


class ExtractionFailureError(BaseCustomException):
    """Moment matrices are not numerically rank one"""
    exit_code = ExitCode.NUMERICAL_FAILURE


class SearchSpaceTooLargeError(BaseCustomException):
    """Exhaustive search would exceed the configured node budget"""
    ...


class DegenerateWitnessError(BaseCustomException):
    """Power-sum witness vector has repeated entries"""
    ...
