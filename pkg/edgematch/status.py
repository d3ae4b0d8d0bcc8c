"""
Process exit codes of the command line interface.

Every BaseCustomException subclass names the class it exits with, so callers
can tell a malformed input apart from a puzzle that was simply not solved.
"""
import enum


class ExitCode(int, enum.Enum):
    OK = 0
    CONTRACT_VIOLATION = 1
    PARSE_ERROR = 2
    UNSOLVED = 3
    NUMERICAL_FAILURE = 4
