"""Shared error vocabulary.

Every domain error carries a stable ``code`` string so the CLI can emit a
single machine-readable diagnostic regardless of which module raised it.
"""

from __future__ import annotations


class ToolkitError(Exception):
    """Base class for all domain errors raised by this package."""

    code = "ERROR"

    def to_json(self) -> dict:
        return {"error": self.code, "message": str(self)}


class MpsSyntaxError(ToolkitError):
    code = "SYNTAX"

    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.reason = message


class DuplicateNameError(ToolkitError):
    code = "DUPLICATE_NAME"


class UnknownRowError(ToolkitError):
    code = "UNKNOWN_ROW_REFERENCE"


class UnsupportedSectionError(ToolkitError):
    code = "UNSUPPORTED_SECTION"

    def __init__(self, section: str, line: int):
        super().__init__(f"unsupported section {section!r} at line {line}")
        self.section = section
        self.line = line


class UnknownVariableError(ToolkitError):
    code = "UNKNOWN_VARIABLE"


class TooLargeError(ToolkitError):
    code = "TOO_LARGE"


class ContinuousUnsupportedError(ToolkitError):
    code = "CONTINUOUS_UNSUPPORTED"


class InfeasibleCandidateError(ToolkitError):
    code = "INFEASIBLE_CANDIDATE_SOLUTION"


class MissingReferenceValueError(ToolkitError):
    code = "MISSING_REFERENCE_VALUE"


class NameMapIncompleteError(ToolkitError):
    code = "NAME_MAP_INCOMPLETE"

    def __init__(self, missing: list[str]):
        super().__init__(f"name map misses {len(missing)} keys: {sorted(missing)[:10]}")
        self.missing = sorted(missing)


class DisconnectedError(ToolkitError):
    code = "DISCONNECTED"


class ParameterError(ToolkitError):
    code = "PARAMETER_RANGE"


class MissingMpsSizeError(ToolkitError):
    code = "MISSING_MPS_SIZE"


class NonFiniteError(ToolkitError):
    code = "NON_FINITE"
