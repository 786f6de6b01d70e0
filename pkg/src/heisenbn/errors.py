"""Exception hierarchy.

Two families matter for exit codes and HTTP status mapping: ValidationError
(bad inputs, malformed documents, impossible structures) and InferenceError
(well-formed inputs that fail at run time, e.g. contradictory evidence).
Every exception accepts an optional document ``path`` so the I/O layer can
point at the offending element ("nodes[3].cpd.rows[2]").
"""

from __future__ import annotations


class HeisenbnError(Exception):
    """Base class for all toolkit errors."""

    def __init__(self, message: str, path: str | None = None):
        self.path = path
        super().__init__(message)

    def __str__(self) -> str:
        base = super().__str__()
        if self.path:
            return f"{self.path}: {base}"
        return base

    def with_path(self, path: str) -> "HeisenbnError":
        """Attach a document path (outermost wins) and return self."""
        if self.path is None:
            self.path = path
        else:
            self.path = f"{path}.{self.path}" if not self.path.startswith(path) else self.path
        return self


class ValidationError(HeisenbnError):
    """Invalid model, document, or parameter input (CLI exit code 1)."""


class InferenceError(HeisenbnError):
    """Runtime failure on otherwise valid inputs (CLI exit code 2)."""


# --- bn-core ---------------------------------------------------------------

class CycleDetected(ValidationError):
    pass


class UnknownParent(ValidationError):
    pass


class UnknownNode(ValidationError):
    pass


class CpdShapeMismatch(ValidationError):
    pass


class RowNotNormalized(ValidationError):
    def __init__(self, message: str, node_id: str, row_index: int, path: str | None = None):
        self.node_id = node_id
        self.row_index = row_index
        super().__init__(message, path)


class ZeroProbabilityEvidence(InferenceError):
    pass


class TooLarge(ValidationError):
    pass


class NotAnIntervalNode(ValidationError):
    pass


# --- cpd-gates -------------------------------------------------------------

class ParameterOutOfRange(ValidationError):
    pass


class IncompatibleIntervals(ValidationError):
    pass


# --- fault-tree ------------------------------------------------------------

class MalformedFaultTree(ValidationError):
    pass


class EvidenceNotOnTop(ValidationError):
    pass


# --- defect-model ----------------------------------------------------------

class MissingDimension(ValidationError):
    pass


class SchemaMismatch(ValidationError):
    pass


class CountOutOfRange(ValidationError):
    pass


class NegativeInput(ValidationError):
    pass


# --- calibration -----------------------------------------------------------

class EmptyRecords(ValidationError):
    pass


# --- sensitivity -----------------------------------------------------------

class TargetNotSummarizable(ValidationError):
    pass


# --- cli-io ----------------------------------------------------------------

class DocumentSyntaxError(ValidationError):
    """The document is not valid JSON at all."""


class SchemaError(ValidationError):
    """The document is JSON but violates the schema."""
