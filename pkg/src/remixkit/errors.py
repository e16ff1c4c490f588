"""Engine error taxonomy.

Every error the engine can raise carries a stable machine-readable ``code``.
The HTTP layer maps codes to statuses in one table (see ``service.CODE_STATUS``);
tests assert that table covers every subclass defined here.
"""

from __future__ import annotations


class RemixError(Exception):
    """Base class for all engine errors."""

    code = "INTERNAL"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)


# --- corpus ---------------------------------------------------------------

class FileNotFoundInput(RemixError):
    code = "FILE_NOT_FOUND"


class ManifestParseError(RemixError):
    code = "PARSE_ERROR"

    def __init__(self, line_no: int, message: str = ""):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}" if message else f"line {line_no}")


class DuplicateIdError(RemixError):
    code = "DUPLICATE_ID"

    def __init__(self, example_id: str):
        self.example_id = example_id
        super().__init__(f"duplicate id {example_id!r}")


class ValidationFailed(RemixError):
    code = "VALIDATION_FAILED"

    def __init__(self, example_id: str, field: str, message: str = ""):
        self.example_id = example_id
        self.field = field
        super().__init__(f"{example_id!r}: field {field!r}" + (f": {message}" if message else ""))


class AllContentTrimmed(RemixError):
    code = "ALL_CONTENT_TRIMMED"


# --- embedding ------------------------------------------------------------

class EmptyQueryError(RemixError):
    code = "EMPTY_QUERY"


class ProviderTimeout(RemixError):
    code = "PROVIDER_TIMEOUT"


class ProviderError(RemixError):
    code = "PROVIDER_ERROR"

    def __init__(self, status: int | None = None, body: str = ""):
        self.status = status
        self.body = body[:200]
        super().__init__(f"provider failed (status={status}): {self.body}")


class ZeroVectorError(RemixError):
    code = "ZERO_VECTOR"


# --- index ----------------------------------------------------------------

class DimensionMismatch(RemixError):
    code = "DIMENSION_MISMATCH"

    def __init__(self, expected: int, got: int):
        self.expected = expected
        self.got = got
        super().__init__(f"expected dimension {expected}, got {got}")


class IndexIoError(RemixError):
    code = "IO_ERROR"


class CorruptIndex(RemixError):
    code = "CORRUPT_INDEX"


# --- retrieval ------------------------------------------------------------

class UnknownExampleId(RemixError):
    code = "UNKNOWN_EXAMPLE_ID"

    def __init__(self, example_id: str):
        self.example_id = example_id
        super().__init__(f"unknown example id {example_id!r}")


# --- diffpatch ------------------------------------------------------------

class MalformedHeader(RemixError):
    code = "MALFORMED_HEADER"

    def __init__(self, line_no: int, message: str = ""):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}" if message else f"line {line_no}")


class LineCountMismatch(RemixError):
    code = "LINE_COUNT_MISMATCH"

    def __init__(self, hunk_index: int):
        self.hunk_index = hunk_index
        super().__init__(f"hunk {hunk_index}")


class OverlappingHunks(RemixError):
    code = "OVERLAPPING_HUNKS"


class MultiFileUnsupported(RemixError):
    code = "MULTI_FILE_UNSUPPORTED"


class HunkRejected(RemixError):
    code = "HUNK_REJECTED"

    NO_MATCH = "NO_MATCH"
    AMBIGUOUS_MATCH = "AMBIGUOUS_MATCH"

    def __init__(self, hunk_index: int, reason: str):
        self.hunk_index = hunk_index
        self.reason = reason
        super().__init__(f"hunk {hunk_index}: {reason}")


class AlreadyApplied(RemixError):
    code = "ALREADY_APPLIED"

    def __init__(self, hunk_index: int):
        self.hunk_index = hunk_index
        super().__init__(f"hunk {hunk_index}")


# --- remix ----------------------------------------------------------------

class InvalidRequest(RemixError):
    code = "INVALID_REQUEST"


class NoPayload(RemixError):
    code = "NO_PAYLOAD"


class PayloadKindMismatch(RemixError):
    code = "PAYLOAD_KIND_MISMATCH"


class RemixStageError(RemixError):
    """Wraps an engine error with the pipeline stage it occurred in.

    Stages: PROMPT, GENERATE, PARSE, PATCH. The wrapped error's code is
    preserved so the API can report both the stage and the original code.
    """

    def __init__(self, stage: str, cause: RemixError):
        self.stage = stage
        self.cause = cause
        self.code = cause.code
        super().__init__(f"stage {stage}: {cause}")


# --- session --------------------------------------------------------------

class SessionNotFound(RemixError):
    code = "SESSION_NOT_FOUND"

    def __init__(self, session_id: str):
        self.session_id = session_id
        super().__init__(f"session {session_id!r}")


class EmptyHistory(RemixError):
    code = "EMPTY_HISTORY"


class InvalidAnnotation(RemixError):
    code = "INVALID_ANNOTATION"


class SessionBusy(RemixError):
    code = "SESSION_BUSY"


# --- evalharness ----------------------------------------------------------

class NegativeGrade(RemixError):
    code = "NEGATIVE_GRADE"


class EmptyTemplateSet(RemixError):
    code = "EMPTY_TEMPLATE_SET"

    def __init__(self, intent_type: str):
        self.intent_type = intent_type
        super().__init__(f"no templates for {intent_type}")
