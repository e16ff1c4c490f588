"""Unified-diff parsing and atomic, bounded-fuzz patch application.

The generator emits standard unified diffs (optionally fenced, optionally
with ---/+++ file headers). Application is all-or-nothing: if any hunk fails
to locate its context the original document is left untouched.

Matching is exact per line. When a hunk's old block is not found at the
stated position, the applier searches outward by growing |offset| up to a
bounded window, checking the negative offset before the positive at each
distance; if both directions match at the same minimal distance the hunk is
rejected as ambiguous rather than guessed at.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

from .errors import (
    AlreadyApplied,
    HunkRejected,
    LineCountMismatch,
    MalformedHeader,
    MultiFileUnsupported,
    OverlappingHunks,
)

DEFAULT_FUZZY_WINDOW = 20

_HUNK_RE = re.compile(r"^@@ -(\d+)(?:,(\d+))? \+(\d+)(?:,(\d+))? @@")
_NO_NEWLINE = "\\ No newline at end of file"


class LineTag(enum.Enum):
    CONTEXT = " "
    REMOVE = "-"
    ADD = "+"


@dataclass(frozen=True)
class Hunk:
    old_start: int
    old_len: int
    new_start: int
    new_len: int
    lines: tuple[tuple[LineTag, str], ...]
    old_missing_newline: bool = False
    new_missing_newline: bool = False

    def old_block(self) -> list[str]:
        return [text for tag, text in self.lines if tag is not LineTag.ADD]

    def new_block(self) -> list[str]:
        return [text for tag, text in self.lines if tag is not LineTag.REMOVE]


@dataclass(frozen=True)
class UnifiedDiff:
    hunks: tuple[Hunk, ...]
    preamble: tuple[str, ...] = ()


@dataclass(frozen=True)
class PatchOutcome:
    new_document: str
    applied_hunks: int
    offsets: tuple[int, ...] = field(default=())


def _split_document(text: str) -> tuple[list[str], bool]:
    """Split into logical lines plus a had-trailing-newline flag."""
    if text == "":
        return [], False
    lines = text.split("\n")
    if lines[-1] == "":
        lines.pop()
        return lines, True
    return lines, False


def _join_document(lines: list[str], trailing_newline: bool) -> str:
    if not lines:
        return ""  # zero lines means empty document, no newline to terminate
    return "\n".join(lines) + ("\n" if trailing_newline else "")


def parse_unified_diff(text: str) -> UnifiedDiff:
    """Parse unified-diff text into hunks.

    Empty input yields a diff with zero hunks. A second file section
    (``--- `` or ``diff `` after hunks began) is rejected: the engine edits
    a single UI-code document.
    """
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()

    preamble: list[str] = []
    hunks: list[Hunk] = []
    i = 0
    n = len(lines)

    while i < n and not lines[i].startswith("@@"):
        preamble.append(lines[i])
        i += 1

    while i < n:
        line = lines[i]
        if line.startswith("--- ") or line.startswith("diff "):
            raise MultiFileUnsupported(f"second file section at line {i + 1}")
        if not line.startswith("@@"):
            raise MalformedHeader(i + 1, f"expected hunk header, got {line!r}")
        match = _HUNK_RE.match(line)
        if match is None:
            raise MalformedHeader(i + 1, f"bad hunk header {line!r}")
        old_start = int(match.group(1))
        old_len = int(match.group(2)) if match.group(2) is not None else 1
        new_start = int(match.group(3))
        new_len = int(match.group(4)) if match.group(4) is not None else 1
        i += 1

        body: list[tuple[LineTag, str]] = []
        old_seen = new_seen = 0
        old_missing = new_missing = False
        while i < n and not (old_seen >= old_len and new_seen >= new_len):
            raw = lines[i]
            if raw == _NO_NEWLINE:
                # Sentinel names the side(s) the preceding line belongs to.
                if not body:
                    raise MalformedHeader(i + 1, "sentinel before any hunk line")
                tag = body[-1][0]
                if tag in (LineTag.CONTEXT, LineTag.REMOVE):
                    old_missing = True
                if tag in (LineTag.CONTEXT, LineTag.ADD):
                    new_missing = True
                i += 1
                continue
            if raw.startswith(" "):
                body.append((LineTag.CONTEXT, raw[1:]))
                old_seen += 1
                new_seen += 1
            elif raw.startswith("-"):
                body.append((LineTag.REMOVE, raw[1:]))
                old_seen += 1
            elif raw.startswith("+"):
                body.append((LineTag.ADD, raw[1:]))
                new_seen += 1
            else:
                break
            i += 1
        # Trailing sentinel after the final body line.
        if i < n and lines[i] == _NO_NEWLINE and body:
            tag = body[-1][0]
            if tag in (LineTag.CONTEXT, LineTag.REMOVE):
                old_missing = True
            if tag in (LineTag.CONTEXT, LineTag.ADD):
                new_missing = True
            i += 1
        if old_seen != old_len or new_seen != new_len or not body:
            raise LineCountMismatch(len(hunks))
        hunks.append(
            Hunk(
                old_start=old_start,
                old_len=old_len,
                new_start=new_start,
                new_len=new_len,
                lines=tuple(body),
                old_missing_newline=old_missing,
                new_missing_newline=new_missing,
            )
        )

    for prev, cur in zip(hunks, hunks[1:]):
        # Half-open old-side interval; zero-length hunks occupy the gap
        # after line old_start.
        prev_end = prev.old_start - 1 + prev.old_len if prev.old_len else prev.old_start
        cur_begin = cur.old_start - 1 if cur.old_len else cur.old_start
        if cur_begin < prev_end or cur.old_start < prev.old_start:
            raise OverlappingHunks(
                f"hunks at old lines {prev.old_start} and {cur.old_start}"
            )

    return UnifiedDiff(hunks=tuple(hunks), preamble=tuple(preamble))


def render_unified_diff(diff: UnifiedDiff) -> str:
    """Render back to canonical text (explicit lengths, sentinels included)."""
    out: list[str] = list(diff.preamble)
    for hunk in diff.hunks:
        out.append(
            f"@@ -{hunk.old_start},{hunk.old_len} +{hunk.new_start},{hunk.new_len} @@"
        )
        last_old = max(
            (i for i, (tag, _) in enumerate(hunk.lines) if tag is not LineTag.ADD),
            default=-1,
        )
        last_new = max(
            (i for i, (tag, _) in enumerate(hunk.lines) if tag is not LineTag.REMOVE),
            default=-1,
        )
        for i, (tag, text) in enumerate(hunk.lines):
            out.append(tag.value + text)
            emit_sentinel = (
                (hunk.old_missing_newline and i == last_old and tag is not LineTag.ADD)
                or (hunk.new_missing_newline and i == last_new and tag is not LineTag.REMOVE)
            )
            if emit_sentinel:
                out.append(_NO_NEWLINE)
    return "\n".join(out) + ("\n" if out else "")


def _block_matches(lines: list[str], pos: int, block: list[str]) -> bool:
    if pos < 0 or pos + len(block) > len(lines):
        return False
    return lines[pos : pos + len(block)] == block


def _locate(
    lines: list[str], expected: int, block: list[str], window: int, hunk_index: int
) -> int:
    """Find the unique position of `block` nearest to `expected`.

    Offsets are tried by growing absolute value; a simultaneous match at -k
    and +k rejects the hunk rather than guessing.
    """
    if not block:
        if 0 <= expected <= len(lines):
            return expected
        raise HunkRejected(hunk_index, HunkRejected.NO_MATCH)
    if _block_matches(lines, expected, block):
        return expected
    for k in range(1, window + 1):
        lo = _block_matches(lines, expected - k, block)
        hi = _block_matches(lines, expected + k, block)
        if lo and hi:
            raise HunkRejected(hunk_index, HunkRejected.AMBIGUOUS_MATCH)
        if lo:
            return expected - k
        if hi:
            return expected + k
    raise HunkRejected(hunk_index, HunkRejected.NO_MATCH)


def apply_patch(
    document: str, diff: UnifiedDiff, window: int = DEFAULT_FUZZY_WINDOW
) -> PatchOutcome:
    """Apply all hunks or none.

    Hunk positions are adjusted by the cumulative line delta of the hunks
    already applied, then fuzz-searched within ±window lines. Raises
    HunkRejected / AlreadyApplied without modifying the document.
    """
    if window < 0:
        raise ValueError("window must be >= 0")
    lines, trailing_newline = _split_document(document)
    delta = 0
    offsets: list[int] = []
    last_hunk = None
    last_end = -1

    for hunk_index, hunk in enumerate(diff.hunks):
        old_block = hunk.old_block()
        new_block = hunk.new_block()
        if hunk.old_len:
            expected = hunk.old_start - 1 + delta
        else:
            expected = hunk.old_start + delta  # insertion goes after old_start
        try:
            pos = _locate(lines, expected, old_block, window, hunk_index)
        except HunkRejected as rejection:
            if rejection.reason == HunkRejected.NO_MATCH and new_block and _block_matches(
                lines, expected, new_block
            ):
                raise AlreadyApplied(hunk_index) from None
            raise
        lines[pos : pos + len(old_block)] = new_block
        offsets.append(pos - expected)
        delta += hunk.new_len - hunk.old_len
        last_hunk = hunk
        last_end = pos + len(new_block)

    # A hunk whose new side reaches the document end decides the trailing
    # newline: unified-diff lines carry an implicit newline unless the
    # no-newline sentinel says otherwise.
    if last_hunk is not None and last_end == len(lines):
        trailing_newline = not last_hunk.new_missing_newline

    return PatchOutcome(
        new_document=_join_document(lines, trailing_newline),
        applied_hunks=len(diff.hunks),
        offsets=tuple(offsets),
    )
