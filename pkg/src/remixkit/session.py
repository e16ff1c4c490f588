"""Per-design session state: document versions, linear history, selection.

History is a single chain with a cursor. Committing after an undo truncates
the forward tail (no branching). Committed documents are immutable; undo and
redo only move the cursor.

Sessions can be persisted to an append-only line-delimited log. On replay,
the live chain of each session is rebuilt by following parent_id links
backward from its last committed record, which naturally drops versions that
were truncated away by commit-after-undo.
"""

from __future__ import annotations

import enum
import json
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, NamedTuple

from .corpus import CorpusManifest
from .errors import EmptyHistory, InvalidAnnotation, SessionNotFound, UnknownExampleId


class VersionSource(enum.Enum):
    CHAT = "chat"
    APPLY_GLOBAL = "apply_global"
    APPLY_LOCAL = "apply_local"
    MANUAL_EDIT = "manual_edit"


class SessionMode(enum.Enum):
    CHAT = "chat"
    SEARCH = "search"
    APPLY = "apply"


@dataclass(frozen=True)
class DesignVersion:
    version_id: int
    document: str
    created_by: VersionSource
    parent_id: int | None
    timestamp: float


@dataclass
class Session:
    session_id: str
    versions: list[DesignVersion] = field(default_factory=list)
    cursor: int = -1
    selection: tuple[str, object | None] | None = None  # (example_id, annotation)
    target_component: str | None = None
    mode: SessionMode = SessionMode.CHAT
    conversation: list[dict] = field(default_factory=list)
    next_version_id: int = 0

    @property
    def current_version(self) -> DesignVersion | None:
        if not self.versions:
            return None
        return self.versions[self.cursor]

    @property
    def current_document(self) -> str:
        version = self.current_version
        return version.document if version else ""

    @property
    def can_back(self) -> bool:
        return self.cursor > 0

    @property
    def can_forward(self) -> bool:
        return bool(self.versions) and self.cursor < len(self.versions) - 1


class NavResult(NamedTuple):
    version: DesignVersion
    at_boundary: bool


class SessionStore:
    """Owns all sessions; optionally journals commits to an append-only log."""

    def __init__(self, log_path: Path | None = None, clock: Callable[[], float] = time.time):
        self._sessions: dict[str, Session] = {}
        self._log_path = Path(log_path) if log_path else None
        self._clock = clock
        if self._log_path and self._log_path.exists():
            self._replay()

    def create_session(self, session_id: str | None = None) -> Session:
        session_id = session_id or uuid.uuid4().hex
        session = Session(session_id=session_id)
        self._sessions[session_id] = session
        return session

    def get(self, session_id: str) -> Session:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise SessionNotFound(session_id) from None

    def session_ids(self) -> list[str]:
        return list(self._sessions)

    def commit_version(
        self, session: Session, document: str, created_by: VersionSource
    ) -> DesignVersion:
        """Append a new version after the cursor, truncating any forward tail."""
        if session.session_id not in self._sessions:
            raise SessionNotFound(session.session_id)
        parent = session.current_version
        version = DesignVersion(
            version_id=session.next_version_id,
            document=document,
            created_by=created_by,
            parent_id=parent.version_id if parent else None,
            timestamp=self._clock(),
        )
        del session.versions[session.cursor + 1 :]
        session.versions.append(version)
        session.cursor = len(session.versions) - 1
        session.next_version_id += 1
        self._journal(session.session_id, version)
        return version

    def undo(self, session: Session) -> NavResult:
        if session.session_id not in self._sessions:
            raise SessionNotFound(session.session_id)
        if not session.versions:
            raise EmptyHistory(session.session_id)
        if session.cursor == 0:
            return NavResult(session.versions[0], at_boundary=True)
        session.cursor -= 1
        return NavResult(session.versions[session.cursor], at_boundary=False)

    def redo(self, session: Session) -> NavResult:
        if session.session_id not in self._sessions:
            raise SessionNotFound(session.session_id)
        if not session.versions:
            raise EmptyHistory(session.session_id)
        if session.cursor == len(session.versions) - 1:
            return NavResult(session.versions[session.cursor], at_boundary=True)
        session.cursor += 1
        return NavResult(session.versions[session.cursor], at_boundary=False)

    def select_for_apply(
        self,
        session: Session,
        example_id: str,
        corpus: CorpusManifest,
        annotation=None,
        target_component: str | None = None,
    ) -> Session:
        """Record a gallery selection and switch the session into apply mode."""
        if session.session_id not in self._sessions:
            raise SessionNotFound(session.session_id)
        if example_id not in corpus:
            raise UnknownExampleId(example_id)
        if annotation is not None:
            for stroke in annotation.strokes:
                for x, y in stroke:
                    if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
                        raise InvalidAnnotation(f"point ({x}, {y}) outside [0,1]^2")
        session.selection = (example_id, annotation)
        session.target_component = target_component
        session.mode = SessionMode.APPLY
        return session

    def log_event(self, session: Session, kind: str, payload: dict) -> None:
        session.conversation.append({"kind": kind, **payload})

    # --- persistence -------------------------------------------------------

    def _journal(self, session_id: str, version: DesignVersion) -> None:
        if self._log_path is None:
            return
        record = {
            "session_id": session_id,
            "version_id": version.version_id,
            "created_by": version.created_by.value,
            "parent_id": version.parent_id,
            "timestamp": version.timestamp,
            "document": version.document,
        }
        with open(self._log_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")

    def _replay(self) -> None:
        by_session: dict[str, dict[int, dict]] = {}
        order: dict[str, list[int]] = {}
        with open(self._log_path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                record = json.loads(line)
                sid = record["session_id"]
                by_session.setdefault(sid, {})[record["version_id"]] = record
                order.setdefault(sid, []).append(record["version_id"])
        for sid, records in by_session.items():
            chain: list[dict] = []
            cursor_id = order[sid][-1]  # last commit wins; walk its ancestry
            while cursor_id is not None:
                record = records[cursor_id]
                chain.append(record)
                cursor_id = record["parent_id"]
            chain.reverse()
            session = Session(session_id=sid)
            for record in chain:
                session.versions.append(
                    DesignVersion(
                        version_id=record["version_id"],
                        document=record["document"],
                        created_by=VersionSource(record["created_by"]),
                        parent_id=record["parent_id"],
                        timestamp=record["timestamp"],
                    )
                )
            session.cursor = len(session.versions) - 1
            session.next_version_id = max(records) + 1
            self._sessions[sid] = session
