"""HTTP surface of the engine plus server-side preview instrumentation.

Every engine error code maps to exactly one HTTP status in CODE_STATUS;
errors raised inside a remix pipeline arrive wrapped with their stage and
always map to 422. Mutating requests are serialized per session: a second
concurrent mutator gets 409 SESSION_BUSY instead of queueing behind a slow
generation.
"""

from __future__ import annotations

import mimetypes
import re
import threading
from dataclasses import dataclass
from html.parser import HTMLParser

from fastapi import FastAPI, Request
from fastapi.responses import HTMLResponse, JSONResponse, PlainTextResponse, Response
from pydantic import BaseModel

from .corpus import CorpusManifest
from .embedding import EmbeddingProviderConfig
from .errors import (
    EmptyHistory,
    EmptyQueryError,
    InvalidRequest,
    RemixError,
    RemixStageError,
    SessionBusy,
    UnknownExampleId,
)
from .index import VectorIndex
from .remix import Annotation, RemixMode, RemixRequest, execute_remix
from .retrieval import RetrievalQuery, RetrievalScope, search_examples
from .session import Session, SessionStore, VersionSource

# --- error mapping ----------------------------------------------------------

CODE_STATUS: dict[str, int] = {
    "FILE_NOT_FOUND": 500,
    "PARSE_ERROR": 500,
    "DUPLICATE_ID": 409,
    "VALIDATION_FAILED": 400,
    "ALL_CONTENT_TRIMMED": 400,
    "EMPTY_QUERY": 400,
    "PROVIDER_TIMEOUT": 504,
    "PROVIDER_ERROR": 502,
    "ZERO_VECTOR": 500,
    "DIMENSION_MISMATCH": 500,
    "IO_ERROR": 500,
    "CORRUPT_INDEX": 500,
    "UNKNOWN_EXAMPLE_ID": 404,
    "MALFORMED_HEADER": 422,
    "LINE_COUNT_MISMATCH": 422,
    "OVERLAPPING_HUNKS": 422,
    "MULTI_FILE_UNSUPPORTED": 422,
    "HUNK_REJECTED": 422,
    "ALREADY_APPLIED": 422,
    "INVALID_REQUEST": 400,
    "NO_PAYLOAD": 422,
    "PAYLOAD_KIND_MISMATCH": 422,
    "SESSION_NOT_FOUND": 404,
    "EMPTY_HISTORY": 409,
    "INVALID_ANNOTATION": 400,
    "SESSION_BUSY": 409,
    "NEGATIVE_GRADE": 400,
    "EMPTY_TEMPLATE_SET": 400,
    "INTERNAL": 500,
}


@dataclass(frozen=True)
class ApiError:
    code: str
    message: str
    http_status: int
    stage: str | None = None

    @classmethod
    def from_exception(cls, exc: RemixError) -> "ApiError":
        if isinstance(exc, RemixStageError):
            return cls(code=exc.code, message=str(exc), http_status=422, stage=exc.stage)
        return cls(
            code=exc.code,
            message=str(exc),
            http_status=CODE_STATUS.get(exc.code, 500),
            stage=None,
        )

    def to_response(self) -> JSONResponse:
        body = {"error": {"code": self.code, "message": self.message}}
        if self.stage:
            body["error"]["stage"] = self.stage
        return JSONResponse(status_code=self.http_status, content=body)


# --- preview instrumentation -------------------------------------------------

INSTR_BEGIN = "<!-- remix:instrumentation:begin -->"
INSTR_END = "<!-- remix:instrumentation:end -->"
_REMIX_ID_ATTR_RE = re.compile(r' data-remix-id="\d+"')

_INSTR_STYLE_AND_SCRIPT = """<style>
[data-remix-id].remix-selected { outline: 2px solid #e8452c; outline-offset: 1px; }
[data-remix-id]:hover { outline: 1px dashed #e8452c88; }
</style>
<script>
(function () {
  var selected = null;
  document.addEventListener("click", function (ev) {
    var el = ev.target.closest ? ev.target.closest("[data-remix-id]") : null;
    if (selected) selected.classList.remove("remix-selected");
    if (el) {
      selected = el;
      el.classList.add("remix-selected");
      parent.postMessage({ type: "remix-select", id: el.getAttribute("data-remix-id") }, "*");
    } else {
      selected = null;
      parent.postMessage({ type: "remix-select", id: null }, "*");
    }
    ev.preventDefault();
  }, true);
})();
</script>"""

INSTRUMENTATION_BLOCK = f"{INSTR_BEGIN}\n{_INSTR_STYLE_AND_SCRIPT}\n{INSTR_END}"


class _StartTagLocator(HTMLParser):
    """Records the raw-text span end of every start tag, in document order."""

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.insert_offsets: list[int] = []
        self._line_starts: list[int] = []

    def feed_document(self, text: str) -> list[int]:
        offset = 0
        self._line_starts = [0]
        for line in text.split("\n")[:-1]:
            offset += len(line) + 1
            self._line_starts.append(offset)
        self.feed(text)
        self.close()
        return self.insert_offsets

    def _record(self):
        line, col = self.getpos()
        start = self._line_starts[line - 1] + col
        raw = self.get_starttag_text() or ""
        trailer = 2 if raw.endswith("/>") else 1
        self.insert_offsets.append(start + len(raw) - trailer)

    def handle_starttag(self, tag, attrs):
        self._record()

    def handle_startendtag(self, tag, attrs):
        self._record()


def instrument_document(document: str) -> str:
    """Assign dense data-remix-id attributes (depth-first document order,
    zero-based) and inject the selection script. Idempotent."""
    if INSTR_BEGIN in document:
        return document
    offsets = _StartTagLocator().feed_document(document)
    pieces: list[str] = []
    previous = 0
    for element_index, offset in enumerate(offsets):
        pieces.append(document[previous:offset])
        pieces.append(f' data-remix-id="{element_index}"')
        previous = offset
    pieces.append(document[previous:])
    tagged = "".join(pieces)

    close_body = re.search(r"</body\s*>", tagged, re.IGNORECASE)
    if close_body:
        insert_at = close_body.start()
        return tagged[:insert_at] + INSTRUMENTATION_BLOCK + tagged[insert_at:]
    return tagged + INSTRUMENTATION_BLOCK


def strip_instrumentation(document: str) -> str:
    """Exact inverse of instrument_document for documents it produced."""
    begin = document.find(INSTR_BEGIN)
    if begin != -1:
        end = document.find(INSTR_END, begin)
        if end != -1:
            document = document[:begin] + document[end + len(INSTR_END) :]
    return _REMIX_ID_ATTR_RE.sub("", document)


# --- request bodies -----------------------------------------------------------

class CreateSessionBody(BaseModel):
    session_id: str | None = None


class ChatBody(BaseModel):
    query: str


class SearchBody(BaseModel):
    query: str
    scope: str = "whole_screen"
    limit: int | None = None


class ApplyBody(BaseModel):
    query: str
    example_id: str
    scope: str
    target_component_id: str | None = None
    annotation: dict | None = None


class CodeBody(BaseModel):
    document: str


def _annotation_from_json(payload: dict | None) -> Annotation | None:
    if payload is None:
        return None
    strokes = payload.get("strokes")
    if not isinstance(strokes, list):
        raise InvalidRequest("annotation must carry a strokes list")
    return Annotation(
        strokes=tuple(
            tuple((float(p[0]), float(p[1])) for p in stroke) for stroke in strokes
        )
    )


# --- application ---------------------------------------------------------------

def create_app(
    corpus: CorpusManifest,
    index: VectorIndex,
    embed_config: EmbeddingProviderConfig,
    generator,
    fuzzy_window: int = 20,
    store: SessionStore | None = None,
) -> FastAPI:
    app = FastAPI(title="remixkit", docs_url=None, redoc_url=None)
    store = store if store is not None else SessionStore()
    locks: dict[str, threading.Lock] = {}
    locks_guard = threading.Lock()

    def _mutation_lock(session_id: str) -> threading.Lock:
        with locks_guard:
            return locks.setdefault(session_id, threading.Lock())

    @app.exception_handler(RemixError)
    def _remix_error_handler(_request: Request, exc: RemixError):
        return ApiError.from_exception(exc).to_response()

    def _session_view(session: Session) -> dict:
        current = session.current_version
        return {
            "session_id": session.session_id,
            "mode": session.mode.value,
            "version_count": len(session.versions),
            "cursor": session.cursor,
            "can_back": session.can_back,
            "can_forward": session.can_forward,
            "current_version_id": current.version_id if current else None,
            "document": session.current_document,
            "selected_example_id": session.selection[0] if session.selection else None,
            "target_component_id": session.target_component,
        }

    def _version_view(session: Session, extra: dict | None = None) -> dict:
        current = session.current_version
        view = {
            "version_id": current.version_id if current else None,
            "document": session.current_document,
            "can_back": session.can_back,
            "can_forward": session.can_forward,
        }
        view.update(extra or {})
        return view

    def _example_view(example_id: str) -> dict:
        example = corpus.get(example_id)
        if example is None:
            raise UnknownExampleId(example_id)
        meta = example.metadata
        return {
            "example_id": example.example_id,
            "kind": example.kind.value,
            "image_url": f"/examples/{example.example_id}/image",
            "app_name": meta.app_name,
            "developer": meta.developer,
            "rating": meta.rating,
            "download_count": meta.download_count,
            "comment_count": meta.comment_count,
            "category": meta.category,
        }

    def _mutate(session_id: str):
        lock = _mutation_lock(session_id)
        if not lock.acquire(blocking=False):
            raise SessionBusy(session_id)
        return lock

    @app.post("/sessions")
    def create_session(body: CreateSessionBody | None = None):
        session = store.create_session(body.session_id if body else None)
        return {"session_id": session.session_id}

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return _session_view(store.get(session_id))

    @app.post("/sessions/{session_id}/search")
    def handle_search(session_id: str, body: SearchBody):
        session = store.get(session_id)
        try:
            scope = RetrievalScope(body.scope)
        except ValueError:
            raise InvalidRequest(f"unknown search scope {body.scope!r}") from None
        query = RetrievalQuery(
            text=body.query, scope=scope, limit=body.limit if body.limit else 10
        )
        results = search_examples(query, index, corpus, embed_config)
        store.log_event(session, "search", {"query": body.query, "scope": scope.value})
        return {
            "results": [
                dict(
                    _example_view(r.example.example_id),
                    similarity=r.similarity,
                    rank=r.rank,
                )
                for r in results
            ]
        }

    @app.post("/sessions/{session_id}/chat")
    def handle_chat(session_id: str, body: ChatBody):
        session = store.get(session_id)
        if not body.query.strip():
            raise EmptyQueryError("query must be non-empty")
        lock = _mutate(session_id)
        try:
            request = RemixRequest(
                mode=RemixMode.CHAT,
                query=body.query,
                current_code=session.current_document,
            )
            version = execute_remix(request, generator, store, session, fuzzy_window)
            store.log_event(session, "chat", {"query": body.query})
            return _version_view(session, {"version_id": version.version_id})
        finally:
            lock.release()

    @app.post("/sessions/{session_id}/apply")
    def handle_apply(session_id: str, body: ApplyBody):
        session = store.get(session_id)
        if body.scope not in ("global", "local"):
            raise InvalidRequest(f"apply scope must be global or local, got {body.scope!r}")
        if not body.query.strip():
            raise EmptyQueryError("query must be non-empty")
        example = corpus.get(body.example_id)
        if example is None:
            raise UnknownExampleId(body.example_id)
        annotation = _annotation_from_json(body.annotation)
        lock = _mutate(session_id)
        try:
            store.select_for_apply(
                session,
                body.example_id,
                corpus,
                annotation=annotation,
                target_component=body.target_component_id,
            )
            mode = RemixMode.APPLY_GLOBAL if body.scope == "global" else RemixMode.APPLY_LOCAL
            request = RemixRequest(
                mode=mode,
                query=body.query,
                current_code=session.current_document,
                reference=example,
                annotation=annotation if mode is RemixMode.APPLY_LOCAL else None,
                target_component_id=body.target_component_id,
            )
            version = execute_remix(request, generator, store, session, fuzzy_window)
            store.log_event(
                session, "apply", {"query": body.query, "scope": body.scope,
                                   "example_id": body.example_id},
            )
            return _version_view(session, {"version_id": version.version_id})
        finally:
            lock.release()

    @app.post("/sessions/{session_id}/undo")
    def handle_undo(session_id: str):
        session = store.get(session_id)
        lock = _mutate(session_id)
        try:
            result = store.undo(session)
            return _version_view(session, {"at_boundary": result.at_boundary})
        finally:
            lock.release()

    @app.post("/sessions/{session_id}/redo")
    def handle_redo(session_id: str):
        session = store.get(session_id)
        lock = _mutate(session_id)
        try:
            result = store.redo(session)
            return _version_view(session, {"at_boundary": result.at_boundary})
        finally:
            lock.release()

    @app.post("/sessions/{session_id}/code")
    def commit_code(session_id: str, body: CodeBody):
        session = store.get(session_id)
        lock = _mutate(session_id)
        try:
            version = store.commit_version(session, body.document, VersionSource.MANUAL_EDIT)
            return _version_view(session, {"version_id": version.version_id})
        finally:
            lock.release()

    @app.get("/sessions/{session_id}/preview", response_class=HTMLResponse)
    def serve_preview(session_id: str):
        session = store.get(session_id)
        if not session.versions:
            raise EmptyHistory(session_id)
        return HTMLResponse(instrument_document(session.current_document))

    @app.get("/sessions/{session_id}/code", response_class=PlainTextResponse)
    def get_code(session_id: str):
        session = store.get(session_id)
        if not session.versions:
            raise EmptyHistory(session_id)
        return PlainTextResponse(session.current_document)

    @app.get("/examples/{example_id}")
    def get_example(example_id: str):
        return _example_view(example_id)

    @app.get("/examples/{example_id}/image")
    def get_example_image(example_id: str):
        example = corpus.get(example_id)
        if example is None:
            raise UnknownExampleId(example_id)
        media_type = mimetypes.guess_type(str(example.image_path))[0] or "image/png"
        with open(example.image_path, "rb") as fh:
            return Response(content=fh.read(), media_type=media_type)

    return app
