"""Mode orchestration: prompt assembly, generation, parsing, document update.

Three modes drive the document. Chat and local apply ask the generator for a
unified diff (small targeted edits, fast turnaround); global apply asks for
a full replacement document. The mode decides the expected payload kind and
the prompt contents:

    CHAT         query + current code                      -> diff patch
    APPLY_GLOBAL query + current code + reference image    -> full document
    APPLY_LOCAL  query + current code + component id
                 + annotated reference image               -> diff patch

Prompt section labels are fixed strings; tests and remote generators key on
them: QUERY, CURRENT_CODE, TARGET_COMPONENT, ANNOTATION_BBOX, INSTRUCTIONS.
"""

from __future__ import annotations

import base64
import enum
import hashlib
import io
import os
import re
from dataclasses import dataclass

import httpx
from PIL import Image, ImageDraw

from .corpus import UiExample
from .diffpatch import DEFAULT_FUZZY_WINDOW, apply_patch, parse_unified_diff
from .errors import (
    InvalidAnnotation,
    InvalidRequest,
    NoPayload,
    PayloadKindMismatch,
    ProviderError,
    ProviderTimeout,
    RemixError,
    RemixStageError,
)
from .session import DesignVersion, Session, SessionStore, VersionSource

GEN_ENDPOINT_ENV_VAR = "REMIX_GEN_ENDPOINT"

SECTION_QUERY = "QUERY"
SECTION_CURRENT_CODE = "CURRENT_CODE"
SECTION_TARGET_COMPONENT = "TARGET_COMPONENT"
SECTION_ANNOTATION_BBOX = "ANNOTATION_BBOX"
SECTION_INSTRUCTIONS = "INSTRUCTIONS"

REFERENCE_IMAGE_LABEL = "reference"

STROKE_WIDTH = 3
STROKE_COLOR = (255, 0, 0)

_FENCE_RE = re.compile(r"```[^\n]*\n(.*?)```", re.DOTALL)

_INSTRUCTIONS = {
    "diff": (
        "Edit the current UI document. Reply with a single unified diff "
        "(optionally fenced) that applies to CURRENT_CODE."
    ),
    "full": (
        "Rewrite the entire UI document, adapting the reference example as "
        "requested. Reply with the complete new document."
    ),
}


class RemixMode(enum.Enum):
    CHAT = "chat"
    APPLY_GLOBAL = "apply_global"
    APPLY_LOCAL = "apply_local"


class PayloadKind(enum.Enum):
    FULL_DOCUMENT = "full"
    DIFF_PATCH = "diff"


_MODE_SOURCE = {
    RemixMode.CHAT: VersionSource.CHAT,
    RemixMode.APPLY_GLOBAL: VersionSource.APPLY_GLOBAL,
    RemixMode.APPLY_LOCAL: VersionSource.APPLY_LOCAL,
}


@dataclass(frozen=True)
class Annotation:
    """Freehand strokes in normalized [0,1]^2 image coordinates."""

    strokes: tuple[tuple[tuple[float, float], ...], ...]

    def __post_init__(self):
        points = [p for stroke in self.strokes for p in stroke]
        if not points:
            raise InvalidAnnotation("annotation needs at least one point")
        for x, y in points:
            if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
                raise InvalidAnnotation(f"annotation point ({x}, {y}) outside [0,1]^2")

    @property
    def bbox(self) -> tuple[float, float, float, float]:
        points = [p for stroke in self.strokes for p in stroke]
        xs = [p[0] for p in points]
        ys = [p[1] for p in points]
        return (min(xs), min(ys), max(xs), max(ys))


@dataclass(frozen=True)
class RemixRequest:
    mode: RemixMode
    query: str
    current_code: str = ""
    reference: UiExample | None = None
    annotation: Annotation | None = None
    target_component_id: str | None = None

    def __post_init__(self):
        if self.mode is RemixMode.CHAT and self.reference is not None:
            raise InvalidRequest("chat mode forbids a reference example")
        if self.mode is RemixMode.APPLY_GLOBAL and self.reference is None:
            raise InvalidRequest("global apply requires a reference example")
        if self.mode is RemixMode.APPLY_LOCAL:
            if self.reference is None:
                raise InvalidRequest("local apply requires a reference example")
            if not self.target_component_id:
                raise InvalidRequest("local apply requires a target component id")


@dataclass(frozen=True)
class StructuredPrompt:
    text_sections: tuple[tuple[str, str], ...]
    image_attachments: tuple[tuple[str, bytes], ...]
    expected_output: PayloadKind

    def section(self, label: str) -> str | None:
        for name, text in self.text_sections:
            if name == label:
                return text
        return None


@dataclass(frozen=True)
class GeneratorResponse:
    raw_text: str
    extracted_payload: str
    payload_kind: PayloadKind


def composite_annotation(image_bytes: bytes, annotation: Annotation) -> bytes:
    """Draw the annotation strokes as an opaque red overlay onto the image.

    Pixels further than the stroke width from every stroke are untouched.
    """
    with Image.open(io.BytesIO(image_bytes)) as img:
        canvas = img.convert("RGB")
    draw = ImageDraw.Draw(canvas)
    w, h = canvas.width, canvas.height
    for stroke in annotation.strokes:
        pixels = [
            (round(x * (w - 1)), round(y * (h - 1))) for x, y in stroke
        ]
        if len(pixels) == 1:
            x, y = pixels[0]
            draw.ellipse([x - 1, y - 1, x + 1, y + 1], fill=STROKE_COLOR)
        else:
            draw.line(pixels, fill=STROKE_COLOR, width=STROKE_WIDTH)
            # Round the joints so sharp turns stay within the stroke radius.
            for x, y in pixels:
                draw.ellipse([x - 1, y - 1, x + 1, y + 1], fill=STROKE_COLOR)
    out = io.BytesIO()
    canvas.save(out, format="PNG")
    return out.getvalue()


def assemble_prompt(request: RemixRequest) -> StructuredPrompt:
    """Build the structured prompt for a valid request.

    The CURRENT_CODE section is always present, even when empty (the first
    chat call starts from an empty document).
    """
    sections: list[tuple[str, str]] = [
        (SECTION_QUERY, request.query),
        (SECTION_CURRENT_CODE, request.current_code),
    ]
    attachments: list[tuple[str, bytes]] = []

    if request.mode is RemixMode.APPLY_LOCAL:
        sections.append((SECTION_TARGET_COMPONENT, request.target_component_id))
        if request.annotation is not None:
            bbox = request.annotation.bbox
            sections.append(
                (SECTION_ANNOTATION_BBOX, " ".join(f"{v:.6f}" for v in bbox))
            )

    if request.mode in (RemixMode.APPLY_GLOBAL, RemixMode.APPLY_LOCAL):
        with open(request.reference.image_path, "rb") as fh:
            image_bytes = fh.read()
        if request.mode is RemixMode.APPLY_LOCAL and request.annotation is not None:
            image_bytes = composite_annotation(image_bytes, request.annotation)
        attachments.append((REFERENCE_IMAGE_LABEL, image_bytes))

    expected = (
        PayloadKind.FULL_DOCUMENT
        if request.mode is RemixMode.APPLY_GLOBAL
        else PayloadKind.DIFF_PATCH
    )
    sections.append((SECTION_INSTRUCTIONS, _INSTRUCTIONS[expected.value]))
    return StructuredPrompt(
        text_sections=tuple(sections),
        image_attachments=tuple(attachments),
        expected_output=expected,
    )


def parse_generator_response(raw: str, expected: PayloadKind) -> GeneratorResponse:
    """Extract the payload: first fenced code block, else the whole text.

    A DIFF_PATCH payload must parse as a unified diff with at least one hunk;
    prose without a diff is a kind mismatch, not a silent no-op.
    """
    if raw is None or not raw.strip():
        raise NoPayload("generator returned empty text")
    match = _FENCE_RE.search(raw)
    payload = match.group(1) if match else raw.strip()
    if not payload.strip():
        raise NoPayload("extracted payload is empty")
    if expected is PayloadKind.DIFF_PATCH:
        try:
            diff = parse_unified_diff(payload)
        except RemixError as exc:
            raise PayloadKindMismatch(f"expected a diff patch: {exc}") from exc
        if not diff.hunks:
            raise PayloadKindMismatch("expected a diff patch, found no hunks")
    return GeneratorResponse(raw_text=raw, extracted_payload=payload, payload_kind=expected)


def prompt_fingerprint(prompt: StructuredPrompt) -> str:
    """Stable hash of the assembled prompt; scripted mocks key on this."""
    h = hashlib.sha256()
    for label, text in prompt.text_sections:
        h.update(label.encode("utf-8") + b"\0" + text.encode("utf-8") + b"\0")
    for label, blob in prompt.image_attachments:
        h.update(label.encode("utf-8") + b"\0" + hashlib.sha256(blob).digest())
    h.update(prompt.expected_output.value.encode("ascii"))
    return h.hexdigest()


class ScriptedGenerator:
    """Offline generator keyed by prompt fingerprint, with optional fallback.

    The fallback is either one text or a mapping keyed by expected payload
    kind ("full" / "diff"), so a single mock can serve all three modes.
    """

    def __init__(
        self,
        script: dict[str, str] | None = None,
        default_response: str | dict[str, str] | None = None,
    ):
        self._script = dict(script or {})
        self._default = default_response

    def respond_to(self, prompt: StructuredPrompt, text: str) -> None:
        self._script[prompt_fingerprint(prompt)] = text

    def generate(self, prompt: StructuredPrompt) -> str:
        key = prompt_fingerprint(prompt)
        if key in self._script:
            return self._script[key]
        if isinstance(self._default, dict):
            kind = prompt.expected_output.value
            if kind in self._default:
                return self._default[kind]
        elif self._default is not None:
            return self._default
        raise ProviderError(None, f"no scripted response for prompt {key[:12]}")


class RemoteGenerator:
    """HTTP generator speaking the `/generate` wire contract."""

    def __init__(
        self,
        endpoint: str | None = None,
        timeout: float = 120.0,
        transport: httpx.BaseTransport | None = None,
    ):
        self._endpoint = endpoint
        self._timeout = timeout
        self._transport = transport

    def _resolved_endpoint(self) -> str:
        endpoint = os.environ.get(GEN_ENDPOINT_ENV_VAR) or self._endpoint
        if not endpoint:
            raise ProviderError(None, "no generator endpoint configured")
        return endpoint

    def generate(self, prompt: StructuredPrompt) -> str:
        body = {
            "sections": [
                {"label": label, "text": text} for label, text in prompt.text_sections
            ],
            "images": [
                {"label": label, "base64": base64.b64encode(blob).decode("ascii")}
                for label, blob in prompt.image_attachments
            ],
            "expected": prompt.expected_output.value,
        }
        try:
            with httpx.Client(transport=self._transport, timeout=self._timeout) as client:
                response = client.post(self._resolved_endpoint(), json=body)
        except httpx.TimeoutException as exc:
            raise ProviderTimeout(str(exc)) from exc
        except httpx.HTTPError as exc:
            raise ProviderError(None, str(exc)) from exc
        if response.status_code != 200:
            raise ProviderError(response.status_code, response.text)
        try:
            return response.json()["text"]
        except (KeyError, ValueError) as exc:
            raise ProviderError(response.status_code, response.text) from exc


def execute_remix(
    request: RemixRequest,
    generator,
    store: SessionStore,
    session: Session,
    fuzzy_window: int | None = None,
) -> DesignVersion:
    """Run one full remix cycle and commit exactly one new version.

    Any failure is re-raised with its pipeline stage attached and leaves the
    session history and current document untouched.
    """
    window = DEFAULT_FUZZY_WINDOW if fuzzy_window is None else fuzzy_window

    try:
        prompt = assemble_prompt(request)
    except RemixError as exc:
        raise RemixStageError("PROMPT", exc) from exc

    try:
        raw = generator.generate(prompt)
    except RemixError as exc:
        raise RemixStageError("GENERATE", exc) from exc

    try:
        response = parse_generator_response(raw, prompt.expected_output)
    except RemixError as exc:
        raise RemixStageError("PARSE", exc) from exc

    if response.payload_kind is PayloadKind.FULL_DOCUMENT:
        new_document = response.extracted_payload
    else:
        try:
            diff = parse_unified_diff(response.extracted_payload)
            outcome = apply_patch(session.current_document, diff, window=window)
        except RemixError as exc:
            raise RemixStageError("PATCH", exc) from exc
        new_document = outcome.new_document

    return store.commit_version(session, new_document, _MODE_SOURCE[request.mode])
