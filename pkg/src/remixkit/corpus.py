"""Corpus ingestion: manifest parsing, record validation, border trimming.

The corpus is a set of UI screenshots (whole screens and component crops)
plus app-store metadata, stored as a line-delimited JSON manifest next to
the image files. Relative image paths resolve against the manifest's
directory so a corpus directory can be moved or copied wholesale.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import (
    AllContentTrimmed,
    DuplicateIdError,
    FileNotFoundInput,
    ManifestParseError,
    ValidationFailed,
)

SCHEMA_VERSION = 1
DEFAULT_LUMINANCE_THRESHOLD = 8

MANIFEST_FIELDS = (
    "example_id",
    "image_path",
    "kind",
    "app_name",
    "developer",
    "rating",
    "download_count",
    "comment_count",
    "category",
)


class ExampleKind(enum.Enum):
    WHOLE_SCREEN = "whole_screen"
    COMPONENT_CROP = "component_crop"


@dataclass(frozen=True)
class AppMetadata:
    app_name: str
    developer: str
    rating: float
    download_count: int
    comment_count: int
    category: str


@dataclass(frozen=True)
class UiExample:
    example_id: str
    image_path: Path
    metadata: AppMetadata
    kind: ExampleKind


@dataclass
class CorpusManifest:
    records: list[UiExample] = field(default_factory=list)
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        self._by_id = {r.example_id: r for r in self.records}

    def __len__(self) -> int:
        return len(self.records)

    def __contains__(self, example_id: str) -> bool:
        return example_id in self._by_id

    def get(self, example_id: str) -> UiExample | None:
        return self._by_id.get(example_id)


@dataclass(frozen=True)
class FieldError:
    field: str
    message: str


def validate_example(record: UiExample) -> list[FieldError]:
    """Check all record invariants; returns field errors, empty when valid.

    Never raises: a broken image or missing file becomes a field error on
    ``image_path``.
    """
    errors: list[FieldError] = []
    if not record.example_id:
        errors.append(FieldError("example_id", "must be non-empty"))
    meta = record.metadata
    if not meta.app_name:
        errors.append(FieldError("app_name", "must be non-empty"))
    if not meta.developer:
        errors.append(FieldError("developer", "must be non-empty"))
    if not (0.0 <= meta.rating <= 5.0):
        errors.append(FieldError("rating", f"{meta.rating} outside [0.0, 5.0]"))
    if meta.download_count < 0:
        errors.append(FieldError("download_count", "must be >= 0"))
    if meta.comment_count < 0:
        errors.append(FieldError("comment_count", "must be >= 0"))
    if not isinstance(record.kind, ExampleKind):
        errors.append(FieldError("kind", f"unknown kind {record.kind!r}"))
    try:
        with Image.open(record.image_path) as img:
            if img.width < 1 or img.height < 1:
                errors.append(FieldError("image_path", "image has zero extent"))
    except (FileNotFoundError, UnidentifiedImageError, OSError) as exc:
        errors.append(FieldError("image_path", f"not a decodable image: {exc}"))
    return errors


def _record_from_json(obj: dict, base_dir: Path) -> UiExample:
    missing = [f for f in MANIFEST_FIELDS if f not in obj]
    if missing:
        raise KeyError(missing[0])
    image_path = Path(obj["image_path"])
    if not image_path.is_absolute():
        image_path = base_dir / image_path
    return UiExample(
        example_id=str(obj["example_id"]),
        image_path=image_path,
        kind=ExampleKind(obj["kind"]),
        metadata=AppMetadata(
            app_name=str(obj["app_name"]),
            developer=str(obj["developer"]),
            rating=float(obj["rating"]),
            download_count=int(obj["download_count"]),
            comment_count=int(obj["comment_count"]),
            category=str(obj["category"]),
        ),
    )


def read_manifest_records(path: Path) -> tuple[int, list[tuple[int, UiExample]]]:
    """Parse a manifest file without validating images.

    Returns ``(schema_version, [(line_no, record), ...])`` in file order.
    A leading header line carrying only ``schema_version`` is optional.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundInput(str(path))
    base_dir = path.parent
    records: list[tuple[int, UiExample]] = []
    schema_version = SCHEMA_VERSION
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ManifestParseError(line_no, exc.msg) from exc
            if not isinstance(obj, dict):
                raise ManifestParseError(line_no, "record must be an object")
            if line_no == 1 and set(obj) == {"schema_version"}:
                schema_version = int(obj["schema_version"])
                continue
            try:
                records.append((line_no, _record_from_json(obj, base_dir)))
            except (KeyError, ValueError, TypeError) as exc:
                raise ManifestParseError(line_no, str(exc)) from exc
    return schema_version, records


def load_manifest(path: Path) -> CorpusManifest:
    """Load and fully validate a manifest; raises on the first bad record."""
    schema_version, numbered = read_manifest_records(path)
    seen: set[str] = set()
    records: list[UiExample] = []
    for _line_no, record in numbered:
        if record.example_id in seen:
            raise DuplicateIdError(record.example_id)
        seen.add(record.example_id)
        errors = validate_example(record)
        if errors:
            first = errors[0]
            raise ValidationFailed(record.example_id, first.field, first.message)
        records.append(record)
    return CorpusManifest(records=records, schema_version=schema_version)


def save_manifest(manifest: CorpusManifest, path: Path) -> None:
    """Write a manifest with image paths stored relative to ``path``'s directory
    where possible, so load_manifest(save_manifest(m)) round-trips."""
    path = Path(path)
    base_dir = path.parent.resolve()
    lines = [json.dumps({"schema_version": manifest.schema_version})]
    for record in manifest.records:
        image_path = record.image_path
        try:
            stored = str(Path(image_path).resolve().relative_to(base_dir))
        except ValueError:
            stored = str(image_path)
        meta = record.metadata
        lines.append(
            json.dumps(
                {
                    "example_id": record.example_id,
                    "image_path": stored,
                    "kind": record.kind.value,
                    "app_name": meta.app_name,
                    "developer": meta.developer,
                    "rating": meta.rating,
                    "download_count": meta.download_count,
                    "comment_count": meta.comment_count,
                    "category": meta.category,
                },
                ensure_ascii=False,
            )
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def luminance_map(image: Image.Image) -> np.ndarray:
    """Integer luminance per pixel: round(0.299 R + 0.587 G + 0.114 B)."""
    rgb = np.asarray(image.convert("RGB"), dtype=np.float64)
    return np.rint(rgb[..., 0] * 0.299 + rgb[..., 1] * 0.587 + rgb[..., 2] * 0.114)


def trim_borders(
    image: Image.Image, luminance_threshold: int = DEFAULT_LUMINANCE_THRESHOLD
) -> Image.Image:
    """Crop away maximal edge rows/columns that are entirely at or below the
    luminance threshold.

    Idempotent: the surviving rectangle's border rows/columns each contain at
    least one pixel above the threshold.
    """
    lum = luminance_map(image)
    bright = lum > luminance_threshold
    rows = np.flatnonzero(bright.any(axis=1))
    cols = np.flatnonzero(bright.any(axis=0))
    if rows.size == 0:
        raise AllContentTrimmed(f"no pixel above luminance {luminance_threshold}")
    top, bottom = int(rows[0]), int(rows[-1])
    left, right = int(cols[0]), int(cols[-1])
    if (top, left, bottom, right) == (0, 0, image.height - 1, image.width - 1):
        return image
    return image.crop((left, top, right + 1, bottom + 1))


def with_image_path(record: UiExample, image_path: Path) -> UiExample:
    return replace(record, image_path=Path(image_path))
