from __future__ import annotations

import io
import json
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

from remixkit.corpus import AppMetadata, CorpusManifest, ExampleKind, UiExample


def make_image(width: int, height: int, color=(255, 255, 255)) -> Image.Image:
    return Image.new("RGB", (width, height), color)


def save_png(image: Image.Image, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    image.save(path, format="PNG")
    return path


def framed_image(width: int, height: int, border: int, inner=(255, 255, 255),
                 frame=(0, 0, 0)) -> Image.Image:
    img = Image.new("RGB", (width, height), frame)
    inner_img = Image.new("RGB", (width - 2 * border, height - 2 * border), inner)
    img.paste(inner_img, (border, border))
    return img


def make_example(
    example_id: str,
    image_path: Path,
    kind: ExampleKind = ExampleKind.WHOLE_SCREEN,
    app_name: str = "Fixture App",
    developer: str = "Fixture Dev",
    rating: float = 4.2,
    download_count: int = 1000,
    comment_count: int = 50,
    category: str = "Food",
) -> UiExample:
    return UiExample(
        example_id=example_id,
        image_path=Path(image_path),
        kind=kind,
        metadata=AppMetadata(
            app_name=app_name,
            developer=developer,
            rating=rating,
            download_count=download_count,
            comment_count=comment_count,
            category=category,
        ),
    )


def manifest_line(example_id: str, image_path: str, kind: str = "whole_screen",
                  **overrides) -> str:
    record = {
        "example_id": example_id,
        "image_path": image_path,
        "kind": kind,
        "app_name": "Fixture App",
        "developer": "Fixture Dev",
        "rating": 4.2,
        "download_count": 1000,
        "comment_count": 50,
        "category": "Food",
    }
    record.update(overrides)
    return json.dumps(record)


def distinct_color(i: int) -> tuple[int, int, int]:
    return ((i * 37) % 256, (i * 91 + 40) % 256, (i * 53 + 80) % 256)


@pytest.fixture
def fixture_corpus(tmp_path) -> CorpusManifest:
    """12 whole-screen examples plus 3 component crops, visually distinct."""
    records = []
    for i in range(12):
        path = save_png(
            make_image(24, 40, distinct_color(i)), tmp_path / f"screens/ws-{i:02d}.png"
        )
        records.append(
            make_example(
                f"ws-{i:02d}", path,
                category=["Food", "Travel", "News"][i % 3],
                rating=3.0 + (i % 5) * 0.5,
                download_count=1000 * (i + 1),
                comment_count=10 * i,
            )
        )
    for i in range(3):
        path = save_png(
            make_image(16, 8, distinct_color(100 + i)), tmp_path / f"crops/cc-{i:02d}.png"
        )
        records.append(
            make_example(f"cc-{i:02d}", path, kind=ExampleKind.COMPONENT_CROP)
        )
    return CorpusManifest(records=records)


def brute_force_top_k(ids, vectors, query, k):
    """Independent O(n*d) scan with the same tie rule as the index contract."""
    query = np.asarray(query, dtype=np.float64)
    scored = []
    for example_id, vector in zip(ids, vectors):
        score = float(np.dot(np.asarray(vector, dtype=np.float64), query))
        scored.append((example_id, score))
    scored.sort(key=lambda t: (-t[1], t[0]))
    return scored[:k]


def png_bytes(image: Image.Image) -> bytes:
    buf = io.BytesIO()
    image.save(buf, format="PNG")
    return buf.getvalue()


# --- unified-diff reference oracle (difflib-based, independent of diffpatch) ---

def split_lines(text: str) -> list[str]:
    """Logical lines of a document, tolerant of a missing final newline."""
    if text == "":
        return []
    lines = text.split("\n")
    if lines[-1] == "":
        lines.pop()
    return lines


def reference_diff(old: str, new: str, context: int = 3) -> str:
    """Independent oracle: difflib-produced unified diff between two texts.

    Newline-agnostic (no no-newline sentinels); the sentinel paths are
    exercised by hand-written diffs.
    """
    import difflib

    lines = difflib.unified_diff(
        split_lines(old), split_lines(new), fromfile="a", tofile="b", lineterm="", n=context
    )
    text = "\n".join(lines)
    return text + "\n" if text else ""


def random_document(rng, n_lines: int) -> str:
    return "".join(f"line-{i}-{rng.randrange(10**6)}\n" for i in range(n_lines))


def random_edit(rng, doc: str) -> str:
    lines = doc.split("\n")[:-1]
    edited = list(lines)
    for _ in range(rng.randint(1, 4)):
        op = rng.choice(["insert", "delete", "replace"])
        if op == "insert" or not edited:
            pos = rng.randint(0, len(edited))
            edited.insert(pos, f"new-{rng.randrange(10**6)}")
        elif op == "delete":
            del edited[rng.randrange(len(edited))]
        else:
            edited[rng.randrange(len(edited))] = f"repl-{rng.randrange(10**6)}"
    return "".join(line + "\n" for line in edited)
