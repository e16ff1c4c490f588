#!/usr/bin/env python3
"""Generate a synthetic screenshot corpus for offline runs.

Draws simple phone-screen mockups (header bar, content blocks, action
button) plus a few component crops, and writes the matching manifest so
`remixkit ingest` / `index` / `serve` work end to end without any real
dataset.
"""

from __future__ import annotations

import argparse
import json
import random
from pathlib import Path

from PIL import Image, ImageDraw

CATEGORIES = ["Food", "Travel", "News", "Fitness", "Banking", "Music", "Education"]
PALETTES = [
    ((244, 67, 54), (255, 235, 238)),
    ((33, 150, 243), (227, 242, 253)),
    ((76, 175, 80), (232, 245, 233)),
    ((255, 193, 7), (255, 248, 225)),
    ((156, 39, 176), (243, 229, 245)),
    ((0, 150, 136), (224, 242, 241)),
    ((96, 125, 139), (236, 239, 241)),
]


def draw_screen(rng: random.Random, width=180, height=320) -> Image.Image:
    accent, background = rng.choice(PALETTES)
    img = Image.new("RGB", (width, height), background)
    draw = ImageDraw.Draw(img)
    draw.rectangle([0, 0, width, 36], fill=accent)  # header bar
    y = 48
    for _ in range(rng.randint(3, 6)):  # content cards
        h = rng.randint(24, 48)
        draw.rectangle([10, y, width - 10, y + h], fill=(255, 255, 255), outline=accent)
        y += h + 10
        if y > height - 60:
            break
    draw.rounded_rectangle(  # action button
        [width // 4, height - 44, 3 * width // 4, height - 16],
        radius=8,
        fill=accent,
    )
    return img


def draw_component(rng: random.Random) -> Image.Image:
    accent, background = rng.choice(PALETTES)
    img = Image.new("RGB", (120, 48), background)
    draw = ImageDraw.Draw(img)
    draw.rounded_rectangle([8, 8, 112, 40], radius=12, fill=accent)
    return img


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("fixture_corpus"))
    parser.add_argument("--screens", type=int, default=24)
    parser.add_argument("--components", type=int, default=8)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    images_dir = args.out / "raw"
    images_dir.mkdir(parents=True, exist_ok=True)
    lines = []
    for i in range(args.screens):
        name = f"screen-{i:03d}.png"
        draw_screen(rng).save(images_dir / name)
        category = rng.choice(CATEGORIES)
        lines.append(
            json.dumps(
                {
                    "example_id": f"screen-{i:03d}",
                    "image_path": f"raw/{name}",
                    "kind": "whole_screen",
                    "app_name": f"{category} Demo {i}",
                    "developer": f"Studio {i % 5}",
                    "rating": round(3.0 + rng.random() * 2.0, 1),
                    "download_count": rng.randrange(10_000, 5_000_000),
                    "comment_count": rng.randrange(10, 20_000),
                    "category": category,
                }
            )
        )
    for i in range(args.components):
        name = f"component-{i:03d}.png"
        draw_component(rng).save(images_dir / name)
        lines.append(
            json.dumps(
                {
                    "example_id": f"component-{i:03d}",
                    "image_path": f"raw/{name}",
                    "kind": "component_crop",
                    "app_name": f"Component Source {i}",
                    "developer": f"Studio {i % 3}",
                    "rating": round(3.5 + rng.random() * 1.5, 1),
                    "download_count": rng.randrange(10_000, 900_000),
                    "comment_count": rng.randrange(10, 4_000),
                    "category": rng.choice(CATEGORIES),
                }
            )
        )
    manifest = args.out / "manifest.jsonl"
    manifest.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {args.screens} screens + {args.components} components to {args.out}")
    print(f"manifest: {manifest}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
