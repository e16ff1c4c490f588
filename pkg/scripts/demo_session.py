#!/usr/bin/env python3
"""Walk one full design loop in-process with offline providers.

Builds a tiny corpus, indexes it with the deterministic mock embedder,
then drives chat -> search -> global apply -> local apply -> undo against
the engine and prints each state transition. Useful as a smoke run and as
executable documentation of the mode contract.
"""

from __future__ import annotations

import difflib
import sys
import tempfile
from pathlib import Path

from remixkit.corpus import CorpusManifest
from remixkit.embedding import EmbeddingProviderConfig, embed_image_file
from remixkit.index import IndexRecord, VectorIndex
from remixkit.remix import Annotation, RemixMode, RemixRequest, execute_remix
from remixkit.retrieval import RetrievalQuery, search_examples
from remixkit.session import SessionStore

sys.path.insert(0, str(Path(__file__).parent))
from make_fixture_corpus import draw_component, draw_screen  # noqa: E402

import random  # noqa: E402

from remixkit.corpus import AppMetadata, ExampleKind, UiExample  # noqa: E402


class EchoGenerator:
    """Offline generator: appends a line for diff modes, rewrites for global."""

    def generate(self, prompt):
        sections = dict(prompt.text_sections)
        code = sections["CURRENT_CODE"]
        query = sections["QUERY"]
        if prompt.expected_output.value == "full":
            return f"<html><body><h1>{query}</h1></body></html>"
        lines = code.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        new_lines = lines + [f"<p>{query}</p>"]
        diff = "\n".join(
            difflib.unified_diff(lines, new_lines, lineterm="", fromfile="a", tofile="b")
        )
        return f"```diff\n{diff}\n```"


def build_engine(workdir: Path):
    rng = random.Random(7)
    config = EmbeddingProviderConfig(dimension=128)
    records = []
    index = VectorIndex(config.dimension)
    for i in range(8):
        kind = ExampleKind.WHOLE_SCREEN if i < 6 else ExampleKind.COMPONENT_CROP
        image = draw_screen(rng) if i < 6 else draw_component(rng)
        path = workdir / f"demo-{i}.png"
        image.save(path)
        record = UiExample(
            example_id=f"demo-{i}",
            image_path=path,
            kind=kind,
            metadata=AppMetadata(
                app_name=f"Demo App {i}",
                developer=f"Studio {i % 3}",
                rating=4.0,
                download_count=100_000 * (i + 1),
                comment_count=500 * (i + 1),
                category="Food",
            ),
        )
        records.append(record)
        index.add(IndexRecord(record.example_id, embed_image_file(path, config)))
    return CorpusManifest(records=records), index, config


def main() -> int:
    with tempfile.TemporaryDirectory() as tmp:
        corpus, index, config = build_engine(Path(tmp))
        store = SessionStore()
        session = store.create_session("demo")
        generator = EchoGenerator()

        print("== chat: initial generation")
        execute_remix(
            RemixRequest(mode=RemixMode.CHAT, query="a noodle shop menu page"),
            generator,
            store,
            session,
        )
        print(session.current_document)

        print("== search: whole screens")
        results = search_examples(
            RetrievalQuery(text="red food app home screen"), index, corpus, config
        )
        for result in results[:3]:
            meta = result.example.metadata
            print(
                f"  #{result.rank} {result.example.example_id} "
                f"sim={result.similarity:.3f} {meta.app_name} ({meta.rating}★, "
                f"{meta.download_count} downloads)"
            )

        print("== apply (global remix) with the top example")
        top = results[0].example
        store.select_for_apply(session, top.example_id, corpus)
        execute_remix(
            RemixRequest(
                mode=RemixMode.APPLY_GLOBAL,
                query="adopt this color scheme",
                current_code=session.current_document,
                reference=top,
            ),
            generator,
            store,
            session,
        )
        print(session.current_document)

        print("== apply (local remix) on component 0 with an annotation")
        crop = next(r for r in corpus.records if r.kind is ExampleKind.COMPONENT_CROP)
        execute_remix(
            RemixRequest(
                mode=RemixMode.APPLY_LOCAL,
                query="round this button",
                current_code=session.current_document,
                reference=crop,
                annotation=Annotation(strokes=(((0.2, 0.3), (0.7, 0.6)),)),
                target_component_id="0",
            ),
            generator,
            store,
            session,
        )
        print(session.current_document)

        print("== undo")
        store.undo(session)
        print(session.current_document)
        print(f"history: {len(session.versions)} versions, cursor {session.cursor}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
