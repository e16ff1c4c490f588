from __future__ import annotations

import json
from pathlib import Path

import pytest

from remixkit.cli import cmd_eval, cmd_index, cmd_ingest, load_config, main
from remixkit.corpus import load_manifest
from remixkit.embedding import (
    EmbeddingProviderConfig,
    ProviderKind,
    embed_image_file,
    embed_text,
)
from remixkit.evalharness import EvalQuery, GradedRelevance, IntentType, save_queries, save_relevance
from remixkit.index import IndexRecord, VectorIndex, restore
from remixkit.retrieval import RetrievalQuery, search_examples

from conftest import framed_image, make_image, manifest_line, save_png

CONFIG64 = EmbeddingProviderConfig(dimension=64)
# Planted-rank fixtures need the default 512 dims: at 64, distinct tokens can
# share hash buckets and distinct query texts may embed identically.
CONFIG512 = EmbeddingProviderConfig(dimension=512)


def write_fixture_manifest(tmp_path: Path, n: int = 5, bad_index: int | None = None) -> Path:
    lines = []
    for i in range(n):
        save_png(
            framed_image(12, 12, border=2, inner=((40 * i) % 255 + 1, 128, 200)),
            tmp_path / f"img-{i}.png",
        )
        overrides = {"rating": 9.9} if i == bad_index else {}
        lines.append(manifest_line(f"ex-{i}", f"img-{i}.png", **overrides))
    manifest = tmp_path / "manifest.jsonl"
    manifest.write_text("\n".join(lines) + "\n")
    return manifest


# --- ingest ---------------------------------------------------------------------

def test_ingest_valid_fixture(tmp_path, capsys):
    manifest = write_fixture_manifest(tmp_path, 5)
    code = cmd_ingest(manifest, tmp_path / "out")
    out = capsys.readouterr().out
    assert code == 0
    assert "5 ok, 0 failed" in out
    ingested = load_manifest(tmp_path / "out" / "manifest.jsonl")
    assert len(ingested) == 5
    # Borders were trimmed away during ingest.
    from PIL import Image

    with Image.open(ingested.records[0].image_path) as img:
        assert img.size == (8, 8)


def test_ingest_reports_bad_record(tmp_path, capsys):
    manifest = write_fixture_manifest(tmp_path, 5, bad_index=2)
    code = cmd_ingest(manifest, tmp_path / "out")
    captured = capsys.readouterr()
    assert code == 2
    assert "4 ok, 1 failed" in captured.out
    assert "rating" in captured.err
    assert "ex-2" in captured.err


def test_ingest_idempotent_bytes(tmp_path, capsys):
    manifest = write_fixture_manifest(tmp_path, 3)
    assert cmd_ingest(manifest, tmp_path / "out1") == 0
    assert cmd_ingest(tmp_path / "out1" / "manifest.jsonl", tmp_path / "out2") == 0
    first_manifest = (tmp_path / "out1" / "manifest.jsonl").read_bytes()
    second_manifest = (tmp_path / "out2" / "manifest.jsonl").read_bytes()
    assert first_manifest == second_manifest
    for image in sorted((tmp_path / "out1" / "images").iterdir()):
        twin = tmp_path / "out2" / "images" / image.name
        assert image.read_bytes() == twin.read_bytes()


def test_ingest_missing_manifest(tmp_path, capsys):
    assert cmd_ingest(tmp_path / "nope.jsonl", tmp_path / "out") == 1


# --- index ----------------------------------------------------------------------

def ingested_corpus(tmp_path, n=12) -> Path:
    manifest = write_fixture_manifest(tmp_path, n)
    assert cmd_ingest(manifest, tmp_path / "corpus") == 0
    return tmp_path / "corpus"


def test_index_builds_and_persists(tmp_path, capsys):
    corpus_dir = ingested_corpus(tmp_path)
    out = tmp_path / "vectors.idx"
    assert cmd_index(corpus_dir, out, CONFIG64) == 0
    assert "indexed 12 examples" in capsys.readouterr().out
    assert len(restore(out)) == 12


def test_index_matches_in_memory_build(tmp_path, capsys):
    corpus_dir = ingested_corpus(tmp_path)
    out = tmp_path / "vectors.idx"
    assert cmd_index(corpus_dir, out, CONFIG64) == 0
    restored = restore(out)

    manifest = load_manifest(corpus_dir / "manifest.jsonl")
    in_memory = VectorIndex(CONFIG64.dimension)
    for record in manifest.records:
        in_memory.add(
            IndexRecord(record.example_id, embed_image_file(record.image_path, CONFIG64))
        )
    for i in range(20):
        query = embed_text(f"fixture query {i}", CONFIG64)
        assert restored.search_top_k(query, 10) == in_memory.search_top_k(query, 10)


def test_index_unreachable_provider_writes_nothing(tmp_path, capsys):
    corpus_dir = ingested_corpus(tmp_path, n=3)
    out = tmp_path / "vectors.idx"
    remote = EmbeddingProviderConfig(
        provider_kind=ProviderKind.REMOTE_HTTP,
        endpoint="http://127.0.0.1:1/embed",
        dimension=8,
        timeout=0.2,
    )
    assert cmd_index(corpus_dir, out, remote) == 1
    assert not out.exists()


# --- eval ------------------------------------------------------------------------

def planted_eval_setup(tmp_path) -> tuple[Path, Path, Path, Path]:
    """Corpus + index + queries + relevance where each query's grade-3
    example is its own embedded text vector (rank 1, similarity 1)."""
    queries = []
    for intent_type in IntentType.ALL:
        for i in range(2):
            queries.append(
                EvalQuery(
                    query_id=f"{intent_type}-{i}",
                    text=f"{intent_type.replace('_', ' ')} planted query {i}",
                    intent_type=intent_type,
                )
            )
    corpus_dir = tmp_path / "corpus"
    (corpus_dir / "images").mkdir(parents=True)
    lines = []
    index = VectorIndex(CONFIG512.dimension)
    relevance = []
    for i, query in enumerate(queries):
        example_id = f"hit-{i}"
        save_png(make_image(6, 6, (i * 20 + 10, 90, 120)), corpus_dir / "images" / f"{example_id}.png")
        lines.append(manifest_line(example_id, f"images/{example_id}.png"))
        index.add(IndexRecord(example_id, embed_text(query.text, CONFIG512)))
        relevance.append(GradedRelevance(query.query_id, example_id, 3))
    (corpus_dir / "manifest.jsonl").write_text("\n".join(lines) + "\n")
    index_path = tmp_path / "vectors.idx"
    index.persist(index_path)

    queries_path = tmp_path / "queries.jsonl"
    save_queries(queries, queries_path)
    relevance_path = tmp_path / "relevance.jsonl"
    save_relevance(relevance, relevance_path)

    config_path = tmp_path / "config.json"
    config_path.write_text(
        json.dumps(
            {
                "corpus_manifest": str(corpus_dir / "manifest.jsonl"),
                "index_path": str(index_path),
                "embed": {"provider_kind": "deterministic_mock", "dimension": 512},
            }
        )
    )
    return config_path, queries_path, relevance_path, tmp_path / "report.json"


def test_eval_planted_fixture_all_ones(tmp_path, capsys):
    config_path, queries_path, relevance_path, report_path = planted_eval_setup(tmp_path)
    config = load_config(config_path)
    code = cmd_eval(queries_path, relevance_path, config, report_path, seed=0)
    out = capsys.readouterr().out
    assert code == 0
    assert "seed: 0" in out
    for row_name in ("Color Theme", "Layout", "UI Category", "UI Component", "Average (All)"):
        assert row_name in out
    # One 1.00 for Hit@5 and one for nDCG@5 on every row.
    for line in out.splitlines():
        if any(line.startswith(n) for n in ("Color", "Layout", "UI ", "Average")):
            assert line.count("1.00") == 2
    report = json.loads(report_path.read_text())
    assert report["overall"]["hit_at_k"] == 1.0
    assert report["overall"]["ndcg_at_k"] == 1.0


def test_eval_empty_query_file(tmp_path, capsys):
    config_path, _queries, relevance_path, report_path = planted_eval_setup(tmp_path)
    empty = tmp_path / "empty-queries.jsonl"
    empty.write_text("")
    config = load_config(config_path)
    assert cmd_eval(empty, relevance_path, config, report_path, seed=0) == 1


def test_eval_rerun_same_seed_identical_report(tmp_path, capsys):
    config_path, queries_path, relevance_path, report_path = planted_eval_setup(tmp_path)
    config = load_config(config_path)
    assert cmd_eval(queries_path, relevance_path, config, report_path, seed=3) == 0
    first = report_path.read_bytes()
    assert cmd_eval(queries_path, relevance_path, config, report_path, seed=3) == 0
    assert report_path.read_bytes() == first


# --- config ------------------------------------------------------------------------

def test_config_unknown_key_rejected(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"corpus_manifest": "x", "surprise": 1}))
    with pytest.raises(ValueError):
        load_config(path)


def test_config_nested_provider_parsing(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(
        json.dumps(
            {
                "embed": {"provider_kind": "deterministic_mock", "dimension": 32},
                "fuzzy_window": 7,
                "listen_addr": "0.0.0.0:9999",
            }
        )
    )
    config = load_config(path)
    assert config.embed.dimension == 32
    assert config.fuzzy_window == 7
    assert config.listen_addr == "0.0.0.0:9999"


def test_main_bad_config_exits_one(tmp_path, capsys):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"mystery": True}))
    code = main(["--config", str(path), "ingest", "--manifest", "x", "--out", "y"])
    assert code == 1


def test_main_ingest_smoke(tmp_path, capsys):
    manifest = write_fixture_manifest(tmp_path, 2)
    code = main(["ingest", "--manifest", str(manifest), "--out", str(tmp_path / "out")])
    assert code == 0
