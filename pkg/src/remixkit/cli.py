"""Command line entry points: ingest, index, serve, eval.

Configuration precedence is flags > environment > config file. The config
file is JSON with keys: corpus_manifest, index_path, embed, generator,
fuzzy_window, listen_addr. Unknown keys are rejected so typos fail loudly.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from PIL import Image

from . import corpus as corpus_mod
from . import evalharness
from .embedding import (
    EmbeddingProviderConfig,
    ProviderKind,
    embed_image_file,
)
from .errors import AllContentTrimmed, RemixError
from .index import IndexRecord, VectorIndex, restore
from .retrieval import RetrievalQuery, search_examples

CONFIG_KEYS = {
    "corpus_manifest",
    "index_path",
    "embed",
    "generator",
    "fuzzy_window",
    "listen_addr",
}

EMBED_KEYS = {"provider_kind", "endpoint", "dimension", "timeout"}
GENERATOR_KEYS = {"provider_kind", "endpoint", "timeout", "script", "default_response"}


@dataclass
class CliConfig:
    corpus_manifest: Path | None = None
    index_path: Path | None = None
    embed: EmbeddingProviderConfig = field(default_factory=EmbeddingProviderConfig)
    generator: dict = field(default_factory=lambda: {"provider_kind": "scripted_mock"})
    fuzzy_window: int = 20
    listen_addr: str = "127.0.0.1:8000"


def load_config(path: Path | None) -> CliConfig:
    config = CliConfig()
    if path is None:
        return config
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    unknown = set(raw) - CONFIG_KEYS
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    if "corpus_manifest" in raw:
        config.corpus_manifest = Path(raw["corpus_manifest"])
    if "index_path" in raw:
        config.index_path = Path(raw["index_path"])
    if "embed" in raw:
        embed = raw["embed"]
        unknown = set(embed) - EMBED_KEYS
        if unknown:
            raise ValueError(f"unknown embed keys: {sorted(unknown)}")
        config.embed = EmbeddingProviderConfig(
            provider_kind=ProviderKind(embed.get("provider_kind", "deterministic_mock")),
            endpoint=embed.get("endpoint"),
            dimension=int(embed.get("dimension", 512)),
            timeout=float(embed.get("timeout", 30.0)),
        )
    if "generator" in raw:
        generator = raw["generator"]
        unknown = set(generator) - GENERATOR_KEYS
        if unknown:
            raise ValueError(f"unknown generator keys: {sorted(unknown)}")
        config.generator = generator
    if "fuzzy_window" in raw:
        config.fuzzy_window = int(raw["fuzzy_window"])
    if "listen_addr" in raw:
        config.listen_addr = str(raw["listen_addr"])
    return config


def build_generator(spec: dict):
    from .remix import RemoteGenerator, ScriptedGenerator

    kind = spec.get("provider_kind", "scripted_mock")
    if kind == "remote_http":
        return RemoteGenerator(
            endpoint=spec.get("endpoint"), timeout=float(spec.get("timeout", 120.0))
        )
    return ScriptedGenerator(
        script=spec.get("script"), default_response=spec.get("default_response")
    )


def _atomic_write_bytes(path: Path, data: bytes) -> None:
    # Write-then-rename so failures never leave partial outputs behind.
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


# --- subcommands -------------------------------------------------------------

def cmd_ingest(manifest_path: Path, out_dir: Path, threshold: int | None = None) -> int:
    """Validate, trim, and re-home the corpus into out_dir. Exit 0/1/2."""
    threshold = corpus_mod.DEFAULT_LUMINANCE_THRESHOLD if threshold is None else threshold
    try:
        _schema, numbered = corpus_mod.read_manifest_records(Path(manifest_path))
    except RemixError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return 1 if exc.code == "FILE_NOT_FOUND" else 2

    out_dir = Path(out_dir)
    images_dir = out_dir / "images"
    images_dir.mkdir(parents=True, exist_ok=True)

    ok_records = []
    failures = []
    seen_ids: set[str] = set()
    for _line_no, record in numbered:
        if record.example_id in seen_ids:
            failures.append((record.example_id, "example_id", "duplicate id"))
            continue
        seen_ids.add(record.example_id)
        errors = corpus_mod.validate_example(record)
        if errors:
            failures.extend((record.example_id, e.field, e.message) for e in errors)
            continue
        with Image.open(record.image_path) as img:
            img.load()
            try:
                trimmed = corpus_mod.trim_borders(img, threshold)
            except AllContentTrimmed:
                failures.append((record.example_id, "image_path", "all content trimmed"))
                continue
            out_path = images_dir / f"{record.example_id}.png"
            buf = io.BytesIO()
            trimmed.convert("RGB").save(buf, format="PNG")
            _atomic_write_bytes(out_path, buf.getvalue())
        ok_records.append(corpus_mod.with_image_path(record, out_path))

    manifest = corpus_mod.CorpusManifest(records=ok_records)
    corpus_mod.save_manifest(manifest, out_dir / "manifest.jsonl")

    print(f"{len(ok_records)} ok, {len(failures)} failed")
    for example_id, fieldname, message in failures:
        print(f"  failed {example_id}: {fieldname}: {message}", file=sys.stderr)
    return 2 if failures else 0


def cmd_index(
    corpus_dir: Path, out_path: Path, embed_config: EmbeddingProviderConfig
) -> int:
    """Embed every corpus image and persist the index atomically."""
    manifest_path = Path(corpus_dir) / "manifest.jsonl"
    if not manifest_path.exists():
        manifest_path = Path(corpus_dir)  # allow passing the manifest itself
    try:
        manifest = corpus_mod.load_manifest(manifest_path)
    except RemixError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return 1

    index = VectorIndex(embed_config.dimension)
    errors = 0
    for record in manifest.records:
        try:
            vector = embed_image_file(record.image_path, embed_config)
        except RemixError as exc:
            print(f"  embed failed {record.example_id}: {exc.code}: {exc}", file=sys.stderr)
            errors += 1
            continue
        index.add(IndexRecord(example_id=record.example_id, vector=vector))
    if errors:
        print(f"error: {errors} record(s) failed to embed; index not written", file=sys.stderr)
        return 1

    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    tmp = out_path.with_name(out_path.name + ".tmp")
    index.persist(tmp)
    os.replace(tmp, out_path)
    print(f"indexed {len(index)} examples at dimension {index.dimension}")
    return 0


def cmd_eval(
    queries_path: Path | None,
    relevance_path: Path,
    config: CliConfig,
    report_path: Path,
    seed: int = evalharness.DEFAULT_SEED,
) -> int:
    """Run the retrieval evaluation and write the report + console table."""
    print(f"seed: {seed}")
    try:
        if queries_path is None:
            queries = evalharness.generate_template_queries(seed=seed)
        else:
            queries = evalharness.load_queries(Path(queries_path))
        relevance = evalharness.load_relevance(Path(relevance_path))
        manifest = corpus_mod.load_manifest(config.corpus_manifest)
        index = restore(config.index_path)
    except (RemixError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if not queries:
        print("error: no queries to evaluate", file=sys.stderr)
        return 1

    def engine(text: str) -> list[str]:
        results = search_examples(
            RetrievalQuery(text=text, limit=evalharness.DEFAULT_K),
            index,
            manifest,
            config.embed,
        )
        return [r.example.example_id for r in results]

    report = evalharness.run_eval(
        queries, relevance, engine, config={"seed": seed}
    )
    report_path = Path(report_path)
    report_path.parent.mkdir(parents=True, exist_ok=True)
    evalharness.save_report(report, report_path)
    _print_report_table(report)
    if report.failed_queries:
        print(f"{len(report.failed_queries)} queries failed", file=sys.stderr)
    return 0 if report.n_queries > 0 else 1


def _print_report_table(report: evalharness.EvalReport) -> None:
    print(f"{'Query Type':<16}{'Hit@5':>8}{'nDCG@5':>9}{'N':>5}")
    for intent_type in evalharness.IntentType.ALL:
        metrics = report.per_type.get(intent_type)
        if metrics is None:
            continue
        name = evalharness.IntentType.DISPLAY[intent_type]
        print(
            f"{name:<16}{metrics.hit_at_k:>8.2f}{metrics.ndcg_at_k:>9.2f}{metrics.n_queries:>5}"
        )
    print(
        f"{'Average (All)':<16}{report.overall_hit_at_k:>8.2f}"
        f"{report.overall_ndcg_at_k:>9.2f}{report.n_queries:>5}"
    )


def cmd_serve(config: CliConfig) -> int:
    import uvicorn

    from .service import create_app
    from .session import SessionStore

    manifest = corpus_mod.load_manifest(config.corpus_manifest)
    index = restore(config.index_path)
    generator = build_generator(config.generator)
    session_log = Path(config.index_path).parent / "sessions.jsonl"
    app = create_app(
        corpus=manifest,
        index=index,
        embed_config=config.embed,
        generator=generator,
        fuzzy_window=config.fuzzy_window,
        store=SessionStore(log_path=session_log),
    )
    host, _, port = config.listen_addr.rpartition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    return 0


# --- argument parsing ----------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="remixkit")
    parser.add_argument("--config", type=Path, default=None, help="JSON config file")
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="validate and preprocess a corpus")
    p_ingest.add_argument("--manifest", type=Path, required=True)
    p_ingest.add_argument("--out", type=Path, required=True)
    p_ingest.add_argument("--threshold", type=int, default=None)

    p_index = sub.add_parser("index", help="embed corpus images and build the index")
    p_index.add_argument("--corpus", type=Path, required=True, help="ingested corpus dir")
    p_index.add_argument("--out", type=Path, required=True)
    p_index.add_argument("--workers", type=int, default=1)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--listen", type=str, default=None)

    p_eval = sub.add_parser("eval", help="run the retrieval evaluation")
    p_eval.add_argument("--queries", type=Path, default=None,
                        help="JSONL query file; omit to use generated template queries")
    p_eval.add_argument("--relevance", type=Path, required=True)
    p_eval.add_argument("--report", type=Path, required=True)
    p_eval.add_argument("--seed", type=int, default=evalharness.DEFAULT_SEED)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
    except (ValueError, OSError) as exc:
        print(f"error: bad config: {exc}", file=sys.stderr)
        return 1

    if args.command == "ingest":
        return cmd_ingest(args.manifest, args.out, args.threshold)
    if args.command == "index":
        return cmd_index(args.corpus, args.out, config.embed)
    if args.command == "serve":
        if args.listen:
            config.listen_addr = args.listen
        return cmd_serve(config)
    if args.command == "eval":
        return cmd_eval(args.queries, args.relevance, config, args.report, args.seed)
    return 2


if __name__ == "__main__":
    sys.exit(main())
