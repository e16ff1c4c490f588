"""Retrieval quality evaluation: templated queries, Hit@k, nDCG@k.

Queries are generated from per-intent-type templates (color theme, layout,
UI category, UI component), retrieval returns the top-5, and graded
relevance labels (0-3) score the ranking. Grades of 2 or above count as
relevant for Hit@k; nDCG@k uses the full graded values.

Overall metrics average over queries, not over types, so types with more
queries weigh more (they coincide at equal per-type counts).
"""

from __future__ import annotations

import json
import math
import random
import string
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .errors import EmptyTemplateSet, NegativeGrade, RemixError

DEFAULT_K = 5
DEFAULT_THRESHOLD = 2
DEFAULT_COUNT_PER_TYPE = 25
DEFAULT_SEED = 0


class IntentType:
    COLOR_THEME = "color_theme"
    LAYOUT = "layout"
    UI_CATEGORY = "ui_category"
    UI_COMPONENT = "ui_component"

    ALL = (COLOR_THEME, LAYOUT, UI_CATEGORY, UI_COMPONENT)

    DISPLAY = {
        COLOR_THEME: "Color Theme",
        LAYOUT: "Layout",
        UI_CATEGORY: "UI Category",
        UI_COMPONENT: "UI Component",
    }


@dataclass(frozen=True)
class EvalQuery:
    query_id: str
    text: str
    intent_type: str

    def __post_init__(self):
        if self.intent_type not in IntentType.ALL:
            raise ValueError(f"unknown intent type {self.intent_type!r}")


@dataclass(frozen=True)
class GradedRelevance:
    query_id: str
    example_id: str
    grade: int

    def __post_init__(self):
        if not (0 <= self.grade <= 3):
            raise ValueError(f"grade {self.grade} outside [0, 3]")


@dataclass
class TypeMetrics:
    hit_at_k: float
    ndcg_at_k: float
    n_queries: int


@dataclass
class EvalReport:
    per_type: dict[str, TypeMetrics]
    overall_hit_at_k: float
    overall_ndcg_at_k: float
    n_queries: int
    failed_queries: list[dict] = field(default_factory=list)
    config: dict = field(default_factory=dict)


def hit_at_k(grades_in_rank_order, k: int = DEFAULT_K, threshold: int = DEFAULT_THRESHOLD) -> int:
    """1 iff any of the first min(k, len) grades reaches the threshold."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return 1 if any(g >= threshold for g in grades_in_rank_order[:k]) else 0


def _gain(grade: float, exponential: bool) -> float:
    return (2.0 ** grade - 1.0) if exponential else float(grade)


def ndcg_at_k(grades_in_rank_order, k: int = DEFAULT_K, exponential_gain: bool = False) -> float:
    """Discounted cumulative gain over the top-k, normalized by the ideal order.

    Zero IDCG (no relevant results at all) yields 0.0 so degenerate queries
    do not poison aggregate means.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    grades = list(grades_in_rank_order)
    if any(g < 0 for g in grades):
        raise NegativeGrade(str([g for g in grades if g < 0][0]))
    top = grades[:k]
    dcg = sum(_gain(g, exponential_gain) / math.log2(i + 2) for i, g in enumerate(top))
    ideal = sorted(grades, reverse=True)[:k]
    idcg = sum(_gain(g, exponential_gain) / math.log2(i + 2) for i, g in enumerate(ideal))
    if idcg == 0.0:
        return 0.0
    return dcg / idcg


# --- query templates --------------------------------------------------------

DEFAULT_TEMPLATES: dict[str, list[str]] = {
    IntentType.COLOR_THEME: [
        "a {color} themed mobile app screen",
        "mobile UI with a {color} color scheme",
    ],
    IntentType.LAYOUT: [
        "a mobile screen with a {layout} layout",
        "{layout} layout arrangement for a phone app",
    ],
    IntentType.UI_CATEGORY: [
        "home screen of a {category} app",
        "a typical {category} mobile interface",
    ],
    IntentType.UI_COMPONENT: [
        "a {style} {component}",
        "{component} with a {style} look",
    ],
}

DEFAULT_SLOT_VALUES: dict[str, list[str]] = {
    "color": [
        "red", "blue", "green", "yellow", "orange", "purple", "pink",
        "teal", "dark", "light", "pastel", "monochrome", "neon", "earthy",
    ],
    "layout": [
        "grid", "list", "card", "tabbed", "split", "carousel",
        "single column", "two column", "masonry", "full bleed",
        "stacked", "sidebar", "bottom sheet", "hero banner",
    ],
    "category": [
        "food delivery", "travel", "news", "fitness", "banking",
        "shopping", "music", "education", "social", "weather",
        "messaging", "photo editing", "podcast", "recipe",
    ],
    "style": ["rounded", "minimal", "bold", "outlined", "gradient", "flat", "glossy"],
    "component": [
        "button", "search bar", "navigation bar", "login form",
        "profile card", "menu list", "checkout panel",
    ],
}


def _slot_names(template: str) -> list[str]:
    return [name for _, name, _, _ in string.Formatter().parse(template) if name]


def _expand_templates(templates: list[str], slot_values: dict[str, list[str]]) -> list[str]:
    """All slot fillings of all templates, in a fixed deterministic order."""
    expansions: list[str] = []
    for template in templates:
        names = _slot_names(template)
        if not names:
            expansions.append(template)
            continue
        bindings: list[dict[str, str]] = [{}]
        for name in names:
            values = slot_values.get(name, [])
            bindings = [dict(b, **{name: v}) for b in bindings for v in values]
        expansions.extend(template.format(**b) for b in bindings)
    # Dedup, preserving first occurrence.
    seen: set[str] = set()
    unique = []
    for text in expansions:
        if text not in seen:
            seen.add(text)
            unique.append(text)
    return unique


def generate_template_queries(
    templates: dict[str, list[str]] | None = None,
    count_per_type: int = DEFAULT_COUNT_PER_TYPE,
    seed: int = DEFAULT_SEED,
    slot_values: dict[str, list[str]] | None = None,
) -> list[EvalQuery]:
    """Deterministic slot-filled queries, count_per_type per intent type."""
    templates = templates if templates is not None else DEFAULT_TEMPLATES
    slot_values = slot_values if slot_values is not None else DEFAULT_SLOT_VALUES
    queries: list[EvalQuery] = []
    for intent_type in IntentType.ALL:
        type_templates = templates.get(intent_type) or []
        if not type_templates:
            raise EmptyTemplateSet(intent_type)
        pool = _expand_templates(type_templates, slot_values)
        if not pool:
            raise EmptyTemplateSet(intent_type)
        # String seeds hash stably across processes, unlike tuples.
        rng = random.Random(f"{seed}:{intent_type}")
        shuffled = rng.sample(pool, len(pool))
        for i in range(count_per_type):
            text = shuffled[i % len(shuffled)]
            queries.append(
                EvalQuery(
                    query_id=f"{intent_type}-{i:03d}",
                    text=text,
                    intent_type=intent_type,
                )
            )
    return queries


# --- evaluation run ---------------------------------------------------------

def run_eval(
    queries: list[EvalQuery],
    relevance: list[GradedRelevance],
    engine: Callable[[str], list[str]],
    k: int = DEFAULT_K,
    threshold: int = DEFAULT_THRESHOLD,
    exponential_gain: bool = False,
    config: dict | None = None,
) -> EvalReport:
    """Evaluate every query through the engine handle.

    ``engine`` maps a query text to ranked example ids (top-k or more).
    Missing relevance labels default to grade 0. A query whose retrieval
    fails is recorded in the report instead of aborting the run.
    """
    grade_lookup = {(r.query_id, r.example_id): r.grade for r in relevance}
    per_type_scores: dict[str, list[tuple[int, float]]] = {t: [] for t in IntentType.ALL}
    all_scores: list[tuple[int, float]] = []
    failed: list[dict] = []

    for query in queries:
        try:
            ranked_ids = engine(query.text)[:k]
        except RemixError as exc:
            failed.append({"query_id": query.query_id, "code": exc.code, "message": str(exc)})
            continue
        grades = [grade_lookup.get((query.query_id, example_id), 0) for example_id in ranked_ids]
        scores = (
            hit_at_k(grades, k=k, threshold=threshold),
            ndcg_at_k(grades, k=k, exponential_gain=exponential_gain),
        )
        per_type_scores[query.intent_type].append(scores)
        all_scores.append(scores)

    def _mean(values: list[float]) -> float:
        return sum(values) / len(values) if values else 0.0

    per_type = {}
    for intent_type, scores in per_type_scores.items():
        if not scores and not any(q.intent_type == intent_type for q in queries):
            continue
        per_type[intent_type] = TypeMetrics(
            hit_at_k=_mean([s[0] for s in scores]),
            ndcg_at_k=_mean([s[1] for s in scores]),
            n_queries=len(scores),
        )

    echo = {
        "k": k,
        "threshold": threshold,
        "gain": "exponential" if exponential_gain else "linear",
    }
    echo.update(config or {})
    return EvalReport(
        per_type=per_type,
        overall_hit_at_k=_mean([s[0] for s in all_scores]),
        overall_ndcg_at_k=_mean([s[1] for s in all_scores]),
        n_queries=len(all_scores),
        failed_queries=failed,
        config=echo,
    )


# --- file formats -----------------------------------------------------------

def load_queries(path: Path) -> list[EvalQuery]:
    queries = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            queries.append(
                EvalQuery(
                    query_id=obj["query_id"],
                    text=obj["text"],
                    intent_type=obj["intent_type"],
                )
            )
    return queries


def save_queries(queries: list[EvalQuery], path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for q in queries:
            fh.write(
                json.dumps(
                    {"query_id": q.query_id, "text": q.text, "intent_type": q.intent_type},
                    ensure_ascii=False,
                )
                + "\n"
            )


def load_relevance(path: Path) -> list[GradedRelevance]:
    labels = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            labels.append(
                GradedRelevance(
                    query_id=obj["query_id"],
                    example_id=obj["example_id"],
                    grade=int(obj["grade"]),
                )
            )
    return labels


def save_relevance(labels: list[GradedRelevance], path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in labels:
            fh.write(
                json.dumps(
                    {"query_id": r.query_id, "example_id": r.example_id, "grade": r.grade}
                )
                + "\n"
            )


def report_to_dict(report: EvalReport) -> dict:
    return {
        "config": report.config,
        "per_type": {
            t: {
                "hit_at_k": m.hit_at_k,
                "ndcg_at_k": m.ndcg_at_k,
                "n_queries": m.n_queries,
            }
            for t, m in report.per_type.items()
        },
        "overall": {
            "hit_at_k": report.overall_hit_at_k,
            "ndcg_at_k": report.overall_ndcg_at_k,
            "n_queries": report.n_queries,
        },
        "failed_queries": report.failed_queries,
    }


def save_report(report: EvalReport, path: Path) -> None:
    """Deterministic serialization: same report contents, same bytes."""
    Path(path).write_text(
        json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
