"""Query-to-gallery retrieval: embed, scope-filter, rank, join metadata.

Scope filtering happens before the top-k search (a pre-filter over candidate
records), so the requested limit is always achievable whenever enough
candidates of the right kind exist.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .corpus import CorpusManifest, ExampleKind, UiExample
from .embedding import EmbeddingProviderConfig, embed_text
from .errors import EmptyQueryError, UnknownExampleId
from .index import VectorIndex

DEFAULT_LIMIT = 10


class RetrievalScope(enum.Enum):
    WHOLE_SCREEN = "whole_screen"
    COMPONENT = "component"


_SCOPE_KIND = {
    RetrievalScope.WHOLE_SCREEN: ExampleKind.WHOLE_SCREEN,
    RetrievalScope.COMPONENT: ExampleKind.COMPONENT_CROP,
}


@dataclass(frozen=True)
class RetrievalQuery:
    text: str
    scope: RetrievalScope = RetrievalScope.WHOLE_SCREEN
    limit: int = DEFAULT_LIMIT

    def __post_init__(self):
        if self.limit < 1:
            raise ValueError("limit must be >= 1")


@dataclass(frozen=True)
class RetrievalResult:
    example: UiExample
    similarity: float
    rank: int


def search_examples(
    query: RetrievalQuery,
    index: VectorIndex,
    corpus: CorpusManifest,
    embed_config: EmbeddingProviderConfig,
) -> list[RetrievalResult]:
    """Rank corpus examples by cosine similarity to the query text.

    Raises UnknownExampleId when the index references an example the corpus
    does not know about; that always signals a build error, never a user one.
    """
    if not query.text or not query.text.strip():
        raise EmptyQueryError("query is empty after whitespace trim")
    query_vector = embed_text(query.text, embed_config)

    wanted_kind = _SCOPE_KIND[query.scope]
    candidates = []
    for example_id in index.ids:
        record = corpus.get(example_id)
        if record is None:
            raise UnknownExampleId(example_id)
        if record.kind is wanted_kind:
            candidates.append(example_id)

    hits = index.subset(candidates).search_top_k(query_vector, query.limit)
    results = []
    for rank, (example_id, similarity) in enumerate(hits, start=1):
        example = corpus.get(example_id)
        if example is None:
            raise UnknownExampleId(example_id)
        results.append(RetrievalResult(example=example, similarity=similarity, rank=rank))
    return results
