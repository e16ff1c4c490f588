"""Text/image embedding providers sharing one vector space.

Two providers: a deterministic offline mock (hash-bucketed token counts for
text, hash-bucketed grid statistics for images) and a remote HTTP encoder.
Both return L2-normalized vectors; callers re-normalize defensively because
cosine similarity equals the dot product only under unit norm.
"""

from __future__ import annotations

import base64
import enum
import hashlib
import io
import os
from dataclasses import dataclass

import httpx
import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import EmptyQueryError, ProviderError, ProviderTimeout, ZeroVectorError

DEFAULT_DIMENSION = 512
ENDPOINT_ENV_VAR = "REMIX_EMBED_ENDPOINT"

# Grid granularity for the mock image statistics.
_MOCK_GRID = 8


class ProviderKind(enum.Enum):
    REMOTE_HTTP = "remote_http"
    DETERMINISTIC_MOCK = "deterministic_mock"


@dataclass(frozen=True)
class EmbeddingVector:
    values: tuple[float, ...]

    @property
    def dimension(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)


@dataclass(frozen=True)
class EmbeddingProviderConfig:
    provider_kind: ProviderKind = ProviderKind.DETERMINISTIC_MOCK
    endpoint: str | None = None
    dimension: int = DEFAULT_DIMENSION
    timeout: float = 30.0

    def __post_init__(self):
        if self.dimension < 2:
            raise ValueError("embedding dimension must be >= 2")
        if self.provider_kind is ProviderKind.REMOTE_HTTP and not self.resolved_endpoint():
            raise ValueError("remote provider requires an endpoint")

    def resolved_endpoint(self) -> str | None:
        return os.environ.get(ENDPOINT_ENV_VAR) or self.endpoint


def normalize(values) -> EmbeddingVector:
    """Scale a raw vector to unit L2 norm.

    Vectors already within 1e-9 of unit norm pass through unchanged, which
    makes normalization exactly idempotent.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ZeroVectorError("vector must be non-empty and one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise ZeroVectorError("vector has non-finite entries")
    norm = float(np.linalg.norm(arr))
    if norm < 1e-12:
        raise ZeroVectorError(f"norm {norm} below 1e-12")
    if abs(norm - 1.0) > 1e-9:
        arr = arr / norm
    return EmbeddingVector(values=tuple(float(x) for x in arr))


def _bucket(token: str, dimension: int) -> int:
    digest = hashlib.sha256(token.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little") % dimension


def _mock_text_vector(query: str, dimension: int) -> EmbeddingVector:
    counts = np.zeros(dimension, dtype=np.float64)
    for token in query.lower().split():
        counts[_bucket("txt:" + token, dimension)] += 1.0
    return normalize(counts)


def _mock_image_vector(image: Image.Image, dimension: int) -> EmbeddingVector:
    rgb = np.asarray(image.convert("RGB"), dtype=np.float64) / 255.0
    acc = np.zeros(dimension, dtype=np.float64)
    # Constant bias bucket keeps uniform images (e.g. all-black) off the zero vector.
    acc[_bucket("img:bias", dimension)] += 1.0
    row_bands = np.array_split(rgb, _MOCK_GRID, axis=0)
    for gy, band in enumerate(row_bands):
        cells = np.array_split(band, _MOCK_GRID, axis=1)
        for gx, cell in enumerate(cells):
            if cell.size == 0:
                continue
            for ch in range(3):
                plane = cell[..., ch]
                mean = float(plane.mean())
                var = float(plane.var())
                acc[_bucket(f"img:{gy}:{gx}:{ch}:mean", dimension)] += mean
                acc[_bucket(f"img:{gy}:{gx}:{ch}:var", dimension)] += var
    return normalize(acc)


class _RemoteClient:
    """Thin wrapper over the `/embed` wire contract."""

    def __init__(self, config: EmbeddingProviderConfig, transport: httpx.BaseTransport | None = None):
        self._config = config
        self._transport = transport

    def embed(self, modality: str, payload: str) -> EmbeddingVector:
        endpoint = self._config.resolved_endpoint()
        body = {
            "modality": modality,
            "payload": payload,
            "dimension": self._config.dimension,
        }
        try:
            with httpx.Client(transport=self._transport, timeout=self._config.timeout) as client:
                response = client.post(endpoint, json=body)
        except httpx.TimeoutException as exc:
            raise ProviderTimeout(str(exc)) from exc
        except httpx.HTTPError as exc:
            raise ProviderError(None, str(exc)) from exc
        if response.status_code != 200:
            raise ProviderError(response.status_code, response.text)
        try:
            vector = response.json()["vector"]
        except (KeyError, ValueError) as exc:
            raise ProviderError(response.status_code, response.text) from exc
        if len(vector) != self._config.dimension:
            raise ProviderError(response.status_code, f"bad dimension {len(vector)}")
        return normalize(vector)


def embed_text(
    query: str,
    config: EmbeddingProviderConfig,
    transport: httpx.BaseTransport | None = None,
) -> EmbeddingVector:
    """Embed a natural-language query into the shared space."""
    if not query or not query.strip():
        raise EmptyQueryError("query is empty after whitespace trim")
    if config.provider_kind is ProviderKind.DETERMINISTIC_MOCK:
        return _mock_text_vector(query, config.dimension)
    return _RemoteClient(config, transport).embed("text", query)


def embed_image(
    image_bytes: bytes,
    config: EmbeddingProviderConfig,
    transport: httpx.BaseTransport | None = None,
) -> EmbeddingVector:
    """Embed raw PNG/JPEG bytes into the shared space."""
    if config.provider_kind is ProviderKind.DETERMINISTIC_MOCK:
        try:
            with Image.open(io.BytesIO(image_bytes)) as img:
                img.load()
                return _mock_image_vector(img, config.dimension)
        except (UnidentifiedImageError, OSError) as exc:
            raise ProviderError(None, f"undecodable image: {exc}") from exc
    payload = base64.b64encode(image_bytes).decode("ascii")
    return _RemoteClient(config, transport).embed("image", payload)


def embed_image_file(
    path, config: EmbeddingProviderConfig, transport: httpx.BaseTransport | None = None
) -> EmbeddingVector:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise ProviderError(None, f"cannot read {path}: {exc}") from exc
    return embed_image(data, config, transport)
