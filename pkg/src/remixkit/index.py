"""Exact cosine top-k vector store keyed by example id.

Brute-force scan over the whole corpus: at the target scale (~10^3 vectors)
exact search is cheap and keeps results reproducible. Vectors are stored as
float32 but similarities are computed in float64 so orderings stay stable
near ties. Ties break by ascending example_id.

On-disk format (little-endian, no padding):
    magic  8 bytes  b"RMXIDX1\\0"
    u32    dimension
    u64    record count
    per record: u16 id byte length, UTF-8 id bytes, `dimension` f32 values
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .embedding import EmbeddingVector
from .errors import CorruptIndex, DimensionMismatch, DuplicateIdError, IndexIoError

MAGIC = b"RMXIDX1\0"


@dataclass(frozen=True)
class IndexRecord:
    example_id: str
    vector: EmbeddingVector


class VectorIndex:
    def __init__(self, dimension: int):
        if dimension < 1:
            raise ValueError("dimension must be positive")
        self.dimension = dimension
        self._ids: list[str] = []
        self._rows: list[np.ndarray] = []
        self._positions: dict[str, int] = {}

    def __len__(self) -> int:
        return len(self._ids)

    def __contains__(self, example_id: str) -> bool:
        return example_id in self._positions

    @property
    def ids(self) -> list[str]:
        return list(self._ids)

    def add(self, record: IndexRecord) -> "VectorIndex":
        if record.vector.dimension != self.dimension:
            raise DimensionMismatch(self.dimension, record.vector.dimension)
        if record.example_id in self._positions:
            raise DuplicateIdError(record.example_id)
        row = np.asarray(record.vector.values, dtype=np.float32)
        # Build the row fully before publishing so readers never see a
        # partially added record.
        self._positions[record.example_id] = len(self._ids)
        self._ids.append(record.example_id)
        self._rows.append(row)
        return self

    def vector_for(self, example_id: str) -> np.ndarray:
        return self._rows[self._positions[example_id]]

    def subset(self, example_ids) -> "VectorIndex":
        """New index over the given ids (rows shared, not copied)."""
        sub = VectorIndex(self.dimension)
        for example_id in example_ids:
            pos = self._positions[example_id]
            sub._positions[example_id] = len(sub._ids)
            sub._ids.append(self._ids[pos])
            sub._rows.append(self._rows[pos])
        return sub

    def search_top_k(self, query: EmbeddingVector, k: int) -> list[tuple[str, float]]:
        """Top-k (example_id, cosine) pairs, score descending, id ascending on ties."""
        if k < 1:
            raise ValueError("k must be >= 1")
        if query.dimension != self.dimension:
            raise DimensionMismatch(self.dimension, query.dimension)
        if not self._ids:
            return []
        matrix = np.stack(self._rows).astype(np.float64)
        scores = matrix @ query.as_array()
        ranked = sorted(zip(self._ids, scores), key=lambda t: (-t[1], t[0]))
        return [(example_id, float(score)) for example_id, score in ranked[:k]]

    def persist(self, path: Path) -> None:
        path = Path(path)
        try:
            with open(path, "wb") as fh:
                fh.write(MAGIC)
                fh.write(struct.pack("<IQ", self.dimension, len(self._ids)))
                for example_id, row in zip(self._ids, self._rows):
                    id_bytes = example_id.encode("utf-8")
                    fh.write(struct.pack("<H", len(id_bytes)))
                    fh.write(id_bytes)
                    fh.write(row.astype("<f4").tobytes())
        except OSError as exc:
            raise IndexIoError(str(exc)) from exc


def restore(path: Path) -> VectorIndex:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise IndexIoError(str(exc)) from exc
    if len(data) < len(MAGIC) + 12 or data[: len(MAGIC)] != MAGIC:
        raise CorruptIndex("bad magic")
    offset = len(MAGIC)
    dimension, count = struct.unpack_from("<IQ", data, offset)
    offset += 12
    index = VectorIndex(dimension)
    row_bytes = dimension * 4
    for _ in range(count):
        if offset + 2 > len(data):
            raise CorruptIndex("truncated record header")
        (id_len,) = struct.unpack_from("<H", data, offset)
        offset += 2
        if offset + id_len + row_bytes > len(data):
            raise CorruptIndex("truncated record")
        example_id = data[offset : offset + id_len].decode("utf-8")
        offset += id_len
        row = np.frombuffer(data, dtype="<f4", count=dimension, offset=offset).copy()
        offset += row_bytes
        if example_id in index:
            raise CorruptIndex(f"duplicate id {example_id!r}")
        index._positions[example_id] = len(index._ids)
        index._ids.append(example_id)
        index._rows.append(row)
    if offset != len(data):
        raise CorruptIndex("trailing bytes")
    return index
