"""Text embedders: the deterministic built-in hasher and the HTTP client.

Any embedder maps non-empty text to a unit-normalized vector.  The built-in
one needs no model weights: it hashes character trigrams of ``^text$`` into
256 buckets with 64-bit FNV-1a and L2-normalizes the counts, so identical
text always yields identical vectors in any process.
"""

from __future__ import annotations

import numpy as np

from .errors import EmptyText, RemoteError, TransportError

DEFAULT_DIMENSION = 256

_FNV64_OFFSET = 14695981039346656037
_FNV64_PRIME = 1099511628211
_U64_MASK = 0xFFFFFFFFFFFFFFFF


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a hash."""
    h = _FNV64_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV64_PRIME) & _U64_MASK
    return h


class Embedder:
    """Embedder contract: deterministic, unit-normalized output vectors."""

    dimension: int
    descriptor: str

    def embed(self, text: str) -> np.ndarray:
        raise NotImplementedError

    def embed_batch(self, texts: list[str]) -> list[np.ndarray]:
        return [self.embed(t) for t in texts]


class HashingEmbedder(Embedder):
    """Character-trigram hashing embedder; pure and dependency-free."""

    def __init__(self, dimension: int = DEFAULT_DIMENSION):
        self.dimension = dimension
        self.descriptor = f"trigram-fnv1a-{dimension}"

    def embed(self, text: str) -> np.ndarray:
        if not text.strip():
            raise EmptyText()
        wrapped = f"^{text}$"
        counts = np.zeros(self.dimension, dtype=np.float64)
        for i in range(len(wrapped) - 2):
            trigram = wrapped[i : i + 3]
            counts[fnv1a64(trigram.encode("utf-8")) % self.dimension] += 1.0
        return counts / np.linalg.norm(counts)


def normalize_vector(values: list[float] | np.ndarray) -> np.ndarray:
    vec = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(vec)):
        raise ValueError("embedding vector contains non-finite entries")
    norm = np.linalg.norm(vec)
    if norm == 0:
        raise ValueError("embedding vector has zero norm")
    return vec / norm


class RemoteEmbedder(Embedder):
    """Client for an embedding service: POST {"input": [...]} -> {"embeddings": [...]}.

    Vectors are normalized on receipt, so the service need not normalize.
    """

    def __init__(self, url: str, dimension: int, client=None, timeout: float = 30.0):
        import httpx

        self.url = url
        self.dimension = dimension
        self.descriptor = f"remote:{url}"
        self._client = client or httpx.Client(timeout=timeout)

    def embed(self, text: str) -> np.ndarray:
        return self.embed_batch([text])[0]

    def embed_batch(self, texts: list[str]) -> list[np.ndarray]:
        import httpx

        for text in texts:
            if not text.strip():
                raise EmptyText()
        try:
            response = self._client.post(self.url, json={"input": texts})
        except httpx.HTTPError as exc:
            raise TransportError(str(exc)) from exc
        if response.status_code != 200:
            raise RemoteError(response.status_code, response.text)
        payload = response.json()
        vectors = [normalize_vector(v) for v in payload["embeddings"]]
        for vec in vectors:
            if vec.shape != (self.dimension,):
                raise RemoteError(200, f"expected dimension {self.dimension}, got {vec.shape}")
        return vectors
