"""Candidate retrieval: hard filtering, semantic search, and their composition.

Hard conditions run through the catalog query engine; soft conditions score
the whole index by cosine similarity.  When both are present the hard result
set is a strict pre-filter whose survivors are re-ranked by the soft query.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .catalog import Catalog, Item
from .embedding import Embedder
from .errors import EmptyText
from .query import Query, run_query


@dataclass(frozen=True)
class RetrievalRequest:
    hard: Query | None = None
    soft: str | None = None
    k: int = 10

    def __post_init__(self) -> None:
        if self.hard is None and self.soft is None:
            raise ValueError("at least one of hard/soft must be present")
        if self.k < 1:
            raise ValueError("k must be >= 1")


def item_text(item: Item, catalog: Catalog) -> str:
    """Fixed text template an item is indexed under: title, description, attributes."""
    parts = []
    for attr in catalog.schema:
        if attr.name not in item.attributes:
            continue
        value = item.attributes[attr.name]
        rendered = ", ".join(value) if isinstance(value, list) else str(value)
        parts.append(f"{attr.name}: {rendered}")
    return f"{item.title}. {item.description}. " + "; ".join(parts)


class ItemIndex:
    """Immutable id-aligned embedding matrix over a catalog."""

    def __init__(self, ids: list[str], matrix: np.ndarray, descriptor: str):
        if matrix.shape[0] != len(ids):
            raise ValueError("one vector per item required")
        self.ids: tuple[str, ...] = tuple(ids)
        self.matrix = matrix
        self.matrix.setflags(write=False)
        self.descriptor = descriptor

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[1]


def build_index(catalog: Catalog, embedder: Embedder) -> ItemIndex:
    """Embed every catalog item under the fixed text template."""
    if len(catalog) == 0:
        raise ValueError("catalog is empty")
    items = catalog.items()
    texts = [item_text(item, catalog) for item in items]
    try:
        vectors = embedder.embed_batch(texts)
    except EmptyText:
        raise
    matrix = np.vstack(vectors)
    return ItemIndex([item.id for item in items], matrix, embedder.descriptor)


def save_index(index: ItemIndex, path) -> None:
    np.savez(
        path,
        ids=np.array(index.ids),
        matrix=index.matrix,
        descriptor=np.array([index.descriptor]),
    )


def load_index(path) -> ItemIndex:
    data = np.load(path, allow_pickle=False)
    return ItemIndex(
        ids=[str(i) for i in data["ids"]],
        matrix=data["matrix"],
        descriptor=str(data["descriptor"][0]),
    )


def search_soft(
    index: ItemIndex, embedder: Embedder, query: str, k: int
) -> list[tuple[str, float]]:
    """Top-k items by cosine similarity, ties broken by ascending id."""
    if k < 1:
        raise ValueError("k must be >= 1")
    qvec = embedder.embed(query)
    scores = index.matrix @ qvec
    order = sorted(range(len(index.ids)), key=lambda i: (-scores[i], index.ids[i]))
    return [(index.ids[i], float(scores[i])) for i in order[:k]]


def retrieve(
    catalog: Catalog,
    index: ItemIndex,
    embedder: Embedder,
    request: RetrievalRequest,
) -> list[str]:
    """Run a retrieval request; hard conditions are never relaxed."""
    if request.hard is not None and request.soft is None:
        return run_query(catalog, request.hard)[: request.k]
    if request.hard is None:
        return [item_id for item_id, _ in search_soft(index, embedder, request.soft, request.k)]
    survivors = run_query(catalog, request.hard)
    if not survivors:
        return []
    qvec = embedder.embed(request.soft)
    position = {item_id: i for i, item_id in enumerate(index.ids)}
    scored = [(item_id, float(index.matrix[position[item_id]] @ qvec)) for item_id in survivors]
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return [item_id for item_id, _ in scored[: request.k]]
