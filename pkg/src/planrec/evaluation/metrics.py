"""Ranking metrics and fuzzy item-name matching."""

from __future__ import annotations

import math

from ..catalog import Catalog
from ..textutil import normalize_name

__all__ = [
    "normalize_name",
    "levenshtein",
    "similarity",
    "fuzzy_match",
    "ndcg_at_k",
    "recall_at_k",
]


def levenshtein(a: str, b: str) -> int:
    """Edit distance (insert/delete/substitute, unit costs)."""
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(
                min(
                    previous[j] + 1,
                    current[j - 1] + 1,
                    previous[j - 1] + (ca != cb),
                )
            )
        previous = current
    return previous[-1]


def similarity(a: str, b: str) -> float:
    """1 - levenshtein(norm(a), norm(b)) / max length; 1.0 when both normalize empty."""
    na, nb = normalize_name(a), normalize_name(b)
    longest = max(len(na), len(nb))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(na, nb) / longest


def fuzzy_match(name: str, catalog: Catalog, threshold: float = 0.9) -> str | None:
    """Best-matching item id if its title similarity reaches the threshold.

    Ties go to the ascending id; a name and title that both normalize to the
    empty string never match.
    """
    if not 0 < threshold <= 1:
        raise ValueError("threshold must be in (0, 1]")
    normalized = normalize_name(name)
    best_score = -1.0
    best_id: str | None = None
    for item in catalog.items():
        if not normalized and not normalize_name(item.title):
            continue
        score = similarity(name, item.title)
        if score > best_score or (score == best_score and best_id is not None and item.id < best_id):
            best_score = score
            best_id = item.id
    if best_id is not None and best_score >= threshold:
        return best_id
    return None


def ndcg_at_k(ranked: list[str], gt: set[str], k: int) -> float:
    """Binary-relevance NDCG; repeated ids count once, at their first position."""
    if k < 1:
        raise ValueError("k must be >= 1")
    relevant = set(gt)
    if not relevant:
        raise ValueError("ground truth must be non-empty")
    dcg = 0.0
    seen: set[str] = set()
    for position, item_id in enumerate(ranked[:k], start=1):
        if item_id in relevant and item_id not in seen:
            seen.add(item_id)
            dcg += 1.0 / math.log2(position + 1)
    idcg = sum(1.0 / math.log2(i + 1) for i in range(1, min(k, len(relevant)) + 1))
    return dcg / idcg


def recall_at_k(ranked: list[str], gt: set[str], k: int) -> float:
    if k < 1:
        raise ValueError("k must be >= 1")
    relevant = set(gt)
    if not relevant:
        raise ValueError("ground truth must be non-empty")
    return len(relevant & set(ranked[:k])) / len(relevant)
