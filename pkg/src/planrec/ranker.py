"""Candidate ranking against user history via item co-occurrence counts.

The default model counts, for every item pair, how many users interacted
with both (each user counts once per pair), and scores a candidate by the
cosine-normalized sum of its co-occurrences with the history.  A remote
ranker speaking the same request shape can replace it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .catalog import InteractionStore
from .errors import RemoteError, TransportError, UnknownItem


def _pair(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class CoocModel:
    pair_counts: dict[tuple[str, str], int]
    user_counts: dict[str, int]  # distinct users per item
    known_items: frozenset[str]

    def cooc(self, a: str, b: str) -> int:
        return self.pair_counts.get(_pair(a, b), 0)

    def pop(self, item_id: str) -> int:
        return self.user_counts.get(item_id, 0)


@dataclass(frozen=True)
class RankRequest:
    candidates: tuple[str, ...]
    history: tuple[str, ...] = ()
    profile: str | None = None  # reserved for profile-aware rankers

    def __post_init__(self) -> None:
        deduped: list[str] = []
        seen: set[str] = set()
        for item_id in self.candidates:
            if item_id not in seen:
                seen.add(item_id)
                deduped.append(item_id)
        if not deduped:
            raise ValueError("candidates must be non-empty")
        object.__setattr__(self, "candidates", tuple(deduped))


def fit_cooc(interactions: InteractionStore) -> CoocModel:
    """Count item pair co-occurrences over per-user distinct item sets."""
    pair_counts: dict[tuple[str, str], int] = {}
    user_counts: dict[str, int] = {}
    for user in interactions.users():
        items = sorted(set(interactions.history(user)))
        for item_id in items:
            user_counts[item_id] = user_counts.get(item_id, 0) + 1
        for i, a in enumerate(items):
            for b in items[i + 1 :]:
                pair_counts[(a, b)] = pair_counts.get((a, b), 0) + 1
    known = (
        frozenset(interactions.catalog.ids())
        if interactions.catalog is not None
        else frozenset(user_counts)
    )
    return CoocModel(pair_counts, user_counts, known)


def score(model: CoocModel, history: list[str] | tuple[str, ...], item: str) -> float:
    """Sum of cooc(h, item) / sqrt(pop(h) * pop(item)) over distinct history items."""
    if item not in model.known_items:
        raise UnknownItem(item)
    pop_item = model.pop(item)
    if pop_item == 0:
        return 0.0
    total = 0.0
    for h in set(history):
        if h == item:
            continue
        pop_h = model.pop(h)
        if pop_h == 0:
            continue
        count = model.cooc(h, item)
        if count:
            total += count / math.sqrt(pop_h * pop_item)
    return total


def rank(model: CoocModel, request: RankRequest) -> list[tuple[str, float]]:
    """Candidates by score desc, then popularity desc, then id asc."""
    scored = [(item_id, score(model, request.history, item_id)) for item_id in request.candidates]
    scored.sort(key=lambda pair: (-pair[1], -model.pop(pair[0]), pair[0]))
    return scored


class CoocRanker:
    """Default ranker plug: wraps a fitted CoocModel."""

    def __init__(self, model: CoocModel):
        self.model = model

    def rank(self, request: RankRequest) -> list[tuple[str, float]]:
        return rank(self.model, request)


class RemoteRanker:
    """Ranker served over HTTP: POST candidates/history/profile, get a ranking."""

    def __init__(self, url: str, client=None, timeout: float = 30.0):
        import httpx

        self.url = url
        self._client = client or httpx.Client(timeout=timeout)

    def rank(self, request: RankRequest) -> list[tuple[str, float]]:
        import httpx

        body = {
            "candidates": list(request.candidates),
            "history": list(request.history),
            "profile": request.profile or "",
        }
        try:
            response = self._client.post(self.url, json=body)
        except httpx.HTTPError as exc:
            raise TransportError(str(exc)) from exc
        if response.status_code != 200:
            raise RemoteError(response.status_code, response.text)
        payload = response.json()
        return [(entry["id"], float(entry["score"])) for entry in payload["ranking"]]
