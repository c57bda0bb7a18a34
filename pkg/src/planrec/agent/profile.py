"""User preference memory: session-local short-term tier, persisted long-term tier."""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from ..backend import BYTES_PER_TOKEN, count_tokens


@dataclass
class UserProfile:
    user_id: str
    long_term_weights: dict[str, float] = field(default_factory=dict)
    long_term_disliked: set[str] = field(default_factory=set)
    short_intent: str = ""
    session_liked: set[str] = field(default_factory=set)
    session_disliked: set[str] = field(default_factory=set)

    def apply(
        self,
        liked: list[str] | None = None,
        disliked: list[str] | None = None,
        intent: str | None = None,
    ) -> None:
        """Fold one turn's events into both tiers; a later signal overwrites."""
        if intent is not None:
            self.short_intent = intent
        for item_id in liked or []:
            self.session_liked.add(item_id)
            self.session_disliked.discard(item_id)
            self.long_term_weights[item_id] = self.long_term_weights.get(item_id, 0.0) + 1.0
            self.long_term_disliked.discard(item_id)
        for item_id in disliked or []:
            self.session_disliked.add(item_id)
            self.session_liked.discard(item_id)
            self.long_term_disliked.add(item_id)
            self.long_term_weights[item_id] = 0.0

    def clear_session(self) -> None:
        self.short_intent = ""
        self.session_liked.clear()
        self.session_disliked.clear()

    def is_empty(self) -> bool:
        return not (
            self.short_intent
            or self.session_liked
            or self.session_disliked
            or any(w > 0 for w in self.long_term_weights.values())
            or self.long_term_disliked
        )

    def summary(self, budget: int, title_of: Callable[[str], str] | None = None) -> str:
        """Short-term intent first, then session signals, then long-term likes.

        Truncated so the result never exceeds the token budget; the truncated
        text is always a prefix of the full summary.
        """
        if budget <= 0 or self.is_empty():
            return ""
        name = title_of or (lambda item_id: item_id)
        lines = []
        if self.short_intent:
            lines.append(f"Current request: {self.short_intent}")
        if self.session_liked:
            lines.append("Liked this session: " + ", ".join(sorted(name(i) for i in self.session_liked)))
        if self.session_disliked:
            lines.append("Disliked this session: " + ", ".join(sorted(name(i) for i in self.session_disliked)))
        favorites = sorted(
            (i for i, w in self.long_term_weights.items() if w > 0),
            key=lambda i: (-self.long_term_weights[i], i),
        )
        if favorites:
            lines.append("Long-term favorites: " + ", ".join(name(i) for i in favorites))
        if self.long_term_disliked:
            lines.append("Avoid: " + ", ".join(sorted(name(i) for i in self.long_term_disliked)))
        full = "\n".join(lines)
        if count_tokens(full) <= budget:
            return full
        data = full.encode("utf-8")[: budget * BYTES_PER_TOKEN]
        return data.decode("utf-8", errors="ignore")


class ProfileStore:
    """One JSON file per user id; writes are atomic and serialized per user."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _lock_for(self, user_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(user_id, threading.Lock())

    def _path(self, user_id: str) -> Path:
        safe = "".join(ch if ch.isalnum() or ch in "-_" else "_" for ch in user_id)
        return self.directory / f"{safe}.json"

    def load(self, user_id: str) -> UserProfile:
        path = self._path(user_id)
        profile = UserProfile(user_id)
        if path.exists():
            with self._lock_for(user_id):
                data = json.loads(path.read_text("utf-8"))
            profile.long_term_weights = {k: float(v) for k, v in data.get("weights", {}).items()}
            profile.long_term_disliked = set(data.get("disliked", []))
        return profile

    def save(self, profile: UserProfile) -> None:
        path = self._path(profile.user_id)
        payload = {
            "weights": {k: profile.long_term_weights[k] for k in sorted(profile.long_term_weights)},
            "disliked": sorted(profile.long_term_disliked),
        }
        text = json.dumps(payload, indent=2, sort_keys=True)
        with self._lock_for(profile.user_id):
            tmp = path.with_suffix(".tmp")
            tmp.write_text(text, "utf-8")
            os.replace(tmp, path)
