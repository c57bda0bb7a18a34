"""Text normalization shared by title lookup and fuzzy name matching."""

from __future__ import annotations


def normalize_name(text: str) -> str:
    """Casefold, map non-alphanumerics to spaces, collapse runs, trim."""
    folded = text.casefold()
    cleaned = "".join(ch if ch.isalnum() else " " for ch in folded)
    return " ".join(cleaned.split())
