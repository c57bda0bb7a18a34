"""Case-file loaders shared by the evaluation dimensions (JSON-lines)."""

from __future__ import annotations

import json
from typing import BinaryIO, Iterable, Iterator

from ..errors import MalformedRecord


def iter_jsonl(source: BinaryIO | Iterable[bytes]) -> Iterator[tuple[int, dict]]:
    """Yield (line number, object) for each non-blank line; objects only."""
    for line_no, raw in enumerate(source, start=1):
        line = raw.decode("utf-8").strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedRecord(line_no, f"not valid JSON: {exc}") from None
        if not isinstance(obj, dict):
            raise MalformedRecord(line_no, "expected a JSON object")
        yield line_no, obj


def require(obj: dict, key: str, line_no: int) -> object:
    if key not in obj:
        raise MalformedRecord(line_no, f"missing {key!r}")
    return obj[key]


def string_list(value: object, key: str, line_no: int) -> list[str]:
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise MalformedRecord(line_no, f"{key!r} must be a list of strings")
    return value
