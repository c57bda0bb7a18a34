"""Item catalog and interaction log: schemas, loaders, title lookup.

Catalog files are JSON-lines: the first line holds the attribute schema,
every following line one item.  Interaction logs are TSV with
``user_id<TAB>item_id<TAB>timestamp`` rows.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable, Mapping

from .errors import DuplicateId, MalformedRecord
from .textutil import normalize_name

ATTRIBUTE_KINDS = ("text", "number", "text-list")
_NAME_RE = re.compile(r"^[a-zA-Z_][a-zA-Z0-9_]*$")


@dataclass(frozen=True)
class AttributeSchema:
    name: str
    kind: str  # "text" | "number" | "text-list"

    def __post_init__(self) -> None:
        if not _NAME_RE.match(self.name):
            raise ValueError(f"invalid attribute name {self.name!r}")
        if self.kind not in ATTRIBUTE_KINDS:
            raise ValueError(f"invalid attribute kind {self.kind!r}")


@dataclass
class Item:
    id: str
    title: str
    description: str
    attributes: dict[str, object]
    popularity: int = 0  # interaction count, attached by load_interactions


@dataclass(frozen=True)
class InteractionRecord:
    user_id: str
    item_id: str
    timestamp: int


class Catalog:
    """Immutable item inventory keyed by id, with a typed attribute schema."""

    def __init__(self, schema: Iterable[AttributeSchema], items: Iterable[Item]):
        self.schema: tuple[AttributeSchema, ...] = tuple(schema)
        names = [a.name for a in self.schema]
        if len(set(names)) != len(names):
            raise ValueError("attribute names must be unique within a catalog")
        self.kinds: dict[str, str] = {a.name: a.kind for a in self.schema}
        self._items: dict[str, Item] = {}
        self._by_norm_title: dict[str, list[str]] = {}
        for item in items:
            if item.id in self._items:
                raise DuplicateId(item.id)
            self._items[item.id] = item
            self._by_norm_title.setdefault(normalize_name(item.title), []).append(item.id)

    def __len__(self) -> int:
        return len(self._items)

    def __contains__(self, item_id: str) -> bool:
        return item_id in self._items

    def items(self) -> list[Item]:
        return list(self._items.values())

    def ids(self) -> list[str]:
        return list(self._items.keys())

    def get(self, item_id: str) -> Item | None:
        return self._items.get(item_id)

    def __getitem__(self, item_id: str) -> Item:
        return self._items[item_id]


@dataclass
class InteractionStore:
    """Per-user interaction histories, sorted by timestamp ascending."""

    by_user: dict[str, list[InteractionRecord]]
    dropped: int = 0
    catalog: Catalog | None = field(default=None, repr=False)

    def users(self) -> list[str]:
        return list(self.by_user.keys())

    def history(self, user_id: str) -> list[str]:
        return [r.item_id for r in self.by_user.get(user_id, [])]

    def __len__(self) -> int:
        return sum(len(v) for v in self.by_user.values())


def _check_value(kind: str, value: object) -> bool:
    if kind == "text":
        return isinstance(value, str)
    if kind == "number":
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if kind == "text-list":
        return isinstance(value, list) and all(isinstance(v, str) for v in value)
    return False


def load_catalog(source: BinaryIO | Iterable[bytes]) -> Catalog:
    """Read a JSON-lines catalog: schema line first, then one item per line."""
    lines = iter(source)
    try:
        first = next(lines)
    except StopIteration:
        raise MalformedRecord(1, "missing schema line") from None
    try:
        head = json.loads(first.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedRecord(1, f"schema line is not valid JSON: {exc}") from None
    if not isinstance(head, dict) or "schema" not in head:
        raise MalformedRecord(1, 'schema line must be {"schema": [...]}')
    schema: list[AttributeSchema] = []
    for entry in head["schema"]:
        try:
            schema.append(AttributeSchema(entry["name"], entry["kind"]))
        except (TypeError, KeyError, ValueError) as exc:
            raise MalformedRecord(1, f"bad schema entry {entry!r}: {exc}") from None
    kinds = {a.name: a.kind for a in schema}
    if len(kinds) != len(schema):
        raise MalformedRecord(1, "duplicate attribute name in schema")

    items: list[Item] = []
    for line_no, raw in enumerate(lines, start=2):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise MalformedRecord(line_no, f"not valid JSON: {exc}") from None
        if not isinstance(obj, dict):
            raise MalformedRecord(line_no, "item line must be a JSON object")
        item_id = obj.get("id")
        title = obj.get("title")
        if not isinstance(item_id, str) or not item_id:
            raise MalformedRecord(line_no, "item id must be a non-empty string")
        if not isinstance(title, str) or not title:
            raise MalformedRecord(line_no, "title must be non-empty text")
        description = obj.get("description", "")
        if not isinstance(description, str):
            raise MalformedRecord(line_no, "description must be text")
        attributes = obj.get("attributes", {})
        if not isinstance(attributes, Mapping):
            raise MalformedRecord(line_no, "attributes must be an object")
        for name, value in attributes.items():
            if name not in kinds:
                raise MalformedRecord(line_no, f"attribute {name!r} absent from schema")
            if not _check_value(kinds[name], value):
                raise MalformedRecord(
                    line_no, f"attribute {name!r} is not of kind {kinds[name]!r}"
                )
        items.append(Item(item_id, title, description, dict(attributes)))
    return Catalog(schema, items)


def load_interactions(source: BinaryIO | Iterable[bytes], catalog: Catalog) -> InteractionStore:
    """Read a TSV interaction log; attaches popularity counts to the catalog.

    Records whose item id is not in the catalog are dropped and counted,
    not silently ignored.
    """
    by_user: dict[str, list[InteractionRecord]] = {}
    counts: dict[str, int] = {}
    dropped = 0
    for line_no, raw in enumerate(source, start=1):
        try:
            line = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedRecord(line_no, f"not valid UTF-8: {exc}") from None
        line = line.rstrip("\r\n")
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise MalformedRecord(line_no, f"expected 3 tab-separated fields, got {len(fields)}")
        user_id, item_id, ts_text = fields
        try:
            timestamp = int(ts_text)
        except ValueError:
            raise MalformedRecord(line_no, f"timestamp {ts_text!r} is not an integer") from None
        if timestamp < 0:
            raise MalformedRecord(line_no, "timestamp must be >= 0")
        if item_id not in catalog:
            dropped += 1
            continue
        by_user.setdefault(user_id, []).append(InteractionRecord(user_id, item_id, timestamp))
        counts[item_id] = counts.get(item_id, 0) + 1
    for records in by_user.values():
        records.sort(key=lambda r: r.timestamp)
    for item in catalog.items():
        item.popularity = counts.get(item.id, 0)
    return InteractionStore(by_user=by_user, dropped=dropped, catalog=catalog)


def find_by_title(catalog: Catalog, title: str) -> str | None:
    """Exact-title lookup after normalization; ties resolve to the lowest id."""
    ids = catalog._by_norm_title.get(normalize_name(title))
    if not ids:
        return None
    return min(ids)
