"""Prompt knowledge injection: extract, budget-select, verbalize, augment.

Three snippet sources feed the pipeline: item attribute facts, co-occurrence
signals tailored to the user's history, and bounded-hop connection paths in a
knowledge graph.  Selection is greedy under a token budget; the survivors are
verbalized into one block and inserted as a system message, leaving the base
prompt untouched.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import BinaryIO, Iterable

from .backend import ChatMessage, count_tokens
from .catalog import Catalog, Item
from .errors import MalformedRecord, UnknownEntity, UnknownItem
from .ranker import CoocModel

SNIPPET_KINDS = ("attribute-fact", "cooccurrence", "kg-path")
_KIND_ORDER = {kind: i for i, kind in enumerate(SNIPPET_KINDS)}

KNOWLEDGE_HEADER = "Relevant domain knowledge:"


@dataclass(frozen=True)
class KnowledgeSnippet:
    kind: str
    text: str
    relevance: float
    token_cost: int = field(init=False)

    def __post_init__(self) -> None:
        if self.kind not in SNIPPET_KINDS:
            raise ValueError(f"invalid snippet kind {self.kind!r}")
        if not self.text:
            raise ValueError("snippet text must be non-empty")
        if self.relevance < 0:
            raise ValueError("relevance must be >= 0")
        object.__setattr__(self, "token_cost", count_tokens(self.text))


@dataclass(frozen=True)
class Triple:
    head: str
    relation: str
    tail: str


class KnowledgeGraph:
    """Directed triples over item and attribute-value entities."""

    def __init__(self, triples: Iterable[Triple]):
        self.triples: frozenset[Triple] = frozenset(triples)
        adjacency: dict[str, list[tuple[str, str, bool]]] = {}
        for t in self.triples:
            if not t.relation:
                raise ValueError("relations must be non-empty strings")
            # forward hop and the same edge traversed backwards
            adjacency.setdefault(t.head, []).append((t.tail, t.relation, True))
            adjacency.setdefault(t.tail, []).append((t.head, t.relation, False))
        self._adjacency = {k: sorted(v) for k, v in adjacency.items()}

    @property
    def entities(self) -> set[str]:
        return set(self._adjacency.keys())

    def neighbors(self, entity: str) -> list[tuple[str, str, bool]]:
        return self._adjacency.get(entity, [])

    def __len__(self) -> int:
        return len(self.triples)


def load_kg(source: BinaryIO | Iterable[bytes]) -> KnowledgeGraph:
    """Read TSV triples `head<TAB>relation<TAB>tail`."""
    triples = []
    for line_no, raw in enumerate(source, start=1):
        line = raw.decode("utf-8").rstrip("\r\n")
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise MalformedRecord(line_no, f"expected 3 tab-separated fields, got {len(fields)}")
        head, relation, tail = fields
        if not relation:
            raise MalformedRecord(line_no, "empty relation")
        triples.append(Triple(head, relation, tail))
    return KnowledgeGraph(triples)


def extract_attribute_facts(item: Item, whitelist: Iterable[str]) -> list[KnowledgeSnippet]:
    """One sentence per whitelisted attribute the item carries."""
    snippets = []
    for attr in whitelist:
        if attr not in item.attributes:
            continue
        value = item.attributes[attr]
        rendered = ", ".join(value) if isinstance(value, list) else str(value)
        snippets.append(
            KnowledgeSnippet(
                kind="attribute-fact",
                text=f"{item.title}'s {attr} is {rendered}.",
                relevance=1.0,
            )
        )
    return snippets


def extract_cooc_signals(
    model: CoocModel,
    catalog: Catalog,
    history: Iterable[str],
    candidate: str,
    top_n: int,
) -> list[KnowledgeSnippet]:
    """Strongest co-engagement signals between history items and a candidate."""
    if top_n < 1:
        raise ValueError("top_n must be >= 1")
    if candidate not in model.known_items:
        raise UnknownItem(candidate)
    pop_c = model.pop(candidate)
    contributions: list[tuple[float, str, int]] = []
    for h in sorted(set(history)):
        if h == candidate:
            continue
        pop_h = model.pop(h)
        if pop_h == 0 or pop_c == 0:
            continue
        count = model.cooc(h, candidate)
        if count == 0:
            continue
        contributions.append((count / (pop_h * pop_c) ** 0.5, h, count))
    contributions.sort(key=lambda c: (-c[0], c[1]))
    snippets = []
    for contribution, h, count in contributions[:top_n]:
        title_h = catalog[h].title if h in catalog else h
        title_c = catalog[candidate].title if candidate in catalog else candidate
        snippets.append(
            KnowledgeSnippet(
                kind="cooccurrence",
                text=(
                    f"Users who engaged with {title_h} also engaged with "
                    f"{title_c} ({count} co-occurrences)."
                ),
                relevance=contribution,
            )
        )
    return snippets


def _enumerate_paths(
    kg: KnowledgeGraph, source: str, target: str, max_hops: int
) -> list[list[tuple[str, str, str, bool]]]:
    """All simple paths source -> target of length <= max_hops, either edge direction."""
    paths: list[list[tuple[str, str, str, bool]]] = []

    def walk(node: str, visited: set[str], hops: list[tuple[str, str, str, bool]]) -> None:
        if len(hops) >= max_hops:
            return
        for neighbor, relation, forward in kg.neighbors(node):
            if neighbor in visited:
                continue
            step = (node, relation, neighbor, forward)
            if neighbor == target:
                paths.append(hops + [step])
                continue
            walk(neighbor, visited | {neighbor}, hops + [step])

    walk(source, {source}, [])
    return paths


def render_path(hops: list[tuple[str, str, str, bool]]) -> str:
    """One line per path, arrows oriented by the stored edge direction."""
    text = hops[0][0]
    for node, relation, neighbor, forward in hops:
        arrow = f" —{relation}→ " if forward else f" ←{relation}— "
        text += f"{arrow}{neighbor}"
    return text


def extract_kg_paths(
    kg: KnowledgeGraph,
    sources: Iterable[str],
    target: str,
    max_hops: int,
) -> list[KnowledgeSnippet]:
    """Connection paths from any source to the target, relevance 1/length."""
    if not 1 <= max_hops <= 2:
        raise ValueError("max_hops must be 1 or 2")
    entities = kg.entities
    if target not in entities:
        raise UnknownEntity(target)
    snippets = []
    for source in sorted(set(sources)):
        if source not in entities:
            raise UnknownEntity(source)
        if source == target:
            continue  # no zero-length paths
        paths = _enumerate_paths(kg, source, target, max_hops)
        rendered = sorted((render_path(p), len(p)) for p in paths)
        for text, length in rendered:
            snippets.append(
                KnowledgeSnippet(kind="kg-path", text=text, relevance=1.0 / length)
            )
    return snippets


def select_knowledge(
    snippets: Iterable[KnowledgeSnippet], token_budget: int
) -> list[KnowledgeSnippet]:
    """Greedy pick by descending relevance; a snippet is taken iff it fits."""
    if token_budget < 0:
        raise ValueError("token_budget must be >= 0")
    ordered = sorted(snippets, key=lambda s: (-s.relevance, _KIND_ORDER[s.kind], s.text))
    selected = []
    remaining = token_budget
    for snippet in ordered:
        if snippet.token_cost <= remaining:
            selected.append(snippet)
            remaining -= snippet.token_cost
    return selected


def verbalize(snippets: Iterable[KnowledgeSnippet]) -> str:
    """Join snippets under a fixed header; empty input yields empty text."""
    lines = [s.text for s in snippets]
    if not lines:
        return ""
    return "\n".join([KNOWLEDGE_HEADER] + lines)


def augment_prompt(messages: list[ChatMessage], knowledge: str) -> list[ChatMessage]:
    """Insert knowledge as a system message just before the final user message."""
    if not knowledge:
        return messages
    insertion = ChatMessage("system", knowledge)
    for i in range(len(messages) - 1, -1, -1):
        if messages[i].role == "user":
            return messages[:i] + [insertion] + messages[i:]
    return messages + [insertion]
