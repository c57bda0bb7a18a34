"""Shared fixtures: the 5-item game catalog, its interaction log, and agent builders."""

from __future__ import annotations

import io
import json

import pytest

from planrec.agent import RecAgent
from planrec.backend import MockBackend, MockScript
from planrec.catalog import load_catalog, load_interactions
from planrec.embedding import HashingEmbedder
from planrec.ranker import fit_cooc
from planrec.retrieval import build_index

CATALOG_JSONL = b"""\
{"schema": [{"name": "genre", "kind": "text"}, {"name": "price", "kind": "number"}, {"name": "tags", "kind": "text-list"}]}
{"id": "g1", "title": "Eldervale", "description": "An open-world role-playing adventure.", "attributes": {"genre": "RPG", "price": 15, "tags": ["fantasy", "story-rich"]}}
{"id": "g2", "title": "Witcher-like Quest", "description": "A sprawling story-driven RPG.", "attributes": {"genre": "RPG", "price": 30, "tags": ["fantasy"]}}
{"id": "g3", "title": "Stardew Valley", "description": "A cozy farming simulation.", "attributes": {"genre": "farming", "price": 14.99, "tags": ["relaxing"]}}
{"id": "g4", "title": "Boom Arena", "description": "A fast arena shooter.", "attributes": {"genre": "shooter", "price": 20, "tags": ["competitive"]}}
{"id": "g5", "title": "Boom Arena 2", "description": "Co-op sequel to the arena hit.", "attributes": {"genre": "co-op", "price": 25, "tags": ["competitive", "co-op"]}}
"""

# u1: g1,g2  /  u2: g1,g2,g3 -- the hand-checked co-occurrence fixture
INTERACTIONS_TSV = b"u1\tg1\t1\nu1\tg2\t2\nu2\tg1\t3\nu2\tg2\t4\nu2\tg3\t5\n"

RPG_UTTERANCE = "I'm looking for an RPG under 20 dollars"
RPG_PLAN = json.dumps(
    {
        "plan": [
            {"tool": "retrieve", "input": {"hard": "genre = 'RPG' AND price < 20", "k": 5}},
            {"tool": "rank", "input": {"candidates": "$bus"}},
        ]
    }
)
RPG_REPLY = "You should try Eldervale, a great RPG at fifteen dollars."


def make_catalog():
    return load_catalog(io.BytesIO(CATALOG_JSONL))


@pytest.fixture
def catalog():
    return make_catalog()


@pytest.fixture
def interactions(catalog):
    return load_interactions(io.BytesIO(INTERACTIONS_TSV), catalog)


@pytest.fixture
def embedder():
    return HashingEmbedder()


@pytest.fixture
def index(catalog, embedder):
    return build_index(catalog, embedder)


@pytest.fixture
def cooc_model(interactions):
    return fit_cooc(interactions)


KG_TSV = b"g1\thas-genre\tRPG\ng2\thas-genre\tRPG\ng3\thas-genre\tfarming\n"

SCRIPT_RULES = [
    {
        "match": r"Produce the tool-execution plan.*an RPG under 20",
        "response": RPG_PLAN,
        "regex": True,
    },
    {"match": "an RPG under 20", "response": RPG_REPLY},
]


def rpg_script() -> MockScript:
    """Planner and responder rules for the standard RPG request."""
    return (
        MockScript()
        .on(r"Produce the tool-execution plan.*an RPG under 20", RPG_PLAN, regex=True)
        .on("an RPG under 20", RPG_REPLY)
    )


def make_config_tree(root, *, rules=None, default=None, doke=False, **overrides):
    """Write catalog/interactions/kg/script files plus config.json; returns the config path."""
    (root / "catalog.jsonl").write_bytes(CATALOG_JSONL)
    (root / "interactions.tsv").write_bytes(INTERACTIONS_TSV)
    (root / "kg.tsv").write_bytes(KG_TSV)
    script = {"rules": rules if rules is not None else SCRIPT_RULES}
    if default is not None:
        script["default"] = default
    (root / "script.json").write_text(json.dumps(script))
    config = {
        "catalog": "catalog.jsonl",
        "interactions": "interactions.tsv",
        "kg": "kg.tsv",
        "plan_log": "plans.jsonl",
        "backend": {"kind": "mock", "script": "script.json"},
    }
    if doke:
        config["doke"] = {"enabled": True}
    config.update(overrides)
    path = root / "config.json"
    path.write_text(json.dumps(config, indent=2))
    return path


@pytest.fixture
def config_path(tmp_path):
    return make_config_tree(tmp_path)


@pytest.fixture
def make_agent(catalog, index, cooc_model, interactions, embedder):
    """Builds a mock-backed agent; returns (agent, backend)."""

    def build(script: MockScript | None = None, **kwargs) -> tuple[RecAgent, MockBackend]:
        backend = MockBackend(script if script is not None else rpg_script())
        agent = RecAgent(
            catalog=catalog,
            index=index,
            backend=backend,
            cooc_model=cooc_model,
            interactions=interactions,
            embedder=embedder,
            **kwargs,
        )
        return agent, backend

    return build
