"""Service configuration (single JSON document) and agent assembly.

Relative paths resolve against the config file's directory.  Secrets never
appear in the file itself: the backend block names an environment variable
holding the API key.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..agent import (
    AgentConfig,
    DemonstrationLibrary,
    KnowledgeSettings,
    ProfileStore,
    RecAgent,
    build_default_registry,
    load_demo_library,
)
from ..backend import ChatBackend, HttpBackend, MockBackend, MockScript
from ..catalog import InteractionStore, load_catalog, load_interactions
from ..doke import load_kg
from ..embedding import HashingEmbedder
from ..ranker import fit_cooc
from ..retrieval import build_index


@dataclass(frozen=True)
class BackendSettings:
    kind: str  # "mock" | "http"
    url: str | None = None
    api_key_env: str | None = None
    script: Path | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("mock", "http"):
            raise ValueError(f"backend.kind must be 'mock' or 'http', not {self.kind!r}")
        if self.kind == "http" and not self.url:
            raise ValueError("backend.url is required for kind 'http'")
        if self.kind == "mock" and self.script is None:
            raise ValueError("backend.script is required for kind 'mock'")


@dataclass(frozen=True)
class DokeSettings:
    enabled: bool = False
    budget_tokens: int = 200
    top_n: int = 3
    max_hops: int = 2


@dataclass(frozen=True)
class EvalSettings:
    fuzzy_threshold: float = 0.9
    ks: tuple[int, ...] = (1, 5, 10)

    def __post_init__(self) -> None:
        if not 0 < self.fuzzy_threshold <= 1:
            raise ValueError("eval.fuzzy_threshold must be in (0, 1]")
        if not self.ks or any(k < 1 for k in self.ks):
            raise ValueError("eval.ks must be positive integers")


@dataclass(frozen=True)
class ServiceConfig:
    catalog: Path
    interactions: Path | None = None
    kg: Path | None = None
    demos: Path | None = None
    profiles: Path = Path("profiles")
    plan_log: Path | None = None
    listen: str = "127.0.0.1:8765"
    backend: BackendSettings = field(
        default_factory=lambda: BackendSettings(kind="mock", script=Path("script.json"))
    )
    doke: DokeSettings = field(default_factory=DokeSettings)
    eval: EvalSettings = field(default_factory=EvalSettings)

    @property
    def host(self) -> str:
        return self.listen.rsplit(":", 1)[0]

    @property
    def port(self) -> int:
        return int(self.listen.rsplit(":", 1)[1])


def _parse_listen(listen: str) -> None:
    parts = listen.rsplit(":", 1)
    if len(parts) != 2 or not parts[0]:
        raise ValueError(f"listen must be host:port, not {listen!r}")
    port = int(parts[1])
    if not 0 < port < 65536:
        raise ValueError(f"port out of range: {port}")


def load_config(path: str | Path) -> ServiceConfig:
    """Parse and validate a config file; referenced paths must exist."""
    path = Path(path)
    data = json.loads(path.read_text("utf-8"))
    base = path.parent

    def resolve(key: str, required: bool = False) -> Path | None:
        value = data.get(key)
        if value is None:
            if required:
                raise ValueError(f"config is missing {key!r}")
            return None
        return base / value

    backend_data = data.get("backend", {})
    script = backend_data.get("script")
    backend = BackendSettings(
        kind=backend_data.get("kind", "mock"),
        url=backend_data.get("url"),
        api_key_env=backend_data.get("api_key_env"),
        script=base / script if script else None,
    )
    doke_data = data.get("doke", {})
    eval_data = data.get("eval", {})
    config = ServiceConfig(
        catalog=resolve("catalog", required=True),
        interactions=resolve("interactions"),
        kg=resolve("kg"),
        demos=resolve("demos"),
        profiles=base / data.get("profiles", "profiles"),
        plan_log=resolve("plan_log"),
        listen=data.get("listen", "127.0.0.1:8765"),
        backend=backend,
        doke=DokeSettings(
            enabled=bool(doke_data.get("enabled", False)),
            budget_tokens=int(doke_data.get("budget_tokens", 200)),
            top_n=int(doke_data.get("top_n", 3)),
            max_hops=int(doke_data.get("max_hops", 2)),
        ),
        eval=EvalSettings(
            fuzzy_threshold=float(eval_data.get("fuzzy_threshold", 0.9)),
            ks=tuple(int(k) for k in eval_data.get("ks", (1, 5, 10))),
        ),
    )
    _parse_listen(config.listen)
    for name, ref in (
        ("catalog", config.catalog),
        ("interactions", config.interactions),
        ("kg", config.kg),
        ("demos", config.demos),
        ("backend.script", config.backend.script),
    ):
        if ref is not None and not ref.exists():
            raise ValueError(f"{name} path does not exist: {ref}")
    return config


def build_backend(settings: BackendSettings) -> ChatBackend:
    if settings.kind == "mock":
        script = MockScript.from_dict(json.loads(settings.script.read_text("utf-8")))
        return MockBackend(script)
    return HttpBackend(settings.url, api_key_env=settings.api_key_env)


def build_agent(config: ServiceConfig) -> RecAgent:
    """Load every artifact the config names and assemble a ready agent."""
    with open(config.catalog, "rb") as fh:
        catalog = load_catalog(fh)
    if config.interactions:
        with open(config.interactions, "rb") as fh:
            interactions = load_interactions(fh, catalog)
    else:
        interactions = InteractionStore(by_user={}, catalog=catalog)
    embedder = HashingEmbedder()
    registry = build_default_registry()
    if config.demos:
        with open(config.demos, "rb") as fh:
            demos = load_demo_library(fh, registry)
    else:
        demos = DemonstrationLibrary()
    knowledge = None
    if config.doke.enabled:
        kg = None
        if config.kg:
            with open(config.kg, "rb") as fh:
                kg = load_kg(fh)
        knowledge = KnowledgeSettings(
            kg=kg,
            budget_tokens=config.doke.budget_tokens,
            top_n=config.doke.top_n,
            max_hops=config.doke.max_hops,
        )
    return RecAgent(
        catalog=catalog,
        index=build_index(catalog, embedder),
        backend=build_backend(config.backend),
        cooc_model=fit_cooc(interactions),
        interactions=interactions,
        embedder=embedder,
        registry=registry,
        demos=demos,
        profile_store=ProfileStore(config.profiles),
        config=AgentConfig(knowledge=knowledge, plan_log_path=config.plan_log),
    )
