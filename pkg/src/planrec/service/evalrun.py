"""Dispatch an evaluation dimension against configured artifacts."""

from __future__ import annotations

from pathlib import Path

from ..agent import RecAgent
from ..catalog import load_catalog
from ..embedding import HashingEmbedder
from ..evaluation import (
    RUBRICS,
    EvalReport,
    eval_conversation,
    eval_embedding,
    eval_generative,
    eval_judged,
    load_embedding_cases,
    load_generative_cases,
    load_judged_cases,
    load_scripts,
)
from .config import ServiceConfig, build_agent, build_backend

DIMENSIONS = ("generative", "embedding", "conversation", "explanation", "chitchat")


def agent_session_factory(agent: RecAgent):
    """Fresh session per conversation; the send function runs one full turn."""

    def factory():
        session = agent.new_session()

        def send(text: str) -> str:
            return agent.run_turn(session, text).reply

        return send

    return factory


def run_eval(config: ServiceConfig, dimension: str, cases_path: str | Path) -> EvalReport:
    """Evaluate one dimension from a JSON-lines case file."""
    if dimension not in DIMENSIONS:
        raise ValueError(
            f"unknown dimension {dimension!r}; expected one of {', '.join(DIMENSIONS)}"
        )
    with open(config.catalog, "rb") as fh:
        catalog = load_catalog(fh)
    with open(cases_path, "rb") as fh:
        if dimension == "generative":
            cases = load_generative_cases(fh)
            return eval_generative(
                cases, catalog, config.eval.ks, config.eval.fuzzy_threshold
            )
        if dimension == "embedding":
            cases = load_embedding_cases(fh)
            return eval_embedding(HashingEmbedder(), catalog, cases, config.eval.ks)
        if dimension == "conversation":
            scripts = load_scripts(fh)
            agent = build_agent(config)
            return eval_conversation(
                agent_session_factory(agent),
                scripts,
                agent.catalog,
                config.eval.fuzzy_threshold,
            )
        cases = load_judged_cases(fh)
        backend = build_backend(config.backend)
        return eval_judged(backend, cases, RUBRICS[dimension], dimension)
