"""Operational shell: config loading, HTTP service, evaluation runs."""

from .app import create_app
from .config import (
    BackendSettings,
    DokeSettings,
    EvalSettings,
    ServiceConfig,
    build_agent,
    build_backend,
    load_config,
)
from .evalrun import DIMENSIONS, agent_session_factory, run_eval

__all__ = [
    "BackendSettings",
    "DIMENSIONS",
    "DokeSettings",
    "EvalSettings",
    "ServiceConfig",
    "agent_session_factory",
    "build_agent",
    "build_backend",
    "create_app",
    "load_config",
    "run_eval",
]
