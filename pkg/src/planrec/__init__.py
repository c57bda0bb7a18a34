"""Conversational recommender toolkit: catalog, retrieval, ranking, planning agent,
knowledge-augmented prompting, evaluation harness, and an HTTP service."""

__version__ = "0.1.0"

from .errors import PlanrecError

__all__ = ["PlanrecError", "__version__"]
