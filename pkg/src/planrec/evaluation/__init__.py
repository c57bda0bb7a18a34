"""Five-dimension evaluation toolkit: generative, embedding, conversation, judged pairs."""

from .embedding import EmbEvalCase, eval_embedding, load_embedding_cases
from .figures import render_figures
from .generative import GenEvalCase, eval_generative, load_generative_cases
from .judging import (
    CHITCHAT_RUBRIC,
    EXPLANATION_RUBRIC,
    RUBRICS,
    JudgeVerdict,
    JudgedCase,
    eval_judged,
    load_judged_cases,
    pairwise_judge,
)
from .metrics import (
    fuzzy_match,
    levenshtein,
    ndcg_at_k,
    normalize_name,
    recall_at_k,
    similarity,
)
from .report import EvalReport, aggregate_report, format_table, write_report
from .simulator import (
    SimulatorScript,
    eval_conversation,
    load_scripts,
    mentions_title,
    simulate_conversation,
)

__all__ = [
    "CHITCHAT_RUBRIC",
    "EXPLANATION_RUBRIC",
    "EmbEvalCase",
    "EvalReport",
    "GenEvalCase",
    "JudgeVerdict",
    "JudgedCase",
    "RUBRICS",
    "SimulatorScript",
    "aggregate_report",
    "eval_conversation",
    "eval_embedding",
    "eval_generative",
    "eval_judged",
    "format_table",
    "fuzzy_match",
    "levenshtein",
    "load_embedding_cases",
    "load_generative_cases",
    "load_judged_cases",
    "load_scripts",
    "mentions_title",
    "ndcg_at_k",
    "normalize_name",
    "pairwise_judge",
    "recall_at_k",
    "render_figures",
    "similarity",
    "simulate_conversation",
    "write_report",
]
