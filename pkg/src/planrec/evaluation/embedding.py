"""Embedding-based recommendation evaluation: full-catalog cosine rankings."""

from __future__ import annotations

from dataclasses import dataclass
from typing import BinaryIO, Iterable

from ..catalog import Catalog
from ..embedding import Embedder
from ..errors import MalformedRecord
from ..retrieval import ItemIndex, build_index, search_soft
from .cases import iter_jsonl, require, string_list
from .metrics import ndcg_at_k, recall_at_k
from .report import EvalReport


@dataclass(frozen=True)
class EmbEvalCase:
    query: str
    gt: frozenset[str]

    def __post_init__(self) -> None:
        if not self.gt:
            raise ValueError("ground truth must be non-empty")


def eval_embedding(
    embedder: Embedder,
    catalog: Catalog,
    cases: list[EmbEvalCase],
    ks: Iterable[int],
    index: ItemIndex | None = None,
) -> EvalReport:
    ks = list(ks)
    if index is None and cases:
        index = build_index(catalog, embedder)
    sums = {k: [0.0, 0.0] for k in ks}
    for case in cases:
        ranked = [i for i, _ in search_soft(index, embedder, case.query, len(catalog))]
        gt = set(case.gt)
        for k in ks:
            sums[k][0] += ndcg_at_k(ranked, gt, k)
            sums[k][1] += recall_at_k(ranked, gt, k)
    metrics = {}
    if cases:
        for k in ks:
            metrics[f"ndcg@{k}"] = sums[k][0] / len(cases)
            metrics[f"recall@{k}"] = sums[k][1] / len(cases)
    return EvalReport(dimension="embedding", cases=len(cases), metrics=metrics)


def load_embedding_cases(source: BinaryIO | Iterable[bytes]) -> list[EmbEvalCase]:
    """JSON-lines {"query": text, "gt": [ids]}."""
    cases = []
    for line_no, obj in iter_jsonl(source):
        query = require(obj, "query", line_no)
        if not isinstance(query, str):
            raise MalformedRecord(line_no, "'query' must be a string")
        gt = string_list(require(obj, "gt", line_no), "gt", line_no)
        if not gt:
            raise MalformedRecord(line_no, "ground truth must be non-empty")
        cases.append(EmbEvalCase(query=query, gt=frozenset(gt)))
    return cases
