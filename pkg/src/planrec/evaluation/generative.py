"""Generative recommendation evaluation: name lists scored against id ground truth.

Generated names are resolved to catalog ids by fuzzy matching; a name that
resolves to nothing still occupies its rank slot as a miss, so sloppy output
cannot inflate NDCG.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import BinaryIO, Iterable

from ..catalog import Catalog
from ..errors import MalformedRecord
from .cases import iter_jsonl, require, string_list
from .metrics import fuzzy_match, ndcg_at_k, recall_at_k
from .report import EvalReport


@dataclass(frozen=True)
class GenEvalCase:
    output: tuple[str, ...]
    gt: frozenset[str]

    def __post_init__(self) -> None:
        if not self.gt:
            raise ValueError("ground truth must be non-empty")


def resolve_names(names: Iterable[str], catalog: Catalog, threshold: float) -> list[str]:
    """Fuzzy-resolve each name; unresolved slots get unique filler ids."""
    resolved = []
    for position, name in enumerate(names):
        item_id = fuzzy_match(name, catalog, threshold)
        resolved.append(item_id if item_id is not None else f"\x00miss{position}")
    return resolved


def eval_generative(
    cases: list[GenEvalCase],
    catalog: Catalog,
    ks: Iterable[int],
    threshold: float = 0.9,
) -> EvalReport:
    ks = list(ks)
    sums = {k: [0.0, 0.0] for k in ks}  # k -> [ndcg total, recall total]
    for case in cases:
        ranked = resolve_names(case.output, catalog, threshold)
        gt = set(case.gt)
        for k in ks:
            sums[k][0] += ndcg_at_k(ranked, gt, k)
            sums[k][1] += recall_at_k(ranked, gt, k)
    metrics = {}
    if cases:
        for k in ks:
            metrics[f"ndcg@{k}"] = sums[k][0] / len(cases)
            metrics[f"recall@{k}"] = sums[k][1] / len(cases)
    return EvalReport(dimension="generative", cases=len(cases), metrics=metrics)


def load_generative_cases(source: BinaryIO | Iterable[bytes]) -> list[GenEvalCase]:
    """JSON-lines {"output": [names], "gt": [ids]}."""
    cases = []
    for line_no, obj in iter_jsonl(source):
        output = string_list(require(obj, "output", line_no), "output", line_no)
        gt = string_list(require(obj, "gt", line_no), "gt", line_no)
        if not gt:
            raise MalformedRecord(line_no, "ground truth must be non-empty")
        cases.append(GenEvalCase(output=tuple(output), gt=frozenset(gt)))
    return cases
