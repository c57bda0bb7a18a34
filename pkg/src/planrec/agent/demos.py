"""Demonstration library: (intent, plan) exemplars for in-context planning."""

from __future__ import annotations

from dataclasses import dataclass
from typing import BinaryIO, Iterable

import json

import numpy as np

from ..embedding import Embedder
from ..errors import MalformedRecord, PlanValidationError
from .plan import ToolPlan, parse_plan, validate_plan
from .registry import ToolRegistry


@dataclass(frozen=True)
class Demonstration:
    intent: str
    plan: ToolPlan

    @property
    def plan_text(self) -> str:
        return self.plan.to_json()


class DemonstrationLibrary:
    def __init__(self, demos: Iterable[Demonstration] = ()):
        self._demos: list[Demonstration] = list(demos)

    def add(self, demo: Demonstration) -> None:
        self._demos.append(demo)

    def __len__(self) -> int:
        return len(self._demos)

    def __iter__(self):
        return iter(self._demos)

    def select(self, embedder: Embedder, intent: str, m: int) -> list[Demonstration]:
        """Top-m by intent cosine similarity; ties keep insertion order."""
        if m < 1:
            raise ValueError("m must be >= 1")
        if not self._demos:
            return []
        query = embedder.embed(intent)
        vectors = embedder.embed_batch([d.intent for d in self._demos])
        scores = [float(np.dot(v, query)) for v in vectors]
        order = sorted(range(len(self._demos)), key=lambda i: (-scores[i], i))
        return [self._demos[i] for i in order[:m]]


def load_demo_library(
    source: BinaryIO | Iterable[bytes], registry: ToolRegistry
) -> DemonstrationLibrary:
    """Read JSON-lines {"intent": ..., "plan": {...}}; every plan must validate."""
    library = DemonstrationLibrary()
    for line_no, raw in enumerate(source, start=1):
        line = raw.decode("utf-8").strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedRecord(line_no, f"not valid JSON: {exc}") from None
        if not isinstance(obj, dict) or "intent" not in obj or "plan" not in obj:
            raise MalformedRecord(line_no, 'expected {"intent": ..., "plan": ...}')
        plan = parse_plan(json.dumps(obj["plan"]))
        violations = validate_plan(plan, registry, bus_nonempty=True)
        if violations:
            raise PlanValidationError([f"line {line_no}: {v}" for v in violations])
        library.add(Demonstration(intent=str(obj["intent"]), plan=plan))
    return library
