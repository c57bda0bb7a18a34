"""Candidate Bus: the shared candidate list and the append-only execution trace."""

from __future__ import annotations

import time
from dataclasses import dataclass, field


@dataclass(frozen=True)
class ExecutionRecord:
    tool: str
    input_summary: str
    output_summary: str
    started: float
    ended: float
    error: str | None = None

    def signature(self) -> tuple[str, str, str, str | None]:
        """Deterministic fields only; timestamps excluded."""
        return (self.tool, self.input_summary, self.output_summary, self.error)

    def to_dict(self) -> dict:
        return {
            "tool": self.tool,
            "input": self.input_summary,
            "output": self.output_summary,
            "started": self.started,
            "ended": self.ended,
            "error": self.error,
        }


@dataclass
class CandidateBus:
    current: list[str] = field(default_factory=list)
    trace: list[ExecutionRecord] = field(default_factory=list)

    def set_candidates(self, item_ids: list[str]) -> None:
        self.current = list(item_ids)

    def record(
        self,
        tool: str,
        input_summary: str,
        output_summary: str,
        started: float | None = None,
        ended: float | None = None,
        error: str | None = None,
    ) -> ExecutionRecord:
        now = time.time()
        rec = ExecutionRecord(
            tool=tool,
            input_summary=input_summary,
            output_summary=output_summary,
            started=started if started is not None else now,
            ended=ended if ended is not None else now,
            error=error,
        )
        self.trace.append(rec)
        return rec
