"""Tool-execution plans: wire format parsing, canonical text, validation.

Wire format: {"plan": [{"tool": name, "input": {arg: value, ...}}, ...]}
with the exact string "$bus" standing for the current candidate list.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from ..errors import PlanParseError
from .registry import BUS_SENTINEL, ToolRegistry

CHITCHAT_TOOL = "chat"


@dataclass(frozen=True)
class PlanStep:
    tool: str
    input: dict


@dataclass(frozen=True)
class ToolPlan:
    steps: tuple[PlanStep, ...]

    def to_dict(self) -> dict:
        return {"plan": [{"tool": s.tool, "input": s.input} for s in self.steps]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @property
    def is_chitchat(self) -> bool:
        return len(self.steps) == 1 and self.steps[0].tool == CHITCHAT_TOOL


def _strip_fences(text: str) -> str:
    text = text.strip()
    if text.startswith("```"):
        first_newline = text.find("\n")
        if first_newline != -1:
            text = text[first_newline + 1 :]
        if text.rstrip().endswith("```"):
            text = text.rstrip()[:-3]
    return text.strip()


def parse_plan(text: str) -> ToolPlan:
    """Parse a planner reply into a ToolPlan; raises PlanParseError."""
    try:
        payload = json.loads(_strip_fences(text))
    except json.JSONDecodeError as exc:
        raise PlanParseError(f"reply is not valid JSON: {exc}") from None
    if not isinstance(payload, dict) or "plan" not in payload:
        raise PlanParseError('reply must be an object with a "plan" key')
    raw_steps = payload["plan"]
    if not isinstance(raw_steps, list) or not raw_steps:
        raise PlanParseError('"plan" must be a non-empty list of steps')
    steps = []
    for i, raw in enumerate(raw_steps, start=1):
        if not isinstance(raw, dict) or "tool" not in raw:
            raise PlanParseError(f'step {i} must be an object with a "tool" key')
        tool = raw["tool"]
        if not isinstance(tool, str):
            raise PlanParseError(f"step {i}: tool name must be a string")
        step_input = raw.get("input", {})
        if not isinstance(step_input, dict):
            raise PlanParseError(f'step {i}: "input" must be an object')
        steps.append(PlanStep(tool, step_input))
    return ToolPlan(tuple(steps))


def _check_value(kind: str, value: object) -> bool:
    if kind == "string":
        return isinstance(value, str)
    if kind == "number":
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if kind == "integer":
        return isinstance(value, int) and not isinstance(value, bool)
    if kind == "ids":
        return isinstance(value, list) and all(isinstance(v, str) for v in value)
    return False


def validate_plan(
    plan: ToolPlan, registry: ToolRegistry, bus_nonempty: bool = False
) -> list[str]:
    """Return violations (empty list = ok); never raises."""
    violations = []
    candidates_available = bus_nonempty
    for i, step in enumerate(plan.steps, start=1):
        if step.tool not in registry:
            violations.append(f"step {i}: unknown tool {step.tool!r}")
            continue
        descriptor = registry.get(step.tool).descriptor
        specs = {a.name: a for a in descriptor.arguments}
        for name in step.input:
            if name not in specs:
                violations.append(f"step {i}: unknown argument {name!r} for {step.tool}")
        for spec in descriptor.arguments:
            if spec.name not in step.input:
                if spec.required:
                    violations.append(f"step {i}: missing {spec.name}")
                continue
            value = step.input[spec.name]
            if value == BUS_SENTINEL:
                if not spec.takes_bus:
                    violations.append(
                        f"step {i}: argument {spec.name!r} cannot reference {BUS_SENTINEL}"
                    )
                elif not candidates_available:
                    violations.append(f"step {i}: bus empty at step {i}")
                continue
            if not _check_value(spec.kind, value):
                violations.append(
                    f"step {i}: argument {spec.name!r} must be of kind {spec.kind}"
                )
        if descriptor.produces_candidates:
            candidates_available = True
    return violations
