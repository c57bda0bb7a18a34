"""Tool registry: descriptors the planner prompt advertises, runners plans invoke."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from ..errors import DuplicateTool

BUS_SENTINEL = "$bus"


@dataclass(frozen=True)
class ArgumentSpec:
    name: str
    kind: str  # "string" | "number" | "integer" | "ids"
    required: bool = True
    takes_bus: bool = False  # may be the literal "$bus"


@dataclass(frozen=True)
class ToolDescriptor:
    name: str
    description: str
    arguments: tuple[ArgumentSpec, ...] = ()
    produces_candidates: bool = False


@dataclass(frozen=True)
class ToolResult:
    text: str
    item_ids: list[str] | None = None


# runner(context, input dict) -> ToolResult; context is agent-defined
ToolRunner = Callable[[object, dict], ToolResult]


@dataclass
class RegisteredTool:
    descriptor: ToolDescriptor
    runner: ToolRunner


class ToolRegistry:
    def __init__(self) -> None:
        self._tools: dict[str, RegisteredTool] = {}

    def register(self, descriptor: ToolDescriptor, runner: ToolRunner) -> "ToolRegistry":
        if descriptor.name in self._tools:
            raise DuplicateTool(descriptor.name)
        self._tools[descriptor.name] = RegisteredTool(descriptor, runner)
        return self

    def names(self) -> list[str]:
        return list(self._tools.keys())

    def __contains__(self, name: str) -> bool:
        return name in self._tools

    def get(self, name: str) -> RegisteredTool:
        return self._tools[name]

    def describe_all(self) -> str:
        """One line per tool, included verbatim in planner prompts."""
        lines = []
        for tool in self._tools.values():
            d = tool.descriptor
            args = ", ".join(
                f"{a.name}: {a.kind}" + ("" if a.required else "?") for a in d.arguments
            )
            lines.append(f"- {d.name}({args}): {d.description}")
        return "\n".join(lines)
