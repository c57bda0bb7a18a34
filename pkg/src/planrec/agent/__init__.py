"""Plan-first conversational agent built on the catalog, retrieval, and ranking tools."""

from .bus import CandidateBus, ExecutionRecord
from .core import (
    AgentConfig,
    KnowledgeSettings,
    Observation,
    PlannedTurn,
    RecAgent,
    Session,
    ToolContext,
    TurnDelta,
    TurnDone,
    build_default_registry,
    export_plan_dataset,
)
from .demos import Demonstration, DemonstrationLibrary, load_demo_library
from .plan import CHITCHAT_TOOL, PlanStep, ToolPlan, parse_plan, validate_plan
from .profile import ProfileStore, UserProfile
from .registry import (
    BUS_SENTINEL,
    ArgumentSpec,
    ToolDescriptor,
    ToolRegistry,
    ToolResult,
)

__all__ = [
    "AgentConfig",
    "ArgumentSpec",
    "BUS_SENTINEL",
    "CHITCHAT_TOOL",
    "CandidateBus",
    "Demonstration",
    "DemonstrationLibrary",
    "ExecutionRecord",
    "KnowledgeSettings",
    "Observation",
    "PlanStep",
    "PlannedTurn",
    "ProfileStore",
    "RecAgent",
    "Session",
    "ToolContext",
    "ToolDescriptor",
    "ToolPlan",
    "ToolRegistry",
    "ToolResult",
    "TurnDelta",
    "TurnDone",
    "UserProfile",
    "build_default_registry",
    "export_plan_dataset",
    "load_demo_library",
    "parse_plan",
    "validate_plan",
]
