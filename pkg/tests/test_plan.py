"""Plan wire format, plan validation against the registry, bus bookkeeping."""

import json

import pytest

from planrec.agent import (
    BUS_SENTINEL,
    CandidateBus,
    PlanStep,
    ToolPlan,
    build_default_registry,
    parse_plan,
    validate_plan,
)
from planrec.agent.registry import (
    ArgumentSpec,
    ToolDescriptor,
    ToolRegistry,
    ToolResult,
)
from planrec.errors import DuplicateTool, PlanParseError

RETRIEVE_RANK = (
    '{"plan":[{"tool":"retrieve","input":{"hard":"genre = \'RPG\'","k":5}},'
    '{"tool":"rank","input":{"candidates":"$bus"}}]}'
)


@pytest.fixture
def registry():
    return build_default_registry()


# --- parsing ----------------------------------------------------------------

def test_parse_two_step_plan():
    plan = parse_plan(RETRIEVE_RANK)
    assert [s.tool for s in plan.steps] == ["retrieve", "rank"]
    assert plan.steps[0].input == {"hard": "genre = 'RPG'", "k": 5}
    assert plan.steps[1].input == {"candidates": "$bus"}
    assert not plan.is_chitchat


def test_chitchat_plan():
    plan = parse_plan('{"plan":[{"tool":"chat","input":{}}]}')
    assert plan.is_chitchat
    assert plan.to_json() == '{"plan":[{"tool":"chat","input":{}}]}'


def test_parse_strips_code_fences():
    fenced = f"```json\n{RETRIEVE_RANK}\n```"
    assert parse_plan(fenced) == parse_plan(RETRIEVE_RANK)


def test_parse_tolerates_missing_input_key():
    plan = parse_plan('{"plan":[{"tool":"chat"}]}')
    assert plan.steps[0].input == {}


def test_to_json_round_trip():
    plan = parse_plan(RETRIEVE_RANK)
    assert parse_plan(plan.to_json()) == plan
    assert json.loads(plan.to_json()) == plan.to_dict()


@pytest.mark.parametrize(
    "text",
    [
        "not json at all",
        "[]",
        '{"steps": []}',
        '{"plan": []}',
        '{"plan": "chat"}',
        '{"plan": [{"input": {}}]}',
        '{"plan": [{"tool": 3}]}',
        '{"plan": [{"tool": "chat", "input": []}]}',
    ],
)
def test_parse_errors(text):
    with pytest.raises(PlanParseError):
        parse_plan(text)


# --- registry ---------------------------------------------------------------

def test_default_registry_tools(registry):
    assert registry.names() == ["query", "retrieve", "rank", "chat"]
    assert registry.get("rank").descriptor.produces_candidates


def test_duplicate_registration_rejected(registry):
    with pytest.raises(DuplicateTool):
        registry.register(ToolDescriptor("chat", "again"), lambda ctx, inp: ToolResult(""))


def test_describe_all_marks_optional_arguments(registry):
    text = registry.describe_all()
    assert "- retrieve(hard: string?, soft: string?, k: integer)" in text
    assert "- query(query: string)" in text


# --- validation -------------------------------------------------------------

def validate(text, registry, bus_nonempty=False):
    return validate_plan(parse_plan(text), registry, bus_nonempty=bus_nonempty)


def test_valid_plan_has_no_violations(registry):
    assert validate(RETRIEVE_RANK, registry) == []


def test_unknown_tool(registry):
    out = validate('{"plan":[{"tool":"summon","input":{}}]}', registry)
    assert out == ["step 1: unknown tool 'summon'"]


def test_unknown_argument(registry):
    out = validate('{"plan":[{"tool":"query","input":{"query":"a = 1","loud":true}}]}', registry)
    assert any("unknown argument 'loud'" in v for v in out)


def test_missing_required_argument(registry):
    out = validate('{"plan":[{"tool":"retrieve","input":{"soft":"cozy"}}]}', registry)
    assert out == ["step 1: missing k"]


def test_wrong_value_kind(registry):
    out = validate('{"plan":[{"tool":"retrieve","input":{"soft":"cozy","k":"five"}}]}', registry)
    assert any("'k' must be of kind integer" in v for v in out)
    out = validate('{"plan":[{"tool":"retrieve","input":{"soft":"cozy","k":true}}]}', registry)
    assert any("'k' must be of kind integer" in v for v in out)


def test_bus_reference_needs_upstream_producer(registry):
    lone_rank = '{"plan":[{"tool":"rank","input":{"candidates":"$bus"}}]}'
    assert any("bus empty" in v for v in validate(lone_rank, registry))
    assert validate(lone_rank, registry, bus_nonempty=True) == []


def test_bus_sentinel_only_where_bus_capable(registry):
    out = validate('{"plan":[{"tool":"retrieve","input":{"soft":"$bus","k":3}}]}', registry)
    assert any("cannot reference $bus" in v for v in out)


def test_query_feeds_downstream_rank(registry):
    text = (
        '{"plan":[{"tool":"query","input":{"query":"price < 20"}},'
        '{"tool":"rank","input":{"candidates":"$bus"}}]}'
    )
    assert validate(text, registry) == []


def test_violations_accumulate(registry):
    text = (
        '{"plan":[{"tool":"summon","input":{}},'
        '{"tool":"rank","input":{"candidates":"$bus","history":[1]}}]}'
    )
    out = validate(text, registry)
    assert len(out) == 3  # unknown tool, bus never filled, bad history kind


def test_sentinel_constant():
    assert BUS_SENTINEL == "$bus"


# --- candidate bus ----------------------------------------------------------

def test_bus_set_candidates_copies():
    bus = CandidateBus()
    ids = ["a", "b"]
    bus.set_candidates(ids)
    ids.append("c")
    assert bus.current == ["a", "b"]


def test_bus_trace_appends_in_order():
    bus = CandidateBus()
    bus.record("query", "{}", "2 candidates: a,b")
    bus.record("rank", "{}", "2 candidates: b,a", error=None)
    assert [r.tool for r in bus.trace] == ["query", "rank"]
    assert bus.trace[0].signature() == ("query", "{}", "2 candidates: a,b", None)


def test_record_to_dict_keys():
    bus = CandidateBus()
    rec = bus.record("chat", "{}", "", started=1.0, ended=2.0, error="boom")
    assert rec.to_dict() == {
        "tool": "chat",
        "input": "{}",
        "output": "",
        "started": 1.0,
        "ended": 2.0,
        "error": "boom",
    }


def test_plan_step_immutable():
    step = PlanStep("chat", {})
    with pytest.raises(AttributeError):
        step.tool = "other"


def test_custom_registry_contains():
    registry = ToolRegistry().register(
        ToolDescriptor("ping", "reply pong", (ArgumentSpec("n", "integer", required=False),)),
        lambda ctx, inp: ToolResult("pong"),
    )
    assert "ping" in registry
    assert "pong" not in registry
    assert registry.get("ping").runner(None, {}) == ToolResult("pong")
