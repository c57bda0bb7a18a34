"""The conversational agent: plan once, execute the plan, respond once.

Each turn makes exactly one planner call and one response call (plus at most
one repair call when the planner emits a malformed plan).  Tools communicate
through the Candidate Bus instead of the prompt; the final tool output is the
only observation handed to the response call.
"""

from __future__ import annotations

import itertools
import json
import secrets
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from ..backend import ChatBackend, ChatMessage, CompletionParams
from ..catalog import Catalog, InteractionStore
from ..doke import (
    KnowledgeGraph,
    extract_attribute_facts,
    extract_cooc_signals,
    extract_kg_paths,
    select_knowledge,
    verbalize,
    augment_prompt,
)
from ..embedding import Embedder, HashingEmbedder
from ..errors import (
    BusySession,
    PlanParseError,
    PlanValidationError,
    ToolExecutionError,
    UnknownItem,
)
from ..query import parse_query, run_query
from ..ranker import CoocModel, CoocRanker, RankRequest
from ..retrieval import ItemIndex, RetrievalRequest, retrieve
from .bus import CandidateBus, ExecutionRecord
from .demos import DemonstrationLibrary
from .plan import CHITCHAT_TOOL, ToolPlan, parse_plan, validate_plan
from .profile import ProfileStore, UserProfile
from .registry import BUS_SENTINEL, ArgumentSpec, ToolDescriptor, ToolRegistry, ToolResult

PLANNER_PREAMBLE = (
    "You orchestrate recommendation tools for a conversational assistant. "
    'Reply with exactly one JSON object {"plan": [{"tool": <name>, "input": {...}}, ...]} '
    "and no other text. Use only the tools listed below. The string "
    f'"{BUS_SENTINEL}" stands for the current candidate list. '
    'For small talk that needs no tools, reply {"plan": [{"tool": "chat", "input": {}}]}.'
)
PLAN_REQUEST_HEADER = "Produce the tool-execution plan for the latest user message."
RESPONDER_PREAMBLE = (
    "You are a helpful recommendation assistant. Answer the user naturally, "
    "grounding your reply in the tool results when they are present."
)


@dataclass
class KnowledgeSettings:
    """Switches for prompt knowledge injection on the response call."""

    kg: KnowledgeGraph | None = None
    budget_tokens: int = 200
    top_n: int = 3
    max_hops: int = 2
    attribute_whitelist: tuple[str, ...] | None = None  # None = whole schema


@dataclass
class AgentConfig:
    demo_count: int = 3
    dialogue_window: int = 10
    profile_budget: int = 120
    default_k: int = 10
    knowledge: KnowledgeSettings | None = None
    plan_log_path: str | Path | None = None


@dataclass(frozen=True)
class Observation:
    text: str
    item_ids: list[str] | None = None


@dataclass(frozen=True)
class PlannedTurn:
    seq: int
    instruction: str
    plan_text: str


@dataclass(frozen=True)
class TurnDelta:
    text: str


@dataclass(frozen=True)
class TurnDone:
    reply: str
    plan: dict
    records: list[ExecutionRecord]
    item_ids: list[str] | None


@dataclass
class Session:
    id: str
    user_id: str
    profile: UserProfile
    turns: list[ChatMessage] = field(default_factory=list)
    bus: CandidateBus = field(default_factory=CandidateBus)
    planned: list[PlannedTurn] = field(default_factory=list)
    closed: bool = False
    _turn_lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def try_begin_turn(self) -> bool:
        return self._turn_lock.acquire(blocking=False)

    def end_turn(self) -> None:
        self._turn_lock.release()


@dataclass
class ToolContext:
    agent: "RecAgent"
    session: Session


def _ids_summary(item_ids: list[str]) -> str:
    shown = ",".join(item_ids[:10])
    more = f" (+{len(item_ids) - 10} more)" if len(item_ids) > 10 else ""
    return f"{len(item_ids)} candidates: {shown}{more}"


def _titles(catalog: Catalog, item_ids: list[str]) -> str:
    return "; ".join(catalog[i].title for i in item_ids if i in catalog)


def _run_query_tool(ctx: ToolContext, args: dict) -> ToolResult:
    q = parse_query(args["query"])
    ids = run_query(ctx.agent.catalog, q)
    return ToolResult(text=f"Query matched: {_titles(ctx.agent.catalog, ids)}", item_ids=ids)


def _run_retrieve_tool(ctx: ToolContext, args: dict) -> ToolResult:
    hard = parse_query(args["hard"]) if args.get("hard") else None
    request = RetrievalRequest(hard=hard, soft=args.get("soft"), k=int(args["k"]))
    ids = retrieve(ctx.agent.catalog, ctx.agent.index, ctx.agent.embedder, request)
    return ToolResult(text=f"Retrieved: {_titles(ctx.agent.catalog, ids)}", item_ids=ids)


def _run_rank_tool(ctx: ToolContext, args: dict) -> ToolResult:
    candidates = args["candidates"]
    history = args.get("history")
    if history is None:
        history = ctx.agent.user_history(ctx.session)
    request = RankRequest(
        candidates=tuple(candidates),
        history=tuple(history),
        profile=ctx.session.profile.summary(ctx.agent.config.profile_budget) or None,
    )
    ranked = ctx.agent.ranker.rank(request)
    ids = [item_id for item_id, _ in ranked]
    return ToolResult(text=f"Ranked: {_titles(ctx.agent.catalog, ids)}", item_ids=ids)


def _run_chat_tool(ctx: ToolContext, args: dict) -> ToolResult:
    return ToolResult(text="", item_ids=None)


def build_default_registry() -> ToolRegistry:
    """The three core tools plus the reserved small-talk marker."""
    registry = ToolRegistry()
    registry.register(
        ToolDescriptor(
            name="query",
            description=(
                "Answer questions about catalog items by running a filter expression "
                "(e.g. price < 20 AND genre = 'RPG') against the item database."
            ),
            arguments=(ArgumentSpec("query", "string"),),
            produces_candidates=True,
        ),
        _run_query_tool,
    )
    registry.register(
        ToolDescriptor(
            name="retrieve",
            description=(
                "Fetch candidate items. 'hard' is a filter expression for explicit "
                "constraints; 'soft' is free text for semantic preferences; 'k' caps "
                "the number of candidates."
            ),
            arguments=(
                ArgumentSpec("hard", "string", required=False),
                ArgumentSpec("soft", "string", required=False),
                ArgumentSpec("k", "integer"),
            ),
            produces_candidates=True,
        ),
        _run_retrieve_tool,
    )
    registry.register(
        ToolDescriptor(
            name="rank",
            description=(
                "Order candidate items by predicted preference from the user's "
                f'history. Pass "{BUS_SENTINEL}" to rank the current candidates.'
            ),
            arguments=(
                ArgumentSpec("candidates", "ids", takes_bus=True),
                ArgumentSpec("history", "ids", required=False),
            ),
            produces_candidates=True,
        ),
        _run_rank_tool,
    )
    registry.register(
        ToolDescriptor(
            name=CHITCHAT_TOOL,
            description="No tool needed; answer the user directly.",
            arguments=(),
            produces_candidates=False,
        ),
        _run_chat_tool,
    )
    return registry


class RecAgent:
    """Wires catalog, retrieval, ranking, memory, and a chat backend together."""

    def __init__(
        self,
        catalog: Catalog,
        index: ItemIndex,
        backend: ChatBackend,
        cooc_model: CoocModel,
        interactions: InteractionStore | None = None,
        embedder: Embedder | None = None,
        registry: ToolRegistry | None = None,
        demos: DemonstrationLibrary | None = None,
        profile_store: ProfileStore | None = None,
        ranker=None,
        config: AgentConfig | None = None,
    ):
        self.catalog = catalog
        self.index = index
        self.backend = backend
        self.cooc_model = cooc_model
        self.interactions = interactions
        self.embedder = embedder or HashingEmbedder()
        self.registry = registry or build_default_registry()
        self.demos = demos or DemonstrationLibrary()
        self.profile_store = profile_store
        self.ranker = ranker or CoocRanker(cooc_model)
        self.config = config or AgentConfig()
        self._seq = itertools.count()
        self._params = CompletionParams()

    # --- sessions -----------------------------------------------------------

    def new_session(self, user_id: str = "anonymous") -> Session:
        profile = (
            self.profile_store.load(user_id) if self.profile_store else UserProfile(user_id)
        )
        return Session(id=secrets.token_urlsafe(16), user_id=user_id, profile=profile)

    def close_session(self, session: Session) -> None:
        """Persist the long-term tier and drop session-local memory."""
        if self.profile_store:
            self.profile_store.save(session.profile)
        session.profile.clear_session()
        session.closed = True

    def user_history(self, session: Session) -> list[str]:
        stored = self.interactions.history(session.user_id) if self.interactions else []
        liked = sorted(session.profile.session_liked - set(stored))
        return stored + liked

    # --- profile ------------------------------------------------------------

    def update_profile(
        self,
        session: Session,
        liked: list[str] | None = None,
        disliked: list[str] | None = None,
        intent: str | None = None,
    ) -> UserProfile:
        for item_id in (liked or []) + (disliked or []):
            if item_id not in self.catalog:
                raise UnknownItem(item_id)
        session.profile.apply(liked=liked, disliked=disliked, intent=intent)
        return session.profile

    # --- planning -----------------------------------------------------------

    def _title_of(self, item_id: str) -> str:
        item = self.catalog.get(item_id)
        return item.title if item else item_id

    def _planner_messages(self, session: Session, text: str) -> list[ChatMessage]:
        sections = [PLANNER_PREAMBLE, "Available tools:\n" + self.registry.describe_all()]
        selected = (
            self.demos.select(self.embedder, text, self.config.demo_count)
            if len(self.demos)
            else []
        )
        if selected:
            lines = [f"Intent: {d.intent}\nPlan: {d.plan_text}" for d in selected]
            sections.append("Demonstrations:\n" + "\n".join(lines))
        profile_text = session.profile.summary(self.config.profile_budget, self._title_of)
        if profile_text:
            sections.append("User profile:\n" + profile_text)
        system = ChatMessage("system", "\n\n".join(sections))

        window = session.turns[-self.config.dialogue_window :]
        convo = "\n".join(f"{m.role}: {m.content}" for m in window) or "(no prior turns)"
        user = ChatMessage(
            "user",
            f"{PLAN_REQUEST_HEADER}\n\nConversation so far:\n{convo}\n\nUser message: {text}",
        )
        return [system, user]

    @staticmethod
    def _render_instruction(messages: list[ChatMessage]) -> str:
        return "\n\n".join(f"[{m.role}]\n{m.content}" for m in messages)

    def make_plan(self, session: Session, text: str) -> tuple[ToolPlan, str]:
        """One planner call; on a bad plan, exactly one repair call, then fail."""
        messages = self._planner_messages(session, text)
        instruction = self._render_instruction(messages)
        reply = self.backend.chat(messages, self._params)
        try:
            plan = self._parse_and_validate(session, reply)
        except (PlanParseError, PlanValidationError) as first_error:
            repair = messages + [
                ChatMessage("assistant", reply),
                ChatMessage(
                    "user",
                    f"Error: {first_error}. Reply with the corrected plan JSON only.",
                ),
            ]
            reply = self.backend.chat(repair, self._params)
            plan = self._parse_and_validate(session, reply)
        turn = PlannedTurn(next(self._seq), instruction, plan.to_json())
        session.planned.append(turn)
        self._log_plan(turn)
        return plan, instruction

    def _parse_and_validate(self, session: Session, reply: str) -> ToolPlan:
        plan = parse_plan(reply)
        violations = validate_plan(
            plan, self.registry, bus_nonempty=bool(session.bus.current)
        )
        if violations:
            raise PlanValidationError(violations)
        return plan

    def _log_plan(self, turn: PlannedTurn) -> None:
        if not self.config.plan_log_path:
            return
        line = json.dumps(
            {"instruction": turn.instruction, "plan": json.loads(turn.plan_text)},
            separators=(",", ":"),
        )
        with open(self.config.plan_log_path, "a", encoding="utf-8") as fh:
            fh.write(line + "\n")

    # --- execution ----------------------------------------------------------

    def execute_plan(self, session: Session, plan: ToolPlan) -> Observation:
        """Run steps strictly in order; candidate outputs overwrite the bus."""
        result = ToolResult(text="", item_ids=None)
        context = ToolContext(self, session)
        for index, step in enumerate(plan.steps, start=1):
            resolved = {
                name: (list(session.bus.current) if value == BUS_SENTINEL else value)
                for name, value in step.input.items()
            }
            input_summary = json.dumps(step.input, sort_keys=True, separators=(",", ":"))
            started = time.time()
            try:
                result = self.registry.get(step.tool).runner(context, resolved)
            except Exception as exc:
                session.bus.record(
                    step.tool, input_summary, "", started, time.time(), error=str(exc)
                )
                raise ToolExecutionError(index, exc) from exc
            if result.item_ids is not None:
                session.bus.set_candidates(result.item_ids)
            output_summary = (
                _ids_summary(result.item_ids) if result.item_ids is not None else result.text
            )
            session.bus.record(step.tool, input_summary, output_summary, started, time.time())
        return Observation(text=result.text, item_ids=result.item_ids)

    # --- response -----------------------------------------------------------

    def _responder_messages(
        self, session: Session, observation: Observation | None
    ) -> list[ChatMessage]:
        messages = [ChatMessage("system", RESPONDER_PREAMBLE)]
        messages.extend(session.turns[-self.config.dialogue_window :])
        if observation is not None:
            messages = self._inject_knowledge(session, messages, observation)
            messages.append(ChatMessage("tool", f"Tool results: {observation.text}"))
        return messages

    def _inject_knowledge(
        self,
        session: Session,
        messages: list[ChatMessage],
        observation: Observation,
    ) -> list[ChatMessage]:
        settings = self.config.knowledge
        if settings is None or not observation.item_ids:
            return messages
        top = observation.item_ids[0]
        snippets = []
        item = self.catalog.get(top)
        if item is not None:
            whitelist = settings.attribute_whitelist or tuple(self.catalog.kinds)
            snippets.extend(extract_attribute_facts(item, whitelist))
        history = self.user_history(session)
        if history and top in self.cooc_model.known_items:
            snippets.extend(
                extract_cooc_signals(
                    self.cooc_model, self.catalog, history, top, settings.top_n
                )
            )
        if settings.kg is not None:
            entities = settings.kg.entities
            sources = [h for h in history if h in entities]
            if sources and top in entities:
                snippets.extend(
                    extract_kg_paths(settings.kg, sources, top, settings.max_hops)
                )
        knowledge = verbalize(select_knowledge(snippets, settings.budget_tokens))
        return augment_prompt(messages, knowledge)

    # --- the turn loop ------------------------------------------------------

    def stream_turn(self, session: Session, text: str):
        """Yield TurnDelta chunks, then one TurnDone with plan and trace."""
        if not session.try_begin_turn():
            raise BusySession(session.id)
        try:
            session.profile.short_intent = text
            plan, _ = self.make_plan(session, text)
            session.turns.append(ChatMessage("user", text))
            trace_start = len(session.bus.trace)
            observation = None if plan.is_chitchat else self.execute_plan(session, plan)
            chunks = self.backend.chat_stream(
                self._responder_messages(session, observation), self._params
            )
            parts = []
            for chunk in chunks:
                parts.append(chunk)
                yield TurnDelta(chunk)
            reply = "".join(parts)
            session.turns.append(ChatMessage("assistant", reply))
            yield TurnDone(
                reply=reply,
                plan=plan.to_dict(),
                records=session.bus.trace[trace_start:],
                item_ids=observation.item_ids if observation else None,
            )
        finally:
            session.end_turn()

    def run_turn(self, session: Session, text: str) -> TurnDone:
        """Blocking variant of stream_turn; returns the terminal event."""
        done = None
        for event in self.stream_turn(session, text):
            if isinstance(event, TurnDone):
                done = event
        assert done is not None
        return done


def export_plan_dataset(sessions: list[Session]) -> bytes:
    """JSON-lines of {"instruction", "plan"} pairs in chronological order."""
    turns = sorted(
        (t for s in sessions for t in s.planned), key=lambda t: t.seq
    )
    lines = [
        json.dumps(
            {"instruction": t.instruction, "plan": json.loads(t.plan_text)},
            separators=(",", ":"),
        )
        for t in turns
    ]
    return ("\n".join(lines) + "\n").encode("utf-8") if lines else b""
