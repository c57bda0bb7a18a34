"""HTTP surface: session lifecycle, SSE-streamed chat turns, trace inspection."""

from __future__ import annotations

import json
import threading
import time
from contextlib import asynccontextmanager
from dataclasses import dataclass, field
from itertools import chain

from fastapi import FastAPI, HTTPException
from fastapi.responses import StreamingResponse
from pydantic import BaseModel

from ..agent import RecAgent, Session, TurnDelta, TurnDone
from ..errors import BusySession
from .config import ServiceConfig, build_agent


class SessionBody(BaseModel):
    user_id: str = "anonymous"


class MessageBody(BaseModel):
    text: str


@dataclass
class ServiceState:
    agent: RecAgent
    sessions: dict[str, Session] = field(default_factory=dict)
    created: dict[str, float] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)


def _sse(payload: dict) -> str:
    return f"data: {json.dumps(payload, separators=(',', ':'))}\n\n"


def create_app(
    config: ServiceConfig | None = None, agent: RecAgent | None = None
) -> FastAPI:
    """Assemble the service; with a config, the agent loads at startup.

    Until initialization completes, the session and message endpoints answer
    503.  Shutdown closes every session, flushing long-term profiles to disk.
    """

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if app.state.service is None and app.state.config is not None:
            app.state.service = ServiceState(agent=build_agent(app.state.config))
        try:
            yield
        finally:
            state = app.state.service
            if state is not None:
                with state.lock:
                    sessions = list(state.sessions.values())
                    state.sessions.clear()
                for session in sessions:
                    state.agent.close_session(session)

    app = FastAPI(title="planrec", lifespan=lifespan)
    app.state.config = config
    app.state.service = ServiceState(agent=agent) if agent is not None else None

    def state_or_503() -> ServiceState:
        state = app.state.service
        if state is None:
            raise HTTPException(status_code=503, detail="service is not initialized yet")
        return state

    def session_or_404(state: ServiceState, session_id: str) -> Session:
        with state.lock:
            session = state.sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id}")
        return session

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/sessions")
    def create_session(body: SessionBody | None = None) -> dict:
        state = state_or_503()
        user_id = body.user_id if body is not None else "anonymous"
        session = state.agent.new_session(user_id)
        now = time.time()
        with state.lock:
            state.sessions[session.id] = session
            state.created[session.id] = now
        return {"session_id": session.id, "user_id": user_id, "created": now}

    @app.post("/sessions/{session_id}/messages")
    def post_message(session_id: str, body: MessageBody):
        state = state_or_503()
        session = session_or_404(state, session_id)
        turn = state.agent.stream_turn(session, body.text)
        failure: Exception | None = None
        first = None
        try:
            first = next(turn)
        except BusySession as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from None
        except StopIteration:
            pass
        except Exception as exc:
            failure = exc

        def events():
            if failure is not None:
                yield _sse({"error": str(failure)})
                return
            head = [first] if first is not None else []
            try:
                for event in chain(head, turn):
                    if isinstance(event, TurnDelta):
                        yield _sse({"delta": event.text})
                    elif isinstance(event, TurnDone):
                        yield _sse(_done_payload(state.agent, event))
            except Exception as exc:
                yield _sse({"error": str(exc)})

        return StreamingResponse(events(), media_type="text/event-stream")

    @app.get("/sessions/{session_id}/trace")
    def get_trace(session_id: str) -> dict:
        state = state_or_503()
        session = session_or_404(state, session_id)
        return {
            "session_id": session.id,
            "trace": [record.to_dict() for record in list(session.bus.trace)],
            "turns": [
                {"role": m.role, "content": m.content} for m in list(session.turns)
            ],
        }

    return app


def _done_payload(agent: RecAgent, event: TurnDone) -> dict:
    items = []
    for item_id in event.item_ids or []:
        item = agent.catalog.get(item_id)
        if item is not None:
            items.append(
                {"id": item.id, "title": item.title, "attributes": item.attributes}
            )
    return {
        "done": True,
        "plan": event.plan,
        "trace": [record.to_dict() for record in event.records],
        "items": items,
    }
