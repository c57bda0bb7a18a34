"""Chat-completion backends: scripted mock, HTTP client, token accounting.

Every backend exposes blocking and streamed completion over the same message
list; concatenated stream chunks always equal the blocking output.  Token
counts use a bytes/4 ceiling as a model-agnostic budget unit.
"""

from __future__ import annotations

import json
import os
import re
import threading
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import NoScriptMatch, RemoteError, TransportError

ROLES = ("system", "user", "assistant", "tool")
BYTES_PER_TOKEN = 4


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise ValueError(f"invalid role {self.role!r}")


@dataclass(frozen=True)
class CompletionParams:
    temperature: float = 0.0
    max_tokens: int = 1024
    stream: bool = False

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be positive")


def count_tokens(text: str) -> int:
    """ceil(utf-8 byte length / 4): deterministic stand-in for tokenizer counts."""
    n = len(text.encode("utf-8"))
    return -(-n // BYTES_PER_TOKEN)


def _check_messages(messages: list[ChatMessage]) -> None:
    if not messages:
        raise ValueError("messages must be non-empty")
    if messages[-1].role not in ("user", "tool"):
        raise ValueError("last message must have role user or tool")


def _last_user_content(messages: list[ChatMessage]) -> str:
    for message in reversed(messages):
        if message.role == "user":
            return message.content
    raise ValueError("no user message present")


class ChatBackend:
    """Base backend: counts invocations, defines the streaming contract."""

    def __init__(self) -> None:
        self._calls = 0
        self._lock = threading.Lock()

    @property
    def calls(self) -> int:
        """Monotone count of chat/chat_stream invocations since construction."""
        return self._calls

    def _count(self) -> None:
        with self._lock:
            self._calls += 1

    def chat(self, messages: list[ChatMessage], params: CompletionParams | None = None) -> str:
        _check_messages(messages)
        self._count()
        return self._complete(messages, params or CompletionParams())

    def chat_stream(
        self, messages: list[ChatMessage], params: CompletionParams | None = None
    ) -> Iterator[str]:
        _check_messages(messages)
        self._count()
        return self._complete_stream(messages, params or CompletionParams())

    def _complete(self, messages: list[ChatMessage], params: CompletionParams) -> str:
        raise NotImplementedError

    def _complete_stream(
        self, messages: list[ChatMessage], params: CompletionParams
    ) -> Iterator[str]:
        raise NotImplementedError


def split_chunks(text: str) -> list[str]:
    """Whitespace-delimited chunks whose concatenation is the input text."""
    chunks = re.findall(r"\s*\S+\s*", text)
    if not chunks and text:
        return [text]
    return chunks


@dataclass(frozen=True)
class MockRule:
    pattern: str
    response: str
    regex: bool = False

    def matches(self, content: str) -> bool:
        if self.regex:
            return re.search(self.pattern, content, flags=re.DOTALL) is not None
        return self.pattern in content


@dataclass
class MockScript:
    """Ordered response rules over the last user message; first match wins."""

    rules: list[MockRule] = field(default_factory=list)
    default: str | None = None

    def on(self, pattern: str, response: str, regex: bool = False) -> "MockScript":
        self.rules.append(MockRule(pattern, response, regex))
        return self

    def respond_to(self, content: str) -> str:
        for rule in self.rules:
            if rule.matches(content):
                return rule.response
        if self.default is not None:
            return self.default
        raise NoScriptMatch(content)

    @classmethod
    def from_dict(cls, data: dict) -> "MockScript":
        rules = [
            MockRule(r["match"], r["response"], bool(r.get("regex", False)))
            for r in data.get("rules", [])
        ]
        return cls(rules=rules, default=data.get("default"))


class MockBackend(ChatBackend):
    """Deterministic scripted backend for tests and offline demos."""

    def __init__(self, script: MockScript):
        super().__init__()
        self.script = script

    def _complete(self, messages: list[ChatMessage], params: CompletionParams) -> str:
        return self.script.respond_to(_last_user_content(messages))

    def _complete_stream(
        self, messages: list[ChatMessage], params: CompletionParams
    ) -> Iterator[str]:
        response = self.script.respond_to(_last_user_content(messages))
        return iter(split_chunks(response))


class HttpBackend(ChatBackend):
    """Generic chat-completion client over HTTP with SSE streaming.

    Request body: {"messages": [...], "temperature": t, "max_tokens": n,
    "stream": bool}.  Non-streamed replies carry {"content": text}; streamed
    replies are SSE events `data: {"delta": text}` terminated by
    `data: [DONE]`.  One retry on transport error.
    """

    def __init__(
        self,
        url: str,
        api_key_env: str | None = None,
        client=None,
        timeout: float = 60.0,
        retries: int = 1,
    ):
        import httpx

        super().__init__()
        self.url = url
        self.retries = retries
        headers = {}
        if api_key_env:
            key = os.environ.get(api_key_env)
            if key:
                headers["Authorization"] = f"Bearer {key}"
        self._client = client or httpx.Client(timeout=timeout, headers=headers)

    def _body(self, messages: list[ChatMessage], params: CompletionParams, stream: bool) -> dict:
        return {
            "messages": [{"role": m.role, "content": m.content} for m in messages],
            "temperature": params.temperature,
            "max_tokens": params.max_tokens,
            "stream": stream,
        }

    def _post(self, body: dict):
        import httpx

        last_exc: Exception | None = None
        for _ in range(self.retries + 1):
            try:
                return self._client.post(self.url, json=body)
            except httpx.HTTPError as exc:
                last_exc = exc
        raise TransportError(str(last_exc))

    def _complete(self, messages: list[ChatMessage], params: CompletionParams) -> str:
        response = self._post(self._body(messages, params, stream=False))
        if response.status_code != 200:
            raise RemoteError(response.status_code, response.text)
        return response.json()["content"]

    def _complete_stream(
        self, messages: list[ChatMessage], params: CompletionParams
    ) -> Iterator[str]:
        response = self._post(self._body(messages, params, stream=True))
        if response.status_code != 200:
            raise RemoteError(response.status_code, response.text)
        return _iter_sse_deltas(response.iter_lines())


def _iter_sse_deltas(lines: Iterable[str]) -> Iterator[str]:
    for line in lines:
        line = line.strip()
        if not line.startswith("data:"):
            continue
        payload = line[len("data:") :].strip()
        if payload == "[DONE]":
            return
        yield json.loads(payload)["delta"]
