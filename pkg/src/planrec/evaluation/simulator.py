"""Deterministic scripted user simulator for conversation evaluation.

A script plays its utterance templates in order, one per turn, and the
conversation succeeds on the first assistant reply that references any target
item's title (fuzzy, so punctuation variants and small typos still count).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import BinaryIO, Callable, Iterable

from ..catalog import Catalog
from ..errors import MalformedRecord
from .cases import iter_jsonl, require, string_list
from .metrics import normalize_name, similarity
from .report import EvalReport

_PLACEHOLDER = re.compile(r"\{([A-Za-z_][A-Za-z0-9_]*)\}")

# factory() -> send; send(utterance) -> assistant reply
SendFn = Callable[[str], str]
SessionFactory = Callable[[], SendFn]


@dataclass(frozen=True)
class SimulatorScript:
    targets: tuple[str, ...]
    templates: tuple[str, ...]
    max_turns: int

    def __post_init__(self) -> None:
        if self.max_turns < 1:
            raise ValueError("max_turns must be >= 1")
        if not self.templates:
            raise ValueError("templates must be non-empty")
        if not self.targets:
            raise ValueError("targets must be non-empty")


def render_template(template: str, catalog: Catalog, targets: tuple[str, ...]) -> str:
    """Substitute {title}/{id}/{attribute} from the first target; unknown names stay."""
    item = catalog.get(targets[0])
    if item is None:
        return template
    values: dict[str, str] = {"title": item.title, "id": item.id}
    for name, value in item.attributes.items():
        values[name] = ", ".join(value) if isinstance(value, list) else str(value)

    def substitute(match: re.Match) -> str:
        return values.get(match.group(1), match.group(0))

    return _PLACEHOLDER.sub(substitute, template)


def mentions_title(text: str, title: str, threshold: float = 0.9) -> bool:
    """True when some word window of the text fuzzy-matches the title."""
    target = normalize_name(title)
    if not target:
        return False
    words = normalize_name(text).split()
    size = len(target.split())
    for window in range(max(1, size - 1), size + 2):
        for start in range(0, len(words) - window + 1):
            if similarity(" ".join(words[start : start + window]), target) >= threshold:
                return True
    return False


def simulate_conversation(
    session_factory: SessionFactory,
    script: SimulatorScript,
    catalog: Catalog,
    threshold: float = 0.9,
) -> dict:
    """Run one scripted conversation; {"success": bool, "turns_used": int}."""
    send = session_factory()
    titles = [catalog[t].title for t in script.targets if t in catalog]
    for turn in range(1, script.max_turns + 1):
        template = script.templates[min(turn - 1, len(script.templates) - 1)]
        reply = send(render_template(template, catalog, script.targets))
        if any(mentions_title(reply, title, threshold) for title in titles):
            return {"success": True, "turns_used": turn}
    return {"success": False, "turns_used": script.max_turns}


def eval_conversation(
    session_factory: SessionFactory,
    scripts: list[SimulatorScript],
    catalog: Catalog,
    threshold: float = 0.9,
) -> EvalReport:
    """Success rate over scripts; agent errors count as failed cases."""
    successes = 0
    failures = 0
    for script in scripts:
        try:
            result = simulate_conversation(session_factory, script, catalog, threshold)
        except Exception:
            failures += 1
            continue
        if result["success"]:
            successes += 1
    metrics = {"success_rate": successes / len(scripts)} if scripts else {}
    return EvalReport(
        dimension="conversation", cases=len(scripts), failures=failures, metrics=metrics
    )


def load_scripts(source: BinaryIO | Iterable[bytes]) -> list[SimulatorScript]:
    """JSON-lines {"targets": [ids], "templates": [texts], "max_turns": n}."""
    scripts = []
    for line_no, obj in iter_jsonl(source):
        targets = string_list(require(obj, "targets", line_no), "targets", line_no)
        templates = string_list(require(obj, "templates", line_no), "templates", line_no)
        max_turns = require(obj, "max_turns", line_no)
        if not isinstance(max_turns, int):
            raise MalformedRecord(line_no, "'max_turns' must be an integer")
        scripts.append(
            SimulatorScript(
                targets=tuple(targets), templates=tuple(templates), max_turns=max_turns
            )
        )
    return scripts
