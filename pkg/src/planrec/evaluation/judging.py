"""Pairwise judged evaluation for explanations and chit-chat.

Each rubric dimension is judged twice, once per presentation order, to offset
position bias: agreement yields the verdict, disagreement a tie.  The judge
must answer with exactly A, B, or TIE.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import BinaryIO, Iterable

from ..backend import ChatBackend, ChatMessage
from ..errors import JudgeFormatError, MalformedRecord
from .cases import iter_jsonl, require
from .report import OUTCOMES, EvalReport

EXPLANATION_RUBRIC = ("informativeness", "persuasiveness", "helpfulness")
CHITCHAT_RUBRIC = ("helpfulness", "relevance", "thoroughness")
RUBRICS = {"explanation": EXPLANATION_RUBRIC, "chitchat": CHITCHAT_RUBRIC}

_JUDGE_PREAMBLE = (
    "You compare two candidate responses to the same prompt on a single "
    "criterion. Reply with exactly A, B, or TIE and nothing else."
)
_VALID = {"A", "B", "TIE"}


@dataclass(frozen=True)
class JudgedCase:
    prompt: str
    a: str
    b: str


@dataclass(frozen=True)
class JudgeVerdict:
    outcomes: dict[str, str]  # rubric dimension -> win | loss | tie (for model A)

    def __post_init__(self) -> None:
        for dimension, outcome in self.outcomes.items():
            if outcome not in OUTCOMES:
                raise ValueError(f"invalid outcome {outcome!r} for {dimension}")


def _judge_prompt(dimension: str, prompt: str, case: JudgedCase, a_first: bool) -> str:
    first, second = ("A", "B") if a_first else ("B", "A")
    outputs = {"A": case.a, "B": case.b}
    return (
        f"Criterion: {dimension}.\n\n"
        f"Prompt:\n{prompt}\n\n"
        f"Response {first}:\n{outputs[first]}\n\n"
        f"Response {second}:\n{outputs[second]}\n\n"
        f"Which response is better on {dimension}? Reply with exactly A, B, or TIE."
    )


def _ask(backend: ChatBackend, content: str) -> str:
    """One judge call with one repair attempt; raises JudgeFormatError."""
    messages = [ChatMessage("system", _JUDGE_PREAMBLE), ChatMessage("user", content)]
    reply = backend.chat(messages).strip()
    if reply in _VALID:
        return reply
    repair = messages + [
        ChatMessage("assistant", reply),
        ChatMessage("user", "Error: reply with exactly A, B, or TIE and nothing else."),
    ]
    reply = backend.chat(repair).strip()
    if reply in _VALID:
        return reply
    raise JudgeFormatError(reply)


def pairwise_judge(
    backend: ChatBackend,
    prompt: str,
    output_a: str,
    output_b: str,
    rubric: tuple[str, ...],
) -> JudgeVerdict:
    if tuple(rubric) not in (EXPLANATION_RUBRIC, CHITCHAT_RUBRIC):
        raise ValueError(f"unknown rubric {rubric!r}")
    case = JudgedCase(prompt=prompt, a=output_a, b=output_b)
    outcomes = {}
    for dimension in rubric:
        first = _ask(backend, _judge_prompt(dimension, prompt, case, a_first=True))
        second = _ask(backend, _judge_prompt(dimension, prompt, case, a_first=False))
        if first != second:
            outcomes[dimension] = "tie"
        else:
            outcomes[dimension] = {"A": "win", "B": "loss", "TIE": "tie"}[first]
    return JudgeVerdict(outcomes)


def eval_judged(
    backend: ChatBackend, cases: list[JudgedCase], rubric: tuple[str, ...], label: str
) -> EvalReport:
    """Tally win/loss/tie per rubric dimension over all cases."""
    tallies = {d: {o: 0 for o in OUTCOMES} for d in rubric}
    failures = 0
    for case in cases:
        try:
            verdict = pairwise_judge(backend, case.prompt, case.a, case.b, rubric)
        except JudgeFormatError:
            failures += 1
            continue
        for dimension, outcome in verdict.outcomes.items():
            tallies[dimension][outcome] += 1
    return EvalReport(dimension=label, cases=len(cases), failures=failures, tallies=tallies)


def load_judged_cases(source: BinaryIO | Iterable[bytes]) -> list[JudgedCase]:
    """JSON-lines {"prompt": ..., "a": ..., "b": ...}."""
    cases = []
    for line_no, obj in iter_jsonl(source):
        fields = {}
        for key in ("prompt", "a", "b"):
            value = require(obj, key, line_no)
            if not isinstance(value, str):
                raise MalformedRecord(line_no, f"{key!r} must be a string")
            fields[key] = value
        cases.append(JudgedCase(**fields))
    return cases
