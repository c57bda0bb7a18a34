"""Exception hierarchy shared across the toolkit."""

from __future__ import annotations


class PlanrecError(Exception):
    """Base class for all errors raised by this package."""


# --- catalog / filter language ---------------------------------------------

class MalformedRecord(PlanrecError):
    """A line in an input file violates its declared format."""

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class DuplicateId(PlanrecError):
    def __init__(self, item_id: str):
        super().__init__(f"duplicate item id {item_id!r}")
        self.item_id = item_id


class ParseError(PlanrecError):
    """Filter-language syntax error at a character position."""

    def __init__(self, position: int, expected: str):
        super().__init__(f"at position {position}: expected {expected}")
        self.position = position
        self.expected = expected


class UnknownAttribute(PlanrecError):
    def __init__(self, name: str):
        super().__init__(f"unknown attribute {name!r}")
        self.name = name


class TypeMismatch(PlanrecError):
    def __init__(self, attr: str, detail: str = ""):
        msg = f"operator incompatible with attribute {attr!r}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.attr = attr


# --- retrieval / embedding --------------------------------------------------

class EmptyText(PlanrecError):
    def __init__(self) -> None:
        super().__init__("text is empty after trimming whitespace")


# --- ranker -----------------------------------------------------------------

class UnknownItem(PlanrecError):
    def __init__(self, item_id: str):
        super().__init__(f"unknown item {item_id!r}")
        self.item_id = item_id


# --- chat backends ----------------------------------------------------------

class NoScriptMatch(PlanrecError):
    def __init__(self, message: str):
        super().__init__(f"no script rule matches {message!r} and no default set")
        self.message = message


class TransportError(PlanrecError):
    """Network-level failure talking to a remote backend."""


class RemoteError(PlanrecError):
    def __init__(self, status: int, body: str):
        super().__init__(f"remote backend returned {status}: {body[:200]}")
        self.status = status
        self.body = body


# --- agent ------------------------------------------------------------------

class DuplicateTool(PlanrecError):
    def __init__(self, name: str):
        super().__init__(f"tool {name!r} already registered")
        self.name = name


class PlanParseError(PlanrecError):
    """Planner reply could not be parsed as a plan, even after repair."""


class PlanValidationError(PlanrecError):
    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


class ToolExecutionError(PlanrecError):
    def __init__(self, step_index: int, cause: Exception):
        super().__init__(f"step {step_index} failed: {cause}")
        self.step_index = step_index
        self.cause = cause


class BusySession(PlanrecError):
    def __init__(self, session_id: str):
        super().__init__(f"session {session_id} already has a turn in flight")
        self.session_id = session_id


class UnknownSession(PlanrecError):
    def __init__(self, session_id: str):
        super().__init__(f"unknown session {session_id!r}")
        self.session_id = session_id


class ServiceUnavailable(PlanrecError):
    def __init__(self, detail: str = "service is still initializing"):
        super().__init__(detail)


# --- knowledge pipeline -----------------------------------------------------

class UnknownEntity(PlanrecError):
    def __init__(self, entity: str):
        super().__init__(f"entity {entity!r} not present in the knowledge graph")
        self.entity = entity


# --- evaluation -------------------------------------------------------------

class JudgeFormatError(PlanrecError):
    def __init__(self, reply: str):
        super().__init__(f"judge reply not one of A/B/TIE: {reply!r}")
        self.reply = reply


class IncompatibleReports(PlanrecError):
    """Reports with differing metric key sets cannot be aggregated."""
