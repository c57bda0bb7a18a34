"""SQL-like filter language over catalog attributes.

Grammar::

    query  := clause (("ORDER" "BY") attr ("ASC"|"DESC"))? ("LIMIT" int)?
    clause := disj
    disj   := conj ("OR" conj)*
    conj   := term ("AND" term)*
    term   := "NOT" term | "(" clause ")" | cmp
    cmp    := attr op literal
            | attr "IN" "(" literal ("," literal)* ")"
            | attr "CONTAINS" literal
    op     := "=" | "!=" | "<" | "<=" | ">" | ">="

Keywords are case-insensitive; AND binds tighter than OR.  String literals
are single-quoted with ``''`` escaping a quote.  Comparisons against an
attribute the item does not carry evaluate to false, so NOT is an exact
set complement.  String equality and IN are case-sensitive; CONTAINS is a
case-insensitive substring test on text and case-insensitive membership on
text-list.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal

from .catalog import Catalog, Item
from .errors import ParseError, TypeMismatch, UnknownAttribute

KEYWORDS = {"AND", "OR", "NOT", "IN", "CONTAINS", "ORDER", "BY", "ASC", "DESC", "LIMIT"}
COMPARE_OPS = ("=", "!=", "<", "<=", ">", ">=")
NUMERIC_ONLY_OPS = ("<", "<=", ">", ">=")


# --- AST --------------------------------------------------------------------

@dataclass(frozen=True)
class Comparison:
    attr: str
    op: str  # one of COMPARE_OPS, "IN", "CONTAINS"
    literal: object  # str | float | tuple of those for IN


@dataclass(frozen=True)
class And:
    children: tuple


@dataclass(frozen=True)
class Or:
    children: tuple


@dataclass(frozen=True)
class Not:
    child: object


@dataclass(frozen=True)
class Query:
    root: object
    order_by: tuple[str, bool] | None = None  # (attr, ascending)
    limit: int | None = None


# --- tokenizer --------------------------------------------------------------

@dataclass(frozen=True)
class _Token:
    kind: str  # IDENT NUMBER STRING OP LPAREN RPAREN COMMA EOF
    value: object
    pos: int


_IDENT_RE = re.compile(r"[a-zA-Z_][a-zA-Z0-9_]*")
_NUMBER_RE = re.compile(r"-?\d+(\.\d+)?")


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "(":
            tokens.append(_Token("LPAREN", "(", i))
            i += 1
        elif ch == ")":
            tokens.append(_Token("RPAREN", ")", i))
            i += 1
        elif ch == ",":
            tokens.append(_Token("COMMA", ",", i))
            i += 1
        elif ch == "'":
            j = i + 1
            parts: list[str] = []
            while True:
                if j >= n:
                    raise ParseError(i, "closing quote for string literal")
                if text[j] == "'":
                    if j + 1 < n and text[j + 1] == "'":  # '' escapes a quote
                        parts.append("'")
                        j += 2
                        continue
                    break
                parts.append(text[j])
                j += 1
            tokens.append(_Token("STRING", "".join(parts), i))
            i = j + 1
        elif text.startswith(("!=", "<=", ">="), i):
            tokens.append(_Token("OP", text[i : i + 2], i))
            i += 2
        elif ch in "=<>":
            tokens.append(_Token("OP", ch, i))
            i += 1
        elif ch == "-" or ch.isdigit():
            m = _NUMBER_RE.match(text, i)
            if not m:
                raise ParseError(i, "a number")
            tokens.append(_Token("NUMBER", float(m.group(0)), i))
            i = m.end()
        else:
            m = _IDENT_RE.match(text, i)
            if not m:
                raise ParseError(i, "an attribute name, literal, or operator")
            tokens.append(_Token("IDENT", m.group(0), i))
            i = m.end()
    tokens.append(_Token("EOF", None, n))
    return tokens


# --- parser -----------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.idx = 0

    def peek(self) -> _Token:
        return self.tokens[self.idx]

    def next(self) -> _Token:
        tok = self.tokens[self.idx]
        self.idx += 1
        return tok

    def at_keyword(self, word: str) -> bool:
        tok = self.peek()
        return tok.kind == "IDENT" and tok.value.upper() == word

    def expect_keyword(self, word: str) -> None:
        if not self.at_keyword(word):
            raise ParseError(self.peek().pos, f"keyword {word}")
        self.next()

    def parse(self) -> Query:
        root = self.clause()
        order_by = None
        limit = None
        if self.at_keyword("ORDER"):
            self.next()
            self.expect_keyword("BY")
            attr = self.attr_name()
            if self.at_keyword("ASC"):
                self.next()
                order_by = (attr, True)
            elif self.at_keyword("DESC"):
                self.next()
                order_by = (attr, False)
            else:
                raise ParseError(self.peek().pos, "ASC or DESC")
        if self.at_keyword("LIMIT"):
            self.next()
            tok = self.peek()
            if tok.kind != "NUMBER" or tok.value != int(tok.value) or tok.value < 1:
                raise ParseError(tok.pos, "a positive integer")
            self.next()
            limit = int(tok.value)
        tail = self.peek()
        if tail.kind != "EOF":
            raise ParseError(tail.pos, "end of query")
        return Query(root, order_by, limit)

    def clause(self):
        return self.disj()

    def disj(self):
        children = [self.conj()]
        while self.at_keyword("OR"):
            self.next()
            children.append(self.conj())
        if len(children) == 1:
            return children[0]
        return Or(tuple(children))

    def conj(self):
        children = [self.term()]
        while self.at_keyword("AND"):
            self.next()
            children.append(self.term())
        if len(children) == 1:
            return children[0]
        return And(tuple(children))

    def term(self):
        if self.at_keyword("NOT"):
            self.next()
            return Not(self.term())
        tok = self.peek()
        if tok.kind == "LPAREN":
            self.next()
            inner = self.clause()
            if self.peek().kind != "RPAREN":
                raise ParseError(self.peek().pos, "')'")
            self.next()
            return inner
        return self.cmp()

    def attr_name(self) -> str:
        tok = self.peek()
        if tok.kind != "IDENT" or tok.value.upper() in KEYWORDS:
            raise ParseError(tok.pos, "an attribute name")
        self.next()
        return tok.value

    def literal(self) -> object:
        tok = self.peek()
        if tok.kind in ("STRING", "NUMBER"):
            self.next()
            return tok.value
        raise ParseError(tok.pos, "a literal")

    def cmp(self) -> Comparison:
        attr = self.attr_name()
        if self.at_keyword("IN"):
            self.next()
            if self.peek().kind != "LPAREN":
                raise ParseError(self.peek().pos, "'('")
            self.next()
            values = [self.literal()]
            while self.peek().kind == "COMMA":
                self.next()
                values.append(self.literal())
            if self.peek().kind != "RPAREN":
                raise ParseError(self.peek().pos, "')'")
            self.next()
            return Comparison(attr, "IN", tuple(values))
        if self.at_keyword("CONTAINS"):
            self.next()
            return Comparison(attr, "CONTAINS", self.literal())
        tok = self.peek()
        if tok.kind != "OP":
            raise ParseError(tok.pos, "a comparison operator, IN, or CONTAINS")
        self.next()
        return Comparison(attr, tok.value, self.literal())


def parse_query(text: str) -> Query:
    """Parse a filter expression into its AST; raises ParseError on bad input."""
    return _Parser(text).parse()


# --- pretty printer ---------------------------------------------------------

def _format_literal(value: object) -> str:
    if isinstance(value, str):
        return "'" + value.replace("'", "''") + "'"
    num = float(value)  # type: ignore[arg-type]
    if num == int(num):
        return str(int(num))
    # positional notation only: the grammar has no scientific literals
    return format(Decimal(repr(num)), "f")


def _print_node(node: object) -> str:
    if isinstance(node, Comparison):
        if node.op == "IN":
            inner = ", ".join(_format_literal(v) for v in node.literal)  # type: ignore[union-attr]
            return f"{node.attr} IN ({inner})"
        return f"{node.attr} {node.op} {_format_literal(node.literal)}"
    if isinstance(node, Not):
        child = _print_node(node.child)
        if isinstance(node.child, (And, Or)):
            child = f"({child})"
        return f"NOT {child}"
    if isinstance(node, And):
        parts = []
        for child in node.children:
            text = _print_node(child)
            if isinstance(child, (And, Or)):
                text = f"({text})"
            parts.append(text)
        return " AND ".join(parts)
    if isinstance(node, Or):
        parts = []
        for child in node.children:
            text = _print_node(child)
            if isinstance(child, Or):
                text = f"({text})"
            parts.append(text)
        return " OR ".join(parts)
    raise TypeError(f"not an AST node: {node!r}")


def pretty_print(query: Query) -> str:
    """Render an AST back to the filter language; re-parsing is a fixed point."""
    text = _print_node(query.root)
    if query.order_by is not None:
        attr, ascending = query.order_by
        text += f" ORDER BY {attr} {'ASC' if ascending else 'DESC'}"
    if query.limit is not None:
        text += f" LIMIT {query.limit}"
    return text


# --- validation -------------------------------------------------------------

def _is_number(value: object) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _validate_cmp(node: Comparison, kinds: dict[str, str]) -> None:
    if node.attr not in kinds:
        raise UnknownAttribute(node.attr)
    kind = kinds[node.attr]
    if node.op in NUMERIC_ONLY_OPS:
        if kind != "number":
            raise TypeMismatch(node.attr, f"{node.op} requires a number attribute")
        if not _is_number(node.literal):
            raise TypeMismatch(node.attr, f"{node.op} requires a numeric literal")
    elif node.op in ("=", "!="):
        if kind == "text-list":
            raise TypeMismatch(node.attr, "use CONTAINS on text-list attributes")
        if kind == "number" and not _is_number(node.literal):
            raise TypeMismatch(node.attr, "numeric attribute compared to a string")
        if kind == "text" and not isinstance(node.literal, str):
            raise TypeMismatch(node.attr, "text attribute compared to a number")
    elif node.op == "IN":
        if kind == "text-list":
            raise TypeMismatch(node.attr, "use CONTAINS on text-list attributes")
        for value in node.literal:  # type: ignore[union-attr]
            if kind == "number" and not _is_number(value):
                raise TypeMismatch(node.attr, "IN list must be all numbers")
            if kind == "text" and not isinstance(value, str):
                raise TypeMismatch(node.attr, "IN list must be all strings")
    elif node.op == "CONTAINS":
        if kind == "number":
            raise TypeMismatch(node.attr, "CONTAINS requires text or text-list")
        if not isinstance(node.literal, str):
            raise TypeMismatch(node.attr, "CONTAINS requires a string literal")
    else:
        raise TypeMismatch(node.attr, f"unknown operator {node.op!r}")


def validate_query(query: Query, catalog: Catalog) -> None:
    """Check attribute existence and operator/kind compatibility."""
    def walk(node: object) -> None:
        if isinstance(node, Comparison):
            _validate_cmp(node, catalog.kinds)
        elif isinstance(node, Not):
            walk(node.child)
        elif isinstance(node, (And, Or)):
            for child in node.children:
                walk(child)
    walk(query.root)
    if query.order_by is not None:
        attr, _ = query.order_by
        if attr not in catalog.kinds:
            raise UnknownAttribute(attr)
        if catalog.kinds[attr] == "text-list":
            raise TypeMismatch(attr, "cannot ORDER BY a text-list attribute")


# --- execution --------------------------------------------------------------

def _eval_cmp(node: Comparison, item: Item) -> bool:
    value = item.attributes.get(node.attr)
    if value is None:
        return False
    op = node.op
    if op == "=":
        if _is_number(value):
            return float(value) == float(node.literal)  # type: ignore[arg-type]
        return value == node.literal
    if op == "!=":
        if _is_number(value):
            return float(value) != float(node.literal)  # type: ignore[arg-type]
        return value != node.literal
    if op in NUMERIC_ONLY_OPS:
        if not _is_number(value):
            raise TypeMismatch(node.attr, f"{op} on non-numeric value")
        left = float(value)
        right = float(node.literal)  # type: ignore[arg-type]
        if op == "<":
            return left < right
        if op == "<=":
            return left <= right
        if op == ">":
            return left > right
        return left >= right
    if op == "IN":
        if _is_number(value):
            return any(_is_number(v) and float(value) == float(v) for v in node.literal)  # type: ignore[union-attr]
        return any(value == v for v in node.literal)  # type: ignore[union-attr]
    if op == "CONTAINS":
        needle = str(node.literal).casefold()
        if isinstance(value, list):
            return any(str(elem).casefold() == needle for elem in value)
        if isinstance(value, str):
            return needle in value.casefold()
        raise TypeMismatch(node.attr, "CONTAINS on non-text value")
    raise TypeMismatch(node.attr, f"unknown operator {op!r}")


def _matches(node: object, item: Item) -> bool:
    if isinstance(node, Comparison):
        return _eval_cmp(node, item)
    if isinstance(node, Not):
        return not _matches(node.child, item)
    if isinstance(node, And):
        return all(_matches(child, item) for child in node.children)
    if isinstance(node, Or):
        return any(_matches(child, item) for child in node.children)
    raise TypeError(f"not an AST node: {node!r}")


def run_query(catalog: Catalog, query: Query) -> list[str]:
    """Evaluate a validated query; deterministic total order, truncated to limit.

    Without ORDER BY, results sort by descending popularity then ascending id.
    With ORDER BY, items lacking the sort attribute go last; ties fall back to
    ascending id either way.
    """
    validate_query(query, catalog)
    survivors = [item for item in catalog.items() if _matches(query.root, item)]
    if query.order_by is None:
        survivors.sort(key=lambda it: it.id)
        survivors.sort(key=lambda it: it.popularity, reverse=True)
    else:
        attr, ascending = query.order_by
        present = [it for it in survivors if attr in it.attributes]
        absent = sorted(
            (it for it in survivors if attr not in it.attributes), key=lambda it: it.id
        )
        present.sort(key=lambda it: it.id)
        present.sort(key=lambda it: it.attributes[attr], reverse=not ascending)  # type: ignore[arg-type]
        survivors = present + absent
    ids = [item.id for item in survivors]
    if query.limit is not None:
        ids = ids[: query.limit]
    return ids
