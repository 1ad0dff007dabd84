"""Abstract syntax and parser for a small gringo-like rule language.

Supported: facts (with integer ranges ``lo..hi`` as arguments), normal rules,
constraints, default negation ``not``, and comparisons between terms.  No
aggregates, choice rules, disjunction or function symbols.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from ..errors import ParseError, UnsafeVariableError


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Range:
    lo: int
    hi: int

    def __str__(self) -> str:
        return f"{self.lo}..{self.hi}"


Term = Union[int, str, Var, Range]  # str is a symbolic constant


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple = ()

    def variables(self) -> set[str]:
        return {t.name for t in self.args if isinstance(t, Var)}

    def __str__(self) -> str:
        return atom_name(self.pred, self.args)


@dataclass(frozen=True)
class Literal:
    atom: Atom
    negated: bool = False

    def __str__(self) -> str:
        return f"not {self.atom}" if self.negated else str(self.atom)


COMPARISONS = ("<", "<=", ">", ">=", "=", "!=")


@dataclass(frozen=True)
class Comparison:
    op: str
    left: Term
    right: Term

    def variables(self) -> set[str]:
        return {t.name for t in (self.left, self.right) if isinstance(t, Var)}

    def __str__(self) -> str:
        return f"{self.left} {self.op} {self.right}"


BodyItem = Union[Literal, Comparison]


@dataclass(frozen=True)
class Rule:
    head: Optional[Atom]  # None for a constraint
    body: tuple = ()
    line: int = 0
    column: int = 0

    @property
    def positive(self) -> list[Atom]:
        return [b.atom for b in self.body if isinstance(b, Literal) and not b.negated]

    @property
    def negative(self) -> list[Atom]:
        return [b.atom for b in self.body if isinstance(b, Literal) and b.negated]

    @property
    def comparisons(self) -> list[Comparison]:
        return [b for b in self.body if isinstance(b, Comparison)]

    def __str__(self) -> str:
        head = "" if self.head is None else str(self.head)
        if not self.body:
            return f"{head}."
        body = ", ".join(str(b) for b in self.body)
        return f"{head} :- {body}." if head else f":- {body}."


@dataclass
class NonGroundProgram:
    rules: list[Rule] = field(default_factory=list)

    def __str__(self) -> str:
        return "\n".join(str(r) for r in self.rules) + ("\n" if self.rules else "")


def term_str(t: Term) -> str:
    return str(t)


def atom_name(pred: str, args: tuple) -> str:
    if not args:
        return pred
    return f"{pred}({','.join(term_str(a) for a in args)})"


def term_key(t: int | str) -> tuple:
    """Total order on ground terms: integers first, then symbols."""
    return (0, t, "") if isinstance(t, int) else (1, 0, t)


def compare(op: str, a: int | str, b: int | str) -> bool:
    if op == "=":
        return a == b
    if op == "!=":
        return a != b
    ka, kb = term_key(a), term_key(b)
    return {"<": ka < kb, "<=": ka <= kb, ">": ka > kb, ">=": ka >= kb}[op]


# -- tokenizer ----------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>%[^\n]*)
  | (?P<int>\d+)
  | (?P<ident>[a-z][A-Za-z0-9_']*)
  | (?P<var>[A-Z][A-Za-z0-9_']*)
  | (?P<reserved>_[A-Za-z0-9_']*)
  | (?P<op>:-|\.\.|<=|>=|!=|[<>=(),.\-])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "reserved":
            raise ParseError(f"names starting with '_' are reserved: {m.group()!r}", line, col)
        elif kind not in ("ws", "comment"):
            out.append(Token(kind, m.group(), line, col))
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


# -- parser -------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def at(self, text: str) -> bool:
        t = self.peek()
        return t.kind == "op" and t.text == text

    def expect(self, text: str) -> Token:
        t = self.next()
        if t.kind != "op" or t.text != text:
            got = t.text or "end of input"
            raise ParseError(f"expected {text!r}, found {got!r}", t.line, t.column)
        return t

    def program(self) -> NonGroundProgram:
        rules = []
        while self.peek().kind != "eof":
            rules.append(self.statement())
        return NonGroundProgram(rules)

    def statement(self) -> Rule:
        start = self.peek()
        head = None
        if not self.at(":-"):
            head = self.atom(allow_range=True)
        body: list[BodyItem] = []
        bare: list[tuple[Term, Token]] = []
        if self.at(":-"):
            self.next()
            body.append(self.literal(bare))
            while self.at(","):
                self.next()
                body.append(self.literal(bare))
        elif head is None:
            raise ParseError("expected a rule", start.line, start.column)
        self.expect(".")
        body = [b for b in body if b is not None]
        rule = Rule(head, tuple(body), start.line, start.column)
        if body and head is not None and any(isinstance(a, Range) for a in head.args):
            raise ParseError("ranges are only allowed in facts", start.line, start.column)
        _check_safety(rule, bare)
        return rule

    def literal(self, bare: list) -> Optional[BodyItem]:
        t = self.peek()
        if t.kind == "ident" and t.text == "not":
            self.next()
            return Literal(self.atom(allow_range=False), True)
        if t.kind == "ident":
            a = self.atom(allow_range=False)
            if self.peek().text in COMPARISONS and self.peek().kind == "op":
                if a.args:
                    raise ParseError("function terms are not supported", t.line, t.column)
                op = self.next().text
                return Comparison(op, a.pred, self.term(allow_range=False))
            return Literal(a, False)
        left = self.term(allow_range=False)
        nt = self.peek()
        if nt.kind == "op" and nt.text in COMPARISONS:
            op = self.next().text
            return Comparison(op, left, self.term(allow_range=False))
        bare.append((left, t))
        return None

    def atom(self, allow_range: bool) -> Atom:
        t = self.next()
        if t.kind != "ident" or t.text == "not":
            raise ParseError(f"expected a predicate name, found {t.text or 'end of input'!r}", t.line, t.column)
        args = []
        if self.at("("):
            self.next()
            args.append(self.term(allow_range))
            while self.at(","):
                self.next()
                args.append(self.term(allow_range))
            self.expect(")")
        return Atom(t.text, tuple(args))

    def term(self, allow_range: bool) -> Term:
        t = self.next()
        if t.kind == "var":
            return Var(t.text)
        if t.kind == "ident" and t.text != "not":
            if self.at("("):
                raise ParseError("function terms are not supported", t.line, t.column)
            return t.text
        neg = False
        if t.kind == "op" and t.text == "-":
            neg = True
            t = self.next()
        if t.kind != "int":
            raise ParseError(f"expected a term, found {t.text or 'end of input'!r}", t.line, t.column)
        value = -int(t.text) if neg else int(t.text)
        if self.at(".."):
            dots = self.next()
            if not allow_range:
                raise ParseError("ranges are only allowed in facts", dots.line, dots.column)
            hi = self.term(False)
            if not isinstance(hi, int):
                raise ParseError("range bounds must be integers", dots.line, dots.column)
            return Range(value, hi)
        return value


def _check_safety(rule: Rule, bare: list) -> None:
    bound: set[str] = set()
    for a in rule.positive:
        bound |= a.variables()
    need: list[str] = []
    if rule.head is not None:
        need += sorted(rule.head.variables())
    for a in rule.negative:
        need += sorted(a.variables())
    for c in rule.comparisons:
        need += sorted(c.variables())
    need += [t.name for t, _ in bare if isinstance(t, Var)]
    for v in need:
        if v not in bound:
            raise UnsafeVariableError(
                f"unsafe variable {v} in rule '{_rule_text(rule, bare)}'", rule.line, rule.column
            )
    if bare:
        t, tok = bare[0]
        raise ParseError(f"term {term_str(t)!r} is not a literal", tok.line, tok.column)


def _rule_text(rule: Rule, bare: list) -> str:
    items = [str(b) for b in rule.body] + [term_str(t) for t, _ in bare]
    head = "" if rule.head is None else str(rule.head)
    return f"{head} :- {', '.join(items)}." if items else f"{head}."


def parse_program(text: str) -> NonGroundProgram:
    """Parse rule-language text.  Raises ParseError with line and column."""
    return _Parser(text).program()


def iter_ground_args(args: tuple) -> Iterator[tuple]:
    """Cartesian expansion of a fact's argument tuple (ranges become integers)."""
    if not args:
        yield ()
        return
    first, rest = args[0], args[1:]
    values = range(first.lo, first.hi + 1) if isinstance(first, Range) else (first,)
    for v in values:
        for tail in iter_ground_args(rest):
            yield (v,) + tail
