"""A line-oriented mini intermediate representation.

Example::

    vars x y
    loc start:
      x := 1
      if x > 0 goto pos else neg
    loc pos:
      y := x * x
      goto done
    loc neg:
      y := -x
      goto done
    loc done:
    assume done y +

Each ``loc`` block holds assignments followed by an optional terminator
(``goto`` or a two-way ``if``); a block without a terminator exits the
program.  The first block is the entry and may not be jumped to.
``assume L v s`` declares the speculation "at the start of L, v has sign s".
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Union

from ..errors import ParseError
from ..lattice import AtomUniverse
from . import signs

Operand = Union[str, int]


@dataclass(frozen=True)
class Assign:
    target: str
    op: str  # "const" | "copy" | "+" | "*" | "neg"
    args: tuple

    def __str__(self) -> str:
        if self.op in ("const", "copy"):
            return f"{self.target} := {self.args[0]}"
        if self.op == "neg":
            return f"{self.target} := -{self.args[0]}"
        return f"{self.target} := {self.args[0]} {self.op} {self.args[1]}"


@dataclass(frozen=True)
class Branch:
    var: str
    cmp: str
    then: str
    orelse: str

    def __str__(self) -> str:
        return f"if {self.var} {self.cmp} 0 goto {self.then} else {self.orelse}"


@dataclass(frozen=True)
class Goto:
    target: str

    def __str__(self) -> str:
        return f"goto {self.target}"


@dataclass(frozen=True)
class Block:
    name: str
    stmts: tuple
    term: Optional[Union[Branch, Goto]] = None


@dataclass(frozen=True)
class Assumption:
    loc: str
    var: str
    sign: int

    @property
    def label(self) -> str:
        return f"{self.loc}:{self.var}:{signs.name(self.sign)}"


@dataclass(frozen=True, eq=False)
class MiniProgram:
    variables: tuple
    blocks: tuple
    assumptions: tuple = ()

    def __post_init__(self):
        _validate(self)

    @property
    def entry(self) -> int:
        return 0

    @cached_property
    def block_index(self) -> dict[str, int]:
        return {b.name: i for i, b in enumerate(self.blocks)}

    @cached_property
    def var_index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.variables)}

    @cached_property
    def assumption_universe(self) -> AtomUniverse:
        return AtomUniverse(a.label for a in self.assumptions)

    @cached_property
    def edges(self) -> tuple:
        """Per block: ``(target index, guard)`` pairs; guard is ``(var, cmp, taken)`` or None."""
        out = []
        for b in self.blocks:
            t = b.term
            if isinstance(t, Goto):
                out.append(((self.block_index[t.target], None),))
            elif isinstance(t, Branch):
                out.append((
                    (self.block_index[t.then], (t.var, t.cmp, True)),
                    (self.block_index[t.orelse], (t.var, t.cmp, False)),
                ))
            else:
                out.append(())
        return tuple(out)

    @cached_property
    def predecessors(self) -> tuple:
        preds: list[list[tuple[int, tuple | None]]] = [[] for _ in self.blocks]
        for src, es in enumerate(self.edges):
            for dst, guard in es:
                preds[dst].append((src, guard))
        return tuple(tuple(p) for p in preds)

    @cached_property
    def reverse_postorder(self) -> tuple:
        seen, order = set(), []

        def visit(i: int) -> None:
            seen.add(i)
            for dst, _ in self.edges[i]:
                if dst not in seen:
                    visit(dst)
            order.append(i)

        for i in range(len(self.blocks)):
            if i not in seen:
                visit(i)
        return tuple(reversed(order))

    def __str__(self) -> str:
        return format_mini(self)


def _validate(p: MiniProgram) -> None:
    if not p.blocks:
        raise ParseError("a program needs at least one location")
    names = [b.name for b in p.blocks]
    if len(set(names)) != len(names):
        raise ParseError("duplicate location names")
    if len(set(p.variables)) != len(p.variables):
        raise ParseError("duplicate variable names")
    vs, locs = set(p.variables), set(names)
    for b in p.blocks:
        for s in b.stmts:
            for v in [s.target] + [a for a in s.args if isinstance(a, str)]:
                if v not in vs:
                    raise ParseError(f"undeclared variable {v!r} in location {b.name}")
        t = b.term
        targets = [t.target] if isinstance(t, Goto) else [t.then, t.orelse] if isinstance(t, Branch) else []
        if isinstance(t, Branch) and t.var not in vs:
            raise ParseError(f"undeclared variable {t.var!r} in location {b.name}")
        for tgt in targets:
            if tgt not in locs:
                raise ParseError(f"unknown location {tgt!r} in location {b.name}")
            if tgt == names[0]:
                raise ParseError("the entry location may not have predecessors")
    seen = set()
    for a in p.assumptions:
        if a.loc not in locs or a.var not in vs:
            raise ParseError(f"assumption {a.label} names an unknown location or variable")
        if a.label in seen:
            raise ParseError(f"duplicate assumption {a.label}")
        seen.add(a.label)


_NAME = r"[A-Za-z_][A-Za-z0-9_]*"
_OPND = rf"(?:{_NAME}|-?\d+)"
_RE = {
    "vars": re.compile(rf"vars?((?:\s+{_NAME})*)$"),
    "loc": re.compile(rf"loc\s+({_NAME})\s*:$"),
    "bin": re.compile(rf"({_NAME})\s*:=\s*({_OPND})\s*([+*])\s*({_OPND})$"),
    "neg": re.compile(rf"({_NAME})\s*:=\s*-\s*({_NAME})$"),
    "mov": re.compile(rf"({_NAME})\s*:=\s*({_OPND})$"),
    "if": re.compile(rf"if\s+({_NAME})\s*(<=|>=|!=|<|>|=)\s*0\s+goto\s+({_NAME})\s+else\s+({_NAME})$"),
    "goto": re.compile(rf"goto\s+({_NAME})$"),
    "assume": re.compile(rf"assume\s+({_NAME})\s+({_NAME})\s+([-0+])$"),
}


def _operand(text: str) -> Operand:
    return int(text) if re.fullmatch(r"-?\d+", text) else text


def parse_mini(text: str) -> MiniProgram:
    variables: list[str] = []
    blocks: list[Block] = []
    assumptions: list[Assumption] = []
    cur: Optional[dict] = None

    def close() -> None:
        if cur is not None:
            blocks.append(Block(cur["name"], tuple(cur["stmts"]), cur["term"]))

    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if m := _RE["vars"].match(line):
            variables += m.group(1).split()
            continue
        if m := _RE["loc"].match(line):
            close()
            cur = {"name": m.group(1), "stmts": [], "term": None}
            continue
        if m := _RE["assume"].match(line):
            assumptions.append(Assumption(m.group(1), m.group(2), signs.parse_sign(m.group(3))))
            continue
        if cur is None:
            raise ParseError("statement outside of a location", no, 1)
        if cur["term"] is not None:
            raise ParseError("statement after the location's terminator", no, 1)
        if m := _RE["if"].match(line):
            cur["term"] = Branch(m.group(1), m.group(2), m.group(3), m.group(4))
        elif m := _RE["goto"].match(line):
            cur["term"] = Goto(m.group(1))
        elif m := _RE["bin"].match(line):
            cur["stmts"].append(Assign(m.group(1), m.group(3), (_operand(m.group(2)), _operand(m.group(4)))))
        elif m := _RE["neg"].match(line):
            cur["stmts"].append(Assign(m.group(1), "neg", (m.group(2),)))
        elif m := _RE["mov"].match(line):
            v = _operand(m.group(2))
            cur["stmts"].append(Assign(m.group(1), "const" if isinstance(v, int) else "copy", (v,)))
        else:
            raise ParseError(f"cannot parse {line!r}", no, 1)
    close()
    return MiniProgram(tuple(variables), tuple(blocks), tuple(assumptions))


def format_mini(p: MiniProgram) -> str:
    lines = ["vars " + " ".join(p.variables)]
    for b in p.blocks:
        lines.append(f"loc {b.name}:")
        lines += [f"  {s}" for s in b.stmts]
        if b.term is not None:
            lines.append(f"  {b.term}")
    lines += [f"assume {a.loc} {a.var} {signs.name(a.sign)}" for a in p.assumptions]
    return "\n".join(lines) + "\n"
