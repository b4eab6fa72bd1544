"""Reader and writer for MiniLLVM instructions and the tCFG text format.

File format, one declaration per line (``;`` may also separate them, ``#``
starts a comment)::

    thread 1 {
      start 1
      exit 3
      node 1: %x = alloca int
      node 2: store int 0, int* %x
      node 3: br
      edge 1 seq 2
      edge 2 seq 3
    }
"""

from __future__ import annotations

import re

from ..errors import ParseError, WellFormednessError
from ..graph import EDGE_LABELS, FALSE, SEQ, TRUE, Cfg, TCfg
from ..lexer import TokenStream, tokenize
from .ast import (
    ARITH_OPS,
    CMP_OPS,
    INT,
    Alloca,
    Arith,
    Br,
    BrCond,
    Call,
    Const,
    Global,
    Icmp,
    IsPointer,
    Load,
    Local,
    MetaVar,
    PtrType,
    Return,
    Store,
)

KEYWORDS = frozenset({
    "store", "br", "i1", "return", "is_pointer", "icmp", "alloca", "load", "call", "int",
    *ARITH_OPS, *CMP_OPS,
})


class InstructionParser:
    """Recursive-descent reader for one instruction.

    With ``patterns=True`` bare identifiers become metavariables whose sort is
    fixed by the position they occupy.
    """

    def __init__(self, ts: TokenStream, patterns: bool = False):
        self.ts = ts
        self.patterns = patterns

    def _metavar(self, sort: str) -> MetaVar:
        tok = self.ts.next()
        if not self.patterns:
            self.ts.error(f"metavariable {tok.text!r} not allowed in a program", tok)
        if tok.text in KEYWORDS:
            self.ts.error(f"keyword {tok.text!r} cannot be a metavariable", tok)
        return MetaVar(tok.text, sort)

    def expr(self):
        tok = self.ts.peek()
        if tok.kind == "local":
            self.ts.next()
            return Local(tok.text[1:])
        if tok.kind == "global":
            self.ts.next()
            return Global(tok.text[1:])
        if tok.kind == "int":
            self.ts.next()
            return Const(int(tok.text))
        if tok.kind == "ident" and tok.text not in KEYWORDS:
            return self._metavar("expr")
        self.ts.error(f"expected an expression, found {tok.text!r}")

    def type(self):
        tok = self.ts.peek()
        if tok.kind == "ident" and tok.text == "int":
            self.ts.next()
            ty = INT
        elif tok.kind == "ident" and tok.text not in KEYWORDS:
            ty = self._metavar("type")
        else:
            self.ts.error(f"expected a type, found {tok.text!r}")
        while self.ts.accept("*"):
            ty = PtrType(ty)
        return ty

    def _op(self, allowed, what: str):
        tok = self.ts.peek()
        if tok.kind == "ident" and tok.text in allowed:
            self.ts.next()
            return tok.text
        if tok.kind == "ident" and tok.text not in KEYWORDS:
            return self._metavar("op")
        self.ts.error(f"expected {what}, found {tok.text!r}")

    def instruction(self):
        ts = self.ts
        tok = ts.peek()
        if tok.kind == "ident":
            word = tok.text
            if word == "store":
                ts.next()
                ty = self.type()
                value = self.expr()
                ts.expect(",")
                ptr_ty = self.type()
                return Store(ty, value, ptr_ty, self.expr())
            if word == "br":
                ts.next()
                if ts.accept("i1"):
                    return BrCond(self.expr())
                return Br()
            if word == "return":
                ts.next()
                return Return(self.expr())
            if word == "is_pointer":
                ts.next()
                return IsPointer(self.expr())
        if tok.kind == "local" or (tok.kind == "ident" and tok.text not in KEYWORDS
                                   and ts.at("=", 1)):
            dst = self.expr()
            ts.expect("=")
            return self._defining(dst)
        if tok.kind == "ident" and tok.text not in KEYWORDS:
            return self._metavar("instr")
        ts.error(f"expected an instruction, found {tok.text or 'end of input'!r}")

    def _defining(self, dst):
        ts = self.ts
        if ts.accept("icmp"):
            cmp = self._op(CMP_OPS, "a comparison")
            ty = self.type()
            lhs = self.expr()
            ts.expect(",")
            return Icmp(dst, cmp, ty, lhs, self.expr())
        if ts.accept("alloca"):
            return Alloca(dst, self.type())
        if ts.accept("load"):
            ptr_ty = self.type()
            return Load(dst, ptr_ty, self.expr())
        if ts.accept("call"):
            ty = self.type()
            ts.expect("(")
            args = []
            if not ts.at(")"):
                args.append(self.expr())
                while ts.accept(","):
                    args.append(self.expr())
            ts.expect(")")
            return Call(dst, ty, tuple(args))
        op = self._op(ARITH_OPS, "an instruction")
        ty = self.type()
        lhs = self.expr()
        ts.expect(",")
        return Arith(dst, op, ty, lhs, self.expr())


def parse_instruction(text: str, patterns: bool = False, line: int = 1, column: int = 1):
    ts = TokenStream(tokenize(text, line, column))
    instr = InstructionParser(ts, patterns).instruction()
    if ts.peek().kind != "eof":
        ts.error(f"trailing input {ts.peek().text!r}")
    return instr


# -- tCFG files --------------------------------------------------------------

def _declarations(text: str):
    """Yield (line, column, declaration-text) with comments stripped.

    Braces are emitted as declarations of their own so that a whole thread
    may also be written on one line.
    """
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        for m in re.finditer(r"[^;{}]+|[{}]", body):
            stripped = m.group().strip()
            if stripped:
                yield lineno, m.start() + m.group().index(stripped) + 1, stripped


def parse_program(text: str, check: bool = True) -> TCfg:
    threads: dict = {}
    current = None

    for line, col, decl in _declarations(text):
        words = decl.split()
        head = words[0]
        if current is None:
            if head != "thread" or len(words) != 2:
                raise ParseError("expected 'thread <id> {'", line, col)
            tid = _int(words[1], line, col)
            if tid in threads:
                raise ParseError(f"duplicate thread {tid}", line, col)
            current = {"id": tid, "nodes": {}, "edges": set(), "start": None, "exit": None,
                       "line": line, "open": False}
            continue
        if not current["open"]:
            if decl != "{":
                raise ParseError("expected '{' after thread header", line, col)
            current["open"] = True
            continue
        if decl == "{":
            raise ParseError("unexpected '{'", line, col)
        if decl == "}":
            threads[current["id"]] = _finish_thread(current)
            current = None
        elif head in ("start", "exit"):
            if len(words) != 2:
                raise ParseError(f"expected '{head} <node>'", line, col)
            current[head] = _int(words[1], line, col)
        elif head == "node":
            ident, sep, instr_text = decl[4:].partition(":")
            if not sep:
                raise ParseError("expected 'node <id>: <instruction>'", line, col)
            nid = _int(ident.strip(), line, col)
            if nid in current["nodes"]:
                raise ParseError(f"duplicate node {nid}", line, col)
            offset = col + decl.index(":") + 1
            current["nodes"][nid] = parse_instruction(instr_text, line=line, column=offset)
        elif head == "edge":
            if len(words) != 4 or words[2] not in EDGE_LABELS:
                raise ParseError("expected 'edge <src> <seq|true|false> <dst>'", line, col)
            current["edges"].add((_int(words[1], line, col), _int(words[3], line, col), words[2]))
        else:
            raise ParseError(f"unknown declaration {head!r}", line, col)

    if current is not None:
        raise ParseError(f"thread {current['id']} is not closed", current["line"], 1)
    if not threads:
        raise ParseError("no threads declared", 1, 1)
    try:
        g = TCfg.of(threads)
    except ValueError as exc:
        raise WellFormednessError(str(exc)) from None
    if check:
        check_well_formed(g)
    return g


def _int(text: str, line: int, col: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"expected an integer, found {text!r}", line, col) from None


def _finish_thread(spec: dict) -> Cfg:
    for key in ("start", "exit"):
        if spec[key] is None:
            raise ParseError(f"thread {spec['id']} has no {key} node", spec["line"], 1)
    nodes = spec["nodes"]
    for src, dst, _ in spec["edges"]:
        for n in (src, dst):
            if n not in nodes:
                raise WellFormednessError(f"thread {spec['id']}: edge mentions unknown node {n}")
    for key in ("start", "exit"):
        if spec[key] not in nodes:
            raise WellFormednessError(f"thread {spec['id']}: {key} node {spec[key]} is not declared")
    try:
        return Cfg.build(nodes, spec["edges"], spec["start"], spec["exit"], nodes)
    except ValueError as exc:
        raise WellFormednessError(f"thread {spec['id']}: {exc}") from None


def well_formedness_errors(g: TCfg) -> list:
    """Edge-shape violations, one message per offending node."""
    problems = []
    for tid, cfg in g.threads:
        for node in sorted(cfg.nodes):
            labels = sorted(lab for _, _, lab in cfg.out_edges[node])
            if node == cfg.exit:
                continue
            if isinstance(cfg.labels[node], BrCond):
                if labels != [FALSE, TRUE]:
                    problems.append(f"thread {tid}, node {node}: conditional branch needs exactly "
                                    f"one true and one false edge, has {labels}")
            elif labels != [SEQ]:
                problems.append(f"thread {tid}, node {node}: needs exactly one seq edge, "
                                f"has {labels}")
    return problems


def check_well_formed(g: TCfg) -> None:
    problems = well_formedness_errors(g)
    if problems:
        raise WellFormednessError(problems[0])


def serialize(g: TCfg) -> str:
    lines = []
    for tid, cfg in g.threads:
        lines.append(f"thread {tid} {{")
        lines.append(f"  start {cfg.start}")
        lines.append(f"  exit {cfg.exit}")
        for node, instr in cfg.labeling:
            lines.append(f"  node {node}: {instr}")
        for src, dst, label in sorted(cfg.edges):
            lines.append(f"  edge {src} {label} {dst}")
        lines.append("}")
    return "\n".join(lines) + "\n"
