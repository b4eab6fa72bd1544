"""Reader for side-condition formulas and PTRANS transformations.

Concrete syntax::

    T      ::= T CHOICE T | T THEN T | APPLY_ALL T | MATCH phi IN T | ( T )
             | action ; ... ; action IF phi
    action ::= REPLACE n WITH instr | REPLACE n WITH [ instr ; ... ]
             | ADD_EDGE(n, m, l) | REMOVE_EDGE(n, m, l) | SPLIT_EDGE(n, m, l, instr)
    phi    ::= true | false | atom | ~phi | phi /\\ phi | phi \\/ phi | phi -> phi
             | exists x y. phi | forall x. phi | EF phi | AF phi | EG phi | AG phi
             | EU(phi, phi) | AU(phi, phi) | EB(phi, phi) | AB(phi, phi) | ( phi )

``CHOICE`` binds loosest, then ``THEN``. Bare identifiers are
metavariables; their sort comes from the position they occupy. Concrete
nodes are written ``@n<id>`` and threads ``@t<id>``.
"""

from __future__ import annotations

import re

from .errors import ParseError, SortMismatch, UnsortedVariable
from .foctl import formula as F
from .graph import EDGE_LABELS, AddEdge, RemoveEdge, Replace, SplitEdge
from .lexer import TokenStream, tokenize
from .minillvm.ast import MetaVar, metavars
from .minillvm.parser import KEYWORDS as INSTR_KEYWORDS
from .minillvm.parser import InstructionParser
from .strategy import ApplyAll, Choice, Match, Rewrite, Then

RESERVED = frozenset({
    "true", "false", "exists", "forall", "EF", "AF", "EG", "AG", "EU", "AU", "EB", "AB",
    "IF", "THEN", "CHOICE", "MATCH", "IN", "APPLY_ALL", "REPLACE", "WITH", "ADD_EDGE",
    "REMOVE_EDGE", "SPLIT_EDGE", "seq", *F.ATOM_SORTS,
}) | INSTR_KEYWORDS

_UNARY_TEMPORAL = {"EF": F.EF, "AF": F.AF, "EG": F.EG, "AG": F.AG}
_BINARY_TEMPORAL = {"EU": F.EU, "AU": F.AU, "EB": F.EB, "AB": F.AB}
_NODE_REF = re.compile(r"@n(\d+)$")
_THREAD_REF = re.compile(r"@t(\d+)$")


class Parser:
    def __init__(self, text: str):
        self.ts = TokenStream(tokenize(text))
        self.instr = InstructionParser(self.ts, patterns=True)

    # -- terms -------------------------------------------------------------

    def _var(self, sort: str) -> MetaVar:
        tok = self.ts.next()
        if tok.kind != "ident" or tok.text in RESERVED:
            self.ts.error(f"expected a {sort} metavariable, found {tok.text!r}", tok)
        return MetaVar(tok.text, sort)

    def _ref(self, pattern, sort: str):
        tok = self.ts.peek()
        if tok.kind == "global":
            m = pattern.match(tok.text)
            if m is None:
                self.ts.error(f"expected a {sort} such as {pattern.pattern[:2]}1, found {tok.text!r}")
            self.ts.next()
            return int(m.group(1))
        if tok.kind == "int":
            self.ts.next()
            return int(tok.text)
        return self._var(sort)

    def node(self):
        return self._ref(_NODE_REF, "node")

    def thread(self):
        return self._ref(_THREAD_REF, "thread")

    def label(self):
        tok = self.ts.peek()
        if tok.kind == "ident" and tok.text in EDGE_LABELS:
            self.ts.next()
            return tok.text
        return self._var("label")

    # -- formulas ------------------------------------------------------------

    def formula(self):
        left = self._disjunction()
        if self.ts.accept("->"):
            return F.Implies(left, self.formula())
        return left

    def _disjunction(self):
        f = self._conjunction()
        while self.ts.accept("\\/"):
            f = F.Or(f, self._conjunction())
        return f

    def _conjunction(self):
        f = self._unary()
        while self.ts.accept("/\\"):
            f = F.And(f, self._unary())
        return f

    def _unary(self):
        ts = self.ts
        tok = ts.peek()
        if ts.accept("~") or ts.accept("!"):
            return F.Not(self._unary())
        if ts.accept("("):
            f = self.formula()
            ts.expect(")")
            return f
        if tok.kind != "ident":
            ts.error(f"expected a formula, found {tok.text or 'end of input'!r}")
        word = tok.text
        if word in ("exists", "forall"):
            ts.next()
            names = [ts.next()]
            while ts.peek().kind == "ident" and not ts.at("."):
                names.append(ts.next())
            ts.expect(".")
            body = self.formula()
            for name_tok in reversed(names):
                body = _quantify(word, name_tok, body)
            return body
        if word in _UNARY_TEMPORAL:
            ts.next()
            return _UNARY_TEMPORAL[word](self._unary())
        if word in _BINARY_TEMPORAL:
            ts.next()
            ts.expect("(")
            left = self.formula()
            ts.expect(",")
            right = self.formula()
            ts.expect(")")
            return _BINARY_TEMPORAL[word](left, right)
        if word == "true":
            ts.next()
            return F.TRUE
        if word == "false":
            ts.next()
            return F.Not(F.TRUE)
        if word in F.ATOM_SORTS:
            return self._atom()
        ts.error(f"unknown predicate {word!r}")

    def _atom(self):
        ts = self.ts
        pred = ts.next().text
        sorts = F.ATOM_SORTS[pred]
        if not sorts:
            return F.Atom(pred)
        ts.expect("(")
        args = []
        for i, sort in enumerate(sorts):
            if i:
                ts.expect(",")
            if sort == "thread":
                args.append(self.thread())
            elif sort == "node":
                args.append(self.node())
            elif sort == "label":
                args.append(self.label())
            elif sort == "instr":
                args.append(self.instr.instruction())
            else:
                args.append(self.instr.expr())
        ts.expect(")")
        return F.Atom(pred, tuple(args))

    # -- transformations -------------------------------------------------------

    def transformation(self):
        t = self._then()
        while self.ts.accept("CHOICE"):
            t = Choice(t, self._then())
        return t

    def _then(self):
        t = self._prefix()
        while self.ts.accept("THEN"):
            t = Then(t, self._prefix())
        return t

    def _prefix(self):
        ts = self.ts
        if ts.accept("APPLY_ALL"):
            return ApplyAll(self._prefix())
        if ts.accept("MATCH"):
            cond = self.formula()
            ts.expect("IN")
            return Match(cond, self._prefix())
        if ts.accept("("):
            t = self.transformation()
            ts.expect(")")
            return t
        return self._rewrite()

    def _rewrite(self):
        actions = [self._action()]
        while self.ts.accept(";"):
            actions.append(self._action())
        self.ts.expect("IF")
        return Rewrite(tuple(actions), self.formula())

    def _action(self):
        ts = self.ts
        tok = ts.peek()
        if ts.accept("REPLACE"):
            n = self.node()
            ts.expect("WITH")
            if ts.accept("["):
                instrs = [self.instr.instruction()]
                while ts.accept(";"):
                    instrs.append(self.instr.instruction())
                ts.expect("]")
            else:
                instrs = [self.instr.instruction()]
            return Replace(n, tuple(instrs))
        for word, cls in (("ADD_EDGE", AddEdge), ("REMOVE_EDGE", RemoveEdge), ("SPLIT_EDGE", SplitEdge)):
            if ts.accept(word):
                ts.expect("(")
                n = self.node()
                ts.expect(",")
                m = self.node()
                ts.expect(",")
                label = self.label()
                extra = ()
                if cls is SplitEdge:
                    ts.expect(",")
                    extra = (self.instr.instruction(),)
                ts.expect(")")
                return cls(n, m, label, *extra)
        ts.error(f"expected an action, found {tok.text or 'end of input'!r}")

    def end(self):
        if self.ts.peek().kind != "eof":
            self.ts.error(f"unexpected {self.ts.peek().text!r}")


def _quantify(word: str, name_tok, body):
    name = name_tok.text
    if name_tok.kind != "ident" or name in RESERVED:
        raise ParseError(f"cannot quantify over {name!r}", name_tok.line, name_tok.column)
    sorts = {v.sort for v in F.free_vars(body) if v.name == name}
    if not sorts:
        raise UnsortedVariable(f"{name_tok.line}:{name_tok.column}: quantified variable "
                               f"{name!r} is not used, so its sort is unknown")
    if len(sorts) > 1:
        raise SortMismatch(f"variable {name!r} is used with sorts {sorted(sorts)}")
    var = MetaVar(name, sorts.pop())
    return F.Exists(var, body) if word == "exists" else F.Forall(var, body)


def _check_sorts(variables) -> None:
    seen: dict = {}
    for v in variables:
        if seen.setdefault(v.name, v.sort) != v.sort:
            raise SortMismatch(f"variable {v.name!r} is used with sorts {seen[v.name]} and {v.sort}")


def _transformation_vars(t):
    if isinstance(t, Rewrite):
        yield from F.free_vars(t.cond)
        for action in t.actions:
            for value in vars(action).values():
                if isinstance(value, tuple):
                    for item in value:
                        yield from metavars(item)
                elif not isinstance(value, (int, str)):
                    yield from metavars(value)
    elif isinstance(t, Match):
        yield from F.free_vars(t.cond)
        yield from _transformation_vars(t.body)
    elif isinstance(t, ApplyAll):
        yield from _transformation_vars(t.body)
    else:
        a, b = vars(t).values()
        yield from _transformation_vars(a)
        yield from _transformation_vars(b)


def parse_formula(text: str):
    p = Parser(text)
    f = p.formula()
    p.end()
    _check_sorts(F.free_vars(f))
    return f


def parse_transformation(text: str):
    p = Parser(text)
    t = p.transformation()
    p.end()
    _check_sorts(_transformation_vars(t))
    return t
