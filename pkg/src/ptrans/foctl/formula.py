"""FOCTL side-condition syntax.

Only the core connectives are represented; ``Or``, ``Implies``, ``Forall``
and the EF/AF/EG/AG family are helper functions that expand into them.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from ..minillvm.ast import MetaVar, metavars

# predicate name -> sorts of its arguments (first is always the thread)
ATOM_SORTS = {
    "node": ("thread", "node"),
    "stmt": ("thread", "instr"),
    "out": ("thread", "node", "label"),
    "start": (),
    "exit": (),
    "def": ("thread", "expr"),
    "not_loads": ("thread", "expr"),
    "not_stores": ("thread", "expr"),
}
LANGUAGE_ATOMS = ("def", "not_loads", "not_stores")


class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class TrueF(Formula):
    def __str__(self):
        return "true"


@dataclass(frozen=True)
class Atom(Formula):
    pred: str
    args: tuple = ()

    def __post_init__(self):
        if self.pred not in ATOM_SORTS:
            raise ValueError(f"unknown predicate {self.pred!r}")
        if len(self.args) != len(ATOM_SORTS[self.pred]):
            raise ValueError(f"{self.pred} takes {len(ATOM_SORTS[self.pred])} arguments")

    def __str__(self):
        if not self.args:
            return self.pred
        return f"{self.pred}({', '.join(_show_arg(a, s) for a, s in zip(self.args, ATOM_SORTS[self.pred]))})"


def _show_arg(arg, sort):
    if isinstance(arg, MetaVar):
        return arg.name
    if sort == "node":
        return f"@n{arg}"
    if sort == "thread":
        return f"@t{arg}"
    return str(arg)


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def __str__(self):
        return f"({self.left} /\\ {self.right})"


@dataclass(frozen=True)
class Not(Formula):
    body: Formula

    def __str__(self):
        return f"~{self.body}"


@dataclass(frozen=True)
class AU(Formula):
    left: Formula
    right: Formula

    def __str__(self):
        return f"AU({self.left}, {self.right})"


@dataclass(frozen=True)
class EU(Formula):
    left: Formula
    right: Formula

    def __str__(self):
        return f"EU({self.left}, {self.right})"


@dataclass(frozen=True)
class AB(Formula):
    left: Formula
    right: Formula

    def __str__(self):
        return f"AB({self.left}, {self.right})"


@dataclass(frozen=True)
class EB(Formula):
    left: Formula
    right: Formula

    def __str__(self):
        return f"EB({self.left}, {self.right})"


@dataclass(frozen=True)
class Exists(Formula):
    var: MetaVar
    body: Formula

    def __str__(self):
        return f"(exists {self.var.name}. {self.body})"


TRUE = TrueF()


def Or(a: Formula, b: Formula) -> Formula:
    return Not(And(Not(a), Not(b)))


def Implies(a: Formula, b: Formula) -> Formula:
    return Not(And(a, Not(b)))


def Forall(var: MetaVar, body: Formula) -> Formula:
    return Not(Exists(var, Not(body)))


def EF(f: Formula) -> Formula:
    return EU(TRUE, f)


def AF(f: Formula) -> Formula:
    return AU(TRUE, f)


def EG(f: Formula) -> Formula:
    return Not(AF(Not(f)))


def AG(f: Formula) -> Formula:
    return Not(EF(Not(f)))


def atom_vars(atom: Atom):
    for arg in atom.args:
        yield from metavars(arg)


@lru_cache(maxsize=None)
def free_vars(f: Formula) -> frozenset:
    if isinstance(f, TrueF):
        return frozenset()
    if isinstance(f, Atom):
        return frozenset(atom_vars(f))
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, Exists):
        return free_vars(f.body) - {f.var}
    return free_vars(f.left) | free_vars(f.right)


def subformulas(f: Formula):
    yield f
    if isinstance(f, (Not, Exists)):
        yield from subformulas(f.body)
    elif isinstance(f, (And, AU, EU, AB, EB)):
        yield from subformulas(f.left)
        yield from subformulas(f.right)


def depth(f: Formula) -> int:
    if isinstance(f, (TrueF, Atom)):
        return 0
    if isinstance(f, (Not, Exists)):
        return 1 + depth(f.body)
    return 1 + max(depth(f.left), depth(f.right))
