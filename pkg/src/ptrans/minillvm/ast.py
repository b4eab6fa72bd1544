"""MiniLLVM abstract syntax.

The same classes serve as ground program objects (node labels of an
executable tCFG) and as pattern terms in side conditions and actions, where
any field may be a :class:`MetaVar`.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Iterator, Union

SORTS = ("node", "thread", "label", "expr", "type", "instr", "op")


@dataclass(frozen=True, order=True)
class MetaVar:
    name: str
    sort: str

    def __str__(self) -> str:
        return self.name


# -- expressions -------------------------------------------------------------

@dataclass(frozen=True)
class Local:
    name: str

    def __str__(self) -> str:
        return f"%{self.name}"


@dataclass(frozen=True)
class Global:
    name: str

    def __str__(self) -> str:
        return f"@{self.name}"


@dataclass(frozen=True)
class Const:
    value: int

    def __str__(self) -> str:
        return str(self.value)


Expr = Union[Local, Global, Const, MetaVar]


# -- types -------------------------------------------------------------------

@dataclass(frozen=True)
class IntType:
    def __str__(self) -> str:
        return "int"


@dataclass(frozen=True)
class PtrType:
    inner: "Type"

    def __str__(self) -> str:
        return f"{self.inner}*"


Type = Union[IntType, PtrType, MetaVar]
INT = IntType()

ARITH_OPS = ("add", "sub", "mul")
CMP_OPS = ("eq", "ne", "slt", "sgt", "sle", "sge")


# -- instructions ------------------------------------------------------------

@dataclass(frozen=True)
class Arith:
    dst: Expr
    op: str | MetaVar
    ty: Type
    lhs: Expr
    rhs: Expr

    def __str__(self) -> str:
        return f"{self.dst} = {self.op} {self.ty} {self.lhs}, {self.rhs}"


@dataclass(frozen=True)
class Icmp:
    dst: Expr
    cmp: str | MetaVar
    ty: Type
    lhs: Expr
    rhs: Expr

    def __str__(self) -> str:
        return f"{self.dst} = icmp {self.cmp} {self.ty} {self.lhs}, {self.rhs}"


@dataclass(frozen=True)
class BrCond:
    cond: Expr

    def __str__(self) -> str:
        return f"br i1 {self.cond}"


@dataclass(frozen=True)
class Br:
    def __str__(self) -> str:
        return "br"


@dataclass(frozen=True)
class Call:
    dst: Expr
    ty: Type
    args: tuple

    def __str__(self) -> str:
        return f"{self.dst} = call {self.ty} ({', '.join(map(str, self.args))})"


@dataclass(frozen=True)
class Return:
    value: Expr

    def __str__(self) -> str:
        return f"return {self.value}"


@dataclass(frozen=True)
class Alloca:
    dst: Expr
    ty: Type

    def __str__(self) -> str:
        return f"{self.dst} = alloca {self.ty}"


@dataclass(frozen=True)
class Load:
    dst: Expr
    ptr_ty: Type
    addr: Expr

    def __str__(self) -> str:
        return f"{self.dst} = load {self.ptr_ty} {self.addr}"


@dataclass(frozen=True)
class Store:
    ty: Type
    value: Expr
    ptr_ty: Type
    addr: Expr

    def __str__(self) -> str:
        return f"store {self.ty} {self.value}, {self.ptr_ty} {self.addr}"


@dataclass(frozen=True)
class IsPointer:
    value: Expr

    def __str__(self) -> str:
        return f"is_pointer {self.value}"


Instruction = Union[Arith, Icmp, BrCond, Br, Call, Return, Alloca, Load, Store, IsPointer, MetaVar]
INSTRUCTION_CLASSES = (Arith, Icmp, BrCond, Br, Call, Return, Alloca, Load, Store, IsPointer)

# instructions that bind their ``dst`` field
DEFINING = (Arith, Icmp, Call, Alloca, Load)


def children(term) -> Iterator:
    """Direct sub-terms of an instruction or type (strings excluded)."""
    if isinstance(term, (MetaVar, Local, Global, Const, IntType, int, str)):
        return
    if isinstance(term, PtrType):
        yield term.inner
        return
    for f in fields(term):
        if f.name in ("op", "cmp"):
            continue
        value = getattr(term, f.name)
        if isinstance(value, tuple):
            yield from value
        else:
            yield value


def metavars(term) -> Iterator[MetaVar]:
    if isinstance(term, MetaVar):
        yield term
        return
    for f in _string_fields(term):
        if isinstance(f, MetaVar):
            yield f
    for child in children(term):
        yield from metavars(child)


def _string_fields(term) -> Iterator:
    # op/cmp are plain strings when ground, MetaVar in patterns
    if isinstance(term, Arith):
        yield term.op
    elif isinstance(term, Icmp):
        yield term.cmp


def is_ground(term) -> bool:
    return next(metavars(term), None) is None


def substitute(term, binding):
    """Replace metavariables in ``term`` using ``binding`` (name -> object).

    Unbound metavariables are left in place.
    """
    if isinstance(term, MetaVar):
        return binding.get(term.name, term)
    if isinstance(term, (Local, Global, Const, IntType, Br)) or isinstance(term, (str, int)):
        return term
    if isinstance(term, PtrType):
        return PtrType(substitute(term.inner, binding))
    kwargs = {}
    for f in fields(term):
        value = getattr(term, f.name)
        if isinstance(value, tuple):
            kwargs[f.name] = tuple(substitute(v, binding) for v in value)
        else:
            kwargs[f.name] = substitute(value, binding)
    return type(term)(**kwargs)


def sort_of(obj) -> str | None:
    """Sort of a ground expression/type/instruction object, if it is one."""
    if isinstance(obj, (Local, Global, Const)):
        return "expr"
    if isinstance(obj, (IntType, PtrType)):
        return "type"
    if isinstance(obj, INSTRUCTION_CLASSES):
        return "instr"
    return None


def subterms(instr) -> Iterator:
    """Every expression and type occurring in an instruction, recursively."""
    for child in children(instr):
        yield child
        if isinstance(child, PtrType):
            yield from _type_chain(child.inner)


def _type_chain(ty) -> Iterator:
    yield ty
    if isinstance(ty, PtrType):
        yield from _type_chain(ty.inner)
