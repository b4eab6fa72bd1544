"""MiniLLVM-specific side-condition predicates: def, not_loads, not_stores.

Each predicate inspects the instruction at one thread's current node.
``instr_constraint`` gives the symbolic form used by the model finder;
``instr_holds`` is the plain boolean definition the reference checker uses.
"""

from __future__ import annotations

from ..errors import SortMismatch
from ..foctl import constraint as C
from .ast import DEFINING, Global, MetaVar, Store, Load, sort_of


def _check_expr(term):
    if not isinstance(term, MetaVar) and sort_of(term) != "expr":
        raise SortMismatch(f"{term!r} is not an expression")
    if isinstance(term, MetaVar) and term.sort != "expr":
        raise SortMismatch(f"metavariable {term.name} has sort {term.sort}, expected expr")


def instr_constraint(pred: str, term, instr) -> C.Constraint:
    _check_expr(term)
    if pred == "def":
        if isinstance(instr, DEFINING):
            return C.match(term, instr.dst)
        if isinstance(instr, Store) and isinstance(instr.addr, Global):
            return C.match(term, instr.addr)
        return C.CFALSE
    if pred == "not_loads":
        return C.neg(C.match(term, instr.addr)) if isinstance(instr, Load) else C.CTRUE
    if pred == "not_stores":
        return C.neg(C.match(term, instr.addr)) if isinstance(instr, Store) else C.CTRUE
    raise ValueError(f"not a MiniLLVM predicate: {pred}")


def instr_holds(pred: str, expr, instr) -> bool:
    if pred == "def":
        defines = isinstance(instr, DEFINING) and instr.dst == expr
        writes_global = isinstance(instr, Store) and isinstance(instr.addr, Global) and instr.addr == expr
        return defines or writes_global
    if pred == "not_loads":
        return not (isinstance(instr, Load) and instr.addr == expr)
    if pred == "not_stores":
        return not (isinstance(instr, Store) and instr.addr == expr)
    raise ValueError(f"not a MiniLLVM predicate: {pred}")


def eval_lang_atom(atom, sigma, g, q) -> C.Constraint:
    """Constraint for a def/not_loads/not_stores atom at product state ``q``."""
    from ..foctl.atoms import eval_atom

    return eval_atom(atom, sigma, g, q)
