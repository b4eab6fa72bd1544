"""Atomic predicates at a product state, symbolic and ground."""

from __future__ import annotations

from dataclasses import fields

from ..errors import SortMismatch, UnboundVariable
from ..minillvm import atoms as lang
from ..minillvm.ast import MetaVar, PtrType, metavars, substitute
from . import constraint as C
from .formula import LANGUAGE_ATOMS, Atom


def _bind(term, sigma):
    if sigma and isinstance(term, MetaVar) and term.name in sigma:
        return sigma[term.name]
    if sigma and not isinstance(term, (int, str, MetaVar)):
        return substitute(term, sigma)
    return term


def unify(pattern, ground):
    """Most general unifier of ``pattern`` with the ground term, as a list of
    (metavariable, object) pairs, or ``None`` when they clash."""
    pairs = []
    if _unify(pattern, ground, pairs):
        return pairs
    return None


def _unify(p, o, pairs) -> bool:
    if isinstance(p, MetaVar):
        pairs.append((p, o))
        return True
    if isinstance(p, (str, int)) or isinstance(o, (str, int)):
        return p == o
    if type(p) is not type(o):
        return False
    if isinstance(p, PtrType):
        return _unify(p.inner, o.inner, pairs)
    for f in fields(p):
        a, b = getattr(p, f.name), getattr(o, f.name)
        if isinstance(a, tuple):
            if not isinstance(b, tuple) or len(a) != len(b):
                return False
            if not all(_unify(x, y, pairs) for x, y in zip(a, b)):
                return False
        elif not _unify(a, b, pairs):
            return False
    return True


def _threads(g, thread_term):
    """(thread index, thread id, guard constraint) for each candidate thread."""
    if isinstance(thread_term, MetaVar):
        if thread_term.sort != "thread":
            raise SortMismatch(f"{thread_term.name} used as a thread subscript")
        return [(i, tid, C.eq(thread_term, tid)) for i, tid in enumerate(g.thread_ids)]
    if thread_term in g.thread_ids:
        return [(g.thread_ids.index(thread_term), thread_term, C.CTRUE)]
    return []


def eval_atom(atom: Atom, sigma, g, q) -> C.Constraint:
    """Constraint over the atom's unresolved metavariables that holds exactly
    when the atom is true at product state ``q``."""
    pred = atom.pred
    if pred == "start":
        return C.CTRUE if q == g.initial_state() else C.CFALSE
    if pred == "exit":
        return C.CTRUE if q == g.exit_state() else C.CFALSE
    args = [_bind(a, sigma) for a in atom.args]
    disjuncts = []
    for i, tid, guard in _threads(g, args[0]):
        node = q[i]
        cfg = g.cfgs[tid]
        instr = cfg.labels[node]
        if pred == "node":
            body = C.match(args[1], node)
        elif pred == "stmt":
            pairs = unify(args[1], instr)
            body = C.CFALSE if pairs is None else C.conj_all(C.eq(v, o) for v, o in pairs)
        elif pred == "out":
            body = C.disj_all(C.conj(C.match(args[1], dst), C.match(args[2], label))
                              for _, dst, label in cfg.out_edges[node])
        elif pred in LANGUAGE_ATOMS:
            body = lang.instr_constraint(pred, args[1], instr)
        else:
            raise ValueError(pred)
        disjuncts.append(C.conj(guard, body))
    return C.disj_all(disjuncts)


def holds(atom: Atom, sigma, g, q) -> bool:
    """Direct truth of an atom under a substitution binding all its variables."""
    pred = atom.pred
    if pred == "start":
        return q == g.initial_state()
    if pred == "exit":
        return q == g.exit_state()
    args = []
    for a in atom.args:
        value = _bind(a, sigma)
        if isinstance(value, MetaVar) or (not isinstance(value, (int, str))
                                          and any(True for _ in metavars(value))):
            raise UnboundVariable(f"{a} is unbound in {atom}")
        args.append(value)
    tid = args[0]
    if tid not in g.thread_ids:
        return False
    cfg = g.cfgs[tid]
    node = q[g.thread_ids.index(tid)]
    instr = cfg.labels[node]
    if pred == "node":
        return node == args[1]
    if pred == "stmt":
        return instr == args[1]
    if pred == "out":
        return (node, args[1], args[2]) in cfg.edges
    return lang.instr_holds(pred, args[1], instr)

