"""Non-temporal first-order constraints over metavariables.

Nodes are hash-consed: structurally equal constraints built through the
constructors below are the same Python object, so equality and hashing are
identity operations and large shared DAGs stay cheap. The constructors
simplify eagerly (unit folding, flattening, one-point elimination under
``exists``); every rewrite preserves the set of models.
"""

from __future__ import annotations

import weakref
from typing import Iterable

from ..minillvm.ast import MetaVar

TRUE_K, FALSE_K, EQ_K, AND_K, OR_K, NOT_K, EXISTS_K = range(7)
_NAMES = {TRUE_K: "CTrue", FALSE_K: "CFalse", EQ_K: "CEq", AND_K: "CAnd", OR_K: "COr",
          NOT_K: "CNot", EXISTS_K: "CExists"}

# flattening a large shared child would copy it into every parent
FLATTEN_LIMIT = 8


class Constraint:
    __slots__ = ("kind", "args", "_free", "_size", "__weakref__")

    def __init__(self, kind: int, args: tuple):
        self.kind = kind
        self.args = args
        self._free = None
        self._size = None

    @property
    def free(self) -> frozenset:
        if self._free is None:
            k = self.kind
            if k == EQ_K:
                self._free = frozenset((self.args[0],))
            elif k in (AND_K, OR_K):
                acc = frozenset()
                for c in self.args:
                    acc |= c.free
                self._free = acc
            elif k == NOT_K:
                self._free = self.args[0].free
            elif k == EXISTS_K:
                self._free = self.args[1].free - {self.args[0]}
            else:
                self._free = frozenset()
        return self._free

    def __repr__(self) -> str:
        k = self.kind
        if k in (TRUE_K, FALSE_K):
            return _NAMES[k]
        if k == EQ_K:
            return f"{self.args[0]}={_show(self.args[1])}"
        if k == NOT_K:
            return f"~({self.args[0]!r})"
        if k == EXISTS_K:
            return f"exists {self.args[0]}. ({self.args[1]!r})"
        sep = " /\\ " if k == AND_K else " \\/ "
        return "(" + sep.join(repr(c) for c in self.args) + ")"


def _show(obj) -> str:
    return str(obj)


_TABLE: "weakref.WeakValueDictionary" = weakref.WeakValueDictionary()


def _intern(kind: int, args: tuple) -> Constraint:
    key = (kind, args)
    node = _TABLE.get(key)
    if node is None:
        node = Constraint(kind, args)
        _TABLE[key] = node
    return node


CTRUE = Constraint(TRUE_K, ())
CFALSE = Constraint(FALSE_K, ())


def eq(var: MetaVar, obj) -> Constraint:
    return _intern(EQ_K, (var, obj))


def match(term, obj) -> Constraint:
    """``term`` is a metavariable or a ground object."""
    if isinstance(term, MetaVar):
        return eq(term, obj)
    return CTRUE if term == obj else CFALSE


def neg(c: Constraint) -> Constraint:
    if c is CTRUE:
        return CFALSE
    if c is CFALSE:
        return CTRUE
    if c.kind == NOT_K:
        return c.args[0]
    return _intern(NOT_K, (c,))


def conj(*cs: Constraint) -> Constraint:
    return _junction(AND_K, cs)


def disj(*cs: Constraint) -> Constraint:
    return _junction(OR_K, cs)


def conj_all(cs: Iterable[Constraint]) -> Constraint:
    return _junction(AND_K, tuple(cs))


def disj_all(cs: Iterable[Constraint]) -> Constraint:
    return _junction(OR_K, tuple(cs))


def _junction(kind: int, cs) -> Constraint:
    unit, zero = (CTRUE, CFALSE) if kind == AND_K else (CFALSE, CTRUE)
    items: dict = {}
    for c in cs:
        if c is unit:
            continue
        if c is zero:
            return zero
        if c.kind == kind and len(c.args) <= FLATTEN_LIMIT:
            for d in c.args:
                items[d] = None
        else:
            items[c] = None
    if not items:
        return unit
    if len(items) == 1:
        return next(iter(items))
    seen_eq: dict = {}
    for c in items:
        if c.kind == NOT_K and c.args[0] in items:
            return zero
        if kind == AND_K and c.kind == EQ_K:
            var, obj = c.args
            if var in seen_eq and seen_eq[var] != obj:
                return CFALSE
            seen_eq[var] = obj
    return _intern(kind, tuple(items))


def exists(var: MetaVar, body: Constraint, domain) -> Constraint:
    """Existential over the finite pool of ``var``'s sort in ``domain``."""
    pool = domain.pool_set(var.sort)
    if not pool:
        return CFALSE
    if var not in body.free:
        return body
    k = body.kind
    if k == OR_K:
        return disj_all(exists(var, c, domain) for c in body.args)
    if k == EQ_K:
        return CTRUE if body.args[1] in pool else CFALSE
    if k == AND_K:
        for c in body.args:
            if c.kind == EQ_K and c.args[0] == var:
                obj = c.args[1]
                if obj not in pool:
                    return CFALSE
                return substitute(body, {var: obj}, domain)
    node = _intern(EXISTS_K, (var, body))
    if not node.free:
        return decide_exists(node, domain)
    return node


def substitute(c: Constraint, binding: dict, domain, memo: dict | None = None) -> Constraint:
    """Replace bound variables by objects and re-simplify.

    ``exists`` nodes whose bodies become closed apart from the quantified
    variable are decided by enumerating the variable's pool in ``domain``.
    """
    if memo is None:
        memo = {}
    keys = frozenset(binding)
    return _subst(c, binding, keys, domain, memo)


def _subst(c, binding, keys, domain, memo):
    if not (c.free & keys):
        return c
    hit = memo.get(id(c))
    if hit is not None:
        return hit
    k = c.kind
    if k == EQ_K:
        out = CTRUE if binding[c.args[0]] == c.args[1] else CFALSE
    elif k == AND_K:
        out = CTRUE
        parts = []
        for d in c.args:
            s = _subst(d, binding, keys, domain, memo)
            if s is CFALSE:
                out = CFALSE
                break
            parts.append(s)
        else:
            out = conj_all(parts)
    elif k == OR_K:
        parts = []
        for d in c.args:
            s = _subst(d, binding, keys, domain, memo)
            if s is CTRUE:
                out = CTRUE
                break
            parts.append(s)
        else:
            out = disj_all(parts)
    elif k == NOT_K:
        out = neg(_subst(c.args[0], binding, keys, domain, memo))
    elif k == EXISTS_K:
        var, body = c.args
        if var in keys:
            inner = {v: o for v, o in binding.items() if v != var}
            body = substitute(body, inner, domain) if inner else body
        else:
            body = _subst(body, binding, keys, domain, memo)
        out = exists(var, body, domain)
    else:
        out = c
    memo[id(c)] = out
    return out


def decide_exists(c: Constraint, domain) -> Constraint:
    """Decide a closed ``exists`` node by enumeration."""
    var, body = c.args
    options = candidates(body, var, {})
    for obj in domain.pools[var.sort]:
        if options is not None and obj not in options:
            continue
        if substitute(body, {var: obj}, domain) is CTRUE:
            return CTRUE
    return CFALSE


def candidates(c: Constraint, var: MetaVar, memo: dict):
    """Over-approximate the values ``var`` can take in any model of ``c``.

    Returns a set, or ``None`` for "unconstrained".
    """
    if var not in c.free:
        return None if c is not CFALSE else set()
    hit = memo.get(id(c), memo)
    if hit is not memo:
        return hit
    k = c.kind
    if k == EQ_K:
        out = {c.args[1]}
    elif k == AND_K:
        out = None
        for d in c.args:
            s = candidates(d, var, memo)
            if s is not None:
                out = set(s) if out is None else out & s
                if not out:
                    break
    elif k == OR_K:
        out = set()
        for d in c.args:
            s = candidates(d, var, memo)
            if s is None:
                out = None
                break
            out |= s
    elif k == EXISTS_K and c.args[0] != var:
        out = candidates(c.args[1], var, memo)
    else:
        out = None
    memo[id(c)] = out
    return out


def size(c: Constraint) -> int:
    """Number of distinct DAG nodes reachable from ``c``."""
    seen = set()
    stack = [c]
    while stack:
        d = stack.pop()
        if id(d) in seen:
            continue
        seen.add(id(d))
        if d.kind in (AND_K, OR_K):
            stack.extend(d.args)
        elif d.kind == NOT_K:
            stack.append(d.args[0])
        elif d.kind == EXISTS_K:
            stack.append(d.args[1])
    return len(seen)
