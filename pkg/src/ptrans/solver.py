"""All-models enumeration for non-temporal constraints over the finite
program-object domain of a tCFG.

Quantifiers range over the objects that occur syntactically in the graph,
one pool per sort. Enumeration is a depth-first search that substitutes one
variable at a time, re-simplifies, and prunes on ``CFalse``. The next
variable is the one with the fewest candidate values, where candidates are
read off the equalities the constraint forces.
"""

from __future__ import annotations

import itertools
from functools import cached_property

from .errors import UnsortedVariable
from .foctl import constraint as C
from .graph import EDGE_LABELS, TCfg
from .minillvm.ast import SORTS, Arith, Icmp, MetaVar, sort_of, subterms


def _object_key(obj):
    return (type(obj).__name__, str(obj))


class Domain:
    """Sorted object pools; ``pools`` maps sort -> tuple in listing order."""

    def __init__(self, pools: dict):
        self.pools = pools

    @cached_property
    def _sets(self) -> dict:
        return {sort: frozenset(pool) for sort, pool in self.pools.items()}

    @cached_property
    def _index(self) -> dict:
        return {sort: {obj: i for i, obj in enumerate(pool)} for sort, pool in self.pools.items()}

    def pool(self, sort: str) -> tuple:
        if sort not in self.pools:
            raise UnsortedVariable(f"unknown sort {sort!r}")
        return self.pools[sort]

    def pool_set(self, sort: str) -> frozenset:
        return self._sets[sort]

    def index(self, sort: str, obj) -> int:
        return self._index[sort][obj]

    def __repr__(self) -> str:
        sizes = ", ".join(f"{s}={len(p)}" for s, p in self.pools.items())
        return f"Domain({sizes})"


def extract_domain(g: TCfg) -> Domain:
    exprs, types, instrs, ops = set(), set(), set(), set()
    for _, cfg in g.threads:
        for _, instr in cfg.labeling:
            instrs.add(instr)
            if isinstance(instr, Arith):
                ops.add(instr.op)
            elif isinstance(instr, Icmp):
                ops.add(instr.cmp)
            for term in subterms(instr):
                sort = sort_of(term)
                if sort == "expr":
                    exprs.add(term)
                elif sort == "type":
                    types.add(term)
    pools = {
        "node": tuple(sorted(g.all_nodes())),
        "thread": tuple(g.thread_ids),
        "label": EDGE_LABELS,
        "expr": tuple(sorted(exprs, key=_object_key)),
        "type": tuple(sorted(types, key=_object_key)),
        "instr": tuple(sorted(instrs, key=_object_key)),
        "op": tuple(sorted(ops)),
    }
    assert set(pools) == set(SORTS)
    return Domain(pools)


def all_models(c: C.Constraint, domain: Domain, tau=None, variables=()) -> list:
    """Every total assignment over ``variables`` (plus the free variables of
    ``c`` and the domain of ``tau``) that agrees with ``tau`` and satisfies
    ``c``. Returned as name -> object dicts in lexicographic order of
    (variable name, pool index).
    """
    tau = dict(tau or {})
    names: dict = {}
    for var in list(variables) + sorted(c.free):
        if not isinstance(var, MetaVar) or var.sort not in domain.pools:
            raise UnsortedVariable(f"variable {var!r} has no known sort")
        if names.setdefault(var.name, var) != var:
            raise UnsortedVariable(f"variable {var.name!r} used with two sorts")

    fixed = {}
    for name, obj in tau.items():
        var = names.get(name)
        if var is not None:
            if obj not in domain.pool_set(var.sort):
                return []
            fixed[var] = obj
    c = C.substitute(c, fixed, domain) if fixed else c
    remaining = [v for v in names.values() if v not in fixed]

    found = []
    _search(c, remaining, {}, domain, found)

    models = []
    for assignment in found:
        model = dict(tau)
        model.update({v.name: o for v, o in assignment.items()})
        models.append(model)
    order = sorted(names)

    def key(model):
        return tuple(domain.index(names[n].sort, model[n]) for n in order)

    models.sort(key=key)
    return models


def _search(c, remaining, assignment, domain, found):
    if c is C.CFALSE:
        return
    live = [v for v in remaining if v in c.free]
    if not live:
        if c is not C.CTRUE:
            raise AssertionError(f"constraint not decided after full assignment: {c!r}")
        pools = [domain.pool(v.sort) for v in remaining]
        for combo in itertools.product(*pools):
            full = dict(assignment)
            full.update(zip(remaining, combo))
            found.append(full)
        return

    best, best_vals = None, None
    memo_by_var = {}
    for v in live:
        memo_by_var[v] = {}
        cand = C.candidates(c, v, memo_by_var[v])
        vals = domain.pool(v.sort) if cand is None else [o for o in domain.pool(v.sort) if o in cand]
        if best is None or len(vals) < len(best_vals):
            best, best_vals = v, vals
            if not vals:
                return
    rest = [v for v in remaining if v != best]
    for obj in best_vals:
        sub = C.substitute(c, {best: obj}, domain)
        if sub is C.CFALSE:
            continue
        assignment[best] = obj
        _search(sub, rest, assignment, domain, found)
        del assignment[best]


def get_models(tau, g: TCfg, phi, **options) -> list:
    """Substitutions extending ``tau`` under which ``phi`` holds at the
    initial product state of ``g``."""
    from .foctl.formula import free_vars
    from .foctl.satis import satis_product

    domain = options.pop("domain", None) or extract_domain(g)
    c = satis_product(phi, g, domain=domain, **options)
    return all_models(c, domain, tau, sorted(free_vars(phi)))
