"""Reduction of FOCTL formulas to non-temporal constraints (model finding).

``satis(phi, v)`` is a constraint whose models are exactly the substitutions
under which ``phi`` holds at product state ``v``. Temporal operators unfold
into bounded path searches over the reachable interleaving product:

``paths_back(I, F, n, v)``
    some path from ``v`` of at most ``n`` steps keeps ``I`` until ``F``.
``paths_and(I, F, n, v)``
    every path from ``v`` of ``n`` steps meets ``F`` after keeping ``I``;
    paths that die at a sink earlier are accepted when ``I`` held throughout.
``paths_forward(I, n, v)``
    some path of exactly ``n`` steps from ``v`` whose successors all satisfy ``I``.

Each search is a table indexed by (length, state) and filled one length at a
time; with memoization off every call recurses afresh, which is exponential
and exists only to measure what the tables buy.
"""

from __future__ import annotations

import time

from ..errors import ProductTooLarge, Timeout
from ..graph import TCfg, product_successors
from . import constraint as C
from .atoms import eval_atom
from .formula import AB, AU, EB, EU, And, Atom, Exists, Not, TrueF

DEFAULT_NODE_BUDGET = 10 ** 6


class ProductGraph:
    """Reachable interleaving product of a tCFG, states numbered from 0 (= q0)."""

    def __init__(self, g: TCfg, node_budget: int = DEFAULT_NODE_BUDGET):
        self.g = g
        q0 = g.initial_state()
        self.states = [q0]
        self.index = {q0: 0}
        self.succ: list = []
        i = 0
        while i < len(self.states):
            nexts = []
            for q in sorted(product_successors(g, self.states[i])):
                j = self.index.get(q)
                if j is None:
                    if len(self.states) >= node_budget:
                        raise ProductTooLarge(f"reachable product exceeds {node_budget} states")
                    j = self.index[q] = len(self.states)
                    self.states.append(q)
                nexts.append(j)
            self.succ.append(nexts)
            i += 1
        self.pred = [[] for _ in self.states]
        for v, nexts in enumerate(self.succ):
            for w in nexts:
                self.pred[w].append(v)

    def __len__(self) -> int:
        return len(self.states)


class SatisContext:
    """Per-query state: the product graph, the object domain and memo tables."""

    def __init__(self, g: TCfg, domain, memo: bool = True, node_budget: int = DEFAULT_NODE_BUDGET,
                 deadline: float | None = None):
        self.g = g
        self.domain = domain
        self.memo = memo
        self.deadline = deadline
        self.product = ProductGraph(g, node_budget)
        self.table: dict = {}

    # -- helpers -------------------------------------------------------------

    def _tick(self):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise Timeout("model finding exceeded its time budget")

    def neighbours(self, backward: bool):
        return self.product.pred if backward else self.product.succ

    # -- the reduction ---------------------------------------------------------

    def satis(self, phi, v: int) -> C.Constraint:
        if self.memo:
            return self.satis_all(phi)[v]
        return self._satis_one(phi, v)

    def satis_all(self, phi) -> list:
        """Constraint for every product state at once (memoized)."""
        hit = self.table.get(phi)
        if hit is not None:
            return hit
        self._tick()
        n = len(self.product)
        states = self.product.states
        if isinstance(phi, TrueF):
            out = [C.CTRUE] * n
        elif isinstance(phi, Atom):
            out = [eval_atom(phi, None, self.g, q) for q in states]
        elif isinstance(phi, And):
            left, right = self.satis_all(phi.left), self.satis_all(phi.right)
            out = [C.conj(a, b) for a, b in zip(left, right)]
        elif isinstance(phi, Not):
            out = [C.neg(a) for a in self.satis_all(phi.body)]
        elif isinstance(phi, Exists):
            out = [C.exists(phi.var, a, self.domain) for a in self.satis_all(phi.body)]
        elif isinstance(phi, EU):
            out = self.back_table(self.satis_all(phi.left), self.satis_all(phi.right), n, False)
        elif isinstance(phi, EB):
            out = self.back_table(self.satis_all(phi.left), self.satis_all(phi.right), n, True)
        elif isinstance(phi, AU):
            out = self._au_all(phi)
        elif isinstance(phi, AB):
            out = self._ab_all(phi)
        else:
            raise TypeError(f"not a formula: {phi!r}")
        self.table[phi] = out
        return out

    def _au_all(self, phi) -> list:
        n = len(self.product)
        s1, s2 = self.satis_all(phi.left), self.satis_all(phi.right)
        succ = self.product.succ
        # a path may end at a sink; there only the goal can discharge it
        inv = [a if succ[v] else C.CFALSE for v, a in enumerate(s1)]
        stay = [C.conj(a, C.neg(b)) for a, b in zip(s1, s2)]
        every = self.and_table(inv, s2, n, False)
        loop = self.forward_table(stay, n + 1, False)
        return [C.conj(C.neg(C.conj(stay[v], loop[v])), every[v]) for v in range(n)]

    def _ab_all(self, phi) -> list:
        # Every backward path that reaches q0 meets the goal after keeping the
        # invariant. It fails iff some backward path of non-goal states hits a
        # state breaking the invariant, or q0 itself.
        n = len(self.product)
        s1, s2 = self.satis_all(phi.left), self.satis_all(phi.right)
        not_goal = [C.neg(b) for b in s2]
        bad = [C.conj(not_goal[v], C.disj(C.neg(s1[v]), C.CTRUE if v == 0 else C.CFALSE))
               for v in range(n)]
        escape = self.back_table(not_goal, bad, n, True)
        return [C.neg(c) for c in escape]

    # -- path tables -------------------------------------------------------------

    def back_table(self, inv: list, goal: list, bound: int, backward: bool) -> list:
        nbrs = self.neighbours(backward)
        level = list(goal)
        for _ in range(bound):
            self._tick()
            nxt = [C.disj(level[v], C.conj(inv[v], C.disj_all(level[w] for w in nbrs[v])))
                   for v in range(len(level))]
            if all(a is b for a, b in zip(nxt, level)):
                break
            level = nxt
        return level

    def and_table(self, inv: list, goal: list, bound: int, backward: bool) -> list:
        nbrs = self.neighbours(backward)
        level = list(goal)
        for _ in range(bound):
            self._tick()
            nxt = [C.disj(level[v], C.conj(inv[v], C.conj_all(level[w] for w in nbrs[v])))
                   for v in range(len(level))]
            if all(a is b for a, b in zip(nxt, level)):
                break
            level = nxt
        return level

    def forward_table(self, inv: list, bound: int, backward: bool) -> list:
        nbrs = self.neighbours(backward)
        level = [C.CTRUE] * len(inv)
        for _ in range(bound):
            self._tick()
            nxt = [C.disj_all(C.conj(inv[w], level[w]) for w in nbrs[v]) for v in range(len(inv))]
            if all(a is b for a, b in zip(nxt, level)):
                break
            level = nxt
        return level

    # -- unmemoized recursion ------------------------------------------------------

    def _satis_one(self, phi, v: int) -> C.Constraint:
        self._tick()
        n = len(self.product)
        if isinstance(phi, TrueF):
            return C.CTRUE
        if isinstance(phi, Atom):
            return eval_atom(phi, None, self.g, self.product.states[v])
        if isinstance(phi, And):
            return C.conj(self._satis_one(phi.left, v), self._satis_one(phi.right, v))
        if isinstance(phi, Not):
            return C.neg(self._satis_one(phi.body, v))
        if isinstance(phi, Exists):
            return C.exists(phi.var, self._satis_one(phi.body, v), self.domain)
        if isinstance(phi, (EU, EB)):
            backward = isinstance(phi, EB)
            return self.paths_back(lambda u: self._satis_one(phi.left, u),
                                   lambda u: self._satis_one(phi.right, u), n, v, backward)
        if isinstance(phi, AU):
            succ = self.product.succ

            def inv(u):
                return self._satis_one(phi.left, u) if succ[u] else C.CFALSE

            def stay(u):
                return C.conj(self._satis_one(phi.left, u), C.neg(self._satis_one(phi.right, u)))

            every = self.paths_and(inv, lambda u: self._satis_one(phi.right, u), n, v)
            loop = self.paths_forward(stay, n + 1, v)
            return C.conj(C.neg(C.conj(stay(v), loop)), every)
        if isinstance(phi, AB):
            def not_goal(u):
                return C.neg(self._satis_one(phi.right, u))

            def bad(u):
                start = C.CTRUE if u == 0 else C.CFALSE
                return C.conj(not_goal(u), C.disj(C.neg(self._satis_one(phi.left, u)), start))

            return C.neg(self.paths_back(not_goal, bad, n, v, True))
        raise TypeError(f"not a formula: {phi!r}")

    def paths_back(self, inv, goal, n: int, v: int, backward: bool = False) -> C.Constraint:
        self._tick()
        if n == 0:
            return goal(v)
        nbrs = self.neighbours(backward)[v]
        return C.disj(self.paths_back(inv, goal, n - 1, v, backward),
                      C.conj(inv(v), C.disj_all(self.paths_back(inv, goal, n - 1, w, backward)
                                                for w in nbrs)))

    def paths_and(self, inv, goal, n: int, v: int, backward: bool = False) -> C.Constraint:
        self._tick()
        if n == 0:
            return goal(v)
        nbrs = self.neighbours(backward)[v]
        return C.disj(self.paths_and(inv, goal, n - 1, v, backward),
                      C.conj(inv(v), C.conj_all(self.paths_and(inv, goal, n - 1, w, backward)
                                                for w in nbrs)))

    def paths_forward(self, inv, n: int, v: int, backward: bool = False) -> C.Constraint:
        self._tick()
        if n == 0:
            return C.CTRUE
        nbrs = self.neighbours(backward)[v]
        return C.disj_all(C.conj(inv(w), self.paths_forward(inv, n - 1, w, backward)) for w in nbrs)


def satis_product(phi, g: TCfg, domain=None, memo: bool = True,
                  node_budget: int = DEFAULT_NODE_BUDGET, timeout: float | None = None):
    """Constraint characterizing the substitutions under which ``phi`` holds
    at the all-start state of ``g``."""
    if domain is None:
        from ..solver import extract_domain

        domain = extract_domain(g)
    deadline = None if timeout is None else time.monotonic() + timeout
    ctx = SatisContext(g, domain, memo=memo, node_budget=node_budget, deadline=deadline)
    return ctx.satis(phi, 0)


# -- table-level helpers over an explicit context (public path functions) ------

def paths_back(ctx: SatisContext, inv: list, goal: list, n: int, v: int,
               backward: bool = False) -> C.Constraint:
    if ctx.memo:
        return ctx.back_table(inv, goal, n, backward)[v]
    return ctx.paths_back(inv.__getitem__, goal.__getitem__, n, v, backward)


def paths_and(ctx: SatisContext, inv: list, goal: list, n: int, v: int,
              backward: bool = False) -> C.Constraint:
    if ctx.memo:
        return ctx.and_table(inv, goal, n, backward)[v]
    return ctx.paths_and(inv.__getitem__, goal.__getitem__, n, v, backward)


def paths_forward(ctx: SatisContext, inv: list, n: int, v: int,
                  backward: bool = False) -> C.Constraint:
    if ctx.memo:
        return ctx.forward_table(inv, n, backward)[v]
    return ctx.paths_forward(inv.__getitem__, n, v, backward)
