"""Reference satisfaction relation for FOCTL, one ground substitution at a time.

This is deliberately independent of the constraint machinery: every
connective is decided by explicit search over the reachable product, so it
serves as the oracle against which model finding is tested.
"""

from __future__ import annotations

from ..errors import UnboundVariable
from ..graph import TCfg, product_successors
from .atoms import holds
from .formula import AB, AU, EB, EU, And, Atom, Exists, Not, TrueF, free_vars


class Product:
    """Reachable product states with explicit successor/predecessor maps."""

    def __init__(self, g: TCfg):
        self.g = g
        self.q0 = g.initial_state()
        self.succ: dict = {}
        todo = [self.q0]
        while todo:
            q = todo.pop()
            if q in self.succ:
                continue
            self.succ[q] = product_successors(g, q)
            todo.extend(self.succ[q])
        self.pred: dict = {q: set() for q in self.succ}
        for q, nexts in self.succ.items():
            for w in nexts:
                self.pred[w].add(q)
        self.states = sorted(self.succ)


def _reach(start, step, allowed) -> set:
    """States reachable from ``start`` through states satisfying ``allowed``
    (``start`` itself included only if allowed)."""
    if not allowed(start):
        return set()
    seen = {start}
    todo = [start]
    while todo:
        for w in step(todo.pop()):
            if w not in seen and allowed(w):
                seen.add(w)
                todo.append(w)
    return seen


def _has_cycle(nodes: set, step) -> bool:
    colour = {}
    for root in nodes:
        if root in colour:
            continue
        stack = [(root, iter(step(root)))]
        colour[root] = 1
        while stack:
            v, it = stack[-1]
            for w in it:
                if w not in nodes:
                    continue
                if colour.get(w) == 1:
                    return True
                if w not in colour:
                    colour[w] = 1
                    stack.append((w, iter(step(w))))
                    break
            else:
                colour[v] = 2
                stack.pop()
    return False


def sat_set(g: TCfg, sigma: dict, phi, product: Product | None = None, domain=None) -> set:
    """Product states at which ``phi`` holds under the ground substitution ``sigma``."""
    product = product or Product(g)
    if domain is None:
        from ..solver import extract_domain

        domain = extract_domain(g)
    return _sat(phi, dict(sigma), product, domain)


def _sat(phi, sigma, P: Product, domain) -> set:
    everything = set(P.states)
    if isinstance(phi, TrueF):
        return everything
    if isinstance(phi, Atom):
        return {q for q in P.states if holds(phi, sigma, P.g, q)}
    if isinstance(phi, And):
        return _sat(phi.left, sigma, P, domain) & _sat(phi.right, sigma, P, domain)
    if isinstance(phi, Not):
        return everything - _sat(phi.body, sigma, P, domain)
    if isinstance(phi, Exists):
        out = set()
        for obj in domain.pool(phi.var.sort):
            inner = dict(sigma)
            inner[phi.var.name] = obj
            out |= _sat(phi.body, inner, P, domain)
        return out

    s1 = _sat(phi.left, sigma, P, domain)
    s2 = _sat(phi.right, sigma, P, domain)
    fwd = P.succ.__getitem__
    back = P.pred.__getitem__

    if isinstance(phi, EU):
        return {q for q in P.states if _eu_witness(q, fwd, s1, s2)}
    if isinstance(phi, EB):
        return {q for q in P.states if _eu_witness(q, back, s1, s2)}
    if isinstance(phi, AU):
        return {q for q in P.states if _au(q, fwd, s1, s2)}
    if isinstance(phi, AB):
        return {q for q in P.states if not _ab_counterexample(q, back, s1, s2, P.q0)}
    raise TypeError(f"not a formula: {phi!r}")


def _eu_witness(q, step, s1, s2) -> bool:
    # a path staying in s1 until it meets s2
    if q in s2:
        return True
    waiting = _reach(q, step, lambda v: v in s1 and v not in s2)
    return any(w in s2 for v in waiting for w in step(v))


def _au(q, step, s1, s2) -> bool:
    if q in s2:
        return True
    waiting = _reach(q, step, lambda v: v in s1 and v not in s2)
    if not waiting:
        return False
    for v in waiting:
        nexts = step(v)
        if not nexts:
            return False  # a maximal path ends without meeting the goal
        if any(w not in s1 and w not in s2 for w in nexts):
            return False
    return not _has_cycle(waiting, step)


def _ab_counterexample(q, step, s1, s2, q0) -> bool:
    # a backward path of non-goal states that breaks the invariant or reaches
    # the start state; from an invariant-breaking state q0 is always reachable
    region = _reach(q, step, lambda v: v not in s2)
    return any(v not in s1 or v == q0 for v in region)


def satisfies(g: TCfg, sigma: dict, q, phi, product: Product | None = None, domain=None) -> bool:
    """``g, sigma, q |= phi`` for a substitution binding every free variable."""
    missing = {v.name for v in free_vars(phi)} - set(sigma)
    if missing:
        raise UnboundVariable(f"unbound variables {sorted(missing)}")
    product = product or Product(g)
    return tuple(q) in sat_set(g, sigma, phi, product, domain)


def brute_force_models(g: TCfg, phi, domain=None, tau=None) -> list:
    """Every sort-consistent assignment of ``phi``'s free variables that
    satisfies it at q0, by exhaustive enumeration."""
    import itertools

    from ..solver import extract_domain

    domain = domain or extract_domain(g)
    product = Product(g)
    variables = sorted(free_vars(phi))
    tau = tau or {}
    pools = [domain.pool(v.sort) if v.name not in tau else (tau[v.name],) for v in variables]
    models = []
    for combo in itertools.product(*pools):
        sigma = dict(tau)
        sigma.update({v.name: o for v, o in zip(variables, combo)})
        if satisfies(g, sigma, product.q0, phi, product, domain):
            models.append(sigma)
    return models
