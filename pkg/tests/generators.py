"""Seeded random tCFGs, formulas and transformations for differential tests."""

from __future__ import annotations

import random

from ptrans.errors import FuelExhausted, ResultCapExceeded
from ptrans.foctl import formula as F
from ptrans.graph import FALSE, SEQ, TRUE, Cfg, TCfg
from ptrans.minillvm.ast import (
    INT,
    Arith,
    Br,
    BrCond,
    Const,
    Global,
    IsPointer,
    Load,
    Local,
    MetaVar,
    PtrType,
    Store,
)
from ptrans.strategy import ApplyAll, Choice, Match, Rewrite, Then, apply_some_bounded, trans_sf
from ptrans.syntax import parse_transformation

PTR = PtrType(INT)
EXPRS = [Local("x"), Local("y"), Global("a"), Global("b"), Const(0), Const(1)]


def random_instr(rng: random.Random):
    kind = rng.randrange(5)
    if kind == 0:
        return Store(INT, rng.choice(EXPRS), PTR, rng.choice(EXPRS[:4]))
    if kind == 1:
        return Load(rng.choice(EXPRS[:2]), PTR, rng.choice(EXPRS[:4]))
    if kind == 2:
        return Arith(rng.choice(EXPRS[:2]), "add", INT, rng.choice(EXPRS), rng.choice(EXPRS))
    if kind == 3:
        return IsPointer(rng.choice(EXPRS))
    return Br()


def rewrite_target_instr(rng: random.Random):
    """Mostly stores and plain branches, the shapes the rewrites look for."""
    if rng.random() < 0.8:
        return rng.choice([Store(INT, rng.choice(EXPRS), PTR, rng.choice(EXPRS[:4])), Br()])
    return random_instr(rng)


def random_cfg(rng: random.Random, first_id: int, size: int, allow_stuck: bool = True,
               instr=random_instr, next_bias: float = 0.0) -> Cfg:
    ids = list(range(first_id, first_id + size))
    exit_node = ids[-1]
    labels, edges = {}, set()
    for n in ids:
        if n == exit_node:
            labels[n] = Br()
            continue
        if rng.random() < 0.25:
            labels[n] = BrCond(rng.choice(EXPRS))
            edges.add((n, rng.choice(ids), TRUE))
            edges.add((n, rng.choice(ids), FALSE))
        elif allow_stuck and rng.random() < 0.05:
            labels[n] = instr(rng)  # no successor: a non-exit sink
        else:
            labels[n] = instr(rng)
            # bias forward so that most graphs terminate
            later = [m for m in ids if m > n]
            if rng.random() < next_bias:
                target = n + 1
            else:
                target = rng.choice(later) if rng.random() < 0.75 else rng.choice(ids)
            edges.add((n, target, SEQ))
    return Cfg.build(ids, edges, ids[0], exit_node, labels)


def random_tcfg(rng: random.Random, max_threads: int = 2, max_nodes: int = 5,
                allow_stuck: bool = True, instr=random_instr, next_bias: float = 0.0) -> TCfg:
    threads = {}
    next_id = 1
    for tid in range(1, rng.randint(1, max_threads) + 1):
        size = rng.randint(1, max_nodes) if rng.random() < 0.2 else max_nodes
        threads[tid] = random_cfg(rng, next_id, size, allow_stuck, instr, next_bias)
        next_id += size
    return TCfg.of(threads)


# -- formulas -------------------------------------------------------------------

T = MetaVar("t", "thread")
N = MetaVar("n", "node")
E = MetaVar("e", "expr")
L = MetaVar("l", "label")
TY = MetaVar("ty", "type")
I = MetaVar("i", "instr")


def _thread(rng, g):
    return T if rng.random() < 0.7 else rng.choice(g.thread_ids)


def random_atom(rng: random.Random, g: TCfg):
    kind = rng.randrange(9)
    t = _thread(rng, g)
    if kind == 0:
        n = N if rng.random() < 0.7 else rng.choice(sorted(g.all_nodes()))
        return F.Atom("node", (t, n))
    if kind == 1:
        pattern = rng.choice([
            Store(TY, E, PTR, Global("a")),
            Store(INT, rng.choice(EXPRS), PtrType(TY), E),
            Load(E, PTR, rng.choice(EXPRS[:4])),
            IsPointer(E),
            I,
            Br(),
        ])
        return F.Atom("stmt", (t, pattern))
    if kind == 2:
        return F.Atom("out", (t, N, rng.choice([L, SEQ, TRUE, FALSE])))
    if kind == 3:
        return F.Atom("start")
    if kind == 4:
        return F.Atom("exit")
    pred = rng.choice(["def", "not_loads", "not_stores"])
    return F.Atom(pred, (t, E if rng.random() < 0.7 else rng.choice(EXPRS)))


def random_formula(rng: random.Random, g: TCfg, depth: int, top: bool = True):
    if depth == 0 or (top is False and rng.random() < 0.15):
        return F.TRUE if rng.random() < 0.05 else random_atom(rng, g)
    kind = rng.choice(["and", "or", "not", "EU", "AU", "EB", "AB", "EF", "AF", "AG", "EG",
                       "exists", "forall"])
    sub = lambda: random_formula(rng, g, depth - 1, False)  # noqa: E731
    if kind == "and":
        return F.And(sub(), sub())
    if kind == "or":
        return F.Or(sub(), sub())
    if kind == "not":
        return F.Not(sub())
    if kind in ("EU", "AU", "EB", "AB"):
        return getattr(F, kind)(sub(), sub())
    if kind in ("EF", "AF", "AG", "EG"):
        return getattr(F, kind)(sub())
    body = sub()
    free = sorted(F.free_vars(body))
    if not free:
        return body
    var = rng.choice(free)
    return F.Exists(var, body) if kind == "exists" else F.Forall(var, body)


def limit_free_vars(phi, limit: int = 2):
    """Existentially close variables until at most ``limit`` remain free."""
    free = sorted(F.free_vars(phi))
    while len(free) > limit:
        phi = F.Exists(free.pop(), phi)
    return phi


def random_case(seed: int, max_threads: int = 2, max_nodes: int = 5, depth: int = 3):
    rng = random.Random(seed)
    g = random_tcfg(rng, max_threads, max_nodes)
    phi = limit_free_vars(random_formula(rng, g, depth))
    return g, phi


# -- transformations -------------------------------------------------------------

REWRITES = [
    "REPLACE n WITH is_pointer e IF EF (node(t, n) /\\ stmt(t, store ty v, ty2* e))",
    "REPLACE n WITH [is_pointer e; br] IF EF (node(t, n) /\\ stmt(t, store ty v, ty2* e))",
    "REMOVE_EDGE(n, m, l) IF EF (node(t, n) /\\ out(t, m, l) /\\ stmt(t, br))",
    "ADD_EDGE(n, m, seq) IF EF (node(t, n) /\\ stmt(t, br) /\\ ~exit) /\\ EF node(t, m)",
]


def random_transformation(rng: random.Random, g: TCfg, depth: int = 2):
    if depth == 0 or rng.random() < 0.4:
        rw = parse_transformation(rng.choice(REWRITES))
        if rng.random() < 0.25:
            extra = random_formula(rng, g, 1)
            if not _clashes(extra, rw.cond):
                rw = Rewrite(rw.actions, F.And(rw.cond, extra))
        return rw
    kind = rng.choice(["choice", "then", "match"])
    sub = lambda: random_transformation(rng, g, depth - 1)  # noqa: E731
    if kind == "choice":
        return Choice(sub(), sub())
    if kind == "then":
        return Then(sub(), sub())
    guard = random_formula(rng, g, 1) if rng.random() < 0.3 else F.EF(F.Atom("node", (T, N)))
    return Match(guard, sub())


def _clashes(a, b) -> bool:
    sorts = {}
    for v in list(F.free_vars(a)) + list(F.free_vars(b)):
        if sorts.setdefault(v.name, v.sort) != v.sort:
            return True
    return False


def apply_all_cases(count: int, start: int = 0) -> list:
    """(seed, g, T) for generated cases where T applies and APPLY_ALL terminates
    within the caps."""
    cases = []
    seed = start
    while len(cases) < count:
        rng = random.Random(seed)
        g = random_tcfg(rng, max_threads=2, max_nodes=3, instr=rewrite_target_instr,
                        next_bias=0.7)
        t = random_transformation(rng, g)
        try:
            trans_sf(ApplyAll(t), {}, g, fuel=40, result_cap=300, check_output=False)
        except (FuelExhausted, ResultCapExceeded):
            seed += 1
            continue
        # only cases where T changes g at least once
        if len(apply_some_bounded(t, {}, g, 1, check_output=False)) > 1:
            cases.append((seed, g, t))
        seed += 1
    return cases
