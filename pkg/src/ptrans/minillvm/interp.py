"""Interleaved, sequentially consistent execution of MiniLLVM tCFGs.

Each step lets one running thread execute the instruction at its current
node; stores are visible to every thread immediately. Runtime faults do not
raise: the faulting thread is marked crashed and the state becomes terminal.

Memory locations are ``("g", name)`` for globals and ``("h", tid, k)`` for
the k-th allocation of thread ``tid``. Naming heap cells per thread keeps
them identical across interleavings, so behaviors of different schedules
compare directly.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from ..errors import BoundTooSmall
from ..graph import FALSE, SEQ, TRUE, TCfg
from .ast import Alloca, Arith, Br, BrCond, Call, Const, Global, Icmp, IsPointer, Load, Local, Return, Store

RUNNING, DONE, CRASHED = "running", "done", "crashed"


@dataclass(frozen=True, order=True)
class Ptr:
    loc: tuple

    def __str__(self) -> str:
        if self.loc[0] == "g":
            return f"&@{self.loc[1]}"
        return f"&t{self.loc[1]}.{self.loc[2]}"


class _Crash(Exception):
    pass


@dataclass(frozen=True)
class MachineState:
    position: tuple  # node per thread, in thread-id order
    locals: tuple  # per thread: sorted ((name, value), ...)
    memory: tuple  # sorted ((location, value), ...)
    allocated: tuple  # per thread: number of allocas executed
    status: tuple  # per thread: running | done | crashed

    @property
    def terminal(self) -> bool:
        return CRASHED in self.status or all(s == DONE for s in self.status)

    @property
    def crashed(self) -> bool:
        return CRASHED in self.status


def _value_key(value):
    return (1, value.loc) if isinstance(value, Ptr) else (0, value)


@dataclass(frozen=True)
class Behavior:
    """Observable outcome: final global values (and optionally heap cells)."""

    globals: tuple  # sorted ((name, value), ...)
    crashed: bool
    heap: tuple = ()

    def __str__(self) -> str:
        parts = ["crash" if self.crashed else "ok"]
        parts += [f"@{name}={value}" for name, value in self.globals]
        parts += [f"{_cell(loc)}={value}" for loc, value in self.heap]
        return " ".join(parts)

    def sort_key(self):
        return (self.crashed, tuple((n, _value_key(v)) for n, v in self.globals),
                tuple((loc, _value_key(v)) for loc, v in self.heap))


def _cell(loc) -> str:
    return f"*t{loc[1]}.{loc[2]}"


def initial_state(g: TCfg) -> MachineState:
    position = g.initial_state()
    status = tuple(DONE if cfg.start == cfg.exit else RUNNING for _, cfg in g.threads)
    n = len(g.threads)
    return MachineState(position, ((),) * n, (), (0,) * n, status)


def _eval(expr, env: dict):
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Global):
        return Ptr(("g", expr.name))
    if isinstance(expr, Local):
        if expr.name not in env:
            raise _Crash(f"read of unbound local %{expr.name}")
        return env[expr.name]
    raise _Crash(f"cannot evaluate {expr}")


def _int(value) -> int:
    if isinstance(value, Ptr):
        raise _Crash("pointer used as an integer")
    return value


def _address(value, memory: dict):
    if not isinstance(value, Ptr):
        raise _Crash(f"{value} is not a pointer")
    if value.loc[0] == "h" and value.loc not in memory:
        raise _Crash("access to unallocated memory")
    return value.loc


_ARITH = {"add": lambda a, b: a + b, "sub": lambda a, b: a - b, "mul": lambda a, b: a * b}
_CMP = {"eq": lambda a, b: a == b, "ne": lambda a, b: a != b, "slt": lambda a, b: a < b,
        "sgt": lambda a, b: a > b, "sle": lambda a, b: a <= b, "sge": lambda a, b: a >= b}


def _execute(instr, tid: int, env: dict, memory: dict, counter: int):
    """Run one instruction in place; returns (edge label to follow or None when
    the thread finishes, new allocation counter)."""
    if isinstance(instr, (Arith, Icmp)):
        a, b = _int(_eval(instr.lhs, env)), _int(_eval(instr.rhs, env))
        if isinstance(instr, Arith):
            result = _ARITH[instr.op](a, b)
        else:
            result = int(_CMP[instr.cmp](a, b))
        _bind(instr.dst, result, env)
        return SEQ, counter
    if isinstance(instr, BrCond):
        return (TRUE if _int(_eval(instr.cond, env)) != 0 else FALSE), counter
    if isinstance(instr, Br):
        return SEQ, counter
    if isinstance(instr, Alloca):
        loc = ("h", tid, counter)
        memory[loc] = 0
        _bind(instr.dst, Ptr(loc), env)
        return SEQ, counter + 1
    if isinstance(instr, Load):
        loc = _address(_eval(instr.addr, env), memory)
        if loc not in memory:
            raise _Crash(f"read of uninitialized {Ptr(loc)}")
        _bind(instr.dst, memory[loc], env)
        return SEQ, counter
    if isinstance(instr, Store):
        value = _eval(instr.value, env)
        memory[_address(_eval(instr.addr, env), memory)] = value
        return SEQ, counter
    if isinstance(instr, IsPointer):
        _address(_eval(instr.value, env), memory)
        return SEQ, counter
    if isinstance(instr, Return):
        _eval(instr.value, env)
        return None, counter
    if isinstance(instr, Call):
        raise _Crash("calls are not executable")
    raise _Crash(f"cannot execute {instr}")


def _bind(dst, value, env: dict):
    if not isinstance(dst, Local):
        raise _Crash(f"cannot assign to {dst}")
    env[dst.name] = value


def step(g: TCfg, s: MachineState) -> set:
    """Every state reachable by letting one running thread take one step."""
    if s.terminal:
        return set()
    out = set()
    for i, (tid, cfg) in enumerate(g.threads):
        if s.status[i] != RUNNING:
            continue
        node = s.position[i]
        env = dict(s.locals[i])
        memory = dict(s.memory)
        try:
            label, counter = _execute(cfg.labels[node], tid, env, memory, s.allocated[i])
        except _Crash:
            out.add(_update(s, i, node, s.locals[i], s.memory, s.allocated[i], CRASHED))
            continue
        new_locals = tuple(sorted(env.items()))
        new_memory = tuple(sorted(memory.items()))
        if label is None:
            out.add(_update(s, i, node, new_locals, new_memory, counter, DONE))
            continue
        targets = [dst for _, dst, lab in cfg.out_edges[node] if lab == label]
        if not targets:
            out.add(_update(s, i, node, s.locals[i], s.memory, s.allocated[i], CRASHED))
        for dst in targets:
            status = DONE if dst == cfg.exit else RUNNING
            out.add(_update(s, i, dst, new_locals, new_memory, counter, status))
    return out


def _update(s, i, node, env, memory, counter, status) -> MachineState:
    def put(seq, value):
        return seq[:i] + (value,) + seq[i + 1:]

    return MachineState(put(s.position, node), put(s.locals, env), memory,
                        put(s.allocated, counter), put(s.status, status))


def observe(s: MachineState, heap: bool = False) -> Behavior:
    globals_ = tuple((loc[1], v) for loc, v in s.memory if loc[0] == "g")
    cells = tuple((loc, v) for loc, v in s.memory if loc[0] == "h") if heap else ()
    return Behavior(globals_, s.crashed, cells)


@dataclass(frozen=True)
class Exploration:
    behaviors: frozenset
    complete: bool
    states: int

    def sorted(self) -> list:
        return sorted(self.behaviors, key=Behavior.sort_key)


def explore_behaviors(g: TCfg, step_bound: int, heap: bool = False) -> Exploration:
    """Breadth-first exploration of all interleavings up to ``step_bound`` steps."""
    s0 = initial_state(g)
    if step_bound <= 0 and not s0.terminal:
        raise BoundTooSmall("step bound must be at least 1")
    seen = {s0}
    queue = deque([(s0, 0)])
    behaviors = set()
    complete = True
    while queue:
        s, depth = queue.popleft()
        if s.terminal:
            behaviors.add(observe(s, heap))
            continue
        if depth >= step_bound:
            complete = False
            continue
        for t in step(g, s):
            if t not in seen:
                seen.add(t)
                queue.append((t, depth + 1))
    return Exploration(frozenset(behaviors), complete, len(seen))


PASS, FAIL, INCONCLUSIVE = "PASS", "FAIL", "INCONCLUSIVE"


@dataclass(frozen=True)
class Verdict:
    status: str
    witness: Behavior | None = None
    original: Exploration | None = None
    transformed: Exploration | None = None


def check_refinement(original: TCfg, transformed: TCfg, step_bound: int,
                     heap: bool = False) -> Verdict:
    """Does ``transformed`` only exhibit behaviors ``original`` can exhibit?"""
    before = explore_behaviors(original, step_bound, heap)
    after = explore_behaviors(transformed, step_bound, heap)
    new = sorted(after.behaviors - before.behaviors, key=Behavior.sort_key)
    if new and before.complete:
        return Verdict(FAIL, new[0], before, after)
    if before.complete and after.complete:
        return Verdict(PASS, None, before, after)
    return Verdict(INCONCLUSIVE, new[0] if new else None, before, after)
