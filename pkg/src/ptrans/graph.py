"""Control-flow graphs, threaded CFGs, the interleaving product and the
four atomic rewrite actions.

Graphs are immutable values. Node ids are integers unique across the whole
tCFG, so resolving the thread an action touches is a dictionary lookup.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Union

from .errors import (
    ExitHasSuccessor,
    ExitUnreachable,
    MissingEdge,
    MissingNode,
    NodesInDifferentThreads,
    UnboundMetaVariable,
)
from .minillvm.ast import MetaVar, is_ground, substitute

SEQ, TRUE, FALSE = "seq", "true", "false"
EDGE_LABELS = (SEQ, TRUE, FALSE)

Edge = tuple  # (src, dst, label)
Substitution = Mapping[str, object]


@dataclass(frozen=True)
class Cfg:
    nodes: frozenset
    edges: frozenset
    start: int
    exit: int
    labeling: tuple  # sorted ((node, instruction), ...)

    def __post_init__(self):
        if self.start not in self.nodes or self.exit not in self.nodes:
            raise MissingNode(f"start/exit not among nodes {sorted(self.nodes)}")
        for src, dst, _ in self.edges:
            if src not in self.nodes or dst not in self.nodes:
                raise MissingNode(f"edge ({src}, {dst}) has an endpoint outside the graph")
            if src == self.exit:
                raise ValueError(f"exit node {self.exit} must not have outgoing edges")
        if {n for n, _ in self.labeling} != set(self.nodes):
            raise ValueError("labeling must be total on nodes")

    @classmethod
    def build(cls, nodes: Iterable[int], edges: Iterable[Edge], start: int, exit: int,
              labels: Mapping[int, object]) -> "Cfg":
        return cls(frozenset(nodes), frozenset(tuple(e) for e in edges), start, exit,
                   tuple(sorted(labels.items())))

    @cached_property
    def labels(self) -> dict:
        return dict(self.labeling)

    @cached_property
    def out_edges(self) -> dict:
        out = {n: [] for n in self.nodes}
        for e in sorted(self.edges):
            out[e[0]].append(e)
        return out

    def successors(self, node: int) -> list:
        return [dst for _, dst, _ in self.out_edges[node]]

    def replace(self, **changes) -> "Cfg":
        values = dict(nodes=self.nodes, edges=self.edges, start=self.start,
                      exit=self.exit, labeling=self.labeling)
        values.update(changes)
        return Cfg(**values)


@dataclass(frozen=True)
class TCfg:
    threads: tuple  # sorted ((thread_id, Cfg), ...)

    def __post_init__(self):
        if not self.threads:
            raise ValueError("a tCFG needs at least one thread")
        seen: set = set()
        for tid, cfg in self.threads:
            if seen & cfg.nodes:
                raise ValueError(f"thread {tid} shares node ids with another thread")
            seen |= cfg.nodes

    @classmethod
    def of(cls, threads: Mapping[int, Cfg]) -> "TCfg":
        return cls(tuple(sorted(threads.items())))

    @cached_property
    def cfgs(self) -> dict:
        return dict(self.threads)

    @property
    def thread_ids(self) -> tuple:
        return tuple(tid for tid, _ in self.threads)

    @cached_property
    def owner(self) -> dict:
        """node id -> owning thread id"""
        return {n: tid for tid, cfg in self.threads for n in cfg.nodes}

    def all_nodes(self) -> set:
        return set(self.owner)

    def label(self, node: int):
        return self.cfgs[self.owner[node]].labels[node]

    def initial_state(self) -> tuple:
        return tuple(cfg.start for _, cfg in self.threads)

    def exit_state(self) -> tuple:
        return tuple(cfg.exit for _, cfg in self.threads)

    def with_thread(self, tid: int, cfg: Cfg) -> "TCfg":
        """Copy with thread ``tid`` replaced by ``cfg``."""
        return TCfg(tuple((t, cfg if t == tid else c) for t, c in self.threads))

    def fresh_nodes(self, count: int) -> list:
        used = self.all_nodes()
        fresh, candidate = [], 1
        while len(fresh) < count:
            if candidate not in used:
                fresh.append(candidate)
            candidate += 1
        return fresh


# -- actions -----------------------------------------------------------------

@dataclass(frozen=True)
class AddEdge:
    src: Union[int, MetaVar]
    dst: Union[int, MetaVar]
    label: Union[str, MetaVar]


@dataclass(frozen=True)
class RemoveEdge:
    src: Union[int, MetaVar]
    dst: Union[int, MetaVar]
    label: Union[str, MetaVar]


@dataclass(frozen=True)
class SplitEdge:
    src: Union[int, MetaVar]
    dst: Union[int, MetaVar]
    label: Union[str, MetaVar]
    instr: object


@dataclass(frozen=True)
class Replace:
    node: Union[int, MetaVar]
    instrs: tuple = field(default=())

    def __post_init__(self):
        if not self.instrs:
            raise ValueError("replace needs at least one instruction")


Action = Union[AddEdge, RemoveEdge, SplitEdge, Replace]


def _resolve(term, sigma: Substitution):
    if isinstance(term, MetaVar):
        if term.name not in sigma:
            raise UnboundMetaVariable(term.name)
        return sigma[term.name]
    return term


def _resolve_instr(pattern, sigma: Substitution):
    ground = substitute(pattern, sigma)
    if not is_ground(ground):
        raise UnboundMetaVariable(f"instruction {pattern} is not fully bound")
    return ground


def _rebuild(cfg: Cfg, **changes) -> Cfg:
    try:
        return cfg.replace(**changes)
    except ValueError as exc:
        raise ExitHasSuccessor(str(exc)) from None


def _owning_thread(g: TCfg, *nodes) -> int:
    owners = set()
    for n in nodes:
        if n not in g.owner:
            raise MissingNode(f"node {n} is not in the graph")
        owners.add(g.owner[n])
    if len(owners) != 1:
        raise NodesInDifferentThreads(f"nodes {nodes} span threads {sorted(owners)}")
    return owners.pop()


def apply_action(action: Action, sigma: Substitution, g: TCfg) -> TCfg:
    """Apply one action under substitution ``sigma``; returns a new tCFG."""
    if isinstance(action, (AddEdge, RemoveEdge, SplitEdge)):
        n = _resolve(action.src, sigma)
        m = _resolve(action.dst, sigma)
        label = _resolve(action.label, sigma)
        tid = _owning_thread(g, n, m)
        cfg = g.cfgs[tid]
        edge = (n, m, label)
        if isinstance(action, AddEdge):
            return g.with_thread(tid, _rebuild(cfg, edges=cfg.edges | {edge}))
        if isinstance(action, RemoveEdge):
            return g.with_thread(tid, _rebuild(cfg, edges=cfg.edges - {edge}))
        if edge not in cfg.edges:
            raise MissingEdge(f"cannot split absent edge {edge}")
        instr = _resolve_instr(action.instr, sigma)
        (fresh,) = g.fresh_nodes(1)
        edges = (cfg.edges - {edge}) | {(n, fresh, label), (fresh, m, SEQ)}
        labels = dict(cfg.labeling)
        labels[fresh] = instr
        return g.with_thread(tid, _rebuild(cfg, nodes=cfg.nodes | {fresh}, edges=edges,
                                              labeling=tuple(sorted(labels.items()))))

    if isinstance(action, Replace):
        n = _resolve(action.node, sigma)
        tid = _owning_thread(g, n)
        cfg = g.cfgs[tid]
        instrs = [_resolve_instr(i, sigma) for i in action.instrs]
        chain = [n] + g.fresh_nodes(len(instrs) - 1)
        last = chain[-1]
        edges = {(last, b, lab) if a == n else (a, b, lab) for a, b, lab in cfg.edges}
        edges |= {(chain[j], chain[j + 1], SEQ) for j in range(len(chain) - 1)}
        labels = dict(cfg.labeling)
        labels.update(zip(chain, instrs))
        return g.with_thread(tid, _rebuild(cfg, nodes=cfg.nodes | set(chain), edges=frozenset(edges),
                                              labeling=tuple(sorted(labels.items()))))

    raise TypeError(f"not an action: {action!r}")


def apply_action_list(actions, sigma: Substitution, g: TCfg) -> TCfg:
    for action in actions:
        g = apply_action(action, sigma, g)
    return g


# -- product graph -----------------------------------------------------------

def product_successors(g: TCfg, q: tuple) -> set:
    """Interleaving step: exactly one thread advances along one of its edges."""
    result = set()
    for i, (_, cfg) in enumerate(g.threads):
        node = q[i]
        if node == cfg.exit:
            continue
        for dst in cfg.successors(node):
            result.add(q[:i] + (dst,) + q[i + 1:])
    return result


def prune_unreachable(g: TCfg) -> TCfg:
    threads = {}
    for tid, cfg in g.threads:
        seen = {cfg.start}
        stack = [cfg.start]
        while stack:
            for nxt in cfg.successors(stack.pop()):
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        if cfg.exit not in seen:
            raise ExitUnreachable(f"thread {tid}: exit node {cfg.exit} is unreachable from start")
        threads[tid] = cfg.replace(
            nodes=frozenset(seen),
            edges=frozenset(e for e in cfg.edges if e[0] in seen),
            labeling=tuple((n, i) for n, i in cfg.labeling if n in seen),
        )
    return TCfg.of(threads)
