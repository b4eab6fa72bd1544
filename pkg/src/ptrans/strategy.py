"""Transformations and their executable semantics.

A transformation is a guarded rewrite or a strategy combining others.
``trans_sf`` computes the set of result graphs; results are returned as a
duplicate-free list in a deterministic order (model order, then the order
of intermediate graphs).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .errors import ActionFailure, FuelExhausted, ResultCapExceeded
from .graph import TCfg, apply_action_list
from .minillvm.parser import well_formedness_errors
from .solver import get_models

log = logging.getLogger(__name__)

DEFAULT_FUEL = 1000
DEFAULT_RESULT_CAP = 10 ** 4


class Transformation:
    __slots__ = ()


@dataclass(frozen=True)
class Rewrite(Transformation):
    actions: tuple
    cond: object

    def __post_init__(self):
        if not self.actions:
            raise ValueError("a rewrite needs at least one action")


@dataclass(frozen=True)
class Match(Transformation):
    cond: object
    body: Transformation


@dataclass(frozen=True)
class Then(Transformation):
    first: Transformation
    second: Transformation


@dataclass(frozen=True)
class Choice(Transformation):
    left: Transformation
    right: Transformation


@dataclass(frozen=True)
class ApplyAll(Transformation):
    body: Transformation


def _key(tau) -> tuple:
    return tuple(sorted((tau or {}).items(), key=lambda kv: kv[0]))


class Engine:
    """Evaluation context: option settings plus a per-run result cache."""

    def __init__(self, fuel: int = DEFAULT_FUEL, result_cap: int = DEFAULT_RESULT_CAP,
                 check_output: bool = True, **model_options):
        self.fuel = fuel
        self.result_cap = result_cap
        self.check_output = check_output
        self.model_options = model_options
        self.cache: dict = {}
        self.model_count = 0

    def _collect(self, graphs, out: list, seen: set):
        for h in graphs:
            if h not in seen:
                seen.add(h)
                out.append(h)
                if len(out) > self.result_cap:
                    raise ResultCapExceeded(f"more than {self.result_cap} result graphs")

    def run(self, t: Transformation, tau, g: TCfg) -> list:
        key = (t, _key(tau), g)
        hit = self.cache.get(key)
        if hit is None:
            hit = self.cache[key] = self._run(t, dict(tau or {}), g)
        return hit

    def _run(self, t, tau, g) -> list:
        out: list = []
        seen: set = set()
        if isinstance(t, Rewrite):
            models = get_models(tau, g, t.cond, **self.model_options)
            self.model_count += len(models)
            for sigma in models:
                try:
                    h = apply_action_list(t.actions, sigma, g)
                except ActionFailure as exc:
                    log.debug("model %s dropped: %s", sigma, exc)
                    continue
                if self.check_output:
                    for problem in well_formedness_errors(h):
                        log.warning("rewrite produced an ill-formed graph: %s", problem)
                self._collect([h], out, seen)
        elif isinstance(t, Match):
            for sigma in get_models(tau, g, t.cond, **self.model_options):
                self._collect(self.run(t.body, sigma, g), out, seen)
        elif isinstance(t, Then):
            for h in self.run(t.first, tau, g):
                self._collect(self.run(t.second, tau, h), out, seen)
        elif isinstance(t, Choice):
            self._collect(self.run(t.left, tau, g), out, seen)
            self._collect(self.run(t.right, tau, g), out, seen)
        elif isinstance(t, ApplyAll):
            self._collect(self._apply_all(t.body, tau, g), out, seen)
        else:
            raise TypeError(f"not a transformation: {t!r}")
        return out

    def _apply_all(self, body, tau, g) -> list:
        # Explore graphs level by level. A graph is final once the body can
        # no longer turn it into a different graph; graphs already explored
        # are not revisited, so rewrite cycles terminate instead of looping.
        finals: list = []
        final_seen: set = set()
        visited = {g}
        frontier = [g]
        depth = 0
        while frontier:
            if depth > self.fuel:
                raise FuelExhausted(f"APPLY_ALL did not stabilize within {self.fuel} rounds")
            nxt = []
            for h in frontier:
                changed = [r for r in self.run(body, tau, h) if r != h]
                if not changed:
                    self._collect([h], finals, final_seen)
                for r in changed:
                    if r not in visited:
                        visited.add(r)
                        nxt.append(r)
            frontier = nxt
            depth += 1
        return finals


def trans_sf(t: Transformation, tau, g: TCfg, **options) -> list:
    """Result graphs of applying ``t`` to ``g`` with initial bindings ``tau``."""
    return Engine(**options).run(t, tau, g)


def apply_some_bounded(t: Transformation, tau, g: TCfg, k: int, **options) -> set:
    """Graphs reachable from ``g`` by applying ``t`` between 0 and ``k`` times."""
    engine = Engine(**options)
    reached = {g}
    frontier = {g}
    for _ in range(k):
        nxt = set()
        for h in frontier:
            nxt.update(r for r in engine.run(t, tau, h) if r not in reached)
        if not nxt:
            break
        reached |= nxt
        frontier = nxt
    return reached


def apply_all_abstract(t: Transformation, tau, g: TCfg, k: int, **options) -> set:
    """Reachable graphs that ``t`` cannot change any further (bounded by ``k``)."""
    engine = Engine(**options)
    return {h for h in apply_some_bounded(t, tau, g, k, **options)
            if all(r == h for r in engine.run(t, tau, h))}
