"""Acceptance criteria, one test each.

Every test prints a ``[criterion N] PASS|FAIL ...`` line; run with ``-s`` to
see them, or execute this file directly.
"""

from __future__ import annotations

import math
import random
import statistics
import sys
import time
from pathlib import Path

import pytest

from generators import apply_all_cases, random_case, random_tcfg
from ptrans.cli import example_text
from ptrans.errors import Timeout
from ptrans.foctl.formula import free_vars
from ptrans.foctl.oracle import brute_force_models
from ptrans.foctl.satis import satis_product
from ptrans.minillvm.interp import FAIL, PASS, check_refinement, explore_behaviors
from ptrans.minillvm.parser import parse_program, serialize, well_formedness_errors
from ptrans.solver import extract_domain, get_models
from ptrans.strategy import ApplyAll, apply_all_abstract, trans_sf
from ptrans.syntax import parse_formula, parse_transformation

GOLDEN = Path(__file__).parent / "golden"
BOUND = 10_000


def report(n: int, ok: bool, detail: str) -> None:
    print(f"[criterion {n}] {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, detail


def load(name):
    text = example_text(name)
    return parse_transformation(text) if name.endswith(".ptrans") else parse_program(text)


def golden(name):
    return (GOLDEN / name).read_text()


def test_criterion_1_model_finding_matches_brute_force():
    cases, mismatches = 600, []
    started = time.monotonic()
    for seed in range(cases):
        g, phi = random_case(seed, max_threads=2, max_nodes=5, depth=3)
        assert len(free_vars(phi)) <= 2
        if get_models({}, g, phi) != brute_force_models(g, phi):
            mismatches.append(seed)
    elapsed = time.monotonic() - started
    report(1, not mismatches and elapsed <= 300,
           f"{cases} cases, {len(mismatches)} mismatches {mismatches[:5]}, {elapsed:.1f}s")


def test_criterion_2_rse_phi1_on_g1():
    g, t = load("g1.tcfg"), load("rse_phi1.ptrans")
    once = [serialize(h) for h in trans_sf(t, {}, g)]
    repeated = [serialize(h) for h in trans_sf(ApplyAll(t), {}, g)]
    expected_once = [golden("g1_rse_phi1_0.tcfg"), golden("g1_rse_phi1_1.tcfg")]
    ok = once == expected_once and repeated == [golden("g1_rse_phi1_apply_all.tcfg")]
    report(2, ok, f"{len(once)} single results, {len(repeated)} APPLY_ALL result(s)")


def test_criterion_3_rse_phi2_on_racy():
    g, t = load("racy.tcfg"), load("rse_phi2.ptrans")
    results = [serialize(h) for h in trans_sf(t, {}, g)]
    report(3, results == [golden("racy_rse_phi2.tcfg")], f"{len(results)} result(s)")


def test_criterion_4_racy_behaviors():
    g = load("racy.tcfg")
    original = explore_behaviors(g, BOUND)
    ok_runs = [b for b in original.behaviors if not b.crashed]
    always_7 = bool(ok_runs) and all(dict(b.globals)["c"] == 7 for b in ok_runs)
    phi1 = trans_sf(load("rse_phi1.ptrans"), {}, g)
    phi1_all = trans_sf(ApplyAll(load("rse_phi1.ptrans")), {}, g)
    (phi2,) = trans_sf(load("rse_phi2.ptrans"), {}, g)
    # the phi1 result that drops the second store
    unsafe = [h for h in phi1 if str(h.label(4)).startswith("is_pointer")]
    sees_8 = any(dict(b.globals).get("c") == 8 and not b.crashed
                 for h in unsafe for b in explore_behaviors(h, BOUND).behaviors)
    verdicts = [check_refinement(g, h, BOUND).status for h in unsafe + phi1_all]
    safe = check_refinement(g, phi2, BOUND).status
    ok = (original.complete and original.states < 10 ** 4 and always_7 and sees_8
          and len(unsafe) == 1 and verdicts == [FAIL, FAIL] and safe == PASS)
    report(4, ok, f"{original.states} states, non-crashing @c always 7: {always_7}, "
                  f"@c=8 after RSE(phi1): {sees_8}, RSE(phi1) {verdicts}, RSE(phi2) {safe}")


def test_criterion_5_apply_all_matches_abstract_semantics():
    cases = apply_all_cases(100, start=10 ** 4)
    bad = []
    for seed, g, t in cases:
        concrete = set(trans_sf(ApplyAll(t), {}, g, fuel=40, result_cap=300, check_output=False))
        if concrete != apply_all_abstract(t, {}, g, 1000, check_output=False):
            bad.append(seed)
    report(5, len(cases) == 100 and not bad, f"{len(cases)} cases, mismatching seeds {bad[:5]}")


def _chain(n: int):
    lines = ["thread 1 {", "  start 1", f"  exit {n}"]
    lines += [f"  node {i}: store int {i % 3}, int* %{'xyz'[i % 3]}" for i in range(1, n)]
    lines.append(f"  node {n}: br")
    lines += [f"  edge {i} seq {i + 1}" for i in range(1, n)]
    return parse_program("\n".join(lines + ["}"]))


SCALING_FORMULA = "EF (node(t, n) /\\ AU(~def(t, e), exists v. stmt(t, store int v, int* e)))"


def _timed(phi, g, domain, **options) -> float:
    started = time.perf_counter()
    satis_product(phi, g, domain=domain, **options)
    return time.perf_counter() - started


def test_criterion_6_memoized_reduction_scales_polynomially():
    phi = parse_formula(SCALING_FORMULA)
    sizes, medians = (10, 20, 40, 80), []
    for n in sizes:
        g = _chain(n)
        d = extract_domain(g)
        medians.append(statistics.median(_timed(phi, g, d) for _ in range(3)))
    slope = statistics.linear_regression([math.log(n) for n in sizes],
                                         [math.log(t) for t in medians]).slope
    g40 = _chain(40)
    budget = max(20 * medians[2], 10.0)
    try:
        plain = _timed(phi, g40, extract_domain(g40), memo=False, timeout=budget)
        unmemoized = f"{plain:.2f}s"
        blowup = plain > 10 * medians[2]
    except Timeout:
        unmemoized = f"timed out after {budget:.0f}s"
        blowup = True
    timings = ", ".join(f"{n}: {t * 1000:.1f}ms" for n, t in zip(sizes, medians))
    report(6, slope <= 3.3 and medians[3] < 30 and blowup,
           f"memoized {timings}; slope {slope:.2f}; unmemoized 40 nodes {unmemoized}")


def test_criterion_7_action_algebra():
    import test_graph

    properties = [test_graph.test_add_remove_inverse, test_graph.test_replace_counts_and_edges,
                  test_graph.test_split_edge_counts]
    failures = []
    for prop in properties:
        try:
            prop()
        except Exception as exc:  # noqa: BLE001 - reported below
            failures.append(f"{prop.__name__}: {exc}")
    rse = [load("rse_phi1.ptrans"), load("rse_phi2.ptrans")]
    checked = 0
    for seed in range(100):
        g = random_tcfg(random.Random(seed), max_nodes=5)
        if well_formedness_errors(g):
            continue
        for t in rse + [ApplyAll(rse[0])]:
            for h in trans_sf(t, {}, g):
                checked += 1
                if well_formedness_errors(h):
                    failures.append(f"ill-formed RSE output for seed {seed}")
    report(7, not failures, f"{len(properties)} generated properties, {checked} RSE outputs checked"
                            + (f"; {failures[:3]}" if failures else ""))


def test_criterion_8_g1_single_replacements_keep_behaviors():
    g, t = load("g1.tcfg"), load("rse_phi1.ptrans")
    results = trans_sf(t, {}, g)
    same = []
    for heap in (False, True):
        before = explore_behaviors(g, BOUND, heap)
        for h in results:
            after = explore_behaviors(h, BOUND, heap)
            same.append(before.complete and after.complete and after.behaviors == before.behaviors)
    shown = "; ".join(str(b) for b in explore_behaviors(g, BOUND, True).sorted())
    report(8, len(results) == 2 and all(same), f"{len(results)} results, original: {shown}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-s", "-q"]))
