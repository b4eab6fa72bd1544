"""Command-line entry point: ``ptrans <command> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from importlib import resources
from pathlib import Path

from .dot import to_dot
from .errors import PTransError
from .minillvm.interp import FAIL, INCONCLUSIVE, PASS, check_refinement, explore_behaviors
from .minillvm.parser import parse_program, serialize
from .solver import get_models
from .strategy import ApplyAll, Engine
from .syntax import parse_formula, parse_transformation

EXAMPLES = ("g1.tcfg", "racy.tcfg", "rse_phi1.ptrans", "rse_phi2.ptrans")
EXIT_CODES = {PASS: 0, FAIL: 3, INCONCLUSIVE: 4}


def _read(path: str) -> str:
    if path.startswith("example:"):
        return example_text(path[len("example:"):])
    return Path(path).read_text()


def example_text(name: str) -> str:
    if name not in EXAMPLES:
        raise PTransError(f"unknown example {name!r}; choose from {', '.join(EXAMPLES)}")
    return (resources.files("ptrans") / "data" / name).read_text()


def cmd_transform(args) -> int:
    clock = time.perf_counter
    t0 = clock()
    g = parse_program(_read(args.graph))
    t = parse_transformation(_read(args.spec))
    if args.strategy == "apply_all":
        t = ApplyAll(t)
    t1 = clock()
    engine = Engine(fuel=args.fuel)
    results = engine.run(t, {}, g)
    t2 = clock()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for k, h in enumerate(results):
        path = out / f"result_{k}.tcfg"
        path.write_text(serialize(h))
        written.append(str(path))
        if args.dot:
            (out / f"result_{k}.dot").write_text(to_dot(h, f"result_{k}"))
    t3 = clock()
    print(f"{len(results)} result(s) from {engine.model_count} model(s)")
    for path in written:
        print(path)
    if args.report:
        report = {
            "inputs": {"graph": args.graph, "spec": args.spec},
            "transformation": Path(args.spec).stem if not args.spec.startswith("example:") else args.spec,
            "strategy": args.strategy,
            "outputs": [serialize(h) for h in results],
            "model_count": engine.model_count,
            "timings": {"parse": t1 - t0, "transform": t2 - t1, "write": t3 - t2},
        }
        if args.bound:
            report["behaviors"] = [
                [str(b) for b in explore_behaviors(h, args.bound).sorted()] for h in results
            ]
        Path(args.report).write_text(json.dumps(report, indent=2) + "\n")
    return 0 if results else 2


def cmd_behaviors(args) -> int:
    g = parse_program(_read(args.graph))
    result = explore_behaviors(g, args.bound, heap=args.heap)
    for b in result.sorted():
        print(b)
    if not result.complete:
        print("INCOMPLETE")
    return 0


def cmd_check_refinement(args) -> int:
    original = parse_program(_read(args.original))
    transformed = parse_program(_read(args.transformed))
    verdict = check_refinement(original, transformed, args.bound, heap=args.heap)
    print(verdict.status)
    if verdict.witness is not None:
        print(f"witness: {verdict.witness}")
    return EXIT_CODES[verdict.status]


def cmd_models(args) -> int:
    g = parse_program(_read(args.graph))
    text = args.formula
    if Path(text).is_file() or text.startswith("example:"):
        text = _read(text)
    phi = parse_formula(text)
    for model in get_models({}, g, phi):
        print(" ".join(f"{name}={value}" for name, value in sorted(model.items())))
    return 0


def cmd_dot(args) -> int:
    sys.stdout.write(to_dot(parse_program(_read(args.graph))))
    return 0


def cmd_example(args) -> int:
    sys.stdout.write(example_text(args.name))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ptrans",
        description="Apply and test CFG rewrites with first-order CTL side conditions. "
                    "Any input path may also be given as example:<name>.")
    parser.add_argument("-v", "--verbose", action="store_true", help="also log debugging detail")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transform", help="apply a transformation, one output file per result")
    p.add_argument("graph")
    p.add_argument("spec")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--dot", action="store_true", help="also write Graphviz files")
    p.add_argument("--strategy", choices=("once", "apply_all"), default="once")
    p.add_argument("--fuel", type=int, default=1000, help="APPLY_ALL round limit")
    p.add_argument("--report", help="write a JSON run report here")
    p.add_argument("--bound", type=int, default=0,
                   help="with --report, also record behaviors explored up to this many steps")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("behaviors", help="list the behaviors of every interleaving")
    p.add_argument("graph")
    p.add_argument("--bound", type=int, default=10_000)
    p.add_argument("--heap", action="store_true", help="also observe heap cells")
    p.set_defaults(func=cmd_behaviors)

    p = sub.add_parser("check-refinement", help="are the transformed behaviors a subset?")
    p.add_argument("original")
    p.add_argument("transformed")
    p.add_argument("--bound", type=int, default=10_000)
    p.add_argument("--heap", action="store_true", help="also observe heap cells")
    p.set_defaults(func=cmd_check_refinement)

    p = sub.add_parser("models", help="list the substitutions satisfying a formula")
    p.add_argument("graph")
    p.add_argument("formula", help="formula text or a file containing it")
    p.set_defaults(func=cmd_models)

    p = sub.add_parser("dot", help="print a graph in Graphviz format")
    p.add_argument("graph")
    p.set_defaults(func=cmd_dot)

    p = sub.add_parser("example", help="print a packaged example file")
    p.add_argument("name", choices=EXAMPLES)
    p.set_defaults(func=cmd_example)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (PTransError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
