"""Graphviz export of tCFGs, one cluster per thread."""

from __future__ import annotations

from .graph import TCfg


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(g: TCfg, name: str = "tcfg") -> str:
    lines = [f"digraph {_quote(name)} {{", "  node [shape=box, fontname=monospace];"]
    for tid, cfg in g.threads:
        lines.append(f"  subgraph cluster_{tid} {{")
        lines.append(f"    label={_quote(f'thread {tid}')};")
        for node, instr in cfg.labeling:
            attrs = [f"label={_quote(f'{node}: {instr}')}"]
            if node == cfg.start:
                attrs.append("penwidth=2")
            if node == cfg.exit:
                attrs.append("peripheries=2")
            lines.append(f"    n{node} [{', '.join(attrs)}];")
        for src, dst, label in sorted(cfg.edges):
            lines.append(f"    n{src} -> n{dst} [label={_quote(label)}];")
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"
