"""Serializations of an analysis: JSON report, DOT branching graph, plain text."""
from __future__ import annotations

import json

from .. import __version__
from ..constraint import sets as S
from ..constraint.symbolic import format_poly
from .engine import Analysis, History, growth_report

SCHEMA_ID = "retrograde/report/v1"


def _history_json(h: History) -> dict:
    return {
        "index": h.index,
        "status": h.status,
        "path": [{"line": d.line, "label": d.label} for d in h.decisions],
        "inputs": {n: {"text": S.to_text(s), "set": S.to_json(s)} for n, s in h.inputs.items()},
        "residual": [str(p) for p in h.residual],
        "outputs": {n: format_poly(p) for n, p in h.outputs.items()},
        "conditions": [{"pred": str(c.pred), "line": c.line, "kind": c.kind, "truth": c.truth}
                       for c in h.conds],
        "fresh": list(h.fresh),
        "frames": [{"line": fr.line, "text": fr.text, "outputs": fr.shown(), "note": fr.note}
                   for fr in h.frames],
    }


def to_json(a: Analysis, seed: int = 0, source: str | None = None) -> dict:
    return {
        "schema": SCHEMA_ID,
        "tool": "retrograde",
        "version": __version__,
        "seed": seed,
        "source": source,
        "function": a.func.name,
        "out_spec": a.out_spec,
        "policy": a.policy,
        "status": "truncated" if a.truncated else "complete",
        "truncation": list(a.reasons),
        "histories": [_history_json(h) for h in a.histories],
        "growth": growth_report(a),
    }


def dumps(a: Analysis, seed: int = 0, source: str | None = None) -> str:
    """Byte-stable JSON text (sorted keys, fixed indentation)."""
    return json.dumps(to_json(a, seed, source), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def to_dot(a: Analysis) -> str:
    """Tree of backward branch decisions; leaves are histories."""
    lines = ["digraph histories {", '  node [shape=box, fontname="monospace"];',
             '  n0 [label="entry"];']
    ids = {(): "n0"}
    counter = 1
    for h in a.histories:
        prefix = ()
        for d in h.decisions:
            nxt = prefix + ((d.sid, d.label),)
            if nxt not in ids:
                ids[nxt] = f"n{counter}"
                counter += 1
                lines.append(f'  {ids[nxt]} [label="line {d.line}"];')
                lines.append(f'  {ids[prefix]} -> {ids[nxt]} [label="{_esc(d.label)}"];')
            prefix = nxt
        leaf = f"h{h.index}"
        label = _esc(f"H{h.index}\\n" + "\\n".join(h.describe_inputs())
                     + "\\n" + ", ".join(h.describe_outputs()))
        lines.append(f'  {leaf} [label="{label}", shape=ellipse];')
        lines.append(f"  {ids[prefix]} -> {leaf};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _esc(s: str) -> str:
    return s.replace('"', '\\"')


def to_text(a: Analysis, seed: int = 0, frames: bool = True) -> str:
    out = [f"# retrograde {__version__} seed={seed} function={a.func.name} "
           f"out={a.out_spec} policy={a.policy}",
           f"status: {'truncated (' + ', '.join(a.reasons) + ')' if a.truncated else 'complete'}",
           f"histories: {len(a.histories)}"]
    for h in a.histories:
        out.append("")
        out.append(f"History {h.index} [{h.status}] path: {' '.join(h.path) or '-'}")
        for d in h.describe_inputs():
            out.append(f"  input  {d}")
        for d in h.describe_outputs():
            out.append(f"  output {d}")
        if frames:
            for fr in h.frames:
                shown = "; ".join(fr.shown().values())
                note = f" [{fr.note}]" if fr.note else ""
                out.append(f"    {fr.line:>4}  {fr.text}{note}  {shown}")
    g = growth_report(a)
    if g["lines"]:
        out.append("")
        out.append("growth: line kind in created pruned out")
        for r in g["lines"]:
            flag = "  exponential" if r["exponential"] else ""
            out.append(f"  {r['line']:>4} {r['kind']:<5} {r['in']} {r['created']} "
                       f"{r['pruned']} {r['out']}{flag}")
    return "\n".join(out) + "\n"


__all__ = ["to_json", "dumps", "to_dot", "to_text", "SCHEMA_ID"]
