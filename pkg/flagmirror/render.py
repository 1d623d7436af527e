"""Text, JSON, LaTeX and DOT emitters.

Every emitter is a pure function of its input; identical inputs give
byte-identical output (JSON keys are sorted, terms are in canonical order).
"""

from __future__ import annotations

import json
from typing import Iterable, List, Mapping

from .exactalg import LaurentExpr, latex, to_json
from .mirror import LadderDiagram, LadderVertex, Superpotential, WPTerm
from .schubert import ClassExpr

__all__ = [
    "FORMATS",
    "dumps",
    "ladder_dot",
    "ladder_json",
    "ladder_text",
    "pieri_json",
    "wp_json",
    "wp_latex",
    "wp_text",
]

FORMATS = {
    "wp": ("text", "json", "latex"),
    "ladder": ("text", "json", "dot"),
    "pieri": ("text", "json"),
}


def dumps(payload: object) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False)


def _term_text(term: WPTerm) -> str:
    numerator = str(term.numerator)
    if len(term.numerator) > 1:
        numerator = f"({numerator})"
    return f"{numerator}/{term.denominator.name}"


def wp_text(wp: Superpotential) -> str:
    return " + ".join(_term_text(t) for t in wp.terms)


def _term_latex(term: WPTerm) -> str:
    return f"\\frac{{{latex(term.numerator)}}}{{{term.denominator.latex()}}}"


def wp_latex(wp: Superpotential) -> str:
    """One ``\\frac`` per frozen coordinate; partitions are flattened to part tuples."""

    return "W_P = " + " + ".join(_term_latex(t) for t in wp.terms)


def wp_json(wp: Superpotential) -> dict:
    return {
        "shape": wp.shape.spec,
        "variety": str(wp.shape),
        "count": len(wp),
        "terms": [
            {
                "level": t.level,
                "frozen": t.frozen.to_json(),
                "numerator": to_json(t.numerator),
                "text": _term_text(t),
            }
            for t in wp.terms
        ],
    }


# ---------------------------------------------------------------------------
# ladder


def _vertex_json(v: LadderVertex, labels: Mapping[LadderVertex, LaurentExpr] | None) -> dict:
    payload = {"id": v.label, "col": v.col, "row": v.row, "level": v.level, "external": v.external}
    if not v.external:
        payload.update(a=v.a, b=v.b)
    if labels is not None:
        payload["phi"] = str(labels[v])
    return payload


def ladder_json(d: LadderDiagram, labels: Mapping[LadderVertex, LaurentExpr] | None = None) -> dict:
    return {
        "shape": d.shape.spec,
        "vertices": [_vertex_json(v, labels) for v in d.vertices],
        "arrows": [[t.label, h.label] for t, h in d.arrows],
        "counts": {"vertices": len(d.vertices), "arrows": len(d.arrows)},
    }


def ladder_text(d: LadderDiagram, labels: Mapping[LadderVertex, LaurentExpr] | None = None) -> str:
    lines: List[str] = [f"ladder {d.shape} vertices={len(d.vertices)} arrows={len(d.arrows)}"]
    for v in d.vertices:
        suffix = f"  {labels[v]}" if labels is not None else ""
        lines.append(f"  {v.label} ({v.col},{v.row}){suffix}")
    for t, h in d.arrows:
        lines.append(f"  {t.label} -> {h.label}")
    return "\n".join(lines)


def ladder_dot(d: LadderDiagram) -> str:
    """Graphviz digraph; vertices are pinned at their grid position."""

    lines = [f'digraph "{d.shape}" {{', "  node [shape=circle];"]
    for v in d.vertices:
        shape = "box" if v.external else "circle"
        lines.append(f'  {v.label} [pos="{v.col},{v.row}!", shape={shape}];')
    for t, h in d.arrows:
        lines.append(f"  {t.label} -> {h.label};")
    lines.append("}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# classes


def pieri_json(expr: ClassExpr, level: int, lam: Iterable[int]) -> dict:
    return {
        "shape": expr.shape.spec,
        "level": level,
        "lambda": list(lam),
        "text": expr.render(),
        "terms": expr.to_json(),
    }
