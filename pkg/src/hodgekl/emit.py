"""Deterministic table emitters: JSON, CSV and LaTeX.

All outputs are byte-stable for identical inputs: keys are sorted, parameter
ids follow the canonical block order, and polynomials render in a fixed term
order.  Matrices print with rows indexed by the expansion parameter and
columns by the expanded one.
"""

from __future__ import annotations

import json
from typing import Dict, List, Optional

from .block import Block
from .duality import RMatrix
from .hecke import HeckeContext
from .kl import MultiplicityMatrix
from .poly import QuarterLaurent, SignedULaurent

__all__ = [
    "matrix_to_json",
    "matrix_to_csv",
    "matrix_to_latex",
    "rmatrix_to_json",
    "rmatrix_to_csv",
    "rmatrix_to_latex",
    "hecke_to_json",
    "render_json",
]


def render_json(data) -> str:
    return json.dumps(data, indent=1, sort_keys=True) + "\n"


def _poly_records(val) -> List[dict]:
    return val.to_records()


def _zeta_parity(val) -> str:
    if isinstance(val, QuarterLaurent):
        return "n/a"
    bits = {zb for (_u, zb) in val.terms}
    if not bits:
        return "zero"
    if bits == {0}:
        return "even"
    if bits == {1}:
        return "odd"
    return "mixed"


def matrix_to_json(block: Block, mm: MultiplicityMatrix) -> dict:
    entries = []
    for (rid, cid) in sorted(mm.entries):
        val = mm.entries[(rid, cid)]
        rec = {
            "row": rid,
            "col": cid,
            "poly": _poly_records(val),
            "str": str(val),
        }
        if mm.kind == "signature":
            rec["zeta_parity"] = _zeta_parity(val)
        entries.append(rec)
    out = {
        "kind": mm.kind,
        "group": block.group,
        "order": list(mm.order),
        "entries": entries,
        "lengths": {
            pid: {k: str(v) for k, v in vals.items()}
            for pid, vals in sorted(mm.lengths.items())
        },
    }
    if mm.advisory:
        out["advisory"] = dict(sorted(mm.advisory.items()))
    return out


def _grid(order, entry_fn) -> List[List[str]]:
    rows = []
    for rid in order:
        row = []
        for cid in order:
            row.append(entry_fn(rid, cid))
        rows.append(row)
    return rows


def matrix_to_csv(block: Block, mm: MultiplicityMatrix) -> str:
    lines = ["row\\col," + ",".join(mm.order)]
    for rid in mm.order:
        cells = []
        for cid in mm.order:
            val = mm.entry(rid, cid)
            text = str(val)
            if mm.kind == "signature" and not val.is_zero():
                text += f" [{_zeta_parity(val)}]"
            cells.append('"' + text + '"')
        lines.append(f'"{rid}",' + ",".join(cells))
    return "\n".join(lines) + "\n"


def _latex_poly(val) -> str:
    s = str(val)
    s = s.replace("*", " ")
    # exponents like u^1/2 need braces
    out = []
    i = 0
    while i < len(s):
        ch = s[i]
        if ch == "^":
            j = i + 1
            if j < len(s) and s[j] == "-":
                j += 1
            while j < len(s) and (s[j].isdigit() or s[j] == "/"):
                j += 1
            out.append("^{" + s[i + 1 : j] + "}")
            i = j
        else:
            out.append(ch)
            i += 1
    return "".join(out).replace("z", r"\zeta ")


def _latex_table(order, title: str, entry_fn) -> str:
    header = " & ".join([""] + [f"\\texttt{{{_tex_escape(c)}}}" for c in order])
    lines = [
        "\\documentclass{article}",
        "\\usepackage{amsmath}",
        "\\usepackage[margin=1cm]{geometry}",
        "\\begin{document}",
        f"\\section*{{{title}}}",
        "\\scriptsize",
        "\\[",
        "\\begin{array}{r|" + "c" * len(order) + "}",
        header + " \\\\ \\hline",
    ]
    for rid in order:
        cells = [f"\\texttt{{{_tex_escape(rid)}}}"]
        for cid in order:
            cells.append(_latex_poly(entry_fn(rid, cid)))
        lines.append(" & ".join(cells) + " \\\\")
    lines += ["\\end{array}", "\\]", "\\end{document}"]
    return "\n".join(lines) + "\n"


def _tex_escape(s: str) -> str:
    return s.replace("_", r"\_").replace("*", r"\*").replace("@", r"{@}")


def matrix_to_latex(block: Block, mm: MultiplicityMatrix) -> str:
    def cell(rid, cid):
        val = mm.entry(rid, cid)
        text = _latex_poly(val) if not val.is_zero() else "0"
        if mm.kind == "signature" and not val.is_zero():
            text += f"\\,({_zeta_parity(val)})"
        return text

    return _latex_table(list(mm.order), f"{mm.kind} table for {block.group}", cell)


def rmatrix_to_json(block: Block, rmat: RMatrix) -> dict:
    entries = []
    for (rid, cid) in sorted(rmat.entries):
        val = rmat.entries[(rid, cid)]
        entries.append(
            {"row": rid, "col": cid, "poly": _poly_records(val), "str": str(val)}
        )
    return {
        "kind": "duality",
        "group": block.group,
        "order": list(rmat.order),
        "entries": entries,
    }


def rmatrix_to_csv(block: Block, rmat: RMatrix) -> str:
    lines = ["row\\col," + ",".join(rmat.order)]
    for rid in rmat.order:
        cells = ['"' + str(rmat.entry(rid, cid)) + '"' for cid in rmat.order]
        lines.append(f'"{rid}",' + ",".join(cells))
    return "\n".join(lines) + "\n"


def rmatrix_to_latex(block: Block, rmat: RMatrix) -> str:
    def cell(rid, cid):
        val = rmat.entry(rid, cid)
        return _latex_poly(val) if not val.is_zero() else "0"

    return _latex_table(list(rmat.order), f"duality matrix for {block.group}", cell)


def hecke_to_json(block: Block, ctx: Optional[HeckeContext] = None) -> dict:
    """All per-root operator matrices in the standard basis."""
    ctx = ctx or HeckeContext(block)
    out: Dict[str, dict] = {}
    for twist in range(len(block.twists)):
        if not block.params_at(twist):
            continue
        for i in range(block.rd.n_simple):
            mat = ctx.matrix(i, twist)
            cols = {}
            for cid in sorted(mat):
                cols[cid] = {
                    rid: {"poly": mat[cid][rid].to_records(), "str": str(mat[cid][rid])}
                    for rid in sorted(mat[cid])
                }
            out[f"root{i}@twist{twist}"] = {
                "root": i,
                "twist": twist,
                "target_twist": block.reflected_twist(twist, i),
                "columns": cols,
            }
    return {"kind": "hecke", "group": block.group, "operators": out}
