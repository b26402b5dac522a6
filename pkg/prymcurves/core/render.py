"""
Markdown, CSV and JSON views of stage outputs.

Tables are derived from the JSON records only and never feed back into a
computation.
"""

import csv
import io
import json
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .cuspgeom import GeometryPair
from .exceptions import InvalidInputError
from .models import CandidateReport, OutputFormat, StageManifest, dumps
from .reference_tables import matrix_name
from .rou_solver import RelationSolution

Table = Tuple[List[str], List[List[str]]]

TABLES = ("solutions", "matrices", "sd4", "algo")


def solutions_table(solutions: Sequence[RelationSolution]) -> Table:
    headers = ["N", "e_XY", "e_U", "r", "D0", "N(r)"]
    rows = [[str(s.N), str(s.eXY), str(s.eU), str(s.r), str(s.D0), str(s.r.norm())]
            for s in sorted(solutions, key=RelationSolution.sort_key)]
    return headers, rows


def matrices_table(geometries: Sequence[GeometryPair]) -> Table:
    headers = ["M^red", "D0", "r2", "crossing", "w(Z1)", "w(Z2)", "h(Z1)", "h(Z2)"]
    rows = []
    seen = set()
    for g in sorted(geometries, key=GeometryPair.sort_key):
        key = (g.mred, g.r2, g.crossing)
        if key in seen:
            continue
        seen.add(key)
        rows.append([str(g.mred.rows()), str(g.D0), str(g.r2), g.crossing.value,
                     str(g.wZ1), str(g.wZ2), str(g.hZ1), str(g.hZ2)])
    return headers, rows


def sd4_table(report: CandidateReport, diagram: int) -> Table:
    """One row per prototype class of a single diagram, with the cell's surface counts."""
    headers = ["matrix", "M^red", "D0", "surfaces", "admissible", "(w,h,t,e)", "D", "slit", "lambda<w"]
    rows = []
    counts = {str(c.mred): c for c in report.cells if c.diagram == diagram}
    listed = set()
    for cand in report.candidates:
        if cand.diagram != diagram or cand.prototype is None:
            continue
        cell = counts[str(cand.mred)]
        p = cand.prototype
        listed.add(str(cand.mred))
        rows.append([matrix_name(cand.mred), str(cand.mred), str(cand.trace_field), str(cell.arithmetic_surfaces),
                     str(cell.admissible), f"({p.w},{p.h},{p.t},{p.e})", str(p.D), p.slit.text or str(p.slit.value()),
                     "yes" if p.lambda_below_w else "no"])
    for key, cell in counts.items():
        if key not in listed:
            rows.append([matrix_name(cell.mred), key, "", str(cell.arithmetic_surfaces), str(cell.admissible),
                         "-", "", "", ""])
    return headers, rows


def algo_table(report: CandidateReport) -> Table:
    """Matrices against diagrams, each cell ``surfaces/classes``, with a totals row."""
    n = len(report.per_diagram_totals)
    headers = ["matrix"] + [f"SD{k}" for k in range(1, n + 1)]
    grid: Dict[str, List[str]] = {}
    for cell in report.cells:
        row = grid.setdefault(matrix_name(cell.mred), ["-"] * n)
        if cell.arithmetic_surfaces:
            row[cell.diagram - 1] = f"{cell.arithmetic_surfaces}/{cell.prototype_classes + cell.unnormalizable}"
    rows = [[name] + cells for name, cells in grid.items()]
    rows.append(["# candidates"] + [str(t) for t in report.per_diagram_totals])
    rows.append(["after filter", str(report.total_after_filter)] + [""] * (n - 1))
    return headers, rows


def cache_table(entries: Sequence[StageManifest]) -> Table:
    headers = ["stage", "key", "tool version", "parameters"]
    rows = [[m.stage, Path(m.output_path).stem, m.tool_version, json.dumps(m.parameters, sort_keys=True)]
            for m in entries]
    return headers, rows


def format_table(table: Table, fmt: OutputFormat) -> str:
    headers, rows = table
    if fmt is OutputFormat.JSON:
        return dumps({"headers": headers, "rows": rows})
    if fmt is OutputFormat.CSV:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(headers)
        writer.writerows(rows)
        return buffer.getvalue()
    widths = [max(len(headers[i]), *(len(r[i]) for r in rows)) if rows else len(headers[i])
              for i in range(len(headers))]
    lines = ["| " + " | ".join(h.ljust(w) for h, w in zip(headers, widths)) + " |",
             "|" + "|".join("-" * (w + 2) for w in widths) + "|"]
    for r in rows:
        lines.append("| " + " | ".join(c.ljust(w) for c, w in zip(r, widths)) + " |")
    return "\n".join(lines) + "\n"


def render(table: str, fmt: OutputFormat, solutions: Optional[Sequence[RelationSolution]] = None,
           geometries: Optional[Sequence[GeometryPair]] = None, report: Optional[CandidateReport] = None,
           diagram: Optional[int] = None) -> str:
    if table == "solutions" and solutions is not None:
        return format_table(solutions_table(solutions), fmt)
    if table == "matrices" and geometries is not None:
        return format_table(matrices_table(geometries), fmt)
    if table == "sd4" and report is not None:
        if diagram is None:
            raise InvalidInputError("the sd4 table needs a diagram index")
        return format_table(sd4_table(report, diagram), fmt)
    if table == "algo" and report is not None:
        return format_table(algo_table(report), fmt)
    raise InvalidInputError(f"table {table!r} cannot be rendered from the given input")
