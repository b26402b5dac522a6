"""
Published numbers used as a regression oracle.

Nothing in the computation path reads this module; it is consulted only by
``--assert-paper`` and by the tests marked ``paper``. Every ``compare_*``
function raises :class:`RegressionMismatch` listing each disagreement.
"""

from collections import Counter
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .cuspgeom import GeometryPair
from .exactmath import QuadElt
from .exceptions import RegressionMismatch
from .logger import get_logger
from .models import CandidateReport, Stratum
from .rou_solver import RelationSolution
from .separatrix import sd4_diagram

logger = get_logger("prymcurves.Pipeline")


def _q(a, b=0, D0: int = 1) -> QuadElt:
    return QuadElt(Fraction(a), Fraction(b), D0)


# (N, e_XY, e_U, r); the full sets add (N, N - e_XY, N - e_U, r) for each row.
PRYM211_REPRESENTATIVES = [
    (6, 1, 1, _q(Fraction(1, 2), Fraction(1, 6), 33)),
    (6, 3, 1, _q(0, Fraction(2, 3), 6)),
    (6, 3, 2, _q(0, 2, 2)),
    (6, 5, 1, _q(Fraction(-1, 2), Fraction(1, 6), 33)),
    (12, 6, 1, _q(-2, 2, 3)),
    (12, 6, 5, _q(2, 2, 3)),
    (24, 3, 4, _q(0, Fraction(2, 3), 3)),
    (24, 15, 4, _q(0, Fraction(2, 3), 3)),
]

_HALF = Fraction(1, 2)

PRYM22_REPRESENTATIVES = [
    (12, 2, 3, _q(0, _HALF, 2)),
    (12, 10, 3, _q(0, _HALF, 2)),
    (12, 1, 3, _q(-_HALF, _HALF, 3)),
    (12, 1, 9, _q(-_HALF, _HALF, 3)),
    (12, 5, 3, _q(_HALF, _HALF, 3)),
    (12, 7, 3, _q(_HALF, _HALF, 3)),
    (12, 4, 3, _q(0, _HALF, 6)),
    (12, 4, 9, _q(0, _HALF, 6)),
    (12, 4, 1, _q(Fraction(3, 2), _HALF, 33)),
    (12, 4, 5, _q(Fraction(-3, 2), _HALF, 33)),
    (12, 8, 1, _q(Fraction(-3, 2), _HALF, 33)),
    (12, 8, 5, _q(Fraction(3, 2), _HALF, 33)),
    (48, 16, 21, _q(0, 1, 3)),
    (48, 16, 9, _q(0, 1, 3)),
    (48, 32, 3, _q(0, 1, 3)),
    (48, 32, 15, _q(0, 1, 3)),
]

SOLUTION_COUNTS = {Stratum.PRYM211: 16, Stratum.PRYM22: 32}

# Reduced intersection matrices with r2, (w(Z1), w(Z2)) and (h(Z1), h(Z2)).
PRYM22_MATRICES = {
    "M1": (((72, 48), (24, 18)), _q(0, _HALF, 2), (_q(72, 48, 2), _q(48, 36, 2)),
           (_q(Fraction(3, 24), Fraction(-2, 24), 2), _q(Fraction(-4, 12), Fraction(3, 12), 2))),
    "M2": (((72, 24), (12, 6)), _q(-_HALF, _HALF, 3), (_q(48, 24, 3), _q(12, 12, 3)),
           (_q(Fraction(2, 24), Fraction(-1, 24), 3), _q(Fraction(-5, 12), Fraction(3, 12), 3))),
    "M3": (((72, 24), (48, 18)), _q(_HALF, _HALF, 3), (_q(168, 96, 3), _q(60, 36, 3)),
           (_q(Fraction(2, 24), Fraction(-1, 24), 3), _q(Fraction(-5, 12), Fraction(3, 12), 3))),
    "M4": (((36, 12), (30, 12)), _q(0, 1, 3), (_q(36, 20, 3), _q(12, 8, 3)),
           (_q(Fraction(2, 12), Fraction(-1, 12), 3), _q(Fraction(-5, 6), Fraction(3, 6), 3))),
    "M5": (((6, 24), (12, 54)), _q(Fraction(3, 2), _HALF, 33), (_q(12, 2, 33), _q(51, 9, 33)),
           (_q(1, Fraction(-1, 6), 33), _q(Fraction(-5, 12), Fraction(1, 12), 33))),
    "M6": (((6, 24), (3, 18)), _q(Fraction(-3, 2), _HALF, 33), (_q(Fraction(9, 2), _HALF, 33), _q(15, 3, 33)),
           (_q(1, Fraction(-1, 6), 33), _q(Fraction(-5, 12), Fraction(1, 12), 33))),
    "M7": (((3, 6), (3, 0)), _q(Fraction(-3, 2), _HALF, 33), (_q(Fraction(3, 2), _HALF, 33), _q(6)),
           (_q(Fraction(-3, 12), Fraction(1, 12), 33), _q(Fraction(7, 12), Fraction(-1, 12), 33))),
}

PRYM211_MATRIX = (((0, 6), (3, 3)), _q(_HALF, Fraction(1, 6), 33),
                  (_q(Fraction(9, 2), Fraction(3, 2), 33), _q(Fraction(21, 2), Fraction(3, 2), 33)),
                  (_q(Fraction(-3, 36), Fraction(1, 36), 33), _q(Fraction(1, 3))))

# The printed value of w(Z1) for the Prym(2,1,1) geometry; it fails the width identities.
PRYM211_PRINTED_WZ1 = _q(Fraction(9, 2), Fraction(1, 2), 33)

# Arithmetic surfaces of the diagram studied in detail, per matrix.
SD4_SURFACES = {"M1": 228, "M2": 32, "M3": 336, "M4": 180, "M5": 24, "M6": 0, "M7": 0}
SD4_ADMISSIBLE_M1 = 6

# (w, h, t, e) and slit of the prototypes of that diagram, per matrix.
SD4_PROTOTYPES = {
    "M1": [((4, 1, 0, 0), _q(_HALF, Fraction(1, 3), 2)),
           ((12, 3, 1, 0), _q(_HALF, Fraction(1, 3), 2)),
           ((12, 3, 2, 0), _q(_HALF, Fraction(1, 3), 2))],
    "M2": [((4, 1, 0, -4), _q(Fraction(2, 3), Fraction(1, 6), 3)),
           ((12, 3, 1, -12), _q(Fraction(2, 3), Fraction(1, 6), 3)),
           ((12, 3, 2, -12), _q(Fraction(2, 3), Fraction(1, 6), 3))],
    "M3": [((4, 1, 0, 4), _q(0, Fraction(1, 6), 3)),
           ((12, 3, 1, 12), _q(0, Fraction(1, 6), 3)),
           ((12, 3, 2, 12), _q(0, Fraction(1, 6), 3))],
    "M4": [((6, 9, 1, 0), _q(Fraction(1, 3), Fraction(1, 18), 3)),
           ((6, 9, 1, 0), _q(Fraction(1, 3), Fraction(-1, 18), 3)),
           ((6, 9, 2, 0), _q(Fraction(1, 3), Fraction(1, 18), 3)),
           ((6, 9, 2, 0), _q(Fraction(1, 3), Fraction(-1, 18), 3)),
           ((12, 18, 1, 0), _q(Fraction(1, 6), Fraction(1, 6), 3)),
           ((12, 18, 5, 0), _q(Fraction(1, 6), Fraction(1, 6), 3))],
    "M5": [],
    "M6": [],
    "M7": [],
}

# (arithmetic surfaces, candidates) per matrix and published diagram column.
ALGO_CELLS = {
    "M1": {1: (520, 12), 2: (176, 1), 4: (228, 3), 5: (342, 4)},
    "M2": {1: (108, 8), 2: (63, 0), 4: (32, 3), 5: (88, 0)},
    "M3": {3: (23, 0), 4: (336, 3), 5: (290, 8), 6: (186, 3)},
    "M4": {3: (0, 0), 4: (180, 6), 5: (48, 0), 6: (214, 8)},
    "M5": {4: (24, 0), 6: (124, 7), 7: (392, 18), 8: (210, 20)},
    "M6": {3: (0, 0), 4: (0, 0), 5: (0, 0), 6: (0, 0)},
    "M7": {4: (0, 0), 5: (0, 0)},
}
ALGO_DIAGRAM_TOTALS = (20, 1, 0, 15, 12, 18, 18, 20)
ALGO_SD4_COLUMN = 4
PRYM22_BOUND = 92
TWIST_ZERO_EXCLUSIONS = 3
TRACE_FIELDS = {2, 3, 33}


def _full_set(representatives: Iterable[Tuple[int, int, int, QuadElt]]) -> Set[Tuple[int, int, int, QuadElt]]:
    out = set()
    for N, eXY, eU, r in representatives:
        out.add((N, eXY, eU, r))
        out.add((N, N - eXY, N - eU, r))
    return out


def expected_solutions(stratum: Stratum) -> Set[Tuple[int, int, int, QuadElt]]:
    reps = PRYM211_REPRESENTATIVES if stratum is Stratum.PRYM211 else PRYM22_REPRESENTATIVES
    return _full_set(reps)


def matrix_name(rows: Sequence[Sequence[int]]) -> str:
    """Published name of a Prym(2,2) reduced matrix, or its rows as text."""
    key = tuple(tuple(r) for r in rows)
    for name, data in PRYM22_MATRICES.items():
        if data[0] == key:
            return name
    return str([list(r) for r in rows])


def _raise(what: str, problems: List[str]) -> None:
    if problems:
        logger.warning("Regression mismatch", table=what, mismatches=len(problems))
        raise RegressionMismatch(f"{what} disagrees with the published table", problems)


def compare_solutions(stratum: Stratum, solutions: Sequence[RelationSolution]) -> None:
    found = {(s.N, s.eXY, s.eU, s.r) for s in solutions}
    wanted = expected_solutions(stratum)
    problems = [f"missing {t[:3]} r={t[3]}" for t in sorted(wanted - found, key=str)]
    problems += [f"unexpected {t[:3]} r={t[3]}" for t in sorted(found - wanted, key=str)]
    if len(solutions) != SOLUTION_COUNTS[stratum]:
        problems.append(f"{len(solutions)} solutions, expected {SOLUTION_COUNTS[stratum]}")
    _raise(f"{stratum.label} solutions", problems)


def compare_geometries(stratum: Stratum, geometries: Sequence[GeometryPair]) -> None:
    problems = []
    if stratum is Stratum.PRYM211:
        rows, r2, wZ, hZ = PRYM211_MATRIX
        wanted = {(rows, r2, wZ, hZ)}
    else:
        wanted = {data for data in PRYM22_MATRICES.values()}
    found = {(tuple(tuple(r) for r in g.mred.rows()), g.r2, (g.wZ1, g.wZ2), (g.hZ1, g.hZ2)) for g in geometries}
    for rows, r2, wZ, hZ in sorted(wanted - found, key=str):
        problems.append(f"missing matrix {[list(r) for r in rows]} r2={r2} wZ=({wZ[0]}, {wZ[1]})")
    for rows, r2, wZ, hZ in sorted(found - wanted, key=str):
        problems.append(f"unexpected matrix {[list(r) for r in rows]} r2={r2} wZ=({wZ[0]}, {wZ[1]})")
    if stratum is Stratum.PRYM211:
        if len(geometries) != 1:
            problems.append(f"{len(geometries)} geometries, expected exactly one")
        for g in geometries:
            if g.wZ1 != PRYM211_PRINTED_WZ1:
                logger.warning("Printed w(Z1) differs from the derived value", printed=str(PRYM211_PRINTED_WZ1),
                               derived=str(g.wZ1), printed_satisfies_identities=False)
    _raise(f"{stratum.label} geometries", problems)


def _cells_by_matrix(report: CandidateReport) -> Dict[str, List[Tuple[int, int]]]:
    cells: Dict[str, List[Tuple[int, int]]] = {}
    for c in report.cells:
        cells.setdefault(matrix_name(c.mred), []).append(
            (c.arithmetic_surfaces, c.prototype_classes + c.unnormalizable))
    return cells


def compare_sd4(report: CandidateReport, sd4_index: int) -> None:
    """Surface counts and prototypes of the diagram studied in detail."""
    problems = []
    for c in report.cells:
        if c.diagram != sd4_index:
            continue
        name = matrix_name(c.mred)
        if name in SD4_SURFACES and c.arithmetic_surfaces != SD4_SURFACES[name]:
            problems.append(f"{name}: {c.arithmetic_surfaces} surfaces, expected {SD4_SURFACES[name]}")
        if name == "M1" and c.admissible != SD4_ADMISSIBLE_M1:
            problems.append(f"M1: {c.admissible} admissible surfaces, expected {SD4_ADMISSIBLE_M1}")
    for name, expected in SD4_PROTOTYPES.items():
        found: Counter = Counter()
        for cand in report.candidates:
            p = cand.prototype
            if cand.diagram == sd4_index and matrix_name(cand.mred) == name and p is not None:
                found[((p.w, p.h, p.t, p.e), p.slit.value())] += 1
        if found != Counter(expected):
            problems.append(f"{name}: prototypes {sorted(map(str, found))}, expected {sorted(map(str, expected))}")
    _raise("SD4 table", problems)


def _columns(report: CandidateReport) -> Tuple[Dict[int, int], Dict[int, int]]:
    """Candidates per diagram before and after the commensurability filter."""
    before: Dict[int, int] = {}
    after: Dict[int, int] = {}
    for c in report.cells:
        before[c.diagram] = before.get(c.diagram, 0) + c.prototype_classes + c.unnormalizable
        after[c.diagram] = after.get(c.diagram, 0) + c.after_commensurability
    return before, after


def published_after_filter() -> List[int]:
    """Published column totals with the twist-zero exclusions taken out of the SD4 column."""
    totals = list(ALGO_DIAGRAM_TOTALS)
    totals[ALGO_SD4_COLUMN - 1] -= TWIST_ZERO_EXCLUSIONS
    return totals


def compare_report(report: CandidateReport, sd4_index: Optional[int] = None) -> None:
    """
    Candidate totals per diagram column, before and after the commensurability filter.

    Columns are matched up to order. The filter must remove exactly
    ``TWIST_ZERO_EXCLUSIONS`` candidates from the SD4 column and nothing
    from any other column. ``sd4_index`` defaults to the enumerated SD4 shape.
    """
    problems = []
    if report.stratum is Stratum.PRYM211:
        if report.total_after_filter != 0:
            problems.append(f"{report.total_after_filter} candidates remain, expected none")
        _raise("Prym(2,1,1) candidates", problems)
        return

    if sd4_index is None:
        sd4 = sd4_diagram()
        if sd4 is None:
            raise RegressionMismatch("Prym(2,2) candidates disagree with the published table",
                                     ["no diagram has the SD4 shape"])
        sd4_index = sd4.index

    if sorted(report.per_diagram_totals) != sorted(ALGO_DIAGRAM_TOTALS):
        problems.append(f"per-diagram totals {report.per_diagram_totals}, expected {list(ALGO_DIAGRAM_TOTALS)} "
                        "up to order")
    cells = _cells_by_matrix(report)
    for name, published in ALGO_CELLS.items():
        want = sorted(v for v in published.values() if v[0])
        got = sorted(v for v in cells.get(name, []) if v[0])
        if got != want:
            problems.append(f"{name}: cells {got}, expected {want}")

    before, after = _columns(report)
    sd4_published = ALGO_DIAGRAM_TOTALS[ALGO_SD4_COLUMN - 1]
    if before.get(sd4_index, 0) != sd4_published:
        problems.append(f"SD{sd4_index}: {before.get(sd4_index, 0)} candidates before filtering, "
                        f"expected {sd4_published}")
    for diagram in sorted(set(before) | {sd4_index}):
        dropped = before.get(diagram, 0) - after.get(diagram, 0)
        wanted = TWIST_ZERO_EXCLUSIONS if diagram == sd4_index else 0
        if dropped != wanted:
            problems.append(f"SD{diagram}: commensurability filter removed {dropped}, expected {wanted}")
    columns = [after.get(d, 0) for d in sorted(before)]
    columns += [0] * (len(report.per_diagram_totals) - len(columns))
    if sorted(columns) != sorted(published_after_filter()):
        problems.append(f"per-diagram totals after filtering {columns}, expected {published_after_filter()} "
                        "up to order")
    if sum(columns) != report.total_after_filter:
        problems.append(f"total after filtering {report.total_after_filter}, columns sum to {sum(columns)}")
    if report.total_after_filter > PRYM22_BOUND:
        logger.warning("Candidate total above the published bound", total=report.total_after_filter,
                       bound=PRYM22_BOUND)
    if not set(report.trace_fields) <= TRACE_FIELDS:
        problems.append(f"trace fields {report.trace_fields} outside {sorted(TRACE_FIELDS)}")
    _raise("Prym(2,2) candidates", problems)
