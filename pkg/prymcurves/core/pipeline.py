"""
The full search for one stratum: torsion solutions, cusp geometries,
arithmetic surfaces per separatrix diagram, admissible vertical directions,
prototypes and the commensurability filter.
"""

import json
from collections import OrderedDict
from typing import Dict, List, Optional, Sequence, Tuple

from .cuspgeom import GeometryPair, ReducedMatrix, enumerate_geometries
from .exceptions import IdentityCheckFailed, NormalizationError
from .flatsurface import (admissible_squares, compute_prototype, moduli_commensurability_check,
                          normalized_surface, realize_surface)
from .logger import PerformanceLogger, get_logger
from .models import (CandidateRecord, CandidateReport, CellCount, EnumerationOptions, GeometryRecord,
                     PipelineOptions, SolutionRecord, SolverOptions, Stratum, dumps)
from .origami import Origami, enumerate_arithmetic_surfaces
from .rou_solver import RelationSolution, enumerate_solutions, verify_resultant_identity
from .separatrix import SeparatrixDiagram, diagram_by_index, enumerate_separatrix_diagrams
from .stage_cache import StageCache

logger = get_logger("prymcurves.Pipeline")

PUBLISHED_BOUND = {Stratum.PRYM22: 92, Stratum.PRYM211: 0}


# ---------------------------------------------------------------------------
# Stage payloads
# ---------------------------------------------------------------------------

def solutions_payload(solutions: Sequence[RelationSolution]) -> str:
    return dumps([s.to_record() for s in solutions])


def load_solutions(text: str) -> List[RelationSolution]:
    return [RelationSolution.from_record(SolutionRecord.model_validate(item)) for item in json.loads(text)]


def geometries_payload(geometries: Sequence[GeometryPair]) -> str:
    return dumps([g.to_record() for g in geometries])


def load_geometries(text: str) -> List[GeometryPair]:
    return [GeometryPair.from_record(GeometryRecord.model_validate(item)) for item in json.loads(text)]


def group_by_matrix(geometries: Sequence[GeometryPair]) -> "OrderedDict[ReducedMatrix, List[GeometryPair]]":
    groups: "OrderedDict[ReducedMatrix, List[GeometryPair]]" = OrderedDict()
    for g in sorted(geometries, key=GeometryPair.sort_key):
        groups.setdefault(g.mred, []).append(g)
    return groups


# ---------------------------------------------------------------------------
# One (matrix, diagram) cell
# ---------------------------------------------------------------------------

def admissible_pairs(stratum: Stratum, surfaces: Sequence[Origami],
                     geometries: Sequence[GeometryPair]) -> List[Tuple[Origami, GeometryPair]]:
    """Each surface with the first geometry whose crossing it realizes."""
    pairs = []
    for o in surfaces:
        for g in geometries:
            if admissible_squares(o, stratum, g.crossing):
                pairs.append((o, g))
                break
    return pairs


def analyze_cell(stratum: Stratum, diagram: SeparatrixDiagram, mred: ReducedMatrix,
                 geometries: Sequence[GeometryPair], jobs: int = 1,
                 progress: bool = False) -> Tuple[CellCount, List[CandidateRecord]]:
    """
    Count arithmetic surfaces, admissible ones and distinct (prototype, slit)
    classes for one cell. Surfaces without a prototype normalization are kept
    as separate candidates, one per isomorphism class.
    """
    log = logger.bind(diagram=diagram.label(), mred=str(mred))
    surfaces = enumerate_arithmetic_surfaces(diagram, mred, jobs=jobs, progress=progress)
    pairs = admissible_pairs(stratum, surfaces, geometries)

    classes: Dict[tuple, CandidateRecord] = {}
    failures: Dict[tuple, CandidateRecord] = {}
    for o, g in pairs:
        fs = realize_surface(o, g)
        base = dict(mred=mred.rows(), diagram=diagram.index, trace_field=g.D0, origami=o.to_record())
        try:
            proto = compute_prototype(fs)
        except NormalizationError as e:
            key = (o.canonical_key(), g.D0)
            if key not in failures:
                log.debug("Surface has no prototype normalization", error=str(e))
                failures[key] = CandidateRecord(**base, normalization_error=str(e))
            continue
        if proto.key() in classes:
            continue
        if not proto.lambda_below_w:
            log.warning("Prototype violates lambda < w", prototype=str(proto), D=proto.D)
        twist_zero = proto.t == 0
        commensurable = moduli_commensurability_check(normalized_surface(fs, proto)) if twist_zero else None
        classes[proto.key()] = CandidateRecord(**base, prototype=proto.to_record(), twist_zero=twist_zero,
                                               commensurable=commensurable)

    candidates = list(classes.values()) + list(failures.values())
    kept = sum(1 for c in candidates if c.commensurable is not False)
    cell = CellCount(mred=mred.rows(), diagram=diagram.index, arithmetic_surfaces=len(surfaces),
                     admissible=len(pairs), prototype_classes=len(classes), unnormalizable=len(failures),
                     after_commensurability=kept)
    if surfaces:
        log.info("Cell finished", surfaces=len(surfaces), admissible=len(pairs), classes=len(classes),
                 unnormalizable=len(failures), kept=kept)
    return cell, candidates


# ---------------------------------------------------------------------------
# Stages
# ---------------------------------------------------------------------------

def solve_stage(stratum: Stratum, options: Optional[SolverOptions] = None,
                cache: Optional[StageCache] = None) -> List[RelationSolution]:
    options = options or SolverOptions()
    params = {"stratum": stratum.value, "prefilter": options.prefilter,
              "galois_reduction": options.galois_reduction, "fields": options.fields}

    def compute() -> str:
        return solutions_payload(enumerate_solutions(stratum, options))

    if cache is None:
        return load_solutions(compute())
    return load_solutions(cache.get_or_compute("solve", params, compute))


def geometry_stage(stratum: Stratum, solutions: Sequence[RelationSolution], jobs: int = 1,
                   cache: Optional[StageCache] = None, progress: bool = False) -> List[GeometryPair]:
    upstream = solutions_payload(solutions)

    def compute() -> str:
        return geometries_payload(enumerate_geometries(stratum, solutions, jobs=jobs, progress=progress))

    if cache is None:
        return load_geometries(compute())
    return load_geometries(cache.get_or_compute("geometry", {"stratum": stratum.value}, compute, upstream))


def enumerate_stage(stratum: Stratum, geometries: Sequence[GeometryPair],
                    options: Optional[EnumerationOptions] = None) -> CandidateReport:
    """Per-cell counts and candidates for every (matrix, diagram) pair."""
    options = options or EnumerationOptions()
    diagrams = enumerate_separatrix_diagrams(stratum)
    if options.diagram:
        diagrams = [diagram_by_index(stratum, options.diagram)]
    groups = group_by_matrix(g for g in geometries if g.stratum is stratum)

    cells: List[CellCount] = []
    candidates: List[CandidateRecord] = []
    with PerformanceLogger(logger.bind(stratum=stratum.value), "candidate enumeration"):
        for mred, members in groups.items():
            for diagram in diagrams:
                cell, found = analyze_cell(stratum, diagram, mred, members, jobs=options.jobs,
                                           progress=options.progress)
                cells.append(cell)
                candidates.extend(found)
    return build_report(stratum, diagrams, cells, candidates)


def build_report(stratum: Stratum, diagrams: Sequence[SeparatrixDiagram], cells: Sequence[CellCount],
                 candidates: Sequence[CandidateRecord]) -> CandidateReport:
    index = {d.index: k for k, d in enumerate(diagrams)}
    totals = [0] * len(diagrams)
    for cell in cells:
        totals[index[cell.diagram]] += cell.prototype_classes + cell.unnormalizable
    before = sum(totals)
    after = sum(cell.after_commensurability for cell in cells)
    fields = sorted({c.trace_field for c in candidates if c.commensurable is not False})

    notes = []
    shrunk = [f"{c.mred} SD{c.diagram}: {c.prototype_classes + c.unnormalizable} -> {c.after_commensurability}"
              for c in cells if c.after_commensurability < c.prototype_classes + c.unnormalizable]
    if shrunk:
        notes.append("commensurability filter removed candidates in " + "; ".join(shrunk))
    bound = PUBLISHED_BOUND[stratum]
    if after > bound:
        notes.append(f"{after} candidates remain, above the published bound {bound}")
        logger.warning("Candidate total above published bound", stratum=stratum.value, total=after, bound=bound)
    else:
        notes.append(f"{after} candidates remain, published bound {bound}")
    unnormalizable = sum(c.unnormalizable for c in cells)
    if unnormalizable:
        notes.append(f"{unnormalizable} candidates have no prototype normalization and are counted as classes")

    ordered = sorted(candidates, key=lambda c: (c.trace_field, c.mred, c.diagram, c.prototype is None,
                                                 dumps(c)))
    return CandidateReport(
        stratum=stratum,
        diagram_keys=[d.describe() for d in diagrams],
        cells=list(cells),
        candidates=ordered,
        per_diagram_totals=totals,
        total_before_filter=before,
        total_after_filter=after,
        trace_fields=fields,
        notes=notes,
    )


def run_pipeline(stratum: Stratum, options: Optional[PipelineOptions] = None,
                 cache: Optional[StageCache] = None) -> CandidateReport:
    """
    Run every stage for a stratum. Stage outputs go through ``cache`` when
    one is given; the enumeration stage is cached on the geometry payload.
    """
    options = options or PipelineOptions(stratum=stratum)
    log = logger.bind(stratum=stratum.value)
    if options.with_identity_check and not verify_resultant_identity(stratum):
        raise IdentityCheckFailed(f"resultant identity fails for {stratum.label}")

    with PerformanceLogger(log, "pipeline"):
        solutions = solve_stage(stratum, SolverOptions(jobs=options.jobs, progress=options.progress), cache)
        log.info("Solutions", count=len(solutions))
        geometries = geometry_stage(stratum, solutions, jobs=options.jobs, cache=cache, progress=options.progress)
        log.info("Geometries", count=len(geometries), matrices=len(group_by_matrix(geometries)))

        enum_options = EnumerationOptions(jobs=options.jobs, progress=options.progress)

        def compute() -> str:
            return dumps(enumerate_stage(stratum, geometries, enum_options))

        if cache is None:
            report = CandidateReport.model_validate_json(compute())
        else:
            text = cache.get_or_compute("enumerate", {"stratum": stratum.value}, compute,
                                        geometries_payload(geometries))
            report = CandidateReport.model_validate_json(text)

    log.info("Pipeline finished", before=report.total_before_filter, after=report.total_after_filter,
             per_diagram=report.per_diagram_totals, trace_fields=report.trace_fields)
    return report
