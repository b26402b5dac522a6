#!/usr/bin/env python3
"""
prymcurves command line

Runs the stages of the Teichmüller curve search one at a time or chained,
writes canonical JSON and renders the tables.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from dotenv import load_dotenv

from ..core import reference_tables
from ..core.exceptions import InvalidInputError, PrymCurvesError, UpstreamMissing
from ..core.logger import get_logger, setup_logging
from ..core.models import (CandidateReport, EnumerationOptions, OutputFormat, PipelineOptions, SolverOptions,
                           Stratum, dumps)
from ..core.pipeline import (enumerate_stage, geometries_payload, geometry_stage, load_geometries,
                             load_solutions, run_pipeline, solutions_payload, solve_stage)
from ..core.render import (TABLES, algo_table, cache_table, format_table, matrices_table, render, sd4_table,
                           solutions_table)
from ..core.rou_solver import check_identities, order_set_report
from ..core.separatrix import sd4_diagram
from ..core.stage_cache import StageCache

logger = get_logger("prymcurves.CLI")

EXAMPLES = """
Examples:
  prymcurves solve --stratum 2-2 --out solutions.json      # Torsion solutions
  prymcurves solve --stratum 2-2 --fields 6 --format md     # Only the trace field Q(sqrt 6)
  prymcurves geometry --stratum 2-2 --solutions solutions.json   # Reduced matrices
  prymcurves enumerate --stratum 2-2 --geometries geo.json --diagram 4
  prymcurves pipeline --stratum 2-1-1 --assert-paper        # Whole search, checked against the tables
  prymcurves render --table algo --input report.json --format md
  prymcurves cache list --stage enumerate               # Cached stage outputs
"""


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", help="Output file (default: stdout)")
    parser.add_argument("--format", choices=[f.value for f in OutputFormat], default="json",
                        help="Output format (default: json)")
    parser.add_argument("--log-level", choices=["debug", "info", "warning", "error", "critical"],
                        default="warning", help="Log level (default: warning)")
    parser.add_argument("--log-json", action="store_true", help="Emit log lines as JSON")
    parser.add_argument("--log-file", default=None, help="Also write log lines to this file")


def _add_stratum(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--stratum", required=True, choices=[s.value for s in Stratum],
                        help="Prym locus: 2-1-1 or 2-2")


def _add_jobs(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--jobs", type=int, default=1, help="Worker processes (default: 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prymcurves",
        description="Search for primitive Teichmüller curves in Prym(2,1,1) and Prym(2,2)",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=EXAMPLES,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="Solve the torsion equations in roots of unity")
    _add_stratum(solve)
    _add_jobs(solve)
    _add_common(solve)
    solve.add_argument("--no-prefilter", action="store_true", help="Solve every pair exactly")
    solve.add_argument("--galois-reduction", action="store_true",
                       help="Solve only e_XY | N and expand Galois orbits")
    solve.add_argument("--fields", type=int, nargs="+", help="Keep only these trace fields D0")
    solve.add_argument("--assert-paper", action="store_true", help="Compare with the published table")
    solve.add_argument("--with-identity-check", action="store_true", help="Verify the resultant identity first")

    geometry = sub.add_parser("geometry", help="Cusp geometries and reduced intersection matrices")
    _add_stratum(geometry)
    _add_jobs(geometry)
    _add_common(geometry)
    geometry.add_argument("--solutions", "--input", dest="solutions", required=True,
                          help="Solutions JSON from the solve stage")
    geometry.add_argument("--assert-paper", action="store_true", help="Compare with the published matrices")

    enum = sub.add_parser("enumerate", help="Arithmetic surfaces, admissibility and prototypes")
    _add_stratum(enum)
    _add_jobs(enum)
    _add_common(enum)
    enum.add_argument("--geometries", required=True, help="Geometries JSON from the geometry stage")
    enum.add_argument("--diagram", default="ALL", help="Diagram index or ALL (default: ALL)")

    pipeline = sub.add_parser("pipeline", help="Run every stage with cached intermediate results")
    _add_stratum(pipeline)
    _add_jobs(pipeline)
    _add_common(pipeline)
    pipeline.add_argument("--cache-dir", help="Cache directory (default: $PRYMCURVES_CACHE_DIR or .prymcurves-cache)")
    pipeline.add_argument("--assert-paper", action="store_true", help="Compare every stage with the published tables")
    pipeline.add_argument("--with-identity-check", action="store_true", help="Verify the resultant identity first")
    pipeline.add_argument("--progress", action="store_true", help="Show progress bars")

    rend = sub.add_parser("render", help="Render a table from stage output")
    _add_common(rend)
    rend.add_argument("--table", required=True, choices=TABLES, help="Table to render")
    rend.add_argument("--input", required=True, help="JSON produced by solve, geometry, enumerate or pipeline")
    rend.add_argument("--diagram", type=int, help="Diagram index for the sd4 table (default: the SD4 shape)")

    cache = sub.add_parser("cache", help="Inspect or prune the stage cache")
    _add_common(cache)
    cache.add_argument("action", choices=["list", "stats", "clear", "delete"], help="What to do with the cache")
    cache.add_argument("--cache-dir", help="Cache directory (default: $PRYMCURVES_CACHE_DIR or .prymcurves-cache)")
    cache.add_argument("--stage", help="Restrict to one stage (solve, geometry or enumerate)")
    cache.add_argument("--key", help="Entry hash, for delete")
    return parser


def _read(path: str) -> str:
    p = Path(path)
    if not p.exists():
        raise UpstreamMissing(f"input file {path} does not exist")
    return p.read_text(encoding="utf-8")


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        logger.info("Wrote output", path=str(path), bytes=len(text))
    else:
        sys.stdout.write(text)


def _banner(title: str, lines: List[str]) -> None:
    print("=" * 60, file=sys.stderr)
    print(title, file=sys.stderr)
    print("=" * 60, file=sys.stderr)
    for line in lines:
        print(line, file=sys.stderr)
    print("=" * 60, file=sys.stderr)


def cmd_solve(args: argparse.Namespace) -> int:
    stratum = Stratum(args.stratum)
    if args.with_identity_check:
        check_identities([stratum])
    logger.info("Order sets", **{k: v[:12] for k, v in order_set_report().items()})
    options = SolverOptions(jobs=args.jobs, prefilter=not args.no_prefilter,
                            galois_reduction=args.galois_reduction, fields=args.fields)
    solutions = solve_stage(stratum, options)
    if args.assert_paper:
        reference_tables.compare_solutions(stratum, solutions)
    fmt = OutputFormat(args.format)
    text = solutions_payload(solutions) if fmt is OutputFormat.JSON else format_table(solutions_table(solutions), fmt)
    _emit(text, args.out)
    _banner(f"{stratum.label}: {len(solutions)} solutions",
            [f"Trace fields: {sorted({s.D0 for s in solutions})}"])
    return 0


def cmd_geometry(args: argparse.Namespace) -> int:
    stratum = Stratum(args.stratum)
    solutions = load_solutions(_read(args.solutions))
    geometries = geometry_stage(stratum, solutions, jobs=args.jobs)
    if args.assert_paper:
        reference_tables.compare_geometries(stratum, geometries)
    fmt = OutputFormat(args.format)
    text = geometries_payload(geometries) if fmt is OutputFormat.JSON else format_table(matrices_table(geometries), fmt)
    _emit(text, args.out)
    _banner(f"{stratum.label}: {len(geometries)} geometries",
            [f"Reduced matrices: {len({g.mred for g in geometries})}"])
    return 0


def cmd_enumerate(args: argparse.Namespace) -> int:
    stratum = Stratum(args.stratum)
    geometries = load_geometries(_read(args.geometries))
    if str(args.diagram).upper() == "ALL":
        diagram = None
    else:
        try:
            diagram = int(args.diagram)
        except ValueError:
            raise InvalidInputError(f"--diagram must be an index or ALL, got {args.diagram!r}")
    report = enumerate_stage(stratum, geometries, EnumerationOptions(jobs=args.jobs, diagram=diagram))
    _emit_report(report, args)
    return 0


def _emit_report(report: CandidateReport, args: argparse.Namespace) -> None:
    fmt = OutputFormat(args.format)
    if fmt is OutputFormat.JSON:
        text = dumps(report)
    else:
        text = format_table(algo_table(report), fmt)
        sd4 = sd4_diagram() if report.stratum is Stratum.PRYM22 else None
        if sd4 is not None and any(c.diagram == sd4.index for c in report.cells):
            text += "\n" + format_table(sd4_table(report, sd4.index), fmt)
    _emit(text, args.out)
    _banner(f"{report.stratum.label}: candidate report", [
        f"Per diagram: {report.per_diagram_totals}",
        f"Before filter: {report.total_before_filter}",
        f"After filter: {report.total_after_filter}",
        f"Trace fields: {report.trace_fields}",
    ] + [f"Note: {n}" for n in report.notes])


def cmd_pipeline(args: argparse.Namespace) -> int:
    stratum = Stratum(args.stratum)
    cache = StageCache(args.cache_dir)
    options = PipelineOptions(stratum=stratum, jobs=args.jobs, cache_dir=str(cache.cache_dir),
                              with_identity_check=args.with_identity_check, progress=args.progress)
    report = run_pipeline(stratum, options, cache)
    if args.assert_paper:
        solutions = solve_stage(stratum, SolverOptions(jobs=args.jobs), cache)
        reference_tables.compare_solutions(stratum, solutions)
        reference_tables.compare_geometries(stratum, geometry_stage(stratum, solutions, args.jobs, cache))
        if stratum is Stratum.PRYM22:
            sd4 = sd4_diagram()
            if sd4 is None:
                raise InvalidInputError("no diagram has the SD4 shape")
            reference_tables.compare_report(report, sd4.index)
            reference_tables.compare_sd4(report, sd4.index)
        else:
            reference_tables.compare_report(report)
    _emit_report(report, args)
    stats = cache.get_stats()["cache"]
    print(f"cache: hits={stats['cache_hits']} misses={stats['cache_misses']} "
          f"hit_rate={stats['cache_hit_rate']:.2f}", file=sys.stderr)
    return 0


def cmd_render(args: argparse.Namespace) -> int:
    data = json.loads(_read(args.input))
    fmt = OutputFormat(args.format)
    if args.table == "solutions":
        text = render("solutions", fmt, solutions=load_solutions(json.dumps(data)))
    elif args.table == "matrices":
        text = render("matrices", fmt, geometries=load_geometries(json.dumps(data)))
    else:
        report = CandidateReport.model_validate(data)
        diagram = args.diagram
        if args.table == "sd4" and diagram is None:
            sd4 = sd4_diagram()
            if sd4 is None:
                raise InvalidInputError("no diagram has the SD4 shape; pass --diagram")
            diagram = sd4.index
        text = render(args.table, fmt, report=report, diagram=diagram)
    _emit(text, args.out)
    return 0


def cmd_cache(args: argparse.Namespace) -> int:
    cache = StageCache(args.cache_dir)
    fmt = OutputFormat(args.format)
    if args.action == "list":
        entries = cache.list_entries(args.stage)
        _emit(dumps(entries) if fmt is OutputFormat.JSON else format_table(cache_table(entries), fmt), args.out)
    elif args.action == "stats":
        _emit(dumps(cache.get_stats()), args.out)
    elif args.action == "clear":
        removed = cache.clear(args.stage)
        _banner(f"cache {cache.cache_dir}", [f"Removed entries: {removed}"])
    else:
        if not (args.stage and args.key):
            raise InvalidInputError("cache delete needs --stage and --key")
        if not cache.delete_entry(args.stage, args.key):
            raise InvalidInputError(f"no cache entry {args.stage}/{args.key}")
        _banner(f"cache {cache.cache_dir}", [f"Removed {args.stage}/{args.key}"])
    return 0


COMMANDS = {
    "solve": cmd_solve,
    "geometry": cmd_geometry,
    "enumerate": cmd_enumerate,
    "pipeline": cmd_pipeline,
    "render": cmd_render,
    "cache": cmd_cache,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one command and return its exit status."""
    load_dotenv()
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(log_level=args.log_level, log_file=args.log_file, json_format=args.log_json)

    try:
        return COMMANDS[args.command](args)
    except PrymCurvesError as e:
        logger.error("Command failed", command=args.command, error_type=type(e).__name__)
        print(f"Error: {e}", file=sys.stderr)
        return e.exit_code
    except KeyboardInterrupt:
        print("\nStopped by user", file=sys.stderr)
        return 130


if __name__ == "__main__":
    sys.exit(main())
