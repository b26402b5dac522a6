"""
Tests for per-cell analysis, stage payloads and report assembly.
"""

import pytest

from prymcurves.core.models import CandidateReport, Stratum
from prymcurves.core.pipeline import (
    admissible_pairs,
    analyze_cell,
    build_report,
    geometries_payload,
    geometry_stage,
    group_by_matrix,
    load_geometries,
    load_solutions,
    solutions_payload,
)
from prymcurves.core.stage_cache import StageCache


@pytest.fixture
def analyzed(fixture_diagram, fixture_mred, fixture_geometry):
    return analyze_cell(Stratum.PRYM22, fixture_diagram, fixture_mred, [fixture_geometry])


class TestPayloads:
    """JSON payloads passed between stages."""

    def test_solutions(self, m1_solution):
        assert load_solutions(solutions_payload([m1_solution])) == [m1_solution]

    def test_geometries(self, fixture_geometry):
        assert load_geometries(geometries_payload([fixture_geometry])) == [fixture_geometry]

    def test_payload_is_canonical(self, m1_solution):
        """Sorted keys and a trailing newline make payloads byte-stable."""
        text = solutions_payload([m1_solution])
        assert text.endswith("\n")
        assert text == solutions_payload(load_solutions(text))

    def test_group_by_matrix(self, fixture_geometry, fixture_mred):
        groups = group_by_matrix([fixture_geometry, fixture_geometry])
        assert list(groups) == [fixture_mred]
        assert len(groups[fixture_mred]) == 2


class TestAnalyzeCell:
    """The hand-built cell: one surface, one admissible direction, one prototype."""

    def test_admissible_pairs(self, fixture_origami, fixture_geometry):
        pairs = admissible_pairs(Stratum.PRYM22, [fixture_origami], [fixture_geometry])
        assert pairs == [(fixture_origami, fixture_geometry)]

    def test_counts(self, analyzed):
        cell, _ = analyzed
        assert (cell.arithmetic_surfaces, cell.admissible, cell.prototype_classes,
                cell.unnormalizable, cell.after_commensurability) == (1, 1, 1, 0, 1)
        assert cell.mred == [[1, 2], [0, 2]]

    def test_candidate(self, analyzed):
        """Twist t = 1 leaves the commensurability filter out of play."""
        _, candidates = analyzed
        (cand,) = candidates
        assert (cand.prototype.w, cand.prototype.h, cand.prototype.t, cand.prototype.e) == (8, 2, 1, 0)
        assert cand.trace_field == 2
        assert cand.twist_zero is False
        assert cand.commensurable is None
        assert cand.normalization_error is None

    def test_no_geometry_no_candidates(self, fixture_diagram, fixture_mred):
        """Without a geometry nothing is admissible, but surfaces are still counted."""
        cell, candidates = analyze_cell(Stratum.PRYM22, fixture_diagram, fixture_mred, [])
        assert cell.arithmetic_surfaces == 1
        assert cell.admissible == 0
        assert candidates == []


class TestBuildReport:
    def test_totals(self, fixture_diagram, analyzed):
        cell, candidates = analyzed
        report = build_report(Stratum.PRYM22, [fixture_diagram], [cell], candidates)
        assert report.per_diagram_totals == [1]
        assert (report.total_before_filter, report.total_after_filter) == (1, 1)
        assert report.trace_fields == [2]
        assert report.notes == ["1 candidates remain, published bound 92"]

    def test_report_round_trip(self, fixture_diagram, analyzed):
        cell, candidates = analyzed
        report = build_report(Stratum.PRYM22, [fixture_diagram], [cell], candidates)
        assert CandidateReport.model_validate_json(report.model_dump_json()) == report

    def test_bound_exceeded(self, fixture_diagram, analyzed):
        """Prym(2,1,1) allows no candidates, so one is reported against the bound."""
        cell, candidates = analyzed
        report = build_report(Stratum.PRYM211, [fixture_diagram], [cell], candidates)
        assert "above the published bound 0" in report.notes[0]


class TestGeometryStage:
    def test_cached_rerun(self, tmp_path, m1_solution):
        """A second run with the same solutions reads the cached payload."""
        cache = StageCache(str(tmp_path))
        first = geometry_stage(Stratum.PRYM22, [m1_solution], cache=cache)
        second = geometry_stage(Stratum.PRYM22, [m1_solution], cache=cache)
        assert first == second
        stats = cache.get_stats()["cache"]
        assert (stats["cache_hits"], stats["cache_misses"], stats["cache_stores"]) == (1, 1, 1)
        assert all(g.crossing.value == "C2" for g in first)


@pytest.mark.paper
@pytest.mark.slow
class TestPublishedReports:
    """Full pipeline runs against the published candidate tables."""

    def test_prym211_has_no_candidates(self):
        from prymcurves.core.pipeline import run_pipeline
        from prymcurves.core.reference_tables import compare_report
        compare_report(run_pipeline(Stratum.PRYM211))

    def test_prym22_candidates(self):
        from prymcurves.core.pipeline import run_pipeline
        from prymcurves.core.reference_tables import compare_report, compare_sd4
        from prymcurves.core.separatrix import sd4_diagram
        report = run_pipeline(Stratum.PRYM22)
        compare_report(report, sd4_diagram().index)
        compare_sd4(report, sd4_diagram().index)
