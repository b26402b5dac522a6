"""
Tests for the comparison against published candidate tables.
"""

import pytest

from prymcurves.core.exceptions import RegressionMismatch
from prymcurves.core.models import CandidateReport, CellCount, Stratum
from prymcurves.core.reference_tables import (
    ALGO_CELLS,
    PRYM22_MATRICES,
    compare_report,
    published_after_filter,
)

# The three twist-zero prototypes of the SD4 column sit in M1, M2 and M3.
TWIST_ZERO = {("M1", 4): 1, ("M2", 4): 1, ("M3", 4): 1}


def published_report(drops):
    """A Prym(2,2) report with the published cells, columns numbered as printed."""
    cells = []
    for name, columns in ALGO_CELLS.items():
        rows = [list(r) for r in PRYM22_MATRICES[name][0]]
        for column, (surfaces, candidates) in columns.items():
            cells.append(CellCount(mred=rows, diagram=column, arithmetic_surfaces=surfaces, admissible=candidates,
                                   prototype_classes=candidates, unnormalizable=0,
                                   after_commensurability=candidates - drops.get((name, column), 0)))
    totals = [sum(c.prototype_classes for c in cells if c.diagram == d) for d in range(1, 9)]
    return CandidateReport(
        stratum=Stratum.PRYM22,
        cells=cells,
        per_diagram_totals=totals,
        total_before_filter=sum(totals),
        total_after_filter=sum(c.after_commensurability for c in cells),
        trace_fields=[2, 3, 33],
    )


class TestCompareReport:
    def test_published_columns_after_filter(self):
        assert published_after_filter() == [20, 1, 0, 12, 12, 18, 18, 20]

    def test_twist_zero_drop_in_sd4_passes(self):
        """Three exclusions, all in the SD4 column, match the table."""
        report = published_report(TWIST_ZERO)
        assert report.total_after_filter == 101
        compare_report(report, sd4_index=4)

    def test_drop_outside_sd4_is_rejected(self):
        """The same total dropped partly from another column is a mismatch."""
        report = published_report({("M1", 4): 1, ("M2", 4): 1, ("M1", 1): 1})
        assert report.total_before_filter - report.total_after_filter == 3
        with pytest.raises(RegressionMismatch) as info:
            compare_report(report, sd4_index=4)
        assert "SD1: commensurability filter removed 1, expected 0" in info.value.mismatches
        assert "SD4: commensurability filter removed 2, expected 3" in info.value.mismatches

    def test_extra_drop_is_rejected(self):
        """Removing more than the three twist-zero cases from SD4 is a mismatch."""
        report = published_report({**TWIST_ZERO, ("M4", 4): 1})
        with pytest.raises(RegressionMismatch) as info:
            compare_report(report, sd4_index=4)
        assert "SD4: commensurability filter removed 4, expected 3" in info.value.mismatches

    def test_no_drop_is_rejected(self):
        with pytest.raises(RegressionMismatch) as info:
            compare_report(published_report({}), sd4_index=4)
        assert "SD4: commensurability filter removed 0, expected 3" in info.value.mismatches

    def test_sd4_column_must_hold_fifteen(self):
        """The column named as SD4 must be the one with 15 candidates."""
        with pytest.raises(RegressionMismatch) as info:
            compare_report(published_report(TWIST_ZERO), sd4_index=5)
        assert "SD5: 12 candidates before filtering, expected 15" in info.value.mismatches

    def test_prym211_needs_empty_report(self):
        compare_report(CandidateReport(stratum=Stratum.PRYM211))
        with pytest.raises(RegressionMismatch):
            compare_report(CandidateReport(stratum=Stratum.PRYM211, total_after_filter=1))
