"""
Tests for table rendering.
"""

import dataclasses
import json

import pytest

from prymcurves.core.exceptions import InvalidInputError
from prymcurves.core.models import OutputFormat, Stratum
from prymcurves.core.pipeline import analyze_cell, build_report
from prymcurves.core.render import algo_table, format_table, matrices_table, render, sd4_table, solutions_table


@pytest.fixture
def report(fixture_diagram, fixture_mred, fixture_geometry):
    diagram = dataclasses.replace(fixture_diagram, index=1)
    cell, candidates = analyze_cell(Stratum.PRYM22, diagram, fixture_mred, [fixture_geometry])
    return build_report(Stratum.PRYM22, [diagram], [cell], candidates)


class TestTables:
    def test_solutions(self, m1_solution):
        headers, rows = solutions_table([m1_solution])
        assert headers[:4] == ["N", "e_XY", "e_U", "r"]
        assert rows[0][:5] == ["12", "2", "3", "√2/2", "2"]

    def test_matrices_deduplicated(self, fixture_geometry):
        """One row per (matrix, r2, crossing)."""
        _, rows = matrices_table([fixture_geometry, fixture_geometry])
        assert len(rows) == 1
        assert rows[0][:4] == ["[[1, 2], [0, 2]]", "2", "√2/2", "C2"]

    def test_algo(self, report):
        """Cells read surfaces/classes, followed by the totals rows."""
        headers, rows = algo_table(report)
        assert headers == ["matrix", "SD1"]
        assert rows == [["[[1, 2], [0, 2]]", "1/1"], ["# candidates", "1"], ["after filter", "1"]]

    def test_sd4(self, report):
        _, rows = sd4_table(report, 1)
        assert rows == [["[[1, 2], [0, 2]]", "[[1, 2], [0, 2]]", "2", "1", "1", "(8,2,1,0)", "128", "1/2", "yes"]]


class TestFormats:
    TABLE = (["a", "bb"], [["1", "22"], ["333", "4"]])

    def test_markdown(self):
        assert format_table(self.TABLE, OutputFormat.MD) == (
            "| a   | bb |\n"
            "|-----|----|\n"
            "| 1   | 22 |\n"
            "| 333 | 4  |\n"
        )

    def test_csv(self):
        assert format_table(self.TABLE, OutputFormat.CSV) == "a,bb\n1,22\n333,4\n"

    def test_json(self):
        assert json.loads(format_table(self.TABLE, OutputFormat.JSON)) == {
            "headers": ["a", "bb"], "rows": [["1", "22"], ["333", "4"]]}


class TestRender:
    def test_sd4_needs_diagram(self, report):
        with pytest.raises(InvalidInputError):
            render("sd4", OutputFormat.MD, report=report)

    def test_missing_input(self, m1_solution):
        """The algo table cannot be drawn from solutions."""
        with pytest.raises(InvalidInputError):
            render("algo", OutputFormat.MD, solutions=[m1_solution])

    def test_solutions_csv(self, m1_solution):
        text = render("solutions", OutputFormat.CSV, solutions=[m1_solution])
        assert text.splitlines()[0] == "N,e_XY,e_U,r,D0,N(r)"
        assert text.splitlines()[1].startswith("12,2,3,√2/2,2,")
