"""
Tests for cusp tuples, reduced intersection matrices and geometry pairs.
"""

from fractions import Fraction

import pytest

from prymcurves.core.cuspgeom import (
    CuspTuple,
    GeometryPair,
    ReducedMatrix,
    _crossing_filter,
    full_matrix_splits,
    height_from_width,
    reduced_matrix_from_pair,
    relative_period_base,
    relative_periods,
)
from prymcurves.core.exactmath import QuadElt
from prymcurves.core.exceptions import InvalidInputError, ParityError
from prymcurves.core.models import Crossing, GeometryRecord, Stratum
from prymcurves.core.origami import square_counts


def q(a, b=0, D0=1) -> QuadElt:
    return QuadElt(Fraction(a), Fraction(b), D0)


@pytest.fixture
def m1_cusp(m1_solution):
    r2 = m1_solution.r
    return CuspTuple(m1_solution, 0, 0, r2, height_from_width(r2), relative_period_base(m1_solution))


class TestCuspTuples:
    """Normalized data of one suitable direction."""

    def test_height_from_width(self):
        """h2 = -2 / r2^s, so r2 = sqrt(2)/2 gives h2 = 2 sqrt(2)."""
        assert height_from_width(q(0, Fraction(1, 2), 2)) == q(0, 2, 2)

    def test_flux(self, m1_cusp):
        """2 + r2 h2^s = 0."""
        assert m1_cusp.flux_holds()

    def test_relative_periods(self, m1_solution):
        """Three shifts of the base period lie in (0, 1) for r2 = sqrt(2)/2."""
        tuples = relative_periods(m1_solution)
        gammas = sorted(t.gamma for t in tuples)
        assert gammas == [q(Fraction(-1, 3), Fraction(1, 4), 2),
                          q(Fraction(2, 3), Fraction(-1, 4), 2),
                          q(Fraction(-1, 3), Fraction(3, 4), 2)]
        assert all(t.h2 == q(0, 2, 2) for t in tuples)


class TestReducedMatrix:
    """Reduced intersection matrices and their splits."""

    def test_parity(self):
        """The (1,2) entry counts each intersection twice."""
        with pytest.raises(ParityError):
            ReducedMatrix(1, 3, 0, 2)

    def test_negative_entries(self):
        with pytest.raises(InvalidInputError):
            ReducedMatrix(-1, 2, 0, 2)

    def test_splits(self):
        """m11 + m13 = 1 splits two ways, each Prym symmetric."""
        splits = full_matrix_splits(ReducedMatrix(1, 2, 0, 2))
        assert splits == [((0, 1, 1), (0, 2, 0), (1, 1, 0)), ((1, 1, 0), (0, 2, 0), (0, 1, 1))]

    @pytest.mark.parametrize("rows,expected", [
        (((0, 6), (3, 3)), (3, 9, 3, 9)),
        (((72, 48), (24, 18)), (96, 66, 96, 66)),
        (((3, 6), (3, 0)), (6, 6, 6, 6)),
    ])
    def test_square_counts(self, rows, expected):
        """Squares of C1, C2, Z1 and Z2."""
        assert square_counts(ReducedMatrix.from_rows(rows)) == expected


class TestGeometryPairs:
    """Pairing a horizontal and a vertical tuple."""

    def test_c2_crossing_gives_published_matrix(self, m1_cusp):
        """The sqrt(2)/2 tuple paired with itself through C2 gives [[72,48],[24,18]]."""
        g = reduced_matrix_from_pair(m1_cusp, m1_cusp, Crossing.C2)
        assert g is not None
        assert g.mred == ReducedMatrix(72, 48, 24, 18)
        assert (g.wZ1, g.wZ2) == (q(72, 48, 2), q(48, 36, 2))
        assert (g.hZ1, g.hZ2) == (q(Fraction(1, 8), Fraction(-1, 12), 2), q(Fraction(-1, 3), Fraction(1, 4), 2))
        assert g.identities_hold()

    def test_c1_crossing(self, m1_cusp):
        """Through C1 and C3 the same pair gives another admissible matrix."""
        g = reduced_matrix_from_pair(m1_cusp, m1_cusp, Crossing.C1)
        assert g is not None
        assert g.mred == ReducedMatrix(48, 36, 18, 12)
        assert g.identities_hold()

    def test_crossing_filter_keeps_one_kind(self, m1_cusp):
        """Prym(2,2) keeps C2 crossings only."""
        pairs = [reduced_matrix_from_pair(m1_cusp, m1_cusp, c) for c in (Crossing.C1, Crossing.C2)]
        kept = _crossing_filter(Stratum.PRYM22, pairs)
        assert [g.crossing for g in kept] == [Crossing.C2]
        assert _crossing_filter(Stratum.PRYM211, kept) == []

    def test_fields_must_match(self, m1_cusp, m1_solution):
        """Tuples from different trace fields cannot be paired."""
        r = q(0, 1, 3)
        other = CuspTuple(m1_solution, 0, 0, r, height_from_width(r), q(Fraction(1, 2)))
        with pytest.raises(InvalidInputError):
            reduced_matrix_from_pair(m1_cusp, other, Crossing.C2)

    def test_fixture_identities(self, fixture_geometry):
        """The hand-built SD4 geometry satisfies both width identities."""
        assert fixture_geometry.identities_hold()
        assert fixture_geometry.widths_C() == (q(1), q(0, Fraction(1, 2), 2), q(1))
        assert fixture_geometry.heights_C()[1] == q(0, 2, 2)

    def test_broken_width_fails_identities(self, fixture_geometry):
        """Changing w(Z1) breaks the identities."""
        from dataclasses import replace
        assert not replace(fixture_geometry, wZ1=q(2)).identities_hold()

    def test_record_round_trip(self, m1_cusp):
        """Geometry records reload to an equal pair."""
        g = reduced_matrix_from_pair(m1_cusp, m1_cusp, Crossing.C2)
        record = GeometryRecord.model_validate_json(g.to_record().model_dump_json())
        assert GeometryPair.from_record(record) == g


@pytest.mark.paper
@pytest.mark.slow
class TestPublishedGeometries:
    """Full geometry search against the published matrices."""

    @pytest.mark.parametrize("stratum", list(Stratum))
    def test_matrices(self, stratum):
        """Seven matrices for Prym(2,2), one geometry for Prym(2,1,1)."""
        from prymcurves.core.cuspgeom import enumerate_geometries
        from prymcurves.core.reference_tables import compare_geometries
        from prymcurves.core.rou_solver import enumerate_solutions
        compare_geometries(stratum, enumerate_geometries(stratum, enumerate_solutions(stratum)))

    def test_printed_width_fails_identities(self):
        """The printed w(Z1) of the Prym(2,1,1) geometry violates the width identities."""
        from dataclasses import replace

        from prymcurves.core.cuspgeom import enumerate_geometries
        from prymcurves.core.reference_tables import PRYM211_PRINTED_WZ1
        from prymcurves.core.rou_solver import enumerate_solutions
        geometries = enumerate_geometries(Stratum.PRYM211, enumerate_solutions(Stratum.PRYM211))
        g = next(g for g in geometries if g.mred == ReducedMatrix(0, 6, 3, 3))
        assert g.identities_hold()
        assert not replace(g, wZ1=PRYM211_PRINTED_WZ1).identities_hold()
