"""
Shared fixtures: a small Prym(2,2) cell worked out by hand.

The diagram has the SD4 shape. With reduced matrix [[1,2],[0,2]] it carries
exactly one arithmetic surface on six squares, and the geometry of the
width ratio sqrt(2)/2 realizes it with an admissible C2 crossing.
"""

from fractions import Fraction

import pytest

from prymcurves.core.cuspgeom import CuspTuple, GeometryPair, ReducedMatrix, full_matrix_splits, height_from_width
from prymcurves.core.exactmath import QuadElt
from prymcurves.core.models import Crossing, Stratum
from prymcurves.core.origami import Origami
from prymcurves.core.rou_solver import RelationSolution
from prymcurves.core.separatrix import SeparatrixDiagram


def sqrt2(c) -> QuadElt:
    """c * sqrt(2)."""
    return QuadElt(Fraction(0), Fraction(c), 2)


@pytest.fixture
def m1_solution():
    return RelationSolution(12, 2, 3, sqrt2(Fraction(1, 2)), Stratum.PRYM22)


@pytest.fixture
def fixture_diagram():
    return SeparatrixDiagram(Stratum.PRYM22, ((2, 4), (0, 3), (1, 5)), (0, 1, 3, 2, 5, 4))


@pytest.fixture
def fixture_mred():
    return ReducedMatrix(1, 2, 0, 2)


@pytest.fixture
def fixture_origami():
    return Origami(
        sigma_h=(1, 0, 3, 2, 5, 4),
        sigma_v=(4, 1, 0, 2, 3, 5),
        rho=(4, 5, 3, 2, 0, 1),
        lengths=(1, 1, 1, 1, 1, 1),
        twists=(1, 0),
        full_matrix=((1, 1, 0), (0, 2, 0), (0, 1, 1)),
    )


@pytest.fixture
def fixture_geometry(m1_solution, fixture_mred):
    r2 = sqrt2(Fraction(1, 2))
    cusp = CuspTuple(m1_solution, 0, 0, r2, height_from_width(r2), QuadElt(Fraction(1, 2)))
    return GeometryPair(
        Stratum.PRYM22, cusp, cusp, Crossing.C2,
        wZ1=QuadElt(Fraction(1)),
        wZ2=QuadElt(Fraction(2), Fraction(4), 2),
        hZ1=QuadElt(Fraction(1), Fraction(-1, 4), 2),
        hZ2=sqrt2(Fraction(1, 4)),
        mred=fixture_mred,
        full_matrices=tuple(full_matrix_splits(fixture_mred)),
    )
