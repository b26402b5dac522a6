"""
Tests for square-tiled surfaces and arithmetic surface enumeration.
"""

import itertools

import pytest

from prymcurves.core.cuspgeom import ReducedMatrix
from prymcurves.core.exceptions import InvalidInputError
from prymcurves.core.models import OrigamiRecord, Stratum
from prymcurves.core.origami import (
    Origami,
    diagram_of,
    edge_length_vectors,
    enumerate_arithmetic_surfaces,
    inverse,
    perm_cycles,
    square_counts,
)
from prymcurves.core.reference_tables import PRYM22_MATRICES, SD4_SURFACES
from prymcurves.core.separatrix import sd4_diagram


def relabel(o: Origami, p) -> Origami:
    """Conjugate every permutation by the relabeling x -> p[x]."""
    def conj(perm):
        out = [0] * len(perm)
        for x, y in enumerate(perm):
            out[p[x]] = p[y]
        return tuple(out)
    return Origami(conj(o.sigma_h), conj(o.sigma_v), conj(o.rho))


class TestPermutations:
    def test_inverse(self):
        assert inverse((2, 0, 1)) == (1, 2, 0)

    def test_cycles_start_at_smallest(self):
        assert perm_cycles((4, 1, 0, 2, 3, 5)) == [(0, 4, 3, 2), (1,), (5,)]


class TestOrigami:
    """The six-square Prym(2,2) surface of the shared fixtures."""

    def test_zeros(self, fixture_origami):
        """Two corner cycles of length three: two double zeros, genus three."""
        assert fixture_origami.corner_cycles == ((0, 4, 3), (1, 2, 5))
        assert fixture_origami.zero_orders == (2, 2)
        assert fixture_origami.genus == 3
        assert fixture_origami.is_connected()

    def test_prym_involution(self, fixture_origami):
        assert fixture_origami.has_prym_involution()
        assert fixture_origami.rho_on_vertices() == {0: 1, 1: 0}

    def test_horizontal_cylinders(self, fixture_origami):
        """Three one-row cylinders, the rho-fixed one second."""
        cylinders = fixture_origami.cylinder_decomposition("horizontal")
        assert [c.squares for c in cylinders] == [(0, 1), (2, 3), (4, 5)]
        assert all(c.width == 2 and c.height == 1 for c in cylinders)

    def test_vertical_cylinders(self, fixture_origami):
        """The four-square column is rho-fixed and moved to the middle."""
        cylinders = fixture_origami.cylinder_decomposition("vertical")
        assert [c.squares for c in cylinders] == [(1,), (0, 2, 3, 4), (5,)]

    def test_intersection_matrix(self, fixture_origami, fixture_mred):
        assert fixture_origami.intersection_matrix() == [[1, 1, 0], [0, 2, 0], [0, 1, 1]]
        assert fixture_origami.reduced_matrix() == fixture_mred

    def test_transpose(self, fixture_origami):
        """Transposing exchanges the two directions."""
        t = fixture_origami.transpose()
        assert t.transpose() == fixture_origami
        assert [c.squares for c in t.cylinder_decomposition("horizontal")] == [(1,), (0, 2, 3, 4), (5,)]

    def test_unknown_direction(self, fixture_origami):
        with pytest.raises(InvalidInputError):
            fixture_origami.cylinder_decomposition("diagonal")

    def test_canonical_key_ignores_labels(self, fixture_origami):
        """Relabeling squares keeps the canonical key."""
        shuffled = relabel(fixture_origami, (3, 5, 0, 4, 1, 2))
        assert shuffled.sigma_v != fixture_origami.sigma_v
        assert shuffled.canonical_key() == fixture_origami.canonical_key()

    def test_record_round_trip(self, fixture_origami):
        record = OrigamiRecord.model_validate_json(fixture_origami.to_record().model_dump_json())
        restored = Origami.from_record(record)
        assert restored == fixture_origami
        assert restored.twists == (1, 0)

    def test_not_permutations(self):
        with pytest.raises(InvalidInputError):
            Origami((0, 0), (0, 1))


class TestDiagramOf:
    """Reading the horizontal separatrix diagram off an origami."""

    def test_diagram(self, fixture_origami, fixture_diagram):
        d = diagram_of(fixture_origami, Stratum.PRYM22)
        assert d.bottoms == ((0, 1), (2, 3), (4, 5))
        assert d.rho == (3, 5, 2, 0, 4, 1)
        assert d.canonical_form() == fixture_diagram.canonical_form()

    def test_needs_involution(self, fixture_origami):
        with pytest.raises(InvalidInputError):
            diagram_of(Origami(fixture_origami.sigma_h, fixture_origami.sigma_v), Stratum.PRYM22)


class TestArithmeticSurfaces:
    """Enumeration of surfaces with a given diagram and reduced matrix."""

    def test_edge_lengths(self, fixture_diagram):
        """Widths (2, 2, 2) with two edges per bottom force unit lengths."""
        assert list(edge_length_vectors(fixture_diagram, (2, 2, 2))) == [(1, 1, 1, 1, 1, 1)]

    def test_single_surface(self, fixture_diagram, fixture_mred, fixture_origami):
        """Only twists (1, 0) close up into three columns."""
        surfaces = enumerate_arithmetic_surfaces(fixture_diagram, fixture_mred)
        assert surfaces == [fixture_origami]
        (o,) = surfaces
        assert o.twists == (1, 0)
        assert o.full_matrix == ((1, 1, 0), (0, 2, 0), (0, 1, 1))
        assert o.reduced_matrix() == fixture_mred

    def test_empty_cylinder(self, fixture_diagram):
        """A matrix without squares in C2 has no surfaces."""
        assert enumerate_arithmetic_surfaces(fixture_diagram, ReducedMatrix(2, 0, 0, 0)) == []


def row_layout(widths):
    """sigma_h with one row per cylinder, squares numbered row by row."""
    out, off = [], 0
    for a in widths:
        out.extend(off + (c + 1) % a for c in range(a))
        off += a
    return tuple(out)


def prym_involutions(sigma_h, sigma_v):
    """Every involution reversing both directions, grown from the image of square 0."""
    n = len(sigma_h)
    h_inv, v_inv = inverse(sigma_h), inverse(sigma_v)
    moves = ((sigma_h, h_inv), (h_inv, sigma_h), (sigma_v, v_inv), (v_inv, sigma_v))
    for y in range(n):
        rho = [-1] * n
        rho[0] = y
        stack = [0]
        ok = True
        while stack and ok:
            x = stack.pop()
            for step, back in moves:
                nx, ny = step[x], back[rho[x]]
                if rho[nx] < 0:
                    rho[nx] = ny
                    stack.append(nx)
                elif rho[nx] != ny:
                    ok = False
                    break
        if ok and -1 not in rho and all(rho[rho[x]] == x for x in range(n)):
            yield tuple(rho)


def qualifies(sigma_h, sigma_v, diagram, mred):
    """Three one-column vertical cylinders, one of them rho-fixed, the diagram up to relabeling and mred."""
    if len(perm_cycles(sigma_v)) != 3:
        return False
    for rho in prym_involutions(sigma_h, sigma_v):
        o = Origami(sigma_h, sigma_v, rho)
        vertical = o.cylinder_decomposition("vertical")
        fixed = [c for c in vertical if {rho[x] for x in c.squares} == set(c.squares)]
        if len(vertical) != 3 or len(fixed) != 1:
            continue
        try:
            same = diagram_of(o, diagram.stratum).canonical_form() == diagram.canonical_form()
        except InvalidInputError:
            continue
        if same and o.reduced_matrix() == mred:
            return True
    return False


def permutation_scan(diagram, mred):
    """Isomorphism classes found by trying every sigma_v on the row layout."""
    a1, a2, _, _ = square_counts(mred)
    sigma_h = row_layout((a1, a2, a1))
    return {Origami(sigma_h, sv).canonical_key() for sv in itertools.permutations(range(len(sigma_h)))
            if qualifies(sigma_h, sv, diagram, mred)}


def twist_scan(diagram, mred):
    """Isomorphism classes found over all edge lengths and independent twists of the three rows."""
    a1, a2, _, _ = square_counts(mred)
    widths = (a1, a2, a1)
    offsets = (0, a1, a1 + a2)
    sigma_h = row_layout(widths)
    n = len(sigma_h)
    keys = set()
    bounds = [range(1, widths[diagram.bottom_cylinder(e)] + 1) for e in range(diagram.n_edges)]
    for lengths in itertools.product(*bounds):
        if any(lengths[e] != lengths[diagram.rho[e]] for e in range(diagram.n_edges)):
            continue
        if any(sum(lengths[e] for e in seq) != widths[i] for i, seq in enumerate(diagram.bottoms)):
            continue
        start = {}
        for i, seq in enumerate(diagram.bottoms):
            pos = offsets[i]
            for e in seq:
                start[e] = pos
                pos += lengths[e]
        above = [[x for e in top for x in range(start[e], start[e] + lengths[e])] for top in diagram.tops]
        for twists in itertools.product(range(a1), range(a2), range(a1)):
            sv = [0] * n
            for i, t in enumerate(twists):
                for c in range(widths[i]):
                    sv[offsets[i] + c] = above[i][(c - t) % widths[i]]
            if qualifies(sigma_h, tuple(sv), diagram, mred):
                keys.add(Origami(sigma_h, tuple(sv)).canonical_key())
    return keys


def enumerated_keys(diagram, mred):
    return {o.canonical_key() for o in enumerate_arithmetic_surfaces(diagram, mred)}


@pytest.mark.slow
class TestAgainstNaiveSearch:
    """Arithmetic surfaces agree with searches that share none of the enumeration shortcuts."""

    def test_fixture_cell_by_permutations(self, fixture_diagram, fixture_mred, fixture_origami):
        """Every sigma_v in S_6 yields exactly the hand-built surface."""
        assert fixture_diagram.is_mirror_symmetric()
        keys = permutation_scan(fixture_diagram, fixture_mred)
        assert keys == {fixture_origami.canonical_key()}
        assert enumerated_keys(fixture_diagram, fixture_mred) == keys

    @pytest.mark.parametrize("mred", [ReducedMatrix(1, 2, 1, 1), ReducedMatrix(2, 0, 1, 1)])
    def test_seven_squares_by_permutations(self, fixture_diagram, mred):
        assert enumerated_keys(fixture_diagram, mred) == permutation_scan(fixture_diagram, mred)

    @pytest.mark.parametrize("mred", [
        ReducedMatrix(1, 2, 0, 2),
        ReducedMatrix(1, 2, 1, 1),
        ReducedMatrix(2, 4, 1, 2),
        ReducedMatrix(2, 2, 2, 2),
        ReducedMatrix(3, 6, 3, 0),
        ReducedMatrix(4, 4, 2, 4),
        ReducedMatrix(4, 8, 2, 4),
    ])
    def test_up_to_twenty_four_squares_by_twists(self, fixture_diagram, mred):
        """Independent C1 and C3 twists find nothing the shared-twist enumeration misses."""
        a1, a2, _, _ = square_counts(mred)
        assert 2 * a1 + a2 <= 24
        assert enumerated_keys(fixture_diagram, mred) == twist_scan(fixture_diagram, mred)


@pytest.mark.paper
@pytest.mark.slow
class TestPublishedSurfaceCounts:
    """Surface counts of the SD4 diagram."""

    @pytest.mark.parametrize("name", sorted(SD4_SURFACES))
    def test_sd4_counts(self, name):
        mred = ReducedMatrix.from_rows(PRYM22_MATRICES[name][0])
        assert len(enumerate_arithmetic_surfaces(sd4_diagram(), mred)) == SD4_SURFACES[name]
