"""
Exact flat surfaces built from origamis, admissible vertical directions and
the prototype normal form.

A surface is stored as horizontal strips, one per row of squares. Each strip
knows its width and height and the saddle connections on its bottom and
top, with x coordinates measured from the left end of the strip's bottom.
An affine map (x, y) -> (a x + b y, d y) only moves these numbers, so the
same representation serves before and after normalization.
"""

import bisect
import dataclasses
import functools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
try:
    from sympy import igcdex
except ImportError:  # newer sympy moved it
    from sympy.core.intfunc import igcdex

from .cuspgeom import GeometryPair
from .exactmath import QuadElt, quad_mod
from .exceptions import InvalidInputError, NormalizationError
from .logger import get_logger
from .models import Crossing, PrototypeRecord, QuadModel, Stratum
from .origami import Origami

logger = get_logger("prymcurves.FlatSurface")

ZERO = QuadElt(Fraction(0))
ONE = QuadElt(Fraction(1))
MAX_FLOW_STEPS = 20000


@dataclass(frozen=True)
class SaddleConnection:
    """A horizontal boundary segment between consecutive zeros of one strip bottom."""
    key: Tuple[int, int]
    length: QuadElt
    bottom_row: int
    bottom_x: QuadElt
    top_row: int
    top_x: QuadElt
    start_vertex: int
    start_is_zero: bool


@dataclass(frozen=True)
class FlatSurface:
    origami: Origami
    rows: Tuple[Tuple[int, ...], ...]
    widths: Tuple[QuadElt, ...]
    heights: Tuple[QuadElt, ...]
    square_x: Tuple[QuadElt, ...]
    square_width: Tuple[QuadElt, ...]
    edges: Tuple[SaddleConnection, ...]
    twists: Tuple[QuadElt, ...] = ()
    geometry: Optional[GeometryPair] = field(default=None, compare=False)

    @classmethod
    def from_origami(cls, o: Origami, column_widths: Optional[Sequence[QuadElt]] = None,
                     row_heights: Optional[Sequence[QuadElt]] = None,
                     geometry: Optional[GeometryPair] = None) -> 'FlatSurface':
        """
        Replace every square by a rectangle whose width depends on its
        vertical cylinder and whose height depends on its row. Without
        widths and heights every square stays a unit square.
        """
        rows = []
        for cyl in o.cylinder_decomposition("horizontal"):
            seen = set()
            for x in cyl.squares:
                if x in seen:
                    continue
                row = [x]
                while len(row) < cyl.width:
                    row.append(o.sigma_h[row[-1]])
                seen.update(row)
                rows.append(tuple(row))
        row_of = {x: r for r, row in enumerate(rows) for x in row}

        square_width = [ONE] * o.n
        if column_widths is not None:
            for j, col in enumerate(o.cylinder_decomposition("vertical")):
                for x in col.squares:
                    square_width[x] = ZERO + column_widths[j]
        heights = tuple(ZERO + h for h in row_heights) if row_heights is not None else (ONE,) * len(rows)
        if len(heights) != len(rows):
            raise InvalidInputError(f"{len(heights)} row heights for {len(rows)} rows")

        square_x = [ZERO] * o.n
        widths = []
        for row in rows:
            pos = ZERO
            for x in row:
                square_x[x] = pos
                pos = pos + square_width[x]
            widths.append(pos)

        edges = []
        for r, row in enumerate(rows):
            cuts = [k for k, x in enumerate(row) if o.is_zero(o.bl(x))]
            marked = not cuts
            cuts = cuts or [0]
            for k, p in enumerate(cuts):
                q = cuts[(k + 1) % len(cuts)]
                run = row[p:q] if q > p else row[p:] + row[:q]
                below = o.sigma_v_inv[row[p]]
                edges.append(SaddleConnection(
                    key=(r, row[p]),
                    length=sum((square_width[x] for x in run), ZERO),
                    bottom_row=r,
                    bottom_x=square_x[row[p]],
                    top_row=row_of[below],
                    top_x=square_x[below],
                    start_vertex=o.bl(row[p]),
                    start_is_zero=not marked,
                ))

        twists: Tuple[QuadElt, ...] = ()
        if len(o.twists) == 2 and len(rows) == 3:
            t1, t2 = o.twists
            shifted = [sum((square_width[x] for x in rows[r][:t]), ZERO) for r, t in ((0, t1), (1, t2), (2, t1))]
            twists = tuple(shifted)

        return cls(o, tuple(rows), tuple(widths), heights, tuple(square_x), tuple(square_width),
                   tuple(edges), twists, geometry)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def area(self) -> QuadElt:
        return sum((w * h for w, h in zip(self.widths, self.heights)), ZERO)

    @functools.cached_property
    def row_of(self) -> Dict[int, int]:
        return {x: r for r, row in enumerate(self.rows) for x in row}

    def rectangle(self, x: int) -> Tuple[QuadElt, QuadElt]:
        """(width, height) of the rectangle replacing square x."""
        return self.square_width[x], self.heights[self.row_of[x]]

    def column_circumferences(self) -> List[QuadElt]:
        """Length of each vertical cylinder of the underlying origami."""
        return [sum((self.heights[self.row_of[x]] for x in col.squares), ZERO)
                for col in self.origami.cylinder_decomposition("vertical")]

    @functools.cached_property
    def _tops(self) -> List[Tuple[List[QuadElt], List[SaddleConnection]]]:
        tops = []
        for r in range(self.n_rows):
            found = sorted(((quad_mod(e.top_x, self.widths[r]), e) for e in self.edges if e.top_row == r),
                           key=lambda pair: pair[0])
            tops.append(([s for s, _ in found], [e for _, e in found]))
        return tops

    def top_edge_at(self, row: int, x: QuadElt) -> Tuple[SaddleConnection, QuadElt]:
        """Saddle connection on the top of ``row`` above bottom coordinate x, and the offset into it."""
        starts, edges = self._tops[row]
        k = bisect.bisect_right(starts, x) - 1
        if k < 0:
            k = len(starts) - 1
        return edges[k], quad_mod(x - starts[k], self.widths[row])

    def flow_up(self, row: int, x: QuadElt) -> Tuple[bool, int, QuadElt]:
        """Cross the strip vertically; returns (hit a vertex, next row, next x)."""
        edge, d = self.top_edge_at(row, x)
        if d == 0:
            return True, edge.bottom_row, edge.bottom_x
        nxt = edge.bottom_row
        return False, nxt, quad_mod(edge.bottom_x + d, self.widths[nxt])

    def twist_offsets(self, row: int) -> List[QuadElt]:
        """Horizontal offsets from a zero on the bottom of a strip to the same zero on its top."""
        bottom: Dict[int, List[QuadElt]] = {}
        for e in self.edges:
            if e.bottom_row == row and e.start_is_zero:
                bottom.setdefault(e.start_vertex, []).append(e.bottom_x)
        offsets = set()
        for e in self.edges:
            if e.top_row == row and e.start_is_zero:
                for xb in bottom.get(e.start_vertex, []):
                    offsets.add(quad_mod(e.top_x - xb, self.widths[row]))
        return sorted(offsets)

    def affine(self, a: QuadElt, b: QuadElt, d: QuadElt) -> 'FlatSurface':
        """Image under (x, y) -> (a x + b y, d y), a and d positive."""
        a, b, d = (ZERO + v for v in (a, b, d))
        if a <= 0 or d <= 0:
            raise InvalidInputError("affine normalization must preserve orientation of both axes")
        edges = tuple(dataclasses.replace(
            e, length=a * e.length, bottom_x=a * e.bottom_x,
            top_x=a * e.top_x + b * self.heights[e.top_row]) for e in self.edges)
        return FlatSurface(
            self.origami, self.rows,
            tuple(a * w for w in self.widths),
            tuple(d * h for h in self.heights),
            tuple(a * x for x in self.square_x),
            tuple(a * w for w in self.square_width),
            edges,
            tuple(a * t + b * self.heights[r] for r, t in enumerate(self.twists)),
            self.geometry,
        )


def realize_surface(o: Origami, g: GeometryPair) -> FlatSurface:
    """
    Rectangles of width h(Z_j) and height h(C_i) in place of the squares of
    an arithmetic surface, checked against the widths of the geometry.
    """
    rows = o.cylinder_decomposition("horizontal")
    cols = o.cylinder_decomposition("vertical")
    if len(rows) != 3 or len(cols) != 3 or any(c.height != 1 for c in rows + cols):
        raise InvalidInputError("origami is not an arithmetic surface with three cylinders in each direction")
    if o.reduced_matrix() != g.mred:
        raise InvalidInputError(f"origami has reduced matrix {o.reduced_matrix()}, geometry has {g.mred}")
    fs = FlatSurface.from_origami(o, g.heights_Z(), g.heights_C(), geometry=g)
    if fs.widths != g.widths_C():
        raise InvalidInputError("horizontal cylinder widths disagree with the geometry")
    if tuple(fs.column_circumferences()) != g.widths_Z():
        raise InvalidInputError("vertical cylinder widths disagree with the geometry")
    return fs


# ---------------------------------------------------------------------------
# Admissible vertical directions
# ---------------------------------------------------------------------------

def admissible_squares(o: Origami, stratum: Stratum, crossing: Optional[Crossing] = None) -> List[int]:
    """
    Squares whose left side starts a vertical saddle connection of the
    required kind: for Prym(2,2) it joins the two zeros, is rho-invariant and
    crosses C2 once or C1 and C3 once each; for Prym(2,1,1) it joins the
    double zero to a simple zero crossing one cylinder once.
    """
    rows = o.cylinder_decomposition("horizontal")
    if len(rows) != 3:
        return []
    c1, c2, c3 = (set(c.squares) for c in rows)
    h_inv, v, rho = o.sigma_h_inv, o.sigma_v, o.rho
    found = []
    if stratum is Stratum.PRYM22:
        if rho is None:
            return []
        if crossing in (None, Crossing.C2):
            for x in sorted(c2):
                lo, hi = o.bl(x), o.tl(x)
                if o.is_zero(lo) and o.is_zero(hi) and lo != hi and rho[x] == h_inv[x]:
                    found.append(x)
        if crossing in (None, Crossing.C1):
            for x in sorted(c1 | c3):
                y = v[x]
                if not ((x in c1 and y in c3) or (x in c3 and y in c1)):
                    continue
                lo, mid, hi = o.bl(x), o.bl(y), o.tl(y)
                if (o.is_zero(lo) and o.is_zero(hi) and lo != hi and not o.is_zero(mid)
                        and rho[x] == h_inv[y]):
                    found.append(x)
        return found
    single = {Crossing.C1: c1 | c3, Crossing.C2: c2, None: c1 | c2 | c3}[crossing]
    for x in sorted(single):
        if {o.vertex_order(o.bl(x)), o.vertex_order(o.tl(x))} == {2, 1}:
            found.append(x)
    return found


def admissible_vertical(fs: FlatSurface, stratum: Stratum) -> bool:
    crossing = fs.geometry.crossing if fs.geometry is not None else None
    return bool(admissible_squares(fs.origami, stratum, crossing))


# ---------------------------------------------------------------------------
# Vertical cylinders and commensurability
# ---------------------------------------------------------------------------

def vertical_cylinders(fs: FlatSurface, max_steps: int = MAX_FLOW_STEPS) -> Optional[List[Tuple[QuadElt, QuadElt]]]:
    """
    (width, circumference) of every vertical cylinder, or None when the
    vertical direction is not completely periodic.

    Every upward trajectory from a bottom vertex is followed until it hits
    a vertex; the points where these saddle connections cross strip bottoms
    cut the bottoms into intervals that the vertical flow permutes.
    """
    points: List[set] = [set() for _ in range(fs.n_rows)]
    for e in fs.edges:
        row, x = e.bottom_row, quad_mod(e.bottom_x, fs.widths[e.bottom_row])
        points[row].add(x)
        for _ in range(max_steps):
            hit, row, x = fs.flow_up(row, x)
            if hit:
                break
            points[row].add(x)
        else:
            logger.debug("Vertical separatrix does not close", start=str(e.key), steps=max_steps)
            return None

    cuts = [sorted(p) for p in points]
    intervals: List[Tuple[int, int]] = [(r, k) for r in range(fs.n_rows) for k in range(len(cuts[r]))]

    def span(r: int, k: int) -> Tuple[QuadElt, QuadElt]:
        lo = cuts[r][k]
        hi = cuts[r][k + 1] if k + 1 < len(cuts[r]) else cuts[r][0] + fs.widths[r]
        return lo, hi

    image: Dict[Tuple[int, int], Tuple[int, int]] = {}
    for r, k in intervals:
        lo, hi = span(r, k)
        mid = quad_mod((lo + hi) / 2, fs.widths[r])
        hit, nr, y = fs.flow_up(r, mid)
        if hit:
            return None
        j = bisect.bisect_right(cuts[nr], y) - 1
        if j < 0:
            j = len(cuts[nr]) - 1
        nlo, nhi = span(nr, j)
        if nhi - nlo != hi - lo:
            return None
        image[(r, k)] = (nr, j)

    cylinders = []
    seen = set()
    for start in intervals:
        if start in seen:
            continue
        lo, hi = span(*start)
        circumference = ZERO
        node = start
        while node not in seen:
            seen.add(node)
            circumference = circumference + fs.heights[node[0]]
            node = image[node]
        cylinders.append((hi - lo, circumference))
    return cylinders


def moduli_commensurable(moduli: Sequence[QuadElt]) -> bool:
    """All pairwise ratios rational."""
    if not moduli:
        return True
    first = moduli[0]
    return all((m / first).is_rational for m in moduli[1:])


def moduli_commensurability_check(fs: FlatSurface) -> bool:
    """Vertical direction completely periodic with pairwise commensurable moduli."""
    cylinders = vertical_cylinders(fs)
    if cylinders is None:
        return False
    return moduli_commensurable([width / circumference for width, circumference in cylinders])


# ---------------------------------------------------------------------------
# Prototypes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Prototype:
    """Integer data (w, h, t, e) of the normal form together with the slit s."""
    w: int
    h: int
    t: int
    e: int
    slit: QuadElt
    normalization: Tuple[QuadElt, QuadElt, QuadElt] = field(default=(ONE, ZERO, ONE), compare=False)

    @property
    def D(self) -> int:
        return self.e * self.e + 8 * self.w * self.h

    @property
    def lam(self) -> QuadElt:
        return (QuadElt(Fraction(self.e)) + QuadElt.sqrt_of(self.D)) / 2

    @property
    def lambda_below_w(self) -> bool:
        return self.lam < self.w

    def satisfies_conditions(self) -> bool:
        """Every clause of the normal form except lambda < w, which is reported separately."""
        g = gcd(self.w, self.h)
        return (self.w > 0 and self.h > 0 and 0 <= self.t < g
                and gcd(gcd(g, self.t), abs(self.e)) == 1
                and self.lam > 0 and 0 < self.slit < 1)

    def generator_matrix(self) -> np.ndarray:
        w, h, t, e = self.w, self.h, self.t, self.e
        return np.array([
            [e, 0, 2 * w, 2 * t],
            [0, e, 0, 2 * h],
            [h, -t, 0, 0],
            [0, w, 0, 0],
        ], dtype=object)

    def check_generator(self) -> bool:
        """T^2 = e T + 2 w h Id."""
        T = self.generator_matrix()
        identity = np.identity(4, dtype=int).astype(object)
        return bool(np.array_equal(T.dot(T), self.e * T + 2 * self.w * self.h * identity))

    def key(self) -> tuple:
        return (self.w, self.h, self.t, self.e, self.slit)

    def to_record(self) -> PrototypeRecord:
        return PrototypeRecord(w=self.w, h=self.h, t=self.t, e=self.e, D=self.D,
                               slit=QuadModel.of(self.slit), lambda_below_w=self.lambda_below_w)

    def __str__(self) -> str:
        return f"({self.w},{self.h},{self.t},{self.e})"


def _lcm(values: Sequence[int]) -> int:
    out = 1
    for v in values:
        out = out * v // gcd(out, v)
    return out


def compute_prototype(fs: FlatSurface) -> Prototype:
    """
    Normalize by an upper triangular matrix so that C2 becomes a square of
    side lambda and C1 spans the lattice Z(w, 0) + Z(t, h), then read off
    (w, h, t, e) and the slit.

    Raises NormalizationError when no choice of cylinder twists gives a
    rational shear or the slit falls outside (0, 1).
    """
    g = fs.geometry
    if g is None or fs.n_rows != 3:
        raise NormalizationError("prototype needs a realized three-cylinder surface")
    r2, h2 = g.r2, g.h2
    choice = None
    for t1 in fs.twist_offsets(0):
        for t2 in fs.twist_offsets(1):
            tau = t1 - t2 / h2
            if tau.is_rational:
                choice = (t2, tau.a)
                break
        if choice is not None:
            break
    if choice is None:
        raise NormalizationError("no pair of cylinder twists gives a rational shear")
    t2, tau = choice

    vector = [Fraction(1), -r2.norm() / 2, tau, r2.trace()]
    L = _lcm([q.denominator for q in vector])
    ints = [int(q * L) for q in vector]
    common = 0
    for x in ints:
        common = gcd(common, abs(x))
    w, h, T, e = (x // common for x in ints)
    scale = Fraction(L, common)
    if w <= 0 or h <= 0:
        raise NormalizationError(f"non-positive normal form ({w},{h})")
    D = e * e + 8 * w * h
    lam = r2 * scale
    if lam != (QuadElt(Fraction(e)) + QuadElt.sqrt_of(D)) / 2:
        raise NormalizationError(f"lambda {lam} is not the eigenvalue of discriminant {D}")

    c2_top = [edge for edge in fs.edges if edge.top_row == 1]
    crossing = sum((edge.length for edge in c2_top if edge.bottom_row != 1), ZERO)
    slit = crossing / fs.widths[1]
    if not (0 < slit < 1):
        raise NormalizationError(f"slit {slit} outside (0, 1)")

    k = gcd(w, h)
    t = T % k
    s = 0
    if t == 0:
        # integer shear that brings the C1 twist to zero
        _, y, _ = igcdex(w, h)
        s = -(T // k) * int(y)
    normalization = (QuadElt(scale), t2 * (-scale) / h2 + s * h, r2 * scale / h2)
    return Prototype(w, h, t, e, slit, normalization)


def normalized_surface(fs: FlatSurface, prototype: Prototype) -> FlatSurface:
    return fs.affine(*prototype.normalization)
