"""
Square-tiled surfaces and the arithmetic surfaces of a separatrix diagram.

An origami on n squares is given by sigma_h (right neighbour) and sigma_v
(upper neighbour). The corner at the bottom left of square x belongs to the
cycle of x under the commutator sigma_v sigma_h sigma_v^-1 sigma_h^-1
(applied right to left); a cycle of length k+1 is a zero of order k.

Arithmetic surfaces put each horizontal cylinder C1, C2, C3 of a diagram in
one row of squares (C1 first, then C2, then C3) and each vertical cylinder in
one column, so that squares correspond to the rectangles C_i ∩ Z_j.
"""

import functools
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .cuspgeom import ReducedMatrix
from .exceptions import InvalidInputError
from .logger import get_logger, log_performance
from .models import OrigamiRecord, Stratum
from .parallel import run_units
from .separatrix import SeparatrixDiagram

logger = get_logger("prymcurves.Origami")

Perm = Tuple[int, ...]


def inverse(perm: Sequence[int]) -> Perm:
    out = [0] * len(perm)
    for i, j in enumerate(perm):
        out[j] = i
    return tuple(out)


def perm_cycles(perm: Sequence[int]) -> List[Tuple[int, ...]]:
    """Cycles in order of their smallest element, each starting there."""
    seen = [False] * len(perm)
    cycles = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        cycle = []
        x = start
        while not seen[x]:
            seen[x] = True
            cycle.append(x)
            x = perm[x]
        cycles.append(tuple(cycle))
    return cycles


def is_permutation(perm: Sequence[int]) -> bool:
    return sorted(perm) == list(range(len(perm)))


@dataclass(frozen=True)
class Cylinder:
    """A maximal cylinder: circumference and height counted in squares."""
    width: int
    height: int
    squares: Tuple[int, ...]


@dataclass(frozen=True)
class Origami:
    sigma_h: Perm
    sigma_v: Perm
    rho: Optional[Perm] = None
    lengths: Tuple[int, ...] = field(default=(), compare=False)
    twists: Tuple[int, ...] = field(default=(), compare=False)
    full_matrix: Tuple[Tuple[int, ...], ...] = field(default=(), compare=False)

    def __post_init__(self):
        if len(self.sigma_h) != len(self.sigma_v) or not (is_permutation(self.sigma_h)
                                                         and is_permutation(self.sigma_v)):
            raise InvalidInputError("sigma_h and sigma_v must be permutations of the same squares")
        if self.rho is not None and (len(self.rho) != self.n or not is_permutation(self.rho)):
            raise InvalidInputError("rho must be a permutation of the squares")

    @property
    def n(self) -> int:
        return len(self.sigma_h)

    @functools.cached_property
    def sigma_h_inv(self) -> Perm:
        return inverse(self.sigma_h)

    @functools.cached_property
    def sigma_v_inv(self) -> Perm:
        return inverse(self.sigma_v)

    def is_connected(self) -> bool:
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for y in (self.sigma_h[x], self.sigma_v[x], self.sigma_h_inv[x], self.sigma_v_inv[x]):
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == self.n

    @functools.cached_property
    def commutator(self) -> Perm:
        h, v, hi, vi = self.sigma_h, self.sigma_v, self.sigma_h_inv, self.sigma_v_inv
        return tuple(v[h[vi[hi[x]]]] for x in range(self.n))

    @functools.cached_property
    def corner_cycles(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(perm_cycles(self.commutator))

    @functools.cached_property
    def _corner_index(self) -> Tuple[int, ...]:
        out = [0] * self.n
        for k, cycle in enumerate(self.corner_cycles):
            for x in cycle:
                out[x] = k
        return tuple(out)

    def bl(self, x: int) -> int:
        """Corner vertex at the bottom left of square x."""
        return self._corner_index[x]

    def tl(self, x: int) -> int:
        return self._corner_index[self.sigma_v[x]]

    def br(self, x: int) -> int:
        return self._corner_index[self.sigma_h[x]]

    def tr(self, x: int) -> int:
        return self._corner_index[self.sigma_v[self.sigma_h[x]]]

    def vertex_order(self, vertex: int) -> int:
        return len(self.corner_cycles[vertex]) - 1

    def is_zero(self, vertex: int) -> bool:
        return len(self.corner_cycles[vertex]) > 1

    def zeros(self) -> List[int]:
        return [k for k, c in enumerate(self.corner_cycles) if len(c) > 1]

    @property
    def zero_orders(self) -> Tuple[int, ...]:
        return tuple(sorted((len(c) - 1 for c in self.corner_cycles if len(c) > 1), reverse=True))

    @property
    def genus(self) -> int:
        return (sum(self.zero_orders) + 2) // 2

    def has_prym_involution(self) -> bool:
        """rho is an involution with rho sigma rho = sigma^-1 for both directions."""
        rho = self.rho
        if rho is None:
            return False
        for x in range(self.n):
            if rho[rho[x]] != x:
                return False
            if rho[self.sigma_h[rho[x]]] != self.sigma_h_inv[x]:
                return False
            if rho[self.sigma_v[rho[x]]] != self.sigma_v_inv[x]:
                return False
        return True

    def rho_on_vertices(self) -> Dict[int, int]:
        """The rotation sends the bottom left corner of x to the top right corner of rho(x)."""
        if self.rho is None:
            raise InvalidInputError("origami carries no involution")
        return {self.bl(x): self.tr(self.rho[x]) for x in range(self.n)}

    def cylinder_decomposition(self, direction: str = "horizontal") -> List[Cylinder]:
        """
        Maximal cylinders in the horizontal or vertical direction. The
        rho-fixed cylinder is listed second, the others by smallest square.
        """
        if direction == "vertical":
            return self.transpose().cylinder_decomposition("horizontal")
        if direction != "horizontal":
            raise InvalidInputError(f"unknown direction {direction!r}")
        h, v = self.sigma_h, self.sigma_v
        rows = perm_cycles(h)
        row_of = {x: k for k, row in enumerate(rows) for x in row}
        parent = list(range(len(rows)))

        def find(k: int) -> int:
            while parent[k] != k:
                parent[k] = parent[parent[k]]
                k = parent[k]
            return k

        for k, row in enumerate(rows):
            # the top of a row is free of singular corners exactly when sigma_v commutes with sigma_h along it
            if all(v[h[x]] == h[v[x]] for x in row):
                parent[find(k)] = find(row_of[v[row[0]]])

        groups: Dict[int, List[int]] = {}
        for k in range(len(rows)):
            groups.setdefault(find(k), []).append(k)
        cylinders = []
        for members in groups.values():
            squares = tuple(sorted(x for k in members for x in rows[k]))
            cylinders.append(Cylinder(len(rows[members[0]]), len(members), squares))
        cylinders.sort(key=lambda c: c.squares[0])
        if self.rho is not None and len(cylinders) > 1:
            fixed = [c for c in cylinders if {self.rho[x] for x in c.squares} == set(c.squares)]
            if len(fixed) == 1:
                cylinders.remove(fixed[0])
                cylinders.insert(1, fixed[0])
        return cylinders

    def transpose(self) -> 'Origami':
        return Origami(self.sigma_v, self.sigma_h, self.rho)

    def intersection_matrix(self) -> List[List[int]]:
        rows = self.cylinder_decomposition("horizontal")
        cols = self.cylinder_decomposition("vertical")
        return [[len(set(r.squares) & set(c.squares)) for c in cols] for r in rows]

    def reduced_matrix(self) -> ReducedMatrix:
        M = self.intersection_matrix()
        if len(M) != 3 or len(M[0]) != 3:
            raise InvalidInputError(f"expected three cylinders in each direction, got {len(M)}x{len(M[0])}")
        return ReducedMatrix(M[0][0] + M[0][2], 2 * M[0][1], M[1][0], M[1][1])

    def canonical_key(self) -> Tuple[int, ...]:
        """Relabeling invariant: lexicographically least breadth-first relabeling over all start squares."""
        n, h, v = self.n, self.sigma_h, self.sigma_v
        best: Optional[Tuple[int, ...]] = None
        for start in range(n):
            label = [-1] * n
            label[start] = 0
            order = [start]
            k = 0
            while k < len(order):
                x = order[k]
                k += 1
                for y in (h[x], v[x]):
                    if label[y] < 0:
                        label[y] = len(order)
                        order.append(y)
            key = tuple(label[h[x]] for x in order) + tuple(label[v[x]] for x in order)
            if best is None or key < best:
                best = key
        return best

    def to_record(self) -> OrigamiRecord:
        return OrigamiRecord(n=self.n, sigma_h=list(self.sigma_h), sigma_v=list(self.sigma_v),
                             rho=list(self.rho or ()), lengths=list(self.lengths),
                             twists=list(self.twists), full_matrix=[list(r) for r in self.full_matrix])

    @classmethod
    def from_record(cls, record: OrigamiRecord) -> 'Origami':
        return cls(tuple(record.sigma_h), tuple(record.sigma_v), tuple(record.rho) or None,
                   tuple(record.lengths), tuple(record.twists),
                   tuple(tuple(r) for r in record.full_matrix))


def diagram_of(o: Origami, stratum: Stratum) -> SeparatrixDiagram:
    """Horizontal separatrix diagram of an origami whose three horizontal cylinders are single rows."""
    if o.rho is None:
        raise InvalidInputError("origami carries no involution")
    cylinders = o.cylinder_decomposition("horizontal")
    if len(cylinders) != 3 or any(c.height != 1 for c in cylinders):
        raise InvalidInputError("horizontal direction is not three one-row cylinders")
    starts: Dict[int, int] = {}
    runs: Dict[int, List[int]] = {}
    bottoms = []
    for c in cylinders:
        row = [c.squares[0]]
        while len(row) < c.width:
            row.append(o.sigma_h[row[-1]])
        cut = [k for k, x in enumerate(row) if o.is_zero(o.bl(x))]
        if not cut:
            raise InvalidInputError("cylinder boundary without zeros")
        boundary = []
        for k, p in enumerate(cut):
            q = cut[(k + 1) % len(cut)]
            squares = row[p:q] if q > p else row[p:] + row[:q]
            label = len(starts)
            starts[row[p]] = label
            runs[label] = squares
            boundary.append(label)
        bottoms.append(tuple(boundary))
    rho = [0] * len(starts)
    for label, squares in runs.items():
        image = o.sigma_v[o.rho[squares[-1]]]
        if image not in starts:
            raise InvalidInputError("rho does not map saddle connections to saddle connections")
        rho[label] = starts[image]
    return SeparatrixDiagram(stratum, tuple(bottoms), tuple(rho))


# ---------------------------------------------------------------------------
# Arithmetic surfaces
# ---------------------------------------------------------------------------

def square_counts(mred) -> Tuple[int, int, int, int]:
    """(a1, a2, b1, b2): squares of C1 (= C3), C2, Z1 (= Z3) and Z2."""
    if not isinstance(mred, ReducedMatrix):
        mred = ReducedMatrix.from_rows(mred)
    a1 = mred.m11p13 + mred.m12x2 // 2
    a2 = 2 * mred.m21 + mred.m22
    b1 = mred.m11p13 + mred.m21
    b2 = mred.m12x2 + mred.m22
    return a1, a2, b1, b2


def edge_length_vectors(diagram: SeparatrixDiagram, widths: Tuple[int, int, int]) -> Iterator[Tuple[int, ...]]:
    """Positive rho-invariant edge lengths whose bottom sums are the cylinder widths."""
    orbits = diagram.length_orbits()
    counts = []
    for orbit in orbits:
        c = [0, 0, 0]
        for e in orbit:
            c[diagram.bottom_cylinder(e)] += 1
        counts.append(tuple(c))
    # squares still needed by the orbits after index k, each at least 1
    tail = [[0, 0, 0] for _ in range(len(orbits) + 1)]
    for k in range(len(orbits) - 1, -1, -1):
        tail[k] = [tail[k + 1][i] + counts[k][i] for i in range(3)]

    values = [0] * len(orbits)

    def extend(k: int, remaining: List[int]) -> Iterator[Tuple[int, ...]]:
        if k == len(orbits):
            if remaining == [0, 0, 0]:
                lengths = [0] * diagram.n_edges
                for orbit, x in zip(orbits, values):
                    for e in orbit:
                        lengths[e] = x
                yield tuple(lengths)
            return
        c = counts[k]
        top = min((remaining[i] - (tail[k + 1][i])) // c[i] for i in range(3) if c[i])
        for x in range(1, top + 1):
            values[k] = x
            yield from extend(k + 1, [remaining[i] - c[i] * x for i in range(3)])

    yield from extend(0, list(widths))


def _top_targets(diagram: SeparatrixDiagram, lengths: Sequence[int],
                 widths: Tuple[int, int, int]) -> List[List[int]]:
    """For each cylinder, the square above each top position counted from the top's first edge."""
    offsets = (0, widths[0], widths[0] + widths[1])
    bottom_start = {}
    for i, seq in enumerate(diagram.bottoms):
        pos = 0
        for e in seq:
            bottom_start[e] = offsets[i] + pos
            pos += lengths[e]
    targets = []
    for i, seq in enumerate(diagram.tops):
        row = []
        for e in seq:
            row.extend(range(bottom_start[e], bottom_start[e] + lengths[e]))
        if len(row) != widths[i]:
            raise InvalidInputError(f"top of C{i + 1} has {len(row)} squares, expected {widths[i]}")
        targets.append(row)
    return targets


def _rows_sigma_h(widths: Tuple[int, int, int]) -> Perm:
    out = []
    off = 0
    for a in widths:
        out.extend(off + (c + 1) % a for c in range(a))
        off += a
    return tuple(out)


def _rho(widths: Tuple[int, int, int], t1: int, t2: int) -> Perm:
    offsets = (0, widths[0], widths[0] + widths[1])
    twists = (t1, t2, t1)
    out = []
    for i, a in enumerate(widths):
        j = 2 - i
        out.extend(offsets[j] + (twists[j] - 1 - c) % a for c in range(a))
    return tuple(out)


def _columns(sv: List[int], starts: Sequence[int], n: int, limit: int) -> Optional[List[List[int]]]:
    """
    Cycles of sigma_v through the given squares, or None as soon as they
    cannot be three columns covering every square.
    """
    seen = bytearray(n)
    cycles = []
    covered = 0
    for s in starts:
        if seen[s]:
            continue
        cycle = [s]
        seen[s] = 1
        x = sv[s]
        while x != s:
            if len(cycle) >= limit:
                return None
            cycle.append(x)
            seen[x] = 1
            x = sv[x]
        cycles.append(cycle)
        covered += len(cycle)
        if len(cycles) > 3:
            return None
    if len(cycles) != 3 or covered != n:
        return None
    return cycles


def _surfaces_for_lengths(unit: Tuple[SeparatrixDiagram, ReducedMatrix, Tuple[int, ...]]) -> List[Origami]:
    diagram, mred, lengths = unit
    a1, a2, b1, b2 = square_counts(mred)
    widths = (a1, a2, a1)
    n = 2 * a1 + a2
    offsets = (0, a1, a1 + a2)
    targets = _top_targets(diagram, lengths, widths)
    sigma_h = _rows_sigma_h(widths)
    starts = []
    for i, seq in enumerate(diagram.bottoms):
        pos = 0
        for e in seq:
            starts.append(offsets[i] + pos)
            pos += lengths[e]
    limit = max(b1, b2)
    wanted = sorted((b1, b1, b2))

    found = []
    sv = [0] * n
    for t1 in range(a1):
        sv[0:a1] = targets[0][a1 - t1:] + targets[0][:a1 - t1]
        sv[a1 + a2:n] = targets[2][a1 - t1:] + targets[2][:a1 - t1]
        for t2 in range(a2):
            sv[a1:a1 + a2] = targets[1][a2 - t2:] + targets[1][:a2 - t2]
            cycles = _columns(sv, starts, n, limit)
            if cycles is None or sorted(len(c) for c in cycles) != wanted:
                continue
            rho = _rho(widths, t1, t2)
            sets = [set(c) for c in cycles]
            fixed = [k for k, s in enumerate(sets) if {rho[x] for x in s} == s]
            if len(fixed) != 1 or len(sets[fixed[0]]) != b2:
                continue
            z2 = sets[fixed[0]]
            z1, z3 = sorted((s for k, s in enumerate(sets) if k != fixed[0]), key=min)
            matrix = []
            for lo, hi in ((0, a1), (a1, a1 + a2), (a1 + a2, n)):
                matrix.append(tuple(sum(1 for x in range(lo, hi) if x in z) for z in (z1, z2, z3)))
            reduced = ReducedMatrix(matrix[0][0] + matrix[0][2], 2 * matrix[0][1], matrix[1][0], matrix[1][1])
            if reduced != mred:
                continue
            found.append(Origami(sigma_h, tuple(sv), rho, tuple(lengths), (t1, t2), tuple(matrix)))
    return found


@log_performance(logger, "arithmetic surface enumeration")
def enumerate_arithmetic_surfaces(diagram: SeparatrixDiagram, mred: ReducedMatrix, jobs: int = 1,
                                  progress: bool = False) -> List[Origami]:
    """
    Every square-tiled surface with the horizontal diagram, one row per
    horizontal cylinder, three one-column vertical cylinders with the
    rho-fixed one in the middle, and reduced intersection matrix ``mred``.

    Twists run over a full period of each cylinder; C1 and C3 share theirs
    so that the rotation is an automorphism.
    """
    a1, a2, b1, b2 = square_counts(mred)
    if min(a1, a2) < 1:
        return []
    units = [(diagram, mred, lengths) for lengths in edge_length_vectors(diagram, (a1, a2, a1))]
    if not units:
        logger.debug("No edge lengths fit", diagram=diagram.label(), mred=str(mred))
        return []
    results = run_units(_surfaces_for_lengths, units, jobs=jobs,
                        desc=f"{diagram.label()} {mred}", progress=progress)
    unique: Dict[Perm, Origami] = {}
    for batch in results:
        for o in batch:
            unique.setdefault(o.sigma_v, o)
    surfaces = sorted(unique.values(), key=lambda o: (o.lengths, o.twists))
    logger.info("Arithmetic surfaces", diagram=diagram.label(), mred=str(mred),
                length_vectors=len(units), surfaces=len(surfaces))
    return surfaces
