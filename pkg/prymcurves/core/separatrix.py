"""
Horizontal separatrix diagrams of three-cylinder suitable directions.

A diagram is stored as the bottom boundaries of C1, C2 and C3, each a cyclic
sequence of horizontal saddle connections read left to right, together with
the Prym involution on saddle connections. Top boundaries are not stored:
the involution turns the bottom of C_i into the top of rho(C_i) read
backwards, with rho fixing C2 and exchanging C1 and C3. Diagrams are
classified up to relabeling and the reflection x -> -x.
"""

import dataclasses
import functools
import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .exceptions import InvalidInputError
from .logger import get_logger, log_performance
from .models import Stratum

logger = get_logger("prymcurves.Separatrix")

EDGE_COUNT = {Stratum.PRYM22: 6, Stratum.PRYM211: 7}
FIXED_EDGES = {Stratum.PRYM22: 2, Stratum.PRYM211: 1}
PRYM_FIXED_POINTS = 4
CYLINDER_SWAP = (2, 1, 0)

Boundary = Tuple[int, ...]


def standard_involution(stratum: Stratum) -> Tuple[int, ...]:
    """Involution on edge labels: the first edges are fixed, the rest are swapped in pairs."""
    m, fixed = EDGE_COUNT[stratum], FIXED_EDGES[stratum]
    rho = list(range(m))
    for e in range(fixed, m, 2):
        rho[e], rho[e + 1] = e + 1, e
    return tuple(rho)


def _rotate(seq: Boundary, k: int) -> Boundary:
    return seq[k:] + seq[:k]


@dataclass(frozen=True)
class SeparatrixDiagram:
    stratum: Stratum
    bottoms: Tuple[Boundary, Boundary, Boundary]
    rho: Tuple[int, ...]
    index: int = dataclasses.field(default=0, compare=False)

    def __post_init__(self):
        edges = sorted(itertools.chain(*self.bottoms))
        if edges != list(range(len(self.rho))) or any(not b for b in self.bottoms):
            raise InvalidInputError(f"bottoms {self.bottoms} do not partition the edges")
        if any(self.rho[self.rho[e]] != e for e in range(len(self.rho))):
            raise InvalidInputError(f"{self.rho} is not an involution")

    @property
    def n_edges(self) -> int:
        return len(self.rho)

    @functools.cached_property
    def tops(self) -> Tuple[Boundary, Boundary, Boundary]:
        return tuple(
            tuple(self.rho[e] for e in reversed(self.bottoms[CYLINDER_SWAP[i]]))
            for i in range(3)
        )

    @functools.cached_property
    def _bottom_at(self) -> Dict[int, Tuple[int, int]]:
        return {e: (i, p) for i, seq in enumerate(self.bottoms) for p, e in enumerate(seq)}

    @functools.cached_property
    def _top_at(self) -> Dict[int, Tuple[int, int]]:
        return {e: (i, p) for i, seq in enumerate(self.tops) for p, e in enumerate(seq)}

    def bottom_cylinder(self, e: int) -> int:
        """Cylinder lying above edge e."""
        return self._bottom_at[e][0]

    def top_cylinder(self, e: int) -> int:
        """Cylinder lying below edge e."""
        return self._top_at[e][0]

    def next_bottom(self, e: int) -> int:
        i, p = self._bottom_at[e]
        seq = self.bottoms[i]
        return seq[(p + 1) % len(seq)]

    def prev_bottom(self, e: int) -> int:
        i, p = self._bottom_at[e]
        seq = self.bottoms[i]
        return seq[p - 1]

    def next_top(self, e: int) -> int:
        i, p = self._top_at[e]
        seq = self.tops[i]
        return seq[(p + 1) % len(seq)]

    @functools.cached_property
    def vertices(self) -> Tuple[Tuple[int, ...], ...]:
        """
        Cycles of edge starts around each vertex.

        Turning counterclockwise around the left endpoint of f crosses the
        cylinder above f to the edge before f on that bottom, then the
        cylinder below that edge to the edge after it on the top.
        """
        seen = set()
        cycles = []
        for f in range(self.n_edges):
            if f in seen:
                continue
            cycle = [f]
            seen.add(f)
            g = self.next_top(self.prev_bottom(f))
            while g != f:
                cycle.append(g)
                seen.add(g)
                g = self.next_top(self.prev_bottom(g))
            cycles.append(tuple(cycle))
        return tuple(cycles)

    @functools.cached_property
    def vertex_of(self) -> Tuple[int, ...]:
        """Vertex index of the start of each edge."""
        out = [0] * self.n_edges
        for v, cycle in enumerate(self.vertices):
            for f in cycle:
                out[f] = v
        return tuple(out)

    def start_vertex(self, e: int) -> int:
        return self.vertex_of[e]

    def end_vertex(self, e: int) -> int:
        return self.vertex_of[self.next_bottom(e)]

    def vertex_order(self, v: int) -> int:
        return len(self.vertices[v]) - 1

    @property
    def zero_orders(self) -> Tuple[int, ...]:
        return tuple(sorted((len(c) - 1 for c in self.vertices), reverse=True))

    @property
    def genus(self) -> int:
        return (sum(self.zero_orders) + 2) // 2

    def euler_characteristic(self) -> int:
        # cylinders contribute nothing
        return len(self.vertices) - self.n_edges

    def rho_on_vertices(self) -> Optional[Tuple[int, ...]]:
        """Induced action on vertices, or None when rho does not respect the ribbon structure."""
        image: Dict[int, int] = {}
        for f in range(self.n_edges):
            v, w = self.vertex_of[f], self.end_vertex(self.rho[f])
            if image.setdefault(v, w) != w:
                return None
        return tuple(image[v] for v in range(len(self.vertices)))

    def fixed_edges(self) -> List[int]:
        return [e for e in range(self.n_edges) if self.rho[e] == e]

    def fixed_point_count(self) -> int:
        """Fixed points of rho: two inside C2, edge midpoints and fixed vertices."""
        action = self.rho_on_vertices()
        fixed_vertices = 0 if action is None else sum(1 for v, w in enumerate(action) if v == w)
        return 2 + len(self.fixed_edges()) + fixed_vertices

    def boundary_lengths(self) -> Tuple[int, int, int]:
        return tuple(len(b) for b in self.bottoms)

    def is_irreducible(self) -> bool:
        """
        Connectedness of the degenerate curve: nodes are the top and bottom
        halves of each cylinder, glued along every saddle connection.
        """
        rows, cols = [], []
        for e in range(self.n_edges):
            rows.append(3 + self.bottom_cylinder(e))
            cols.append(self.top_cylinder(e))
        graph = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(6, 6))
        n_components, _ = connected_components(graph, directed=False)
        return n_components == 1

    def length_orbits(self) -> List[Tuple[int, ...]]:
        return sorted({tuple(sorted({e, self.rho[e]})) for e in range(self.n_edges)})

    def lengths_feasible(self) -> bool:
        """C1 and C3 can get equal widths with positive rho-invariant lengths."""
        coefficients = []
        for orbit in self.length_orbits():
            where = [self.bottom_cylinder(e) for e in orbit]
            coefficients.append(where.count(0) - where.count(2))
        if all(c == 0 for c in coefficients):
            return True
        return any(c > 0 for c in coefficients) and any(c < 0 for c in coefficients)

    def has_relative_witness(self) -> bool:
        """A horizontal saddle connection of the kind that makes the direction suitable."""
        if self.stratum is Stratum.PRYM211:
            return any(
                {self.vertex_order(self.start_vertex(e)), self.vertex_order(self.end_vertex(e))} == {1, 2}
                for e in range(self.n_edges)
            )
        return any(self.start_vertex(e) != self.end_vertex(e) for e in self.fixed_edges())

    def _zero_action_ok(self, action: Tuple[int, ...]) -> bool:
        for v, w in enumerate(action):
            fixed = v == w
            if self.stratum is Stratum.PRYM22 and fixed:
                return False
            if self.stratum is Stratum.PRYM211 and fixed != (self.vertex_order(v) == 2):
                return False
        return True

    def is_valid(self) -> bool:
        if self.zero_orders != self.stratum.zero_orders:
            return False
        action = self.rho_on_vertices()
        if action is None or not self._zero_action_ok(action):
            return False
        return (self.fixed_point_count() == PRYM_FIXED_POINTS and self.is_irreducible()
                and self.lengths_feasible() and self.has_relative_witness())

    def mirror(self) -> 'SeparatrixDiagram':
        """Image under the reflection x -> -x: every boundary is read right to left."""
        return SeparatrixDiagram(self.stratum, tuple(tuple(reversed(b)) for b in self.bottoms),
                                 self.rho, self.index)

    def is_mirror_symmetric(self) -> bool:
        return self._relabel_form() == self.mirror()._relabel_form()

    def canonical_form(self) -> Tuple[Tuple[int, int, int], Tuple[int, ...]]:
        """
        Form shared by a diagram, its relabelings and its mirror image.

        The reflection carries Prym eigenforms for O_D to Prym eigenforms for
        O_D and Teichmüller curves to Teichmüller curves, so a diagram and its
        mirror image are one case.
        """
        return min(self._relabel_form(), self.mirror()._relabel_form())

    def _relabel_form(self) -> Tuple[Tuple[int, int, int], Tuple[int, ...]]:
        """Minimum over exchanging C1 with C3, rotating each bottom and relabeling edges in reading order."""
        best = None
        for order in ((0, 1, 2), (2, 1, 0)):
            b1, b2, b3 = (self.bottoms[i] for i in order)
            for r1, r2, r3 in itertools.product(range(len(b1)), range(len(b2)), range(len(b3))):
                seqs = (_rotate(b1, r1), _rotate(b2, r2), _rotate(b3, r3))
                reading = list(itertools.chain(*seqs))
                label = {e: k for k, e in enumerate(reading)}
                key = (tuple(len(s) for s in seqs), tuple(label[self.rho[e]] for e in reading))
                if best is None or key < best:
                    best = key
        return best

    @classmethod
    def from_canonical(cls, stratum: Stratum, form: Tuple[Tuple[int, int, int], Tuple[int, ...]],
                       index: int = 0) -> 'SeparatrixDiagram':
        (k1, k2, k3), rho = form
        edges = tuple(range(k1 + k2 + k3))
        bottoms = (edges[:k1], edges[k1:k1 + k2], edges[k1 + k2:])
        return cls(stratum, bottoms, tuple(rho), index)

    def invariant_key(self) -> tuple:
        lengths = self.boundary_lengths()
        fixed_on_c2 = sum(1 for e in self.bottoms[1] if self.rho[e] == e)
        return (lengths[1], tuple(sorted((lengths[0], lengths[2]))), fixed_on_c2, self.canonical_form())

    def is_sd4_shape(self) -> bool:
        """
        The diagram studied in detail for Prym(2,2). C2 has bottom (A, x) with
        A fixed; the bottom of one exchanged cylinder is (rho x, y) and the
        bottom of the other is (P, rho y) with P fixed.
        """
        if self.stratum is not Stratum.PRYM22 or self.boundary_lengths() != (2, 2, 2):
            return False
        fixed = set(self.fixed_edges())
        mid = self.bottoms[1]
        if len([e for e in mid if e in fixed]) != 1:
            return False
        x = next(e for e in mid if e not in fixed)
        for near, far in ((0, 2), (2, 0)):
            near_seq, far_seq = self.bottoms[near], self.bottoms[far]
            if self.rho[x] not in near_seq:
                continue
            y = next(e for e in near_seq if e != self.rho[x])
            if y not in fixed and self.rho[y] in far_seq and any(e in fixed for e in far_seq):
                return True
        return False

    def label(self) -> str:
        return f"SD{self.index}" if self.index else "SD?"

    def describe(self) -> str:
        parts = [f"C{i + 1}:{''.join(map(str, b))}" for i, b in enumerate(self.bottoms)]
        return f"{self.label()} " + " ".join(parts) + " rho:" + "".join(map(str, self.rho))


def _blocks(perm: Tuple[int, ...]):
    m = len(perm)
    for i in range(1, m - 1):
        for j in range(i + 1, m):
            blocks = (perm[:i], perm[i:j], perm[j:])
            if all(b[0] == min(b) for b in blocks):
                yield blocks


@functools.lru_cache(maxsize=None)
def _enumerate(stratum: Stratum) -> Tuple[SeparatrixDiagram, ...]:
    rho = standard_involution(stratum)
    m = len(rho)
    forms = set()
    checked = 0
    for perm in itertools.permutations(range(m)):
        for bottoms in _blocks(perm):
            checked += 1
            diagram = SeparatrixDiagram(stratum, bottoms, rho)
            if diagram.is_valid():
                forms.add(diagram.canonical_form())
    diagrams = sorted((SeparatrixDiagram.from_canonical(stratum, f) for f in forms),
                      key=SeparatrixDiagram.invariant_key)
    diagrams = tuple(dataclasses.replace(d, index=k) for k, d in enumerate(diagrams, start=1))
    logger.info("Separatrix diagrams", stratum=stratum.value, gluings=checked, diagrams=len(diagrams),
                mirror_symmetric=sum(1 for d in diagrams if d.is_mirror_symmetric()))
    return diagrams


@log_performance(logger, "separatrix diagram enumeration")
def enumerate_separatrix_diagrams(stratum: Stratum) -> List[SeparatrixDiagram]:
    """Every admissible horizontal diagram up to relabeling and reflection, indexed from 1 in invariant order."""
    return list(_enumerate(stratum))


def diagram_by_index(stratum: Stratum, index: int) -> SeparatrixDiagram:
    diagrams = _enumerate(stratum)
    if not 1 <= index <= len(diagrams):
        raise InvalidInputError(f"{stratum.label} has diagrams 1..{len(diagrams)}, got {index}")
    return diagrams[index - 1]


def sd4_diagram() -> Optional[SeparatrixDiagram]:
    matches = [d for d in _enumerate(Stratum.PRYM22) if d.is_sd4_shape()]
    if len(matches) != 1:
        logger.warning("SD4 shape is not unique", matches=len(matches))
    return matches[0] if matches else None
