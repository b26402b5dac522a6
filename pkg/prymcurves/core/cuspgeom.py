"""
Cusp geometry of a pair of suitable directions.

A torsion solution fixes the horizontal widths (1, r2) and heights (1, h2)
up to scale, together with finitely many candidate lengths of a saddle
connection joining the two kinds of zeros. Pairing a normalized horizontal
direction with a scaled vertical one and using that intersection numbers
are Galois invariant determines the reduced intersection matrix.
"""

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .exactmath import QuadElt
from .exceptions import InvalidInputError, ParityError, SingularSystem
from .logger import get_logger, log_performance
from .models import Crossing, CuspTupleRecord, GeometryRecord, QuadModel, Stratum
from .parallel import run_units
from .rou_solver import RelationSolution

logger = get_logger("prymcurves.CuspGeometry")

K_RANGE = range(-2, 3)
ELL_RANGE = range(-1, 2)

Matrix3 = Tuple[Tuple[int, int, int], Tuple[int, int, int], Tuple[int, int, int]]


def height_from_width(r2: QuadElt) -> QuadElt:
    """Height of C2 with h1 = r1 = 1, from the flux condition 2 h1^s r1 + r2 h2^s = 0."""
    n = r2.norm()
    if n == 0:
        raise InvalidInputError(f"width {r2} has norm zero")
    return (-2) / r2.conj()


@dataclass(frozen=True)
class CuspTuple:
    """Normalized cusp data of one suitable direction plus one relative-period length."""
    source: RelationSolution
    k: int
    ell: int
    r2: QuadElt
    h2: QuadElt
    gamma: QuadElt

    @property
    def D0(self) -> int:
        return self.r2.D0

    def flux_holds(self) -> bool:
        return 2 * QuadElt(Fraction(1)) + self.r2 * self.h2.conj() == 0

    def sort_key(self) -> tuple:
        return self.source.sort_key() + (self.k, self.ell)

    def to_record(self) -> CuspTupleRecord:
        return CuspTupleRecord(source=self.source.to_record(), k=self.k, ell=self.ell,
                               r2=QuadModel.of(self.r2), h2=QuadModel.of(self.h2),
                               gamma=QuadModel.of(self.gamma))

    @classmethod
    def from_record(cls, record: CuspTupleRecord) -> 'CuspTuple':
        return cls(RelationSolution.from_record(record.source), record.k, record.ell,
                   record.r2.value(), record.h2.value(), record.gamma.value())


def relative_period_base(sol: RelationSolution) -> QuadElt:
    """Period of the path between the two kinds of zeros before adding residues."""
    c = 1 if sol.stratum is Stratum.PRYM211 else 2
    return Fraction(-c * sol.eXY, sol.N) + sol.r * Fraction(c * sol.eU, sol.N)


def relative_periods(sol: RelationSolution) -> List[CuspTuple]:
    """Every (k, ell) shift whose length lies strictly between 0 and max(1, r2)."""
    r2 = sol.r
    h2 = height_from_width(r2)
    base = relative_period_base(sol)
    upper = r2 if r2 > 1 else QuadElt(Fraction(1))
    tuples = []
    for k in K_RANGE:
        for ell in ELL_RANGE:
            gamma = base + k + r2 * ell
            if 0 < gamma < upper:
                tuples.append(CuspTuple(sol, k, ell, r2, h2, gamma))
    return tuples


@dataclass(frozen=True)
class ReducedMatrix:
    """[[m11 + m13, 2 m12], [m21, m22]] of a Prym-symmetric intersection matrix."""
    m11p13: int
    m12x2: int
    m21: int
    m22: int

    def __post_init__(self):
        if min(self.m11p13, self.m12x2, self.m21, self.m22) < 0:
            raise InvalidInputError(f"negative entry in reduced matrix {self.rows()}")
        if self.m12x2 % 2:
            raise ParityError(f"(1,2) entry {self.m12x2} of reduced matrix is odd")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> 'ReducedMatrix':
        (a, b), (c, d) = rows
        return cls(int(a), int(b), int(c), int(d))

    def rows(self) -> List[List[int]]:
        return [[self.m11p13, self.m12x2], [self.m21, self.m22]]

    def determinant(self) -> int:
        return self.m11p13 * self.m22 - self.m12x2 * self.m21

    def width_system(self) -> List[List[int]]:
        """Matrix A with w(C)^red = A h(Z)^red."""
        return [[self.m11p13, self.m12x2 // 2], [2 * self.m21, self.m22]]

    def __str__(self) -> str:
        return f"[[{self.m11p13},{self.m12x2}],[{self.m21},{self.m22}]]"


def full_matrix_splits(mred: ReducedMatrix) -> List[Matrix3]:
    """All symmetric 3x3 intersection matrices reducing to ``mred``."""
    half = mred.m12x2 // 2
    splits = []
    for m11 in range(mred.m11p13 + 1):
        m13 = mred.m11p13 - m11
        splits.append((
            (m11, half, m13),
            (mred.m21, mred.m22, mred.m21),
            (m13, half, m11),
        ))
    return splits


def _solve_2x2(A: Sequence[Sequence], rhs: Sequence) -> Tuple[QuadElt, QuadElt]:
    det = A[0][0] * A[1][1] - A[0][1] * A[1][0]
    if det == 0:
        raise SingularSystem("2x2 system is singular")
    x = (rhs[0] * A[1][1] - A[0][1] * rhs[1]) / det
    y = (A[0][0] * rhs[1] - A[1][0] * rhs[0]) / det
    return x, y


@dataclass(frozen=True)
class GeometryPair:
    """Normalized horizontal direction, scaled vertical direction and their intersection data."""
    stratum: Stratum
    horizontal: CuspTuple
    vertical: CuspTuple
    crossing: Crossing
    wZ1: QuadElt
    wZ2: QuadElt
    hZ1: QuadElt
    hZ2: QuadElt
    mred: ReducedMatrix
    full_matrices: Tuple[Matrix3, ...] = field(default=())

    @property
    def D0(self) -> int:
        return self.horizontal.D0

    @property
    def r2(self) -> QuadElt:
        return self.horizontal.r2

    @property
    def h2(self) -> QuadElt:
        return self.horizontal.h2

    @property
    def beta_length(self) -> QuadElt:
        return crossing_target(self.stratum, self.crossing, self.h2)

    def widths_C(self) -> Tuple[QuadElt, QuadElt, QuadElt]:
        one = QuadElt(Fraction(1))
        return (one, self.r2, one)

    def heights_C(self) -> Tuple[QuadElt, QuadElt, QuadElt]:
        one = QuadElt(Fraction(1))
        return (one, self.h2, one)

    def widths_Z(self) -> Tuple[QuadElt, QuadElt, QuadElt]:
        return (self.wZ1, self.wZ2, self.wZ1)

    def heights_Z(self) -> Tuple[QuadElt, QuadElt, QuadElt]:
        return (self.hZ1, self.hZ2, self.hZ1)

    def identities_hold(self) -> bool:
        """w(Z) = M^T h(C) and w(C) = M h(Z) for every stored split, plus the conjugate reduced equation."""
        hC, wC, hZ, wZ = self.heights_C(), self.widths_C(), self.heights_Z(), self.widths_Z()
        for M in self.full_matrices:
            for j in range(3):
                if sum((hC[i] * M[i][j] for i in range(3)), QuadElt(Fraction(0))) != wZ[j]:
                    return False
            for i in range(3):
                if sum((hZ[j] * M[i][j] for j in range(3)), QuadElt(Fraction(0))) != wC[i]:
                    return False
        (a, b), (c, d) = self.mred.rows()
        h1s, h2s = QuadElt(Fraction(1)), self.h2.conj()
        return (a * h1s + c * h2s == self.wZ1.conj()) and (b * h1s + d * h2s == self.wZ2.conj())

    def sort_key(self) -> tuple:
        return (self.D0, tuple(sum(self.mred.rows(), [])), self.crossing.value, self.r2, self.wZ1,
                self.vertical.sort_key())

    def dedup_key(self) -> tuple:
        return (self.stratum, self.mred, self.crossing, self.r2, self.wZ1, self.wZ2)

    def to_record(self) -> GeometryRecord:
        return GeometryRecord(
            stratum=self.stratum,
            horizontal=self.horizontal.to_record(),
            vertical=self.vertical.to_record(),
            crossing=self.crossing,
            wZ1=QuadModel.of(self.wZ1), wZ2=QuadModel.of(self.wZ2),
            hZ1=QuadModel.of(self.hZ1), hZ2=QuadModel.of(self.hZ2),
            mred=self.mred.rows(),
            full_matrices=[[list(row) for row in M] for M in self.full_matrices],
        )

    @classmethod
    def from_record(cls, record: GeometryRecord) -> 'GeometryPair':
        return cls(
            stratum=record.stratum,
            horizontal=CuspTuple.from_record(record.horizontal),
            vertical=CuspTuple.from_record(record.vertical),
            crossing=record.crossing,
            wZ1=record.wZ1.value(), wZ2=record.wZ2.value(),
            hZ1=record.hZ1.value(), hZ2=record.hZ2.value(),
            mred=ReducedMatrix.from_rows(record.mred),
            full_matrices=tuple(tuple(tuple(row) for row in M) for M in record.full_matrices),
        )


def crossing_target(stratum: Stratum, crossing: Crossing, h2: QuadElt) -> QuadElt:
    """Length of the vertical saddle connection when it crosses the given horizontal cylinder(s)."""
    if crossing is Crossing.C2:
        return h2
    return QuadElt(Fraction(1 if stratum is Stratum.PRYM211 else 2))


def _reduced_matrix_entries(wZ: Tuple[QuadElt, QuadElt], h2: QuadElt) -> List[List[QuadElt]]:
    """Solve [[wZ1, wZ1^s], [wZ2, wZ2^s]] = T [[1, 1], [h2, h2^s]] for T = (M^red)^T."""
    h2s = h2.conj()
    det = h2s - h2
    if det == 0:
        raise SingularSystem(f"heights (1, {h2}) are rationally dependent")
    rows = []
    for w in wZ:
        ws = w.conj()
        rows.append([(w * h2s - ws * h2) / det, (ws - w) / det])
    return rows


def reduced_matrix_from_pair(hor: CuspTuple, vert_source: CuspTuple, crossing: Crossing,
                             reasons: Optional[Counter] = None) -> Optional[GeometryPair]:
    """
    Intersection data for a normalized horizontal tuple and a vertical tuple
    scaled so that its saddle connection has the crossing length.

    Returns None when the reduced matrix is not a nonnegative integral matrix
    with even (1,2) entry or when the vertical heights are inconsistent;
    ``reasons`` collects why.
    """
    reasons = reasons if reasons is not None else Counter()
    stratum = hor.source.stratum
    if hor.D0 != vert_source.D0:
        raise InvalidInputError(f"trace fields differ: {hor.D0} and {vert_source.D0}")
    target = crossing_target(stratum, crossing, hor.h2)
    scale = target / vert_source.gamma
    wZ1, wZ2 = scale, scale * vert_source.r2

    try:
        transpose = _reduced_matrix_entries((wZ1, wZ2), hor.h2)
    except SingularSystem as e:
        reasons['singular'] += 1
        logger.debug("Singular conjugate system", error=str(e))
        return None
    entries = [transpose[0][0], transpose[1][0], transpose[0][1], transpose[1][1]]
    if not all(x.is_rational and x.a.denominator == 1 and x.a >= 0 for x in entries):
        reasons['non_integral'] += 1
        return None
    m11p13, m12x2, m21, m22 = (int(x.a) for x in entries)
    if m12x2 % 2:
        reasons['odd_m12'] += 1
        return None
    mred = ReducedMatrix(m11p13, m12x2, m21, m22)
    if mred.determinant() == 0:
        reasons['singular'] += 1
        logger.debug("Degenerate reduced matrix", mred=str(mred))
        return None

    try:
        hZ1, hZ2 = _solve_2x2(mred.width_system(), (QuadElt(Fraction(1)), hor.r2))
    except SingularSystem:
        reasons['singular'] += 1
        return None
    if not (hZ1 > 0 and hZ2 > 0) or hZ2 / hZ1 != vert_source.h2:
        reasons['height_mismatch'] += 1
        return None

    return GeometryPair(stratum, hor, vert_source, crossing, wZ1, wZ2, hZ1, hZ2, mred,
                        tuple(full_matrix_splits(mred)))


def _pair_unit(unit: Tuple[CuspTuple, Tuple[CuspTuple, ...]]) -> Tuple[List[GeometryPair], Dict[str, int]]:
    hor, verticals = unit
    reasons: Counter = Counter()
    found = []
    for vert in verticals:
        for crossing in (Crossing.C1, Crossing.C2):
            g = reduced_matrix_from_pair(hor, vert, crossing, reasons)
            if g is not None:
                found.append(g)
    return found, dict(reasons)


def _crossing_filter(stratum: Stratum, geometries: List[GeometryPair]) -> List[GeometryPair]:
    """Every surface has a suitable direction whose saddle connection crosses C1 (Prym(2,1,1)) or C2 (Prym(2,2)) once."""
    kept = Crossing.C1 if stratum is Stratum.PRYM211 else Crossing.C2
    dropped = sum(1 for g in geometries if g.crossing is not kept)
    if dropped:
        logger.debug("Discarding redundant crossings", stratum=stratum.value, crossing=kept.value, dropped=dropped)
    return [g for g in geometries if g.crossing is kept]


@log_performance(logger, "geometry enumeration")
def enumerate_geometries(stratum: Stratum, solutions: Sequence[RelationSolution], jobs: int = 1,
                         progress: bool = False) -> List[GeometryPair]:
    """
    Pair every normalized horizontal tuple with every vertical tuple of the
    same trace field, under both crossing options, and keep the admissible
    distinct geometries in canonical order.

    A horizontal tuple only contributes (r2, h2), so one representative per
    width is paired; vertical tuples differ by their saddle connection too.
    """
    solutions = [s for s in solutions if s.stratum is stratum]
    tuples = sorted((t for s in solutions for t in relative_periods(s)), key=CuspTuple.sort_key)
    horizontals: Dict[QuadElt, CuspTuple] = {}
    verticals: Dict[Tuple[QuadElt, QuadElt], CuspTuple] = {}
    for t in tuples:
        horizontals.setdefault(t.r2, t)
        verticals.setdefault((t.r2, t.gamma), t)
    logger.info("Cusp tuples", stratum=stratum.value, solutions=len(solutions), tuples=len(tuples),
                widths=len(horizontals), vertical_classes=len(verticals))

    units = []
    for hor in sorted(horizontals.values(), key=CuspTuple.sort_key):
        same_field = tuple(v for v in sorted(verticals.values(), key=CuspTuple.sort_key) if v.D0 == hor.D0)
        units.append((hor, same_field))
    results = run_units(_pair_unit, units, jobs=jobs, desc="geometry pairs", progress=progress)

    reasons: Counter = Counter()
    found: List[GeometryPair] = []
    for geometries, why in results:
        found.extend(geometries)
        reasons.update(why)
    found = _crossing_filter(stratum, found)

    unique: Dict[tuple, GeometryPair] = {}
    for g in sorted(found, key=GeometryPair.sort_key):
        unique.setdefault(g.dedup_key(), g)
    result = sorted(unique.values(), key=GeometryPair.sort_key)
    logger.info("Geometries found", stratum=stratum.value, geometries=len(result),
                matrices=len({g.mred for g in result}), rejected=dict(reasons))
    return result


def distinct_matrices(geometries: Sequence[GeometryPair]) -> List[Tuple[ReducedMatrix, QuadElt]]:
    """Distinct (M^red, r2) in canonical order."""
    seen = {}
    for g in sorted(geometries, key=GeometryPair.sort_key):
        seen.setdefault((g.mred, g.r2), None)
    return list(seen)
