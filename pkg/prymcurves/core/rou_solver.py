"""
Solutions of the torsion equations in roots of unity.

Both equations are quadratic in the width ratio r with coefficients that
are integer combinations of zeta_XY^alpha * zeta_U^beta. The search runs
over the admissible orders N, prunes (N, e_XY, e_U) triples whose elimination
system is inconsistent modulo a prime, and solves the survivors exactly in
Q(zeta_N).
"""

import functools
import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np
import sympy
from sympy import Matrix, Poly, divisors, factor_list, factorint, primerange
from sympy.polys.domains import QQ

from .exactmath import (
    CycloElt,
    QuadElt,
    as_quadratic,
    cyclo_field,
    quadratic_conductor,
    rational_roots,
    sqrt_in_cyclotomic,
    squarefree_decomposition,
    to_fraction,
    to_sympy_rational,
)
from .exceptions import IdentityCheckFailed, InvalidInputError, UnderdeterminedSystem
from .logger import get_logger, log_performance
from .models import QuadModel, SolutionRecord, SolverOptions, Stratum
from .parallel import run_units

logger = get_logger("prymcurves.RouSolver")

# (alpha, beta, coefficient) stands for coefficient * zeta_XY^alpha * zeta_U^beta
Terms = Tuple[Tuple[int, int, int], ...]

COEFFICIENT_TERMS: Dict[Stratum, Tuple[Terms, Terms, Terms]] = {
    # a = zX (zU - 1)(zU + 1)^2, b = -zU (zU + 1)(zX^2 - 1), c = 2 zU (zU - 1)(zX - 1)^2
    Stratum.PRYM211: (
        ((1, 3, 1), (1, 2, 1), (1, 1, -1), (1, 0, -1)),
        ((2, 2, -1), (2, 1, -1), (0, 2, 1), (0, 1, 1)),
        ((2, 2, 2), (1, 2, -4), (0, 2, 2), (2, 1, -2), (1, 1, 4), (0, 1, -2)),
    ),
    # a = zX (1 + zX)(zU^2 - 1)^2, b = zX (1 - zX)(zU^4 - 1), c = -2 zU^2 (zX - 1)^2 (zX + 1)
    Stratum.PRYM22: (
        ((1, 4, 1), (1, 2, -2), (1, 0, 1), (2, 4, 1), (2, 2, -2), (2, 0, 1)),
        ((1, 4, 1), (1, 0, -1), (2, 4, -1), (2, 0, 1)),
        ((3, 2, -2), (2, 2, 2), (1, 2, 2), (0, 2, -2)),
    ),
}

# Published generators of the order set for relations of length 8 over a
# quadratic field: N(8) consists of the divisors of 24 * m for these m.
PUBLISHED_N8_FACTORS = (17, 5 * 13, 7 * 11, 5 * 11, 5 * 7)

PRIME = 2 ** 31 - 1
# Consistency is re-checked modulo the second prime before an exponent is dropped.
PREFILTER_PRIMES = (PRIME, 2 ** 31 - 19)
PROJECTION_ROWS = 8


@dataclass(frozen=True, eq=False)
class RelationSolution:
    N: int
    eXY: int
    eU: int
    r: QuadElt
    stratum: Stratum

    def key(self) -> tuple:
        return (self.stratum.value, self.N, self.eXY, self.eU, self.r.D0, self.r.a, self.r.b)

    def sort_key(self) -> tuple:
        return (self.N, self.eXY, self.eU, self.r.D0, self.r)

    def __eq__(self, other):
        if not isinstance(other, RelationSolution):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    @property
    def D0(self) -> int:
        return self.r.D0

    def conjugate(self) -> 'RelationSolution':
        return RelationSolution(self.N, self.N - self.eXY, self.N - self.eU, self.r, self.stratum)

    def to_record(self) -> SolutionRecord:
        return SolutionRecord(stratum=self.stratum, N=self.N, eXY=self.eXY, eU=self.eU, r=QuadModel.of(self.r))

    @classmethod
    def from_record(cls, record: SolutionRecord) -> 'RelationSolution':
        return cls(record.N, record.eXY, record.eU, record.r.value(), record.stratum)

    def __repr__(self) -> str:
        return f"RelationSolution({self.stratum.value}: N={self.N}, eXY={self.eXY}, eU={self.eU}, r={self.r})"


# ---------------------------------------------------------------------------
# Order sets
# ---------------------------------------------------------------------------

def _orders_from_bound(k: int, d: int, weight_gcd: int) -> Set[int]:
    """Orders N allowed by the prime-power rule and sum_p ((p-1)/gcd(p-1, weight_gcd) - 1) <= k - 2."""
    budget = k - 2
    primes = []
    for p in primerange(2, d * weight_gcd * (k - 1) + 2):
        cost = (p - 1) // gcd(p - 1, weight_gcd) - 1
        if cost <= budget:
            max_exp = 1 + factorint(2 * d).get(p, 0)
            primes.append((p, cost, max_exp))
    orders = {1}

    def extend(index: int, value: int, spent: int) -> None:
        for j in range(index, len(primes)):
            p, cost, max_exp = primes[j]
            if spent + cost > budget:
                continue
            power = 1
            for _ in range(max_exp):
                power *= p
                orders.add(value * power)
                extend(j + 1, value * power, spent + cost)

    extend(0, 1, 0)
    return orders


def _published_orders(k: int, d: int) -> Set[int]:
    if (k, d) != (8, 2):
        return set()
    return {n for m in PUBLISHED_N8_FACTORS for n in divisors(24 * m)}


@functools.lru_cache(maxsize=None)
def admissible_orders(k: int, d: int) -> frozenset:
    """
    Orders of roots of unity allowed in an irreducible K-relation of length k
    over a field of degree d.

    The size bound is read with gcd(p - 1, d). For (k, d) = (8, 2) that
    reading drops p = 17, which the published list of orders contains, so the
    published orders are added and the difference is logged.
    """
    if k < 2 or d < 1:
        raise InvalidInputError(f"need k >= 2 and d >= 1, got k={k}, d={d}")
    literal = _orders_from_bound(k, d, d)
    published = _published_orders(k, d)
    missing = published - literal
    if missing:
        logger.warning("Published orders outside the literal bound, taking the union",
                       k=k, d=d, missing=sorted(missing)[:8], count=len(missing))
    return frozenset(literal | published)


def order_set_report(k: int = 8, d: int = 2) -> Dict[str, List[int]]:
    """Both readings of the size bound next to the published list and the looped set."""
    literal = _orders_from_bound(k, d, d)
    wide = _orders_from_bound(k, d, 2 * d)
    published = _published_orders(k, d)

    def maximal(s):
        return sorted(n for n in s if not any(m != n and m % n == 0 for m in s))

    return {
        'literal_maximal': maximal(literal),
        'wide_maximal': maximal(wide),
        'published_maximal': maximal(published),
        'looped_maximal': maximal(admissible_orders(k, d)),
        'published_not_literal': sorted(published - literal),
        'wide_not_published': maximal(wide - published) if published else [],
    }


def stratum_orders(stratum: Stratum) -> List[int]:
    """Orders N looped for a stratum (N >= 3 so that zeta_U != +-1 is possible)."""
    n8 = admissible_orders(8, 2)
    if stratum is Stratum.PRYM211:
        orders = set(n8)
    else:
        n4 = admissible_orders(4, 2)
        orders = set(n8) | {2 * n for n in n4} | {4 * n for n in n4}
    return sorted(n for n in orders if n >= 3)


# ---------------------------------------------------------------------------
# Coefficients and identity check
# ---------------------------------------------------------------------------

def _terms_to_cyclo(terms: Terms, N: int, eXY: int, eU: int) -> CycloElt:
    exps: Dict[int, int] = {}
    for alpha, beta, coeff in terms:
        e = (alpha * eXY + beta * eU) % N
        exps[e] = exps.get(e, 0) + coeff
    return CycloElt.from_exponents(N, exps)


def is_excluded(stratum: Stratum, N: int, eXY: int, eU: int) -> bool:
    """Degenerate roots of unity that carry no suitable cusp."""
    if eXY % N == 0 or eU % N == 0 or (2 * eU) % N == 0:
        return True
    if stratum is Stratum.PRYM22 and (2 * eXY) % N == 0 and (4 * eU) % N == 0:
        return True
    return False


def quadratic_coefficients(stratum: Stratum, N: int, eXY: int, eU: int) -> Tuple[CycloElt, CycloElt, CycloElt]:
    """(a, b, c) in Q(zeta_N) with the torsion equation equal to a r^2 + b r + c."""
    if not (1 <= eXY < N and 1 <= eU < N):
        raise InvalidInputError(f"exponents must lie in [1, {N - 1}], got ({eXY}, {eU})")
    a_t, b_t, c_t = COEFFICIENT_TERMS[stratum]
    return (_terms_to_cyclo(a_t, N, eXY, eU), _terms_to_cyclo(b_t, N, eXY, eU),
            _terms_to_cyclo(c_t, N, eXY, eU))


ZETA_XY, ZETA_U, R = sympy.symbols('zeta_XY zeta_U r')


def torsion_polynomial(stratum: Stratum) -> sympy.Expr:
    """Left-hand side of the torsion equation in the symbols ZETA_XY, ZETA_U, R."""
    parts = []
    for power, terms in zip((2, 1, 0), COEFFICIENT_TERMS[stratum]):
        coeff = sum(c * ZETA_XY ** al * ZETA_U ** be for al, be, c in terms)
        parts.append(coeff * R ** power)
    return sympy.expand(sum(parts))


def _opposite_residue_numerators(stratum: Stratum, X: sympy.Symbol) -> Tuple[sympy.Expr, sympy.Expr]:
    """
    Opposite-residue conditions after the substitution x = (1-X)/(1+X),
    y = (1-Y)/(1+Y), Y = zeta_XY X, u = (1-zeta_U)/(1+zeta_U), with the width
    of the first cylinder normalized to 1.
    """
    x = (1 - X) / (1 + X)
    y = (1 - ZETA_XY * X) / (1 + ZETA_XY * X)
    u = (1 - ZETA_U) / (1 + ZETA_U)
    if stratum is Stratum.PRYM211:
        e1 = u * (y - x) + R * x * y
        e2 = (x ** 2 * y - x * y ** 2 - u ** 2 * x + x + u ** 2 * y - y) + R * u * (1 - x ** 2 - y ** 2)
    else:
        e1 = (x - y) * (x * y * u ** 2 + 1) - R * u * (x * y - 1) * (x * y + 1)
        e2 = (y - x) * (-x * y + u ** 2 - 2) - R * u * (x ** 2 + y ** 2 - 2)
    numerators = []
    for e in (e1, e2):
        num = sympy.expand(sympy.fraction(sympy.together(e))[0])
        low = min(m[0] for m in Poly(num, X).monoms())
        numerators.append(sympy.expand(num / X ** low))
    return numerators[0], numerators[1]


def verify_resultant_identity(stratum: Stratum, torsion: Optional[sympy.Expr] = None) -> bool:
    """
    Check that the resultant in X of the two opposite-residue conditions is a
    nonzero multiple of the square of the torsion polynomial.

    ``torsion`` replaces the built-in torsion polynomial; a perturbed
    polynomial must make the check fail.
    """
    X = sympy.Symbol('X')
    torsion = torsion_polynomial(stratum) if torsion is None else sympy.expand(torsion)
    p1, p2 = _opposite_residue_numerators(stratum, X)
    res = sympy.expand(sympy.resultant(p1, p2, X))
    if res == 0:
        logger.error("Opposite-residue conditions share a factor", stratum=stratum.value)
        return False
    gens = (ZETA_XY, ZETA_U, R)
    quotient, remainder = Poly(res, *gens, domain=QQ).div(Poly(sympy.expand(torsion ** 2), *gens, domain=QQ))
    ok = remainder.is_zero and not quotient.is_zero
    logger.info("Resultant identity", stratum=stratum.value, holds=ok,
                cofactor_terms=len(quotient.terms()) if ok else None)
    return ok


def check_identities(strata: Iterable[Stratum]) -> None:
    for stratum in strata:
        if not verify_resultant_identity(stratum):
            raise IdentityCheckFailed(f"resultant identity fails for {stratum.label}")


# ---------------------------------------------------------------------------
# Exact solving of one instance
# ---------------------------------------------------------------------------

def _quadratic_roots(q1: Fraction, q2: Fraction) -> List[QuadElt]:
    """Irrational real roots of x^2 + q1 x + q2."""
    disc = q1 * q1 - 4 * q2
    if disc <= 0:
        return []
    _, D0 = squarefree_decomposition(disc.numerator * disc.denominator)
    if D0 == 1:
        return []
    s = QuadElt.sqrt_of(disc)
    return [(s - q1) * Fraction(1, 2), (-s - q1) * Fraction(1, 2)]


def _coordinate_polys(a: CycloElt, b: CycloElt, c: CycloElt, x: sympy.Symbol) -> List[Poly]:
    polys = []
    for ak, bk, ck in zip(a.coeffs, b.coeffs, c.coeffs):
        if ak or bk or ck:
            polys.append(Poly([to_sympy_rational(ak), to_sympy_rational(bk), to_sympy_rational(ck)], x, domain=QQ))
    return polys


def _rational_roots_in_field(a: CycloElt, b: CycloElt, c: CycloElt) -> List[Fraction]:
    """Rational x with a x^2 + b x + c = 0 in Q(zeta_N)."""
    x = sympy.Symbol('x')
    polys = _coordinate_polys(a, b, c, x)
    common = functools.reduce(sympy.gcd, polys)
    if common.degree() < 1:
        return []
    return rational_roots(common)


_BETA, _GAMMA = sympy.symbols('beta gamma')
_MONOMIALS = (_GAMMA ** 2, _BETA ** 2, _BETA * _GAMMA, _GAMMA, _BETA, sympy.Integer(1))


def resultant_coefficients(a: CycloElt, b: CycloElt, c: CycloElt) -> List[CycloElt]:
    """Coefficients of R(beta, gamma) = (a gamma - c)^2 - (a beta - b)(b gamma - c beta) on the monomials."""
    ac = a * c
    return [a * a, ac, -(a * b), b * b - ac * 2, -(b * c), c * c]


def beta_gamma_candidates(a: CycloElt, b: CycloElt, c: CycloElt) -> List[Tuple[Fraction, Fraction]]:
    """
    Rational (beta, gamma) for which x^2 + beta x + gamma shares a root with
    a x^2 + b x + c.

    Every power-basis coordinate of R(beta, gamma) must vanish; the coordinate
    system is row reduced, gamma is eliminated through resultants in beta and
    the rational roots are back-substituted. A positive-dimensional solution
    set raises :class:`UnderdeterminedSystem`.
    """
    if a.is_zero:
        raise InvalidInputError("leading coefficient must be nonzero")
    q1, q2 = (b / a).as_rational(), (c / a).as_rational()
    if q1 is not None and q2 is not None:
        disc = q1 * q1 - 4 * q2
        if disc >= 0 and squarefree_decomposition(disc.numerator * disc.denominator)[1] == 1:
            raise UnderdeterminedSystem("rational root: a whole line of (beta, gamma) pairs")
        return [(q1, q2)]

    coeffs = resultant_coefficients(a, b, c)
    rows = [[to_sympy_rational(A.coeffs[k]) for A in coeffs] for k in range(a.phi)]
    reduced, pivots = Matrix(rows).rref()
    polys = []
    for i in range(len(pivots)):
        expr = sum(reduced[i, j] * _MONOMIALS[j] for j in range(6))
        polys.append(Poly(expr, _BETA, _GAMMA, domain=QQ))
    if not polys:
        raise UnderdeterminedSystem("all coordinates vanish identically")

    in_gamma: List[Poly] = []
    with_beta = []
    for p in polys:
        if p.degree(_BETA) == 0:
            in_gamma.append(Poly(p.as_expr(), _GAMMA, domain=QQ))
        else:
            with_beta.append(p)
    for p, q in itertools.combinations(with_beta, 2):
        res = sympy.expand(sympy.resultant(p.as_expr(), q.as_expr(), _BETA))
        if res != 0:
            in_gamma.append(Poly(res, _GAMMA, domain=QQ))
    if not in_gamma:
        raise UnderdeterminedSystem("no elimination polynomial in gamma")

    common = functools.reduce(sympy.gcd, in_gamma)
    if common.degree() < 1:
        return []
    found = set()
    for g0 in set(rational_roots(common)):
        restricted = [Poly(p.as_expr().subs(_GAMMA, to_sympy_rational(g0)), _BETA, domain=QQ) for p in polys]
        nonzero = [p for p in restricted if not p.is_zero]
        if not nonzero:
            raise UnderdeterminedSystem(f"beta is free at gamma = {g0}")
        h = functools.reduce(sympy.gcd, nonzero)
        if h.degree() < 1:
            continue
        for b0 in set(rational_roots(h)):
            found.add((b0, g0))
    return sorted(found)


def norm_candidates(a: CycloElt, b: CycloElt, c: CycloElt) -> List[Tuple[Fraction, Fraction]]:
    """
    Quadratic factors over Q of the norm of a x^2 + b x + c.

    Any root of degree two has its minimal polynomial among them. This is the
    slow direct test used when the elimination system is underdetermined.
    """
    z, x = sympy.symbols('z x')
    field = cyclo_field(a.N)
    phi_z = Poly(field.modulus, z).as_expr()
    f = sum((a.num[k] * b.den * c.den * x ** 2 + b.num[k] * a.den * c.den * x + c.num[k] * a.den * b.den) * z ** k
            for k in range(a.phi))
    norm = Poly(sympy.resultant(phi_z, f, z), x, domain=QQ)
    pairs = []
    for factor, _ in factor_list(norm)[1]:
        factor = Poly(factor, x)
        if factor.degree() == 2:
            lead, p1, p0 = factor.all_coeffs()
            pairs.append((to_fraction(p1 / lead), to_fraction(p0 / lead)))
    return sorted(set(pairs))


def _root_in_field(a: CycloElt, b: CycloElt, c: CycloElt, beta: Fraction, gamma: Fraction) -> Optional[QuadElt]:
    denom = b - a * beta
    if denom.is_zero:
        return None
    r = (a * gamma - c) / denom
    if not (r * r + r * beta + gamma).is_zero or not (a * r * r + b * r + c).is_zero:
        return None
    q = as_quadratic(r)
    return q if q is not None and not q.is_rational else None


def solve_relation_instance(a: CycloElt, b: CycloElt, c: CycloElt) -> List[QuadElt]:
    """All real roots of degree two over Q of a r^2 + b r + c = 0."""
    if a.is_zero and b.is_zero and c.is_zero:
        raise InvalidInputError("all coefficients vanish")
    if a.is_zero:
        if b.is_zero:
            return []
        q = as_quadratic(-c / b)
        return [q] if q is not None and not q.is_rational else []

    q1, q2 = (b / a).as_rational(), (c / a).as_rational()
    if q1 is not None and q2 is not None:
        return sorted(_quadratic_roots(q1, q2))

    rational = _rational_roots_in_field(a, b, c)
    if rational:
        other = as_quadratic(-(b / a) - rational[0])
        return [other] if other is not None and not other.is_rational else []

    try:
        candidates = beta_gamma_candidates(a, b, c)
    except UnderdeterminedSystem as e:
        logger.debug("Falling back to the norm test", N=a.N, reason=str(e))
        candidates = norm_candidates(a, b, c)
    roots = set()
    for beta, gamma in candidates:
        disc = beta * beta - 4 * gamma
        if disc <= 0 or squarefree_decomposition(disc.numerator * disc.denominator)[1] == 1:
            continue
        q = _root_in_field(a, b, c, beta, gamma)
        if q is not None:
            roots.add(q)
    return sorted(roots, key=lambda q: (q.D0, q))


def verify_solution(sol: RelationSolution) -> bool:
    """Exact check that r solves the stratum's equation at (zeta_N^eXY, zeta_N^eU)."""
    a, b, c = quadratic_coefficients(sol.stratum, sol.N, sol.eXY, sol.eU)
    r = sol.r
    # reduce with r^2 = tr(r) r - N(r)
    lin = b + a * r.trace()
    const = c - a * r.norm()
    if lin.is_zero and const.is_zero:
        return True
    if r.is_rational or sol.N % quadratic_conductor(r.D0):
        return False
    emb = sqrt_in_cyclotomic(r.D0, sol.N) * r.b + r.a
    return (a * emb * emb + b * emb + c).is_zero


# ---------------------------------------------------------------------------
# Modular prefilter
# ---------------------------------------------------------------------------

def _mul_terms(f: Dict[Tuple[int, int], int], g: Dict[Tuple[int, int], int]) -> Dict[Tuple[int, int], int]:
    out: Dict[Tuple[int, int], int] = {}
    for (a1, b1), c1 in f.items():
        for (a2, b2), c2 in g.items():
            key = (a1 + a2, b1 + b2)
            out[key] = out.get(key, 0) + c1 * c2
    return {k: v for k, v in out.items() if v}


def _add_terms(*parts: Tuple[int, Dict[Tuple[int, int], int]]) -> Dict[Tuple[int, int], int]:
    out: Dict[Tuple[int, int], int] = {}
    for scale, f in parts:
        for k, v in f.items():
            out[k] = out.get(k, 0) + scale * v
    return {k: v for k, v in out.items() if v}


@functools.lru_cache(maxsize=None)
def resultant_monomials(stratum: Stratum) -> Tuple[Terms, ...]:
    """The six resultant coefficients as integer combinations of zeta_XY^alpha zeta_U^beta."""
    a, b, c = ({(al, be): co for al, be, co in t} for t in COEFFICIENT_TERMS[stratum])
    aa, ac, ab = _mul_terms(a, a), _mul_terms(a, c), _mul_terms(a, b)
    bb, bc, cc = _mul_terms(b, b), _mul_terms(b, c), _mul_terms(c, c)
    blocks = [aa, ac, _add_terms((-1, ab)), _add_terms((1, bb), (-2, ac)), _add_terms((-1, bc)), cc]
    return tuple(tuple((al, be, co) for (al, be), co in sorted(blk.items())) for blk in blocks)


@functools.lru_cache(maxsize=128)
def _projected_powers(N: int, prime: int = PRIME) -> np.ndarray:
    """
    (PROJECTION_ROWS, N) array: a fixed random projection of the power-basis
    coordinates of zeta_N^m, modulo ``prime``.
    """
    field = cyclo_field(N)
    phi = field.phi
    modulus_low = np.array([c % prime for c in reversed(field.modulus[1:])], dtype=np.int64)
    table = np.zeros((N, phi), dtype=np.int64)
    current = np.zeros(phi, dtype=np.int64)
    current[0] = 1
    for m in range(N):
        table[m] = current
        top = current[-1]
        current = np.roll(current, 1)
        current[0] = 0
        current = (current - top * modulus_low) % prime
    rng = np.random.default_rng(N)
    proj = rng.integers(1, 2 ** 16, size=(PROJECTION_ROWS, phi), dtype=np.int64)
    out = np.zeros((PROJECTION_ROWS, N), dtype=np.int64)
    for start in range(0, phi, 256):
        stop = min(start + 256, phi)
        out = (out + proj[:, start:stop] @ table[:, start:stop].T) % prime
    return out


def _inv_mod(x: np.ndarray, prime: int = PRIME) -> np.ndarray:
    result = np.ones_like(x)
    base = x % prime
    e = prime - 2
    while e:
        if e & 1:
            result = result * base % prime
        base = base * base % prime
        e >>= 1
    return result


def _inconsistent_mod_p(systems: np.ndarray, prime: int = PRIME) -> np.ndarray:
    """
    For a batch of augmented systems of shape (B, rows, 6), flag those where
    the last column is not in the span of the first five modulo ``prime``.
    """
    M = systems % prime
    B, rows, cols = M.shape
    used = np.zeros((B, rows), dtype=bool)
    for col in range(cols - 1):
        candidates = (M[:, :, col] != 0) & ~used
        has_pivot = candidates.any(axis=1)
        if not has_pivot.any():
            continue
        batch = np.nonzero(has_pivot)[0]
        pivot = candidates[batch].argmax(axis=1)
        prow = M[batch, pivot, :]
        prow = prow * _inv_mod(prow[:, col], prime)[:, None] % prime
        factor = M[batch, :, col]
        M[batch] = (M[batch] - factor[:, :, None] * prow[:, None, :]) % prime
        M[batch, pivot, :] = prow
        used[batch, pivot] = True
    return ((M[:, :, cols - 1] != 0) & ~used).any(axis=1)


def _projected_systems(stratum: Stratum, N: int, eXY: int, eU: np.ndarray, prime: int) -> np.ndarray:
    powers = _projected_powers(N, prime)
    blocks = []
    for terms in resultant_monomials(stratum):
        acc = np.zeros((PROJECTION_ROWS, len(eU)), dtype=np.int64)
        for alpha, beta, coeff in terms:
            idx = (alpha * eXY + beta * eU) % N
            acc = (acc + (coeff % prime) * powers[:, idx]) % prime
        blocks.append(acc)
    return np.stack(blocks, axis=-1).transpose(1, 0, 2)


def prefilter_pairs(stratum: Stratum, N: int, eXY: int, eUs: Sequence[int],
                    primes: Sequence[int] = PREFILTER_PRIMES) -> List[int]:
    """
    The subset of eUs whose (beta, gamma) linear system is consistent modulo
    at least one of ``primes``.

    Coordinates are integral, so a system solvable over Q stays solvable
    modulo every prime that divides no denominator of a solution. An exponent
    is dropped only when each prime reports an inconsistency; a wrong drop
    needs a solution whose denominators are divisible by all of them.
    """
    if not eUs:
        return []
    eU = np.asarray(eUs, dtype=np.int64)
    keep = np.zeros(len(eU), dtype=bool)
    for k, prime in enumerate(primes):
        pending = np.nonzero(~keep)[0]
        if not len(pending):
            break
        consistent = ~_inconsistent_mod_p(_projected_systems(stratum, N, eXY, eU[pending], prime), prime)
        keep[pending] = consistent
        if k and consistent.any():
            logger.debug("Exponents kept by a later prime", N=N, eXY=eXY, prime=prime, kept=int(consistent.sum()))
    return [int(e) for e in eU[keep]]


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------

def _row_exponents(stratum: Stratum, N: int, eXY: int) -> List[int]:
    return [eU for eU in range(1, N)
            if gcd(gcd(eXY, eU), N) == 1 and not is_excluded(stratum, N, eXY, eU)]


def _solve_pairs(stratum: Stratum, N: int, pairs: Iterable[Tuple[int, int]]) -> List[Tuple[int, int, QuadElt]]:
    hits = []
    for eXY, eU in pairs:
        a, b, c = quadratic_coefficients(stratum, N, eXY, eU)
        for r in solve_relation_instance(a, b, c):
            hits.append((eXY, eU, r))
    return hits


def _solve_row(unit: Tuple[Stratum, int, int, bool]) -> List[Tuple[int, int, QuadElt]]:
    stratum, N, eXY, prefilter = unit
    eUs = _row_exponents(stratum, N, eXY)
    if prefilter:
        eUs = prefilter_pairs(stratum, N, eXY, eUs)
    return _solve_pairs(stratum, N, ((eXY, eU) for eU in eUs))


def _solve_orbit(unit: Tuple[Stratum, int, Tuple[Tuple[int, int], ...]]) -> List[Tuple[int, int, QuadElt]]:
    stratum, N, pairs = unit
    return _solve_pairs(stratum, N, pairs)


def _galois_orbit(N: int, eXY: int, eU: int) -> List[Tuple[int, int]]:
    return sorted({((j * eXY) % N, (j * eU) % N) for j in range(1, N) if gcd(j, N) == 1})


@log_performance(logger, "torsion equation search")
def enumerate_solutions(stratum: Stratum, options: Optional[SolverOptions] = None,
                        orders: Optional[Sequence[int]] = None) -> List[RelationSolution]:
    """
    All solutions with r > 0 and negative norm, canonically sorted.

    ``orders`` overrides the looped order set (used by the brute-force tests).
    """
    options = options or SolverOptions()
    orders = list(orders) if orders is not None else stratum_orders(stratum)
    log = logger.bind(stratum=stratum.value)
    log.info("Searching torsion solutions", orders=len(orders), max_order=max(orders, default=0),
             prefilter=options.prefilter, galois_reduction=options.galois_reduction, jobs=options.jobs)

    if options.galois_reduction:
        units = [(stratum, N, eXY, options.prefilter) for N in orders for eXY in divisors(N) if eXY < N]
    else:
        units = [(stratum, N, eXY, options.prefilter) for N in orders for eXY in range(1, N)]
    rows = run_units(_solve_row, units, jobs=options.jobs, desc="torsion rows", progress=options.progress)

    raw: Set[Tuple[int, int, int, QuadElt]] = set()
    for (_, N, _, _), hits in zip(units, rows):
        raw.update((N, eXY, eU, r) for eXY, eU, r in hits)

    if options.galois_reduction:
        orbit_units = []
        seen: Set[Tuple[int, int, int]] = set()
        for N, eXY, eU, _ in sorted(raw, key=lambda t: t[:3]):
            pairs = tuple(p for p in _galois_orbit(N, eXY, eU)
                          if (N,) + p not in seen and not is_excluded(stratum, N, *p))
            seen.update((N,) + p for p in pairs)
            if pairs:
                orbit_units.append((stratum, N, pairs))
        orbits = run_units(_solve_orbit, orbit_units, jobs=options.jobs, desc="galois orbits",
                           progress=options.progress)
        raw = set()
        for (_, N, _), hits in zip(orbit_units, orbits):
            raw.update((N, eXY, eU, r) for eXY, eU, r in hits)

    solutions = {
        RelationSolution(N, eXY, eU, r, stratum)
        for N, eXY, eU, r in raw
        if r > 0 and r.norm() < 0
    }
    if options.fields:
        solutions = {s for s in solutions if s.D0 in set(options.fields)}
    result = sorted(solutions, key=RelationSolution.sort_key)
    log.info("Torsion search finished", raw_roots=len(raw), solutions=len(result),
             fields=sorted({s.D0 for s in result}))
    return result


def brute_force_solutions(stratum: Stratum, orders: Sequence[int]) -> List[RelationSolution]:
    """
    Independent scan over every exponent pair of every order, without the
    gcd reduction, the prefilter or Galois orbits; each solution is reported
    at its least order.
    """
    found: Set[RelationSolution] = set()
    for N in orders:
        for eXY in range(1, N):
            for eU in range(1, N):
                if is_excluded(stratum, N, eXY, eU):
                    continue
                a, b, c = quadratic_coefficients(stratum, N, eXY, eU)
                for r in solve_relation_instance(a, b, c):
                    if r > 0 and r.norm() < 0:
                        g = gcd(gcd(eXY, eU), N)
                        found.add(RelationSolution(N // g, eXY // g, eU // g, r, stratum))
    return sorted(found, key=RelationSolution.sort_key)
