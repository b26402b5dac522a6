"""
Exact arithmetic: rationals, real quadratic fields, cyclotomic fields and
the polynomial helpers the solver needs.

Rationals are :class:`fractions.Fraction`. Elements of Q(zeta_N) are stored
as integer coordinate vectors over a common denominator in the power basis
1, zeta_N, ..., zeta_N^(phi(N)-1); reduction modulo the cyclotomic
polynomial and inversion go through sympy's dense polynomial routines.
Nothing here ever touches floating point except ``__float__`` for display.
"""

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import sympy
from sympy import Matrix, Poly, cyclotomic_poly, factor_list, factorint, legendre_symbol
from sympy.polys.densearith import dup_mul, dup_rem
from sympy.polys.densebasic import dup_strip
from sympy.polys.domains import QQ, ZZ

from .exceptions import ConductorMismatch, FieldMismatch, InvalidInputError, NotCoprimeError

Rational = Fraction
RationalLike = Union[int, Fraction]

_X = sympy.Symbol('x')


def to_fraction(value: Any) -> Fraction:
    """Convert an int, Fraction or sympy rational to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    q = sympy.Rational(value)
    return Fraction(int(q.p), int(q.q))


def to_sympy_rational(q: RationalLike) -> sympy.Rational:
    q = Fraction(q)
    return sympy.Rational(q.numerator, q.denominator)


@functools.lru_cache(maxsize=None)
def is_squarefree(n: int) -> bool:
    return n >= 1 and all(e == 1 for e in factorint(n).values())


@functools.lru_cache(maxsize=None)
def squarefree_decomposition(n: int) -> Tuple[int, int]:
    """Return (k, d) with n = k^2 * d and d squarefree, for n >= 1."""
    k, d = 1, 1
    for p, e in factorint(n).items():
        k *= p ** (e // 2)
        if e % 2:
            d *= p
    return k, d


def _sign(q: Fraction) -> int:
    return (q > 0) - (q < 0)


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UniPoly:
    """
    Dense univariate polynomial, lowest degree first.

    Coefficients may be Fractions, QuadElts or CycloElts; trailing zero
    coefficients are stripped so ``degree`` always matches storage.
    """

    coeffs: Tuple[Any, ...]

    def __post_init__(self):
        coeffs = list(self.coeffs)
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, 'coeffs', tuple(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> Any:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def __call__(self, x: Any) -> Any:
        if not self.coeffs:
            return Fraction(0)
        result = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            result = result * x + c
        return result

    def to_sympy(self, symbol: sympy.Symbol = _X) -> Poly:
        return Poly([to_sympy_rational(c) for c in reversed(self.coeffs)] or [0], symbol, domain=QQ)

    @classmethod
    def from_sympy(cls, poly: Poly) -> 'UniPoly':
        return cls(tuple(to_fraction(c) for c in reversed(poly.all_coeffs())))

    @classmethod
    def from_rationals(cls, coeffs: Iterable[RationalLike]) -> 'UniPoly':
        return cls(tuple(Fraction(c) for c in coeffs))

    def __str__(self) -> str:
        return str(self.to_sympy().as_expr()) if self.coeffs else "0"


MultiPoly = Poly
"""Sparse multivariate polynomials are sympy ``Poly`` objects; ``as_dict()``
gives the exponent-tuple to coefficient map."""


def cyclotomic_polynomial(N: int) -> UniPoly:
    if N < 1:
        raise InvalidInputError(f"conductor must be positive, got {N}")
    return UniPoly.from_sympy(Poly(cyclotomic_poly(N, _X), _X))


def resultant(f: Union[UniPoly, Poly], g: Union[UniPoly, Poly],
              var: Optional[sympy.Symbol] = None) -> Any:
    """
    Resultant of two polynomials.

    UniPolys over Q give a Fraction. Sympy polys are eliminated with respect
    to ``var`` (default: their first generator) and give a sympy expression.
    """
    if isinstance(f, UniPoly):
        if f.is_zero or g.is_zero:
            raise InvalidInputError("resultant of the zero polynomial")
        return to_fraction(f.to_sympy().resultant(g.to_sympy()))
    if f.is_zero or g.is_zero:
        raise InvalidInputError("resultant of the zero polynomial")
    var = var if var is not None else f.gens[0]
    return sympy.expand(sympy.resultant(f.as_expr(), g.as_expr(), var))


def rational_roots(f: Union[UniPoly, Poly]) -> List[Fraction]:
    """All rational roots with multiplicity, in increasing order.

    Roots are read off the linear factors of the factorization over Q, which
    is equivalent to the rational root test and does not need the divisors
    of the (possibly huge) constant term.
    """
    poly = f.to_sympy() if isinstance(f, UniPoly) else f
    if poly.is_zero:
        raise InvalidInputError("rational roots of the zero polynomial")
    roots: List[Fraction] = []
    if poly.degree() < 1:
        return roots
    _, factors = factor_list(poly)
    for factor, mult in factors:
        factor = Poly(factor, poly.gens[0])
        if factor.degree() == 1:
            c1, c0 = factor.all_coeffs()
            roots.extend([to_fraction(-c0 / c1)] * mult)
    return sorted(roots)


# ---------------------------------------------------------------------------
# Real quadratic fields
# ---------------------------------------------------------------------------

@functools.total_ordering
@dataclass(frozen=True, eq=False)
class QuadElt:
    """
    a + b*sqrt(D0) with rational a, b and squarefree D0 > 1.

    Rationals are stored with b = 0 and D0 = 1 so that a rational compares
    equal to itself whatever field it came from. Ordering uses the embedding
    with sqrt(D0) > 0.
    """

    a: Fraction
    b: Fraction = Fraction(0)
    D0: int = 1

    def __post_init__(self):
        a, b, D0 = Fraction(self.a), Fraction(self.b), int(self.D0)
        if b == 0:
            D0 = 1
        elif D0 <= 1 or not is_squarefree(D0):
            raise InvalidInputError(f"D0 must be squarefree and > 1, got {D0}")
        object.__setattr__(self, 'a', a)
        object.__setattr__(self, 'b', b)
        object.__setattr__(self, 'D0', D0)

    @classmethod
    def sqrt_of(cls, q: RationalLike) -> 'QuadElt':
        """Positive square root of a positive rational, exact."""
        q = Fraction(q)
        if q < 0:
            raise InvalidInputError(f"square root of negative rational {q}")
        k, d = squarefree_decomposition(q.numerator * q.denominator)
        return cls(Fraction(0), Fraction(k, q.denominator), d) if d > 1 else cls(Fraction(k, q.denominator))

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def _coerce(self, other: Any) -> 'QuadElt':
        if isinstance(other, QuadElt):
            return other
        if isinstance(other, (int, Fraction)):
            return QuadElt(Fraction(other))
        raise TypeError(f"cannot combine QuadElt with {type(other).__name__}")

    def _field(self, other: 'QuadElt') -> int:
        if self.b == 0:
            return other.D0
        if other.b == 0 or other.D0 == self.D0:
            return self.D0
        raise FieldMismatch(f"Q(sqrt {self.D0}) and Q(sqrt {other.D0})")

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return QuadElt(self.a + other.a, self.b + other.b, self._field(other))

    __radd__ = __add__

    def __neg__(self):
        return QuadElt(-self.a, -self.b, self.D0)

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        D0 = self._field(other)
        return QuadElt(self.a * other.a + self.b * other.b * D0,
                       self.a * other.b + self.b * other.a, D0)

    __rmul__ = __mul__

    def conj(self) -> 'QuadElt':
        return QuadElt(self.a, -self.b, self.D0)

    def norm(self) -> Fraction:
        return self.a * self.a - self.D0 * self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a

    def inverse(self) -> 'QuadElt':
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in a quadratic field")
        c = self.conj()
        return QuadElt(c.a / n, c.b / n, self.D0)

    def __truediv__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int) -> 'QuadElt':
        base = self if k >= 0 else self.inverse()
        result = QuadElt(Fraction(1))
        for _ in range(abs(k)):
            result = result * base
        return result

    def sign(self) -> int:
        sa, sb = _sign(self.a), _sign(self.b)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: the larger square wins
        return sa if self.a * self.a > self.D0 * self.b * self.b else sb

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return (self.a, self.b, self.D0) == (other.a, other.b, other.D0)

    def __hash__(self):
        return hash(self.a) if self.b == 0 else hash((self.a, self.b, self.D0))

    def __lt__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return (self - other).sign() < 0

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * float(self.D0) ** 0.5

    def min_poly(self) -> UniPoly:
        if self.b == 0:
            return UniPoly((-self.a, Fraction(1)))
        return UniPoly((self.norm(), -self.trace(), Fraction(1)))

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        den = self.a.denominator * self.b.denominator // gcd(self.a.denominator, self.b.denominator)
        A, B = int(self.a * den), int(self.b * den)
        root = f"√{self.D0}"
        if B == 1:
            rad = root
        elif B == -1:
            rad = f"-{root}"
        else:
            rad = f"{B}{root}"
        if A == 0:
            body = rad
            return body if den == 1 else f"{body}/{den}"
        body = f"{A}{'+' if B > 0 else ''}{rad}"
        return body if den == 1 else f"({body})/{den}"


def quad_norm(x: QuadElt) -> Fraction:
    return x.norm()


def quad_conj(x: QuadElt) -> QuadElt:
    return x.conj()


def quad_floor(x: QuadElt) -> int:
    """Exact floor: a float guess corrected by exact comparisons."""
    f = math.floor(float(x))
    while QuadElt(Fraction(f)) > x:
        f -= 1
    while QuadElt(Fraction(f + 1)) <= x:
        f += 1
    return f


def quad_mod(x: QuadElt, modulus: QuadElt) -> QuadElt:
    """Representative of x modulo a positive modulus in [0, modulus)."""
    if modulus <= 0:
        raise InvalidInputError(f"modulus must be positive, got {modulus}")
    return x - modulus * quad_floor(x / modulus)


# ---------------------------------------------------------------------------
# Cyclotomic fields
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _CycloField:
    N: int
    phi: int
    modulus: Tuple[int, ...]  # Phi_N, highest degree first
    modulus_poly: Poly


@functools.lru_cache(maxsize=None)
def cyclo_field(N: int) -> _CycloField:
    if N < 1:
        raise InvalidInputError(f"conductor must be positive, got {N}")
    poly = Poly(cyclotomic_poly(N, _X), _X)
    high = tuple(int(c) for c in poly.all_coeffs())
    return _CycloField(N=N, phi=len(high) - 1, modulus=high, modulus_poly=Poly(poly, _X, domain=QQ))


def _reduce_high(N: int, high: Sequence[int]) -> Tuple[int, ...]:
    """Reduce an integer polynomial (highest degree first) modulo Phi_N."""
    field = cyclo_field(N)
    rem = dup_rem(dup_strip([ZZ(c) for c in high]), [ZZ(c) for c in field.modulus], ZZ)
    low = [int(c) for c in reversed(rem)]
    return tuple(low + [0] * (field.phi - len(low)))


def _exponent_vector_reduce(N: int, by_exponent: Dict[int, int]) -> Tuple[int, ...]:
    if not by_exponent:
        return (0,) * cyclo_field(N).phi
    top = max(by_exponent)
    high = [0] * (top + 1)
    for e, c in by_exponent.items():
        high[top - e] += c
    return _reduce_high(N, high)


@dataclass(frozen=True, eq=False)
class CycloElt:
    """
    Element of Q(zeta_N): ``num[k] / den`` is the coordinate of zeta_N^k.

    Instances are normalized (den > 0, content removed), so structural
    equality is field equality.
    """

    N: int
    num: Tuple[int, ...]
    den: int = 1

    def __post_init__(self):
        field = cyclo_field(self.N)
        num = tuple(int(c) for c in self.num)
        if len(num) != field.phi:
            raise InvalidInputError(f"Q(zeta_{self.N}) needs {field.phi} coordinates, got {len(num)}")
        den = int(self.den)
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            num, den = tuple(-c for c in num), -den
        g = functools.reduce(gcd, num, den)
        if g > 1:
            num, den = tuple(c // g for c in num), den // g
        if not any(num):
            den = 1
        object.__setattr__(self, 'num', num)
        object.__setattr__(self, 'den', den)

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_rational(cls, N: int, q: RationalLike) -> 'CycloElt':
        q = Fraction(q)
        num = [0] * cyclo_field(N).phi
        num[0] = q.numerator
        return cls(N, tuple(num), q.denominator)

    @classmethod
    def zero(cls, N: int) -> 'CycloElt':
        return cls.from_rational(N, 0)

    @classmethod
    def one(cls, N: int) -> 'CycloElt':
        return cls.from_rational(N, 1)

    @classmethod
    def zeta(cls, N: int, e: int = 1) -> 'CycloElt':
        return cls(N, _exponent_vector_reduce(N, {e % N: 1}))

    @classmethod
    def from_coeffs(cls, N: int, coeffs: Sequence[RationalLike]) -> 'CycloElt':
        """Build from rational power-basis coordinates (length phi(N))."""
        fracs = [Fraction(c) for c in coeffs]
        den = functools.reduce(lambda x, y: x * y // gcd(x, y), (f.denominator for f in fracs), 1)
        return cls(N, tuple(int(f * den) for f in fracs), den)

    @classmethod
    def from_exponents(cls, N: int, terms: Dict[int, int]) -> 'CycloElt':
        """Integer combination sum(c * zeta_N^e) of arbitrary exponents."""
        folded: Dict[int, int] = {}
        for e, c in terms.items():
            folded[e % N] = folded.get(e % N, 0) + c
        return cls(N, _exponent_vector_reduce(N, folded))

    # -- inspection ---------------------------------------------------------

    @property
    def phi(self) -> int:
        return len(self.num)

    @property
    def coeffs(self) -> Tuple[Fraction, ...]:
        return tuple(Fraction(c, self.den) for c in self.num)

    @property
    def is_zero(self) -> bool:
        return not any(self.num)

    def as_rational(self) -> Optional[Fraction]:
        if any(self.num[1:]):
            return None
        return Fraction(self.num[0], self.den)

    def _high(self) -> List[int]:
        return dup_strip(list(reversed(self.num)))

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other: Any) -> 'CycloElt':
        if isinstance(other, CycloElt):
            if other.N != self.N:
                raise ConductorMismatch(f"Q(zeta_{self.N}) and Q(zeta_{other.N})")
            return other
        if isinstance(other, (int, Fraction)):
            return CycloElt.from_rational(self.N, other)
        raise TypeError(f"cannot combine CycloElt with {type(other).__name__}")

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        num = tuple(x * other.den + y * self.den for x, y in zip(self.num, other.num))
        return CycloElt(self.N, num, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return CycloElt(self.N, tuple(-c for c in self.num), self.den)

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if self.is_zero or other.is_zero:
            return CycloElt.zero(self.N)
        prod = dup_mul([ZZ(c) for c in self._high()], [ZZ(c) for c in other._high()], ZZ)
        return CycloElt(self.N, _reduce_high(self.N, prod), self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> 'CycloElt':
        if self.is_zero:
            raise ZeroDivisionError(f"division by zero in Q(zeta_{self.N})")
        field = cyclo_field(self.N)
        inv = Poly(self._high(), _X, domain=QQ).invert(field.modulus_poly)
        low = [to_fraction(c) * self.den for c in reversed(inv.all_coeffs())]
        return CycloElt.from_coeffs(self.N, low + [Fraction(0)] * (field.phi - len(low)))

    def __truediv__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int) -> 'CycloElt':
        base = self if k >= 0 else self.inverse()
        result, k = CycloElt.one(self.N), abs(k)
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            q = self.as_rational()
            return q is not None and q == other
        if not isinstance(other, CycloElt):
            return NotImplemented
        if other.N != self.N:
            lcm = self.N * other.N // gcd(self.N, other.N)
            return self.embed(lcm) == other.embed(lcm)
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        q = self.as_rational()
        return hash(q) if q is not None else hash((self.N, self.num, self.den))

    # -- field maps ---------------------------------------------------------

    def galois(self, j: int) -> 'CycloElt':
        """Image under the automorphism zeta_N -> zeta_N^j."""
        if gcd(j, self.N) != 1:
            raise NotCoprimeError(f"exponent {j} is not coprime to {self.N}")
        terms: Dict[int, int] = {}
        for k, c in enumerate(self.num):
            if c:
                e = (j * k) % self.N
                terms[e] = terms.get(e, 0) + c
        return CycloElt(self.N, _exponent_vector_reduce(self.N, terms), self.den)

    def embed(self, M: int) -> 'CycloElt':
        """Coerce into Q(zeta_M) for a multiple M of N (zeta_N = zeta_M^(M/N))."""
        if M % self.N:
            raise ConductorMismatch(f"{self.N} does not divide {M}")
        if M == self.N:
            return self
        step = M // self.N
        terms = {k * step: c for k, c in enumerate(self.num) if c}
        return CycloElt(M, _exponent_vector_reduce(M, terms), self.den)

    def __repr__(self) -> str:
        terms = [f"{c}*z^{k}" for k, c in enumerate(self.num) if c]
        body = " + ".join(terms) or "0"
        return f"CycloElt(N={self.N}, ({body})/{self.den})"


def cyclo_arith(a: CycloElt, b: CycloElt, op: str) -> CycloElt:
    if a.N != b.N:
        raise ConductorMismatch(f"Q(zeta_{a.N}) and Q(zeta_{b.N})")
    if op == 'add':
        return a + b
    if op == 'mul':
        return a * b
    if op == 'div':
        return a / b
    raise InvalidInputError(f"unknown operation {op!r}")


def galois_apply(x: CycloElt, j: int) -> CycloElt:
    return x.galois(j)


def min_poly_over_Q(x: Union[CycloElt, QuadElt, RationalLike]) -> UniPoly:
    """Monic minimal polynomial over Q, by the first linear dependence among powers."""
    if isinstance(x, (int, Fraction)):
        return UniPoly((-Fraction(x), Fraction(1)))
    if isinstance(x, QuadElt):
        return x.min_poly()
    q = x.as_rational()
    if q is not None:
        return UniPoly((-q, Fraction(1)))
    powers = [CycloElt.one(x.N), x]
    while True:
        columns = [[to_sympy_rational(c) for c in p.coeffs] for p in powers]
        kernel = Matrix(columns).T.nullspace()
        if kernel:
            v = kernel[0]
            lead = v[len(powers) - 1]
            return UniPoly(tuple(to_fraction(v[i] / lead) for i in range(len(powers))))
        powers.append(powers[-1] * x)


def quadratic_relation(x: CycloElt) -> Optional[Tuple[Fraction, Fraction]]:
    """(beta, gamma) with x^2 + beta x + gamma = 0 when x is irrational of degree 2."""
    if x.as_rational() is not None:
        return None
    k = next(i for i in range(1, x.phi) if x.num[i])
    sq = x * x
    beta = -Fraction(sq.num[k], sq.den) / Fraction(x.num[k], x.den)
    gamma = -Fraction(sq.num[0], sq.den) - beta * Fraction(x.num[0], x.den)
    if (sq + x * beta + gamma).is_zero:
        return beta, gamma
    return None


def quadratic_conductor(D0: int) -> int:
    return D0 if D0 % 4 == 1 else 4 * D0


@functools.lru_cache(maxsize=None)
def sqrt_in_cyclotomic(D0: int, N: int) -> CycloElt:
    """
    The positive real square root of D0 inside Q(zeta_N), zeta_N = exp(2 pi i/N).

    Built from quadratic Gauss sums: g_p = sqrt(p) for p = 1 mod 4 and
    i sqrt(p) for p = 3 mod 4, together with sqrt(2) = zeta_8 + zeta_8^-1.
    """
    if not is_squarefree(D0) or D0 < 2:
        raise InvalidInputError(f"D0 must be squarefree and > 1, got {D0}")
    if N % quadratic_conductor(D0):
        raise ConductorMismatch(f"sqrt({D0}) does not lie in Q(zeta_{N})")
    root = CycloElt.one(N)
    threes = 0
    for p in sorted(factorint(D0)):
        if p == 2:
            root = root * CycloElt.from_exponents(N, {N // 8: 1, -(N // 8): 1})
            continue
        step = N // p
        gauss = CycloElt.from_exponents(N, {a * step: int(legendre_symbol(a, p)) for a in range(1, p)})
        root = root * gauss
        threes += p % 4 == 3
    # divide by i^threes
    turn = threes % 4
    if turn == 1:
        root = -(root * CycloElt.zeta(N, N // 4))
    elif turn == 2:
        root = -root
    elif turn == 3:
        root = root * CycloElt.zeta(N, N // 4)
    return root


def as_quadratic(x: CycloElt) -> Optional[QuadElt]:
    """
    The QuadElt equal to x when x is rational or real quadratic, else None.

    The sign of the radical is fixed by comparing x with (-beta + k sqrt(D0))/2
    inside Q(zeta_N), so no numerical embedding is involved.
    """
    q = x.as_rational()
    if q is not None:
        return QuadElt(q)
    rel = quadratic_relation(x)
    if rel is None:
        return None
    beta, gamma = rel
    disc = beta * beta - 4 * gamma
    if disc <= 0:
        return None
    k, D0 = squarefree_decomposition(disc.numerator * disc.denominator)
    if D0 == 1:
        return None
    k = Fraction(k, disc.denominator)
    root = sqrt_in_cyclotomic(D0, x.N)
    plus = (root * k - beta) * Fraction(1, 2)
    if x == plus:
        return QuadElt(-beta / 2, k / 2, D0)
    return QuadElt(-beta / 2, -k / 2, D0)
