"""Exact arithmetic in the universal Novikov ring over the rationals.

A scalar is a finite sum sum_i a_i T^{lam_i} with rational coefficients a_i
and strictly increasing rational exponents lam_i, always carried modulo a
declared energy cut T^E.  Exponents are normally >= 0 (the ring Lambda_0);
negative exponents are permitted when a window is supplied explicitly, which
realizes the field extension used by the Lambda-linear constructions.
"""

from __future__ import annotations

from fractions import Fraction
from heapq import heappush, heappop
from typing import Iterable, Optional, Sequence


INFINITY = None  # valuation of the zero scalar


def frac(x) -> Fraction:
    """Coerce ints, strings like "1/2", floats of integral value, to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


class Scalar:
    """A truncated Novikov scalar: ordered (exponent, coefficient) terms mod T^cut."""

    __slots__ = ("terms", "cut")

    def __init__(self, terms, cut):
        cut = frac(cut)
        merged = {}
        for e, c in terms:
            e = frac(e)
            c = frac(c)
            if c == 0 or e >= cut:
                continue
            merged[e] = merged.get(e, Fraction(0)) + c
        self.terms = tuple(sorted((e, c) for e, c in merged.items() if c != 0))
        self.cut = cut

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero(cut) -> "Scalar":
        return Scalar((), cut)

    @staticmethod
    def one(cut) -> "Scalar":
        return Scalar(((Fraction(0), Fraction(1)),), cut)

    @staticmethod
    def monomial(exponent, coeff, cut) -> "Scalar":
        return Scalar(((frac(exponent), frac(coeff)),), cut)

    @staticmethod
    def const(coeff, cut) -> "Scalar":
        return Scalar(((Fraction(0), frac(coeff)),), cut)

    # -- basic queries ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def valuation(self) -> Optional[Fraction]:
        """Smallest exponent with nonzero coefficient; None (infinity) for 0."""
        return self.terms[0][0] if self.terms else INFINITY

    def leading(self):
        """(exponent, coefficient) of the lowest-order term; None for 0."""
        return self.terms[0] if self.terms else None

    def coefficient(self, exponent) -> Fraction:
        exponent = frac(exponent)
        for e, c in self.terms:
            if e == exponent:
                return c
        return Fraction(0)

    def reduction(self) -> Fraction:
        """Coefficient of T^0 (the ground-field reduction mod Lambda_+)."""
        return self.coefficient(0)

    def exponents(self):
        return tuple(e for e, _ in self.terms)

    # -- arithmetic ---------------------------------------------------------

    def truncate(self, E) -> "Scalar":
        E = min(frac(E), self.cut)
        return Scalar(self.terms, E)

    def __add__(self, other: "Scalar") -> "Scalar":
        cut = min(self.cut, other.cut)
        return Scalar(self.terms + other.terms, cut)

    def __sub__(self, other: "Scalar") -> "Scalar":
        return self + (-other)

    def __neg__(self) -> "Scalar":
        return Scalar(tuple((e, -c) for e, c in self.terms), self.cut)

    def __mul__(self, other: "Scalar") -> "Scalar":
        cut = min(self.cut, other.cut)
        acc = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = e1 + e2
                if e < cut:
                    acc[e] = acc.get(e, Fraction(0)) + c1 * c2
        return Scalar(acc.items(), cut)

    def scale(self, q) -> "Scalar":
        q = frac(q)
        return Scalar(tuple((e, q * c) for e, c in self.terms), self.cut)

    def tshift(self, exponent) -> "Scalar":
        """Multiply by T^exponent (exponent may be negative for Lambda work)."""
        exponent = frac(exponent)
        return Scalar(tuple((e + exponent, c) for e, c in self.terms), self.cut)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Scalar):
            return NotImplemented
        cut = min(self.cut, other.cut)
        return self.truncate(cut).terms == other.truncate(cut).terms

    def __hash__(self):
        return hash((self.terms, self.cut))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms:
            if e == 0:
                parts.append(str(c))
            elif c == 1:
                parts.append(f"T^{e}")
            else:
                parts.append(f"{c}*T^{e}")
        return " + ".join(parts)


def nv_add(a: Scalar, b: Scalar, E) -> Scalar:
    return (a + b).truncate(E)


def nv_mul(a: Scalar, b: Scalar, E) -> Scalar:
    return (a * b).truncate(E)


def nv_valuation(a: Scalar):
    return a.valuation()


class SingularReduction(ValueError):
    """The ground-field reduction of the input is not invertible."""


def nv_invert(a: Scalar, E) -> Scalar:
    """Inverse of a valuation-0 scalar, mod T^E, by filtration contraction."""
    E = frac(E)
    a = a.truncate(E)
    if a.is_zero() or a.valuation() != 0:
        raise SingularReduction("nv_invert requires a valuation-0 scalar")
    c0 = a.reduction()
    inv0 = Fraction(1) / c0
    x = Scalar.const(inv0, E)
    one = Scalar.one(E)
    # x <- x + inv0*(1 - a*x); the residual valuation strictly increases.
    for _ in range(10000):
        r = one - a * x
        if r.is_zero():
            return x
        x = x + r.scale(inv0)
    raise RuntimeError("nv_invert did not converge (non-discrete exponents?)")


def nv_solve_linear(M: Sequence[Sequence[Scalar]], v: Sequence[Scalar], E):
    """Solve M x = v mod T^E for square M with invertible rational reduction.

    Solved level by level: with M = M0 + M+, iterate
    x <- x + M0^{-1}(v - M x); each step strictly increases the residual
    valuation, so the loop terminates for gapped data.
    """
    E = frac(E)
    n = len(v)
    if any(len(row) != n for row in M) or len(M) != n:
        raise ValueError("nv_solve_linear: dimension mismatch")
    M = [[a.truncate(E) for a in row] for row in M]
    v = [a.truncate(E) for a in v]
    M0 = [[a.reduction() for a in row] for row in M]
    M0inv = rational_inverse(M0)

    def mul_M(x):
        return [sum((M[i][j] * x[j] for j in range(n)), Scalar.zero(E)) for i in range(n)]

    def mul_M0inv(r):
        out = []
        for i in range(n):
            acc = Scalar.zero(E)
            for j in range(n):
                if M0inv[i][j] != 0:
                    acc = acc + r[j].scale(M0inv[i][j])
            out.append(acc)
        return out

    x = [Scalar.zero(E) for _ in range(n)]
    for _ in range(10000):
        Mx = mul_M(x)
        r = [v[i] - Mx[i] for i in range(n)]
        if all(ri.is_zero() for ri in r):
            return x
        dx = mul_M0inv(r)
        x = [x[i] + dx[i] for i in range(n)]
    raise RuntimeError("nv_solve_linear did not converge")


def rational_inverse(M0):
    """Exact inverse of a square Fraction matrix; raises SingularReduction."""
    n = len(M0)
    A = [[Fraction(M0[i][j]) for j in range(n)] + [Fraction(1 if i == j else 0) for j in range(n)]
         for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col] != 0), None)
        if piv is None:
            raise SingularReduction("singular reduction matrix")
        A[col], A[piv] = A[piv], A[col]
        p = A[col][col]
        A[col] = [x / p for x in A[col]]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return [row[n:] for row in A]


def rational_solve(M0, rhs):
    """Solve the rational linear system M0 x = rhs (M0 rectangular, any rank).

    Returns a particular solution with free variables set to 0, or None if the
    system is inconsistent.  Gaussian elimination over Fraction.
    """
    rows = len(M0)
    cols = len(M0[0]) if rows else 0
    A = [[Fraction(M0[i][j]) for j in range(cols)] + [Fraction(rhs[i])] for i in range(rows)]
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        p = A[r][c]
        A[r] = [x / p for x in A[r]]
        for i in range(rows):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    for i in range(r, rows):
        if A[i][cols] != 0:
            return None
    x = [Fraction(0)] * cols
    for i, c in enumerate(pivots):
        x[c] = A[i][cols]
    return x


class GapMonoid:
    """The submonoid of Q_{>=0} generated by finitely many positive rationals."""

    __slots__ = ("generators",)

    def __init__(self, generators: Iterable):
        gens = sorted({frac(g) for g in generators if frac(g) != 0})
        if any(g < 0 for g in gens):
            raise ValueError("gap monoid generators must be positive")
        self.generators = tuple(gens)

    def elements_below(self, bound) -> tuple:
        """All monoid elements < bound, ascending, each exactly once."""
        bound = frac(bound)
        seen = {Fraction(0)}
        heap = [Fraction(0)]
        out = []
        while heap:
            x = heappop(heap)
            if x >= bound:
                continue
            out.append(x)
            for g in self.generators:
                y = x + g
                if y < bound and y not in seen:
                    seen.add(y)
                    heappush(heap, y)
        return tuple(out)

    def __contains__(self, x) -> bool:
        x = frac(x)
        if x < 0:
            return False
        return x in self.elements_below(x + 1)

    def join(self, other: "GapMonoid") -> "GapMonoid":
        return GapMonoid(self.generators + other.generators)

    def min_positive(self) -> Optional[Fraction]:
        return self.generators[0] if self.generators else None

    def __eq__(self, other):
        return isinstance(other, GapMonoid) and self.generators == other.generators

    def __hash__(self):
        return hash(self.generators)

    def __repr__(self):
        return f"GapMonoid{self.generators}"
