"""Exact arithmetic in Q/Z, plus affine expressions over Q/Z.

A residue mod 1 is stored as a ``fractions.Fraction`` reduced into [0, 1).
The denominator of the reduced fraction is the multiplicative order of the
corresponding root of unity, and the pair (numerator, denominator) is the
canonical form required everywhere else in the package.

``AffineQZ`` is a constant plus an integer/rational combination of named
free variables; evaluating one at any Q/Z point lands back in Q/Z.  These
carry the free parameters of parametric solutions as well as the symbolic
right-hand sides used when solving linear systems over Q/Z.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from .errors import DegenerateTuple

ZERO = Fraction(0)
HALF = Fraction(1, 2)


def qz(num, den=None) -> Fraction:
    """Build a canonical Q/Z element from an integer pair or a Fraction."""
    f = Fraction(num, den) if den is not None else Fraction(num)
    return f - (f.numerator // f.denominator)


def qz_add(a: Fraction, b: Fraction) -> Fraction:
    return qz(a + b)


def qz_neg(a: Fraction) -> Fraction:
    return qz(-a)


def qz_sub(a: Fraction, b: Fraction) -> Fraction:
    return qz(a - b)


def qz_scale(k: int, a: Fraction) -> Fraction:
    return qz(k * a)


def qz_halve(a: Fraction) -> Fraction:
    """Canonical square root: num/(2*den), reduced.  2*qz_halve(a) == a."""
    return qz(Fraction(a.numerator, 2 * a.denominator))


def qz_order(a: Fraction) -> int:
    """Multiplicative order of the root of unity exp(2*pi*i*a)."""
    return qz(a).denominator


def solve_scalar_affine(c1: int, c0: Fraction) -> set[Fraction]:
    """All x in Q/Z with c1*x = c0; exactly |c1| solutions for c1 != 0."""
    if c1 == 0:
        raise ValueError("coefficient must be nonzero")
    if c1 < 0:
        c1, c0 = -c1, -c0
    c0 = qz(c0)
    base = Fraction(c0.numerator, c0.denominator * c1)
    return {qz(base + Fraction(k, c1)) for k in range(c1)}


class AffineQZ:
    """constant + sum(coeff_v * v) over named variables, valued in Q/Z.

    Immutable and hashable.  Coefficients are Fractions (half-integer
    coefficients appear when a symbolic expression is divided by a torsion
    diagonal entry); the constant is kept reduced into [0, 1).
    """

    __slots__ = ("const", "coeffs")

    def __init__(self, const=ZERO, coeffs=None):
        object.__setattr__(self, "const", qz(const))
        items = {}
        if coeffs:
            for v, c in coeffs.items() if isinstance(coeffs, dict) else coeffs:
                c = Fraction(c)
                if c:
                    items[v] = items.get(v, ZERO) + c
        object.__setattr__(
            self, "coeffs", tuple(sorted((v, c) for v, c in items.items() if c))
        )

    def __setattr__(self, *a):
        raise AttributeError("AffineQZ is immutable")

    @staticmethod
    def var(name, coeff=1) -> "AffineQZ":
        return AffineQZ(ZERO, {name: Fraction(coeff)})

    @property
    def is_constant(self) -> bool:
        return not self.coeffs

    @property
    def variables(self) -> tuple:
        return tuple(v for v, _ in self.coeffs)

    def coeff(self, name) -> Fraction:
        for v, c in self.coeffs:
            if v == name:
                return c
        return ZERO

    def __add__(self, other):
        if isinstance(other, AffineQZ):
            return AffineQZ(
                self.const + other.const, list(self.coeffs) + list(other.coeffs)
            )
        return AffineQZ(self.const + Fraction(other), self.coeffs)

    __radd__ = __add__

    def __neg__(self):
        return AffineQZ(-self.const, [(v, -c) for v, c in self.coeffs])

    def __sub__(self, other):
        return self + (-other if isinstance(other, AffineQZ) else AffineQZ(-Fraction(other)))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, k) -> "AffineQZ":
        k = Fraction(k)
        return AffineQZ(qz(k * self.const), [(v, k * c) for v, c in self.coeffs])

    def halve(self) -> "AffineQZ":
        """Canonical half: doubling the result gives back self."""
        return AffineQZ(qz_halve(self.const), [(v, c / 2) for v, c in self.coeffs])

    def evaluate(self, assignment) -> Fraction:
        total = self.const
        for v, c in self.coeffs:
            total += c * assignment[v]
        return qz(total)

    def substitute(self, assignment) -> "AffineQZ":
        """Replace some variables by AffineQZ or Fraction values."""
        out = AffineQZ(self.const)
        for v, c in self.coeffs:
            if v in assignment:
                val = assignment[v]
                if isinstance(val, AffineQZ):
                    out = out + val.scale(c)
                else:
                    out = out + AffineQZ(qz(c * Fraction(val)))
            else:
                out = out + AffineQZ(ZERO, {v: c})
        return out

    def rename(self, mapping) -> "AffineQZ":
        return AffineQZ(self.const, [(mapping.get(v, v), c) for v, c in self.coeffs])

    def __eq__(self, other):
        if isinstance(other, AffineQZ):
            return self.const == other.const and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.is_constant and self.const == qz(Fraction(other))
        return NotImplemented

    def __hash__(self):
        return hash((self.const, self.coeffs))

    def __repr__(self):
        parts = [] if self.const == 0 and self.coeffs else [str(self.const)]
        if self.const == 0 and not self.coeffs:
            parts = ["0"]
        for v, c in self.coeffs:
            if c == 1:
                parts.append(f"{v}")
            elif c == -1:
                parts.append(f"-{v}")
            else:
                parts.append(f"{c}*{v}")
        return " + ".join(parts).replace("+ -", "- ")

    def key(self):
        return (self.const, self.coeffs)


def affine_vector(values) -> tuple:
    """Coerce a sequence of Fractions/AffineQZ into a tuple of AffineQZ."""
    out = []
    for v in values:
        out.append(v if isinstance(v, AffineQZ) else AffineQZ(qz(Fraction(v))))
    return tuple(out)


def tuple_conductor(values) -> int:
    """lcm of the coordinate orders of a concrete tuple."""
    n = 1
    for v in values:
        d = qz(v).denominator
        n = n * d // gcd(n, d)
    return n


def check_distinct(points, what="tuple"):
    """Raise DegenerateTuple unless all Q/Z points are pairwise distinct."""
    pts = [qz(p) for p in points]
    if len(set(pts)) != len(pts):
        raise DegenerateTuple(f"coincident points in {what}: {pts}")
