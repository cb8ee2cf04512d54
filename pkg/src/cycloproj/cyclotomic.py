"""Exact arithmetic in cyclotomic fields.

Elements of Q(zeta_n) are sparse rational polynomials in zeta_n, reduced
modulo the n-th cyclotomic polynomial only when a zero test or canonical
form is needed.  Arithmetic between different conductors first embeds both
operands at the lcm conductor.  Everything is exact; the only floating
point in this module is the optional numerical cross-check helper.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cache
from math import gcd, lcm

from .qz import qz


@cache
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Dense integer coefficients (low degree first) of the n-th cyclotomic
    polynomial, computed by dividing x^n - 1 by all proper-divisor factors."""
    if n < 1:
        raise ValueError("n must be positive")
    # x^n - 1
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _exact_poly_div(poly, list(cyclotomic_poly(d)))
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    return tuple(poly)


def _exact_poly_div(num: list[int], den: list[int]) -> list[int]:
    """Exact division of integer polynomials (monic or +-1-led divisor)."""
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    lead = den[-1]
    for i in range(len(num) - len(den), -1, -1):
        c = num[i + len(den) - 1]
        if c % lead:
            raise ArithmeticError("non-exact polynomial division")
        q = c // lead
        out[i] = q
        if q:
            for j, dj in enumerate(den):
                num[i + j] -= q * dj
    if any(num[: len(den) - 1]):
        raise ArithmeticError("non-exact polynomial division")
    return out


def _poly_rem(coeffs: list[Fraction], mod: tuple[int, ...]) -> list[Fraction]:
    """Remainder of a rational polynomial modulo a monic integer polynomial."""
    coeffs = list(coeffs)
    dm = len(mod) - 1
    for i in range(len(coeffs) - 1, dm - 1, -1):
        c = coeffs[i]
        if c:
            coeffs[i] = Fraction(0)
            for j in range(dm):
                coeffs[i - dm + j] -= c * mod[j]
    return coeffs[:dm]


class CycElt:
    """An element of Q(zeta_n): sparse map {exponent mod n: rational coeff}."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs=None):
        self.n = n
        cleaned: dict[int, Fraction] = {}
        if coeffs:
            for k, c in coeffs.items() if isinstance(coeffs, dict) else coeffs:
                c = Fraction(c)
                if c:
                    k %= n
                    cleaned[k] = cleaned.get(k, Fraction(0)) + c
                    if not cleaned[k]:
                        del cleaned[k]
        self.coeffs = cleaned

    @staticmethod
    def root(a) -> "CycElt":
        """The root of unity with additive coordinate a in Q/Z."""
        a = qz(a)
        return CycElt(a.denominator, {a.numerator: Fraction(1)})

    @staticmethod
    def root_sum(values) -> "CycElt":
        """Sum of roots of unity given by additive coordinates."""
        vals = [qz(v) for v in values]
        n = 1
        for v in vals:
            n = lcm(n, v.denominator)
        out = CycElt(n)
        for v in vals:
            k = v.numerator * (n // v.denominator)
            out.coeffs[k % n] = out.coeffs.get(k % n, Fraction(0)) + 1
        out.coeffs = {k: c for k, c in out.coeffs.items() if c}
        return out

    @staticmethod
    def from_rational(q) -> "CycElt":
        return CycElt(1, {0: Fraction(q)})

    def embed(self, m: int) -> "CycElt":
        """Rewrite at conductor m (n must divide m)."""
        if m == self.n:
            return self
        if m % self.n:
            raise ValueError("new conductor must be a multiple")
        s = m // self.n
        return CycElt(m, {k * s: c for k, c in self.coeffs.items()})

    def _pair(self, other: "CycElt"):
        m = lcm(self.n, other.n)
        return self.embed(m), other.embed(m)

    def __add__(self, other):
        if not isinstance(other, CycElt):
            other = CycElt.from_rational(other)
        a, b = self._pair(other)
        out = dict(a.coeffs)
        for k, c in b.coeffs.items():
            out[k] = out.get(k, Fraction(0)) + c
        return CycElt(a.n, out)

    __radd__ = __add__

    def __neg__(self):
        return CycElt(self.n, {k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        if not isinstance(other, CycElt):
            other = CycElt.from_rational(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, CycElt):
            return CycElt(self.n, {k: c * Fraction(other) for k, c in self.coeffs.items()})
        a, b = self._pair(other)
        out: dict[int, Fraction] = {}
        for k1, c1 in a.coeffs.items():
            for k2, c2 in b.coeffs.items():
                k = (k1 + k2) % a.n
                out[k] = out.get(k, Fraction(0)) + c1 * c2
        return CycElt(a.n, out)

    __rmul__ = __mul__

    def conjugate(self) -> "CycElt":
        return CycElt(self.n, {(-k) % self.n: c for k, c in self.coeffs.items()})

    def galois(self, j: int) -> "CycElt":
        """Apply zeta_n -> zeta_n^j (j coprime to n)."""
        if gcd(j, self.n) != 1:
            raise ValueError("galois exponent must be coprime to the conductor")
        return CycElt(self.n, {(j * k) % self.n: c for k, c in self.coeffs.items()})

    def reduced(self) -> list[Fraction]:
        """Canonical coefficient vector modulo the cyclotomic polynomial."""
        dense = [Fraction(0)] * self.n
        for k, c in self.coeffs.items():
            dense[k] += c
        if self.n == 1:
            return dense
        return _poly_rem(dense, cyclotomic_poly(self.n))

    def is_zero(self) -> bool:
        return not any(self.reduced())

    def is_rational(self):
        """Return the rational value if the element is rational, else None."""
        red = self.reduced()
        if any(red[1:]):
            return None
        return red[0]

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CycElt.from_rational(other)
        if not isinstance(other, CycElt):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        raise TypeError("CycElt is unhashable; use tuple(reduced()) as a key")

    def inverse(self) -> "CycElt":
        """Multiplicative inverse via extended gcd with the cyclotomic poly."""
        phi = [Fraction(c) for c in cyclotomic_poly(self.n)]
        a = self.reduced()
        inv = _poly_xgcd_mod(a, phi)
        return CycElt(self.n, dict(enumerate(inv)))

    def __repr__(self):
        if not self.coeffs:
            return "CycElt(0)"
        terms = ", ".join(
            f"{c}*z^{k}" for k, c in sorted(self.coeffs.items())
        )
        return f"CycElt(n={self.n}: {terms})"


def _poly_xgcd_mod(a: list[Fraction], mod: list[Fraction]) -> list[Fraction]:
    """Inverse of a modulo mod for rational polynomials (mod irreducible)."""

    def trim(p):
        while p and not p[-1]:
            p.pop()
        return p

    def divmod_poly(p, q):
        p = list(p)
        quo = [Fraction(0)] * max(len(p) - len(q) + 1, 0)
        while len(p) >= len(q) and any(p):
            if not p[-1]:
                p.pop()
                continue
            shift = len(p) - len(q)
            f = p[-1] / q[-1]
            quo[shift] = f
            for j, qc in enumerate(q):
                p[shift + j] -= f * qc
            p.pop()
        return trim(quo), trim(p)

    r0, r1 = trim(list(mod)), trim(list(a))
    s0, s1 = [], [Fraction(1)]
    while r1:
        q, r = divmod_poly(r0, r1)
        r0, r1 = r1, r
        prod = _poly_mul(q, s1)
        s0, s1 = s1, trim([x - y for x, y in _zip_pad(s0, prod)])
    if len(r0) != 1:
        raise ZeroDivisionError("element is not invertible")
    lead = r0[0]
    return [c / lead for c in s0]


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1 if a and b else 0)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _zip_pad(a, b):
    m = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (m - len(a))
    b = list(b) + [Fraction(0)] * (m - len(b))
    return zip(a, b)


def cyc_is_zero(e: CycElt) -> bool:
    """True iff the element is zero as a complex number."""
    return e.is_zero()


def float_abs(e: CycElt, prec_bits: int = 128) -> float:
    """|e| evaluated at high precision (cross-check helper, not used in proofs)."""
    from mpmath import mp, mpc, cos, sin, pi, fabs

    old = mp.prec
    mp.prec = prec_bits
    try:
        total = mpc(0)
        for k, c in e.coeffs.items():
            ang = 2 * pi * k / e.n
            total += mpc(c.numerator, 0) / c.denominator * mpc(cos(ang), sin(ang))
        return float(fabs(total))
    finally:
        mp.prec = old
