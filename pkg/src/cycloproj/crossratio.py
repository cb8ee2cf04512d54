"""Cross-ratio computation and membership in the solution set S.

(1,s1,s2,s3) ~ (1,t1,t2,t3) under PGL(2,C) iff the two ordered 4-tuples
have equal cross-ratios.  Everything here is exact: single memberships go
through cyclotomic field elements, and the brute-force oracle buckets all
ordered triples by the image of the cross-ratio under ring homomorphisms
Z[zeta_n] -> F_p (p = 1 mod n), then confirms every candidate pair with the
division-free cyclotomic identity.  Equal cross-ratios always collide in
the bucket key, so the oracle is complete; the exact confirmation makes it
sound.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

import numpy as np

from .cyclotomic import CycElt, cyclotomic_poly
from .errors import DegenerateTuple
from .qz import check_distinct, qz, qz_sub
from .solutions import Solution6, concrete_solution


def cross_ratio_parts(s1, s2, s3) -> tuple[CycElt, CycElt]:
    """Numerator and denominator of the cross-ratio of (1, s1, s2, s3)."""
    s1, s2, s3 = qz(s1), qz(s2), qz(s3)
    check_distinct([Fraction(0), s1, s2, s3], "cross-ratio tuple")
    one = CycElt.from_rational(1)
    num = (CycElt.root(qz_sub(s3, s1)) - one) * (CycElt.root(s2) - one)
    den = (CycElt.root(qz_sub(s2, s1)) - one) * (CycElt.root(s3) - one)
    return num, den


def cross_ratio(s1, s2, s3) -> CycElt:
    """Exact cross-ratio (s3/s1-1)(s2-1) / ((s2/s1-1)(s3-1)); a real value."""
    num, den = cross_ratio_parts(s1, s2, s3)
    return num * den.inverse()


def is_in_S(z) -> bool:
    """Exact membership: equal cross-ratios, compared without field division."""
    vals = [qz(v) for v in z]
    if len(vals) != 6:
        raise ValueError("need six coordinates")
    ns, ds = cross_ratio_parts(*vals[:3])
    nt, dt = cross_ratio_parts(*vals[3:])
    return (ns * dt - nt * ds).is_zero()


# -- modular evaluation tables ------------------------------------------------


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if p % q == 0:
            return p == q
    d, s = p - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, p)
        if x in (1, p - 1):
            continue
        for _ in range(s - 1):
            x = x * x % p
            if x == p - 1:
                break
        else:
            return False
    return True


def _prime_factors(n: int):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def modular_unit_tables(n: int, count: int = 2, start: int = 1 << 30):
    """(p, table) pairs with table[c] = w^c - 1 mod p, w of exact order n."""
    tables = []
    k = start // n
    qs = _prime_factors(n)
    while len(tables) < count:
        k += 1
        p = k * n + 1
        if not _is_prime(p):
            continue
        w = None
        for r in range(2, 1000):
            cand = pow(r, (p - 1) // n, p)
            if all(pow(cand, n // q, p) != 1 for q in qs):
                w = cand
                break
        if w is None:
            continue
        pows = np.empty(n, dtype=np.int64)
        acc = 1
        for i in range(n):
            pows[i] = acc
            acc = acc * w % p
        tables.append((p, (pows - 1) % p))
    return tables


def _mod_inverse_table(vals: np.ndarray, p: int) -> np.ndarray:
    """Batch inversion of nonzero residues (index 0 unused)."""
    out = np.empty_like(vals)
    out[0] = 0
    # prefix-product trick
    nz = vals[1:]
    pref = np.empty_like(nz)
    acc = 1
    for i, v in enumerate(nz.tolist()):
        pref[i] = acc
        acc = acc * v % p
    inv_acc = pow(int(acc), -1, p)
    for i in range(len(nz) - 1, -1, -1):
        out[i + 1] = int(pref[i]) * inv_acc % p
        inv_acc = inv_acc * int(nz[i]) % p
    return out


class CrossRatioHasher:
    """O(1)-per-triple bucket keys for cross-ratios at conductor n."""

    def __init__(self, n: int, nprimes: int = 2):
        self.n = n
        self.tables = modular_unit_tables(n, nprimes)
        self.invs = [(_mod_inverse_table(t, p)) for p, t in self.tables]

    def keys(self, s1, s2, s3):
        """Combined key array for triples given as int arrays mod n."""
        n = self.n
        a = (s3 - s1) % n
        b = (s2 - s1) % n
        key = None
        for (p, t), inv in zip(self.tables, self.invs):
            k = t[a] * t[s2] % p * inv[b] % p * inv[s3] % p
            key = k if key is None else key * p + k
        return key


class ReductionTable:
    """x^e mod Phi_n as integer vectors, e = 0..n-1 (x^n == 1 mod Phi_n)."""

    def __init__(self, n: int):
        self.n = n
        phi = cyclotomic_poly(n)
        d = len(phi) - 1
        self.deg = d
        rows = []
        cur = [0] * d
        cur[0] = 1
        for _ in range(n):
            rows.append(list(cur))
            lead = cur[d - 1]
            nxt = [0] + cur[:-1]
            if lead:
                for j in range(d):
                    nxt[j] -= lead * phi[j]
            cur = nxt
        arr = np.array(rows, dtype=object)
        m = max(abs(int(v)) for v in arr.flat)
        if m < (1 << 55):
            arr = arr.astype(np.int64)
        self.rows = arr

    def verify_pairs(self, sig: np.ndarray, tau: np.ndarray) -> np.ndarray:
        """Exact mask for N_sig*D_tau == N_tau*D_sig, batched.

        sig/tau are (m, 3) integer arrays mod n with distinct nonzero entries.
        """
        n = self.n
        m = sig.shape[0]
        if m == 0:
            return np.zeros(0, dtype=bool)

        def parts(tr):
            a = (tr[:, 2] - tr[:, 0]) % n
            b = (tr[:, 1] - tr[:, 0]) % n
            num = [(a + tr[:, 1], 1), (a, -1), (tr[:, 1], -1), (None, 1)]
            den = [(b + tr[:, 2], 1), (b, -1), (tr[:, 2], -1), (None, 1)]
            return num, den

        ns_, ds_ = parts(sig)
        nt_, dt_ = parts(tau)

        acc = np.zeros((m, self.deg), dtype=self.rows.dtype)
        zero = np.zeros(m, dtype=np.int64)

        def term_exps(term):
            e, c = term
            return (zero if e is None else np.asarray(e) % n), c

        for left, right, sign in ((ns_, dt_, 1), (nt_, ds_, -1)):
            for t1 in left:
                e1, c1 = term_exps(t1)
                for t2 in right:
                    e2, c2 = term_exps(t2)
                    acc += (sign * c1 * c2) * self.rows[(e1 + e2) % n]
        return ~acc.any(axis=1)


def triple_array(n: int) -> np.ndarray:
    """All ordered (s1, s2, s3), distinct, nonzero, as an (m, 3) int array."""
    idx = np.arange(1, n, dtype=np.int64)
    s1, s2, s3 = np.meshgrid(idx, idx, idx, indexing="ij")
    s1, s2, s3 = s1.ravel(), s2.ravel(), s3.ravel()
    mask = (s1 != s2) & (s1 != s3) & (s2 != s3)
    return np.stack([s1[mask], s2[mask], s3[mask]], axis=1)


def enumerate_S_array(n: int, hasher=None, reducer=None) -> np.ndarray:
    """All members of S with coordinates of order dividing n.

    Returns an (m, 6) int64 array of numerators over denominator n, sorted
    lexicographically.  Complete and duplicate-free.
    """
    if n < 4:
        return np.zeros((0, 6), dtype=np.int64)
    hasher = hasher or CrossRatioHasher(n)
    reducer = reducer or ReductionTable(n)
    trips = triple_array(n)
    keys = hasher.keys(trips[:, 0], trips[:, 1], trips[:, 2])
    order = np.argsort(keys, kind="stable")
    keys = keys[order]
    trips = trips[order]
    # bucket boundaries
    bounds = np.flatnonzero(np.r_[True, keys[1:] != keys[:-1], True])
    sig_parts = []
    tau_parts = []
    for i in range(len(bounds) - 1):
        lo, hi = bounds[i], bounds[i + 1]
        g = hi - lo
        block = trips[lo:hi]
        left = np.repeat(block, g, axis=0)
        right = np.tile(block, (g, 1))
        sig_parts.append(left)
        tau_parts.append(right)
    sig = np.concatenate(sig_parts) if sig_parts else np.zeros((0, 3), np.int64)
    tau = np.concatenate(tau_parts) if tau_parts else np.zeros((0, 3), np.int64)
    ok = np.zeros(len(sig), dtype=bool)
    chunk = 200_000
    for lo in range(0, len(sig), chunk):
        ok[lo : lo + chunk] = reducer.verify_pairs(sig[lo : lo + chunk], tau[lo : lo + chunk])
    members = np.concatenate([sig[ok], tau[ok]], axis=1)
    members = members[np.lexsort(members.T[::-1])]
    return members


def enumerate_S(n: int) -> set[Solution6]:
    """Oracle as a set of concrete solutions (for moderate n)."""
    arr = enumerate_S_array(n)
    return {
        concrete_solution([Fraction(int(v), n) for v in row]) for row in arr
    }


def oracle_contains(n: int, values) -> bool:
    """Membership of one concrete solution in the order-n oracle run."""
    vals = [qz(v) for v in values]
    if any(n % v.denominator for v in vals):
        return False
    sig = np.array([[int(v * n) for v in vals[:3]]], dtype=np.int64)
    tau = np.array([[int(v * n) for v in vals[3:]]], dtype=np.int64)
    return bool(ReductionTable(n).verify_pairs(sig, tau)[0])
