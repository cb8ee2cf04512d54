"""Exact integer matrix algebra.

Smith normal form with unimodular transforms, rational nullspaces, and the
affine solver over Q/Z that backs every solving branch.  Matrices are plain
lists of lists of Python ints (arbitrary precision); speed only matters for
the nullspace of the larger unit-relation matrices, which goes through a
verified modular path.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt

import numpy as np

from .qz import AffineQZ, affine_vector


def mat_identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    rows, inner, cols = len(a), len(b), len(b[0]) if b else 0
    out = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        ai = a[i]
        for k in range(inner):
            c = ai[k]
            if c:
                bk = b[k]
                oi = out[i]
                for j in range(cols):
                    oi[j] += c * bk[j]
    return out


def mat_vec(a, v):
    return [sum(c * x for c, x in zip(row, v) if c) for row in a]


@dataclass
class SNFResult:
    """S*M*T = D with S, T unimodular and D diagonal with divisibility chain."""

    S: list
    D: list
    T: list

    @property
    def diagonal(self):
        m, n = len(self.D), len(self.D[0]) if self.D else 0
        return [self.D[i][i] for i in range(min(m, n))]

    @property
    def rank(self):
        return sum(1 for d in self.diagonal if d)


def snf(M) -> SNFResult:
    """Smith normal form with transforms.

    Pivot choice is the smallest nonzero |entry|, ties broken row-major, so
    the output is deterministic for a given input.
    """
    D = [list(row) for row in M]
    m = len(D)
    n = len(D[0]) if m else 0
    S = mat_identity(m)
    T = mat_identity(n)

    def row_op(i, j, q):  # row_i -= q * row_j
        D[i] = [a - q * b for a, b in zip(D[i], D[j])]
        S[i] = [a - q * b for a, b in zip(S[i], S[j])]

    def col_op(i, j, q):  # col_i -= q * col_j
        for row in D:
            row[i] -= q * row[j]
        for row in T:
            row[i] -= q * row[j]

    def swap_rows(i, j):
        if i != j:
            D[i], D[j] = D[j], D[i]
            S[i], S[j] = S[j], S[i]

    def swap_cols(i, j):
        if i != j:
            for row in D:
                row[i], row[j] = row[j], row[i]
            for row in T:
                row[i], row[j] = row[j], row[i]

    def find_pivot(t):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                v = abs(D[i][j])
                if v and (best is None or v < best[0]):
                    best = (v, i, j)
        return best

    t = 0
    while t < min(m, n):
        piv = find_pivot(t)
        if piv is None:
            break
        _, pi, pj = piv
        swap_rows(t, pi)
        swap_cols(t, pj)
        dirty = False
        for i in range(t + 1, m):
            if D[i][t]:
                q = D[i][t] // D[t][t]
                row_op(i, t, q)
                if D[i][t]:
                    dirty = True
        for j in range(t + 1, n):
            if D[t][j]:
                q = D[t][j] // D[t][t]
                col_op(j, t, q)
                if D[t][j]:
                    dirty = True
        if dirty:
            continue
        # divisibility: pull any non-divisible remaining entry into row t
        bad = None
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if D[i][j] % D[t][t]:
                    bad = i
                    break
            if bad is not None:
                break
        if bad is not None:
            D[t] = [a + b for a, b in zip(D[t], D[bad])]
            S[t] = [a + b for a, b in zip(S[t], S[bad])]
            continue
        if D[t][t] < 0:
            D[t] = [-a for a in D[t]]
            S[t] = [-a for a in S[t]]
        t += 1
    return SNFResult(S, D, T)


def _kernel_fractions(M):
    rows = [[Fraction(x) for x in row] for row in M]
    m = len(rows)
    n = len(rows[0]) if m else 0
    pivots = []
    r = 0
    for c in range(n):
        pr = None
        for i in range(r, m):
            if rows[i][c]:
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(m):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -rows[i][f]
        basis.append(v)
    return basis


_PRIMES = (2147483647, 2147483629, 2147483587, 2147483579)


def _rat_reconstruct(x: int, m: int):
    """Wang rational reconstruction of x mod m, or None."""
    bound = isqrt(m // 2)
    a0, a1 = m, x % m
    b0, b1 = 0, 1
    while a1 > bound:
        q = a0 // a1
        a0, a1 = a1, a0 - q * a1
        b0, b1 = b1, b0 - q * b1
    if b1 == 0 or abs(b1) > bound or gcd(abs(a1), abs(b1)) != 1:
        return None
    return Fraction(a1, b1)


def _kernel_modular(M):
    """Kernel basis via mod-p RREF, rational reconstruction, exact verification."""
    m = len(M)
    n = len(M[0]) if m else 0
    exact_rows = [list(row) for row in M]
    for nprimes in (1, 2, 3, 4):
        primes = _PRIMES[:nprimes]
        modulus = 1
        for p in primes:
            modulus *= p
        rrefs = []
        ok = True
        for p in primes:
            got = _rref_mod_p(M, p)
            if got is None:
                ok = False
                break
            rrefs.append(got)
        if not ok:
            continue
        # all primes must agree on the pivot structure
        pivots = rrefs[0][1]
        if any(r[1] != pivots for r in rrefs[1:]):
            continue
        free = [c for c in range(n) if c not in pivots]
        basis = []
        good = True
        for f in free:
            v = [Fraction(0)] * n
            v[f] = Fraction(1)
            for i, c in enumerate(pivots):
                residues = [int(r[0][i][f]) for r in rrefs]
                x = _crt(residues, primes)
                q = _rat_reconstruct(x, modulus)
                if q is None:
                    good = False
                    break
                v[c] = -q
            if not good:
                break
            basis.append(v)
        if not good:
            continue
        if all(
            all(sum(Fraction(c) * x for c, x in zip(row, v)) == 0 for row in exact_rows)
            for v in basis
        ):
            return basis
    # fall back to exact elimination (slow but certain)
    return _kernel_fractions(M)


def _crt(residues, primes):
    x, mod = 0, 1
    for r, p in zip(residues, primes):
        g, inv = _xgcd_inv(mod % p, p)
        t = ((r - x) * inv) % p
        x += mod * t
        mod *= p
    return x % mod


def _xgcd_inv(a, p):
    if a == 0:
        return 0, 0
    return 1, pow(a, -1, p)


def _rref_mod_p(M, p):
    A = np.array(M, dtype=object) % p
    A = A.astype(np.int64)
    m, n = A.shape
    pivots = []
    r = 0
    for c in range(n):
        rows_nz = np.nonzero(A[r:, c])[0]
        if rows_nz.size == 0:
            continue
        pr = r + int(rows_nz[0])
        if pr != r:
            A[[r, pr]] = A[[pr, r]]
        inv = pow(int(A[r, c]), -1, p)
        A[r] = (A[r] * inv) % p
        col = A[:, c].copy()
        col[r] = 0
        nz = np.nonzero(col)[0]
        if nz.size:
            A[nz] = (A[nz] - np.outer(col[nz], A[r])) % p
        pivots.append(c)
        r += 1
        if r == m:
            break
    return A, pivots


def rational_kernel(M) -> list[list[Fraction]]:
    """Basis of {v : M v = 0} over Q (RREF-style, deterministic)."""
    m = len(M)
    n = len(M[0]) if m else 0
    if n == 0:
        return []
    if m == 0:
        return [[Fraction(i == j) for j in range(n)] for i in range(n)]
    if m * n <= 4096:
        return _kernel_fractions(M)
    return _kernel_modular(M)


def integer_kernel_basis(M) -> list[list[int]]:
    """rational_kernel scaled to primitive integer vectors."""
    out = []
    for v in rational_kernel(M):
        den = 1
        for x in v:
            den = den * x.denominator // gcd(den, x.denominator)
        w = [int(x * den) for x in v]
        g = 0
        for x in w:
            g = gcd(g, x)
        out.append([x // (g or 1) for x in w])
    return out


def hermite_normal_form(rows) -> list[list[int]]:
    """Row-style HNF of the lattice spanned by integer rows.

    Pivots positive, entries above a pivot reduced into [0, pivot); zero
    rows dropped.  Canonical for the row lattice.
    """
    rows = [list(r) for r in rows if any(r)]
    if not rows:
        return []
    ncols = len(rows[0])
    out = []
    for col in range(ncols):
        while True:
            nz = [r for r in rows if r[col]]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda r: abs(r[col]))
            piv = nz[0]
            for r in nz[1:]:
                q = r[col] // piv[col]
                for j in range(ncols):
                    r[j] -= q * piv[j]
            rows = [r for r in rows if any(r)]
        nz = [r for r in rows if r[col]]
        if nz:
            piv = nz[0]
            if piv[col] < 0:
                piv[:] = [-x for x in piv]
            out.append(piv)
            rows.remove(piv)
    # reduce entries above each pivot
    for i in range(len(out) - 1, -1, -1):
        pcol = next(j for j, v in enumerate(out[i]) if v)
        for k in range(i):
            q = out[k][pcol] // out[i][pcol]
            if q:
                for j in range(ncols):
                    out[k][j] -= q * out[i][j]
    return out


@dataclass
class QZSolutionSet:
    """Complete solution set of M x = b over Q/Z.

    ``consistency`` lists expressions that must vanish for solutions to
    exist; when they do, the union of the branches is the full solution set,
    one fresh free variable per zero diagonal entry and one branch per
    residue class of each torsion diagonal entry.
    """

    consistency: list
    branches: list
    free_vars: list = field(default_factory=list)
    diagonal: list = field(default_factory=list)

    @property
    def is_consistent_symbolically(self):
        return all(e == 0 for e in self.consistency)

    def concrete_consistent(self):
        """For constant consistency expressions: do all vanish?"""
        return all(e.is_constant and e.const == 0 for e in self.consistency)


_FRESH = [0]


def fresh_var(prefix="x"):
    _FRESH[0] += 1
    return f"{prefix}{_FRESH[0]}"


def solve_qz(M, b, var_prefix="x") -> QZSolutionSet:
    """Solve M x = b in Q/Z with b a vector of AffineQZ (or Fractions).

    Transforms b through the SNF left factor, divides by each torsion
    diagonal entry (enumerating the d_i residue branches), introduces one
    free variable per zero column, and maps back through the right factor.
    """
    b = affine_vector(b)
    res = snf(M)
    m = len(M)
    n = len(M[0]) if m else 0
    c = []
    for i in range(m):
        expr = AffineQZ(0)
        for j, coeff in enumerate(res.S[i]):
            if coeff:
                expr = expr + b[j].scale(coeff)
        c.append(expr)
    diag = res.diagonal
    r = sum(1 for d in diag if d)
    consistency = [c[i] for i in range(r, m)]
    free_vars = [fresh_var(var_prefix) for _ in range(n - r)]
    # options for y_i in SNF coordinates
    options = []
    for i in range(r):
        d = diag[i]
        base = c[i].scale(Fraction(1, d))
        options.append([base + AffineQZ(Fraction(k, d)) for k in range(d)])
    for v in free_vars:
        options.append([AffineQZ.var(v)])
    branches = []
    stack = [[]]
    for opts in options:
        stack = [prefix + [o] for prefix in stack for o in opts]
    for y in stack if options else [[]]:
        x = []
        for i in range(n):
            expr = AffineQZ(0)
            for j in range(n):
                coeff = res.T[i][j]
                if coeff and j < len(y):
                    expr = expr + y[j].scale(coeff)
            x.append(expr)
        branches.append(tuple(x))
    return QZSolutionSet(consistency, branches, free_vars, diag)
