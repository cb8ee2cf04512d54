"""The order-768 symmetry group and its actions.

The group is generated by simultaneous coordinate permutations, the swap of
the two sides, and the eight cross-ratio-preserving rethreadings of either
side.  All generators are linear on the additive coordinates, so elements
are 6x6 integer matrices.  The group acts on solutions, permutes the twelve
monomial symbols up to negation/inversion, and (together with Galois
conjugation) defines the coarse equivalence used for all counting.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cache
from math import gcd, lcm

import numpy as np

from .errors import MatchFailure
from .qz import AffineQZ, qz
from .relations import SYMBOLS, SYSTEM_MATRIX
from .solutions import Solution6

HALF = Fraction(1, 2)


def _perm_matrix(images):
    """Matrix sending coordinate j to position images[j]."""
    m = [[0] * 6 for _ in range(6)]
    for j, i in enumerate(images):
        m[i][j] = 1
    return tuple(map(tuple, m))


def _side_maps():
    """The eight rethreading maps on one side, as 3x3 integer matrices."""
    base = [
        ((1, 0, 0), (0, 1, 0), (0, 0, 1)),  # identity
        ((1, 0, 0), (1, 0, -1), (1, -1, 0)),  # u -> (u1, u1-u3, u1-u2)
        ((0, 1, -1), (0, 1, 0), (-1, 1, 0)),  # u -> (u2-u3, u2, u2-u1)
        ((0, -1, 1), (-1, 0, 1), (0, 0, 1)),  # u -> (u3-u2, u3-u1, u3)
    ]
    out = []
    for m in base:
        out.append(m)
        out.append(tuple(tuple(-x for x in row) for row in m))
    return out


def _embed(side3, on_t):
    m = [[0] * 6 for _ in range(6)]
    for i in range(3):
        for j in range(3):
            if on_t:
                m[3 + i][3 + j] = side3[i][j]
            else:
                m[i][j] = side3[i][j]
    for i in range(3):
        if on_t:
            m[i][i] = 1
        else:
            m[3 + i][3 + i] = 1
    return tuple(map(tuple, m))


def generators():
    gens = [
        _perm_matrix((2, 0, 1, 5, 3, 4)),  # 3-cycle on both sides
        _perm_matrix((1, 0, 2, 4, 3, 5)),  # swap first two on both sides
        _perm_matrix((3, 4, 5, 0, 1, 2)),  # swap the s and t sides
    ]
    for side in _side_maps():
        gens.append(_embed(side, on_t=True))
        gens.append(_embed(side, on_t=False))
    return gens


def _matmul6(a, b):
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(6)) for j in range(6))
        for i in range(6)
    )


@cache
def group_elements() -> tuple:
    """All 768 matrices, closed under composition, deterministically sorted."""
    gens = generators()
    els = set(gens)
    frontier = list(els)
    while frontier:
        new = []
        for g in gens:
            for h in frontier:
                c = _matmul6(g, h)
                if c not in els:
                    els.add(c)
                    new.append(c)
        frontier = new
    return tuple(sorted(els))


@cache
def group_array() -> np.ndarray:
    arr = np.array(group_elements(), dtype=np.int64)
    assert np.abs(arr).max() < 127
    return arr.astype(np.int8)


def act(g, z):
    """Apply a group matrix to a solution (Solution6 or 6 values)."""
    if isinstance(z, Solution6):
        coords = z.coords
        out = []
        for row in g:
            expr = AffineQZ(0)
            for coeff, c in zip(row, coords):
                if coeff:
                    expr = expr + c.scale(coeff)
            out.append(expr)
        return Solution6(out)
    vals = [qz(v) for v in z]
    return tuple(qz(sum(c * v for c, v in zip(row, vals))) for row in g)


# -- the twelve monomial symbols -----------------------------------------------


@cache
def monomial_functionals() -> tuple:
    """(coeff 6-vector, constant) for the 12 symbols, on halved coordinates."""
    S = ((-1, 1, 1), (1, -1, 1), (1, 1, -1))

    def v(si, ti, tsign):
        return tuple(list(S[si]) + [tsign * x for x in S[ti]])

    a = [v(2, 1, 1), v(0, 2, 1), v(1, 0, 1)]  # A1=S3 T2, A2=S1 T3, A3=S2 T1
    b = [
        tuple(-x for x in v(1, 2, 1)),  # B1 = -conj(S2 T3)
        tuple(-x for x in v(2, 0, 1)),  # B2 = -conj(S3 T1)
        tuple(-x for x in v(0, 1, 1)),  # B3 = -conj(S1 T2)
    ]
    ap = [v(2, 1, -1), v(0, 2, -1), v(1, 0, -1)]  # A1' = S3 conj(T2), ...
    bp = []
    for si, ti in ((1, 2), (2, 0), (0, 1)):  # B1' = -conj(S2) T3, ...
        bp.append(tuple([-x for x in S[si]] + list(S[ti])))
    funcs = []
    for vec in a:
        funcs.append((vec, Fraction(0)))
    for vec in b:
        funcs.append((vec, HALF))
    for vec in ap:
        funcs.append((vec, Fraction(0)))
    for vec in bp:
        funcs.append((vec, HALF))
    # order (a1,a2,a3,b1,b2,b3,a1',a2',a3',b1',b2',b3') matching SYMBOLS
    return tuple(funcs)


def monomial_values(z_halved):
    """Values of the 12 symbols at halved coordinates."""
    out = []
    for vec, const in monomial_functionals():
        out.append(qz(sum(c * v for c, v in zip(vec, z_halved)) + const))
    return tuple(out)


def induced_perm_U12(g):
    """The signed permutation of the 12 symbols induced by g.

    Returns a tuple of (target index, sign, half-shift) triples: pushing
    symbol i through g lands on sign * symbol_target + shift.
    """
    funcs = monomial_functionals()
    out = []
    for vec, const in funcs:
        moved = tuple(
            sum(vec[i] * g[i][j] for i in range(6)) for j in range(6)
        )
        matches = []
        for j, (w, cj) in enumerate(funcs):
            for eps in (1, -1):
                if moved == tuple(eps * x for x in w):
                    delta = qz(const - eps * cj)
                    if delta in (Fraction(0), HALF):
                        matches.append((j, eps, delta))
        if len(matches) != 1:
            raise MatchFailure(f"symbol maps to {len(matches)} candidates")
        out.append(matches[0])
    return tuple(out)


@cache
def u12_perms() -> tuple:
    """Distinct plain permutations of the symbol set induced by the group."""
    seen = {}
    for g in group_elements():
        perm = tuple(j for j, _, _ in induced_perm_U12(g))
        seen.setdefault(perm, g)
    return tuple(sorted(seen))


# -- orbits of six-element symbol subsets --------------------------------------

_LEMMA16_REPS = (
    ("a1", "a2", "a3", "b1", "b2", "a1'"),
    ("a1", "a2", "a3", "b1", "b2", "a3'"),
    ("a1", "a2", "a3", "b1", "b2", "b1'"),
    ("a1", "a2", "a3", "b1", "b2", "b3'"),
    ("a1", "a2", "a3", "b1", "a1'", "a2'"),
    ("a1", "a2", "a3", "b1", "a1'", "b1'"),
    ("a1", "a2", "b1", "b2", "a1'", "a2'"),
    ("a1", "a2", "b1", "b2", "a1'", "b1'"),
    ("a1", "a2", "a3", "a1'", "a2'", "a3'"),
    ("a1", "a2", "a3", "b1", "b2", "b3"),
    ("a1", "a2", "a3", "b1", "a2'", "a3'"),
    ("a1", "a2", "a3", "b1", "a2'", "b1'"),
    ("a1", "a2", "b1", "b2", "a1'", "b2'"),
    ("a1", "a2", "b1", "b3", "a1'", "a2'"),
    ("a1", "a2", "b1", "b3", "a1'", "b1'"),
    ("a1", "a2", "b1", "b3", "a1'", "b3'"),
    ("a1", "a2", "b1", "b3", "a2'", "b3'"),
    ("a1", "a2", "b1", "a1'", "a2'", "b1'"),
    ("a1", "a2", "b3", "a1'", "a2'", "b3'"),
)


@dataclass(frozen=True)
class Orbit:
    index: int  # 1-based, ordered as in the shipped table
    rep: tuple  # six symbol indices (the table's representative)
    members: frozenset  # frozensets of symbol indices
    snf_diag: tuple
    consistency: tuple  # normalized affine conditions on the six knowns

    @property
    def size(self):
        return len(self.members)


SYSTEM_RHS = (HALF, HALF, Fraction(0), Fraction(0), Fraction(0), Fraction(0))


def _normalize_condition(coeffs, const):
    """Sign-normalize an affine condition sum(c_i x_i) + const = 0 in Q/Z.

    Scaling would weaken a condition mod 1, so only the global sign is
    normalized (and the constant reduced into [0,1)).
    """
    ints = [int(c) for c in coeffs]
    lead = next((v for v in ints if v), 0)
    if lead < 0:
        ints = [-v for v in ints]
        const = -Fraction(const)
    return (tuple(ints), qz(Fraction(const)))


def condition_span_key(conds):
    """Canonical key of the subgroup of conditions generated by the rows.

    Conditions are integer functionals plus a half-integer constant, taken
    mod 1; the generated subgroup is encoded by the Hermite form of the
    rows (constant doubled) together with the relation 2*(0,...,0,1/2)=0.
    """
    from .intlinalg import hermite_normal_form

    rows = [list(c) + [int(2 * qz(Fraction(k)))] for c, k in conds]
    rows.append([0] * 12 + [2])
    return tuple(map(tuple, hermite_normal_form(rows)))


def orbit_solve_data(rep_indices):
    """SNF diagonal and normalized consistency conditions for a subset."""
    from .intlinalg import solve_qz

    known = sorted(rep_indices)
    unknown = [i for i in range(12) if i not in known]
    M = [[SYSTEM_MATRIX[r][c] for c in unknown] for r in range(6)]
    rhs = []
    for r in range(6):
        expr = AffineQZ(Fraction(SYSTEM_RHS[r]))
        for c in known:
            if SYSTEM_MATRIX[r][c]:
                expr = expr - AffineQZ.var(SYMBOLS[c]).scale(SYSTEM_MATRIX[r][c])
        rhs.append(expr)
    sol = solve_qz(M, rhs, var_prefix="w")
    conds = []
    for e in sol.consistency:
        coeffs = [e.coeff(SYMBOLS[c]) for c in range(12)]
        conds.append(_normalize_condition(coeffs, e.const))
    return tuple(sol.diagonal), tuple(sorted(conds)), sol


@cache
def orbits_U12_6() -> tuple[Orbit, ...]:
    """The orbits of the symbol-subset action, ordered as in the table."""
    perms = u12_perms()
    reps = [tuple(SYMBOLS.index(s) for s in rep) for rep in _LEMMA16_REPS]
    seen = set()
    orbits = []
    for idx, rep in enumerate(reps, start=1):
        start = frozenset(rep)
        assert start not in seen, "representative already covered"
        members = {start}
        frontier = [start]
        while frontier:
            new = []
            for sub in frontier:
                for perm in perms:
                    img = frozenset(perm[i] for i in sub)
                    if img not in members:
                        members.add(img)
                        new.append(img)
            frontier = new
        seen |= members
        diag, conds, _ = orbit_solve_data(rep)
        orbits.append(Orbit(idx, tuple(rep), frozenset(members), diag, conds))
    total = sum(o.size for o in orbits)
    assert total == 924, f"orbit sizes cover {total} != 924"
    return tuple(orbits)


def orbit_of(subset) -> Orbit:
    target = frozenset(subset)
    for o in orbits_U12_6():
        if target in o.members:
            return o
    raise KeyError(subset)


def check_lemma17() -> bool:
    """The three covering claims for 7-, 8-, and 9-element symbol subsets."""
    from itertools import combinations

    orbits = orbits_U12_6()
    index = {}
    for o in orbits:
        for m in o.members:
            index[m] = o.index
    claims = {7: {1, 3, 5, 7, 11, 14}, 8: {1, 2, 6, 7, 15}, 9: {1}}
    for size, allowed in claims.items():
        for sup in combinations(range(12), size):
            if not any(
                index[frozenset(sub)] in allowed
                for sub in combinations(sup, 6)
            ):
                return False
    return True


# -- canonical forms under the group and Galois conjugation --------------------


@cache
def galois_units(n: int) -> tuple[int, ...]:
    return tuple(k for k in range(1, n) if gcd(k, n) == 1)


def orbit_array(values) -> tuple[np.ndarray, int]:
    """All group x Galois images of a concrete solution, as ints mod n."""
    vals = [qz(v) for v in values]
    n = lcm(*(v.denominator for v in vals))
    vec = np.array([int(v * n) for v in vals], dtype=np.int64)
    mats = group_array().astype(np.int64)
    orbit = mats @ vec % n
    ks = np.array(galois_units(n), dtype=np.int64)
    full = (orbit[None, :, :] * ks[:, None, None]).reshape(-1, 6) % n
    return full, n


def canonicalize(z) -> tuple[Fraction, ...]:
    """Lexicographically least element of the group x Galois orbit."""
    values = z.concrete_values() if isinstance(z, Solution6) else z
    full, n = orbit_array(values)
    idx = np.lexsort(tuple(full[:, i] for i in range(5, -1, -1)))
    best = full[idx[0]]
    return tuple(qz(Fraction(int(v), n)) for v in best)


def canonical_set(rows: np.ndarray, n: int) -> np.ndarray:
    """Canonicalize many solutions (rows of numerators mod n) at once.

    Used by the search pipelines: connected components under the generator
    maps would also work, but full orbit minima per row stay exact and are
    fast enough at the row counts we feed in.
    """
    out = np.empty_like(rows)
    for i, row in enumerate(rows):
        vals = [Fraction(int(v), n) for v in row]
        best = canonicalize(vals)
        out[i] = [int(v * n) for v in best]
    return out


# -- parametric families as lattice cosets -------------------------------------


def family_coset(sol: Solution6):
    """(constant vector, saturated coefficient lattice in HNF) of a family.

    The specialization set of c + V x over x in (Q/Z)^k is the coset of the
    saturated column lattice of V tensored with Q/Z (divisibility of Q/Z
    absorbs integer scalings), so this pair determines the family exactly.
    """
    from .intlinalg import hermite_normal_form, snf

    variables = sol.variables
    c = tuple(co.const for co in sol.coords)
    if not variables:
        return c, ()
    cols = []
    for v in variables:
        col = [co.coeff(v) for co in sol.coords]
        den = 1
        for x in col:
            den = lcm(den, x.denominator)
        cols.append([int(x * den) for x in col])
    V = [[cols[j][i] for j in range(len(cols))] for i in range(6)]
    res = snf(V)
    r = res.rank
    # saturation basis: first r columns of S^{-1} (S is unimodular)
    Sinv = _invert_unimodular(res.S)
    rows = [[Sinv[i][j] for i in range(6)] for j in range(r)]
    return c, tuple(map(tuple, hermite_normal_form(rows)))


def _invert_unimodular(S):
    n = len(S)
    aug = [[Fraction(S[i][j]) for j in range(n)] + [Fraction(i == j) for j in range(n)] for i in range(n)]
    for c in range(n):
        piv = next(i for i in range(c, n) if aug[i][c])
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = 1 / aug[c][c]
        aug[c] = [x * inv for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c]:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    return [[int(aug[i][n + j]) for j in range(n)] for i in range(n)]


def reduce_mod_lattice(c, hnf_rows):
    """Canonical representative of c modulo the lattice subgroup in Q/Z."""
    candidates = [tuple(qz(x) for x in c)]
    for row in hnf_rows:
        pcol = next(j for j, v in enumerate(row) if v)
        d = row[pcol]
        new = []
        for cand in candidates:
            v = cand[pcol]
            base = Fraction(v, d)
            for k in range(d):
                t = base + Fraction(k, d)
                new.append(tuple(qz(x - t * h) for x, h in zip(cand, row)))
        candidates = sorted(set(new))
    return min(candidates)


def in_lattice_coset(z, c, hnf_rows) -> bool:
    diff = [qz(a - b) for a, b in zip(z, c)]
    return all(v == 0 for v in reduce_mod_lattice(diff, hnf_rows))


def _transform_coset(g, c, rows):
    from .intlinalg import hermite_normal_form

    gc = tuple(qz(sum(g[i][j] * c[j] for j in range(6))) for i in range(6))
    grows = [
        [sum(g[i][j] * row[j] for j in range(6)) for i in range(6)] for row in rows
    ]
    return gc, (tuple(map(tuple, hermite_normal_form(grows))) if rows else ())


def canonicalize_family(sol: Solution6):
    """Exact fingerprint of a parametric family under the group, Galois
    conjugation of constants, and reparametrization.

    The fingerprint is the minimum, over the 768 group elements and the
    Galois multipliers of the reduced constants, of (lattice HNF, constant
    reduced modulo the lattice).  Families are equal under the coarse
    equivalence iff their fingerprints coincide.
    """
    from .errors import DegenerateFamily

    if not sol.degeneracy_ok():
        raise DegenerateFamily(str(sol))
    c0, rows0 = family_coset(sol)
    best = None
    for g in group_elements():
        gc, grows = _transform_coset(g, c0, rows0)
        red = reduce_mod_lattice(gc, grows)
        den = 1
        for x in red:
            den = lcm(den, x.denominator)
        for k in galois_units(den):
            cand = (grows, reduce_mod_lattice([k * x for x in red], grows))
            if best is None or cand < best:
                best = cand
    return best
