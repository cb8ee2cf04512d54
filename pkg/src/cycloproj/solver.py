"""The solving branches: monomial construction, recovery, assignment engines.

A solution [s, t] (of squared coordinates) yields 24 monomials summing to
zero; conversely, assigning the 12 monomial symbols to the terms of a
candidate vanishing multiset G turns the linear system into equations over
Q/Z whose solutions recover members of S.  Two engines cover the branches:

* the orbit engine fixes six symbols on a concrete stable core G0 and
  solves for the complementary six, then pins any free variable by
  requiring the residual to split into the R2/R3/R5 budget;
* the pair engine writes G as self-stable parts plus conjugate pairs with
  unknown rotations and solves for the rotations, which is what produces
  the parametric families.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product
from math import lcm

import numpy as np

from .errors import DegenerateTuple, TwoFreeVariables
from .qz import AffineQZ, qz, qz_halve, solve_scalar_affine
from .relations import (
    RootMultiset,
    SYMBOLS,
    compute_P_q,
    conjugate_pairs,
    decompose_as,
    normalize_multiset,
    possible_q_types,
    stable_structures,
    template_eliminated_at,
)
from .solutions import Solution6
from .symmetry import monomial_values, orbit_solve_data, orbits_U12_6

HALF = Fraction(1, 2)


def monomials_from_solution(z) -> RootMultiset:
    """The 24-term vanishing multiset of a concrete solution."""
    values = z.concrete_values() if isinstance(z, Solution6) else [qz(v) for v in z]
    s = [Fraction(0)] + list(values[:3])
    t = [Fraction(0)] + list(values[3:])
    if len(set(s)) != 4 or len(set(t)) != 4:
        raise DegenerateTuple("coincident coordinates")
    halved = [qz_halve(v) for v in values]
    vals = monomial_values(halved)
    return RootMultiset(list(vals) + [qz(-v) for v in vals])


def recover_solution(ab) -> Solution6 | None:
    """Squared coordinates from the twelve symbol values (may be degenerate).

    ab: sequence of 12 AffineQZ/Fractions ordered like SYMBOLS.
    """
    ab = [v if isinstance(v, AffineQZ) else AffineQZ(qz(Fraction(v))) for v in ab]
    a1, a2, a3, b1, b2, b3, a1p, a2p, a3p, b1p, b2p, b3p = ab
    half = AffineQZ(HALF)
    coords = [
        half + a3 - b2p,
        half + a1 - b3p,
        half + a2 - b1p,
        half + a2 + b3p,
        half + a3 + b1p,
        half + a1 + b2p,
    ]
    sol = Solution6(coords)
    return sol if sol.degeneracy_ok() else None


@dataclass(frozen=True)
class Feasibility:
    feasible: bool
    q: int
    types: frozenset
    intersection: frozenset

    def __bool__(self):
        return self.feasible


def algorithm23(t, q: int) -> Feasibility:
    """Feasible unless no achievable q-type lies in P_q."""
    types = frozenset(possible_q_types(t, q))
    hit = types & compute_P_q(q)
    return Feasibility(bool(hit), q, types, frozenset(hit))


# -- generic symbolic cover machinery -------------------------------------------

_BLOCK_OFFSETS = {
    2: (HALF,),
    3: (Fraction(1, 3), Fraction(2, 3)),
    5: (Fraction(1, 5), Fraction(2, 5), Fraction(3, 5), Fraction(4, 5)),
}


def _remove_once(pool: list, value) -> bool:
    for i, v in enumerate(pool):
        if v == value:
            del pool[i]
            return True
    return False


def decompose_symbolic(elements, budget):
    """Cover AffineQZ elements by R2/R3/R5 blocks using identical equality.

    Works for concrete and parametric elements alike; parametric elements
    only ever match when their variable parts agree identically.
    """
    pool = sorted(elements, key=lambda e: e.key())
    n2, n3, n5 = budget if budget is not None else (None, None, None)

    def rec(pool, b2, b3, b5):
        if not pool:
            return True
        e = pool[0]
        for size, bleft in ((2, b2), (3, b3), (5, b5)):
            if bleft is not None and bleft <= 0:
                continue
            rest = list(pool[1:])
            ok = True
            for off in _BLOCK_OFFSETS[size]:
                if not _remove_once(rest, e + AffineQZ(off)):
                    ok = False
                    break
            if ok and rec(
                rest,
                b2 - (size == 2) if b2 is not None else None,
                b3 - (size == 3) if b3 is not None else None,
                b5 - (size == 5) if b5 is not None else None,
            ):
                return True
        return False

    if budget is not None and 2 * n2 + 3 * n3 + 5 * n5 != len(pool):
        return False
    return rec(pool, n2, n3, n5)


def candidate_pins(u24, g0_terms, budget):
    """Pin values for the free variable of a parametric symbol vector.

    Any valid specialization either works identically in the variable or
    forces some linear condition u(x) = v + offset between two elements of
    the multiset (or an element and a core term), so collecting the
    solutions of all those scalar equations is exhaustive.
    """
    var = None
    for e in u24:
        if e.variables:
            var = e.variables[0]
            break
    if var is None:
        return set(), None
    offsets = [Fraction(0)] + [o for offs in _BLOCK_OFFSETS.values() for o in offs]
    pins = set()
    targets = [AffineQZ(qz(t)) for t in g0_terms]
    for u in u24:
        cu = u.coeff(var)
        for v in list(u24) + targets:
            cv = v.coeff(var)
            c1 = cu - cv
            if c1 == 0:
                continue
            for off in offsets:
                c0 = (v + AffineQZ(off) - u).const
                p, den = c1.numerator, c1.denominator
                if den == 1:
                    pins |= solve_scalar_affine(p, c0)
                else:
                    # (p/den) x = c0 in Q/Z: x = (den/p)(c0 + k), k = 0..|p|-1
                    for k in range(abs(p)):
                        pins.add(qz(Fraction(den, p) * (c0 + k)))
    return pins, var


# -- the orbit engine (concrete core + budget) -----------------------------------

_ORBIT_CHOICES = {6: tuple(range(1, 20)), 7: (1, 3, 5, 7, 11, 14), 8: (1, 2, 6, 7, 15)}


@dataclass
class OrbitRunReport:
    core: tuple
    budget: tuple | None
    pinned: set = field(default_factory=set)
    degenerate: int = 0
    parametric: list = field(default_factory=list)
    two_free: int = 0
    solutions: set = field(default_factory=set)


def algorithm27(g0, budget, report: OrbitRunReport | None = None) -> OrbitRunReport:
    """All solutions whose relation contains the concrete stable core g0
    with the residual splitting into the given R2/R3/R5 budget."""
    core = normalize_multiset(g0.elements if isinstance(g0, RootMultiset) else g0)
    report = report or OrbitRunReport(core, budget)
    cells = conjugate_pairs(core)
    n = len(cells)
    if n < 6:
        return report
    if n >= 9:
        picks, cell_pool = (1,), cells[:9]
    else:
        picks, cell_pool = _ORBIT_CHOICES[n], cells

    L = 2 * lcm(*(e.denominator for e in core), 2)
    cell_vals = [tuple(c) if len(c) == 2 else (c[0], c[0]) for c in cell_pool]

    for idx in picks:
        orbit = orbits_U12_6()[idx - 1]
        _run_orbit_assignments(orbit, core, cell_vals, budget, L, report)
    # canonical dedupe happens in the caller (branch driver)
    return report


def _run_orbit_assignments(orbit, core, cell_vals, budget, L, report):
    diag, _, sol = orbit_solve_data(orbit.rep)
    known_syms = [SYMBOLS[i] for i in sorted(orbit.rep)]
    ncells = len(cell_vals)
    nfree = sum(1 for d in diag if d == 0)
    if nfree >= 2:
        report.two_free += 1
        raise TwoFreeVariables(f"orbit {orbit.index} leaves two free variables")

    # enumerate ordered injective cell choices with element choices, as ints mod L
    perm_list = list(permutations(range(ncells), 6))
    if not perm_list:
        return
    perm_arr = np.array(perm_list, dtype=np.int64)
    vals_int = np.array(
        [[int(v * L) % L for v in cv] for cv in cell_vals], dtype=np.int64
    )
    nperm = len(perm_arr)
    elem_grid = np.array(list(product((0, 1), repeat=6)), dtype=np.int64)
    # consistency functionals over the six knowns (ints scaled by L)
    conds = []
    for e in sol.consistency:
        coeffs = np.array([int(e.coeff(s)) for s in known_syms], dtype=np.int64)
        conds.append((coeffs, int(e.const * L) % L))
    # containment prefilter: solved symbols, at doubled modulus for halves
    branch_mats = []
    if nfree == 0:
        for branch in sol.branches:
            rows = []
            consts = []
            for expr in branch:
                crow = [Fraction(2) * expr.coeff(s) for s in known_syms]
                cval = Fraction(2 * L) * expr.const
                assert all(c.denominator == 1 for c in crow) and cval.denominator == 1
                rows.append([int(c) for c in crow])
                consts.append(int(cval))
            branch_mats.append(
                (np.array(rows, dtype=np.int64).T, np.array(consts, dtype=np.int64))
            )
    survivors = []
    for chunk_lo in range(0, nperm, 65536):
        chunk = perm_arr[chunk_lo : chunk_lo + 65536]
        base_vals = vals_int[chunk]  # (m, 6, 2)
        for eg in elem_grid:
            assigned = base_vals[:, np.arange(6), eg]  # (m, 6)
            ok = np.ones(len(chunk), dtype=bool)
            for coeffs, const in conds:
                ok &= (assigned @ coeffs + const) % L == 0
            if ok.any() and branch_mats:
                ok &= _vector_finish_mask(assigned, branch_mats, core, budget, L)
            if ok.any():
                for row in assigned[ok]:
                    survivors.append(tuple(int(v) for v in row))
    for vals_row in _stabilizer_reps(orbit, sorted(set(survivors)), L):
        _finish_assignment(orbit, sol, known_syms, vals_row, L, core, budget, report)


def _vector_finish_mask(assigned, branch_mats, core, budget, L):
    """Rows whose 24 symbol values contain the core with a coverable rest.

    Exact containment plus the closed-form R2/R3 residual test; when the
    budget allows R5 blocks the residual test is skipped (the exact
    finisher handles those rows).
    """
    M = 2 * L
    m = len(assigned)
    a2 = assigned * 2 % M
    core_vec = np.zeros(M, dtype=np.int16)
    for t in core:
        core_vec[int(t * M) % M] += 1
    use_closed_form = budget is not None and budget[2] == 0 and (
        M % 3 == 0 or budget[1] == 0
    )
    any_ok = np.zeros(m, dtype=bool)
    rows_idx = np.repeat(np.arange(m), 24)
    for mat, consts in branch_mats:
        solved2 = (assigned @ mat + consts) % M
        u24 = np.concatenate([a2, solved2, (-a2) % M, (-solved2) % M], axis=1)
        counts = np.zeros((m, M), dtype=np.int16)
        np.add.at(counts, (rows_idx, u24.ravel()), 1)
        ok = (counts >= core_vec).all(axis=1)
        if use_closed_form and ok.any():
            residual = counts[ok] - core_vec
            ok_idx = np.flatnonzero(ok)
            if M % 3 == 0:
                step = M // 6
                c = residual.reshape(-1, 6, step)
                d = c[:, 0] - c[:, 3]
                good = (c[:, 2] - c[:, 5] == d) & (c[:, 4] - c[:, 1] == d)
                low = np.minimum(np.minimum(c[:, 1], c[:, 3]), c[:, 5])
                good &= (d >= 0) | (low >= -d)
                good = good.all(axis=1)
            else:
                step = M // 2
                c = residual.reshape(-1, 2, step)
                good = (c[:, 0] == c[:, 1]).all(axis=1)
            ok[ok_idx] = good
        any_ok |= ok
    return any_ok


def _stabilizer_reps(orbit, rows, L):
    """One representative per setwise-stabilizer orbit of assignments.

    Group elements fixing the known subset act on assignments; equivalent
    assignments recover equivalent solutions, so only minima are finished.
    """
    from .symmetry import group_elements, induced_perm_U12

    slots = sorted(orbit.rep)
    pos = {s: i for i, s in enumerate(slots)}
    actions = []
    for g in group_elements():
        perm = induced_perm_U12(g)
        if {perm[s][0] for s in slots} == set(slots):
            action = []
            for s in slots:
                j, eps, delta = perm[s]
                action.append((pos[j], eps, int(delta * L) % L))
            if action != [(i, 1, 0) for i in range(6)]:
                actions.append(action)
    keep = []
    seen = set()
    for row in rows:
        if row in seen:
            continue
        orbit_rows = {row}
        for action in actions:
            moved = [0] * 6
            for i, (j, eps, delta) in enumerate(action):
                moved[j] = (eps * row[i] + delta) % L
            orbit_rows.add(tuple(moved))
        seen |= orbit_rows
        keep.append(min(orbit_rows))
    return keep


def _stabilizer_reps(orbit, rows, L):
    """One representative per setwise-stabilizer orbit of assignments.

    Group elements fixing the known subset act on assignments; equivalent
    assignments recover equivalent solutions, so only minima are finished.
    """
    from .symmetry import group_elements, induced_perm_U12

    slots = sorted(orbit.rep)
    pos = {s: i for i, s in enumerate(slots)}
    actions = []
    for g in group_elements():
        perm = induced_perm_U12(g)
        if {perm[s][0] for s in slots} == set(slots):
            action = []
            for s in slots:
                j, eps, delta = perm[s]
                action.append((pos[j], eps, int(delta * L) % L))
            if action != [(i, 1, 0) for i in range(6)]:
                actions.append(action)
    keep = []
    seen = set()
    for row in rows:
        if row in seen:
            continue
        orbit_rows = {row}
        for action in actions:
            moved = [0] * 6
            for i, (j, eps, delta) in enumerate(action):
                moved[j] = (eps * row[i] + delta) % L
            orbit_rows.add(tuple(moved))
        seen |= orbit_rows
        keep.append(min(orbit_rows))
    return keep


def _containment_mask(assigned, branch_mats, core_counts, L):
    """Exact multiset containment of the core in the 24 symbol values."""
    M = 2 * L
    a2 = assigned * 2 % M  # (m, 6) at doubled modulus
    any_ok = np.zeros(len(assigned), dtype=bool)
    for mat, consts in branch_mats:
        # solved * 2L = assigned(mod L ints) @ (2 coeff) + 2L * const
        solved2 = (assigned @ mat + consts) % M
        u24 = np.concatenate([a2, solved2, (-a2) % M, (-solved2) % M], axis=1)
        ok = np.ones(len(assigned), dtype=bool)
        for value, count in core_counts.items():
            ok &= (u24 == value).sum(axis=1) >= count
        any_ok |= ok
    return any_ok


def _finish_assignment(orbit, sol, known_syms, vals_row, L, core, budget, report):
    assign = {s: AffineQZ(Fraction(v, L)) for s, v in zip(known_syms, vals_row)}
    if not all(e.substitute(assign) == 0 for e in sol.consistency):
        return
    unknown = [i for i in range(12) if i not in orbit.rep]
    for branch in sol.branches:
        values = [None] * 12
        for i, s in zip(sorted(orbit.rep), known_syms):
            values[i] = assign[s]
        for i, expr in zip(unknown, branch):
            values[i] = expr.substitute(assign)
        var = next((v.variables[0] for v in values if v.variables), None)
        if var is None:
            if _core_and_cover_concrete([v.const for v in values], core, budget):
                _emit(values, report)
            continue
        u24 = list(values) + [-v for v in values]
        # a cover that works identically in the free variable
        if _core_and_cover_symbolic(u24, core, budget):
            sol6 = recover_solution(values)
            if sol6 is not None:
                report.parametric.append(sol6)
            else:
                report.degenerate += 1
        pins, _ = candidate_pins(u24, core, budget)
        lin = [(v.const, v.coeff(var)) for v in values]
        for pin in sorted(pins, key=lambda f: (f.denominator, f.numerator)):
            concrete = [qz(c0 + c1 * pin) for c0, c1 in lin]
            if not _core_and_cover_concrete(concrete, core, budget):
                continue
            report.pinned.add(pin)
            _emit([AffineQZ(v) for v in concrete], report)


def _emit(values, report):
    sol6 = recover_solution(values)
    if sol6 is None:
        report.degenerate += 1
    elif sol6.is_concrete:
        report.solutions.add(sol6.concrete_values())
    else:
        report.parametric.append(sol6)


def _core_and_cover_symbolic(u24, core, budget) -> bool:
    pool = list(u24)
    for t in core:
        if not _remove_once(pool, AffineQZ(qz(t))):
            return False
    return decompose_symbolic(pool, budget)


def _core_and_cover_concrete(values, core, budget) -> bool:
    from collections import Counter

    pool = Counter()
    for v in values:
        pool[qz(v)] += 1
        pool[qz(-v)] += 1
    for t in core:
        t = qz(t)
        if not pool[t]:
            return False
        pool[t] -= 1
    residual = [v for v, c in pool.items() for _ in range(c)]
    return decompose_as(residual, budget) is not None
