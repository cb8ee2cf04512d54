"""Vanishing-sum machinery.

Root multisets, conjugation stability, q-types, the feasibility sets P_q,
concrete instantiation of relation templates (including the enumeration of
all conjugation-stable instantiations), decomposition into R2/R3/R5 parts,
and the fast feasibility test that eliminates most weight-24 shapes.

Conventions: a root of unity is its additive coordinate in Q/Z, so a
multiset of roots is a sorted tuple of Fractions.  "Subtracting" a relation
rotates it to share one root and flips the signs of the rest, which
additively adds 1/2.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cache
from itertools import combinations, product
from math import lcm

import numpy as np

from .cyclotomic import CycElt
from .errors import HigherPrimePower, NotStable, UnsupportedTemplate, WeightTooLarge
from .qz import qz
from .templates import Atom, Template, catalog_atoms

HALF = Fraction(1, 2)


def normalize_multiset(elements) -> tuple[Fraction, ...]:
    return tuple(sorted(qz(e) for e in elements))


class RootMultiset:
    """A multiset of roots of unity, by additive coordinate."""

    __slots__ = ("elements",)

    def __init__(self, elements):
        self.elements = normalize_multiset(elements)

    @property
    def weight(self) -> int:
        return len(self.elements)

    def conductor(self) -> int:
        return lcm(*(e.denominator for e in self.elements)) if self.elements else 1

    def rotate(self, c) -> "RootMultiset":
        c = qz(c)
        return RootMultiset([e + c for e in self.elements])

    def negate(self) -> "RootMultiset":
        """Multiply every root by -1 (add 1/2)."""
        return self.rotate(HALF)

    def conjugate(self) -> "RootMultiset":
        return RootMultiset([-e for e in self.elements])

    def galois(self, k: int) -> "RootMultiset":
        return RootMultiset([k * e for e in self.elements])

    def __eq__(self, other):
        return isinstance(other, RootMultiset) and self.elements == other.elements

    def __hash__(self):
        return hash(self.elements)

    def __repr__(self):
        return f"RootMultiset{list(map(str, self.elements))}"


def is_vanishing(ms) -> bool:
    elements = ms.elements if isinstance(ms, RootMultiset) else ms
    return CycElt.root_sum(elements).is_zero()


def conj_stable(ms) -> bool:
    elements = normalize_multiset(ms.elements if isinstance(ms, RootMultiset) else ms)
    return normalize_multiset(-e for e in elements) == elements


def conjugate_pairs(ms):
    """Partition into {x, -x} cells; singletons only for 0 and 1/2.

    Returns a list of tuples (1- or 2-element).  Raises NotStable when the
    multiset is not closed under conjugation.
    """
    elements = list(normalize_multiset(ms.elements if isinstance(ms, RootMultiset) else ms))
    cells = []
    while elements:
        x = elements.pop(0)
        if x in (Fraction(0), HALF):
            # pair equal real roots when they occur with multiplicity
            if x in elements:
                elements.remove(x)
                cells.append((x, x))
            else:
                cells.append((x,))
            continue
        y = qz(-x)
        if y not in elements:
            raise NotStable(f"unmatched element {x}")
        elements.remove(y)
        cells.append((x, y))
    return cells


def is_minimal(ms, bound: int = 14) -> bool:
    """No nonempty proper sub-multiset vanishes (subset enumeration)."""
    elements = normalize_multiset(ms.elements if isinstance(ms, RootMultiset) else ms)
    m = len(elements)
    if m > bound:
        raise WeightTooLarge(f"weight {m} above the bound {bound}")
    if not is_vanishing(elements):
        return False
    n = lcm(*(e.denominator for e in elements))
    from .crossratio import modular_unit_tables

    ((p, table),) = modular_unit_tables(n, 1)
    vals = np.array([(int(e * n)) for e in elements], dtype=np.int64)
    roots = (table[vals] + 1) % p
    sums = np.zeros(1 << m, dtype=np.int64)
    for i in range(m):
        half = sums[: 1 << i].copy()
        sums[1 << i : 1 << (i + 1)] = (half + roots[i]) % p
    candidates = np.flatnonzero(sums == 0)
    for mask in candidates.tolist():
        if mask == 0 or mask == (1 << m) - 1:
            continue
        subset = [elements[i] for i in range(m) if mask >> i & 1]
        if is_vanishing(subset):
            return False
    return True


# -- q-components and q-types -------------------------------------------------


def q_component(a: Fraction, q: int) -> int:
    """Residue c with the q-primary part of a equal to c/q.

    Raises HigherPrimePower when the order of a is divisible by q^2.
    """
    a = qz(a)
    den = a.denominator
    v = 0
    while den % q == 0:
        den //= q
        v += 1
    if v == 0:
        return 0
    if v > 1:
        raise HigherPrimePower(f"{a} has order divisible by {q}^2")
    # a = u/(q*den): q-part c/q with c = u * den^{-1} mod q
    return a.numerator % q * pow(den % q, -1, q) % q


def q_type(ms, q: int) -> tuple[int, ...]:
    elements = ms.elements if isinstance(ms, RootMultiset) else ms
    counts = [0] * q
    for e in elements:
        counts[q_component(e, q)] += 1
    return tuple(counts)


def rotate_type(t, j):
    q = len(t)
    return tuple(t[(k - j) % q] for k in range(q))


def reflect_type(t):
    q = len(t)
    return tuple(t[(-k) % q] for k in range(q))


def type_rotations(t):
    return {rotate_type(t, j) for j in range(len(t))}


def add_types(a, b):
    return tuple(x + y for x, y in zip(a, b))


# -- the linear system shared by every solving branch --------------------------

# Variables ordered (a1, a2, a3, b1, b2, b3, a1', a2', a3', b1', b2', b3').
SYSTEM_MATRIX = (
    (1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0),
    (0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1),
    (0, 1, 0, 0, 0, 1, 0, 1, 0, 0, 0, 1),
    (0, 0, 1, 1, 0, 0, 0, 0, 1, 1, 0, 0),
    (0, 0, 1, 0, 1, 0, 0, 0, -1, 0, -1, 0),
    (1, 0, 0, 0, 0, 1, -1, 0, 0, 0, 0, -1),
)
SYSTEM_RHS_NUM = (1, 1, 0, 0, 0, 0)  # numerators over denominator 2
SYMBOLS = ("a1", "a2", "a3", "b1", "b2", "b3", "a1'", "a2'", "a3'", "b1'", "b2'", "b3'")


@cache
def compute_P_q(q: int) -> frozenset[tuple[int, ...]]:
    """Achievable 24-value q-types of solutions of the mod-q system."""
    if q > 13:
        raise ValueError("only needed for q <= 13")
    M = np.array(SYSTEM_MATRIX, dtype=np.int64) % q
    # right-hand side 1/2 has a q-part only for q = 2
    rhs = np.array(SYSTEM_RHS_NUM, dtype=np.int64) % q if q == 2 else np.zeros(6, np.int64)
    # RREF over F_q for particular solution + kernel basis
    A = np.concatenate([M, rhs[:, None]], axis=1).copy()
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(12):
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        A[[r, pr]] = A[[pr, r]]
        A[r] = A[r] * pow(int(A[r, c]), -1, q) % q
        other = np.flatnonzero(A[:, c])
        for i in other:
            if i != r:
                A[i] = (A[i] - A[i, c] * A[r]) % q
        pivots.append(c)
        r += 1
        if r == rows:
            break
    if any(A[i, 12] % q for i in range(r, rows)):
        return frozenset()
    particular = np.zeros(12, dtype=np.int64)
    for i, c in enumerate(pivots):
        particular[c] = A[i, 12]
    free = [c for c in range(12) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(12, dtype=np.int64)
        v[f] = 1
        for i, c in enumerate(pivots):
            v[c] = (-A[i, f]) % q
        basis.append(v)
    dim = len(basis)
    # enumerate q^dim solutions in blocks
    types = set()
    B = np.array(basis, dtype=np.int64) if basis else np.zeros((0, 12), np.int64)
    block = 1 << 18
    total = q**dim
    coeff_grid = np.arange(total, dtype=np.int64)
    for lo in range(0, total, block):
        chunk = coeff_grid[lo : lo + block]
        sols = np.broadcast_to(particular, (len(chunk), 12)).copy()
        rest = chunk.copy()
        for b in range(dim):
            digit = rest % q
            rest //= q
            sols = (sols + digit[:, None] * B[b]) % q
        counts = np.zeros((len(chunk), q), dtype=np.int32)
        for k in range(q):
            counts[:, k] = ((sols == k).sum(axis=1) + (sols == (-k) % q).sum(axis=1))
        for row in {tuple(map(int, c)) for c in counts}:
            types.add(row)
    return frozenset(types)


# -- concrete template instantiation -------------------------------------------


def _as_offsets(instance, root):
    """Offsets of an instance translated so the chosen root sits at 0."""
    out = []
    seen_root = False
    for e in instance:
        if e == root and not seen_root:
            seen_root = True
            continue
        out.append(qz(e - root))
    return tuple(sorted(out))


@cache
def atom_instances(atom: Atom) -> tuple[tuple[Fraction, ...], ...]:
    """Concrete instances with the base at rotation 0 (one per structure)."""
    p = atom.base
    base = [Fraction(k, p) for k in range(p)]
    if not atom.parts:
        return (tuple(base),)
    parts_flat = []
    for c, sub in atom.parts:
        parts_flat.extend([sub] * c)
    out = set()
    nslots = len(parts_flat)
    for slots in combinations(range(p), nslots):
        for assign in _distinct_assignments(parts_flat, slots):
            for rooted in product(*[rooted_instances(a) for a, _ in assign]):
                elements = [Fraction(k, p) for k in range(p) if k not in slots]
                for (_, s), offs in zip(assign, rooted):
                    for o in offs:
                        elements.append(qz(HALF + Fraction(s, p) + o))
                out.add(tuple(sorted(elements)))
    return tuple(sorted(out))


def _distinct_assignments(parts_flat, slots):
    """Assign the multiset of part shapes to the given slots (no dup perms)."""
    if not parts_flat:
        yield ()
        return
    for shape in sorted(set(parts_flat), key=str):
        rest = list(parts_flat)
        rest.remove(shape)
        for sub in _distinct_assignments(rest, slots[1:]):
            yield ((shape, slots[0]),) + sub


@cache
def rooted_instances(atom: Atom) -> tuple[tuple[Fraction, ...], ...]:
    """Instances rooted at a distinguished element (offsets, root removed)."""
    out = set()
    for inst in atom_instances(atom):
        for root in set(inst):
            out.add(_as_offsets(inst, root))
    return tuple(sorted(out))


def _mirror_offsets(offs):
    return tuple(sorted(qz(-o) for o in offs))


@cache
def stable_instances(atom: Atom) -> tuple[tuple[Fraction, ...], ...]:
    """All conjugation-stable concrete instances of an atom."""
    p = atom.base
    if not atom.parts:
        even = tuple(Fraction(k, p) for k in range(p))
        odd = tuple(sorted(qz(Fraction(2 * k + 1, 2 * p)) for k in range(p)))
        return (even, odd)
    parts_flat = []
    for c, sub in atom.parts:
        parts_flat.extend([sub] * c)
    out = set()
    for half_rot in (False, True):
        r = Fraction(1, 2 * p) if half_rot else Fraction(0)

        def inv(k):
            return (-k - 1) % p if half_rot else (-k) % p

        fixed_slots = [k for k in range(p) if inv(k) == k]
        paired_slots = [(k, inv(k)) for k in range(p) if k < inv(k)]
        nparts = len(parts_flat)
        for nfixed in range(nparts % 2, min(len(fixed_slots), nparts) + 1, 2):
            npairs2 = (nparts - nfixed) // 2
            if npairs2 > len(paired_slots):
                continue
            for fsel in combinations(fixed_slots, nfixed):
                for psel in combinations(paired_slots, npairs2):
                    for structure in _stable_part_splits(parts_flat, nfixed, npairs2):
                        fixed_shapes, pair_shapes = structure
                        for fassign in _distinct_assignments(list(fixed_shapes), fsel):
                            for passign in _distinct_assignments(list(pair_shapes), [s[0] for s in psel]):
                                combos = []
                                for shape, slot in fassign:
                                    roots = [
                                        offs
                                        for offs in rooted_instances(shape)
                                        if _mirror_offsets(offs) == offs
                                    ]
                                    combos.append([(slot, None, offs) for offs in roots])
                                for (shape, slot), (k, kbar) in zip(passign, psel):
                                    combos.append(
                                        [(k, kbar, offs) for offs in rooted_instances(shape)]
                                    )
                                used = set(fsel) | {s for pr in psel for s in pr}
                                for choice in product(*combos):
                                    elements = [
                                        qz(r + Fraction(k, p))
                                        for k in range(p)
                                        if k not in used
                                    ]
                                    for slot, slot2, offs in choice:
                                        anchor = qz(r + Fraction(slot, p))
                                        for o in offs:
                                            elements.append(qz(HALF + anchor + o))
                                        if slot2 is not None:
                                            anchor2 = qz(r + Fraction(slot2, p))
                                            for o in _mirror_offsets(offs):
                                                elements.append(qz(HALF + anchor2 + o))
                                    ms = tuple(sorted(elements))
                                    if conj_stable(ms):
                                        out.add(ms)
    return tuple(sorted(out))


def _stable_part_splits(parts_flat, nfixed, npairs):
    """Split the part multiset into fixed singles and mirror pairs."""
    from collections import Counter

    counts = Counter(parts_flat)
    shapes = sorted(counts, key=str)

    def rec(i, nf, pairs_left, fixed_acc, pair_acc):
        if i == len(shapes):
            if nf == 0 and pairs_left == 0:
                yield (tuple(fixed_acc), tuple(pair_acc))
            return
        shape = shapes[i]
        m = counts[shape]
        for npair_here in range(0, min(m // 2, pairs_left) + 1):
            nfix_here = m - 2 * npair_here
            if nfix_here > nf:
                continue
            yield from rec(
                i + 1,
                nf - nfix_here,
                pairs_left - npair_here,
                fixed_acc + [shape] * nfix_here,
                pair_acc + [shape] * npair_here,
            )

    yield from rec(0, nfixed, npairs, [], [])


# -- stability structures of full templates ------------------------------------


@dataclass(frozen=True)
class StableStructure:
    """One conjugation structure: concrete self-stable parts + free pairs."""

    selfs: tuple  # concrete multisets (tuples of Fractions)
    pairs: tuple  # Atom shapes with a free rotation (paired with conjugate)

    def self_union(self) -> tuple[Fraction, ...]:
        out = []
        for s in self.selfs:
            out.extend(s)
        return tuple(sorted(out))


def validate_constituents(t: Template):
    """Constituents must be prime-base constructions over catalog parts."""
    allowed = catalog_atoms()

    def check_parts(atom):
        for _, sub in atom.parts:
            if sub not in allowed:
                raise UnsupportedTemplate(f"sub-relation {sub} outside the catalog")
            check_parts(sub)

    for a in t.atoms():
        check_parts(a)


@cache
def stable_structures(t: Template) -> tuple[StableStructure, ...]:
    validate_constituents(t)
    from collections import Counter
    from itertools import combinations_with_replacement

    counts = Counter(t.atoms())
    shapes = sorted(counts, key=str)
    options_per_shape = []
    for shape in shapes:
        m = counts[shape]
        opts = []
        for npairs in range(m // 2 + 1):
            nself = m - 2 * npairs
            if nself == 0:
                opts.append(((), (shape,) * npairs))
                continue
            insts = stable_instances(shape)
            if not insts:
                continue
            for sel in combinations_with_replacement(insts, nself):
                opts.append((sel, (shape,) * npairs))
        options_per_shape.append(opts)
    out = []
    for combo in product(*options_per_shape):
        selfs = tuple(s for sel, _ in combo for s in sel)
        pairs = tuple(p for _, ps in combo for p in ps)
        out.append(StableStructure(selfs, pairs))
    return tuple(out)


# -- possible q-types and the feasibility test ---------------------------------


@cache
def _any_types(atom: Atom, q: int) -> frozenset:
    types = set()
    for inst in atom_instances(atom):
        types.add(q_type(inst, q))
    return frozenset(types)


@cache
def _pair_type_options(atom: Atom, q: int) -> frozenset:
    """q-types of xi*H + conj(xi*H) over clean rotations xi."""
    out = set()
    for t in _any_types(atom, q):
        for j in range(q):
            rt = rotate_type(t, j)
            out.add(add_types(rt, reflect_type(rt)))
    return frozenset(out)


def _self_clean_type(inst, q):
    try:
        return q_type(inst, q)
    except HigherPrimePower:
        return None


def possible_q_types(t: Template, q: int, stable: bool = True) -> set:
    """Achievable q-types over clean instantiations.

    With ``stable`` (the default) only conjugation-stable instantiations are
    enumerated, per structure; otherwise every constituent carries a free
    rotation.
    """
    if not stable:
        opts = []
        for a in t.atoms():
            s = set()
            for typ in _any_types(a, q):
                s |= type_rotations(typ)
            opts.append(s)
        out = {tuple([0] * q)}
        for s in opts:
            out = {add_types(x, y) for x in out for y in s}
        return out
    types = set()
    for structure in stable_structures(t):
        base = tuple([0] * q)
        clean = True
        for inst in structure.selfs:
            st = _self_clean_type(inst, q)
            if st is None:
                clean = False
                break
            base = add_types(base, st)
        if not clean:
            continue
        opts = [_pair_type_options(a, q) for a in structure.pairs]
        partial = {base}
        for o in opts:
            partial = {add_types(x, y) for x in partial for y in o}
        types |= partial
    return types


def _columns_mod(q):
    M = np.array(SYSTEM_MATRIX, dtype=np.int64)
    return [tuple(int(v) for v in M[:, j] % q) for j in range(12)]


@cache
def _signed_zero_sums(q: int, max_w: int = 12) -> dict[int, bool]:
    """For each w: does some w-subset of system columns have a signed sum = 0 mod q."""
    cols = np.array(_columns_mod(q), dtype=np.int64)
    result = {}
    for w in range(1, max_w + 1):
        found = False
        for subset in combinations(range(12), w):
            sub = cols[list(subset)]
            for signs in product((1, q - 1), repeat=w):
                total = (np.array(signs)[:, None] * sub).sum(axis=0) % q
                if not total.any():
                    found = True
                    break
            if found:
                break
        result[w] = found
    return result


def _always_dirty_self(inst, q):
    return _self_clean_type(inst, q) is None


def structure_dirty_possible(structure: StableStructure, q: int) -> bool:
    """Can this structure carry q-components of order divisible by q^2?

    Necessary condition: after projecting the linear system to the level
    above mu_q, the dirty symbol slots must cancel, so a signed combination
    of distinct system columns supported on the carrier blocks must vanish
    mod q.  Forced carriers (the order-4 real pair {1/4, 3/4}, dirty at
    q = 2) share one value; each conjugate pair is an independent block.
    The test is conservative: True only routes to concrete solving.
    """
    forced = sum(1 for inst in structure.selfs if _always_dirty_self(inst, q))
    pair_blocks = [atom.weight() for atom in structure.pairs]
    zero_sums = _signed_zero_sums(q)

    def block_alone_possible(w):
        return True if w > 12 else zero_sums[w]

    # every nonempty dirty set D (forced selfs always dirty, pairs optional)
    # must be column-infeasible for the structure to be clean-only at q
    if forced:
        if not pair_blocks:
            return block_alone_possible(forced)
        return True  # forced block plus optional pair blocks: assume possible
    if not pair_blocks:
        return False
    if len(pair_blocks) == 1:
        return block_alone_possible(pair_blocks[0])
    if any(block_alone_possible(w) for w in pair_blocks):
        return True
    return True  # multiple pair blocks can mix coefficients; stay conservative


def structure_clean_types(structure: StableStructure, q: int):
    """Clean q-types of a structure, or None when a self is always dirty."""
    base = tuple([0] * q)
    for inst in structure.selfs:
        st = _self_clean_type(inst, q)
        if st is None:
            return None
        base = add_types(base, st)
    out = {base}
    for atom in structure.pairs:
        opts = _pair_type_options(atom, q)
        out = {add_types(x, y) for x in out for y in opts}
    return out


def template_eliminated_at(t: Template, q: int) -> bool:
    """True when no stable instantiation of t can solve the system mod q.

    Per structure: clean instantiations must miss P_q, and dirty ones must
    fail the column cancellation test.
    """
    P = compute_P_q(q)
    structures = stable_structures(t)
    if not structures:
        return True  # no conjugation-stable instantiation at all
    for structure in structures:
        if structure_dirty_possible(structure, q):
            return False
        clean = structure_clean_types(structure, q)
        if clean is None:
            continue  # always dirty and dirty impossible: structure dead
        if clean & P:
            return False
    return True


# -- decomposition into R2/R3/R5 blocks ----------------------------------------

THIRD = Fraction(1, 3)
FIFTH = Fraction(1, 5)


def decompose_as(ms, budget=None):
    """Cover the multiset by rotated R2, R3, R5 blocks.

    ``budget`` is an optional (n2, n3, n5) triple; None allows any counts.
    Returns the list of (size, rotation) blocks of a witness cover, or None.
    Deterministic: always covers the least remaining element first.
    """
    elements = list(normalize_multiset(ms.elements if isinstance(ms, RootMultiset) else ms))
    n2, n3, n5 = budget if budget is not None else (None, None, None)

    def take(pool, values):
        pool = list(pool)
        for v in values:
            if v not in pool:
                return None
            pool.remove(v)
        return pool

    memo = set()

    def rec(pool, b2, b3, b5, acc):
        if not pool:
            return list(acc)
        key = (tuple(pool), b2, b3, b5)
        if key in memo:
            return None
        e = pool[0]
        # R2
        if b2 is None or b2 > 0:
            rest = take(pool, [e, qz(e + HALF)])
            if rest is not None:
                got = rec(rest, None if b2 is None else b2 - 1, b3, b5, acc + [(2, e)])
                if got is not None:
                    return got
        # R3
        if b3 is None or b3 > 0:
            rest = take(pool, [e, qz(e + THIRD), qz(e + 2 * THIRD)])
            if rest is not None:
                got = rec(rest, b2, None if b3 is None else b3 - 1, b5, acc + [(3, e)])
                if got is not None:
                    return got
        # R5
        if b5 is None or b5 > 0:
            rest = take(pool, [qz(e + k * FIFTH) for k in range(5)])
            if rest is not None:
                got = rec(rest, b2, b3, None if b5 is None else b5 - 1, acc + [(5, e)])
                if got is not None:
                    return got
        memo.add(key)
        return None

    if budget is not None and 2 * n2 + 3 * n3 + 5 * n5 != len(elements):
        return None
    return rec(elements, n2, n3, n5, [])


def decomposable_r2r3(elements) -> bool:
    """Closed-form test: does the multiset decompose using only R2 and R3?

    Both block shapes live inside one coset of the order-6 (or order-2 when
    3 does not divide the lcm of orders) cyclic subgroup they generate, so
    the test reduces to a per-coset count condition.
    """
    elements = normalize_multiset(elements.elements if isinstance(elements, RootMultiset) else elements)
    if not elements:
        return True
    n = lcm(*(e.denominator for e in elements))
    if n % 2:
        n *= 2
    vals = [int(e * n) for e in elements]
    if n % 3 == 0:
        step = n // 6
        buckets: dict[int, list[int]] = {}
        for v in vals:
            buckets.setdefault(v % step, []).append(v // step % 6)
        for pos in buckets.values():
            c = [0] * 6
            for j in pos:
                c[j] += 1
            d = c[0] - c[3]
            if not (c[2] - c[5] == d and c[4] - c[1] == d):
                return False
            if d < 0 and min(c[1], c[3], c[5]) < -d:
                return False
            if d > 0 and min(c[0], c[2], c[4]) < d:
                return False
        return True
    step = n // 2
    buckets2: dict[int, int] = {}
    for v in vals:
        buckets2[v % step] = buckets2.get(v % step, 0) + (1 if v // step else -1)
    return all(v == 0 for v in buckets2.values())
