import random
from fractions import Fraction as F

import pytest

from cycloproj.errors import DegenerateFamily
from cycloproj.qz import AffineQZ, qz
from cycloproj.crossratio import is_in_S
from cycloproj.solutions import Solution6
from cycloproj.symmetry import (
    act,
    canonicalize_family,
    group_elements,
    in_lattice_coset,
    family_coset,
)
from cycloproj.tables import parse_affine, table1_families, theorem3_pairs


def test_parse_affine():
    e = parse_affine("1/2+4x")
    assert e.const == F(1, 2) and e.coeff("x") == 4
    assert parse_affine("-2x").coeff("x") == -2
    assert parse_affine("5/6") == AffineQZ(F(5, 6))
    assert parse_affine("2/3-2x").coeff("x") == -2


def test_table1_shape():
    fams = table1_families()
    assert len(fams) == 45
    nparams = sorted(f.nparams for f in fams)
    assert nparams.count(3) == 1
    assert nparams.count(2) == 3
    assert nparams.count(1) == 41


def test_table1_rows_are_solutions():
    rng = random.Random(12)
    for fam in table1_families():
        checked = 0
        while checked < 6:
            assign = {v: F(rng.randrange(1, 101), 101) for v in fam.variables}
            if fam.is_degenerate_at(assign):
                continue
            assert is_in_S(fam.evaluate(assign)), f"{fam} at {assign}"
            checked += 1


def test_theorem3_pairs_load():
    pairs = theorem3_pairs()
    assert len(pairs) == 2
    assert all(len(left) == len(right) == 14 for left, right in pairs)


def test_family_fingerprints_distinct():
    fams = table1_families()
    prints = [canonicalize_family(f) for f in fams]
    assert len(set(prints)) == 45


def test_family_fingerprint_invariances():
    fams = table1_families()
    # the worked one-parameter family and its half-shift reparametrization
    fam = next(
        f
        for f in fams
        if f.coords[0] == AffineQZ.var("x")
        and f.coords[1] == AffineQZ.var("x").scale(3)
        and f.coords[2] == AffineQZ.var("x").scale(4) + AffineQZ(F(1, 2))
    )
    shifted = fam.specialize({"x": AffineQZ.var("x") + AffineQZ(F(1, 2))})
    assert canonicalize_family(fam) == canonicalize_family(shifted)
    # negated/parameter-scaled reparametrizations
    doubled = fam.specialize({"x": AffineQZ.var("x").scale(2)})
    assert canonicalize_family(fam) == canonicalize_family(doubled)
    # image under a group element
    rng = random.Random(1)
    for f in rng.sample(list(fams), 6):
        g = rng.choice(group_elements())
        assert canonicalize_family(f) == canonicalize_family(act(g, f))
    # galois on constants
    third = fams[6]
    gal = Solution6([c.scale(5) for c in third.coords])
    # scaling all coords by 5 = galois 5 with x -> 5x reparametrization
    assert canonicalize_family(third) == canonicalize_family(gal)


def test_degenerate_family_raises():
    with pytest.raises(DegenerateFamily):
        canonicalize_family(
            Solution6([parse_affine(t) for t in ("x", "x", "y", "x", "x", "y")])
        )


def test_lattice_coset_membership():
    fam = table1_families()[4]  # [x,3x,1/2+4x,4x,12x,1/2+6x]
    c, rows = family_coset(fam)
    z = fam.evaluate({"x": F(3, 17)})
    assert in_lattice_coset(z, c, rows)
    z2 = list(z)
    z2[0] = qz(z2[0] + F(1, 17))
    assert not in_lattice_coset(z2, c, rows)
