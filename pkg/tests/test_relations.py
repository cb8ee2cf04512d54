import random
from fractions import Fraction as F

import pytest

from cycloproj.errors import HigherPrimePower, NotStable, ParseError, WeightTooLarge
from cycloproj.qz import qz
from cycloproj.relations import (
    RootMultiset,
    compute_P_q,
    conj_stable,
    conjugate_pairs,
    decompose_as,
    decomposable_r2r3,
    is_minimal,
    is_vanishing,
    possible_q_types,
    q_type,
    stable_instances,
    stable_structures,
    template_eliminated_at,
    type_rotations,
)
from cycloproj.templates import (
    Atom,
    catalog_minimal_upto12,
    load_catalog,
    parse_template,
    print_template,
)


def T(s):
    return parse_template(s)


def test_parse_examples():
    t = T("(R17:(R5:R3),R3)+R2")
    assert t.weight() == 24
    assert print_template(t) == "(R17:(R5:R3),R3)+R2"
    t2 = T("12R2")
    assert t2.weight() == 24 and t2.terms[0][0] == 12
    assert print_template(T("R_2")) == "R2"


def test_parse_roundtrip_catalogs():
    for name in ("lemma13", "lemma18", "lemma25", "lemma33", "lemma34"):
        for e in load_catalog(f"{name}.txt"):
            if e.template is None:
                continue
            assert T(print_template(e.template)) == e.template


def test_parse_errors_carry_position():
    with pytest.raises(ParseError):
        T("(R5:R3")
    with pytest.raises(ParseError):
        T("R6")
    with pytest.raises(ParseError):
        T("R5+")


def test_catalog_weights():
    ws = sorted(t.weight() for t in catalog_minimal_upto12())
    assert ws == [2, 3, 5, 6, 7, 7, 8, 8, 9, 9, 10, 10, 11, 11, 11, 11, 12, 12, 12, 12, 12]
    for name in ("lemma18", "lemma25", "lemma34"):
        for e in load_catalog(f"{name}.txt"):
            assert e.template.weight() == 24, f"{name}: {e.template}"


def test_is_vanishing_examples():
    assert is_vanishing(RootMultiset([F(k, 7) for k in range(7)]))
    assert not is_vanishing(RootMultiset([F(0), F(1, 3)]))
    # full coset shape: R5 plus (z3+z3^2) attached at all nonzero 11-slots
    elems = [F(k, 5) for k in range(1, 5)]
    for i in range(1, 11):
        elems += [qz(F(1, 3) + F(i, 11)), qz(F(2, 3) + F(i, 11))]
    assert is_vanishing(RootMultiset(elems))


def test_is_minimal():
    assert is_minimal(RootMultiset([F(0), F(1, 2)]))
    assert not is_minimal(RootMultiset([F(0), F(1, 2), F(1, 4), F(3, 4)]))
    # (R5:R3) instance
    inst = [F(1, 6), F(5, 6), F(1, 5), F(2, 5), F(3, 5), F(4, 5)]
    assert is_minimal(RootMultiset(inst))
    with pytest.raises(WeightTooLarge):
        is_minimal(RootMultiset([F(0)] * 15))


def test_q_type_examples():
    assert q_type(RootMultiset([F(0), F(1, 2)]), 2) == (1, 1)
    # (R19:R3) stable instance: 2-type is a rotation of (18, 2)
    inst = stable_instances(Atom(19, ((1, Atom(3)),)))
    assert inst
    found = {q_type(RootMultiset(i), 2) for i in inst}
    assert found <= type_rotations((18, 2))
    with pytest.raises(HigherPrimePower):
        q_type(RootMultiset([F(1, 4)]), 2)


def test_q_type_rotation_property():
    rng = random.Random(5)
    for _ in range(40):
        vals = [F(rng.randrange(30), 30) for _ in range(6)]
        ms = RootMultiset(vals)
        t = q_type(ms, 5)
        rot = q_type(ms.rotate(F(1, 5)), 5)
        assert rot in type_rotations(t)


def test_conj_pairs():
    assert conj_stable([F(1, 3), F(2, 3)])
    assert not conj_stable([F(1, 5), F(1, 3)])
    cells = conjugate_pairs(RootMultiset([F(0), F(1, 3), F(2, 3)]))
    assert sorted(len(c) for c in cells) == [1, 2]
    with pytest.raises(NotStable):
        conjugate_pairs([F(1, 5), F(1, 3)])


def test_P2_P3_paper_values():
    assert compute_P_q(2) == {(20, 4), (12, 12), (4, 20)}
    assert compute_P_q(3) == {
        (24, 0, 0),
        (16, 4, 4),
        (14, 5, 5),
        (12, 6, 6),
        (10, 7, 7),
        (8, 8, 8),
        (6, 9, 9),
        (4, 10, 10),
        (0, 12, 12),
    }


def test_P11_galois_shape():
    # members with >= 7 entries equal to 1 are Galois conjugates of (4,6,1,...,1,6)
    P11 = compute_P_q(11)
    base = (4, 6, 1, 1, 1, 1, 1, 1, 1, 1, 6)
    conjugates = set()
    for j in range(1, 11):
        conjugates.add(tuple(base[(j * k) % 11] for k in range(11)))
    for t in P11:
        if sum(1 for v in t if v == 1) >= 7:
            assert t in conjugates


def test_possible_q_types_examples():
    # (R23:R3) at q=2: rotations of (22,2) only
    got = possible_q_types(T("(R23:R3)"), 2)
    assert got and got <= type_rotations((22, 2))
    # (R19:R3)+2R2 at q=3: {(22,1,1), (18,3,3)}
    got3 = possible_q_types(T("(R19:R3)+2R2"), 3)
    assert got3 == {(22, 1, 1), (18, 3, 3)}
    # R2 at q=2
    assert possible_q_types(T("R2"), 2) == {(1, 1)}


def test_eliminations_match_worked_cases():
    assert template_eliminated_at(T("(R23:R3)"), 2)
    assert not template_eliminated_at(T("(R19:R3)+2R2"), 2)
    assert template_eliminated_at(T("(R19:R3)+2R2"), 3)
    assert not template_eliminated_at(T("(R17:R5,4R3)"), 2)
    assert not template_eliminated_at(T("(R17:R5,4R3)"), 3)
    assert template_eliminated_at(T("(R17:R5,4R3)"), 5)
    # the worked order-66 shape must never be eliminated
    for q in (2, 3, 5, 7, 11, 13):
        assert not template_eliminated_at(T("(R11:2R3)+R3+4R2"), q)


def test_lemma18_starred_iff_unstable():
    for e in load_catalog("lemma18.txt"):
        assert bool(stable_structures(e.template)) == (not e.starred), str(e.template)


def test_lemma18_unstarred_all_eliminated_q235():
    for e in load_catalog("lemma18.txt"):
        if e.starred:
            continue
        assert any(
            template_eliminated_at(e.template, q) for q in (2, 3, 5)
        ), f"not eliminated: {e.template}"


def test_decompose_examples():
    # worked order-66 residual at the right pinned value decomposes as R3+4R2
    x = F(1, 44)
    residual = [
        qz(v)
        for v in [
            F(2, 33) + x,
            F(6, 11) - x,
            F(20, 33) - x,
            F(1, 3),
            x,
            F(31, 33) - x,
            F(0),
            F(5, 11) + x,
            F(13, 33) + x,
            F(2, 3),
            -x,
        ]
    ]
    got = decompose_as(RootMultiset(residual), (4, 1, 0))
    assert got is not None
    assert sorted(size for size, _ in got) == [2, 2, 2, 2, 3]
    # wrong pin: no cover
    x = F(1, 7)
    residual_bad = [
        qz(v)
        for v in [
            F(2, 33) + x,
            F(6, 11) - x,
            F(20, 33) - x,
            F(1, 3),
            x,
            F(31, 33) - x,
            F(0),
            F(5, 11) + x,
            F(13, 33) + x,
            F(2, 3),
            -x,
        ]
    ]
    assert decompose_as(RootMultiset(residual_bad), (4, 1, 0)) is None
    assert decompose_as(RootMultiset([]), (0, 0, 0)) == []


def _brute_force_cover(elements, budget):
    # independent reference: try all covers recursively without ordering tricks
    from cycloproj.qz import qz as _qz

    elements = sorted(elements)
    if not elements:
        return budget == (0, 0, 0)
    n2, n3, n5 = budget
    e = elements[0]
    shapes = []
    if n2:
        shapes.append(((e, _qz(e + F(1, 2))), (n2 - 1, n3, n5)))
    if n3:
        shapes.append(((e, _qz(e + F(1, 3)), _qz(e + F(2, 3))), (n2, n3 - 1, n5)))
    if n5:
        shapes.append((tuple(_qz(e + F(k, 5)) for k in range(5)), (n2, n3, n5 - 1)))
    for block, rest_budget in shapes:
        pool = list(elements)
        ok = True
        for v in block:
            if v in pool:
                pool.remove(v)
            else:
                ok = False
                break
        if ok and _brute_force_cover(pool, rest_budget):
            return True
    return False


def test_decompose_matches_brute_force():
    rng = random.Random(9)
    for _ in range(500):
        n2 = rng.randrange(0, 4)
        n3 = rng.randrange(0, 3)
        n5 = rng.randrange(0, 2)
        # build a coverable or random multiset
        if rng.random() < 0.5:
            elems = []
            for _ in range(n2):
                r = F(rng.randrange(60), 60)
                elems += [r, qz(r + F(1, 2))]
            for _ in range(n3):
                r = F(rng.randrange(60), 60)
                elems += [r, qz(r + F(1, 3)), qz(r + F(2, 3))]
            for _ in range(n5):
                r = F(rng.randrange(60), 60)
                elems += [qz(r + F(k, 5)) for k in range(5)]
        else:
            elems = [F(rng.randrange(60), 60) for _ in range(2 * n2 + 3 * n3 + 5 * n5)]
        got = decompose_as(RootMultiset(elems), (n2, n3, n5))
        expect = _brute_force_cover([qz(e) for e in elems], (n2, n3, n5))
        assert (got is not None) == expect


def test_closed_form_r2r3_matches_search():
    rng = random.Random(10)
    for _ in range(400):
        n2 = rng.randrange(0, 5)
        n3 = rng.randrange(0, 4)
        if rng.random() < 0.5:
            elems = []
            for _ in range(n2):
                r = F(rng.randrange(36), 36)
                elems += [r, qz(r + F(1, 2))]
            for _ in range(n3):
                r = F(rng.randrange(36), 36)
                elems += [r, qz(r + F(1, 3)), qz(r + F(2, 3))]
        else:
            elems = [F(rng.randrange(36), 36) for _ in range(2 * n2 + 3 * n3)]
        fast = decomposable_r2r3(elems)
        slow = any(
            decompose_as(RootMultiset(elems), (a2, a3, 0)) is not None
            for a2 in range(len(elems) // 2 + 1)
            for a3 in range(len(elems) // 3 + 1)
            if 2 * a2 + 3 * a3 == len(elems)
        )
        assert fast == slow
