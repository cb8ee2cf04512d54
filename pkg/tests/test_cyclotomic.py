import random
from fractions import Fraction as F

from cycloproj.cyclotomic import CycElt, cyc_is_zero, cyclotomic_poly, float_abs
from cycloproj.qz import qz


def test_cyclotomic_poly_small():
    assert cyclotomic_poly(1) == (-1, 1)
    assert cyclotomic_poly(4) == (1, 0, 1)
    assert cyclotomic_poly(6) == (1, -1, 1)
    assert cyclotomic_poly(2) == (1, 1)
    assert cyclotomic_poly(12) == (1, 0, -1, 0, 1)


def test_cyclotomic_poly_degree_is_totient():
    from math import gcd

    for n in range(1, 60):
        phi = sum(1 for k in range(1, n + 1) if gcd(k, n) == 1)
        assert len(cyclotomic_poly(n)) - 1 == phi


def test_full_prime_sum_vanishes():
    # 1 + z_3 + z_3^2 = 0
    e = CycElt.root_sum([F(0), F(1, 3), F(2, 3)])
    assert cyc_is_zero(e)


def test_r5_minus_r3_relation():
    # z_6 + z_6^5 + z_5 + z_5^2 + z_5^3 + z_5^4 = 0
    e = CycElt.root_sum([F(1, 6), F(5, 6), F(1, 5), F(2, 5), F(3, 5), F(4, 5)])
    assert cyc_is_zero(e)


def test_two_roots_not_zero():
    e = CycElt.root_sum([F(0), F(1, 5)])
    assert not cyc_is_zero(e)


def test_conjugate_and_product():
    z = CycElt.root(F(1, 8))
    assert (z * z.conjugate()).is_rational() == 1
    assert (z * z * z * z).is_rational() == -1


def test_inverse():
    e = CycElt.root(F(1, 7)) - CycElt.from_rational(1)
    prod = e * e.inverse()
    assert prod.is_rational() == 1


def test_zero_test_matches_float(seed=7, trials=400):
    rng = random.Random(seed)
    for _ in range(trials):
        n = rng.randrange(1, 121)
        nterms = rng.randrange(1, 6)
        e = CycElt(n)
        for _ in range(nterms):
            e = e + CycElt(n, {rng.randrange(n): F(rng.randrange(-3, 4))})
        exact = cyc_is_zero(e)
        approx = float_abs(e, prec_bits=128) < 1e-20
        assert exact == approx


def test_order_is_reduced_denominator():
    assert qz(F(6, 8)).denominator == 4
