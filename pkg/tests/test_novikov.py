import random
from fractions import Fraction

import pytest

from ainfcat.novikov import (GapMonoid, Scalar, SingularReduction, nv_add,
                             nv_invert, nv_mul, nv_solve_linear, nv_valuation)


def s(terms, cut=10):
    return Scalar(terms, cut)


class TestAdd:
    def test_additive_inverse(self):
        a = s([("1/2", 1)])
        b = s([("1/2", -1)])
        assert nv_add(a, b, 10).is_zero()

    def test_merge(self):
        a = s([(0, 1), (1, 1)])
        b = s([(1, 1)])
        assert nv_add(a, b, 10) == s([(0, 1), (1, 2)])

    def test_truncation(self):
        # (1 + T^{3/2}) + T^2 at E = 3/2 -> 1
        a = s([(0, 1), ("3/2", 1)])
        b = s([(2, 1)])
        assert nv_add(a, b, "3/2") == Scalar.one("3/2")


class TestMul:
    def test_difference_of_squares(self):
        a = s([(0, 1), ("1/2", 1)])
        b = s([(0, 1), ("1/2", -1)])
        assert nv_mul(a, b, 10) == s([(0, 1), (1, -1)])

    def test_half_exponents(self):
        assert nv_mul(s([("1/2", 1)]), s([("1/2", 1)]), 10) == s([(1, 1)])

    def test_truncated_square(self):
        a = s([(0, 1), (1, 1)])
        assert nv_mul(a, a, 2) == s([(0, 1), (1, 2)], 2)


class TestValuation:
    def test_zero(self):
        assert nv_valuation(Scalar.zero(5)) is None

    def test_const_plus_t(self):
        assert nv_valuation(s([(0, 3), (1, 1)])) == 0

    def test_half(self):
        assert nv_valuation(s([("1/2", 1), (1, -1)])) == Fraction(1, 2)


class TestInvert:
    def test_one(self):
        assert nv_invert(Scalar.one(5), 5) == Scalar.one(5)

    def test_geometric(self):
        a = s([(0, 1), (1, -1)], 3)
        assert nv_invert(a, 3) == s([(0, 1), (1, 1), (2, 1)], 3)

    def test_two_plus_half(self):
        a = s([(0, 2), ("1/2", 1)], 1)
        inv = nv_invert(a, 1)
        assert inv == s([(0, "1/2"), ("1/2", "-1/4")], 1)
        assert nv_mul(a, inv, 1) == Scalar.one(1)

    def test_non_unit(self):
        with pytest.raises(SingularReduction):
            nv_invert(s([(1, 1)]), 5)

    def test_random_roundtrip(self):
        rng = random.Random(0)
        for _ in range(50):
            terms = [(0, rng.randint(1, 5))]
            for _ in range(rng.randint(0, 3)):
                terms.append((Fraction(rng.randint(1, 6), 2), rng.randint(-3, 3)))
            a = s(terms, 4)
            assert nv_mul(a, nv_invert(a, 4), 4) == Scalar.one(4)


class TestSolveLinear:
    def test_identity(self):
        x = nv_solve_linear([[Scalar.one(5)]], [s([(1, 1)], 5)], 5)
        assert x[0] == s([(1, 1)], 5)

    def test_geometric_row(self):
        M = [[s([(0, 1), (1, 1)], 2)]]
        x = nv_solve_linear(M, [Scalar.one(2)], 2)
        assert x[0] == s([(0, 1), (1, -1)], 2)

    def test_singular(self):
        with pytest.raises(SingularReduction):
            nv_solve_linear([[Scalar.zero(2)]], [Scalar.one(2)], 2)

    def test_2x2(self):
        one = Scalar.one(3)
        t = s([(1, 1)], 3)
        M = [[one, t], [Scalar.zero(3), one + t]]
        v = [one, t]
        x = nv_solve_linear(M, v, 3)
        # substitute back
        for i, row in enumerate(M):
            acc = Scalar.zero(3)
            for a, xi in zip(row, x):
                acc = acc + a * xi
            assert acc == v[i]


class TestRingAxioms:
    def test_random_axioms(self):
        rng = random.Random(1)

        def rand_scalar():
            terms = [(Fraction(rng.randint(0, 6), 2), rng.randint(-3, 3))
                     for _ in range(rng.randint(0, 4))]
            return s(terms, 3)

        for _ in range(100):
            a, b, c = rand_scalar(), rand_scalar(), rand_scalar()
            assert (a + b) + c == a + (b + c)
            assert a * b == b * a
            assert (a * b) * c == a * (b * c)
            assert a * (b + c) == a * b + a * c

    def test_truncation_is_ring_hom(self):
        rng = random.Random(2)
        for _ in range(50):
            a = s([(Fraction(rng.randint(0, 5), 2), rng.randint(-2, 2))
                   for _ in range(3)], 3)
            b = s([(Fraction(rng.randint(0, 5), 2), rng.randint(-2, 2))
                   for _ in range(3)], 3)
            assert (a * b).truncate(1) == (a.truncate(1) * b.truncate(1)).truncate(1)


class TestGapMonoid:
    def test_enumeration_matches_bruteforce(self):
        G = GapMonoid(["1/2", "1/3"])
        below = G.elements_below(2)
        brute = set()
        for i in range(10):
            for j in range(10):
                v = Fraction(i, 2) + Fraction(j, 3)
                if v < 2:
                    brute.add(v)
        assert set(below) == brute
        assert list(below) == sorted(below)
        assert len(below) == len(set(below))

    def test_membership(self):
        G = GapMonoid(["1/2"])
        assert Fraction(3, 2) in G
        assert Fraction(1, 3) not in G
        assert Fraction(0) in G

    def test_join(self):
        assert GapMonoid([1]).join(GapMonoid(["1/2"])) == GapMonoid([1, "1/2"])
