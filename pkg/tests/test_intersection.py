import itertools
import random
from fractions import Fraction

import pytest

from toricstab.fan import new_fan, product, projectivize, walls
from toricstab.intersection import (
    ChowCycle,
    anticanonical,
    basis_divisor,
    degree,
    fundamental_cycle,
    intersection_number,
    is_ample,
    is_fano,
    is_nef,
    linearly_equivalent,
    multiply,
    picard_rank,
    principal_divisor,
    wall_value,
)


def p1():
    return new_fan([(1,), (-1,)], [(0,), (1,)], ["plus", "minus"])


def p2():
    return new_fan([(1, 0), (0, 1), (-1, -1)], [(0, 1), (1, 2), (0, 2)],
                   ["x", "y", "z"])


def p3():
    rays = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, -1, -1)]
    return new_fan(rays, list(itertools.combinations(range(4), 3)))


def hirzebruch(a):
    return projectivize(p1(), [(0, 0), (0, a)])


ALL_FANS = [p1(), p2(), p3(), hirzebruch(0), hirzebruch(1), hirzebruch(2),
            product(p1(), p2())]


class TestBasics:
    def test_p2_h_squared(self):
        assert intersection_number(p2(), [(1, 0, 0), (1, 0, 0)]) == 1

    def test_p2_mixed(self):
        f = p2()
        for d1 in range(3):
            for d2 in range(3):
                assert intersection_number(
                    f, [basis_divisor(f, d1), basis_divisor(f, d2)]) == 1

    def test_p2_anticanonical_degree(self):
        f = p2()
        assert intersection_number(f, [anticanonical(f)] * 2) == 9

    def test_p3_anticanonical(self):
        f = p3()
        assert intersection_number(f, [anticanonical(f)] * 3) == 64

    def test_p1xp1_anticanonical(self):
        f = product(p1(), p1())
        assert intersection_number(f, [anticanonical(f)] * 2) == 8

    def test_p1xp1_rulings(self):
        f = product(p1(), p1())
        a = basis_divisor(f, 0)
        b = basis_divisor(f, 2)
        assert intersection_number(f, [a, b]) == 1
        assert intersection_number(f, [a, a]) == 0
        assert intersection_number(f, [b, b]) == 0

    def test_hirzebruch_sections(self):
        f = hirzebruch(1)
        t0 = basis_divisor(f, f.ray_named("t0"))
        t1 = basis_divisor(f, f.ray_named("t1"))
        fiber = basis_divisor(f, 0)
        assert intersection_number(f, [t1, t1]) == -1
        assert intersection_number(f, [t0, t0]) == 1
        assert intersection_number(f, [t0, fiber]) == 1
        assert intersection_number(f, [fiber, fiber]) == 0

    def test_degree_matches_product(self):
        f = p2()
        h = (1, 1, 0)
        d = (2, 0, 1)
        assert degree(f, d, h) == intersection_number(f, [d, h])

    def test_hirzebruch2_anticanonical_degree(self):
        assert intersection_number(hirzebruch(2), [anticanonical(hirzebruch(2))] * 2) == 8

    def test_fraction_divisors(self):
        f = p2()
        d = (Fraction(1, 2), 0, 0)
        assert intersection_number(f, [d, d]) == Fraction(1, 4)


class TestErrors:
    def test_wrong_divisor_count(self):
        with pytest.raises(ValueError):
            intersection_number(p2(), [(1, 0, 0)])

    def test_wrong_coefficient_count(self):
        with pytest.raises(ValueError):
            intersection_number(p2(), [(1, 0), (1, 0)])

    def test_multiply_beyond_points(self):
        f = p1()
        cycle = multiply((1, 0), fundamental_cycle(f))
        with pytest.raises(ValueError):
            multiply((1, 0), cycle)

    def test_basis_divisor_range(self):
        with pytest.raises(ValueError):
            basis_divisor(p2(), 3)


class TestInvariance:
    def test_rational_equivalence(self):
        rng = random.Random(21)
        for fan in ALL_FANS:
            n = fan.dim
            for _ in range(8):
                divisors = [tuple(rng.randint(-3, 3) for _ in range(fan.n_rays))
                            for _ in range(n)]
                m = tuple(rng.randint(-2, 2) for _ in range(n))
                shifted = tuple(a + b for a, b in
                                zip(divisors[0], principal_divisor(fan, m)))
                assert intersection_number(fan, divisors) == \
                    intersection_number(fan, [shifted] + divisors[1:])

    def test_symmetry(self):
        rng = random.Random(22)
        for fan in ALL_FANS:
            divisors = [tuple(rng.randint(-3, 3) for _ in range(fan.n_rays))
                        for _ in range(fan.dim)]
            base = intersection_number(fan, divisors)
            for _ in range(4):
                perm = divisors[:]
                rng.shuffle(perm)
                assert intersection_number(fan, perm) == base

    def test_multilinearity(self):
        rng = random.Random(23)
        fan = p2()
        for _ in range(10):
            a = tuple(rng.randint(-3, 3) for _ in range(3))
            b = tuple(rng.randint(-3, 3) for _ in range(3))
            c = tuple(rng.randint(-3, 3) for _ in range(3))
            ab = tuple(x + y for x, y in zip(a, b))
            assert intersection_number(fan, [ab, c]) == \
                intersection_number(fan, [a, c]) + intersection_number(fan, [b, c])

    def test_wall_value_matches_curve_product(self):
        rng = random.Random(24)
        for fan in ALL_FANS:
            if fan.dim < 2:
                continue
            for w in walls(fan):
                d = tuple(rng.randint(-3, 3) for _ in range(fan.n_rays))
                curve = ChowCycle(fan, fan.dim - 1, {w.rays: 1})
                assert wall_value(fan, d, w) == multiply(d, curve).total()


class TestPositivity:
    def test_p2_hyperplane_ample(self):
        assert is_ample(p2(), (1, 0, 0))
        assert is_ample(p2(), (1, 1, 1))
        assert not is_ample(p2(), (-1, 0, 0))
        assert is_nef(p2(), (0, 0, 0))
        assert not is_ample(p2(), (0, 0, 0))

    def test_fano_catalogue(self):
        assert is_fano(p2())
        assert is_fano(p3())
        assert is_fano(product(p1(), p1()))
        assert is_fano(hirzebruch(1))

    def test_hirzebruch2_not_fano(self):
        f = hirzebruch(2)
        assert not is_fano(f)
        assert is_nef(f, anticanonical(f))

    def test_nef_but_not_ample_fiber_class(self):
        f = hirzebruch(1)
        fiber = basis_divisor(f, 0)
        assert is_nef(f, fiber)
        assert not is_ample(f, fiber)


class TestLinearEquivalence:
    def test_p2_lines(self):
        f = p2()
        assert linearly_equivalent(f, (1, 0, 0), (0, 1, 0))
        assert linearly_equivalent(f, (1, 0, 0), (0, 0, 1))
        assert not linearly_equivalent(f, (1, 0, 0), (0, 0, 2))

    def test_principal_is_trivial(self):
        f = hirzebruch(1)
        d = principal_divisor(f, (2, -1))
        assert linearly_equivalent(f, d, (0,) * f.n_rays)

    def test_picard_rank(self):
        assert picard_rank(p2()) == 1
        assert picard_rank(p3()) == 1
        assert picard_rank(product(p1(), p1())) == 2
        assert picard_rank(hirzebruch(1)) == 2
        assert picard_rank(product(p1(), p2())) == 2

    def test_principal_length_check(self):
        with pytest.raises(ValueError):
            principal_divisor(p2(), (1,))
