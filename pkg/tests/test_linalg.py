import random
from fractions import Fraction

import pytest

from toricstab.linalg import (
    Subspace,
    det,
    full_subspace,
    intersect,
    is_lattice_basis,
    is_primitive,
    matrix_inverse,
    pairing,
    quotient_dim,
    rref,
    solve,
    span,
    zero_subspace,
)


def rand_vec(rng, n, lo=-4, hi=4):
    return tuple(rng.randint(lo, hi) for _ in range(n))


def rand_subspace(rng, n):
    k = rng.randint(0, n)
    return span([rand_vec(rng, n) for _ in range(k)], n)


class TestRref:
    def test_identity_fixed(self):
        eye = [[1, 0], [0, 1]]
        assert rref(eye) == [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]]

    def test_drops_zero_rows(self):
        assert rref([[0, 0, 0]]) == []
        assert rref([]) == []

    def test_unit_pivots_and_cleared_columns(self):
        red = rref([[2, 4, 0], [1, 2, 3]])
        for row in red:
            piv = next(c for c in range(3) if row[c] != 0)
            assert row[piv] == 1
            for other in red:
                if other is not row:
                    assert other[piv] == 0

    def test_canonical_under_row_ops(self):
        rng = random.Random(101)
        for _ in range(40):
            n = rng.randint(1, 5)
            rows = [list(rand_vec(rng, n)) for _ in range(rng.randint(1, n + 1))]
            shuffled = [row[:] for row in rows]
            rng.shuffle(shuffled)
            # also add a random multiple of one row to another
            if len(shuffled) >= 2:
                i, j = rng.sample(range(len(shuffled)), 2)
                c = rng.randint(-3, 3)
                shuffled[i] = [a + c * b for a, b in zip(shuffled[i], shuffled[j])]
            assert rref(rows) == rref(shuffled)


class TestSubspace:
    def test_span_canonical(self):
        a = span([(1, 0, 1), (0, 1, 1)], 3)
        b = span([(1, 1, 2), (1, -1, 0), (2, 0, 2)], 3)
        assert a == b
        assert hash(a) == hash(b)

    def test_dims(self):
        assert zero_subspace(4).dim == 0
        assert full_subspace(4).dim == 4
        assert span([(1, 2), (2, 4)], 2).dim == 1

    def test_contains(self):
        v = span([(1, 1, 0), (0, 0, 1)], 3)
        assert v.contains((2, 2, 5))
        assert v.contains((0, 0, 0))
        assert not v.contains((1, 0, 0))

    def test_contains_length_check(self):
        with pytest.raises(ValueError):
            span([(1, 0)], 2).contains((1, 0, 0))

    def test_sum(self):
        a = span([(1, 0, 0)], 3)
        b = span([(0, 1, 0)], 3)
        assert (a + b) == span([(1, 0, 0), (0, 1, 0)], 3)

    def test_sum_dimension_mismatch(self):
        with pytest.raises(ValueError):
            span([(1,)], 1) + span([(1, 0)], 2)

    def test_perp(self):
        line = span([(1, 2, 3)], 3)
        p = line.perp()
        assert p.dim == 2
        for row in p.basis:
            assert pairing((1, 2, 3), row) == 0
        assert line.perp().perp() == line

    def test_perp_of_extremes(self):
        assert zero_subspace(3).perp() == full_subspace(3)
        assert full_subspace(3).perp() == zero_subspace(3)

    def test_intersect(self):
        a = span([(1, 0, 0), (0, 1, 0)], 3)
        b = span([(0, 1, 0), (0, 0, 1)], 3)
        assert intersect(a, b) == span([(0, 1, 0)], 3)

    def test_quotient_dim(self):
        a = span([(1, 0, 0)], 3)
        b = span([(1, 0, 0), (0, 1, 0)], 3)
        assert quotient_dim(a, b) == 1
        assert quotient_dim(zero_subspace(3), full_subspace(3)) == 3
        with pytest.raises(ValueError):
            quotient_dim(b, a)

    def test_fractional_generators(self):
        a = span([(Fraction(1, 2), Fraction(1, 3))], 2)
        assert a == span([(3, 2)], 2)

    def test_double_perp_random(self):
        rng = random.Random(7)
        for _ in range(60):
            n = rng.randint(1, 5)
            v = rand_subspace(rng, n)
            assert v.perp().perp() == v
            assert v.dim + v.perp().dim == n

    def test_inclusion_exclusion_random(self):
        rng = random.Random(8)
        for _ in range(60):
            n = rng.randint(1, 5)
            a, b = rand_subspace(rng, n), rand_subspace(rng, n)
            assert intersect(a, b).dim + (a + b).dim == a.dim + b.dim

    def test_modular_law_random(self):
        # a ⊆ c  =>  a + (b ∩ c) == (a + b) ∩ c
        rng = random.Random(9)
        for _ in range(60):
            n = rng.randint(1, 5)
            c = rand_subspace(rng, n)
            if c.is_zero():
                continue
            k = rng.randint(0, c.dim)
            a = span(rng.sample(list(c.basis), k), n)
            b = rand_subspace(rng, n)
            assert a + intersect(b, c) == intersect(a + b, c)

    def test_intersection_is_containment_random(self):
        rng = random.Random(10)
        for _ in range(60):
            n = rng.randint(1, 5)
            a, b = rand_subspace(rng, n), rand_subspace(rng, n)
            m = intersect(a, b)
            assert a.contains_subspace(m)
            assert b.contains_subspace(m)
            assert (a + b).contains_subspace(a)


class TestScalarHelpers:
    def test_pairing(self):
        assert pairing((1, 2, 3), (4, 5, 6)) == 32
        assert pairing((Fraction(1, 2),), (4,)) == 2
        with pytest.raises(ValueError):
            pairing((1,), (1, 2))

    def test_is_primitive(self):
        assert is_primitive((1, 0, 0))
        assert is_primitive((2, 3))
        assert is_primitive((-1, -1, -1, 2))
        assert not is_primitive((2, 4))
        assert not is_primitive((0, 0))

    def test_det_fixed(self):
        assert det([[1, 2], [3, 4]]) == -2
        assert det([[2, 0], [0, 3]]) == 6
        assert det([[1, 2], [2, 4]]) == 0

    def test_det_alternating_random(self):
        rng = random.Random(11)
        for _ in range(40):
            n = rng.randint(1, 4)
            m = [list(rand_vec(rng, n)) for _ in range(n)]
            i, j = (rng.sample(range(n), 2) if n >= 2 else (0, 0))
            if i != j:
                swapped = [row[:] for row in m]
                swapped[i], swapped[j] = swapped[j], swapped[i]
                assert det(swapped) == -det(m)

    def test_is_lattice_basis(self):
        assert is_lattice_basis([(1, 0), (0, 1)])
        assert is_lattice_basis([(1, 1), (0, 1)])
        assert is_lattice_basis([(0, 1), (-1, -1)])
        assert not is_lattice_basis([(1, 0), (0, 2)])
        assert not is_lattice_basis([(1, 0), (2, 0)])
        assert not is_lattice_basis([])
        assert not is_lattice_basis([(1, 0, 0), (0, 1, 0)])


class TestSolve:
    def test_unique_solution(self):
        assert solve([[1, 1], [1, -1]], [3, 1]) == [Fraction(2), Fraction(1)]

    def test_inconsistent(self):
        assert solve([[1, 1], [1, 1]], [0, 1]) is None

    def test_underdetermined(self):
        assert solve([[1, 1]], [1]) is None

    def test_overdetermined_consistent(self):
        assert solve([[1, 0], [0, 1], [1, 1]], [2, 3, 5]) == [Fraction(2), Fraction(3)]

    def test_random_round_trip(self):
        rng = random.Random(12)
        for _ in range(40):
            n = rng.randint(1, 4)
            m = [list(rand_vec(rng, n)) for _ in range(n)]
            if det(m) == 0:
                continue
            x = [Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(n)]
            rhs = [sum(m[i][j] * x[j] for j in range(n)) for i in range(n)]
            assert solve(m, rhs) == x


class TestMatrixInverse:
    def test_fixed(self):
        inv = matrix_inverse([[2, 0], [0, 4]])
        assert inv == [[Fraction(1, 2), 0], [0, Fraction(1, 4)]]

    def test_singular(self):
        with pytest.raises(ValueError):
            matrix_inverse([[1, 2], [2, 4]])

    def test_random_round_trip(self):
        rng = random.Random(13)
        for _ in range(30):
            n = rng.randint(1, 4)
            m = [list(rand_vec(rng, n)) for _ in range(n)]
            if det(m) == 0:
                continue
            inv = matrix_inverse(m)
            prod = [[sum(m[i][k] * inv[k][j] for k in range(n)) for j in range(n)]
                    for i in range(n)]
            assert prod == [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
