import pytest

from toricstab.fan import (
    FanError,
    contains_cone,
    dual_basis,
    new_fan,
    product,
    projectivize,
    star_subdivide,
    walls,
)


def p2():
    return new_fan([(1, 0), (0, 1), (-1, -1)], [(0, 1), (1, 2), (0, 2)],
                   ["x", "y", "z"])


def p1():
    return new_fan([(1,), (-1,)], [(0,), (1,)], ["plus", "minus"])


def kinds(err: FanError):
    return {v.kind for v in err.violations}


class TestValidation:
    def test_p2_valid(self):
        f = p2()
        assert f.dim == 2
        assert f.n_rays == 3
        assert len(f.max_cones) == 3
        assert f.ray_named("y") == 1
        with pytest.raises(KeyError):
            f.ray_named("w")

    def test_p1_valid(self):
        f = p1()
        assert f.dim == 1
        assert len(f.max_cones) == 2

    def test_cones_sorted_but_order_preserved(self):
        f = new_fan([(1, 0), (0, 1), (-1, -1)], [(2, 1), (0, 2), (1, 0)])
        assert f.max_cones == ((1, 2), (0, 2), (0, 1))

    def test_default_names(self):
        f = new_fan([(1,), (-1,)], [(0,), (1,)])
        assert f.ray_names == ("r0", "r1")

    def test_non_primitive_ray(self):
        with pytest.raises(FanError) as e:
            new_fan([(2, 0), (0, 1), (-1, -1)], [(0, 1), (1, 2), (0, 2)])
        assert "non_primitive_ray" in kinds(e.value)

    def test_zero_ray(self):
        with pytest.raises(FanError) as e:
            new_fan([(0, 0), (0, 1), (-1, -1)], [(0, 1), (1, 2), (0, 2)])
        assert "zero_ray" in kinds(e.value)

    def test_duplicate_ray(self):
        with pytest.raises(FanError) as e:
            new_fan([(1, 0), (1, 0), (-1, -1)], [(0, 1), (1, 2), (0, 2)])
        assert "duplicate_ray" in kinds(e.value)

    def test_bad_ray_length(self):
        with pytest.raises(FanError) as e:
            new_fan([(1, 0), (0, 1, 0), (-1, -1)], [(0, 1), (1, 2), (0, 2)])
        assert "bad_ray_length" in kinds(e.value)

    def test_non_unimodular_cone(self):
        # Cone((1,0),(1,2)) has index two
        with pytest.raises(FanError) as e:
            new_fan([(1, 0), (1, 2), (-1, -1)], [(0, 1), (1, 2), (0, 2)])
        assert "non_unimodular_cone" in kinds(e.value)

    def test_missing_cone_leaves_open_facet(self):
        with pytest.raises(FanError) as e:
            new_fan([(1, 0), (0, 1), (-1, -1)], [(0, 1), (1, 2)])
        assert "open_facet" in kinds(e.value)

    def test_wrong_cone_size(self):
        with pytest.raises(FanError) as e:
            new_fan([(1, 0), (0, 1), (-1, -1)], [(0, 1), (1, 2), (0,)])
        assert "bad_cone_size" in kinds(e.value)

    def test_bad_ray_index(self):
        with pytest.raises(FanError) as e:
            new_fan([(1, 0), (0, 1), (-1, -1)], [(0, 1), (1, 2), (0, 7)])
        assert "bad_ray_index" in kinds(e.value)

    def test_duplicate_cone(self):
        with pytest.raises(FanError) as e:
            new_fan([(1, 0), (0, 1), (-1, -1)], [(0, 1), (1, 0), (1, 2), (0, 2)])
        assert "duplicate_cone" in kinds(e.value)

    def test_overlapping_cones(self):
        with pytest.raises(FanError) as e:
            new_fan([(1, 0), (0, 1), (-1, -1), (1, 1)],
                    [(0, 1), (1, 2), (0, 2), (1, 3)])
        assert "overlapping_cones" in kinds(e.value)

    def test_unused_ray(self):
        with pytest.raises(FanError) as e:
            new_fan([(1, 0), (0, 1), (-1, -1), (1, 1)],
                    [(0, 1), (1, 2), (0, 2)])
        assert "unused_ray" in kinds(e.value)

    def test_duplicate_names_rejected(self):
        with pytest.raises(FanError) as e:
            new_fan([(1,), (-1,)], [(0,), (1,)], ["a", "a"])
        assert "bad_ray_names" in kinds(e.value)

    def test_message_mentions_kind(self):
        with pytest.raises(FanError, match="non_unimodular_cone"):
            new_fan([(1, 0), (1, 2), (-1, -1)], [(0, 1), (1, 2), (0, 2)])


class TestDualBasis:
    def test_identity(self):
        assert dual_basis([(1, 0), (0, 1)]) == [(1, 0), (0, 1)]

    def test_sheared(self):
        mb = dual_basis([(1, 1), (0, 1)])
        assert mb == [(1, 0), (-1, 1)]
        # defining property
        for i, m in enumerate(mb):
            for j, v in enumerate([(1, 1), (0, 1)]):
                assert sum(a * b for a, b in zip(m, v)) == (1 if i == j else 0)

    def test_rejects_non_unimodular(self):
        with pytest.raises(ValueError):
            dual_basis([(1, 0), (0, 2)])


class TestWalls:
    def test_p2_wall_count(self):
        assert len(walls(p2())) == 3

    def test_p1_wall(self):
        (w,) = walls(p1())
        assert w.rays == ()
        assert w.coeffs == ()
        assert set(w.opposite) == {0, 1}

    def test_relation_holds(self):
        for fan in (p1(), p2(), product(p1(), p2()), star_subdivide(p2(), (0, 1))):
            for w in walls(fan):
                total = [0] * fan.dim
                for idx, coeff in [(w.opposite[0], 1), (w.opposite[1], 1)] + list(
                        zip(w.rays, w.coeffs)):
                    for c in range(fan.dim):
                        total[c] += coeff * fan.rays[idx][c]
                assert all(x == 0 for x in total), (w, total)

    def test_p2_wall_coefficients(self):
        # ray sum of the two "opposite" rays along any P^2 wall is minus the
        # third ray, so each relation coefficient is 1
        for w in walls(p2()):
            assert w.coeffs == (1,)

    def test_every_wall_in_two_cones(self):
        fan = product(p2(), p1())
        for w in walls(fan):
            for k, cone in zip(w.cones, (w.opposite[0], w.opposite[1])):
                assert set(w.rays) | {cone} == set(fan.max_cones[k])


class TestContainsCone:
    def test_faces(self):
        f = p2()
        assert contains_cone(f, ())
        assert contains_cone(f, (0,))
        assert contains_cone(f, (0, 1))
        assert not contains_cone(f, (0, 1, 2))

    def test_non_face(self):
        # rays 0 and 1 of P^1 point in opposite directions
        assert not contains_cone(p1(), (0, 1))


class TestProduct:
    def test_p1_x_p1(self):
        f = product(p1(), p1())
        assert f.dim == 2
        assert f.n_rays == 4
        assert len(f.max_cones) == 4
        assert f.rays == ((1, 0), (-1, 0), (0, 1), (0, -1))
        assert f.ray_names == ("plus", "minus", "plus'", "minus'")
        assert f.factor_blocks == ((0, 2, 0, 1), (2, 4, 1, 2))

    def test_three_factors(self):
        f = product(p1(), p1(), p1())
        assert f.dim == 3
        assert len(f.max_cones) == 8

    def test_mixed(self):
        f = product(p2(), p1())
        assert f.dim == 3
        assert len(f.max_cones) == 6
        assert f.factor_blocks == ((0, 3, 0, 2), (3, 5, 2, 3))

    def test_empty(self):
        with pytest.raises(ValueError):
            product()


class TestProjectivize:
    def test_trivial_bundle_over_p1(self):
        f = projectivize(p1(), [(0, 0), (0, 0)])
        assert f.dim == 2
        assert set(f.rays) == {(1, 0), (-1, 0), (0, -1), (0, 1)}

    def test_twisted_bundle_is_hirzebruch(self):
        f = projectivize(p1(), [(0, 0), (0, 1)])
        assert set(f.rays) == {(1, 0), (-1, 1), (0, -1), (0, 1)}
        assert len(f.max_cones) == 4

    def test_twist_invariance(self):
        base = p2()
        one = projectivize(base, [(0, 0, 0), (1, 0, 2)])
        two = projectivize(base, [(3, 1, 1), (4, 1, 3)])
        assert one == two

    def test_needs_two_summands(self):
        with pytest.raises(ValueError):
            projectivize(p1(), [(0, 0)])

    def test_profile_length_checked(self):
        with pytest.raises(ValueError):
            projectivize(p1(), [(0, 0), (0, 1, 2)])

    def test_rank_three_fiber(self):
        f = projectivize(p1(), [(0, 0), (0, 0), (0, 1)])
        assert f.dim == 3
        assert len(f.max_cones) == 6
        assert f.ray_names == ("plus", "minus", "t0", "t1", "t2")


class TestStarSubdivide:
    def test_blowup_point_on_p2(self):
        f = star_subdivide(p2(), (0, 1))
        assert f.n_rays == 4
        assert f.rays[3] == (1, 1)
        assert f.ray_names[3] == "u_tau"
        assert len(f.max_cones) == 4
        assert (0, 1) not in f.max_cones

    def test_replacement_cones(self):
        f = star_subdivide(p2(), (0, 1))
        assert (1, 3) in f.max_cones and (0, 3) in f.max_cones

    def test_name_clash_primed(self):
        f = star_subdivide(p2(), (0, 1), name="x")
        assert f.ray_names[3] == "x'"

    def test_not_a_cone(self):
        with pytest.raises(ValueError):
            star_subdivide(p1() if False else product(p1(), p1()), (0, 1))

    def test_too_small_face(self):
        with pytest.raises(ValueError):
            star_subdivide(p2(), (0,))

    def test_subdivide_edge_in_3d(self):
        f3 = product(p2(), p1())
        # rays 0,1 span a 2-face lying in two maximal cones
        g = star_subdivide(f3, (0, 1))
        assert g.n_rays == f3.n_rays + 1
        assert len(g.max_cones) == len(f3.max_cones) + 2
