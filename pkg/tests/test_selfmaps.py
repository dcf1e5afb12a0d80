import math

import numpy as np
import pytest

from confsec import geometry as geo
from confsec import selfmaps as sm


class TestEvaluation:
    def test_antipodal_on_s2(self):
        S2 = geo.sphere(2)
        f = sm.SelfMap(S2, sm.Antipodal())
        image = sm.evaluate(f, geo.point(S2, [0, 0, 1]))
        assert np.array_equal(image.payload, [0, 0, -1])

    def test_rp_odd_rotation_formula(self):
        RP3 = geo.real_projective(3)
        h = sm.SelfMap(RP3, sm.RPOddRotation())
        image = sm.evaluate(h, geo.point(RP3, [1, 0, 0, 0]))
        assert np.array_equal(image.payload, [0, 1, 0, 0])

    def test_identity(self):
        T2 = geo.torus(2)
        f = sm.SelfMap(T2, sm.Identity())
        p = geo.point(T2, [1.0, 2.0])
        assert geo.coordinate_error(sm.evaluate(f, p), p) == 0.0

    def test_group_translation_on_torus(self):
        T2 = geo.torus(2)
        g1 = geo.point(T2, [1.0, 2.0])
        f = sm.SelfMap(T2, sm.GroupTranslation(g1))
        image = sm.evaluate(f, geo.point(T2, [0.5, 6.0]))
        assert image.payload[0] == pytest.approx(1.5, abs=1e-12)
        assert image.payload[1] == pytest.approx(8.0 - 2 * math.pi, abs=1e-12)

    def test_wedge_shift_formulas(self):
        W = geo.wedge_s2_s1()
        f = sm.SelfMap(W, sm.WedgeShift())
        # circle branch: b -> -b
        circ = sm.evaluate(f, geo.wedge_circle_point(0.5))
        assert circ.payload == ("circle", pytest.approx(0.5 + math.pi, abs=1e-12))
        # sphere branch: a -> gamma(a1)
        sph = sm.evaluate(f, geo.wedge_sphere_point([0, 0, 1]))
        assert sph.payload == ("circle", pytest.approx(math.pi / 2, abs=1e-12))

    def test_wedge_gamma_endpoints_exact(self):
        base = geo.wedge_circle_point(0.0)
        minus_base = geo.wedge_circle_point(math.pi)
        assert geo.coordinate_error(sm.wedge_gamma(-1.0), base) == 0.0
        assert geo.coordinate_error(sm.wedge_gamma(1.0), minus_base) == 0.0

    def test_wedge_branch_formulas_agree_at_glue_point(self):
        # the glue point canonicalizes to the circle branch, so the circle
        # formula applies; the sphere formula at a1 = 1 gives gamma(1) = -b0,
        # which is the same value
        W = geo.wedge_s2_s1()
        f = sm.SelfMap(W, sm.WedgeShift())
        glue = geo.wedge_sphere_point([1, 0, 0])
        image = sm.evaluate(f, glue)
        assert geo.coordinate_error(image, sm.wedge_gamma(1.0)) == 0.0

    def test_vector_field_flow_moves_by_epsilon(self):
        S3 = geo.sphere(3)
        f = sm.SelfMap(S3, sm.VectorFieldFlow(epsilon=0.3))
        for p in geo.sample(S3, seed=2, n=100):
            assert geo.distance(p, sm.evaluate(f, p)) == pytest.approx(0.3, abs=1e-9)

    def test_composite(self):
        S2 = geo.sphere(2)
        f = sm.SelfMap(S2, sm.Composite((sm.Antipodal(), sm.Antipodal())))
        p = geo.point(S2, [0.6, 0.8, 0.0])
        assert geo.coordinate_error(sm.evaluate(f, p), p) < 1e-15


class TestValidation:
    def test_rotation_needs_odd_projective(self):
        with pytest.raises(sm.RecipeError):
            sm.SelfMap(geo.real_projective(2), sm.RPOddRotation())

    def test_translation_needs_nonidentity(self):
        T1 = geo.torus(1)
        with pytest.raises(sm.RecipeError):
            sm.SelfMap(T1, sm.GroupTranslation(geo.point(T1, [0.0])))

    def test_translation_needs_group_space(self):
        S2 = geo.sphere(2)
        with pytest.raises(sm.RecipeError):
            sm.SelfMap(S2, sm.GroupTranslation(geo.point(S2, [1, 0, 0])))

    def test_wedge_shift_space(self):
        with pytest.raises(sm.RecipeError):
            sm.SelfMap(geo.sphere(2), sm.WedgeShift())

    def test_flow_needs_odd_sphere_and_valid_time(self):
        with pytest.raises(sm.RecipeError):
            sm.SelfMap(geo.sphere(2), sm.VectorFieldFlow(epsilon=0.5))
        with pytest.raises(sm.RecipeError):
            sm.SelfMap(geo.sphere(3), sm.VectorFieldFlow(epsilon=0.0))

    def test_unsupported_catalog_recipes_error(self):
        with pytest.raises(sm.UnsupportedRecipeError):
            sm.selfmap_from_json({"space": "RP3", "recipe": "cp_odd_rotation"})

    def test_space_mismatch_on_evaluate(self):
        f = sm.SelfMap(geo.sphere(2), sm.Antipodal())
        with pytest.raises(sm.RecipeError):
            sm.evaluate(f, geo.circle_point(0.1))


class TestFixedPointGap:
    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_antipodal_gap_is_pi(self, d):
        f = sm.SelfMap(geo.sphere(d), sm.Antipodal())
        assert sm.fixed_point_gap(f, seed=0, n=2_000) == pytest.approx(math.pi, abs=1e-9)

    def test_rp3_rotation_gap_is_quarter_turn(self):
        f = sm.SelfMap(geo.real_projective(3), sm.RPOddRotation())
        assert sm.fixed_point_gap(f, seed=0, n=10_000) == pytest.approx(
            math.pi / 2, abs=1e-9)

    def test_wedge_shift_gap(self):
        # oracle: on the circle branch the displacement is pi; on the sphere
        # branch it is arccos(a1) + pi (a1 + 1) / 2, minimized near
        # a1 = -sqrt(1 - 4/pi^2) with value about 2.81 -- comfortably > 0.1
        a1 = -math.sqrt(1.0 - 4.0 / math.pi**2)
        oracle_min = math.acos(a1) + math.pi * (a1 + 1.0) / 2.0
        assert oracle_min > 2.8
        f = sm.SelfMap(geo.wedge_s2_s1(), sm.WedgeShift())
        gap = sm.fixed_point_gap(f, seed=0, n=10_000)
        assert gap > 0.1
        assert gap >= oracle_min - 1e-9

    def test_s1_translation_gap_constant(self):
        # group-translation displacement is the translation length itself
        for theta in (0.5, 2.0, math.pi, 5.0):
            f = sm.SelfMap(geo.sphere(1),
                           sm.GroupTranslation(geo.circle_point(theta)))
            expected = min(theta, 2 * math.pi - theta)
            pts = geo.sample(geo.sphere(1), seed=3, n=200)
            for p in pts:
                d = geo.distance(p, sm.evaluate(f, p))
                assert d == pytest.approx(expected, abs=1e-9)

    def test_catalog_fpf_maps_have_positive_gap(self):
        spaces = [geo.sphere(1), geo.sphere(2), geo.sphere(3),
                  geo.real_projective(3), geo.torus(2),
                  geo.wedge_s2_s1(), geo.discrete(4)]
        for space in spaces:
            for f in sm.fixed_point_free_maps(space):
                for seed in range(10):
                    assert sm.fixed_point_gap(f, seed=seed, n=1_000) > 0


class TestNoncoincidence:
    def test_distinct_rotations(self):
        S1 = geo.sphere(1)
        fs = [sm.SelfMap(S1, sm.GroupTranslation(geo.circle_point(2 * math.pi / 3))),
              sm.SelfMap(S1, sm.GroupTranslation(geo.circle_point(4 * math.pi / 3)))]
        ok, witness = sm.are_noncoincident(fs, seed=0, n=500)
        assert ok
        assert witness.separation == pytest.approx(2 * math.pi / 3, abs=1e-9)

    def test_equal_maps_coincide(self):
        S2 = geo.sphere(2)
        fs = [sm.SelfMap(S2, sm.Antipodal()), sm.SelfMap(S2, sm.Antipodal())]
        ok, witness = sm.are_noncoincident(fs, seed=0, n=50)
        assert not ok
        assert witness.separation == 0.0
        assert (witness.i, witness.j) == (0, 1)

    def test_torus_translations_cancel(self):
        # group oracle: g1 x != g2 x iff g1 != g2, uniformly in x
        T2 = geo.torus(2)
        g1 = geo.point(T2, [1.0, 0.0])
        g2 = geo.point(T2, [0.0, 1.0])
        fs = [sm.SelfMap(T2, sm.GroupTranslation(g1)),
              sm.SelfMap(T2, sm.GroupTranslation(g2))]
        ok, witness = sm.are_noncoincident(fs, seed=1, n=500)
        assert ok
        expected = geo.distance(g1, g2)
        assert witness.separation == pytest.approx(expected, abs=1e-9)

    def test_empty_family_rejected(self):
        with pytest.raises(sm.RecipeError):
            sm.are_noncoincident([], seed=0, n=10)


class TestDegree:
    def test_winding_of_antipodal_circle_map(self):
        assert sm.degree(sm.SelfMap(geo.sphere(1), sm.Antipodal())) == 1

    def test_winding_of_identity(self):
        assert sm.degree(sm.SelfMap(geo.sphere(1), sm.Identity())) == 1

    def test_winding_of_rotation(self):
        f = sm.SelfMap(geo.sphere(1), sm.GroupTranslation(geo.circle_point(1.0)))
        assert sm.degree(f) == 1

    def test_s2_antipodal_degree(self):
        f = sm.SelfMap(geo.sphere(2), sm.Antipodal())
        assert sm.degree(f, grid=200_000) == -1

    def test_s2_identity_degree(self):
        f = sm.SelfMap(geo.sphere(2), sm.Identity())
        assert sm.degree(f, grid=200_000) == 1

    def test_s2_double_antipodal_degree(self):
        f = sm.SelfMap(geo.sphere(2), sm.Composite((sm.Antipodal(), sm.Antipodal())))
        assert sm.degree(f, grid=200_000) == 1

    def test_fixed_point_free_degree_law(self):
        # on S^d a fixed-point-free map has degree (-1)^(d+1)
        assert sm.degree(sm.SelfMap(geo.sphere(1), sm.Antipodal())) == 1
        assert sm.degree(sm.SelfMap(geo.sphere(2), sm.Antipodal()),
                         grid=200_000) == -1

    def test_degree_unsupported_dimensions(self):
        with pytest.raises(sm.RecipeError):
            sm.degree(sm.SelfMap(geo.sphere(3), sm.Antipodal()))


class TestCatalog:
    def test_catalog_lists_unsupported_projective_analogues(self):
        names = {(e.name, e.status) for e in sm.catalog(geo.real_projective(3))}
        assert ("rp_odd_rotation", "ok") in names
        assert ("cp_odd_rotation", "unsupported") in names
        assert ("hp_odd_rotation", "unsupported") in names

    def test_fixed_point_free_lookup(self):
        assert any(isinstance(f.recipe, sm.Antipodal)
                   for f in sm.fixed_point_free_maps(geo.sphere(2)))
        assert sm.fixed_point_free_maps(geo.real_projective(2)) == []

    def test_json_round_trip(self):
        maps = [
            sm.SelfMap(geo.sphere(2), sm.Antipodal()),
            sm.SelfMap(geo.real_projective(3), sm.RPOddRotation()),
            sm.default_translation(geo.torus(2)),
            sm.SelfMap(geo.sphere(3), sm.VectorFieldFlow(epsilon=0.7)),
        ]
        for f in maps:
            back = sm.selfmap_from_json(sm.selfmap_to_json(f))
            p = geo.sample(f.space, seed=8, n=1)[0]
            assert geo.coordinate_error(sm.evaluate(f, p), sm.evaluate(back, p)) == 0.0
