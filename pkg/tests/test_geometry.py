import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from confsec import geometry as geo

ALL_SPACES = [
    geo.sphere(1), geo.sphere(2), geo.sphere(3),
    geo.real_projective(2), geo.real_projective(3),
    geo.torus(1), geo.torus(2),
    geo.euclidean(2), geo.disc(2),
    geo.wedge_s2_s1(), geo.discrete(4),
]


def test_space_ids_round_trip():
    for space in ALL_SPACES:
        assert geo.parse_space(space.space_id) == space
    assert geo.parse_space("wedge") == geo.wedge_s2_s1()
    with pytest.raises(geo.SpaceError):
        geo.parse_space("Q5")


def test_descriptor_flags():
    for space in ALL_SPACES:
        assert space.hausdorff
    boundaryless = {s.space_id: s.boundaryless_manifold for s in ALL_SPACES}
    assert not boundaryless["D2"]
    assert not boundaryless["S2vS1"]
    assert not boundaryless["Discrete4"]
    for sid in ("S1", "S2", "RP3", "T2", "R2"):
        assert boundaryless[sid]
    assert geo.sphere(2).metric is geo.MetricKind.GEODESIC
    assert geo.real_projective(2).metric is geo.MetricKind.QUOTIENT_GEODESIC
    assert geo.disc(2).metric is geo.MetricKind.EUCLIDEAN
    assert geo.wedge_s2_s1().metric is geo.MetricKind.BRANCH_METRIC
    assert geo.discrete(3).metric is geo.MetricKind.DISCRETE


class TestDistance:
    def test_identity_and_antipodal_on_s2(self):
        S2 = geo.sphere(2)
        p = geo.point(S2, [0, 0, 1])
        assert geo.distance(p, p) == 0.0
        q = geo.point(S2, [0, 0, -1])
        assert geo.distance(p, q) == pytest.approx(math.pi, abs=1e-15)

    def test_rp3_pair_rotation_is_quarter_turn(self):
        # oracle: v . Jv = -v1 v2 + v2 v1 - v3 v4 + v4 v3 = 0 for every v,
        # so the projective distance arccos|v . Jv| is exactly pi/2
        RP3 = geo.real_projective(3)
        J = np.zeros((4, 4))
        J[0, 1], J[1, 0], J[2, 3], J[3, 2] = -1.0, 1.0, -1.0, 1.0
        rng = np.random.default_rng(42)
        for _ in range(10_000):
            v = rng.normal(size=4)
            v /= np.linalg.norm(v)
            assert abs(float(v @ J @ v)) < 1e-12
            d = geo.distance(geo.point(RP3, v), geo.point(RP3, J @ v))
            assert d == pytest.approx(math.pi / 2, abs=1e-9)

    def test_torus_max_of_circle_distances(self):
        T2 = geo.torus(2)
        p = geo.point(T2, [0.0, 0.0])
        q = geo.point(T2, [0.5, 6.0])
        expected = max(0.5, 2 * math.pi - 6.0)
        assert geo.distance(p, q) == pytest.approx(expected, abs=1e-12)

    def test_wedge_cross_branch_through_base(self):
        W = geo.wedge_s2_s1()
        p = geo.wedge_sphere_point([0, 0, 1])  # quarter turn from the glue point
        q = geo.wedge_circle_point(1.0)
        assert geo.distance(p, q) == pytest.approx(math.pi / 2 + 1.0, abs=1e-12)

    def test_mismatched_spaces_rejected(self):
        with pytest.raises(geo.SpaceMismatchError):
            geo.distance(geo.point(geo.sphere(1), [1, 0]),
                         geo.point(geo.sphere(2), [1, 0, 0]))

    @pytest.mark.parametrize("space", ALL_SPACES, ids=lambda s: s.space_id)
    def test_metric_axioms_on_random_triples(self, space):
        pts = geo.sample(space, seed=11, n=3 * 200)
        for i in range(0, len(pts), 3):
            a, b, c = pts[i], pts[i + 1], pts[i + 2]
            dab, dba = geo.distance(a, b), geo.distance(b, a)
            assert dab == pytest.approx(dba, abs=1e-9)
            assert dab >= 0
            assert geo.distance(a, c) <= dab + geo.distance(b, c) + 1e-9


class TestSampling:
    def test_deterministic(self):
        S1 = geo.sphere(1)
        first = geo.sample(S1, seed=7, n=3)
        second = geo.sample(S1, seed=7, n=3)
        for p, q in zip(first, second):
            assert geo.coordinate_error(p, q) == 0.0

    def test_s2_uniformity_mean_vector(self):
        # Monte-Carlo oracle: the mean of n uniform sphere points has norm
        # around 1/sqrt(n) ~ 0.01 for n = 10^4, far below the 0.05 gate
        pts = geo.sample(geo.sphere(2), seed=1, n=10_000)
        mean = np.mean([p.payload for p in pts], axis=0)
        assert np.linalg.norm(mean) < 0.05

    def test_discrete_range(self):
        pts = geo.sample(geo.discrete(4), seed=3, n=8)
        assert all(0 <= p.payload < 4 for p in pts)

    @pytest.mark.parametrize("space", ALL_SPACES, ids=lambda s: s.space_id)
    def test_samples_are_canonical(self, space):
        for p in geo.sample(space, seed=5, n=50):
            again = geo.point(space, p.payload)
            assert geo.coordinate_error(p, again) == 0.0

    def test_sample_configurations_distinct(self):
        for cfg in geo.sample_configurations(geo.sphere(1), 3, seed=0, n=20):
            assert geo.min_separation(cfg) > geo.DELTA_SEP


class TestConfiguration:
    def test_projection_keeps_prefix(self):
        S2 = geo.sphere(2)
        a, b, c = geo.sample_configurations(S2, 3, seed=2, n=1)[0].points
        cfg = geo.configuration(S2, [a, b, c])
        assert geo.project(cfg, 1).points == (a,)
        assert geo.project(cfg, 3).points == (a, b, c)
        pair = geo.project(cfg, 2)
        assert geo.min_separation(pair) > geo.DELTA_SEP
        with pytest.raises(geo.SpaceError):
            geo.project(cfg, 4)
        with pytest.raises(geo.SpaceError):
            geo.project(cfg, 0)

    @given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 100))
    @settings(max_examples=40, deadline=None)
    def test_projection_composition_is_exact(self, l, r, seed):
        k = 4
        if not k >= l >= r >= 1:
            l, r = max(l, r), min(l, r)
        cfg = geo.sample_configurations(geo.torus(2), k, seed=seed, n=1)[0]
        via = geo.project(geo.project(cfg, l), r)
        direct = geo.project(cfg, r)
        assert via.points == direct.points

    def test_coincident_points_rejected(self):
        S1 = geo.sphere(1)
        p = geo.circle_point(0.3)
        with pytest.raises(geo.SpaceError):
            geo.configuration(S1, [p, geo.circle_point(0.3)])

    def test_separation_threshold_configurable(self):
        S1 = geo.sphere(1)
        p, q = geo.circle_point(0.0), geo.circle_point(1e-6)
        with pytest.raises(geo.SpaceError):
            geo.configuration(S1, [p, q], delta_sep=1e-3)
        assert geo.configuration(S1, [p, q], delta_sep=1e-9).k == 2


class TestCanonicalization:
    @given(st.lists(st.floats(-2, 2), min_size=3, max_size=3))
    @settings(max_examples=100, deadline=None)
    def test_sphere_idempotent(self, raw):
        v = np.array(raw)
        if np.linalg.norm(v) < 1e-3:
            return
        p = geo.point(geo.sphere(2), v / np.linalg.norm(v))
        again = geo.point(geo.sphere(2), p.payload)
        assert geo.coordinate_error(p, again) == 0.0

    @given(st.lists(st.floats(-2, 2), min_size=4, max_size=4))
    @settings(max_examples=100, deadline=None)
    def test_projective_sign_canonical(self, raw):
        v = np.array(raw)
        if np.linalg.norm(v) < 1e-3:
            return
        v = v / np.linalg.norm(v)
        p = geo.point(geo.real_projective(3), v)
        q = geo.point(geo.real_projective(3), -v)
        assert geo.coordinate_error(p, q) == 0.0
        lead = p.payload[np.abs(p.payload) > 1e-12]
        assert lead.size == 0 or lead[0] > 0

    def test_wedge_basepoint_canonical_on_circle(self):
        p = geo.wedge_sphere_point([1, 0, 0])
        assert p.payload == ("circle", 0.0)
        q = geo.wedge_circle_point(2 * math.pi)
        assert q.payload == ("circle", 0.0)

    def test_torus_angle_wrapping(self):
        p = geo.point(geo.torus(1), [2 * math.pi + 0.25])
        assert p.payload[0] == pytest.approx(0.25, abs=1e-12)
        q = geo.point(geo.torus(1), [-0.25])
        assert q.payload[0] == pytest.approx(2 * math.pi - 0.25, abs=1e-12)

    def test_disc_boundary_clip(self):
        p = geo.point(geo.disc(2), [1.0 + 1e-10, 0.0])
        assert np.linalg.norm(p.payload) <= 1.0
        with pytest.raises(geo.SpaceError):
            geo.point(geo.disc(2), [1.1, 0.0])


class TestGeodesics:
    def test_constant_when_endpoints_agree(self):
        p = geo.circle_point(1.0)
        for t in (0.0, 0.3, 1.0):
            assert geo.coordinate_error(geo.geodesic_point(p, p, t), p) < 1e-15

    def test_perpendicular_midpoint_on_s2(self):
        S2 = geo.sphere(2)
        p = geo.point(S2, [1, 0, 0])
        q = geo.point(S2, [0, 1, 0])
        mid = geo.geodesic_point(p, q, 0.5)
        want = np.array([1, 1, 0]) / math.sqrt(2)
        assert np.allclose(mid.payload, want, atol=1e-12)

    def test_antipodal_ambiguous(self):
        S2 = geo.sphere(2)
        with pytest.raises(geo.AmbiguousGeodesicError):
            geo.geodesic_point(geo.point(S2, [0, 0, 1]), geo.point(S2, [0, 0, -1]), 0.5)

    def test_endpoints_exact(self):
        for space in (geo.sphere(2), geo.torus(2), geo.euclidean(2)):
            a, b = geo.sample(space, seed=9, n=2)
            try:
                start = geo.geodesic_point(a, b, 0.0)
                end = geo.geodesic_point(a, b, 1.0)
            except geo.AmbiguousGeodesicError:
                continue
            assert geo.coordinate_error(start, a) <= 1e-12
            assert geo.coordinate_error(end, b) <= 1e-12

    def test_constant_speed(self):
        S2 = geo.sphere(2)
        p = geo.point(S2, [1, 0, 0])
        q = geo.point(S2, [0, 1, 0])
        total = geo.distance(p, q)
        for t in (0.25, 0.5, 0.75):
            x = geo.geodesic_point(p, q, t)
            assert geo.distance(p, x) == pytest.approx(t * total, abs=1e-9)

    def test_torus_wraps_short_way(self):
        T1 = geo.torus(1)
        a = geo.point(T1, [0.1])
        b = geo.point(T1, [2 * math.pi - 0.1])
        mid = geo.geodesic_point(a, b, 0.5)
        assert mid.payload[0] == pytest.approx(0.0, abs=1e-12) or \
            mid.payload[0] == pytest.approx(2 * math.pi, abs=1e-12)

    def test_torus_antipodal_coordinate_ambiguous(self):
        T1 = geo.torus(1)
        with pytest.raises(geo.AmbiguousGeodesicError):
            geo.geodesic_point(geo.point(T1, [0.0]), geo.point(T1, [math.pi]), 0.5)

    def test_wedge_cross_branch_walk(self):
        p = geo.wedge_sphere_point([0, 0, 1])
        q = geo.wedge_circle_point(1.0)
        base = geo.wedge_circle_point(0.0)
        total = geo.distance(p, q)
        boundary = geo.distance(p, base) / total
        at_base = geo.geodesic_point(p, q, boundary)
        assert geo.distance(at_base, base) < 1e-9
        end = geo.geodesic_point(p, q, 1.0)
        assert geo.coordinate_error(end, q) <= 1e-12

    def test_discrete_distinct_points_have_no_path(self):
        D = geo.discrete(3)
        with pytest.raises(geo.AmbiguousGeodesicError):
            geo.geodesic_point(geo.point(D, 0), geo.point(D, 1), 0.5)


class TestJson:
    @pytest.mark.parametrize("space", ALL_SPACES, ids=lambda s: s.space_id)
    def test_point_round_trip(self, space):
        for p in geo.sample(space, seed=13, n=10):
            data = json.loads(json.dumps(geo.point_to_json(p)))
            q = geo.point_from_json(data)
            assert geo.coordinate_error(p, q) == 0.0

    def test_configuration_round_trip(self):
        cfg = geo.sample_configurations(geo.sphere(2), 3, seed=4, n=1)[0]
        data = json.loads(json.dumps(geo.configuration_to_json(cfg)))
        back = geo.configuration_from_json(data)
        assert geo.config_coordinate_error(cfg, back) == 0.0

    def test_wedge_round_trip_both_branches(self):
        for p in (geo.wedge_circle_point(2.0), geo.wedge_sphere_point([0, 1, 0])):
            data = json.loads(json.dumps(geo.point_to_json(p)))
            assert geo.coordinate_error(geo.point_from_json(data), p) == 0.0
