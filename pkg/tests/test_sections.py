import math

import numpy as np
import pytest

from confsec import geometry as geo
from confsec import sections as sec
from confsec import selfmaps as sm


def s1_rotations(*angles):
    S1 = geo.sphere(1)
    return [sm.SelfMap(S1, sm.GroupTranslation(geo.circle_point(a))) for a in angles]


class TestKeyLemmaCover:
    def test_two_pieces_on_circle(self):
        S1 = geo.sphere(1)
        p1, p2 = geo.circle_point(0.0), geo.circle_point(2.0)
        cover = sec.key_lemma_cover(S1, 2, basepoints=[p1, p2])
        assert len(cover.pieces) == 2
        x = geo.circle_point(1.0)
        base = geo.configuration(S1, [x])
        # piece 1 appends p2 and avoids p2
        image = cover.pieces[0].mapping(base)
        assert image.points == (x, p2)
        assert cover.pieces[0].region(base)
        # the excluded basepoint is outside its piece
        at_p2 = geo.configuration(S1, [p2])
        assert not cover.pieces[0].region(at_p2)
        assert cover.pieces[1].region(at_p2)

    def test_piece_count_matches_k(self):
        for k in (2, 3, 5):
            cover = sec.key_lemma_cover(geo.sphere(2), k)
            assert len(cover.pieces) == k

    def test_duplicate_basepoints_rejected(self):
        S1 = geo.sphere(1)
        p = geo.circle_point(0.3)
        with pytest.raises(geo.SpaceError):
            sec.key_lemma_cover(S1, 2, basepoints=[p, p])

    def test_needs_k_at_least_two(self):
        with pytest.raises(geo.SpaceError):
            sec.key_lemma_cover(geo.sphere(1), 1)

    def test_verification_run_s2(self):
        report = sec.verify_cover(sec.key_lemma_cover(geo.sphere(2), 3),
                                  seed=0, n=2_000)
        assert report.passed
        assert report.coverage_fraction == 1.0
        assert report.max_identity_error == 0.0


class TestBinomialCover:
    def test_counts(self):
        assert len(sec.binomial_cover(geo.sphere(2), 3, 2).pieces) == 3
        assert len(sec.binomial_cover(geo.sphere(2), 4, 2).pieces) == 6
        assert len(sec.binomial_cover(geo.torus(2), 5, 3).pieces) == 10

    def test_k2_r1_reduces_to_key_lemma(self):
        S1 = geo.sphere(1)
        basepoints = [geo.circle_point(0.0), geo.circle_point(2.0)]
        key = sec.key_lemma_cover(S1, 2, basepoints=basepoints)
        bino = sec.binomial_cover(S1, 2, 1, basepoints=basepoints)
        assert len(bino.pieces) == 2
        for x in geo.sample(S1, seed=6, n=200):
            base = geo.configuration(S1, [x])
            for kp, bp in zip(key.pieces, bino.pieces):
                assert kp.region(base) == bp.region(base)
                if kp.region(base):
                    a = kp.mapping(base)
                    b = bp.mapping(base)
                    assert geo.config_coordinate_error(a, b) == 0.0

    def test_verification_run(self):
        report = sec.verify_cover(sec.binomial_cover(geo.sphere(2), 4, 2),
                                  seed=0, n=1_000)
        assert report.passed

    def test_requires_k_greater_than_r(self):
        with pytest.raises(geo.SpaceError):
            sec.binomial_cover(geo.sphere(2), 2, 2)


class TestGlobalSections:
    def test_group_family_section(self):
        section = sec.from_fpf_family(s1_rotations(2 * math.pi / 3, 4 * math.pi / 3))
        assert section.k == 3 and section.r == 1
        report = sec.verify_cover(section, seed=0, n=1_000)
        assert report.passed

    def test_antipodal_family_gives_pair_section(self):
        f = sm.SelfMap(geo.sphere(3), sm.Antipodal())
        section = sec.from_fpf_family([f])
        report = sec.verify_cover(section, seed=0, n=500)
        assert report.passed

    def test_identity_rejected_with_witness(self):
        with pytest.raises(sec.CoincidenceError) as err:
            sec.from_fpf_family([sm.SelfMap(geo.sphere(1), sm.Identity())])
        assert err.value.witness is not None
        assert err.value.witness.separation == 0.0

    def test_coincident_pair_rejected(self):
        fs = s1_rotations(1.0, 1.0)
        with pytest.raises(sec.CoincidenceError):
            sec.from_fpf_family(fs)

    def test_sphere_sigma_values(self):
        sigma = sec.sphere_sigma(2)
        base = geo.configuration(geo.sphere(2), [geo.point(geo.sphere(2), [0, 0, 1])])
        image = sigma.mapping(base)
        assert np.array_equal(image.points[1].payload, [0, 0, -1])
        report = sec.verify_cover(sigma, seed=0, n=1_000)
        assert report.passed
        assert report.min_image_separation == pytest.approx(math.pi, abs=1e-9)


class TestDropPoints:
    def test_group_drop_coherence(self):
        fs = s1_rotations(2 * math.pi / 3, 4 * math.pi / 3)
        big = sec.from_fpf_family(fs)
        dropped = sec.drop_points(big, 2)
        direct = sec.from_fpf_family(fs[:1])
        for x in geo.sample(geo.sphere(1), seed=4, n=100):
            base = geo.configuration(geo.sphere(1), [x])
            assert geo.config_coordinate_error(dropped.mapping(base),
                                               direct.mapping(base)) == 0.0

    def test_drop_to_same_k_is_identity(self):
        sigma = sec.sphere_sigma(2)
        same = sec.drop_points(sigma, 2)
        base = geo.configuration(geo.sphere(2), [geo.sample(geo.sphere(2), 1, 1)[0]])
        assert geo.config_coordinate_error(same.mapping(base), sigma.mapping(base)) == 0.0

    def test_drop_verifies_on_torus(self):
        T2 = geo.torus(2)
        g1 = geo.point(T2, [2.0, 1.0])
        g2 = geo.point(T2, [4.0, 5.0])
        fs = [sm.SelfMap(T2, sm.GroupTranslation(g1)),
              sm.SelfMap(T2, sm.GroupTranslation(g2))]
        dropped = sec.drop_points(sec.from_fpf_family(fs), 2)
        report = sec.verify_cover(dropped, seed=0, n=10_000)
        assert report.passed

    def test_invalid_m(self):
        sigma = sec.sphere_sigma(2)
        with pytest.raises(geo.SpaceError):
            sec.drop_points(sigma, 0)
        with pytest.raises(geo.SpaceError):
            sec.drop_points(sigma, 3)


class TestVerifyCover:
    def test_missing_piece_breaks_coverage(self):
        S1 = geo.sphere(1)
        cover = sec.key_lemma_cover(S1, 2)
        broken = sec.SectionCover(cover.space, cover.k, cover.r,
                                  cover.pieces[:1], claims_cover=True,
                                  label="broken", probe_bases=cover.probe_bases)
        report = sec.verify_cover(broken, seed=0, n=2_000)
        assert report.coverage_fraction < 1.0
        assert not report.coverage_ok
        assert not report.passed

    def test_partial_cover_without_claim_passes(self):
        S1 = geo.sphere(1)
        cover = sec.key_lemma_cover(S1, 2)
        partial = sec.SectionCover(cover.space, cover.k, cover.r,
                                   cover.pieces[:1], claims_cover=False,
                                   label="partial")
        assert sec.verify_cover(partial, seed=0, n=500).passed

    def test_wild_section_fails_continuity_probe(self):
        # continuous but with Lipschitz constant ~10^3, far above the gate
        S1 = geo.sphere(1)

        def wild(base):
            x = base.points[0]
            angle = geo.circle_angle(x)
            partner = geo.circle_point(angle + 1.0 + 0.1 * math.sin(1e4 * angle))
            return geo.configuration(S1, [x, partner])

        bad = sec.LocalSection(S1, 2, 1, lambda b: True, wild, label="wild")
        report = sec.verify_cover(bad, seed=0, n=2_000)
        assert report.max_continuity_ratio is not None
        assert report.max_continuity_ratio > sec.CONTINUITY_RATIO_MAX
        assert not report.passed

    def test_projection_defect_flagged(self):
        S1 = geo.sphere(1)

        def not_a_section(base):
            x = base.points[0]
            shifted = geo.circle_point(geo.circle_angle(x) + 0.01)
            return geo.configuration(S1, [shifted, geo.circle_point(
                geo.circle_angle(x) + math.pi)])

        bad = sec.LocalSection(S1, 2, 1, lambda b: True, not_a_section, label="off")
        report = sec.verify_cover(bad, seed=0, n=200)
        assert report.max_identity_error > sec.IDENTITY_TOL
        assert not report.passed

    def test_report_json_shape(self):
        report = sec.verify_cover(sec.sphere_sigma(1), seed=0, n=200)
        data = report.to_json()
        assert set(data["checks"]) == {"coverage", "identity", "separation",
                                       "continuity"}
        assert data["passed"] is True
        assert len(data["pieces"]) == 1


class TestSectionSelfMapEquivalence:
    def test_global_pair_section_yields_fixed_point_free_map(self):
        # a verified global section of the pair projection, composed with the
        # second-coordinate projection, is a self-map without fixed points
        cases = [
            sec.sphere_sigma(2),
            sec.from_fpf_family([sm.SelfMap(geo.sphere(1), sm.GroupTranslation(
                geo.circle_point(2.0)))]),
        ]
        for section in cases:
            space = section.space
            for x in geo.sample(space, seed=9, n=300):
                base = geo.configuration(space, [x])
                partner = section.mapping(base).points[1]
                assert geo.distance(x, partner) > geo.DELTA_SEP


class TestFppVerdict:
    def test_spheres_lack_fpp(self):
        for d in (1, 2, 3):
            verdict = sec.fpp_verdict(geo.sphere(d))
            assert verdict.fpp == "no"
            assert verdict.sec21 == 1
            assert "antipodal" in (verdict.witness or "")

    def test_rp2_has_fpp_via_axiom(self):
        verdict = sec.fpp_verdict(geo.real_projective(2))
        assert verdict.fpp == "yes"
        assert verdict.sec21 == 2
        assert "axiom" in verdict.provenance

    def test_rp3_lacks_fpp_via_rotation(self):
        verdict = sec.fpp_verdict(geo.real_projective(3))
        assert verdict.fpp == "no"
        assert verdict.sec21 == 1
        assert "rp_odd_rotation" in (verdict.witness or "")

    def test_torus_wedge_discrete(self):
        assert sec.fpp_verdict(geo.torus(2)).fpp == "no"
        assert sec.fpp_verdict(geo.wedge_s2_s1()).fpp == "no"
        assert sec.fpp_verdict(geo.discrete(4)).fpp == "no"

    def test_disc_has_fpp(self):
        verdict = sec.fpp_verdict(geo.disc(3))
        assert verdict.fpp == "yes"
        assert verdict.sec21 == 2

    def test_singleton_inapplicable(self):
        verdict = sec.fpp_verdict(geo.discrete(1))
        assert verdict.fpp == "yes"
        assert math.isinf(verdict.sec21)
        assert not verdict.theorem_applicable
