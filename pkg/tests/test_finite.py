import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from confsec import finite as fin


# -- independent oracles -----------------------------------------------------


def oracle_monotone_selfmaps(P):
    """All monotone self-maps by raw n^n enumeration."""
    out = []
    for values in itertools.product(range(P.n), repeat=P.n):
        if all(P.leq[i, j] <= P.leq[values[i], values[j]]
               for i in range(P.n) for j in range(P.n)):
            out.append(values)
    return out


def oracle_has_fpp(P):
    return all(any(f[i] == i for i in range(P.n))
               for f in oracle_monotone_selfmaps(P))


def oracle_homotopy_classes(P):
    """Components of the comparability graph on all monotone self-maps."""
    maps = oracle_monotone_selfmaps(P)
    index = {f: i for i, f in enumerate(maps)}
    parent = list(range(len(maps)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for f, g in itertools.combinations(maps, 2):
        if all(P.leq[a, b] for a, b in zip(f, g)) or \
           all(P.leq[b, a] for a, b in zip(f, g)):
            ri, rj = find(index[f]), find(index[g])
            if ri != rj:
                parent[ri] = rj
    classes = {}
    for f in maps:
        classes.setdefault(find(index[f]), []).append(f)
    return list(classes.values())


# -- construction and validation ----------------------------------------------


class TestPoset:
    def test_closure_taken_on_load(self):
        P = fin.FinitePoset.from_relations(3, [(0, 1), (1, 2)])
        assert P.less_equal(0, 2)

    def test_cycle_rejected(self):
        with pytest.raises(fin.PosetError):
            fin.FinitePoset.from_relations(2, [(0, 1), (1, 0)])

    def test_bad_matrix_rejected(self):
        leq = np.array([[True, True], [False, False]])
        with pytest.raises(fin.PosetError):
            fin.FinitePoset(leq)

    def test_json_round_trip(self):
        P = fin.FinitePoset.from_relations(4, [(0, 2), (0, 3), (1, 2), (1, 3)])
        Q = fin.FinitePoset.from_json(P.to_json())
        assert P == Q

    def test_up_sets_of_chain(self):
        P = fin.FinitePoset.chain(3)
        assert sorted(P.up_sets()) == [(), (0, 1, 2), (1, 2), (2,)]

    def test_monotone_map_validation(self):
        chain = fin.FinitePoset.chain(2)
        with pytest.raises(fin.PosetError):
            fin.PosetMap(chain, chain, (1, 0))  # decreasing: not monotone
        fin.PosetMap(chain, chain, (0, 1))


class TestHasFpp:
    def test_two_chain_has_fpp(self):
        # oracle first: the 3 monotone self-maps of 0 < 1 all fix a point
        chain = fin.FinitePoset.chain(2)
        maps = oracle_monotone_selfmaps(chain)
        assert sorted(maps) == [(0, 0), (0, 1), (1, 1)]
        assert oracle_has_fpp(chain)
        assert fin.has_fpp(chain).has_fpp

    def test_two_antichain_swap(self):
        anti = fin.FinitePoset.antichain(2)
        result = fin.has_fpp(anti)
        assert not result.has_fpp
        assert result.witness.values == (1, 0)

    def test_four_point_circle_model(self):
        # minimal 0, 1 below maximal 2, 3: the finite model of the circle
        circle = fin.FinitePoset.from_relations(4, [(0, 2), (0, 3), (1, 2), (1, 3)])
        assert not oracle_has_fpp(circle)
        result = fin.has_fpp(circle)
        assert not result.has_fpp
        w = result.witness.values
        assert all(w[i] != i for i in range(4))
        assert w == (1, 0, 3, 2)

    @pytest.mark.parametrize("n", range(1, 6))
    def test_agrees_with_oracle_on_all_small_posets(self, n):
        for P in fin.all_posets(n):
            assert fin.has_fpp(P).has_fpp == oracle_has_fpp(P)

    def test_budget_exhaustion(self):
        P = fin.FinitePoset.antichain(6)
        with pytest.raises(fin.SearchBudgetExceeded):
            fin.has_fpp(P, budget=2)


class TestConfig2:
    def test_two_antichain(self):
        c = fin.config2(fin.FinitePoset.antichain(2))
        assert c.pairs == ((0, 1), (1, 0))
        assert not c.poset.comparable(0, 1)

    def test_two_chain_pairs_incomparable(self):
        c = fin.config2(fin.FinitePoset.chain(2))
        # (0,1) <= (1,0) needs 0<=1 and 1<=0: impossible
        assert not c.poset.comparable(0, 1)

    def test_chain3_order(self):
        c = fin.config2(fin.FinitePoset.chain(3))
        idx = {pair: i for i, pair in enumerate(c.pairs)}
        assert c.poset.less_equal(idx[(0, 1)], idx[(1, 2)])
        # componentwise order: swapped coordinates are never comparable
        assert not c.poset.comparable(idx[(0, 1)], idx[(1, 0)])

    @given(st.integers(2, 5), st.integers(0, 50))
    @settings(max_examples=30, deadline=None)
    def test_size_is_n_squared_minus_n(self, n, pick):
        posets = fin.all_posets(n)
        P = posets[pick % len(posets)]
        assert fin.config2(P).poset.n == n * n - n

    def test_needs_two_points(self):
        with pytest.raises(fin.PosetError):
            fin.config2(fin.FinitePoset.antichain(1))


class TestSecPi21:
    def test_antichain_global_section(self):
        result = fin.sec_pi21(fin.FinitePoset.antichain(2))
        assert result.value == 1
        w = result.witnesses[0]
        assert w.up_set == (0, 1) and w.partner == (1, 0)

    def test_two_chain_is_infinite(self):
        # exhaustive-search oracle: the only open set containing the bottom
        # is the whole chain, and the chain has the FPP, so no piece ever
        # covers the bottom: the value is infinite
        result = fin.sec_pi21(fin.FinitePoset.chain(2))
        assert math.isinf(result.value)
        assert result.status == "infinite"

    @pytest.mark.parametrize("n", range(2, 7))
    def test_discrete_spaces(self, n):
        result = fin.sec_pi21(fin.FinitePoset.antichain(n))
        assert result.value == 1

    def test_singleton_empty_fiber(self):
        result = fin.sec_pi21(fin.FinitePoset.antichain(1))
        assert math.isinf(result.value)
        assert result.status == "empty_fiber"
        assert not result.theorem_applicable

    def test_v_poset_needs_two_pieces(self):
        # two minimal points under one top: it has the FPP (any monotone map
        # moving the top forces a fixed minimal point), while the up-sets
        # {0, 2} and {1, 2} each admit a section; so the value is exactly 2
        V = fin.FinitePoset.from_relations(3, [(0, 2), (1, 2)])
        assert fin.has_fpp(V).has_fpp
        result = fin.sec_pi21(V)
        assert result.value == 2
        covered = set()
        for w in result.witnesses:
            covered.update(w.up_set)
            for x, gx in zip(w.up_set, w.partner):
                assert gx != x
        assert covered == {0, 1, 2}

    def test_witnesses_are_valid_local_sections(self):
        for n in range(2, 6):
            for P in fin.all_posets(n):
                result = fin.sec_pi21(P)
                if result.witnesses is None:
                    continue
                for w in result.witnesses:
                    up = set(w.up_set)
                    # up-set, induced monotone, fixed-point free
                    for x in up:
                        for j in range(P.n):
                            if P.leq[x, j]:
                                assert j in up
                    table = dict(zip(w.up_set, w.partner))
                    for x in up:
                        assert table[x] != x
                        for y in up:
                            if P.leq[x, y]:
                                assert P.leq[table[x], table[y]]

    def test_witness_conversion_both_ways(self):
        anti = fin.FinitePoset.antichain(3)
        result = fin.sec_pi21(anti)
        assert result.value == 1
        f = fin.section_to_selfmap(anti, result.witnesses[0])
        assert all(f.values[i] != i for i in range(3))
        back = fin.selfmap_to_section(f)
        assert back.up_set == (0, 1, 2)


class TestHomotopic:
    def test_reflexive(self):
        chain = fin.FinitePoset.chain(2)
        f = fin.PosetMap(chain, chain, (0, 1))
        assert fin.homotopic(f, f)

    def test_comparable_constants(self):
        chain = fin.FinitePoset.chain(2)
        c0 = fin.PosetMap(chain, chain, (0, 0))
        c1 = fin.PosetMap(chain, chain, (1, 1))
        assert fin.homotopic(c0, c1)

    def test_swap_not_homotopic_to_identity_on_antichain(self):
        anti = fin.FinitePoset.antichain(2)
        swap = fin.PosetMap(anti, anti, (1, 0))
        ident = fin.PosetMap(anti, anti, (0, 1))
        # oracle: on an antichain pointwise comparability is pointwise
        # equality, so homotopy classes are singletons
        assert len(oracle_homotopy_classes(anti)) == 4
        assert not fin.homotopic(swap, ident)

    def test_mismatched_maps_rejected(self):
        chain = fin.FinitePoset.chain(2)
        anti = fin.FinitePoset.antichain(2)
        with pytest.raises(fin.PosetError):
            fin.homotopic(fin.PosetMap(chain, chain, (0, 1)),
                          fin.PosetMap(anti, anti, (0, 1)))

    @pytest.mark.parametrize("n", range(2, 4))
    def test_classes_match_oracle_exhaustively(self, n):
        for P in fin.all_posets(n):
            oracle = {frozenset(cls) for cls in oracle_homotopy_classes(P)}
            for cls in oracle:
                rep = next(iter(cls))
                f = fin.PosetMap(P, P, rep)
                for other_cls in oracle:
                    g = fin.PosetMap(P, P, next(iter(other_cls)))
                    assert fin.homotopic(f, g) == (cls == other_cls)

    def test_classes_match_oracle_spot_check_n4(self):
        for P in fin.all_posets(4)[::5]:
            classes = sorted(oracle_homotopy_classes(P), key=len)
            for cls in classes:
                f = fin.PosetMap(P, P, cls[0])
                assert fin.homotopic(f, fin.PosetMap(P, P, cls[-1]))
            for left, right in zip(classes, classes[1:]):
                f = fin.PosetMap(P, P, left[0])
                g = fin.PosetMap(P, P, right[0])
                assert not fin.homotopic(f, g)


class TestMrBruteforce:
    def test_map_alone_missing_target(self):
        # an antichain self-map is homotopic only to itself; a target outside
        # the image realizes zero roots
        anti = fin.FinitePoset.antichain(3)
        f = fin.PosetMap(anti, anti, (1, 0, 1))
        assert fin.mr_bruteforce(f, 2) == 0
        assert fin.mr_bruteforce(f, 1) == 2

    def test_chain_identity_roots_vanish(self):
        # oracle: the chain is contractible at finite scale, so the identity
        # is homotopic to a constant map and every specific target can be
        # avoided; frozen expected value 0 at both targets
        chain = fin.FinitePoset.chain(2)
        classes = oracle_homotopy_classes(chain)
        assert len(classes) == 1
        ident = fin.PosetMap(chain, chain, (0, 1))
        for a in (0, 1):
            oracle_value = min(sum(1 for v in f if v == a) for f in classes[0])
            assert oracle_value == 0
            assert fin.mr_bruteforce(ident, a) == oracle_value

    def test_lower_bound_trivial(self):
        anti = fin.FinitePoset.antichain(2)
        const = fin.PosetMap(anti, anti, (0, 0))
        assert fin.mr_bruteforce(const, 0) >= 0

    def test_bad_target_rejected(self):
        chain = fin.FinitePoset.chain(2)
        f = fin.PosetMap(chain, chain, (0, 1))
        with pytest.raises(fin.PosetError):
            fin.mr_bruteforce(f, 7)


class TestEnumeration:
    def test_counts_up_to_five(self):
        # the number of posets up to isomorphism: a classical sequence
        assert [len(fin.all_posets(n)) for n in range(1, 6)] == [1, 2, 5, 16, 63]

    def test_pairwise_non_isomorphic_at_n4(self):
        posets = fin.all_posets(4)
        seen = set()
        for P in posets:
            canon = min(
                P.leq[np.ix_(perm, perm)].tobytes()
                for perm in itertools.permutations(range(4))
            )
            assert canon not in seen
            seen.add(canon)


class TestMainTheoremAtFiniteScale:
    @pytest.mark.parametrize("n", range(2, 6))
    def test_sec_one_iff_no_fpp(self, n):
        # needs no separation hypothesis: a global section of the pair
        # projection is exactly a fixed-point-free continuous self-map
        for P in fin.all_posets(n):
            fpp = fin.has_fpp(P)
            result = fin.sec_pi21(P)
            assert (result.value == 1) == (not fpp.has_fpp)
            if result.value == 1:
                f = fin.section_to_selfmap(P, result.witnesses[0])
                assert all(f.values[i] != i for i in range(P.n))
            if not fpp.has_fpp:
                w = fin.selfmap_to_section(fpp.witness)
                assert set(w.up_set) == set(range(P.n))
