"""Matching families, sheafification, morphism tests, site morphisms."""

from __future__ import annotations

import pytest

from finsite import catalogue
from finsite.coverage import subset_name, subspace_functor, zariski_site
from finsite.fincat import CategoryError, Sieve, sieve_generated
from finsite.sheafkit import (
    AbPresheaf,
    SheafMorphism,
    almost_cocontinuity_report,
    check_exactness_along,
    direct_image,
    direct_image_morphism,
    enumerate_morphisms,
    epi_failure_witness,
    equalizer_presheaf,
    identity_morphism,
    is_almost_cocontinuous,
    is_continuous,
    is_epi,
    is_iso,
    is_mono,
    is_sheaf,
    matching_families,
    morphism_bijective,
    morphism_from_json,
    plus_construction,
    preserves_binary_meets,
    product_presheaf,
    sheaf_from_json,
    sheafify,
    sheafify_unit,
    stalk,
    stalk_map,
    terminal_presheaf,
    validate_ab_presheaf,
    validate_morphism,
    validate_presheaf,
)
from finsite.prolocal import stalk_points

from oracles import (
    brute_force_matching_families,
    equalizer_comparison_bijective,
    product_comparison_bijective,
    stalk_realized_sheafification,
    stalkwise_surjective,
)


class TestMatchingFamilies:
    def test_maximal_sieve_bijects_with_sections(self):
        site = catalogue.zariski("vee")
        F = catalogue.constant_presheaf(site, {0, 1})
        for x in site.category.objects:
            members = frozenset(site.category.hom_into[x])
            fams = matching_families(F, Sieve(x, members))
            assert len(fams) == len(F.values[x])

    def test_empty_sieve_has_one_family(self):
        site = catalogue.zariski("vee")
        F = catalogue.constant_presheaf(site, {0, 1})
        assert matching_families(F, Sieve("{}", frozenset())) == ({},)

    def test_sierpinski_generic_sieve_has_two_families(self):
        site = catalogue.zariski("sierpinski")
        F = catalogue.constant_presheaf(site, {0, 1})
        s = sieve_generated(site.category, ["{e}->{e,s}"])
        fams = matching_families(F, s)
        assert len(fams) == 2

    def test_matches_brute_force(self):
        site = catalogue.zariski("vee")
        F = catalogue.constant_presheaf(site, {0, 1})
        for x in site.category.objects:
            for members in site.topology.covering[x]:
                fast = matching_families(F, Sieve(x, members))
                slow = brute_force_matching_families(F, site.category, members)
                assert sorted(map(repr, fast)) == sorted(map(repr, slow))


class TestSheafification:
    def sites(self):
        return [catalogue.zariski(n) for n in ("sierpinski", "vee", "crossed_lines")]

    def test_unit_is_iso_for_a_sheaf(self):
        for site in self.sites():
            F = catalogue.skyscraper(site, sorted(site.space.points)[0], {0, 1})
            if not is_sheaf(F, site.topology):
                continue
            assert morphism_bijective(sheafify_unit(F, site.topology))

    def test_junk_at_the_empty_open_is_squashed(self):
        site = catalogue.zariski("sierpinski")
        F = catalogue.constant_presheaf(site, {0, 1})
        assert len(F.values["{}"]) == 2
        sF = sheafify(F, site.topology)
        assert len(sF.values["{}"]) == 1
        assert is_sheaf(sF, site.topology)

    def test_modified_top_value_regrown_as_pairs(self):
        site = catalogue.zariski("vee")
        F = catalogue.modified_constant_presheaf(site)
        sF = sheafify(F, site.topology)
        assert len(sF.values["{e,x,y}"]) == 2
        assert is_sheaf(sF, site.topology)

    def test_everything_is_a_sheaf_for_the_minimal_topology(self):
        from finsite.coverage import minimal_topology

        site = catalogue.zariski("vee")
        t = minimal_topology(site.category)
        F = catalogue.modified_constant_presheaf(site)
        assert is_sheaf(F, t)

    def test_sheafify_output_is_a_sheaf_and_unit_detects_sheaves(self):
        for site in self.sites():
            presheaves = [
                catalogue.constant_presheaf(site, {0, 1}),
                catalogue.modified_constant_presheaf(site),
                site.representable_presheaf(site.category.objects[-1]),
                terminal_presheaf(site.category),
            ]
            for F in presheaves:
                assert validate_presheaf(F).ok
                sF = sheafify(F, site.topology)
                assert is_sheaf(sF, site.topology)
                assert validate_presheaf(sF).ok
                unit = sheafify_unit(F, site.topology)
                assert validate_morphism(unit).ok
                assert morphism_bijective(unit) == is_sheaf(F, site.topology)

    def test_sheafify_matches_stalk_realization_oracle(self):
        for name in ("sierpinski", "vee", "crossed_lines"):
            site = catalogue.zariski(name)
            spc = site.space
            for F in (
                catalogue.constant_presheaf(site, {0, 1}),
                catalogue.modified_constant_presheaf(site),
            ):
                sF = sheafify(F, site.topology)
                expected = stalk_realized_sheafification(spc, site, F)
                for x in site.category.objects:
                    assert len(sF.values[x]) == len(expected[x])

    def test_plus_twice_is_idempotent_up_to_iso(self):
        site = catalogue.zariski("vee")
        F = catalogue.modified_constant_presheaf(site)
        sF = sheafify(F, site.topology)
        again = sheafify_unit(sF, site.topology)
        assert morphism_bijective(again)

    def test_preserves_binary_products(self):
        site = catalogue.zariski("vee")
        F = catalogue.constant_presheaf(site, {0, 1})
        G = catalogue.modified_constant_presheaf(site)
        assert product_comparison_bijective(F, G, site.topology)

    def test_preserves_equalizers(self):
        site = catalogue.zariski("sierpinski")
        F = catalogue.constant_presheaf(site, {0, 1})
        morphisms = enumerate_morphisms(F, F)
        assert len(morphisms) >= 2
        m1, m2 = morphisms[0], morphisms[1]
        assert equalizer_comparison_bijective(m1, m2, site.topology)


class TestMorphismClasses:
    def test_identity_is_iso(self):
        site = catalogue.zariski("vee")
        F = catalogue.skyscraper(site, "x", {0, 1})
        assert is_iso(identity_morphism(F), site.topology)

    def test_proper_subsheaf_is_mono_not_epi(self):
        site = catalogue.zariski("sierpinski")
        G = catalogue.skyscraper(site, "s", {0, 1})
        sub = terminal_presheaf(site.category)
        m = SheafMorphism(
            sub, G, {x: {"*": sorted(G.values[x], key=repr)[0]}
                     for x in site.category.objects}
        )
        assert validate_morphism(m).ok
        assert is_mono(m, site.topology)
        assert not is_epi(m, site.topology)

    def test_epi_without_section_surjectivity_on_the_fan(self):
        # stalk-surjective but not surjective on sections over the fan
        site = catalogue.zariski("vee")
        spc = site.space
        F = catalogue.make_ab_sheaf(
            spc, site,
            {"e": (2, 2), "x": (2,), "y": (2,)},
            {("x", "e"): ((1,), (0,)), ("y", "e"): ((0,), (1,))},
        )
        G = catalogue.make_ab_sheaf(
            spc, site,
            {"e": (2,), "x": (2,), "y": (2,)},
            {("x", "e"): ((1,),), ("y", "e"): ((1,),)},
        )
        maps = {
            "e": {v: ((v[0] + v[1]) % 2,) for v in catalogue.group_elements((2, 2))},
            "x": {v: v for v in catalogue.group_elements((2,))},
            "y": {v: v for v in catalogue.group_elements((2,))},
        }
        m = catalogue.realize_ab_morphism(F, G, maps)
        assert validate_morphism(m).ok
        top = "{e,x,y}"
        images = {m.at(top, a) for a in m.source.values[top]}
        assert images < m.target.values[top]
        assert is_epi(m, site.topology)
        assert not is_mono(m, site.topology)

    def test_epi_agrees_with_stalkwise_surjectivity_on_sheaves(self):
        site = catalogue.zariski("vee")
        spc = site.space
        sheaves = [F for _, F in catalogue.small_set_sheaves("vee")]
        for F in sheaves[:4]:
            for G in sheaves[:4]:
                for m in enumerate_morphisms(F, G)[:6]:
                    assert is_epi(m, site.topology, check=False) == stalkwise_surjective(
                        m, site, spc
                    )

    def test_non_sheaf_inputs_rejected(self):
        site = catalogue.zariski("sierpinski")
        F = catalogue.constant_presheaf(site, {0, 1})
        with pytest.raises(CategoryError):
            is_mono(identity_morphism(F), site.topology)


class TestSiteMorphisms:
    def test_identity_functor_is_continuous_and_almost_cocontinuous(self):
        from finsite.fincat import FunctorData

        site = catalogue.zariski("vee")
        cat = site.category
        u = FunctorData(cat, cat, {x: x for x in cat.objects},
                        {f: f for f in cat.morphisms})
        assert is_continuous(u, site.topology, site.topology, site)
        assert is_almost_cocontinuous(u, site.topology, site.topology)

    def test_closed_subspace_functor_continuous(self):
        site = catalogue.zariski("crossed_lines")
        u, sub = subspace_functor(site, frozenset({"x", "y", "c"}))
        assert preserves_binary_meets(u)
        assert is_continuous(u, site.topology, sub.topology, site)
        assert is_almost_cocontinuous(u, site.topology, sub.topology)

    def test_empty_clause_fires_exactly_on_opens_missing_the_subspace(self):
        site = catalogue.zariski("sierpinski")
        u, sub = subspace_functor(site, frozenset({"s"}))
        ok, witness, empty_uses = almost_cocontinuity_report(
            u, site.topology, sub.topology
        )
        assert ok and witness is None
        assert empty_uses >= 1

    def test_collapsing_functor_not_continuous(self):
        from finsite.fincat import FunctorData

        site = catalogue.zariski("sierpinski")
        cat = site.category
        # send the empty open to {e}: the empty family stops covering
        ob_map = {"{}": "{e}", "{e}": "{e}", "{e,s}": "{e,s}"}
        mor_map = {}
        for f, (a, b) in cat.morphisms.items():
            mor_map[f] = cat.hom(ob_map[a], ob_map[b])[0]
        u = FunctorData(cat, cat, ob_map, mor_map)
        assert not is_continuous(u, site.topology, site.topology, site)

    def test_open_subspace_functor_not_almost_cocontinuous(self):
        site = catalogue.zariski("crossed_lines")
        u, sub = subspace_functor(site, frozenset({"e", "x", "y"}))
        assert is_continuous(u, site.topology, sub.topology, site)
        ok, witness, _ = almost_cocontinuity_report(u, site.topology, sub.topology)
        assert not ok and witness is not None


class TestDirectImage:
    def test_identity_pushforward_is_identity(self):
        from finsite.fincat import FunctorData

        site = catalogue.zariski("vee")
        cat = site.category
        u = FunctorData(cat, cat, {x: x for x in cat.objects},
                        {f: f for f in cat.morphisms})
        F = catalogue.skyscraper(site, "x", {0, 1})
        assert direct_image(u, F, site.topology, site.topology).values == F.values

    def test_constant_sheaf_through_a_closed_subspace(self):
        site = catalogue.zariski("crossed_lines")
        z = frozenset({"x", "c"})
        u, sub = subspace_functor(site, z)
        spc_sub = site.space.subspace(z)
        const = catalogue.realize_stalk_sheaf(
            spc_sub, sub,
            {p: (0, 1) for p in spc_sub.points},
            {(q, p): {0: 0, 1: 1} for q, p in catalogue._comap_pairs(spc_sub)},
        )
        pushed = direct_image(u, const, site.topology, sub.topology, site)
        assert is_sheaf(pushed, site.topology)
        # sections: two on opens meeting the subspace, one elsewhere
        for x in site.category.objects:
            meets = site.object_points[x] & z
            assert len(pushed.values[x]) == (2 if meets else 1)

    def test_skyscraper_pushes_to_skyscraper(self):
        site = catalogue.zariski("crossed_lines")
        z = frozenset({"x", "c"})
        u, sub = subspace_functor(site, z)
        sky = catalogue.skyscraper(sub, "c", {0, 1})
        assert is_sheaf(sky, sub.topology)
        pushed = direct_image(u, sky, site.topology, sub.topology, site)
        expected = catalogue.skyscraper(site, "c", {0, 1})
        for x in site.category.objects:
            assert len(pushed.values[x]) == len(expected.values[x])

    def test_non_continuous_functor_rejected(self):
        from finsite.fincat import FunctorData

        site = catalogue.zariski("sierpinski")
        cat = site.category
        ob_map = {"{}": "{e}", "{e}": "{e}", "{e,s}": "{e,s}"}
        mor_map = {
            f: cat.hom(ob_map[a], ob_map[b])[0] for f, (a, b) in cat.morphisms.items()
        }
        u = FunctorData(cat, cat, ob_map, mor_map)
        F = catalogue.skyscraper(site, "s", {0, 1})
        with pytest.raises(CategoryError):
            direct_image(u, F, site.topology, site.topology, site)

    def test_pushforward_preserves_monos_and_products(self):
        site = catalogue.zariski("crossed_lines")
        z = frozenset({"x", "c"})
        u, sub = subspace_functor(site, z)
        F = catalogue.skyscraper(sub, "c", {0, 1})
        G = catalogue.skyscraper(sub, "c", {0, 1, 2})
        monos = [m for m in enumerate_morphisms(F, G) if is_mono(m, sub.topology)]
        assert monos
        for m in monos[:3]:
            FF = direct_image(u, m.source, site.topology, sub.topology, check=False)
            GG = direct_image(u, m.target, site.topology, sub.topology, check=False)
            assert is_mono(direct_image_morphism(u, m, FF, GG), site.topology)
        P, _, _ = product_presheaf(F, G)
        pushedP = direct_image(u, P, site.topology, sub.topology, check=False)
        PF = direct_image(u, F, site.topology, sub.topology, check=False)
        PG = direct_image(u, G, site.topology, sub.topology, check=False)
        Q, _, _ = product_presheaf(PF, PG)
        for x in site.category.objects:
            assert len(pushedP.values[x]) == len(Q.values[x])


class TestStalks:
    def test_constant_sheaf_stalks(self):
        site = catalogue.zariski("vee")
        spc = site.space
        const = catalogue.realize_stalk_sheaf(
            spc, site,
            {p: (0, 1) for p in spc.points},
            {pair: {0: 0, 1: 1} for pair in catalogue._comap_pairs(spc)},
        )
        for p in spc.points:
            assert len(stalk(const, site, p)) == 2

    def test_skyscraper_stalks(self):
        site = catalogue.zariski("vee")
        sky = catalogue.skyscraper(site, "x", {0, 1, 2})
        assert len(stalk(sky, site, "x")) == 3
        assert len(stalk(sky, site, "e")) == 1
        assert len(stalk(sky, site, "y")) == 1

    def test_structure_like_sheaf_on_sierpinski(self):
        site = catalogue.zariski("sierpinski")
        ab = catalogue.structure_like_sierpinski()
        assert validate_ab_presheaf(ab).ok
        F = ab.to_set_presheaf()
        assert is_sheaf(F, site.topology)
        assert len(stalk(F, site, "e")) == 4
        assert len(stalk(F, site, "s")) == 2

    def test_iso_iff_stalkwise_bijective(self):
        site = catalogue.zariski("vee")
        spc = site.space
        sheaves = [F for _, F in catalogue.small_set_sheaves("vee")][:5]
        for F in sheaves:
            for G in sheaves:
                for m in enumerate_morphisms(F, G)[:5]:
                    stalks_ok = all(
                        len(set(stalk_map(m, site, p).values()))
                        == len(stalk_map(m, site, p))
                        and set(stalk_map(m, site, p).values())
                        == set(stalk(m.target, site, p))
                        for p in spc.points
                    )
                    assert is_iso(m, site.topology, check=False) == stalks_ok


class TestExactness:
    def test_identity_preserves_epis(self):
        from finsite.fincat import FunctorData

        site = catalogue.zariski("vee")
        cat = site.category
        u = FunctorData(cat, cat, {x: x for x in cat.objects},
                        {f: f for f in cat.morphisms})
        F = catalogue.skyscraper(site, "x", {0, 1})
        report = check_exactness_along(
            u, [("id", identity_morphism(F))], site.topology, site.topology, site
        )
        assert report.all_preserved

    def test_closed_pushforward_preserves_sampled_epis(self):
        import random

        site = catalogue.zariski("crossed_lines")
        spc = site.space
        z = frozenset({"x", "y", "c"})
        u, sub = subspace_functor(site, z)
        subspace = spc.subspace(z)
        rng = random.Random(7)
        from finsite.scenarios import _sample_epis_on

        epis, _ = _sample_epis_on(subspace, sub, rng, 25)
        assert len(epis) >= 10
        report = check_exactness_along(u, epis, site.topology, sub.topology, site)
        assert report.all_preserved

    def test_open_pushforward_counterexample_has_a_witness(self):
        site = catalogue.zariski("crossed_lines")
        w = frozenset({"e", "x", "y"})
        u, sub = subspace_functor(site, w)
        spc_sub = site.space.subspace(w)
        F = catalogue.make_ab_sheaf(
            spc_sub, sub,
            {"e": (2, 2), "x": (2,), "y": (2,)},
            {("x", "e"): ((1,), (0,)), ("y", "e"): ((0,), (1,))},
        )
        G = catalogue.make_ab_sheaf(
            spc_sub, sub,
            {"e": (2,), "x": (2,), "y": (2,)},
            {("x", "e"): ((1,),), ("y", "e"): ((1,),)},
        )
        maps = {
            "e": {v: ((v[0] + v[1]) % 2,) for v in catalogue.group_elements((2, 2))},
            "x": {v: v for v in catalogue.group_elements((2,))},
            "y": {v: v for v in catalogue.group_elements((2,))},
        }
        m = catalogue.realize_ab_morphism(F, G, maps)
        report = check_exactness_along(
            u, [("twisted", m)], site.topology, sub.topology, site
        )
        assert not report.all_preserved
        entry = report.entries[0]
        assert entry.witness is not None
        # the failure shows on the whole space, at the diagonal section
        assert entry.witness[0] == subset_name(site.space.points)


class TestJsonInterfaces:
    def test_sheaf_document_round_trip(self):
        site = catalogue.zariski("sierpinski")
        doc = {
            "values": {"{}": ["*"], "{e}": [0, 1], "{e,s}": [0, 1]},
            "restrictions": {
                "{}->{e}": {"0": "*", "1": "*"},
                "{}->{e,s}": {"0": "*", "1": "*"},
                "{e}->{e,s}": {"0": 0, "1": 1},
            },
        }
        # json keys are strings: integer elements come back as given in values
        loaded = sheaf_from_json(site.category, doc)
        assert loaded.values["{e}"] == frozenset({0, 1})

    def test_ab_document(self):
        site = catalogue.zariski("sierpinski")
        doc = {
            "values": {
                "{}": {"cyclic_orders": []},
                "{e}": {"cyclic_orders": [4]},
                "{e,s}": {"cyclic_orders": [2]},
            },
            "restrictions": {
                "{}->{e}": [],
                "{}->{e,s}": [],
                "{e}->{e,s}": [[2]],
            },
        }
        ab = sheaf_from_json(site.category, doc)
        assert isinstance(ab, AbPresheaf)
        assert validate_ab_presheaf(ab).ok

    def test_morphism_document(self):
        site = catalogue.zariski("sierpinski")
        F = catalogue.skyscraper(site, "s", {0, 1})
        # json object keys arrive as strings; the loader matches them back
        doc = {"components": {x: {str(a): a for a in F.values[x]}
                              for x in site.category.objects}}
        m = morphism_from_json(F, F, doc)
        assert validate_morphism(m).ok
        assert morphism_bijective(m)
