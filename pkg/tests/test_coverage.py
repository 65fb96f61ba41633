"""Topology generation, joins, covering tests, and finite-space sites."""

from __future__ import annotations

import pytest

from finsite import catalogue
from finsite.coverage import (
    FiniteSpace,
    Pretopology,
    closed_cover_site,
    generate_topology,
    is_covering,
    join_topologies,
    minimal_topology,
    refines,
    space_from_json,
    space_to_json,
    subset_name,
    topology_axiom_report,
    zariski_site,
)
from finsite.fincat import CategoryError, all_sieves, poset_category, Poset

from oracles import brute_force_saturation, union_covers


class TestGenerateTopology:
    def test_empty_pretopology_gives_only_maximal_sieves(self):
        cat = catalogue.zariski("sierpinski").category
        t = minimal_topology(cat)
        for x in cat.objects:
            assert t.covering[x] == frozenset({frozenset(cat.hom_into[x])})

    def test_empty_family_makes_every_sieve_covering(self):
        # the empty family covers the empty open, so every sieve there covers
        site = catalogue.zariski("sierpinski")
        for members in all_sieves(site.category, "{}"):
            assert members in site.topology.covering["{}"]

    def test_sierpinski_matches_brute_force_oracle(self):
        site = catalogue.zariski("sierpinski")
        expected = brute_force_saturation(
            site.category,
            {x: site.pretopology.on(x) for x in site.category.objects},
        )
        assert {x: site.topology.covering[x] for x in site.category.objects} == expected

    def test_vee_matches_brute_force_oracle(self):
        site = catalogue.zariski("vee")
        expected = brute_force_saturation(
            site.category,
            {x: site.pretopology.on(x) for x in site.category.objects},
        )
        assert {x: site.topology.covering[x] for x in site.category.objects} == expected

    def test_generic_path_agrees_with_poset_path(self):
        site = catalogue.zariski("vee")
        cat = site.category
        # rebuild the same category without the poset marker
        from finsite.fincat import FiniteCategory

        generic = FiniteCategory(
            cat.objects, dict(cat.morphisms), dict(cat.identities),
            dict(cat.composition),
        )
        t = generate_topology(generic, site.pretopology)
        assert {x: t.covering[x] for x in cat.objects} == {
            x: site.topology.covering[x] for x in cat.objects
        }

    def test_axioms_hold(self):
        for name in ("sierpinski", "vee", "discrete2", "crossed_lines"):
            assert topology_axiom_report(catalogue.zariski(name).topology).ok
            assert topology_axiom_report(catalogue.closed_site(name).topology).ok

    def test_axiom_checker_catches_corruption(self):
        site = zariski_site(catalogue.space("vee"))
        t = site.topology
        top = "{e,x,y}"
        # declaring a single proper open to cover the fan breaks stability
        from finsite.fincat import sieve_generated

        bogus = sieve_generated(site.category, ["{e,x}->{e,x,y}"]).members
        t.covering[top] = t.covering[top] | {bogus}
        t.object_covering = None
        t._caches.clear()
        report = topology_axiom_report(t)
        assert not report.ok
        assert report.axiom in ("stability", "local-character")

    def test_monotone_in_the_pretopology(self):
        spc = catalogue.space("vee")
        site = zariski_site(spc)
        smaller = Pretopology({
            x: fams for x, fams in site.pretopology.families.items() if x == "{}"
        })
        t_small = generate_topology(site.category, smaller)
        for x in site.category.objects:
            assert t_small.covering[x] <= site.topology.covering[x]


class TestJoin:
    def test_join_with_minimal_is_identity(self):
        site = catalogue.zariski("sierpinski")
        t = site.topology
        assert join_topologies(t, minimal_topology(site.category)) == t

    def test_join_idempotent(self):
        t = catalogue.zariski("vee").topology
        assert join_topologies(t, t) == t

    def test_join_of_open_and_closed_pretopologies_matches_oracle(self):
        cat, pre_open, pre_closed = catalogue.subsets_site_with_pretopologies("vee")
        t_open = generate_topology(cat, pre_open)
        t_closed = generate_topology(cat, pre_closed)
        joined = join_topologies(t_open, t_closed)
        union_families = {
            x: tuple(set(pre_open.on(x)) | set(pre_closed.on(x)))
            for x in cat.objects
        }
        expected = brute_force_saturation(cat, union_families)
        assert {x: joined.covering[x] for x in cat.objects} == expected

    def test_join_rejects_different_categories(self):
        t1 = catalogue.zariski("vee").topology
        t2 = catalogue.zariski("sierpinski").topology
        with pytest.raises(CategoryError):
            join_topologies(t1, t2)


class TestIsCovering:
    def test_identity_covers(self):
        site = catalogue.zariski("vee")
        assert is_covering(site.topology, ["{e,x,y}->{e,x,y}"])

    def test_empty_family_on_a_nonempty_object_does_not_cover(self):
        site = catalogue.zariski("vee")
        assert not is_covering(site.topology, [], target="{e}")
        assert is_covering(site.topology, [], target="{}")

    def test_two_opens_cover_the_fan(self):
        site = catalogue.zariski("vee")
        assert is_covering(
            site.topology, ["{e,x}->{e,x,y}", "{e,y}->{e,x,y}"]
        )

    def test_generic_and_fast_paths_agree(self):
        site = catalogue.zariski("vee")
        t = site.topology
        for target in site.category.objects:
            for fam in catalogue.families_into(site, target):
                fast = is_covering(t, fam, target)
                from finsite.fincat import sieve_generated

                slow = sieve_generated(site.category, fam, target).members in t.covering[target]
                assert fast == slow


class TestRefines:
    def test_reflexive(self):
        site = catalogue.zariski("vee")
        fam = ("{e,x}->{e,x,y}", "{e,y}->{e,x,y}")
        assert refines(site.category, fam, fam)

    def test_identity_does_not_refine_a_proper_family(self):
        site = catalogue.zariski("vee")
        assert not refines(
            site.category, ["{e,x,y}->{e,x,y}"], ["{e,x}->{e,x,y}"]
        )

    def test_intersection_refines_the_pair(self):
        site = catalogue.zariski("vee")
        # {e} = Ux meet Uy factors through both members
        assert refines(
            site.category,
            ["{e}->{e,x,y}"],
            ["{e,x}->{e,x,y}", "{e,y}->{e,x,y}"],
        )

    def test_refinement_by_a_covering_family_implies_covering(self):
        for name in ("sierpinski", "vee", "discrete2"):
            site = catalogue.zariski(name)
            t = site.topology
            for target in site.category.objects:
                fams = list(catalogue.families_into(site, target, max_size=3))
                covering_fams = [f for f in fams if f and is_covering(t, f, target)]
                for b in covering_fams:
                    for a in fams:
                        if a and refines(site.category, b, a):
                            assert is_covering(t, a, target)


class TestFiniteSpace:
    def test_opens_of_sierpinski(self):
        spc = catalogue.space("sierpinski")
        assert [subset_name(o) for o in spc.opens()] == ["{}", "{e}", "{e,s}"]

    def test_minimal_opens(self):
        spc = catalogue.space("vee")
        assert spc.minimal_open("x") == frozenset({"e", "x"})
        assert spc.minimal_open("e") == frozenset({"e"})

    def test_t0_violation_rejected(self):
        with pytest.raises(CategoryError):
            FiniteSpace.from_specializations(["a", "b"], [("a", "b"), ("b", "a")])

    def test_irreducibility(self):
        assert catalogue.space("vee").is_irreducible()
        assert catalogue.space("chain5").is_irreducible()
        assert not catalogue.space("discrete2").is_irreducible()
        assert not catalogue.space("two_components").is_irreducible()

    def test_components(self):
        spc = catalogue.space("two_components")
        comps = spc.components_of(frozenset(spc.points))
        assert sorted(map(sorted, comps)) == [["e1", "x1"], ["e2", "x2"]]

    def test_subspace_of_crossed_lines_is_the_fan(self):
        spc = catalogue.space("crossed_lines")
        sub = spc.subspace({"e", "x", "y"})
        assert sub.is_irreducible()
        assert sub.minimal_open("x") == frozenset({"e", "x"})

    def test_json_round_trip(self):
        spc = catalogue.space("crossed_lines")
        doc = space_to_json(spc)
        again = space_from_json(doc)
        assert again.points == spc.points
        assert again.closure == spc.closure


class TestSpaceSites:
    def test_point_space(self):
        site = zariski_site(catalogue.space("point"))
        assert site.category.objects == ("{}", "{p}")
        assert is_covering(site.topology, ["{p}->{p}"])

    def test_sierpinski_generic_open_misses_the_closed_point(self):
        site = catalogue.zariski("sierpinski")
        assert not is_covering(site.topology, ["{e}->{e,s}"])

    def test_zariski_covering_iff_union_exhaustive(self):
        for name in ("point", "sierpinski", "vee", "discrete2", "crossed_lines"):
            site = catalogue.zariski(name)
            for target in site.category.objects:
                for fam in catalogue.families_into(site, target):
                    assert is_covering(site.topology, fam, target) == union_covers(
                        site, fam, target
                    )

    def test_closed_cover_of_irreducible_space_needs_the_whole(self):
        site = catalogue.closed_site("vee")
        whole = subset_name(catalogue.space("vee").points)
        for target in [whole]:
            for fam in catalogue.families_into(site, target):
                covering = is_covering(site.topology, fam, target)
                touches_whole = any(
                    site.category.source(f) == whole for f in fam
                )
                assert covering == touches_whole

    def test_discrete_two_closed_points_cover(self):
        site = catalogue.closed_site("discrete2")
        assert is_covering(site.topology, ["{a}->{a,b}", "{b}->{a,b}"])

    def test_empty_family_covers_the_empty_closed_set(self):
        site = catalogue.closed_site("vee")
        assert is_covering(site.topology, [], target="{}")

    def test_closed_covering_iff_union(self):
        for name in ("sierpinski", "vee", "discrete2", "crossed_lines"):
            site = catalogue.closed_site(name)
            for target in site.category.objects:
                for fam in catalogue.families_into(site, target, max_size=3):
                    assert is_covering(site.topology, fam, target) == union_covers(
                        site, fam, target
                    )
