"""Categories, sieves, posets: axioms and the worked three-object example."""

from __future__ import annotations

import pytest

from finsite.fincat import (
    CategoryError,
    FiniteCategory,
    Poset,
    Sieve,
    all_sieves,
    category_from_json,
    category_to_json,
    downward_closed_subsets,
    empty_sieve,
    is_codirected_poset,
    is_sieve,
    maximal_sieve,
    poset_category,
    pullback_sieve,
    sieve_generated,
    validate_category,
    validate_functor,
)
from finsite.coverage import subspace_functor, zariski_site
from finsite import catalogue

from oracles import powerset_sieves


def one_object_category() -> FiniteCategory:
    return FiniteCategory(
        objects=("*",),
        morphisms={"id": ("*", "*")},
        identities={"*": "id"},
        composition={("id", "id"): "id"},
    )


def chain_category() -> FiniteCategory:
    """The poset 0 -> 1 -> 2 with the composite 0 -> 2."""
    return FiniteCategory(
        objects=("0", "1", "2"),
        morphisms={
            "i0": ("0", "0"),
            "i1": ("1", "1"),
            "i2": ("2", "2"),
            "f01": ("0", "1"),
            "f12": ("1", "2"),
            "f02": ("0", "2"),
        },
        identities={"0": "i0", "1": "i1", "2": "i2"},
        composition={
            ("i0", "i0"): "i0",
            ("i1", "i1"): "i1",
            ("i2", "i2"): "i2",
            ("f01", "i0"): "f01",
            ("i1", "f01"): "f01",
            ("f12", "i1"): "f12",
            ("i2", "f12"): "f12",
            ("f02", "i0"): "f02",
            ("i2", "f02"): "f02",
            ("f12", "f01"): "f02",
        },
    )


def walking_parallel_pair() -> FiniteCategory:
    """Two parallel morphisms a, b: X -> Y; not a poset."""
    return FiniteCategory(
        objects=("X", "Y"),
        morphisms={
            "iX": ("X", "X"),
            "iY": ("Y", "Y"),
            "a": ("X", "Y"),
            "b": ("X", "Y"),
        },
        identities={"X": "iX", "Y": "iY"},
        composition={
            ("iX", "iX"): "iX",
            ("iY", "iY"): "iY",
            ("a", "iX"): "a",
            ("iY", "a"): "a",
            ("b", "iX"): "b",
            ("iY", "b"): "b",
        },
    )


class TestValidateCategory:
    def test_one_object_passes(self):
        assert validate_category(one_object_category()).ok

    def test_missing_composite_is_reported_with_the_pair(self):
        cat = chain_category()
        del cat.composition[("f12", "f01")]
        report = validate_category(cat)
        assert not report.ok
        assert report.axiom == "composition-totality"
        assert report.witness == ("f12", "f01")

    def test_chain_category_passes(self):
        assert validate_category(chain_category()).ok

    def test_parallel_pair_passes(self):
        assert validate_category(walking_parallel_pair()).ok

    def test_wrong_identity_law_detected(self):
        cat = chain_category()
        cat.composition[("i2", "f02")] = "f12"
        report = validate_category(cat)
        assert not report.ok
        assert report.axiom in ("composition-domain", "identity-law")


class TestSieves:
    def test_identity_generates_the_maximal_sieve(self):
        cat = chain_category()
        assert sieve_generated(cat, ["i2"]) == maximal_sieve(cat, "2")

    def test_empty_family_generates_the_empty_sieve(self):
        cat = chain_category()
        assert sieve_generated(cat, [], target="2") == empty_sieve(cat, "2")
        with pytest.raises(CategoryError):
            sieve_generated(cat, [])

    def test_generated_sieve_on_the_chain(self):
        cat = chain_category()
        s = sieve_generated(cat, ["f12"])
        assert s == Sieve("2", frozenset({"f12", "f02"}))
        assert is_sieve(cat, s)

    def test_mixed_targets_rejected(self):
        cat = chain_category()
        with pytest.raises(CategoryError):
            sieve_generated(cat, ["f01", "f02"])

    def test_pullback_of_maximal_is_maximal(self):
        cat = chain_category()
        for h in cat.morphisms:
            tgt = cat.target(h)
            assert pullback_sieve(cat, maximal_sieve(cat, tgt), h) == maximal_sieve(
                cat, cat.source(h)
            )

    def test_pullback_of_empty_is_empty(self):
        cat = chain_category()
        assert pullback_sieve(cat, empty_sieve(cat, "2"), "f12") == empty_sieve(cat, "1")

    def test_pullback_on_the_chain(self):
        cat = chain_category()
        s = Sieve("2", frozenset({"f02"}))
        assert pullback_sieve(cat, s, "f12") == Sieve("1", frozenset({"f01"}))

    def test_generated_is_idempotent(self):
        cat = chain_category()
        for fam in (["f12"], ["f02"], ["i2"], ["f01"]):
            s = sieve_generated(cat, fam)
            again = sieve_generated(cat, sorted(s.members), target=s.target)
            assert again == s

    def test_pullback_composition_law_exhaustively(self):
        # pullback along h then k equals pullback along the composite
        for cat in (chain_category(), walking_parallel_pair(),
                    catalogue.zariski("vee").category):
            for x in cat.objects:
                for members in all_sieves(cat, x):
                    s = Sieve(x, members)
                    for h in cat.hom_into[x]:
                        sh = pullback_sieve(cat, s, h)
                        for k in cat.hom_into[cat.source(h)]:
                            lhs = pullback_sieve(cat, sh, k)
                            rhs = pullback_sieve(cat, s, cat.compose(h, k))
                            assert lhs == rhs

    def test_pullback_of_generated_contains_generated_pullbacks(self):
        site = catalogue.zariski("vee")
        cat = site.category
        fam = ["{e,x}->{e,x,y}", "{e,y}->{e,x,y}"]
        h = "{e,x}->{e,x,y}"
        pulled = pullback_sieve(cat, sieve_generated(cat, fam), h)
        # members of the family meet the source of h inside the poset
        meets = []
        for f in fam:
            meet = site.object_points[cat.source(f)] & site.object_points[cat.source(h)]
            from finsite.coverage import subset_name

            name = subset_name(meet)
            arrows = cat.hom(name, cat.source(h))
            meets.extend(arrows)
        assert sieve_generated(cat, meets, cat.source(h)).members <= pulled.members

    def test_all_sieves_matches_powerset_filter(self):
        for cat in (chain_category(), walking_parallel_pair()):
            for x in cat.objects:
                assert sorted(all_sieves(cat, x), key=sorted) == sorted(
                    powerset_sieves(cat, x), key=sorted
                )


class TestPosets:
    def test_singleton_is_codirected(self):
        assert is_codirected_poset(Poset.from_relations(["a"], []))

    def test_two_incomparable_elements_are_not(self):
        assert not is_codirected_poset(Poset.from_relations(["a", "b"], []))

    def test_chain_is_codirected(self):
        p = Poset.from_relations(["l0", "l1", "l2"], [("l2", "l1"), ("l1", "l0")])
        assert is_codirected_poset(p)
        assert p.bottom() == "l2"

    def test_relations_close_transitively(self):
        p = Poset.from_relations(["a", "b", "c"], [("a", "b"), ("b", "c")])
        assert p.le("a", "c")

    def test_antisymmetry_violation_rejected(self):
        with pytest.raises(CategoryError):
            Poset.from_relations(["a", "b"], [("a", "b"), ("b", "a")])

    def test_poset_category_validates(self):
        p = Poset.from_relations(["a", "b", "c"], [("a", "b"), ("b", "c")])
        cat = poset_category(p)
        assert validate_category(cat).ok
        assert cat.poset_down["c"] == frozenset({"a", "b", "c"})

    def test_downward_closed_subsets_count(self):
        elems = ["a", "b", "c"]
        le = lambda x, y: x == y or (x, y) in {("a", "b"), ("a", "c")}
        downs = downward_closed_subsets(elems, le)
        # down-sets of the fan shape: {}, {a}, {ab}, {ac}, {abc}
        assert sorted(map(sorted, downs)) == [
            [], ["a"], ["a", "b"], ["a", "b", "c"], ["a", "c"]
        ]


class TestFunctors:
    def test_subspace_functor_is_a_functor(self):
        site = catalogue.zariski("crossed_lines")
        u, _ = subspace_functor(site, frozenset({"e", "x", "y"}))
        assert validate_functor(u).ok

    def test_broken_functor_detected(self):
        site = catalogue.zariski("sierpinski")
        u, _ = subspace_functor(site, frozenset({"e"}))
        u.ob_map["{}"] = "{e}"
        assert not validate_functor(u).ok


class TestJson:
    def test_round_trip(self):
        cat = chain_category()
        doc = category_to_json(cat)
        loaded = category_from_json(doc)
        assert validate_category(loaded).ok
        assert loaded.objects == cat.objects
        assert loaded.morphisms == cat.morphisms
        assert loaded.composition == cat.composition

    def test_loader_completes_identity_composites(self):
        doc = {
            "objects": ["0", "1"],
            "morphisms": [
                {"name": "i0", "src": "0", "tgt": "0"},
                {"name": "i1", "src": "1", "tgt": "1"},
                {"name": "f", "src": "0", "tgt": "1"},
            ],
            "identities": {"0": "i0", "1": "i1"},
            "composition": [],
        }
        cat = category_from_json(doc)
        assert validate_category(cat).ok
        assert cat.compose("i1", "f") == "f"

    def test_malformed_document_rejected(self):
        with pytest.raises(CategoryError):
            category_from_json({"objects": ["x"]})
