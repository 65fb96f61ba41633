"""Presheaves and sheaves of finite sets on finite sites.

Includes the matching-family engine, sheafification by the plus construction
applied twice, epi/mono/iso tests at sheaf level, continuity and almost
cocontinuity of site morphisms, direct images, stalks on finite-space sites,
and an exactness checker for pushforwards.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .fincat import CategoryError, CategoryReport, FiniteCategory, FunctorData, Sieve
from .coverage import Site, Topology, is_covering, refines


def _sort_key(value):
    return repr(value)


@dataclass(eq=False)
class SetPresheaf:
    """A contravariant assignment of finite sets with restriction functions.

    ``restrictions[f]`` maps sections over the target of ``f`` to sections
    over its source.
    """

    category: FiniteCategory
    values: dict[str, frozenset]
    restrictions: dict[str, dict]
    _caches: dict = field(default_factory=dict, repr=False, compare=False)

    def value(self, x: str) -> frozenset:
        return self.values[x]

    def restrict(self, f: str, a):
        return self.restrictions[f][a]


def validate_presheaf(F: SetPresheaf) -> CategoryReport:
    cat = F.category
    for x in cat.objects:
        if x not in F.values:
            return CategoryReport(False, "presheaf-values", (x,))
    for f in sorted(cat.morphisms):
        src, tgt = cat.morphisms[f]
        table = F.restrictions.get(f)
        if table is None or set(table) != set(F.values[tgt]):
            return CategoryReport(False, "restriction-domain", (f,))
        if not set(table.values()) <= set(F.values[src]):
            return CategoryReport(False, "restriction-codomain", (f,))
    for x in cat.objects:
        i = cat.identities[x]
        for a in F.values[x]:
            if F.restrict(i, a) != a:
                return CategoryReport(False, "identity-restriction", (x, a))
    for (g, f), h in sorted(cat.composition.items()):
        for a in F.values[cat.target(g)]:
            if F.restrict(h, a) != F.restrict(f, F.restrict(g, a)):
                return CategoryReport(False, "functoriality", (g, f, a))
    return CategoryReport(True)


def presheaf_equal(F: SetPresheaf, G: SetPresheaf) -> bool:
    return F.values == G.values and F.restrictions == G.restrictions


@dataclass(eq=False)
class SheafMorphism:
    """A natural transformation between presheaves on one site."""

    source: SetPresheaf
    target: SetPresheaf
    components: dict[str, dict]

    def at(self, x: str, a):
        return self.components[x][a]


def validate_morphism(m: SheafMorphism) -> CategoryReport:
    cat = m.source.category
    for x in cat.objects:
        comp = m.components.get(x)
        if comp is None or set(comp) != set(m.source.values[x]):
            return CategoryReport(False, "component-domain", (x,))
        if not set(comp.values()) <= set(m.target.values[x]):
            return CategoryReport(False, "component-codomain", (x,))
    for f in sorted(cat.morphisms):
        src, tgt = cat.morphisms[f]
        for a in m.source.values[tgt]:
            if m.at(src, m.source.restrict(f, a)) != m.target.restrict(f, m.at(tgt, a)):
                return CategoryReport(False, "naturality", (f, a))
    return CategoryReport(True)


def identity_morphism(F: SetPresheaf) -> SheafMorphism:
    return SheafMorphism(F, F, {x: {a: a for a in F.values[x]} for x in F.category.objects})


def compose_morphisms(m2: SheafMorphism, m1: SheafMorphism) -> SheafMorphism:
    return SheafMorphism(
        m1.source,
        m2.target,
        {
            x: {a: m2.at(x, m1.at(x, a)) for a in m1.source.values[x]}
            for x in m1.source.category.objects
        },
    )


def morphism_bijective(m: SheafMorphism) -> bool:
    """Objectwise bijectivity; this is isomorphism at presheaf level."""
    for x in m.source.category.objects:
        comp = m.components[x]
        if len(set(comp.values())) != len(comp) or len(comp) != len(m.target.values[x]):
            return False
    return True


def terminal_presheaf(cat: FiniteCategory) -> SetPresheaf:
    values = {x: frozenset({"*"}) for x in cat.objects}
    restrictions = {f: {"*": "*"} for f in cat.morphisms}
    return SetPresheaf(cat, values, restrictions)


def product_presheaf(F: SetPresheaf, G: SetPresheaf):
    """Objectwise product with its two projections."""
    cat = F.category
    values = {
        x: frozenset((a, b) for a in F.values[x] for b in G.values[x])
        for x in cat.objects
    }
    restrictions = {
        f: {
            (a, b): (F.restrict(f, a), G.restrict(f, b))
            for (a, b) in values[cat.target(f)]
        }
        for f in cat.morphisms
    }
    P = SetPresheaf(cat, values, restrictions)
    p1 = SheafMorphism(P, F, {x: {ab: ab[0] for ab in values[x]} for x in cat.objects})
    p2 = SheafMorphism(P, G, {x: {ab: ab[1] for ab in values[x]} for x in cat.objects})
    return P, p1, p2


def equalizer_presheaf(m1: SheafMorphism, m2: SheafMorphism):
    """Objectwise equalizer of a parallel pair, with its inclusion."""
    if m1.source is not m2.source or m1.target is not m2.target:
        if m1.source.values != m2.source.values or m1.target.values != m2.target.values:
            raise CategoryError("equalizer needs a parallel pair")
    F = m1.source
    cat = F.category
    values = {
        x: frozenset(a for a in F.values[x] if m1.at(x, a) == m2.at(x, a))
        for x in cat.objects
    }
    restrictions = {
        f: {a: F.restrict(f, a) for a in values[cat.target(f)]}
        for f in cat.morphisms
    }
    E = SetPresheaf(cat, values, restrictions)
    inc = SheafMorphism(E, F, {x: {a: a for a in values[x]} for x in cat.objects})
    return E, inc


# ---------------------------------------------------------------------------
# matching families and sheafification


def _ordered_members(cat: FiniteCategory, members) -> list[str]:
    # factors-through-later-first so assignments get forced early
    members = sorted(members)
    below = {
        g: frozenset(cat.compose(g, h) for h in cat.hom_into[cat.source(g)])
        for g in members
    }
    height = {g: sum(1 for f in members if f in below[g]) for g in members}
    return sorted(members, key=lambda g: (-height[g], g))


def matching_families(F: SetPresheaf, s: Sieve) -> tuple[dict, ...]:
    """All assignments ``f -> x_f`` over the sieve compatible with restriction.

    Compatibility means ``x_{f∘g} = F(g)(x_f)`` for every member ``f`` and
    every ``g`` into its source.
    """
    cat = F.category
    members = _ordered_members(cat, s.members)
    index = {f: i for i, f in enumerate(members)}
    constraints: list[list[tuple[int, str, int]]] = [[] for _ in members]
    for f in members:
        for g in cat.hom_into[cat.source(f)]:
            fg = cat.compose(f, g)
            i, j = index[f], index[fg]
            constraints[max(i, j)].append((i, g, j))
    results: list[dict] = []
    assign: list = [None] * len(members)

    def consistent(k: int) -> bool:
        for i, g, j in constraints[k]:
            if F.restrict(g, assign[i]) != assign[j]:
                return False
        return True

    def walk(k: int) -> None:
        if k == len(members):
            results.append({members[i]: assign[i] for i in range(len(members))})
            return
        for a in sorted(F.values[cat.source(members[k])], key=_sort_key):
            assign[k] = a
            if consistent(k):
                walk(k + 1)
        assign[k] = None

    walk(0)
    return tuple(results)


def restrict_matching_family(
    cat: FiniteCategory, fam: dict, h: str, pullback_members
) -> dict:
    """Transport a matching family along ``h`` to the pullback sieve."""
    return {g: fam[cat.compose(h, g)] for g in pullback_members}


def canonical_family(F: SetPresheaf, x: str, a, members) -> dict:
    return {f: F.restrict(f, a) for f in members}


def glue_section(H: SetPresheaf, x: str, fam: dict):
    """The unique section restricting to ``fam``; None when there is none."""
    found = None
    for a in sorted(H.values[x], key=_sort_key):
        if all(H.restrict(f, a) == v for f, v in fam.items()):
            if found is not None:
                raise CategoryError("gluing is not unique; target is not separated")
            found = a
    return found


def _family_key(fam: dict) -> tuple:
    return tuple(sorted(fam.items(), key=lambda kv: kv[0]))


def plus_construction(F: SetPresheaf, t: Topology) -> SetPresheaf:
    """One application of the plus construction.

    Sections over ``x`` are equivalence classes of matching families over
    covering sieves, two families being identified when they agree on a
    common covering refinement; the class of a family is represented by its
    restriction to the minimal covering sieve, which exists by finiteness.
    """
    cat = F.category
    smin = {x: t.minimal_covering_sieve(x) for x in cat.objects}
    values = {
        x: frozenset(
            _family_key(fam) for fam in matching_families(F, Sieve(x, smin[x]))
        )
        for x in cat.objects
    }
    restrictions: dict[str, dict] = {}
    for f in cat.morphisms:
        src, tgt = cat.morphisms[f]
        table = {}
        for key in values[tgt]:
            fam = dict(key)
            moved = restrict_matching_family(cat, fam, f, smin[src])
            table[key] = _family_key(moved)
        restrictions[f] = table
    return SetPresheaf(cat, values, restrictions)


def plus_unit(F: SetPresheaf, t: Topology, Fp: SetPresheaf | None = None) -> SheafMorphism:
    cat = F.category
    if Fp is None:
        Fp = plus_construction(F, t)
    smin = {x: t.minimal_covering_sieve(x) for x in cat.objects}
    components = {
        x: {
            a: _family_key(canonical_family(F, x, a, smin[x]))
            for a in F.values[x]
        }
        for x in cat.objects
    }
    return SheafMorphism(F, Fp, components)


def plus_morphism(m: SheafMorphism, t: Topology, Fp=None, Gp=None) -> SheafMorphism:
    cat = m.source.category
    if Fp is None:
        Fp = plus_construction(m.source, t)
    if Gp is None:
        Gp = plus_construction(m.target, t)
    components = {}
    for x in cat.objects:
        table = {}
        for key in Fp.values[x]:
            fam = dict(key)
            table[key] = _family_key(
                {f: m.at(cat.source(f), v) for f, v in fam.items()}
            )
        components[x] = table
    return SheafMorphism(Fp, Gp, components)


def sheafify(F: SetPresheaf, t: Topology) -> SetPresheaf:
    """Plus construction applied exactly twice."""
    return plus_construction(plus_construction(F, t), t)


def sheafify_unit(F: SetPresheaf, t: Topology) -> SheafMorphism:
    Fp = plus_construction(F, t)
    Fpp = plus_construction(Fp, t)
    u1 = plus_unit(F, t, Fp)
    u2 = plus_unit(Fp, t, Fpp)
    return compose_morphisms(u2, u1)


def sheafify_morphism(m: SheafMorphism, t: Topology) -> SheafMorphism:
    return plus_morphism(plus_morphism(m, t), t)


def factor_plus(F: SetPresheaf, H: SetPresheaf, h: SheafMorphism, t: Topology,
                Fp: SetPresheaf | None = None) -> SheafMorphism:
    """Factor ``h: F -> H`` (H a sheaf) through the plus construction of F."""
    cat = F.category
    if Fp is None:
        Fp = plus_construction(F, t)
    components = {}
    for x in cat.objects:
        table = {}
        for key in Fp.values[x]:
            fam = dict(key)
            glued = glue_section(
                H, x, {f: h.at(cat.source(f), v) for f, v in fam.items()}
            )
            if glued is None:
                raise CategoryError("factorization failed; is the target a sheaf?")
            table[key] = glued
        components[x] = table
    return SheafMorphism(Fp, H, components)


def factor_through_sheafification(
    F: SetPresheaf, H: SetPresheaf, h: SheafMorphism, t: Topology
) -> SheafMorphism:
    """The induced morphism ``sheafify(F) -> H`` for a sheaf ``H``."""
    Fp = plus_construction(F, t)
    h1 = factor_plus(F, H, h, t, Fp)
    return factor_plus(Fp, H, h1, t)


def is_sheaf(F: SetPresheaf, t: Topology) -> bool:
    """Sections biject with matching families for every covering sieve."""
    cat = F.category
    for x in cat.objects:
        for members in t.covering[x]:
            fams = matching_families(F, Sieve(x, members))
            keys = {_family_key(f) for f in fams}
            image = {
                _family_key(canonical_family(F, x, a, members)) for a in F.values[x]
            }
            if len(image) != len(F.values[x]) or image != keys:
                return False
    return True


def _require_sheaves(t: Topology, *presheaves) -> None:
    for F in presheaves:
        if not is_sheaf(F, t):
            raise CategoryError("operation needs sheaf inputs")


def is_mono(m: SheafMorphism, t: Topology, check: bool = True) -> bool:
    """Monomorphism of sheaves: injective on all sections."""
    if check:
        _require_sheaves(t, m.source, m.target)
    for x in m.source.category.objects:
        comp = m.components[x]
        if len(set(comp.values())) != len(comp):
            return False
    return True


def _component_images(m: SheafMorphism) -> dict[str, set]:
    return {y: set(m.components[y].values()) for y in m.source.category.objects}


def _lifting_sieve(m: SheafMorphism, x: str, b, images) -> frozenset[str]:
    cat = m.source.category
    return frozenset(
        f
        for f in cat.hom_into[x]
        if m.target.restrict(f, b) in images[cat.source(f)]
    )


def is_epi(m: SheafMorphism, t: Topology, check: bool = True) -> bool:
    """Epimorphism of sheaves: every section lifts along some covering sieve."""
    if check:
        _require_sheaves(t, m.source, m.target)
    cat = m.source.category
    images = _component_images(m)
    for x in cat.objects:
        for b in m.target.values[x]:
            if _lifting_sieve(m, x, b, images) not in t.covering[x]:
                return False
    return True


def epi_failure_witness(m: SheafMorphism, t: Topology):
    """A pair ``(object, section)`` on which local lifting fails, or None."""
    cat = m.source.category
    images = _component_images(m)
    for x in cat.objects:
        for b in sorted(m.target.values[x], key=_sort_key):
            if _lifting_sieve(m, x, b, images) not in t.covering[x]:
                return (x, b)
    return None


def is_iso(m: SheafMorphism, t: Topology, check: bool = True) -> bool:
    return is_mono(m, t, check) and is_epi(m, t, check)


# ---------------------------------------------------------------------------
# site morphisms


def preserves_binary_meets(u: FunctorData) -> bool:
    """Meet preservation for functors between thin poset sites."""
    src, tgt = u.source, u.target
    if src.poset_down is None or tgt.poset_down is None:
        raise CategoryError("meet preservation is checked on poset sites")

    def meet(cat, a, b):
        lows = cat.poset_down[a] & cat.poset_down[b]
        best = None
        for c in lows:
            if best is None or best in cat.poset_down[c]:
                best = c
        return best

    for a in src.objects:
        for b in src.objects:
            ma = meet(src, a, b)
            if ma is None:
                continue
            if u.ob(ma) != meet(tgt, u.ob(a), u.ob(b)):
                return False
    return True


def is_continuous(u: FunctorData, t_src: Topology, t_tgt: Topology,
                  src_site: Site | None = None) -> bool:
    """Images of covering families are covering.

    Uses the generating families when the source site carries a pretopology,
    otherwise every covering sieve.
    """
    if src_site is not None and src_site.pretopology is not None:
        fams = {
            x: src_site.pretopology.on(x) for x in u.source.objects
        }
    else:
        fams = {
            x: tuple(tuple(sorted(s)) for s in sorted(t_src.covering[x], key=sorted))
            for x in u.source.objects
        }
    for x in u.source.objects:
        for fam in fams[x]:
            image = tuple(u.mor(f) for f in fam)
            if not is_covering(t_tgt, image, u.ob(x)):
                return False
    return True


def almost_cocontinuity_report(
    u: FunctorData, t_src: Topology, t_tgt: Topology
) -> tuple[bool, tuple | None, int]:
    """Detailed almost-cocontinuity check.

    For every cover of an image object there must be a cover upstairs whose
    image refines it, or whose members all have images covered by the empty
    family.  Returns (ok, witness, empty_clause_uses).
    """
    src, tgt = u.source, u.target
    empty_uses = 0
    for x in src.objects:
        ux = u.ob(x)
        for members in sorted(t_tgt.covering[ux], key=sorted):
            family = tuple(sorted(members))
            found = False
            used_empty = False
            for cand in sorted(t_src.covering[x], key=sorted):
                image = tuple(u.mor(f) for f in sorted(cand))
                if family and refines(tgt, image, family):
                    found = True
                    break
                if all(
                    frozenset() in t_tgt.covering[tgt.source(u.mor(f))]
                    for f in cand
                ):
                    found = True
                    used_empty = True
                    break
            if not found:
                return False, (x, family), empty_uses
            if used_empty:
                empty_uses += 1
    return True, None, empty_uses


def is_almost_cocontinuous(u: FunctorData, t_src: Topology, t_tgt: Topology) -> bool:
    ok, _, _ = almost_cocontinuity_report(u, t_src, t_tgt)
    return ok


def direct_image(
    u: FunctorData, F: SetPresheaf, t_src: Topology, t_tgt: Topology,
    src_site: Site | None = None, check: bool = True,
) -> SetPresheaf:
    """Compose a sheaf on the target site with ``u``; a sheaf again when ``u``
    is continuous."""
    if check and not is_continuous(u, t_src, t_tgt, src_site):
        raise CategoryError("direct image needs a continuous functor")
    values = {x: F.values[u.ob(x)] for x in u.source.objects}
    restrictions = {f: dict(F.restrictions[u.mor(f)]) for f in u.source.morphisms}
    return SetPresheaf(u.source, values, restrictions)


def direct_image_morphism(u: FunctorData, m: SheafMorphism,
                          FF: SetPresheaf, GG: SetPresheaf) -> SheafMorphism:
    components = {x: dict(m.components[u.ob(x)]) for x in u.source.objects}
    return SheafMorphism(FF, GG, components)


def stalk(F: SetPresheaf, site: Site, x: str) -> frozenset:
    """Sections over the minimal open of a point."""
    return F.values[site.minimal_open_object(x)]


def stalk_map(m: SheafMorphism, site: Site, x: str) -> dict:
    return m.components[site.minimal_open_object(x)]


@dataclass(frozen=True)
class ExactnessEntry:
    label: str
    preserved: bool
    witness: tuple | None


@dataclass(frozen=True)
class ExactnessReport:
    entries: tuple[ExactnessEntry, ...]

    @property
    def all_preserved(self) -> bool:
        return all(e.preserved for e in self.entries)


def check_exactness_along(
    u: FunctorData,
    epis,
    t_src: Topology,
    t_tgt: Topology,
    src_site: Site | None = None,
) -> ExactnessReport:
    """Whether the direct image along ``u`` keeps each sample epi an epi."""
    if not is_continuous(u, t_src, t_tgt, src_site):
        raise CategoryError("exactness check needs a continuous functor")
    entries = []
    for label, m in epis:
        FF = direct_image(u, m.source, t_src, t_tgt, src_site, check=False)
        GG = direct_image(u, m.target, t_src, t_tgt, src_site, check=False)
        pushed = direct_image_morphism(u, m, FF, GG)
        witness = epi_failure_witness(pushed, t_src)
        entries.append(ExactnessEntry(label, witness is None, witness))
    return ExactnessReport(tuple(entries))


def enumerate_morphisms(F: SetPresheaf, G: SetPresheaf):
    """All natural transformations ``F -> G``, deterministically ordered."""
    cat = F.category
    objects = sorted(cat.objects)
    results: list[SheafMorphism] = []
    components: dict[str, dict] = {}

    mors_between = {
        (a, b): [f for f in cat.morphisms if cat.morphisms[f] == (a, b)]
        for a in objects
        for b in objects
    }

    def natural_so_far(new_obj: str) -> bool:
        for other in components:
            for f in mors_between[(new_obj, other)]:
                # f: new_obj -> other, restriction lands in new_obj
                for a in F.values[other]:
                    if components[new_obj][F.restrict(f, a)] != G.restrict(
                        f, components[other][a]
                    ):
                        return False
            for f in mors_between[(other, new_obj)]:
                for a in F.values[new_obj]:
                    if components[other][F.restrict(f, a)] != G.restrict(
                        f, components[new_obj][a]
                    ):
                        return False
        return True

    def walk(k: int) -> None:
        if k == len(objects):
            results.append(
                SheafMorphism(F, G, {x: dict(tab) for x, tab in components.items()})
            )
            return
        x = objects[k]
        elems = sorted(F.values[x], key=_sort_key)
        targets = sorted(G.values[x], key=_sort_key)
        for image in product(targets, repeat=len(elems)):
            components[x] = dict(zip(elems, image))
            if natural_so_far(x):
                walk(k + 1)
        del components[x]

    walk(0)
    return results


# ---------------------------------------------------------------------------
# abelian presheaves presented by products of cyclic groups


@dataclass(eq=False)
class AbPresheaf:
    """Finite abelian groups presented as products of cyclic groups.

    ``orders[x]`` lists the cyclic orders at ``x``; sections are integer
    tuples reduced mod those orders.  ``matrices[f]`` acts on sections over
    the target of ``f``; rows match the cyclic factors at the source of
    ``f``.
    """

    category: FiniteCategory
    orders: dict[str, tuple[int, ...]]
    matrices: dict[str, tuple[tuple[int, ...], ...]]

    def elements(self, x: str) -> tuple[tuple[int, ...], ...]:
        return tuple(product(*(range(n) for n in self.orders[x])))

    def apply(self, f: str, v: tuple[int, ...]) -> tuple[int, ...]:
        src = self.category.source(f)
        rows = self.matrices[f]
        out = []
        for i, row in enumerate(rows):
            total = sum(c * x for c, x in zip(row, v))
            out.append(total % self.orders[src][i])
        return tuple(out)

    def to_set_presheaf(self) -> SetPresheaf:
        cat = self.category
        values = {x: frozenset(self.elements(x)) for x in cat.objects}
        restrictions = {
            f: {v: self.apply(f, v) for v in values[cat.target(f)]}
            for f in cat.morphisms
        }
        return SetPresheaf(cat, values, restrictions)


def validate_ab_presheaf(F: AbPresheaf) -> CategoryReport:
    cat = F.category
    for f in sorted(cat.morphisms):
        src, tgt = cat.morphisms[f]
        rows = F.matrices.get(f)
        if rows is None or len(rows) != len(F.orders[src]):
            return CategoryReport(False, "matrix-shape", (f,))
        for row in rows:
            if len(row) != len(F.orders[tgt]):
                return CategoryReport(False, "matrix-shape", (f,))
        # well-defined mod the orders of the target object's factors
        for j, n in enumerate(F.orders[tgt]):
            for i, row in enumerate(rows):
                if (n * row[j]) % F.orders[src][i] != 0:
                    return CategoryReport(False, "matrix-congruence", (f, i, j))
    return validate_presheaf(F.to_set_presheaf())


def sheaf_from_json(cat: FiniteCategory, doc: dict):
    """Load a sheaf document; abelian when all values carry cyclic orders."""
    try:
        raw_values = doc["values"]
        raw_restrictions = doc.get("restrictions", {})
        ab = all(
            isinstance(v, dict) and "cyclic_orders" in v for v in raw_values.values()
        )
        if ab:
            orders = {x: tuple(v["cyclic_orders"]) for x, v in raw_values.items()}
            matrices = {
                f: tuple(tuple(row) for row in rows)
                for f, rows in raw_restrictions.items()
            }
            for x in cat.objects:
                if x not in orders:
                    raise CategoryError(f"missing value at {x!r}")
            for f in cat.morphisms:
                if f not in matrices:
                    src, tgt = cat.morphisms[f]
                    if cat.is_identity(f) and orders[src] == orders[tgt]:
                        k = len(orders[src])
                        matrices[f] = tuple(
                            tuple(1 if i == j else 0 for j in range(k))
                            for i in range(k)
                        )
                    else:
                        raise CategoryError(f"missing matrix for {f!r}")
            return AbPresheaf(cat, orders, matrices)
        values = {
            x: frozenset(_intern_elem(e) for e in v) for x, v in raw_values.items()
        }
        restrictions = {}
        for f in cat.morphisms:
            src, tgt = cat.morphisms[f]
            if f in raw_restrictions:
                restrictions[f] = {
                    _coerce_key(k, values[tgt]): _intern_elem(v)
                    for k, v in raw_restrictions[f].items()
                }
            elif cat.is_identity(f):
                restrictions[f] = {a: a for a in values[tgt]}
            else:
                raise CategoryError(f"missing restriction for {f!r}")
        return SetPresheaf(cat, values, restrictions)
    except (KeyError, TypeError) as exc:
        raise CategoryError(f"malformed sheaf document: {exc}") from exc


def _intern_elem(e):
    if isinstance(e, list):
        return tuple(_intern_elem(x) for x in e)
    return e


def _coerce_key(key, elements):
    """JSON object keys are strings; match them back onto the section set."""
    if key in elements:
        return key
    try:
        as_int = int(key)
    except (TypeError, ValueError):
        as_int = None
    if as_int is not None and as_int in elements:
        return as_int
    raise CategoryError(f"table key {key!r} is not a section")


def morphism_from_json(F: SetPresheaf, G: SetPresheaf, doc: dict) -> SheafMorphism:
    try:
        components = {
            x: {
                _coerce_key(k, F.values[x]): _intern_elem(v)
                for k, v in tab.items()
            }
            for x, tab in doc["components"].items()
        }
    except (KeyError, TypeError) as exc:
        raise CategoryError(f"malformed morphism document: {exc}") from exc
    return SheafMorphism(F, G, components)
