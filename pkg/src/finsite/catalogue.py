"""A catalogue of small spaces, sites, and sheaves used by the test drills.

The spaces cover the shapes the checks care about: irreducible and
reducible, chains, fans, a crossed-lines space whose open complement drives
the pushforward counterexample, and discrete spaces.  Sheaves are built
either directly on the site or from stalk data along the specialization
order, which is how the abelian samples for the exactness drills are
generated.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

from .fincat import CategoryError, FiniteCategory, Poset, poset_category
from .coverage import (
    FiniteSpace,
    Pretopology,
    Site,
    subset_name,
    zariski_site,
    closed_cover_site,
)
from .sheafkit import SetPresheaf, SheafMorphism


_SPACE_SPECS: dict[str, tuple[tuple[str, ...], tuple[tuple[str, str], ...]]] = {
    "point": (("p",), ()),
    "sierpinski": (("e", "s"), (("e", "s"),)),
    "discrete2": (("a", "b"), ()),
    "vee": (("e", "x", "y"), (("e", "x"), ("e", "y"))),
    "chain3": (("e", "m", "c"), (("e", "m"), ("m", "c"))),
    "discrete3": (("a", "b", "c"), ()),
    "crossed_lines": (
        ("e", "x", "y", "c"),
        (("e", "x"), ("e", "y"), ("x", "c"), ("y", "c")),
    ),
    "two_components": (("e1", "x1", "e2", "x2"), (("e1", "x1"), ("e2", "x2"))),
    "star5": (("e", "w", "x", "y", "z"), (("e", "w"), ("e", "x"), ("e", "y"), ("e", "z"))),
    "mixed5": (
        ("e", "x", "y", "c", "d"),
        (("e", "x"), ("e", "y"), ("x", "c"), ("y", "c"), ("x", "d")),
    ),
    "chain5": (
        ("e", "m1", "m2", "m3", "c"),
        (("e", "m1"), ("m1", "m2"), ("m2", "m3"), ("m3", "c")),
    ),
}

_spaces: dict[str, FiniteSpace] = {}
_zariski: dict[str, Site] = {}
_closed: dict[str, Site] = {}


def space_names() -> tuple[str, ...]:
    return tuple(_SPACE_SPECS)


def space(name: str) -> FiniteSpace:
    got = _spaces.get(name)
    if got is None:
        try:
            points, pairs = _SPACE_SPECS[name]
        except KeyError:
            raise CategoryError(f"unknown catalogue space {name!r}") from None
        got = FiniteSpace.from_specializations(points, pairs)
        _spaces[name] = got
    return got


def zariski(name: str) -> Site:
    got = _zariski.get(name)
    if got is None:
        got = zariski_site(space(name))
        _zariski[name] = got
    return got


def closed_site(name: str) -> Site:
    got = _closed.get(name)
    if got is None:
        got = closed_cover_site(space(name))
        _closed[name] = got
    return got


# ---------------------------------------------------------------------------
# every T0 space with few points, up to homeomorphism


def _labelled_posets(n: int) -> list[frozenset]:
    """Strict-order relations of all posets on 0..n-1, grown element by element."""
    posets: list[frozenset] = [frozenset()]
    for k in range(n):
        grown: list[frozenset] = []
        for rel in posets:
            elems = list(range(k))
            downsets = _downsets_of(elems, rel)
            upsets = _downsets_of(elems, _op(rel))
            for d in downsets:
                for u in upsets:
                    if d & u:
                        continue
                    if not all((a, b) in rel for a in d for b in u if a != b):
                        continue
                    new_rel = set(rel)
                    new_rel.update((a, k) for a in d)
                    new_rel.update((k, b) for b in u)
                    grown.append(frozenset(new_rel))
        posets = grown
    return posets


def _op(rel: frozenset) -> frozenset:
    return frozenset((b, a) for a, b in rel)


def _downsets_of(elems, strict_rel) -> list[frozenset]:
    result = [frozenset()]
    order = sorted(elems, key=lambda e: sum(1 for a in elems if (a, e) in strict_rel))
    seen: list[int] = []
    for m in order:
        required = frozenset(a for a in seen if (a, m) in strict_rel)
        result.extend([s | {m} for s in result if required <= s])
        seen.append(m)
    return result


def _canonical(n: int, rel: frozenset) -> frozenset:
    from itertools import permutations

    best = None
    for perm in permutations(range(n)):
        image = frozenset((perm[a], perm[b]) for a, b in rel)
        key = tuple(sorted(image))
        if best is None or key < best[0]:
            best = (key, image)
    return best[1]


def all_spaces_up_to(n: int) -> list[FiniteSpace]:
    """One finite T0 space per homeomorphism class with at most ``n`` points.

    The specialization orders are exactly the posets on the point set, so
    this enumerates posets up to isomorphism.
    """
    spaces = []
    for k in range(1, n + 1):
        seen = set()
        for rel in _labelled_posets(k):
            canon = _canonical(k, rel)
            if canon in seen:
                continue
            seen.add(canon)
            points = tuple(f"p{i}" for i in range(k))
            pairs = [(f"p{a}", f"p{b}") for a, b in sorted(canon)]
            spaces.append(FiniteSpace.from_specializations(points, pairs))
    return spaces


# ---------------------------------------------------------------------------
# families of subsets, for exhaustive covering sweeps


def families_into(site: Site, target: str, max_size: int = 4, full_limit: int = 12):
    """Families of morphisms into ``target``: all subsets when few candidates,
    otherwise every family of at most ``max_size`` members."""
    cat = site.category
    candidates = tuple(sorted(cat.hom_into[target]))
    if len(candidates) <= full_limit:
        sizes = range(len(candidates) + 1)
    else:
        sizes = range(max_size + 1)
    for k in sizes:
        yield from combinations(candidates, k)


# ---------------------------------------------------------------------------
# direct sheaf constructions


def terminal_sheaf(site: Site) -> SetPresheaf:
    from .sheafkit import terminal_presheaf

    return terminal_presheaf(site.category)


def constant_presheaf(site: Site, elems) -> SetPresheaf:
    elems = frozenset(elems)
    cat = site.category
    values = {x: elems for x in cat.objects}
    restrictions = {f: {a: a for a in elems} for f in cat.morphisms}
    return SetPresheaf(cat, values, restrictions)


def skyscraper(site: Site, point: str, elems) -> SetPresheaf:
    """Sections ``elems`` on opens containing the point, a singleton elsewhere.

    A sheaf whenever the point is closed.
    """
    elems = frozenset(elems)
    cat = site.category
    values = {}
    for x in cat.objects:
        values[x] = elems if point in site.object_points[x] else frozenset({"*"})
    restrictions = {}
    for f in cat.morphisms:
        src, tgt = cat.morphisms[f]
        if point in site.object_points[src]:
            restrictions[f] = {a: a for a in values[tgt]}
        else:
            restrictions[f] = {a: "*" for a in values[tgt]}
    return SetPresheaf(cat, values, restrictions)


def structure_like_sierpinski():
    """Z/2 sections on the whole space, Z/4 on the generic open, 1 into 2."""
    from .sheafkit import AbPresheaf

    site = zariski("sierpinski")
    cat = site.category
    orders = {"{}": (), "{e}": (4,), "{e,s}": (2,)}
    matrices = {}
    for f in cat.morphisms:
        src, tgt = cat.morphisms[f]
        if src == tgt:
            k = len(orders[src])
            matrices[f] = tuple(
                tuple(1 if i == j else 0 for j in range(k)) for i in range(k)
            )
        elif src == "{}":
            matrices[f] = ()
        else:
            matrices[f] = ((2,),)
    return AbPresheaf(cat, orders, matrices)


def modified_constant_presheaf(site: Site, elems=frozenset({0, 1})) -> SetPresheaf:
    """Identity-restriction presheaf whose top value was replaced by a point.

    Gluing then disagrees with the stored top sections, so sheafification
    rebuilds them as matching tuples over a cover.
    """
    elems = frozenset(elems)
    first = sorted(elems, key=repr)[0]
    cat = site.category
    top = max(cat.objects, key=lambda x: (len(site.object_points[x]), x))
    values = {x: (frozenset({"*"}) if x == top else elems) for x in cat.objects}
    restrictions = {}
    for f in cat.morphisms:
        src, tgt = cat.morphisms[f]
        if tgt == top and src != top:
            restrictions[f] = {"*": first}
        elif tgt == top and src == top:
            restrictions[f] = {"*": "*"}
        else:
            restrictions[f] = {a: a for a in values[tgt]}
    return SetPresheaf(cat, values, restrictions)


# ---------------------------------------------------------------------------
# sheaves from stalk data along the specialization order

Comaps = dict[tuple[str, str], dict]


def _comap_pairs(spc: FiniteSpace):
    """Pairs (q, p) with p a strict generization of q."""
    return tuple(
        (q, p)
        for q in spc.points
        for p in spc.points
        if p != q and q in spc.closure[p]
    )


def _stalk_sections(spc: FiniteSpace, pts: frozenset, stalks, comaps: Comaps):
    """Compatible stalk tuples over a subset: free at its closed points,
    forced along comaps elsewhere."""
    pts_sorted = sorted(pts)
    closed_in = [
        q for q in pts_sorted if not any(p != q and p in pts and p in spc.closure[q] for p in spc.points)
    ]
    others = [p for p in pts_sorted if p not in closed_in]
    sections = []
    for choice in product(*(sorted(stalks[q], key=repr) for q in closed_in)):
        assign = dict(zip(closed_in, choice))
        ok = True
        for p in others:
            forcers = [q for q in closed_in if q != p and q in spc.closure[p]]
            vals = {comaps[(q, p)][assign[q]] for q in forcers}
            if len(vals) != 1:
                ok = False
                break
            assign[p] = vals.pop()
        if not ok:
            continue
        # interior consistency along every comparable pair
        for q, p in _comap_pairs(spc):
            if q in pts and p in pts and comaps[(q, p)][assign[q]] != assign[p]:
                ok = False
                break
        if ok:
            sections.append(tuple(sorted(assign.items())))
    return sections


def realize_stalk_sheaf(spc: FiniteSpace, site: Site, stalks, comaps: Comaps) -> SetPresheaf:
    """Sections over each open are the compatible stalk tuples."""
    cat = site.category
    values = {}
    for x in cat.objects:
        pts = site.object_points[x]
        values[x] = frozenset(_stalk_sections(spc, pts, stalks, comaps))
    restrictions = {}
    for f in cat.morphisms:
        src, tgt = cat.morphisms[f]
        keep = site.object_points[src]
        restrictions[f] = {
            sec: tuple((p, v) for p, v in sec if p in keep) for sec in values[tgt]
        }
    return SetPresheaf(cat, values, restrictions)


def stalk_morphism(
    F: SetPresheaf, G: SetPresheaf, site: Site, maps: dict[str, dict]
) -> SheafMorphism:
    """Realize pointwise stalk maps as a morphism of realized sheaves."""
    cat = site.category
    components = {}
    for x in cat.objects:
        tab = {}
        for sec in F.values[x]:
            tab[sec] = tuple((p, maps[p][v]) for p, v in sec)
        components[x] = tab
    return SheafMorphism(F, G, components)


# ---------------------------------------------------------------------------
# abelian stalk data: products of cyclic groups and matrices


def group_elements(orders) -> tuple[tuple[int, ...], ...]:
    return tuple(product(*(range(n) for n in orders)))


def apply_matrix(rows, to_orders, v) -> tuple[int, ...]:
    return tuple(
        sum(c * x for c, x in zip(row, v)) % n for row, n in zip(rows, to_orders)
    )


def hom_matrices(from_orders, to_orders):
    """All homomorphism matrices between products of cyclic groups."""
    entry_choices = []
    for m in to_orders:
        row_choices = []
        for n in from_orders:
            step = m // _gcd(m, n)
            row_choices.append(tuple(range(0, m, step)) if step else (0,))
        entry_choices.append(row_choices)
    all_rows = [tuple(product(*row_choices)) for row_choices in entry_choices]
    return tuple(product(*all_rows))


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def matrix_as_map(rows, from_orders, to_orders) -> dict:
    return {
        v: apply_matrix(rows, to_orders, v) for v in group_elements(from_orders)
    }


@dataclass(eq=False)
class StalkAbSheaf:
    """An abelian sheaf remembered together with its stalk presentation."""

    space: FiniteSpace
    site: Site
    stalk_orders: dict[str, tuple[int, ...]]
    comap_matrices: dict[tuple[str, str], tuple]
    presheaf: SetPresheaf
    label: str


def _comaps_as_maps(spc, stalk_orders, comap_matrices) -> Comaps:
    return {
        (q, p): matrix_as_map(rows, stalk_orders[q], stalk_orders[p])
        for (q, p), rows in comap_matrices.items()
    }


def _comaps_functorial(spc: FiniteSpace, stalk_orders, comap_matrices) -> bool:
    pairs = _comap_pairs(spc)
    for q, m in pairs:
        for m2, p in pairs:
            if m2 != m or (q, p) not in comap_matrices:
                continue
            direct = matrix_as_map(comap_matrices[(q, p)], stalk_orders[q], stalk_orders[p])
            first = matrix_as_map(comap_matrices[(q, m)], stalk_orders[q], stalk_orders[m])
            second = matrix_as_map(comap_matrices[(m, p)], stalk_orders[m], stalk_orders[p])
            for v in group_elements(stalk_orders[q]):
                if second[first[v]] != direct[v]:
                    return False
    return True


def make_ab_sheaf(spc, site, stalk_orders, comap_matrices, label="") -> StalkAbSheaf:
    stalks = {p: group_elements(stalk_orders[p]) for p in spc.points}
    comaps = _comaps_as_maps(spc, stalk_orders, comap_matrices)
    presheaf = realize_stalk_sheaf(spc, site, stalks, comaps)
    return StalkAbSheaf(spc, site, dict(stalk_orders), dict(comap_matrices), presheaf, label)


def enumerate_ab_sheaves(spc: FiniteSpace, site: Site, palette, max_section=8, limit=None):
    """All stalk-presented abelian sheaves with stalks from ``palette``.

    Skips assignments whose comaps fail path independence or whose section
    groups outgrow ``max_section``.
    """
    pairs = _comap_pairs(spc)
    count = 0
    for assignment in product(palette, repeat=len(spc.points)):
        stalk_orders = dict(zip(spc.points, assignment))
        choices = [hom_matrices(stalk_orders[q], stalk_orders[p]) for q, p in pairs]
        for combo in product(*choices):
            comap_matrices = dict(zip(pairs, combo))
            if not _comaps_functorial(spc, stalk_orders, comap_matrices):
                continue
            sheaf = make_ab_sheaf(
                spc, site, stalk_orders, comap_matrices,
                label=f"stalks {assignment}",
            )
            if any(len(v) > max_section for v in sheaf.presheaf.values.values()):
                continue
            yield sheaf
            count += 1
            if limit is not None and count >= limit:
                return


def _closed_in(spc: FiniteSpace, pts: frozenset):
    return [
        q for q in sorted(pts)
        if not any(p != q and p in pts and p in spc.closure[q] for p in spc.points)
    ]


def _section_bound_ok(spc: FiniteSpace, site: Site, sizes: dict[str, int],
                      max_section: int) -> bool:
    """Cheap upper bound on section counts: the product over closed points."""
    for x in site.category.objects:
        pts = site.object_points[x]
        bound = 1
        for q in _closed_in(spc, pts):
            bound *= sizes[q]
        if bound > max_section:
            return False
    return True


def sample_ab_sheaf(spc: FiniteSpace, site: Site, palette, rng, max_section=8):
    """One random stalk-presented abelian sheaf, by rejection."""
    pairs = _comap_pairs(spc)
    for _ in range(60):
        stalk_orders = {p: palette[rng.randrange(len(palette))] for p in spc.points}
        sizes = {p: len(group_elements(stalk_orders[p])) for p in spc.points}
        if not _section_bound_ok(spc, site, sizes, max_section):
            continue
        comap_matrices = {}
        for q, p in pairs:
            options = hom_matrices(stalk_orders[q], stalk_orders[p])
            comap_matrices[(q, p)] = options[rng.randrange(len(options))]
        if not _comaps_functorial(spc, stalk_orders, comap_matrices):
            continue
        sheaf = make_ab_sheaf(spc, site, stalk_orders, comap_matrices, label="sampled")
        if any(len(v) > max_section for v in sheaf.presheaf.values.values()):
            continue
        return sheaf
    return None


def enumerate_ab_morphisms(F: StalkAbSheaf, G: StalkAbSheaf):
    """Stalkwise homomorphism families commuting with the comaps."""
    spc = F.space
    pairs = _comap_pairs(spc)
    points = list(spc.points)
    per_point = [
        hom_matrices(F.stalk_orders[p], G.stalk_orders[p]) for p in points
    ]
    f_comaps = _comaps_as_maps(spc, F.stalk_orders, F.comap_matrices)
    g_comaps = _comaps_as_maps(spc, G.stalk_orders, G.comap_matrices)
    for combo in product(*per_point):
        maps = {
            p: matrix_as_map(rows, F.stalk_orders[p], G.stalk_orders[p])
            for p, rows in zip(points, combo)
        }
        natural = True
        for q, p in pairs:
            for v in group_elements(F.stalk_orders[q]):
                if g_comaps[(q, p)][maps[q][v]] != maps[p][f_comaps[(q, p)][v]]:
                    natural = False
                    break
            if not natural:
                break
        if natural:
            yield maps


_surjective_hom_cache: dict[tuple, tuple] = {}


def surjective_hom_maps(from_orders, to_orders) -> tuple[dict, ...]:
    key = (tuple(from_orders), tuple(to_orders))
    got = _surjective_hom_cache.get(key)
    if got is None:
        full = set(group_elements(to_orders))
        got = tuple(
            m
            for rows in hom_matrices(from_orders, to_orders)
            for m in (matrix_as_map(rows, from_orders, to_orders),)
            if set(m.values()) == full
        )
        _surjective_hom_cache[key] = got
    return got


def sample_ab_epi_maps(F: StalkAbSheaf, G: StalkAbSheaf, rng):
    """One random stalkwise-surjective natural family, by randomized search."""
    spc = F.space
    pairs = _comap_pairs(spc)
    points = list(spc.points)
    f_comaps = _comaps_as_maps(spc, F.stalk_orders, F.comap_matrices)
    g_comaps = _comaps_as_maps(spc, G.stalk_orders, G.comap_matrices)
    candidates = []
    for p in points:
        options = list(surjective_hom_maps(F.stalk_orders[p], G.stalk_orders[p]))
        if not options:
            return None
        rng.shuffle(options)
        candidates.append(options)
    assigned: dict[str, dict] = {}

    def consistent(p: str) -> bool:
        for q, r in pairs:
            if q in assigned and r in assigned and (q == p or r == p):
                fmap, gmap = f_comaps[(q, r)], g_comaps[(q, r)]
                for v in assigned[q]:
                    if gmap[assigned[q][v]] != assigned[r][fmap[v]]:
                        return False
        return True

    def walk(k: int) -> bool:
        if k == len(points):
            return True
        p = points[k]
        for option in candidates[k]:
            assigned[p] = option
            if consistent(p) and walk(k + 1):
                return True
        assigned.pop(p, None)
        return False

    if walk(0):
        return dict(assigned)
    return None


def ab_morphism_is_stalk_surjective(F: StalkAbSheaf, G: StalkAbSheaf, maps) -> bool:
    return all(
        set(maps[p].values()) == set(group_elements(G.stalk_orders[p]))
        for p in F.space.points
    )


def realize_ab_morphism(F: StalkAbSheaf, G: StalkAbSheaf, maps) -> SheafMorphism:
    return stalk_morphism(F.presheaf, G.presheaf, F.site, maps)


# ---------------------------------------------------------------------------
# small set-valued sheaf catalogue (sections capped for the detection drills)


def _set_comaps_functorial(spc: FiniteSpace, comaps: Comaps) -> bool:
    pairs = _comap_pairs(spc)
    for q, m in pairs:
        for m2, p in pairs:
            if m2 != m or (q, p) not in comaps:
                continue
            first, second, direct = comaps[(q, m)], comaps[(m, p)], comaps[(q, p)]
            if any(second[first[v]] != direct[v] for v in first):
                return False
    return True


def enumerate_set_sheaves(spc: FiniteSpace, site: Site, sizes=(1, 2),
                          max_section: int = 3, limit: int | None = None):
    """Stalk-realized sheaves of small sets, every comap choice included."""
    pairs = _comap_pairs(spc)
    count = 0
    stalk_options = tuple(tuple(range(k)) for k in sizes)
    for assignment in product(stalk_options, repeat=len(spc.points)):
        stalks = dict(zip(spc.points, assignment))
        per_pair = []
        for q, p in pairs:
            per_pair.append([
                dict(zip(stalks[q], images))
                for images in product(stalks[p], repeat=len(stalks[q]))
            ])
        for combo in product(*per_pair):
            comaps = dict(zip(pairs, combo))
            if not _set_comaps_functorial(spc, comaps):
                continue
            F = realize_stalk_sheaf(spc, site, stalks, comaps)
            if any(len(v) > max_section for v in F.values.values()):
                continue
            yield F
            count += 1
            if limit is not None and count >= limit:
                return


def small_set_sheaves(name: str, max_section: int = 3,
                      limit: int = 10) -> list[tuple[str, SetPresheaf]]:
    """A deterministic list of sheaves with small section sets on a space."""
    spc = space(name)
    site = zariski(name)
    result: list[tuple[str, SetPresheaf]] = []
    result.append(("terminal", terminal_sheaf(site)))
    closed_points = [p for p in spc.points if spc.closure[p] == frozenset({p})]
    if closed_points:
        sky = skyscraper(site, closed_points[0], {0, 1, 2})
        if all(len(v) <= max_section for v in sky.values.values()):
            result.append((f"sky@{closed_points[0]}", sky))
    for i, F in enumerate(enumerate_set_sheaves(spc, site, (1, 2), max_section, limit)):
        result.append((f"stalksheaf#{i}", F))
    return result


def sample_morphisms(F: SetPresheaf, G: SetPresheaf, rng, count: int):
    """Up to ``count`` natural transformations found by randomized search."""
    cat = F.category
    objects = sorted(cat.objects)
    found: list[SheafMorphism] = []
    components: dict[str, dict] = {}
    mors_between = {
        (a, b): [f for f in cat.morphisms if cat.morphisms[f] == (a, b)]
        for a in objects
        for b in objects
    }

    def natural_so_far(new_obj: str) -> bool:
        for other in components:
            for f in mors_between[(new_obj, other)]:
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

    def walk(k: int) -> bool:
        if len(found) >= count:
            return True
        if k == len(objects):
            found.append(
                SheafMorphism(F, G, {x: dict(tab) for x, tab in components.items()})
            )
            return len(found) >= count
        x = objects[k]
        elems = sorted(F.values[x], key=repr)
        targets = sorted(G.values[x], key=repr)
        images = list(product(targets, repeat=len(elems)))
        rng.shuffle(images)
        for image in images:
            components[x] = dict(zip(elems, image))
            if natural_so_far(x):
                if walk(k + 1):
                    del components[x]
                    return True
        components.pop(x, None)
        return False

    walk(0)
    return found


# ---------------------------------------------------------------------------
# a subsets site carrying both open-type and closed-type covers (for joins)


def subsets_site_with_pretopologies(name: str):
    """The poset of all subsets of a space with two pretopologies.

    Families are jointly surjective relatively-open (respectively
    relatively-closed) subsets; their topologies live on one category, so
    the join is defined.
    """
    spc = space(name)
    subsets = [
        frozenset(c)
        for k in range(len(spc.points) + 1)
        for c in combinations(spc.points, k)
    ]
    subsets.sort(key=lambda s: (len(s), subset_name(s)))
    names = {s: subset_name(s) for s in subsets}
    poset = Poset.from_relations(
        [names[s] for s in subsets],
        [(names[a], names[b]) for a in subsets for b in subsets if a <= b],
    )
    cat = poset_category(poset)

    def rel_open(v, s):
        sub = spc.subspace(s)
        return sub.is_open(v)

    def rel_closed(v, s):
        sub = spc.subspace(s)
        return sub.is_closed(v)

    fams_open, fams_closed = [], []
    for s in subsets:
        proper = [v for v in subsets if v < s]
        for v, w in combinations(proper, 2):
            if v | w != s:
                continue
            if rel_open(v, s) and rel_open(w, s):
                fams_open.append((names[s], (f"{names[v]}->{names[s]}", f"{names[w]}->{names[s]}")))
            if rel_closed(v, s) and rel_closed(w, s):
                fams_closed.append((names[s], (f"{names[v]}->{names[s]}", f"{names[w]}->{names[s]}")))
    empty = subset_name(frozenset())
    fams_open.append((empty, ()))
    fams_closed.append((empty, ()))
    return cat, Pretopology.from_lists(fams_open), Pretopology.from_lists(fams_closed)
