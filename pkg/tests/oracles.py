"""Independent oracles for the test suite.

Each oracle recomputes an expected value by a route separate from the
implementation it checks: saturation by dumb full rescans over
powerset-enumerated sieves, covering by unions of point sets, escape steps
by a self-contained subtractive simulation on integer pairs, sheafification
by stalk realization over the specialization order.
"""

from __future__ import annotations

from itertools import chain, combinations, product


# ---------------------------------------------------------------------------
# sieves and saturation, the slow way


def powerset_sieves(cat, x):
    """Every precomposition-closed subset of the morphisms into ``x``."""
    mors = sorted(cat.hom_into[x])
    sieves = []
    for k in range(len(mors) + 1):
        for subset in combinations(mors, k):
            members = frozenset(subset)
            closed = all(
                cat.compose(f, g) in members
                for f in members
                for g in cat.hom_into[cat.source(f)]
            )
            if closed:
                sieves.append(members)
    return sieves


def brute_force_saturation(cat, families_by_target):
    """Least covering system by full rescans of the raw closure rules."""
    sieves = {x: powerset_sieves(cat, x) for x in cat.objects}
    covering = {x: set() for x in cat.objects}
    for x in cat.objects:
        covering[x].add(frozenset(cat.hom_into[x]))
    for x, fams in families_by_target.items():
        for fam in fams:
            members = frozenset(
                cat.compose(f, g) for f in fam for g in cat.hom_into[cat.source(f)]
            )
            covering[x].add(members)

    def pullback(s, h):
        y = cat.source(h)
        return frozenset(g for g in cat.hom_into[y] if cat.compose(h, g) in s)

    changed = True
    while changed:
        changed = False
        for x in cat.objects:
            for s in list(covering[x]):
                for h in cat.hom_into[x]:
                    t = pullback(s, h)
                    if t not in covering[cat.source(h)]:
                        covering[cat.source(h)].add(t)
                        changed = True
        for x in cat.objects:
            for s in sieves[x]:
                if s in covering[x]:
                    continue
                for r in list(covering[x]):
                    if all(pullback(s, h) in covering[cat.source(h)] for h in r):
                        covering[x].add(s)
                        changed = True
                        break
    return {x: frozenset(covering[x]) for x in cat.objects}


def union_covers(site, family, target) -> bool:
    """Joint surjectivity of a family of subsets."""
    union = frozenset()
    for f in family:
        union |= site.object_points[site.category.source(f)]
    return union == site.object_points[target]


# ---------------------------------------------------------------------------
# matching families, the slow way


def brute_force_matching_families(F, cat, members):
    members = sorted(members)
    spaces = [sorted(F.values[cat.source(f)], key=repr) for f in members]
    out = []
    for assignment in product(*spaces):
        fam = dict(zip(members, assignment))
        ok = True
        for f in members:
            for g in cat.hom_into[cat.source(f)]:
                if fam[cat.compose(f, g)] != F.restrictions[g][fam[f]]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(fam)
    return out


# ---------------------------------------------------------------------------
# sheafification through stalk realization on the specialization order


def stalk_realized_sheafification(spc, site, F):
    """Sections rebuilt as compatible stalk tuples; an independent route to
    the sheafification of a presheaf on a finite-space open-cover site."""
    stalks = {p: F.values[_min_open_name(spc, site, p)] for p in spc.points}
    comaps = {}
    for q in spc.points:
        for p in spc.points:
            if p != q and q in spc.closure[p]:
                mor = site.category.hom(
                    _min_open_name(spc, site, p), _min_open_name(spc, site, q)
                )[0]
                comaps[(q, p)] = dict(F.restrictions[mor])
    values = {}
    for x in site.category.objects:
        pts = site.object_points[x]
        sections = []
        for assignment in product(*(sorted(stalks[p], key=repr) for p in sorted(pts))):
            tup = dict(zip(sorted(pts), assignment))
            ok = all(
                comaps[(q, p)][tup[q]] == tup[p]
                for q in pts
                for p in pts
                if p != q and q in spc.closure[p]
            )
            if ok:
                sections.append(tuple(sorted(tup.items())))
        values[x] = frozenset(sections)
    return values


def _min_open_name(spc, site, p):
    from finsite.coverage import subset_name

    return subset_name(spc.minimal_open(p))


def stalkwise_surjective(m, site, spc) -> bool:
    for p in spc.points:
        name = _min_open_name(spc, site, p)
        table = m.components[name]
        if set(table.values()) != set(m.target.values[name]):
            return False
    return True


# ---------------------------------------------------------------------------
# escape steps by a self-contained subtractive simulation

_INF = float("inf")


def escape_step_oracle(p, q, max_n=256):
    """Dual simulation on integer pairs against the exact center path.

    The center values are written a + b*sqrt(2) with integer a, b; the sign
    test compares a^2 against 2 b^2.
    """
    if p == _INF and q == _INF:
        return 1

    def positive(a, b):
        if a >= 0 and b >= 0:
            return (a, b) != (0, 0)
        if a <= 0 and b <= 0:
            return False
        if a > 0:
            return a * a > 2 * b * b
        return 2 * b * b > a * a

    beta = (1, 0)
    gamma = (0, 1)
    n = 0
    while n <= max_n:
        if p == 0 or q == 0:
            return n
        diff = (gamma[0] - beta[0], gamma[1] - beta[1])
        center_letter = "A" if positive(*diff) else "B"
        if center_letter == "A":
            beta, gamma = beta, diff
        else:
            beta, gamma = (-diff[0], -diff[1]), gamma
        if p == q:
            return n + 1
        point_letter = "A" if p < q else "B"
        if point_letter != center_letter:
            return n + 1
        if point_letter == "A":
            q = q - p
        else:
            p = p - q
        n += 1
    return None


# ---------------------------------------------------------------------------
# canonical-map helpers for the left-exactness comparisons


def product_comparison_bijective(F, G, topology):
    """sheafify(F x G) -> sheafify(F) x sheafify(G) is a bijection objectwise."""
    from finsite.sheafkit import (
        SheafMorphism,
        factor_through_sheafification,
        morphism_bijective,
        product_presheaf,
        sheafify,
        sheafify_unit,
    )

    P, p1, p2 = product_presheaf(F, G)
    sF, sG = sheafify(F, topology), sheafify(G, topology)
    sFG, q1, q2 = product_presheaf(sF, sG)
    uF, uG = sheafify_unit(F, topology), sheafify_unit(G, topology)
    cat = F.category
    into_product = SheafMorphism(
        P,
        sFG,
        {
            x: {
                ab: (uF.at(x, ab[0]), uG.at(x, ab[1]))
                for ab in P.values[x]
            }
            for x in cat.objects
        },
    )
    factored = factor_through_sheafification(P, sFG, into_product, topology)
    return morphism_bijective(factored)


def equalizer_comparison_bijective(m1, m2, topology):
    """sheafify(Eq(m1, m2)) matches the equalizer of the sheafified pair."""
    from finsite.sheafkit import (
        SheafMorphism,
        equalizer_presheaf,
        factor_through_sheafification,
        morphism_bijective,
        sheafify_morphism,
    )

    E, inc = equalizer_presheaf(m1, m2)
    sm1 = sheafify_morphism(m1, topology)
    sm2 = sheafify_morphism(m2, topology)
    sE_target, _ = equalizer_presheaf(sm1, sm2)
    cat = m1.source.category
    # corestrict the sheafified inclusion into the equalizer of the pair
    s_inc = sheafify_morphism(inc, topology)
    components = {}
    for x in cat.objects:
        tab = {}
        for a in s_inc.source.values[x]:
            image = s_inc.at(x, a)
            if image not in sE_target.values[x]:
                return False
            tab[a] = image
        components[x] = tab
    corestricted = SheafMorphism(s_inc.source, sE_target, components)
    return morphism_bijective(corestricted)
