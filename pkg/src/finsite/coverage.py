"""Grothendieck topologies on finite categories and finite-space sites.

Topologies are stored extensionally (the full set of covering sieves per
object), which makes equality, axiom checks, and covering tests decidable by
direct enumeration.  Saturation from a pretopology runs a worklist fixpoint
over three closure rules; on thin poset sites the sieves are handled as
object sets, which keeps the sweep over all small spaces fast.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations

from .fincat import (
    CategoryError,
    CategoryReport,
    FiniteCategory,
    FunctorData,
    Poset,
    Sieve,
    all_sieves,
    downward_closed_subsets,
    maximal_sieve,
    poset_category,
    sieve_generated,
)


@dataclass(eq=False)
class Pretopology:
    """Per object, a set of generating covering families (morphism names)."""

    families: dict[str, tuple[tuple[str, ...], ...]]

    @classmethod
    def from_lists(cls, fams) -> "Pretopology":
        grouped: dict[str, set[tuple[str, ...]]] = {}
        for target, members in fams:
            grouped.setdefault(target, set()).add(tuple(sorted(members)))
        return cls({t: tuple(sorted(s)) for t, s in sorted(grouped.items())})

    def on(self, x: str) -> tuple[tuple[str, ...], ...]:
        return self.families.get(x, ())


def validate_pretopology(cat: FiniteCategory, pre: Pretopology) -> CategoryReport:
    for x, fams in pre.families.items():
        if x not in cat.objects:
            return CategoryReport(False, "pretopology-target", (x,))
        for fam in fams:
            for m in fam:
                if m not in cat.morphisms or cat.target(m) != x:
                    return CategoryReport(False, "pretopology-member", (x, m))
    return CategoryReport(True)


def pretopology_from_json(doc: dict) -> Pretopology:
    try:
        return Pretopology.from_lists(
            (fam["target"], tuple(fam["members"])) for fam in doc["families"]
        )
    except (KeyError, TypeError) as exc:
        raise CategoryError(f"malformed pretopology document: {exc}") from exc


def pretopology_to_json(pre: Pretopology) -> dict:
    return {
        "families": [
            {"target": x, "members": list(members)}
            for x, fams in sorted(pre.families.items())
            for members in fams
        ]
    }


@dataclass(eq=False)
class Topology:
    """Covering sieves per object, stored extensionally.

    On thin poset sites ``object_covering`` mirrors the sieves as source
    object sets, which covering tests exploit.
    """

    category: FiniteCategory
    covering: dict[str, frozenset[frozenset[str]]]
    object_covering: dict[str, frozenset[frozenset[str]]] | None = None
    _caches: dict = field(default_factory=dict, repr=False, compare=False)

    def sieves_on(self, x: str) -> frozenset[frozenset[str]]:
        return self.covering[x]

    def is_covering_sieve(self, s: Sieve) -> bool:
        return s.members in self.covering[s.target]

    def minimal_covering_sieve(self, x: str) -> frozenset[str]:
        """Intersection of all covering sieves on ``x`` (covering by finiteness)."""
        cached = self._caches.get(("min", x))
        if cached is None:
            sieves = self.covering[x]
            cached = frozenset(self.category.hom_into[x])
            for s in sieves:
                cached &= s
            self._caches[("min", x)] = cached
        return cached

    def __eq__(self, other) -> bool:
        if not isinstance(other, Topology):
            return NotImplemented
        return (
            self.category is other.category
            or (
                self.category.objects == other.category.objects
                and self.category.morphisms == other.category.morphisms
            )
        ) and self.covering == other.covering


def _object_sieve_universe(cat: FiniteCategory, x: str) -> tuple[frozenset[str], ...]:
    """All sieves on ``x`` of a poset site, encoded as down-closed object sets."""
    key = ("obj-sieves", x)
    cached = cat._caches.get(key)
    if cached is None:
        down = cat.poset_down
        elems = sorted(down[x])
        cached = tuple(downward_closed_subsets(elems, lambda a, b: a in down[b]))
        cat._caches[key] = cached
    return cached


def _saturate_poset(cat: FiniteCategory, seeds: dict[str, set[frozenset[str]]]):
    """Least covering system containing ``seeds`` on a thin poset site.

    Sieves are object sets here.  The closure rules are pullback stability,
    one-step upward closure, and local character phrased through the sieve
    of morphisms along which a candidate pulls back to a cover; together
    these generate exactly the least topology.
    """
    down = cat.poset_down
    cov: dict[str, set[frozenset[str]]] = {x: set() for x in cat.objects}
    queue: deque[tuple[str, frozenset[str]]] = deque()

    def add(x: str, s: frozenset[str]) -> None:
        if s not in cov[x]:
            cov[x].add(s)
            queue.append((x, s))

    for x in cat.objects:
        add(x, down[x])
    for x, sieves in seeds.items():
        for s in sieves:
            add(x, s)
    universes = {x: _object_sieve_universe(cat, x) for x in cat.objects}
    while True:
        while queue:
            x, s = queue.popleft()
            for v in down[x]:
                add(v, s & down[v])
            for v in down[x]:
                if v not in s:
                    add(x, s | down[v])
        progressed = False
        for x in cat.objects:
            for s in universes[x]:
                if s in cov[x]:
                    continue
                t = frozenset(v for v in down[x] if (s & down[v]) in cov[v])
                if t in cov[x]:
                    add(x, s)
                    progressed = True
        if not progressed and not queue:
            break
    return cov


def _saturate_generic(cat: FiniteCategory, seeds: dict[str, set[frozenset[str]]]):
    """Same fixpoint as :func:`_saturate_poset` with morphism-name sieves."""
    cov: dict[str, set[frozenset[str]]] = {x: set() for x in cat.objects}
    queue: deque[tuple[str, frozenset[str]]] = deque()

    def add(x: str, s: frozenset[str]) -> None:
        if s not in cov[x]:
            cov[x].add(s)
            queue.append((x, s))

    pull_cache: dict[tuple[str, frozenset[str]], frozenset[str]] = {}

    def pull(s: frozenset[str], h: str) -> frozenset[str]:
        key = (h, s)
        got = pull_cache.get(key)
        if got is None:
            y = cat.source(h)
            got = frozenset(g for g in cat.hom_into[y] if cat.compose(h, g) in s)
            pull_cache[key] = got
        return got

    gen_cache: dict[str, frozenset[str]] = {}

    def gen(h: str) -> frozenset[str]:
        got = gen_cache.get(h)
        if got is None:
            got = sieve_generated(cat, (h,)).members
            gen_cache[h] = got
        return got

    for x in cat.objects:
        add(x, frozenset(cat.hom_into[x]))
    for x, sieves in seeds.items():
        for s in sieves:
            add(x, s)
    universes = {x: all_sieves(cat, x) for x in cat.objects}
    while True:
        while queue:
            x, s = queue.popleft()
            for h in cat.hom_into[x]:
                add(cat.source(h), pull(s, h))
            for h in cat.hom_into[x]:
                if h not in s:
                    add(x, s | gen(h))
        progressed = False
        for x in cat.objects:
            for s in universes[x]:
                if s in cov[x]:
                    continue
                t = frozenset(
                    h for h in cat.hom_into[x] if pull(s, h) in cov[cat.source(h)]
                )
                if t in cov[x]:
                    add(x, s)
                    progressed = True
        if not progressed and not queue:
            break
    return cov


def _object_sieve_to_names(cat: FiniteCategory, x: str, objs: frozenset[str]):
    return frozenset(cat.hom(v, x)[0] for v in objs)


def _name_sieve_to_objects(cat: FiniteCategory, members: frozenset[str]):
    return frozenset(cat.source(m) for m in members)


def generate_topology(cat: FiniteCategory, pre: Pretopology) -> Topology:
    """Least topology whose covering sieves include those generated by ``pre``."""
    report = validate_pretopology(cat, pre)
    if not report.ok:
        raise CategoryError(f"invalid pretopology: {report.axiom} {report.witness}")
    if cat.poset_down is not None:
        seeds: dict[str, set[frozenset[str]]] = {x: set() for x in cat.objects}
        for x, fams in pre.families.items():
            for fam in fams:
                gen = sieve_generated(cat, fam, x)
                seeds[x].add(_name_sieve_to_objects(cat, gen.members))
        cov = _saturate_poset(cat, seeds)
        covering = {
            x: frozenset(_object_sieve_to_names(cat, x, s) for s in cov[x])
            for x in cat.objects
        }
        return Topology(cat, covering, {x: frozenset(cov[x]) for x in cat.objects})
    seeds = {x: set() for x in cat.objects}
    for x, fams in pre.families.items():
        for fam in fams:
            seeds[x].add(sieve_generated(cat, fam, x).members)
    cov = _saturate_generic(cat, seeds)
    covering = {x: frozenset(cov[x]) for x in cat.objects}
    return Topology(cat, covering)


def minimal_topology(cat: FiniteCategory) -> Topology:
    return generate_topology(cat, Pretopology({}))


def join_topologies(t1: Topology, t2: Topology) -> Topology:
    """Least topology finer than both; saturates the union of the sieve sets."""
    cat = t1.category
    same = cat is t2.category or (
        cat.objects == t2.category.objects and cat.morphisms == t2.category.morphisms
    )
    if not same:
        raise CategoryError("join needs both topologies on the same category")
    if cat.poset_down is not None:
        seeds = {
            x: {
                _name_sieve_to_objects(cat, s)
                for s in (t1.covering[x] | t2.covering[x])
            }
            for x in cat.objects
        }
        cov = _saturate_poset(cat, seeds)
        covering = {
            x: frozenset(_object_sieve_to_names(cat, x, s) for s in cov[x])
            for x in cat.objects
        }
        return Topology(cat, covering, {x: frozenset(cov[x]) for x in cat.objects})
    seeds = {x: set(t1.covering[x] | t2.covering[x]) for x in cat.objects}
    cov = _saturate_generic(cat, seeds)
    covering = {x: frozenset(cov[x]) for x in cat.objects}
    return Topology(cat, covering)


def is_covering(t: Topology, family, target: str | None = None) -> bool:
    """True when the sieve generated by ``family`` is covering."""
    cat = t.category
    if t.object_covering is not None:
        family = tuple(family)
        if not family:
            if target is None:
                raise CategoryError("empty family needs an explicit target")
            return frozenset() in t.object_covering[target]
        targets = {cat.target(f) for f in family}
        if len(targets) > 1:
            raise CategoryError(f"family has mixed targets: {sorted(targets)}")
        tgt = targets.pop()
        if target is not None and target != tgt:
            raise CategoryError(f"family target {tgt!r} does not match {target!r}")
        members: frozenset[str] = frozenset()
        for f in family:
            members |= cat.poset_down[cat.source(f)]
        return members in t.object_covering[tgt]
    s = sieve_generated(cat, family, target)
    return s.members in t.covering[s.target]


def factors_through(cat: FiniteCategory, f: str, g: str) -> bool:
    """True when ``f = g∘h`` for some ``h``."""
    if cat.target(f) != cat.target(g):
        return False
    return any(
        cat.compose(g, h) == f for h in cat.hom(cat.source(f), cat.source(g))
    )


def refines(cat: FiniteCategory, a, b) -> bool:
    """True when every member of ``a`` factors through some member of ``b``."""
    a, b = tuple(a), tuple(b)
    targets = {cat.target(f) for f in a} | {cat.target(g) for g in b}
    if len(targets) > 1:
        raise CategoryError(f"refinement needs a common target, got {sorted(targets)}")
    return all(any(factors_through(cat, f, g) for g in b) for f in a)


def topology_axiom_report(t: Topology, raw_limit: int = 300) -> CategoryReport:
    """Exhaustively verify the three topology axioms.

    Local character is checked in two equivalent forms: one-step upward
    closure plus the sieve-of-good-pullbacks form (sound and complete given
    stability), and additionally the raw quantifier form on sites with at
    most ``raw_limit`` sieves in total.
    """
    cat = t.category
    for x in cat.objects:
        if frozenset(cat.hom_into[x]) not in t.covering[x]:
            return CategoryReport(False, "maximal-sieve", (x,))
    for x in cat.objects:
        for s in t.covering[x]:
            for h in cat.hom_into[x]:
                y = cat.source(h)
                pb = frozenset(g for g in cat.hom_into[y] if cat.compose(h, g) in s)
                if pb not in t.covering[y]:
                    return CategoryReport(False, "stability", (x, tuple(sorted(s)), h))
    universes = {x: all_sieves(cat, x) for x in cat.objects}
    for x in cat.objects:
        gen_cache = {h: sieve_generated(cat, (h,)).members for h in cat.hom_into[x]}
        for s in t.covering[x]:
            for h in cat.hom_into[x]:
                if h not in s and (s | gen_cache[h]) not in t.covering[x]:
                    return CategoryReport(
                        False, "local-character", ("upward-closure", x, h)
                    )
    for x in cat.objects:
        for s in universes[x]:
            if s in t.covering[x]:
                continue
            good = frozenset(
                h
                for h in cat.hom_into[x]
                if frozenset(
                    g
                    for g in cat.hom_into[cat.source(h)]
                    if cat.compose(h, g) in s
                )
                in t.covering[cat.source(h)]
            )
            if good in t.covering[x]:
                return CategoryReport(
                    False, "local-character", ("good-pullbacks", x, tuple(sorted(s)))
                )
    if sum(len(u) for u in universes.values()) <= raw_limit:
        for x in cat.objects:
            for r in t.covering[x]:
                for s in universes[x]:
                    if s in t.covering[x]:
                        continue
                    ok = all(
                        frozenset(
                            g
                            for g in cat.hom_into[cat.source(h)]
                            if cat.compose(h, g) in s
                        )
                        in t.covering[cat.source(h)]
                        for h in r
                    )
                    if ok:
                        return CategoryReport(
                            False,
                            "local-character",
                            ("raw", x, tuple(sorted(r)), tuple(sorted(s))),
                        )
    return CategoryReport(True)


# ---------------------------------------------------------------------------
# finite topological spaces


def subset_name(points) -> str:
    return "{" + ",".join(sorted(points)) + "}"


@dataclass(eq=False)
class FiniteSpace:
    """A finite T0 space given by its specialization relation.

    ``closure[x]`` is the closure of the point ``x``; a pair ``(x, y)`` in
    the input relation means ``y`` lies in the closure of ``x``.  Opens are
    the generization-closed subsets.
    """

    points: tuple[str, ...]
    closure: dict[str, frozenset[str]]

    @classmethod
    def from_specializations(cls, points, pairs) -> "FiniteSpace":
        points = tuple(points)
        if len(set(points)) != len(points):
            raise CategoryError("duplicate points")
        known = set(points)
        rel = {p: {p} for p in points}
        for x, y in pairs:
            if x not in known or y not in known:
                raise CategoryError(f"specialization ({x!r}, {y!r}) off the point list")
            rel[x].add(y)
        changed = True
        while changed:
            changed = False
            for x in points:
                extra = set()
                for y in rel[x]:
                    extra |= rel[y]
                if not extra <= rel[x]:
                    rel[x] |= extra
                    changed = True
        for x in points:
            for y in rel[x]:
                if x != y and x in rel[y]:
                    raise CategoryError(f"not T0: {x!r} and {y!r} are topologically equal")
        return cls(points, {p: frozenset(rel[p]) for p in points})

    def generizations(self, y: str) -> frozenset[str]:
        return frozenset(x for x in self.points if y in self.closure[x])

    def minimal_open(self, x: str) -> frozenset[str]:
        return self.generizations(x)

    def is_open(self, s) -> bool:
        s = frozenset(s)
        return all(self.generizations(y) <= s for y in s)

    def is_closed(self, s) -> bool:
        s = frozenset(s)
        return all(self.closure[x] <= s for x in s)

    def opens(self) -> tuple[frozenset[str], ...]:
        result = [
            frozenset(sub)
            for k in range(len(self.points) + 1)
            for sub in combinations(self.points, k)
            if self.is_open(sub)
        ]
        return tuple(sorted(result, key=lambda s: (len(s), subset_name(s))))

    def closed_sets(self) -> tuple[frozenset[str], ...]:
        result = [
            frozenset(sub)
            for k in range(len(self.points) + 1)
            for sub in combinations(self.points, k)
            if self.is_closed(sub)
        ]
        return tuple(sorted(result, key=lambda s: (len(s), subset_name(s))))

    def is_irreducible(self) -> bool:
        all_points = frozenset(self.points)
        return bool(self.points) and any(
            self.closure[p] == all_points for p in self.points
        )

    def is_irreducible_subset(self, s) -> bool:
        s = frozenset(s)
        return bool(s) and any(s <= self.closure[p] for p in s)

    def components_of(self, s) -> tuple[frozenset[str], ...]:
        """Connected components of a subspace (comparability components)."""
        s = frozenset(s)
        remaining = set(s)
        comps = []
        while remaining:
            seed = remaining.pop()
            comp = {seed}
            frontier = [seed]
            while frontier:
                p = frontier.pop()
                for q in list(remaining):
                    if q in self.closure[p] or p in self.closure[q]:
                        remaining.remove(q)
                        comp.add(q)
                        frontier.append(q)
            comps.append(frozenset(comp))
        return tuple(sorted(comps, key=subset_name))

    def subspace(self, pts) -> "FiniteSpace":
        pts = frozenset(pts)
        if not pts <= set(self.points):
            raise CategoryError("subspace points must come from the space")
        order = tuple(p for p in self.points if p in pts)
        return FiniteSpace(order, {p: self.closure[p] & pts for p in order})


def space_from_json(doc: dict) -> FiniteSpace:
    try:
        return FiniteSpace.from_specializations(
            doc["points"], [tuple(p) for p in doc.get("specializations", [])]
        )
    except (KeyError, TypeError) as exc:
        raise CategoryError(f"malformed space document: {exc}") from exc


def space_to_json(space: FiniteSpace) -> dict:
    pairs = sorted(
        (x, y)
        for x in space.points
        for y in space.closure[x]
        if x != y
    )
    return {"points": list(space.points), "specializations": [list(p) for p in pairs]}


# ---------------------------------------------------------------------------
# sites


@dataclass(eq=False)
class Site:
    """A finite category with a topology, plus optional provenance.

    Finite-space sites remember their space, the kind of cover used, and the
    subset each object stands for.
    """

    category: FiniteCategory
    topology: Topology
    pretopology: Pretopology | None = None
    space: FiniteSpace | None = None
    kind: str | None = None
    object_points: dict[str, frozenset[str]] | None = None
    # finite-space sites are subcanonical (covering means jointly surjective,
    # so compatible inclusions glue); the flag skips a per-representable check
    assume_subcanonical: bool = False
    _caches: dict = field(default_factory=dict, repr=False, compare=False)

    def generating_families(self, x: str) -> tuple[tuple[str, ...], ...]:
        if self.pretopology is not None:
            return self.pretopology.on(x)
        return tuple(tuple(sorted(s)) for s in sorted(self.topology.covering[x], key=sorted))

    def minimal_open_object(self, x: str) -> str:
        if self.space is None or self.kind != "zariski":
            raise CategoryError("minimal opens need a finite-space open-cover site")
        return subset_name(self.space.minimal_open(x))

    def representable_presheaf(self, u: str):
        from .sheafkit import SetPresheaf

        key = ("rep", u)
        cached = self._caches.get(key)
        if cached is None:
            cat = self.category
            values = {x: frozenset(cat.hom(x, u)) for x in cat.objects}
            restrictions = {
                f: {g: cat.compose(g, f) for g in values[cat.target(f)]}
                for f in cat.morphisms
            }
            cached = SetPresheaf(cat, values, restrictions)
            self._caches[key] = cached
        return cached

    def representable_sheaf(self, u: str):
        from .sheafkit import is_sheaf

        key = ("repsheaf", u)
        cached = self._caches.get(key)
        if cached is None:
            rep = self.representable_presheaf(u)
            if not self.assume_subcanonical and not is_sheaf(rep, self.topology):
                raise CategoryError(
                    "representables are not sheaves on this site; sheafify explicitly"
                )
            cached = rep
            self._caches[key] = cached
        return cached

    def representable_morphism(self, f: str):
        from .sheafkit import SheafMorphism

        key = ("repmor", f)
        cached = self._caches.get(key)
        if cached is None:
            cat = self.category
            src = self.representable_sheaf(cat.source(f))
            tgt = self.representable_sheaf(cat.target(f))
            components = {
                x: {g: cat.compose(f, g) for g in src.values[x]} for x in cat.objects
            }
            cached = SheafMorphism(src, tgt, components)
            self._caches[key] = cached
        return cached


def _space_site(space: FiniteSpace, subsets, kind: str) -> Site:
    names = {s: subset_name(s) for s in subsets}
    elements = [names[s] for s in subsets]
    by_name = {names[s]: s for s in subsets}
    pairs = [
        (names[a], names[b]) for a in subsets for b in subsets if a <= b
    ]
    poset = Poset.from_relations(elements, pairs)
    cat = poset_category(poset)
    fams: list[tuple[str, tuple[str, ...]]] = []
    empty = frozenset()
    for u in subsets:
        nu = names[u]
        proper = [v for v in subsets if v < u]
        for v, w in combinations(proper, 2):
            if v | w == u:
                fams.append((nu, (f"{names[v]}->{nu}", f"{names[w]}->{nu}")))
        # a single proper subset covering u happens only for u itself
    if empty in subsets:
        fams.append((names[empty], ()))
    pre = Pretopology.from_lists(fams)
    topology = generate_topology(cat, pre)
    return Site(
        category=cat,
        topology=topology,
        pretopology=pre,
        space=space,
        kind=kind,
        object_points=dict(by_name),
        assume_subcanonical=True,
    )


def zariski_site(space: FiniteSpace) -> Site:
    """Site of opens with jointly surjective open families as covers."""
    return _space_site(space, space.opens(), "zariski")


def closed_cover_site(space: FiniteSpace) -> Site:
    """Site of closed subsets with jointly surjective closed families as covers."""
    return _space_site(space, space.closed_sets(), "closed")


def subspace_functor(ambient: Site, pts) -> tuple[FunctorData, Site]:
    """The functor ``U -> U ∩ pts`` from an open-cover site to the subspace site.

    Returns the functor together with the subspace's own open-cover site.
    """
    if ambient.space is None or ambient.kind != "zariski":
        raise CategoryError("subspace functors are built over finite-space open sites")
    pts = frozenset(pts)
    sub = zariski_site(ambient.space.subspace(pts))
    ob_map = {}
    for name, subset in ambient.object_points.items():
        ob_map[name] = subset_name(subset & pts)
    mor_map = {}
    cat = ambient.category
    for f, (a, b) in cat.morphisms.items():
        mor_map[f] = sub.category.hom(ob_map[a], ob_map[b])[0]
    u = FunctorData(cat, sub.category, ob_map, mor_map)
    return u, sub
