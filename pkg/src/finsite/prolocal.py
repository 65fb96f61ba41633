"""Pro-objects, locality against a topology, and fibre functors.

A pro-object is a diagram over a finite codirected poset.  Hom sets out of a
pro-object and evaluations of its fibre functor are filtered colimits,
computed here as explicit equivalence classes of indexed pairs.  The
neighbourhood category of a fibre functor recovers a pro-object on poset
sites, and conservativity and cover detection drive Deligne-style checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .fincat import (
    CategoryError,
    CategoryReport,
    FiniteCategory,
    Poset,
    is_codirected_poset,
)
from .coverage import Site
from .sheafkit import (
    SetPresheaf,
    SheafMorphism,
    equalizer_presheaf,
    product_presheaf,
    terminal_presheaf,
)


class LocalityError(ValueError):
    """A pro-object failed the locality test; carries the failing cover."""

    def __init__(self, witness):
        super().__init__(f"pro-object is not local: {witness!r}")
        self.witness = witness


@dataclass(eq=False)
class ProObject:
    """A monotone diagram over a finite codirected poset.

    ``transitions[(lam, mu)]`` for ``lam <= mu`` is the morphism
    ``P_lam -> P_mu`` of the site.
    """

    index: Poset
    diagram: dict[str, str]
    transitions: dict[tuple[str, str], str]

    def at(self, lam: str) -> str:
        return self.diagram[lam]


def validate_pro_object(P: ProObject, cat: FiniteCategory) -> CategoryReport:
    if not is_codirected_poset(P.index):
        return CategoryReport(False, "index-codirected", tuple(P.index.elements))
    for lam in P.index.elements:
        if P.diagram.get(lam) not in cat.objects:
            return CategoryReport(False, "diagram-object", (lam,))
    for lam, mu in P.index.comparable_pairs():
        t = P.transitions.get((lam, mu))
        if t is None or t not in cat.morphisms:
            return CategoryReport(False, "transition-missing", (lam, mu))
        if cat.morphisms[t] != (P.diagram[lam], P.diagram[mu]):
            return CategoryReport(False, "transition-endpoints", (lam, mu, t))
    for lam in P.index.elements:
        if P.transitions[(lam, lam)] != cat.identities[P.diagram[lam]]:
            return CategoryReport(False, "transition-identity", (lam,))
    for lam, mu in P.index.comparable_pairs():
        for nu in P.index.elements:
            if P.index.le(mu, nu):
                lhs = cat.compose(P.transitions[(mu, nu)], P.transitions[(lam, mu)])
                if lhs != P.transitions[(lam, nu)]:
                    return CategoryReport(False, "transition-functoriality", (lam, mu, nu))
    return CategoryReport(True)


def constant_pro_object(cat: FiniteCategory, x: str) -> ProObject:
    index = Poset.from_relations(("*",), ())
    return ProObject(index, {"*": x}, {("*", "*"): cat.identities[x]})


def pro_object_from_json(doc: dict, cat: FiniteCategory) -> ProObject:
    """Load a pro-object document; transitions on thin sites may be omitted."""
    try:
        poset_doc = doc["index_poset"]
        index = Poset.from_relations(
            poset_doc["elements"], [tuple(p) for p in poset_doc.get("leq", [])]
        )
        diagram = dict(doc["diagram"])
        transitions = {}
        for key, m in doc.get("transitions", {}).items():
            lam, mu = key.strip("()").split(",")
            transitions[(lam.strip(), mu.strip())] = m
    except (KeyError, TypeError, ValueError) as exc:
        raise CategoryError(f"malformed pro-object document: {exc}") from exc
    for lam, mu in index.comparable_pairs():
        if (lam, mu) not in transitions:
            hom = cat.hom(diagram[lam], diagram[mu])
            if len(hom) == 1:
                transitions[(lam, mu)] = hom[0]
    return ProObject(index, diagram, transitions)


def pro_object_to_json(P: ProObject) -> dict:
    return {
        "index_poset": {
            "elements": list(P.index.elements),
            "leq": [list(p) for p in P.index.comparable_pairs() if p[0] != p[1]],
        },
        "diagram": dict(sorted(P.diagram.items())),
        "transitions": {
            f"({lam},{mu})": m
            for (lam, mu), m in sorted(P.transitions.items())
            if lam != mu
        },
    }


def _colimit_classes(pairs, relations):
    """Equivalence classes of ``pairs`` under generated ``relations``."""
    parent = {p: p for p in pairs}

    def find(p):
        while parent[p] != p:
            parent[p] = parent[parent[p]]
            p = parent[p]
        return p

    def union(p, q):
        rp, rq = find(p), find(q)
        if rp != rq:
            parent[max(rp, rq, key=repr)] = min(rp, rq, key=repr)

    for p, q in relations:
        union(p, q)
    classes: dict = {}
    for p in pairs:
        classes.setdefault(find(p), []).append(p)
    return {rep: frozenset(members) for rep, members in classes.items()}


def hom_pro(P: ProObject, x: str, cat: FiniteCategory):
    """Classes of pairs ``(lam, f: P_lam -> x)`` under transition precomposition.

    Returns ``(classes, class_of)`` where ``class_of`` maps each pair to its
    class, represented as a frozenset of pairs.
    """
    pairs = [
        (lam, f)
        for lam in P.index.elements
        for f in cat.hom(P.diagram[lam], x)
    ]
    relations = []
    for lam, mu in P.index.comparable_pairs():
        if lam == mu:
            continue
        t = P.transitions[(lam, mu)]
        for f in cat.hom(P.diagram[mu], x):
            relations.append(((mu, f), (lam, cat.compose(f, t))))
    classes = _colimit_classes(pairs, relations)
    class_of = {}
    for members in classes.values():
        for p in members:
            class_of[p] = members
    return tuple(sorted(classes.values(), key=repr)), class_of


@dataclass(frozen=True)
class LocalityResult:
    local: bool
    witness: tuple | None = None


def is_tau_local(P: ProObject, site: Site, exhaustive: bool = False) -> LocalityResult:
    """Covers lift against the pro-object.

    Quantifies over the generating families of the site; pass
    ``exhaustive=True`` to quantify over every covering sieve instead (the
    agreement of the two is itself a tested property).
    """
    cat = site.category
    report = validate_pro_object(P, cat)
    if not report.ok:
        raise CategoryError(f"invalid pro-object: {report.axiom} {report.witness}")
    for x in cat.objects:
        if exhaustive:
            families = tuple(
                tuple(sorted(s)) for s in sorted(site.topology.covering[x], key=sorted)
            )
        else:
            families = site.generating_families(x)
        if not families:
            continue
        classes_x, class_of_x = hom_pro(P, x, cat)
        if not classes_x:
            continue
        for fam in families:
            reached = set()
            for u in fam:
                src = cat.source(u)
                for lam in P.index.elements:
                    for h in cat.hom(P.diagram[lam], src):
                        reached.add(class_of_x[(lam, cat.compose(u, h))])
            for cls in classes_x:
                if cls not in reached:
                    return LocalityResult(False, (x, fam, tuple(sorted(cls, key=repr))))
    return LocalityResult(True)


# ---------------------------------------------------------------------------
# fibre functors


class FibreFunctorWitness:
    """Evaluator interface shared by genuine and deliberately broken functors."""

    name: str = "functor"

    def evaluate(self, F: SetPresheaf) -> frozenset:
        raise NotImplementedError

    def evaluate_map(self, m: SheafMorphism) -> dict:
        raise NotImplementedError

    def cover_image(self, site: Site, f: str) -> frozenset:
        """Image of the functor on a representable morphism, memoized."""
        cache = getattr(self, "_image_cache", None)
        if cache is None:
            cache = {}
            self._image_cache = cache
        got = cache.get(f)
        if got is None:
            got = frozenset(self.evaluate_map(site.representable_morphism(f)).values())
            cache[f] = got
        return got


class ProPoint(FibreFunctorWitness):
    """The fibre functor of a pro-object: filtered-colimit evaluation."""

    def __init__(self, P: ProObject, site: Site, name: str | None = None):
        self.pro = P
        self.site = site
        self.name = name or "point"
        self._cache: dict[int, tuple] = {}
        self._map_cache: dict[int, dict] = {}

    def _classes(self, F: SetPresheaf):
        # the keyed object is retained so a recycled id cannot alias it
        hit = self._cache.get(id(F))
        if hit is not None and hit[0] is F:
            return hit[1]
        P = self.pro
        pairs = [
            (lam, a) for lam in P.index.elements for a in F.values[P.diagram[lam]]
        ]
        relations = []
        for lam, mu in P.index.comparable_pairs():
            if lam == mu:
                continue
            t = P.transitions[(lam, mu)]
            for a in F.values[P.diagram[mu]]:
                relations.append(((mu, a), (lam, F.restrict(t, a))))
        classes = _colimit_classes(pairs, relations)
        class_of = {}
        for members in classes.values():
            for p in members:
                class_of[p] = members
        got = (frozenset(classes.values()), class_of)
        self._cache[id(F)] = (F, got)
        return got

    def evaluate(self, F: SetPresheaf) -> frozenset:
        return self._classes(F)[0]

    def evaluate_map(self, m: SheafMorphism) -> dict:
        hit = self._map_cache.get(id(m))
        if hit is not None and hit[0] is m:
            return hit[1]
        src_classes, _ = self._classes(m.source)
        _, tgt_class_of = self._classes(m.target)
        table = {}
        for cls in src_classes:
            lam, a = min(cls, key=repr)
            table[cls] = tgt_class_of[(lam, m.at(self.pro.diagram[lam], a))]
        self._map_cache[id(m)] = (m, table)
        return table


class ProductFunctor(FibreFunctorWitness):
    """Pairwise product of two evaluators; preserves limits, breaks covers."""

    def __init__(self, w1: FibreFunctorWitness, w2: FibreFunctorWitness):
        self.w1, self.w2 = w1, w2
        self.name = f"({w1.name} x {w2.name})"

    def evaluate(self, F):
        return frozenset(
            (a, b) for a in self.w1.evaluate(F) for b in self.w2.evaluate(F)
        )

    def evaluate_map(self, m):
        t1, t2 = self.w1.evaluate_map(m), self.w2.evaluate_map(m)
        return {(a, b): (t1[a], t2[b]) for a in t1 for b in t2}


class DisjointUnionFunctor(FibreFunctorWitness):
    """Tagged union of two evaluators; breaks terminal-object preservation."""

    def __init__(self, w1: FibreFunctorWitness, w2: FibreFunctorWitness):
        self.w1, self.w2 = w1, w2
        self.name = f"({w1.name} + {w2.name})"

    def evaluate(self, F):
        return frozenset(
            {(0, a) for a in self.w1.evaluate(F)}
            | {(1, b) for b in self.w2.evaluate(F)}
        )

    def evaluate_map(self, m):
        t1, t2 = self.w1.evaluate_map(m), self.w2.evaluate_map(m)
        table = {(0, a): (0, t1[a]) for a in t1}
        table.update({(1, b): (1, t2[b]) for b in t2})
        return table


def fibre_functor(P: ProObject, site: Site, name: str | None = None) -> ProPoint:
    """Colimit evaluator of a local pro-object; non-local input is rejected."""
    result = is_tau_local(P, site)
    if not result.local:
        raise LocalityError(result.witness)
    return ProPoint(P, site, name)


def evaluation_at(site: Site, u: str) -> ProPoint:
    """Evaluation at an object, as the raw evaluator of the constant
    pro-object there; no locality check, so it need not be a fibre functor."""
    return ProPoint(constant_pro_object(site.category, u), site, name=f"ev@{u}")


def stalk_point(site: Site, x: str) -> ProPoint:
    """The stalk functor at a point of a finite-space open-cover site."""
    u = site.minimal_open_object(x)
    P = constant_pro_object(site.category, u)
    point = fibre_functor(P, site, name=f"stalk@{x}")
    return point


def stalk_points(site: Site) -> list[ProPoint]:
    return [stalk_point(site, x) for x in sorted(site.space.points)]


@dataclass(frozen=True)
class FibreAxiomEntry:
    check: str
    ok: bool
    witness: tuple | None


@dataclass(frozen=True)
class FibreAxiomReport:
    entries: tuple[FibreAxiomEntry, ...]

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.entries)

    def failing(self) -> tuple[str, ...]:
        return tuple(e.check for e in self.entries if not e.ok)


def check_fibre_axioms(
    w: FibreFunctorWitness,
    site: Site,
    sheaves,
    parallel_pairs=(),
) -> FibreAxiomReport:
    """Preservation of terminal object, binary products, equalizers, and covers."""
    entries = []
    cat = site.category
    top = terminal_presheaf(cat)
    ok = len(w.evaluate(top)) == 1
    entries.append(FibreAxiomEntry("terminal", ok, None if ok else ("terminal",)))

    sheaves = tuple(sheaves)
    for i, F in enumerate(sheaves):
        for j, G in enumerate(sheaves):
            if j < i:
                continue
            P, p1, p2 = product_presheaf(F, G)
            t1, t2 = w.evaluate_map(p1), w.evaluate_map(p2)
            pairs = {(t1[c], t2[c]) for c in w.evaluate(P)}
            full = {(a, b) for a in w.evaluate(F) for b in w.evaluate(G)}
            injective = len(pairs) == len(w.evaluate(P))
            ok = injective and pairs == full
            entries.append(
                FibreAxiomEntry(
                    "binary-product", ok, None if ok else (f"pair {i},{j}",)
                )
            )

    for label, (m1, m2) in parallel_pairs:
        E, inc = equalizer_presheaf(m1, m2)
        t_inc = w.evaluate_map(inc)
        image = {t_inc[c] for c in w.evaluate(E)}
        tm1, tm2 = w.evaluate_map(m1), w.evaluate_map(m2)
        expected = {a for a in w.evaluate(m1.source) if tm1[a] == tm2[a]}
        injective = len(image) == len(w.evaluate(E))
        ok = injective and image == expected
        entries.append(
            FibreAxiomEntry("equalizer", ok, None if ok else (label,))
        )

    for x in cat.objects:
        rep_x = site.representable_sheaf(x)
        for fam in site.generating_families(x):
            reached = set()
            for u in fam:
                t = w.evaluate_map(site.representable_morphism(u))
                reached |= set(t.values())
            ok = reached >= w.evaluate(rep_x)
            if not ok:
                entries.append(
                    FibreAxiomEntry("covering-families", False, (x, fam))
                )
                break
        else:
            continue
        break
    else:
        entries.append(FibreAxiomEntry("covering-families", True, None))
    return FibreAxiomReport(tuple(entries))


@dataclass(frozen=True)
class NeighbourhoodReport:
    cofiltered: bool
    witness: tuple | None
    pro: ProObject | None
    node_sections: dict | None


def neighbourhood_category(w: FibreFunctorWitness, site: Site) -> NeighbourhoodReport:
    """The category of pairs (object, section of the functor there).

    On poset sites this is a poset; when it is codirected its projection to
    the site is a pro-object realizing the functor.  A failure of
    codirectedness is reported with a witness pair and signals that the
    evaluator was not a fibre functor.
    """
    cat = site.category
    if cat.poset_down is None:
        raise CategoryError("neighbourhood categories are built over poset sites")
    nodes = []
    section_of = {}
    for x in sorted(cat.objects):
        for k, s in enumerate(sorted(w.evaluate(site.representable_sheaf(x)), key=repr)):
            name = f"{x}#{k}"
            nodes.append((name, x, s))
            section_of[name] = (x, s)
    rep_maps = {
        f: w.evaluate_map(site.representable_morphism(f)) for f in cat.morphisms
    }
    pairs = []
    for n1, x1, s1 in nodes:
        for n2, x2, s2 in nodes:
            hom = cat.hom(x1, x2)
            if hom and rep_maps[hom[0]][s1] == s2:
                pairs.append((n1, n2))
    index = Poset.from_relations([n for n, _, _ in nodes], pairs)
    if not index.elements:
        return NeighbourhoodReport(False, ("empty",), None, None)
    for a in index.elements:
        for b in index.elements:
            if not index.lower_bounds(a, b):
                return NeighbourhoodReport(False, (section_of[a], section_of[b]), None, None)
    diagram = {n: x for n, x, _ in nodes}
    transitions = {}
    for a, b in index.comparable_pairs():
        transitions[(a, b)] = cat.hom(diagram[a], diagram[b])[0]
    pro = ProObject(index, diagram, transitions)
    return NeighbourhoodReport(True, None, pro, {n: s for n, _, s in nodes})


def neighbourhood_round_trip(point: ProPoint, site: Site, sheaves) -> bool:
    """Recover a pro-object from the functor and compare evaluations.

    The comparison map sends a class of (node, section) pairs to the class
    obtained by restricting the section along a representative of the node's
    own section class; agreement means bijectivity on every test sheaf.
    """
    report = neighbourhood_category(point, site)
    if not report.cofiltered:
        return False
    pro2 = report.pro
    point2 = ProPoint(pro2, site, name=point.name + "~roundtrip")
    for F in sheaves:
        classes2, _ = point2._classes(F)
        _, class_of = point._classes(F)
        images = set()
        for cls in classes2:
            node, a = min(cls, key=repr)
            section_class = report.node_sections[node]
            lam, f = min(section_class, key=repr)
            images.add(class_of[(lam, F.restrict(f, a))])
        if len(images) != len(classes2) or images != set(point.evaluate(F)):
            return False
    return True


@dataclass(frozen=True)
class ConservativityEntry:
    label: str
    iso: bool
    point_bijective: tuple[tuple[str, bool], ...]
    agree: bool


@dataclass(frozen=True)
class ConservativityReport:
    entries: tuple[ConservativityEntry, ...]

    @property
    def ok(self) -> bool:
        return all(e.agree for e in self.entries)

    def discrepancies(self) -> tuple[ConservativityEntry, ...]:
        return tuple(e for e in self.entries if not e.agree)


def _map_bijective(table: dict, codomain) -> bool:
    return len(set(table.values())) == len(table) and set(table.values()) == set(codomain)


def conservativity_check(points, morphisms, site: Site) -> ConservativityReport:
    """Compare sheaf-level isomorphy with bijectivity at every given point."""
    from .sheafkit import is_iso

    entries = []
    for label, m in morphisms:
        iso = is_iso(m, site.topology, check=False)
        per_point = []
        for w in points:
            table = w.evaluate_map(m)
            per_point.append((w.name, _map_bijective(table, w.evaluate(m.target))))
        agree = iso == all(ok for _, ok in per_point)
        entries.append(ConservativityEntry(label, iso, tuple(per_point), agree))
    return ConservativityReport(tuple(entries))


def cover_detection(points, family, site: Site, target: str | None = None) -> bool:
    """True when every point sends the family to a jointly surjective one."""
    cat = site.category
    family = tuple(family)
    if target is None:
        targets = {cat.target(f) for f in family}
        if len(targets) != 1:
            raise CategoryError("cover detection needs a single target")
        target = targets.pop()
    rep_target = site.representable_sheaf(target)
    for w in points:
        needed = w.evaluate(rep_target)
        reached = set()
        for u in family:
            reached |= w.cover_image(site, u)
        if not reached >= needed:
            return False
    return True
