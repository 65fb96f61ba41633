"""Finite categories, functors, sieves, and codirected posets.

Everything here is small enough to check by exhaustive enumeration:
categories carry explicit object and morphism lists together with a stored
total composition table, and validation walks every axiom instance.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field


class CategoryError(ValueError):
    """Structurally invalid categorical input."""


@dataclass(frozen=True)
class CategoryReport:
    """Result of an exhaustive axiom sweep.

    ``ok`` is True for a clean pass; otherwise ``axiom`` names the first
    violated law and ``witness`` holds the offending tuple of names.
    """

    ok: bool
    axiom: str | None = None
    witness: tuple | None = None


@dataclass(eq=False)
class FiniteCategory:
    """A finite category with named morphisms and a total composition table.

    ``composition[(g, f)]`` is the composite "g after f" and must be defined
    for exactly the composable pairs.  Morphism identity is by name, so
    parallel morphisms are allowed.  ``poset_down`` is set by
    :func:`poset_category` and enables fast sieve arithmetic on thin sites.
    """

    objects: tuple[str, ...]
    morphisms: dict[str, tuple[str, str]]
    identities: dict[str, str]
    composition: dict[tuple[str, str], str]
    poset_down: dict[str, frozenset[str]] | None = field(
        default=None, repr=False, compare=False
    )
    _caches: dict = field(default_factory=dict, repr=False, compare=False)

    def source(self, f: str) -> str:
        return self.morphisms[f][0]

    def target(self, f: str) -> str:
        return self.morphisms[f][1]

    def identity(self, x: str) -> str:
        return self.identities[x]

    def is_identity(self, f: str) -> bool:
        src, tgt = self.morphisms[f]
        return src == tgt and self.identities.get(src) == f

    def compose(self, g: str, f: str) -> str:
        """Composite of ``f: X -> Y`` followed by ``g: Y -> Z``."""
        try:
            return self.composition[(g, f)]
        except KeyError:
            raise CategoryError(f"no composite stored for ({g!r}, {f!r})") from None

    @property
    def hom_into(self) -> dict[str, tuple[str, ...]]:
        cached = self._caches.get("hom_into")
        if cached is None:
            cached = {x: () for x in self.objects}
            grouped: dict[str, list[str]] = {x: [] for x in self.objects}
            for m in sorted(self.morphisms):
                grouped[self.morphisms[m][1]].append(m)
            cached = {x: tuple(ms) for x, ms in grouped.items()}
            self._caches["hom_into"] = cached
        return cached

    @property
    def hom_from(self) -> dict[str, tuple[str, ...]]:
        cached = self._caches.get("hom_from")
        if cached is None:
            grouped: dict[str, list[str]] = {x: [] for x in self.objects}
            for m in sorted(self.morphisms):
                grouped[self.morphisms[m][0]].append(m)
            cached = {x: tuple(ms) for x, ms in grouped.items()}
            self._caches["hom_from"] = cached
        return cached

    def hom(self, x: str, y: str) -> tuple[str, ...]:
        cached = self._caches.get("hom_pairs")
        if cached is None:
            cached = {}
            for m in sorted(self.morphisms):
                cached.setdefault(self.morphisms[m], []).append(m)
            cached = {k: tuple(v) for k, v in cached.items()}
            self._caches["hom_pairs"] = cached
        return cached.get((x, y), ())

    def is_thin(self) -> bool:
        seen = set()
        for endpoints in self.morphisms.values():
            if endpoints in seen:
                return False
            seen.add(endpoints)
        return True


def validate_category(cat: FiniteCategory) -> CategoryReport:
    """Exhaustively check the category axioms; report the first violation."""
    objset = set(cat.objects)
    for m in sorted(cat.morphisms):
        src, tgt = cat.morphisms[m]
        if src not in objset or tgt not in objset:
            return CategoryReport(False, "morphism-endpoints", (m, src, tgt))
    for x in cat.objects:
        i = cat.identities.get(x)
        if i is None or i not in cat.morphisms or cat.morphisms[i] != (x, x):
            return CategoryReport(False, "identity-assignment", (x, i))
    # the table must be defined on exactly the composable pairs
    for (g, f), h in sorted(cat.composition.items()):
        if g not in cat.morphisms or f not in cat.morphisms or h not in cat.morphisms:
            return CategoryReport(False, "composition-domain", (g, f, h))
        if cat.target(f) != cat.source(g):
            return CategoryReport(False, "composition-domain", (g, f, h))
        if cat.morphisms[h] != (cat.source(f), cat.target(g)):
            return CategoryReport(False, "composition-domain", (g, f, h))
    for f in sorted(cat.morphisms):
        for g in cat.hom_from[cat.target(f)]:
            if (g, f) not in cat.composition:
                return CategoryReport(False, "composition-totality", (g, f))
    for f in sorted(cat.morphisms):
        src, tgt = cat.morphisms[f]
        if cat.compose(cat.identities[tgt], f) != f:
            return CategoryReport(False, "identity-law", (cat.identities[tgt], f))
        if cat.compose(f, cat.identities[src]) != f:
            return CategoryReport(False, "identity-law", (f, cat.identities[src]))
    for f in sorted(cat.morphisms):
        for g in cat.hom_from[cat.target(f)]:
            gf = cat.compose(g, f)
            for h in cat.hom_from[cat.target(g)]:
                if cat.compose(h, gf) != cat.compose(cat.compose(h, g), f):
                    return CategoryReport(False, "associativity", (h, g, f))
    return CategoryReport(True)


@dataclass(frozen=True)
class Sieve:
    """A precomposition-closed set of morphisms into ``target``."""

    target: str
    members: frozenset[str]

    def __contains__(self, name: str) -> bool:
        return name in self.members


def is_sieve(cat: FiniteCategory, s: Sieve) -> bool:
    for f in s.members:
        if cat.target(f) != s.target:
            return False
        for g in cat.hom_into[cat.source(f)]:
            if cat.compose(f, g) not in s.members:
                return False
    return True


def sieve_generated(
    cat: FiniteCategory, family, target: str | None = None
) -> Sieve:
    """Smallest sieve containing ``family``.

    The empty family needs an explicit ``target``; mixed targets in the
    family are rejected.
    """
    family = tuple(family)
    if not family:
        if target is None:
            raise CategoryError("empty family needs an explicit target")
        return Sieve(target, frozenset())
    targets = {cat.target(f) for f in family}
    if len(targets) > 1:
        raise CategoryError(f"family has mixed targets: {sorted(targets)}")
    tgt = targets.pop()
    if target is not None and target != tgt:
        raise CategoryError(f"family target {tgt!r} does not match {target!r}")
    members = frozenset(
        cat.compose(f, g) for f in family for g in cat.hom_into[cat.source(f)]
    )
    return Sieve(tgt, members)


def maximal_sieve(cat: FiniteCategory, x: str) -> Sieve:
    return Sieve(x, frozenset(cat.hom_into[x]))


def empty_sieve(cat: FiniteCategory, x: str) -> Sieve:
    return Sieve(x, frozenset())


def pullback_sieve(cat: FiniteCategory, s: Sieve, h: str) -> Sieve:
    """The sieve ``{ g : h∘g in s }`` on the source of ``h``."""
    if cat.target(h) != s.target:
        raise CategoryError(f"{h!r} does not land in {s.target!r}")
    y = cat.source(h)
    members = frozenset(g for g in cat.hom_into[y] if cat.compose(h, g) in s.members)
    return Sieve(y, members)


def all_sieves(cat: FiniteCategory, x: str) -> tuple[frozenset[str], ...]:
    """Every sieve on ``x``, as member sets.

    Sieves are the downward-closed subsets of the factorization preorder on
    morphisms into ``x`` (f below g when f factors through g), so they are
    enumerated as down-sets of that preorder's poset quotient.
    """
    key = ("sieves", x)
    cached = cat._caches.get(key)
    if cached is not None:
        return cached
    mors = cat.hom_into[x]
    below = {
        g: frozenset(cat.compose(g, h) for h in cat.hom_into[cat.source(g)])
        for g in mors
    }
    # quotient mutual factorization into classes
    rep: dict[str, str] = {}
    for f in sorted(mors):
        if f in rep:
            continue
        rep[f] = f
        for g in sorted(mors):
            if g not in rep and f in below[g] and g in below[f]:
                rep[g] = f
    classes: dict[str, frozenset[str]] = {}
    for f in mors:
        classes[rep[f]] = classes.get(rep[f], frozenset()) | {f}
    reps = sorted(classes)

    def class_le(a: str, b: str) -> bool:
        return a in below[b]

    result = tuple(
        frozenset().union(*(classes[r] for r in ds)) if ds else frozenset()
        for ds in downward_closed_subsets(reps, class_le)
    )
    cat._caches[key] = result
    return result


@dataclass(eq=False)
class FunctorData:
    """A functor given by explicit object and morphism tables."""

    source: FiniteCategory
    target: FiniteCategory
    ob_map: dict[str, str]
    mor_map: dict[str, str]

    def ob(self, x: str) -> str:
        return self.ob_map[x]

    def mor(self, f: str) -> str:
        return self.mor_map[f]


def validate_functor(u: FunctorData) -> CategoryReport:
    """Check totality, endpoint, identity and composition preservation."""
    for x in u.source.objects:
        if u.ob_map.get(x) not in u.target.objects:
            return CategoryReport(False, "object-map", (x, u.ob_map.get(x)))
    for f in sorted(u.source.morphisms):
        uf = u.mor_map.get(f)
        if uf is None or uf not in u.target.morphisms:
            return CategoryReport(False, "morphism-map", (f, uf))
        src, tgt = u.source.morphisms[f]
        if u.target.morphisms[uf] != (u.ob_map[src], u.ob_map[tgt]):
            return CategoryReport(False, "functor-endpoints", (f, uf))
    for x in u.source.objects:
        if u.mor_map[u.source.identities[x]] != u.target.identities[u.ob_map[x]]:
            return CategoryReport(False, "functor-identity", (x,))
    for (g, f), h in sorted(u.source.composition.items()):
        if u.target.compose(u.mor_map[g], u.mor_map[f]) != u.mor_map[h]:
            return CategoryReport(False, "functor-composition", (g, f))
    return CategoryReport(True)


def _transitive_closure(elements, pairs) -> set[tuple[str, str]]:
    rel = {(a, a) for a in elements}
    rel.update(pairs)
    changed = True
    while changed:
        changed = False
        for a, b in list(rel):
            for c, d in list(rel):
                if b == c and (a, d) not in rel:
                    rel.add((a, d))
                    changed = True
    return rel


@dataclass(eq=False)
class Poset:
    """A finite poset; the relation is stored reflexively and transitively closed."""

    elements: tuple[str, ...]
    relation: frozenset[tuple[str, str]]

    @classmethod
    def from_relations(cls, elements, pairs) -> "Poset":
        """Build from Hasse-style pairs ``(a, b)`` meaning ``a <= b``."""
        elements = tuple(elements)
        known = set(elements)
        for a, b in pairs:
            if a not in known or b not in known:
                raise CategoryError(f"relation pair ({a!r}, {b!r}) off the element list")
        rel = _transitive_closure(elements, {(a, b) for a, b in pairs})
        for a, b in rel:
            if a != b and (b, a) in rel:
                raise CategoryError(f"relation is not antisymmetric at ({a!r}, {b!r})")
        return cls(elements, frozenset(rel))

    def le(self, a: str, b: str) -> bool:
        return (a, b) in self.relation

    def down(self, a: str) -> frozenset[str]:
        return frozenset(b for b in self.elements if self.le(b, a))

    def lower_bounds(self, a: str, b: str) -> tuple[str, ...]:
        return tuple(c for c in self.elements if self.le(c, a) and self.le(c, b))

    def bottom(self) -> str | None:
        for a in self.elements:
            if all(self.le(a, b) for b in self.elements):
                return a
        return None

    def comparable_pairs(self) -> tuple[tuple[str, str], ...]:
        return tuple(sorted((a, b) for a, b in self.relation))


def is_codirected_poset(p: Poset) -> bool:
    """True when the poset is non-empty and every pair has a lower bound."""
    if not p.elements:
        return False
    for a in p.elements:
        for b in p.elements:
            if not p.lower_bounds(a, b):
                return False
    return True


def poset_category(p: Poset, name=None) -> FiniteCategory:
    """The thin category of a poset: one morphism ``a -> b`` per ``a <= b``."""
    if name is None:
        name = lambda a, b: f"{a}->{b}"
    morphisms: dict[str, tuple[str, str]] = {}
    mor_of: dict[tuple[str, str], str] = {}
    for a, b in sorted(p.relation):
        m = name(a, b)
        morphisms[m] = (a, b)
        mor_of[(a, b)] = m
    identities = {a: mor_of[(a, a)] for a in p.elements}
    composition: dict[tuple[str, str], str] = {}
    for a, b in sorted(p.relation):
        for c in p.elements:
            if p.le(b, c):
                composition[(mor_of[(b, c)], mor_of[(a, b)])] = mor_of[(a, c)]
    down = {b: frozenset(a for a in p.elements if p.le(a, b)) for b in p.elements}
    return FiniteCategory(
        objects=tuple(p.elements),
        morphisms=morphisms,
        identities=identities,
        composition=composition,
        poset_down=down,
    )


def downward_closed_subsets(elements, le) -> list[frozenset[str]]:
    """All down-sets of a finite poset given by the callable ``le``.

    Elements are processed along a linear extension; each down-set is then
    produced exactly once.
    """
    order = sorted(elements, key=lambda e: (sum(1 for f in elements if le(f, e)), e))
    sets: list[frozenset[str]] = [frozenset()]
    processed: list[str] = []
    for m in order:
        required = frozenset(e for e in processed if le(e, m))
        sets.extend([s | {m} for s in sets if required <= s])
        processed.append(m)
    return sets


def category_to_json(cat: FiniteCategory) -> dict:
    return {
        "objects": list(cat.objects),
        "morphisms": [
            {"name": m, "src": cat.morphisms[m][0], "tgt": cat.morphisms[m][1]}
            for m in sorted(cat.morphisms)
        ],
        "identities": dict(sorted(cat.identities.items())),
        "composition": [
            [g, f, h]
            for (g, f), h in sorted(cat.composition.items())
            if not (cat.is_identity(g) or cat.is_identity(f))
        ],
    }


def category_from_json(doc: dict) -> FiniteCategory:
    """Load a category document; identity composites may be omitted."""
    try:
        objects = tuple(doc["objects"])
        morphisms = {m["name"]: (m["src"], m["tgt"]) for m in doc["morphisms"]}
        identities = dict(doc["identities"])
        composition = {(g, f): h for g, f, h in doc.get("composition", [])}
    except (KeyError, TypeError) as exc:
        raise CategoryError(f"malformed category document: {exc}") from exc
    for f, (src, tgt) in morphisms.items():
        i_src, i_tgt = identities.get(src), identities.get(tgt)
        if i_src in morphisms:
            composition.setdefault((f, i_src), f)
        if i_tgt in morphisms:
            composition.setdefault((i_tgt, f), f)
    return FiniteCategory(objects, morphisms, identities, composition)
