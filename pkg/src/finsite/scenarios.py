"""Reproducible check drills shared by the command line and the test suite.

Every drill returns a JSON-ready report: a name, one entry per check with a
pass/fail status and a witness on failure, and an overall status.  Sampling
drills take an explicit seed and are deterministic given it.
"""

from __future__ import annotations

import random
from fractions import Fraction

from . import catalogue
from .coverage import (
    FiniteSpace,
    subset_name,
    subspace_functor,
    zariski_site,
)
from .fincat import Sieve
from .prolocal import (
    constant_pro_object,
    cover_detection,
    is_tau_local,
    stalk_points,
)
from .sheafkit import (
    almost_cocontinuity_report,
    direct_image,
    direct_image_morphism,
    epi_failure_witness,
    is_continuous,
    is_epi,
    is_iso,
    is_sheaf,
    stalk_map,
)
from .coverage import is_covering, topology_axiom_report
from . import valuation as val


def _w(x) -> str:
    return repr(x)


def _entry(check: str, ok: bool, witness=None, **extra) -> dict:
    entry = {"check": check, "status": "pass" if ok else "fail"}
    if witness is not None:
        entry["witness"] = _w(witness)
    entry.update(extra)
    return entry


def _report(name: str, entries: list[dict], **extra) -> dict:
    report = {
        "name": name,
        "entries": entries,
        "status": "pass" if all(e["status"] == "pass" for e in entries) else "fail",
    }
    report.update(extra)
    return report


def _map_bijective(table: dict, codomain) -> bool:
    return len(set(table.values())) == len(table) and set(table.values()) == set(codomain)


# ---------------------------------------------------------------------------
# isomorphism detection by stalks


def deligne_drill(space_names=None, samples_per_site: int = 200, seed: int = 0) -> dict:
    """Sampled sheaf morphisms: sheaf-level isomorphy against stalk bijectivity."""
    if space_names is None:
        space_names = ("sierpinski", "vee", "chain3", "crossed_lines")
    entries = []
    total = 0
    for name in space_names:
        site = catalogue.zariski(name)
        spc = catalogue.space(name)
        rng = random.Random((seed, name).__repr__())
        sheaves = catalogue.small_set_sheaves(name)
        for label, F in sheaves:
            if not is_sheaf(F, site.topology):
                entries.append(_entry(f"{name}: catalogue sheaf {label}", False, label))
        pool = []
        pairs = [
            (lF, F, lG, G) for lF, F in sheaves for lG, G in sheaves
        ]
        quota = max(1, samples_per_site // max(1, len(pairs)) + 3)
        for lF, F, lG, G in pairs:
            pool.extend(
                (f"{name}:{lF}->{lG}#{i}", m)
                for i, m in enumerate(catalogue.sample_morphisms(F, G, rng, quota))
            )
        rng.shuffle(pool)
        pool = pool[:samples_per_site] if len(pool) > samples_per_site else pool
        discrepancies = 0
        for label, m in pool:
            iso = is_iso(m, site.topology, check=False)
            stalks_ok = all(
                _map_bijective(stalk_map(m, site, x), m.target.values[site.minimal_open_object(x)])
                for x in spc.points
            )
            if iso != stalks_ok:
                discrepancies += 1
                entries.append(_entry(f"discrepancy {label}", False, (iso, stalks_ok)))
        total += len(pool)
        entries.append(
            _entry(f"{name}: {len(pool)} morphisms, zero discrepancies", discrepancies == 0,
                   sampled=len(pool))
        )
    entries.append(_entry(f"total sampled {total}", total >= samples_per_site))
    return _report("deligne-finite-space", entries, sampled=total)


# ---------------------------------------------------------------------------
# cover detection through points


def cover_detection_drill(spaces=None, max_size: int = 4, full_limit: int = 12) -> dict:
    """Point-level joint surjectivity against the covering test, exhaustively."""
    if spaces is None:
        spaces = [catalogue.space(n) for n in
                  ("point", "sierpinski", "discrete2", "vee", "chain3", "crossed_lines")]
    entries = []
    for spc in spaces:
        site = zariski_site(spc)
        points = stalk_points(site)
        checked = 0
        bad = None
        for target in site.category.objects:
            for fam in catalogue.families_into(site, target, max_size, full_limit):
                detected = cover_detection(points, fam, site, target)
                covering = is_covering(site.topology, fam, target)
                checked += 1
                if detected != covering:
                    bad = (target, fam, detected, covering)
                    break
            if bad:
                break
        label = subset_name(spc.points)
        entries.append(_entry(f"space {label}: {checked} families", bad is None, bad))
    return _report("cover-detection", entries)


# ---------------------------------------------------------------------------
# locality classification


def tau_local_drill(space_names=None) -> dict:
    """Constant pro-objects: minimal opens are local; the whole space is
    local for closed covers exactly on irreducible spaces."""
    if space_names is None:
        space_names = catalogue.space_names()
    entries = []
    for name in space_names:
        spc = catalogue.space(name)
        zsite = catalogue.zariski(name)
        for x in spc.points:
            P = constant_pro_object(zsite.category, zsite.minimal_open_object(x))
            result = is_tau_local(P, zsite)
            entries.append(_entry(f"{name}: minimal open of {x} local", result.local, result.witness))
        csite = catalogue.closed_site(name)
        whole = subset_name(spc.points)
        P = constant_pro_object(csite.category, whole)
        result = is_tau_local(P, csite)
        expected = spc.is_irreducible()
        entries.append(
            _entry(
                f"{name}: whole space local for closed covers iff irreducible "
                f"(irreducible={expected})",
                result.local == expected,
                result.witness if result.local != expected else None,
            )
        )
    return _report("tau-local-classification", entries)


# ---------------------------------------------------------------------------
# almost cocontinuity of closed subspace functors


def almost_cocontinuity_drill(space_names=None) -> dict:
    if space_names is None:
        space_names = catalogue.space_names()
    entries = []
    total_empty_uses = 0
    for name in space_names:
        spc = catalogue.space(name)
        ambient = catalogue.zariski(name)
        for z in spc.closed_sets():
            u, sub = subspace_functor(ambient, z)
            cont = is_continuous(u, ambient.topology, sub.topology, ambient)
            ok, witness, empty_uses = almost_cocontinuity_report(
                u, ambient.topology, sub.topology
            )
            total_empty_uses += empty_uses
            entries.append(
                _entry(
                    f"{name}: closed {subset_name(z)} continuous+almost-cocontinuous",
                    cont and ok,
                    witness if not (cont and ok) else None,
                    empty_clause_uses=empty_uses,
                )
            )
    entries.append(
        _entry(
            f"empty-family clause exercised ({total_empty_uses} times)",
            total_empty_uses >= 1,
        )
    )
    return _report("almost-cocontinuity", entries)


# ---------------------------------------------------------------------------
# pushforward exactness


AB2_PALETTE = ((), (2,), (4,), (2, 2), (8,))
AB3_PALETTE = ((), (3,))


def _sample_epis_on(spc, site, rng, quota, palettes=(AB2_PALETTE, AB3_PALETTE)):
    """Sampled abelian sheaf epimorphisms on a finite-space site.

    Subspaces with up to two points are swept exhaustively; larger ones by
    seeded random sheaves with stalkwise-surjective natural families.
    """
    epis = []
    exhausted_small = len(spc.points) <= 2
    if exhausted_small:
        for palette in palettes:
            sheaves = list(catalogue.enumerate_ab_sheaves(spc, site, palette, limit=24))
            for F in sheaves:
                for G in sheaves:
                    for maps in catalogue.enumerate_ab_morphisms(F, G):
                        if not catalogue.ab_morphism_is_stalk_surjective(F, G, maps):
                            continue
                        m = catalogue.realize_ab_morphism(F, G, maps)
                        epis.append((f"{F.label}->{G.label}", m))
        return epis, True
    attempts = 0
    while len(epis) < quota and attempts < quota * 20:
        attempts += 1
        palette = palettes[rng.randrange(len(palettes))]
        F = catalogue.sample_ab_sheaf(spc, site, palette, rng)
        G = catalogue.sample_ab_sheaf(spc, site, palette, rng)
        if F is None or G is None:
            continue
        maps = catalogue.sample_ab_epi_maps(F, G, rng)
        if maps is None:
            continue
        m = catalogue.realize_ab_morphism(F, G, maps)
        epis.append((f"sampled#{len(epis)}", m))
    return epis, False


def closed_pushforward_drill(space_names=None, min_samples: int = 500, seed: int = 0) -> dict:
    """Pushforward along every closed subspace keeps sampled epis epi."""
    if space_names is None:
        space_names = catalogue.space_names()
    entries = []
    total = 0
    cases = []
    for name in space_names:
        spc = catalogue.space(name)
        for z in spc.closed_sets():
            cases.append((name, z))
    quota = max(4, min_samples // max(1, len(cases)) + 1)
    for name, z in cases:
        spc = catalogue.space(name)
        ambient = catalogue.zariski(name)
        u, sub = subspace_functor(ambient, z)
        subspace = spc.subspace(z)
        rng = random.Random((seed, name, subset_name(z)).__repr__())
        epis, exhausted = _sample_epis_on(subspace, sub, rng, quota)
        failures = []
        for label, m in epis:
            if not is_epi(m, sub.topology, check=False):
                failures.append(("not an epi downstairs", label))
                continue
            FF = direct_image(u, m.source, ambient.topology, sub.topology, check=False)
            GG = direct_image(u, m.target, ambient.topology, sub.topology, check=False)
            pushed = direct_image_morphism(u, m, FF, GG)
            witness = epi_failure_witness(pushed, ambient.topology)
            if witness is not None:
                failures.append((label, witness))
        total += len(epis)
        entries.append(
            _entry(
                f"{name}: closed {subset_name(z)} "
                f"({'exhaustive' if exhausted else 'sampled'}, {len(epis)} epis)",
                not failures,
                failures[:3] if failures else None,
            )
        )
    entries.append(_entry(f"total epis checked {total}", total >= min_samples))
    return _report("closed-pushforward-exact", entries, sampled=total)


def open_pushforward_counterexample(scan_limit: int = 4000) -> dict:
    """A concrete epi on the three-point subspace whose pushforward along the
    open immersion into the crossed-lines space fails to be epi."""
    spc = catalogue.space("crossed_lines")
    ambient = catalogue.zariski("crossed_lines")
    wpts = frozenset({"e", "x", "y"})
    u, wsite = subspace_functor(ambient, wpts)
    wspace = spc.subspace(wpts)
    entries = []
    entries.append(
        _entry("open-subspace functor continuous",
               is_continuous(u, ambient.topology, wsite.topology, ambient))
    )
    ok, witness, _ = almost_cocontinuity_report(u, ambient.topology, wsite.topology)
    entries.append(_entry("open-subspace functor NOT almost cocontinuous", not ok, witness))

    # hand-built exhibit: stalks (Z/2)^2 at the generic point, Z/2 at x and y,
    # mapped onto the constant Z/2 sheaf by summing the coordinates
    F = catalogue.make_ab_sheaf(
        wspace, wsite,
        {"e": (2, 2), "x": (2,), "y": (2,)},
        {("x", "e"): ((1,), (0,)), ("y", "e"): ((0,), (1,))},
        label="twisted",
    )
    G = catalogue.make_ab_sheaf(
        wspace, wsite,
        {"e": (2,), "x": (2,), "y": (2,)},
        {("x", "e"): ((1,),), ("y", "e"): ((1,),)},
        label="constant Z/2",
    )
    maps = {
        "e": {v: ((v[0] + v[1]) % 2,) for v in catalogue.group_elements((2, 2))},
        "x": {v: v for v in catalogue.group_elements((2,))},
        "y": {v: v for v in catalogue.group_elements((2,))},
    }
    m = catalogue.realize_ab_morphism(F, G, maps)
    entries.append(_entry("exhibit is an epi on the subspace",
                          is_epi(m, wsite.topology, check=False)))
    FF = direct_image(u, m.source, ambient.topology, wsite.topology, check=False)
    GG = direct_image(u, m.target, ambient.topology, wsite.topology, check=False)
    pushed = direct_image_morphism(u, m, FF, GG)
    witness = epi_failure_witness(pushed, ambient.topology)
    entries.append(
        _entry("pushforward fails to be epi, witness section emitted",
               witness is not None, None, failing_section=_w(witness))
    )

    # brute-force scan: every two-torsion source sheaf against every sheaf
    # with plain Z/2 stalks; the failing pushforwards must show up
    found = 0
    scanned = 0
    first_found = None
    sources = list(catalogue.enumerate_ab_sheaves(wspace, wsite, ((2,), (2, 2))))
    targets = list(catalogue.enumerate_ab_sheaves(wspace, wsite, ((2,),)))
    done = False
    for F2 in sources:
        for G2 in targets:
            for maps2 in catalogue.enumerate_ab_morphisms(F2, G2):
                if scanned >= scan_limit:
                    done = True
                    break
                if not catalogue.ab_morphism_is_stalk_surjective(F2, G2, maps2):
                    continue
                scanned += 1
                m2 = catalogue.realize_ab_morphism(F2, G2, maps2)
                FF2 = direct_image(u, m2.source, ambient.topology, wsite.topology, check=False)
                GG2 = direct_image(u, m2.target, ambient.topology, wsite.topology, check=False)
                pushed2 = direct_image_morphism(u, m2, FF2, GG2)
                if epi_failure_witness(pushed2, ambient.topology) is not None:
                    found += 1
                    if first_found is None:
                        first_found = (F2.label, G2.label)
            if done:
                break
        if done:
            break
    entries.append(
        _entry(
            f"brute-force scan: {found} failing pushforwards among {scanned} epis",
            found >= 1,
            first_witness=_w(first_found),
        )
    )
    return _report("open-pushforward-counterexample", entries)


# ---------------------------------------------------------------------------
# valuation drills


def blowup_escape_drill(pmax: int = 12, qmax: int = 12, max_n: int = 64) -> dict:
    """Monomial points escape exactly when the dual simulation predicts."""
    entries = []
    mismatches = []
    table = {}
    for p in range(1, pmax + 1):
        for q in range(1, qmax + 1):
            point = val.DVRPoint.of(f"t^{p}", f"t^{q}")
            result = val.lift_dvr_point(point, max_n)
            predicted = val.predicted_escape_step(p, q, max_n)
            got = result.step if isinstance(result, val.Escaped) else None
            table[f"({p},{q})"] = got
            if got != predicted:
                mismatches.append((p, q, got, predicted))
    entries.append(
        _entry(
            f"escape table {pmax}x{qmax} matches the dual-simulation oracle",
            not mismatches,
            mismatches[:5] if mismatches else None,
        )
    )
    trace = val.canonical_rv_trace(max_n)
    entries.append(_entry("canonical point never escapes (values stay positive)",
                          trace.all_positive and not trace.escaped))
    expected_word = val.chart_word_from_continued_fraction(
        val.sqrt2_continued_fraction(max_n), max_n
    )
    entries.append(
        _entry("chart word follows the continued fraction of sqrt(2)",
               trace.chart_word == expected_word)
    )
    entries.append(
        _entry(
            f"chart word eventually periodic (periodicity {trace.periodicity})",
            trace.periodicity is not None and trace.periodicity[1] == 4,
        )
    )
    return _report("blowup-escape", entries, escape_table=table)


def gm_zero_drill(count: int = 100, seed: int = 0) -> dict:
    """The units-or-zero lifting test on field elements and on the local ring."""
    rng = random.Random(seed)
    entries = []
    bad = None
    for i in range(count):
        num = rng.randint(-10**6, 10**6)
        if num == 0:
            num = 1
        den = rng.randint(1, 10**6)
        r = Fraction(num, den)
        outcome = val.unit_or_zero_lift(r, "rational-field")
        if not isinstance(outcome, val.GmLift):
            bad = (str(r), outcome)
            break
    entries.append(_entry(f"{count} seeded nonzero field elements lift as units", bad is None, bad))
    entries.append(
        _entry("zero lifts through the zero section",
               isinstance(val.unit_or_zero_lift(0, "rational-field"), val.ZeroLift))
    )
    outcome = val.unit_or_zero_lift("t", "dvr")
    entries.append(
        _entry("t fails in the local-ring model with witness t",
               isinstance(outcome, val.LiftFail) and outcome.witness == "t",
               None if isinstance(outcome, val.LiftFail) else outcome)
    )
    return _report("gm-zero-family", entries)


def divisibility_drill(primes=(2, 3, 5)) -> dict:
    entries = []
    for l in primes:
        for group in ("Z", "Z+sqrt2Z"):
            outcome = val.divisibility_witness(group, l)
            ok = isinstance(outcome, val.DivisionWitness)
            entries.append(
                _entry(f"{group} has a witness against division by {l}", ok,
                       None if ok else outcome,
                       witness_element=str(outcome.element) if ok else None)
            )
        outcome = val.divisibility_witness("Q", l)
        entries.append(
            _entry(f"Q is divisible by {l}", isinstance(outcome, val.Divisible))
        )
    return _report("divisibility", entries)


# ---------------------------------------------------------------------------
# topology soundness sweep


def topology_soundness_drill(spaces, max_size: int = 4, full_limit: int = 12) -> dict:
    """Axioms plus the joint-surjectivity characterization, per space."""
    entries = []
    for spc in spaces:
        site = zariski_site(spc)
        axioms = topology_axiom_report(site.topology)
        label = subset_name(spc.points)
        if not axioms.ok:
            entries.append(_entry(f"{label}: axioms", False, (axioms.axiom, axioms.witness)))
            continue
        bad = None
        checked = 0
        for target in site.category.objects:
            target_pts = site.object_points[target]
            for fam in catalogue.families_into(site, target, max_size, full_limit):
                union = frozenset()
                for f in fam:
                    union |= site.object_points[site.category.source(f)]
                covering = is_covering(site.topology, fam, target)
                checked += 1
                if covering != (union == target_pts):
                    bad = (target, fam)
                    break
            if bad:
                break
        entries.append(
            _entry(f"{label}: axioms + {checked} families against joint surjectivity",
                   bad is None, bad)
        )
    return _report("topology-soundness", entries)


# ---------------------------------------------------------------------------
# bundled demos


DEMO_NAMES = (
    "deligne-finite-space",
    "cover-detection",
    "closed-pushforward-exact",
    "open-pushforward-counterexample",
    "blowup-escape",
    "gm-zero-family",
    "divisibility",
)


def builtin_demos() -> tuple[str, ...]:
    return DEMO_NAMES


def run_demo(name: str, seed: int = 0, max_n: int = 64) -> dict:
    if name == "deligne-finite-space":
        return deligne_drill(samples_per_site=60, seed=seed)
    if name == "cover-detection":
        return cover_detection_drill()
    if name == "closed-pushforward-exact":
        return closed_pushforward_drill(("sierpinski", "vee", "crossed_lines"),
                                        min_samples=60, seed=seed)
    if name == "open-pushforward-counterexample":
        return open_pushforward_counterexample()
    if name == "blowup-escape":
        return blowup_escape_drill(max_n=max_n)
    if name == "gm-zero-family":
        return gm_zero_drill(seed=seed)
    if name == "divisibility":
        return divisibility_drill()
    raise ValueError(f"unknown demo {name!r}; known: {', '.join(DEMO_NAMES)}")
