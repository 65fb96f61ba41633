"""Command-line runner: file-driven checks with machine-readable reports.

Reports are JSON with a top-level ``"schema": 1`` field.  Exit status 0
means every check passed, 1 means some check failed, and 2 marks parse or
validation errors (reported with file context).
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from . import catalogue, scenarios
from . import valuation as val
from .coverage import (
    Site,
    closed_cover_site,
    generate_topology,
    is_covering,
    join_topologies,
    pretopology_from_json,
    space_from_json,
    subspace_functor,
    topology_axiom_report,
    zariski_site,
)
from .fincat import CategoryError, category_from_json, validate_category
from .prolocal import (
    LocalityError,
    conservativity_check,
    cover_detection,
    fibre_functor,
    is_tau_local,
    pro_object_from_json,
    stalk_points,
)
from .sheafkit import (
    AbPresheaf,
    direct_image,
    direct_image_morphism,
    epi_failure_witness,
    is_epi,
    is_iso,
    is_mono,
    is_sheaf,
    morphism_from_json,
    morphism_bijective,
    sheaf_from_json,
    sheafify,
    sheafify_unit,
    validate_morphism,
    validate_presheaf,
)

SCHEMA = 1


class InputError(ValueError):
    """A scenario or document failed to parse or validate."""


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as exc:
        raise InputError(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def _resolve_space(spec):
    """A catalogue name, a path to a space document, or an inline document."""
    if isinstance(spec, dict):
        return space_from_json(spec)
    if spec in catalogue.space_names():
        return catalogue.space(spec)
    return space_from_json(_load_json(spec))


def _site_for(space, cover: str) -> Site:
    if cover == "zariski":
        return zariski_site(space)
    if cover == "closed":
        return closed_cover_site(space)
    raise InputError(f"unknown cover kind {cover!r}; use zariski or closed")


def _emit(report: dict, out: str | None) -> int:
    text = json.dumps(report, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
        print(f"report written to {out}")
    else:
        print(text)
    if report.get("status") == "pass":
        return 0
    return 1


def _wrap(name: str, seed: int, entries, **extra) -> dict:
    report = {
        "schema": SCHEMA,
        "name": name,
        "seed": seed,
        "entries": entries,
        "status": "pass" if all(e.get("status") == "pass" for e in entries) else "fail",
    }
    report.update(extra)
    return report


def _presheaf_of(site, doc):
    loaded = sheaf_from_json(site.category, doc)
    if isinstance(loaded, AbPresheaf):
        loaded = loaded.to_set_presheaf()
    report = validate_presheaf(loaded)
    if not report.ok:
        raise InputError(f"presheaf invalid: {report.axiom} at {report.witness}")
    return loaded


# ---------------------------------------------------------------------------
# command handlers


def _cmd_site(args) -> int:
    if args.action == "validate":
        cat = category_from_json(_load_json(args.category))
        report = validate_category(cat)
        entries = [
            {
                "check": "category-axioms",
                "status": "pass" if report.ok else "fail",
                **({} if report.ok else {"witness": repr((report.axiom, report.witness))}),
            }
        ]
        return _emit(_wrap("site-validate", args.seed, entries), args.out)
    if args.action == "topology":
        cat = category_from_json(_load_json(args.category))
        vreport = validate_category(cat)
        if not vreport.ok:
            raise InputError(f"category invalid: {vreport.axiom} at {vreport.witness}")
        pre = pretopology_from_json(_load_json(args.pretopology))
        topology = generate_topology(cat, pre)
        axioms = topology_axiom_report(topology)
        entries = [
            {
                "check": "topology-axioms",
                "status": "pass" if axioms.ok else "fail",
                "covering_counts": {x: len(topology.covering[x]) for x in cat.objects},
            }
        ]
        return _emit(_wrap("site-topology", args.seed, entries), args.out)
    if args.action == "join":
        cat = category_from_json(_load_json(args.category))
        pre1 = pretopology_from_json(_load_json(args.pretopology))
        pre2 = pretopology_from_json(_load_json(args.pretopology2))
        t1 = generate_topology(cat, pre1)
        t2 = generate_topology(cat, pre2)
        joined = join_topologies(t1, t2)
        axioms = topology_axiom_report(joined)
        finer = all(
            t1.covering[x] <= joined.covering[x] and t2.covering[x] <= joined.covering[x]
            for x in cat.objects
        )
        entries = [
            {"check": "join-axioms", "status": "pass" if axioms.ok else "fail"},
            {"check": "join-finer-than-both", "status": "pass" if finer else "fail",
             "covering_counts": {x: len(joined.covering[x]) for x in cat.objects}},
        ]
        return _emit(_wrap("site-join", args.seed, entries), args.out)
    raise InputError(f"unknown site action {args.action!r}")


def _cmd_sheaf(args) -> int:
    space = _resolve_space(args.space)
    site = _site_for(space, args.cover)
    if args.action == "sheafify":
        F = _presheaf_of(site, _load_json(args.sheaf))
        sF = sheafify(F, site.topology)
        unit = sheafify_unit(F, site.topology)
        entries = [
            {"check": "sheafified-is-sheaf",
             "status": "pass" if is_sheaf(sF, site.topology) else "fail",
             "section_counts": {x: len(sF.values[x]) for x in site.category.objects}},
            {"check": "unit-iso-iff-sheaf",
             "status": "pass"
             if morphism_bijective(unit) == is_sheaf(F, site.topology) else "fail"},
        ]
        return _emit(_wrap("sheafify", args.seed, entries), args.out)
    if args.action == "is-sheaf":
        F = _presheaf_of(site, _load_json(args.sheaf))
        ok = is_sheaf(F, site.topology)
        entries = [{"check": "is-sheaf", "status": "pass" if ok else "fail"}]
        return _emit(_wrap("is-sheaf", args.seed, entries), args.out)
    if args.action == "morphism-check":
        F = _presheaf_of(site, _load_json(args.source))
        G = _presheaf_of(site, _load_json(args.target))
        m = morphism_from_json(F, G, _load_json(args.morphism))
        mreport = validate_morphism(m)
        if not mreport.ok:
            raise InputError(f"morphism invalid: {mreport.axiom} at {mreport.witness}")
        entries = [
            {"check": "mono", "status": "pass" if is_mono(m, site.topology) else "fail"},
            {"check": "epi", "status": "pass" if is_epi(m, site.topology) else "fail"},
            {"check": "iso", "status": "pass" if is_iso(m, site.topology) else "fail"},
        ]
        report = _wrap("morphism-check", args.seed, entries)
        # informational: the three verdicts are the payload, not a failure
        report["status"] = "pass"
        return _emit(report, args.out)
    raise InputError(f"unknown sheaf action {args.action!r}")


def _cmd_points(args) -> int:
    space = _resolve_space(args.space)
    site = _site_for(space, args.cover)
    if args.action == "local":
        P = pro_object_from_json(_load_json(args.pro), site.category)
        result = is_tau_local(P, site)
        entries = [
            {"check": "tau-local", "status": "pass" if result.local else "fail",
             **({} if result.local else {"witness": repr(result.witness)})}
        ]
        report = _wrap("points-local", args.seed, entries)
        report["local"] = result.local
        report["status"] = "pass"
        return _emit(report, args.out)
    if args.action == "fibre":
        P = pro_object_from_json(_load_json(args.pro), site.category)
        try:
            point = fibre_functor(P, site)
        except LocalityError as exc:
            raise InputError(f"pro-object is not local: {exc.witness!r}") from exc
        F = _presheaf_of(site, _load_json(args.sheaf))
        classes = point.evaluate(F)
        entries = [{"check": "fibre-evaluation", "status": "pass",
                    "cardinality": len(classes)}]
        return _emit(_wrap("points-fibre", args.seed, entries), args.out)
    if args.action == "conservativity":
        report = scenarios.deligne_drill(
            (args.space,) if args.space in catalogue.space_names() else None,
            samples_per_site=args.samples,
            seed=args.seed,
        )
        return _emit(_wrap(report["name"], args.seed, report["entries"]), args.out)
    if args.action == "detect-cover":
        members = tuple(m for m in args.members.split(",") if m)
        points = stalk_points(site)
        detected = cover_detection(points, members, site, args.target)
        covering = is_covering(site.topology, members, args.target)
        entries = [
            {"check": "detection-agrees-with-covering",
             "status": "pass" if detected == covering else "fail",
             "detected": detected, "covering": covering}
        ]
        return _emit(_wrap("detect-cover", args.seed, entries), args.out)
    raise InputError(f"unknown points action {args.action!r}")


def _cmd_pushforward(args) -> int:
    space = _resolve_space(args.space)
    site = zariski_site(space)
    if bool(args.closed) == bool(args.open):
        raise InputError("pass exactly one of --closed or --open")
    pts = frozenset((args.closed or args.open).split(","))
    if args.closed and not space.is_closed(pts):
        raise InputError(f"{sorted(pts)} is not closed in the space")
    if args.open and not space.is_open(pts):
        raise InputError(f"{sorted(pts)} is not open in the space")
    u, sub = subspace_functor(site, pts)
    subspace = space.subspace(pts)
    rng = random.Random(args.seed)
    epis, exhausted = scenarios._sample_epis_on(subspace, sub, rng, args.samples)
    entries = []
    failures = 0
    for label, m in epis:
        FF = direct_image(u, m.source, site.topology, sub.topology, check=False)
        GG = direct_image(u, m.target, site.topology, sub.topology, check=False)
        pushed = direct_image_morphism(u, m, FF, GG)
        witness = epi_failure_witness(pushed, site.topology)
        if witness is not None:
            failures += 1
            if failures <= 3:
                entries.append({"check": f"preserved {label}", "status": "fail",
                                "witness": repr(witness)})
    entries.append({
        "check": f"pushforward epi preservation "
        f"({'exhaustive' if exhausted else 'sampled'}, {len(epis)} epis, {failures} failures)",
        "status": "pass" if failures == 0 else "fail",
    })
    return _emit(_wrap("pushforward-check", args.seed, entries), args.out)


def _cmd_val(args) -> int:
    if args.action == "value":
        poly = val.parse_polynomial(args.expr)
        result = val.value(poly)
        report = {"schema": SCHEMA, "op": "value", "input": args.expr,
                  "result": str(result), "status": "pass"}
        return _emit(report, args.out)
    if args.action == "member":
        rf = val.parse_rational_fn(args.expr)
        cls = val.rv_membership(rf)
        v = None if rf.is_zero() else str(val.value_of_fraction(rf))
        report = {"schema": SCHEMA, "op": "member", "input": args.expr,
                  "result": cls, "value": v, "status": "pass"}
        return _emit(report, args.out)
    if args.action == "centers":
        steps = val.center_sequence(args.max_n)
        trace = [
            {"step": i, "chart": s.letter, "beta": str(s.beta), "gamma": str(s.gamma)}
            for i, s in enumerate(steps)
        ]
        report = {"schema": SCHEMA, "op": "centers", "input": args.max_n,
                  "result": "".join(s.letter for s in steps if s.letter),
                  "trace": trace, "status": "pass"}
        return _emit(report, args.out)
    if args.action == "escape":
        point = val.DVRPoint.of(args.a, args.b)
        outcome = val.lift_dvr_point(point, args.max_n)
        if isinstance(outcome, val.Escaped):
            result = {"escaped": True, "step": outcome.step,
                      "reason": outcome.reason, "witness": outcome.witness,
                      "word": outcome.word}
        else:
            result = {"escaped": False, "max_n": outcome.max_n, "word": outcome.word}
        report = {"schema": SCHEMA, "op": "escape", "input": [args.a, args.b],
                  "result": result, "status": "pass"}
        return _emit(report, args.out)
    if args.action == "rv-trace":
        trace = val.canonical_rv_trace(args.max_n)
        ok = trace.all_positive and trace.periodicity is not None
        report = {
            "schema": SCHEMA, "op": "rv-trace", "input": args.max_n,
            "result": {"chart_word": trace.chart_word,
                       "all_positive": trace.all_positive,
                       "periodicity": list(trace.periodicity or ())},
            "trace": [
                {"step": i, "chart": s.letter, "beta": str(s.beta), "gamma": str(s.gamma)}
                for i, s in enumerate(trace.steps)
            ],
            "status": "pass" if ok else "fail",
        }
        return _emit(report, args.out)
    if args.action == "gm-zero":
        outcome = val.unit_or_zero_lift(args.expr, args.model)
        result = type(outcome).__name__
        report = {"schema": SCHEMA, "op": "gm-zero", "input": args.expr,
                  "model": args.model, "result": result, "status": "pass"}
        if isinstance(outcome, val.LiftFail):
            report["witness"] = outcome.witness
        return _emit(report, args.out)
    if args.action == "divisible":
        outcome = val.divisibility_witness(args.group, args.prime)
        if isinstance(outcome, val.Divisible):
            result = {"divisible": True}
        else:
            result = {"divisible": False, "witness": str(outcome.element)}
        report = {"schema": SCHEMA, "op": "divisible",
                  "input": {"group": args.group, "prime": args.prime},
                  "result": result, "status": "pass"}
        return _emit(report, args.out)
    raise InputError(f"unknown val action {args.action!r}")


def _cmd_demo(args) -> int:
    if not args.name:
        report = {"schema": SCHEMA, "op": "demo-list",
                  "result": list(scenarios.builtin_demos()), "status": "pass"}
        return _emit(report, args.out)
    try:
        inner = scenarios.run_demo(args.name, seed=args.seed, max_n=args.max_n)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    return _emit(_wrap(inner["name"], args.seed, inner["entries"]), args.out)


# ---------------------------------------------------------------------------
# scenario files


_CHECK_OPS = {}


def _check_op(name):
    def register(fn):
        _CHECK_OPS[name] = fn
        return fn
    return register


@_check_op("validate_category")
def _op_validate_category(inputs, params, seed, max_n):
    report = validate_category(inputs["category"])
    return {"check": "validate_category",
            "status": "pass" if report.ok else "fail",
            **({} if report.ok else {"witness": repr((report.axiom, report.witness))})}


@_check_op("topology_axioms")
def _op_topology_axioms(inputs, params, seed, max_n):
    topology = generate_topology(inputs["category"], inputs["pretopology"])
    report = topology_axiom_report(topology)
    return {"check": "topology_axioms", "status": "pass" if report.ok else "fail"}


@_check_op("is_covering")
def _op_is_covering(inputs, params, seed, max_n):
    site = inputs["site"]
    covering = is_covering(site.topology, tuple(params["members"]), params["target"])
    expected = params.get("expected")
    ok = covering if expected is None else covering == expected
    return {"check": "is_covering", "status": "pass" if ok else "fail",
            "covering": covering}


@_check_op("is_sheaf")
def _op_is_sheaf(inputs, params, seed, max_n):
    ok = is_sheaf(inputs["sheaf"], inputs["site"].topology)
    expected = params.get("expected", True)
    return {"check": "is_sheaf", "status": "pass" if ok == expected else "fail",
            "is_sheaf": ok}


@_check_op("sheafify_is_sheaf")
def _op_sheafify(inputs, params, seed, max_n):
    site = inputs["site"]
    sF = sheafify(inputs["sheaf"], site.topology)
    return {"check": "sheafify_is_sheaf",
            "status": "pass" if is_sheaf(sF, site.topology) else "fail"}


@_check_op("is_tau_local")
def _op_is_tau_local(inputs, params, seed, max_n):
    result = is_tau_local(inputs["pro"], inputs["site"])
    expected = params.get("expected", True)
    return {"check": "is_tau_local",
            "status": "pass" if result.local == expected else "fail",
            "local": result.local}


@_check_op("detect_cover")
def _op_detect_cover(inputs, params, seed, max_n):
    site = inputs["site"]
    points = stalk_points(site)
    members = tuple(params["members"])
    detected = cover_detection(points, members, site, params["target"])
    covering = is_covering(site.topology, members, params["target"])
    return {"check": "detect_cover",
            "status": "pass" if detected == covering else "fail",
            "detected": detected, "covering": covering}


@_check_op("canonical_rv_trace")
def _op_rv_trace(inputs, params, seed, max_n):
    n = params.get("n", max_n)
    trace = val.canonical_rv_trace(n)
    ok = trace.all_positive and trace.periodicity is not None
    return {"check": "canonical_rv_trace", "status": "pass" if ok else "fail",
            "chart_word": trace.chart_word,
            "periodicity": list(trace.periodicity or ())}


@_check_op("lift_dvr_point")
def _op_lift(inputs, params, seed, max_n):
    point = val.DVRPoint.of(params["a"], params["b"])
    outcome = val.lift_dvr_point(point, params.get("max_n", max_n))
    escaped = isinstance(outcome, val.Escaped)
    expected = params.get("expected_step")
    ok = (outcome.step == expected) if (escaped and expected is not None) else escaped
    return {"check": "lift_dvr_point", "status": "pass" if ok else "fail",
            "escaped": escaped, "step": outcome.step if escaped else None}


@_check_op("divisibility_witness")
def _op_divisible(inputs, params, seed, max_n):
    outcome = val.divisibility_witness(params["group"], params["prime"])
    divisible = isinstance(outcome, val.Divisible)
    expected = params.get("expected_divisible", False)
    return {"check": "divisibility_witness",
            "status": "pass" if divisible == expected else "fail"}


@_check_op("demo")
def _op_demo(inputs, params, seed, max_n):
    inner = scenarios.run_demo(params["name"], seed=seed, max_n=max_n)
    return {"check": f"demo:{params['name']}", "status": inner["status"],
            "entries": inner["entries"]}


def _load_scenario_inputs(doc: dict, base: Path) -> dict:
    """Parse and validate every referenced document before any check runs."""
    inputs = {}
    raw = doc.get("inputs", {})

    def fetch(spec):
        if isinstance(spec, dict):
            return spec
        path = Path(spec)
        if not path.is_absolute():
            path = base / path
        return _load_json(str(path))

    if "category" in raw:
        cat = category_from_json(fetch(raw["category"]))
        report = validate_category(cat)
        if not report.ok:
            raise InputError(f"category invalid: {report.axiom} at {report.witness}")
        inputs["category"] = cat
    if "pretopology" in raw:
        inputs["pretopology"] = pretopology_from_json(fetch(raw["pretopology"]))
    if "space" in raw:
        spec = raw["space"]
        if isinstance(spec, str) and spec in catalogue.space_names():
            space = catalogue.space(spec)
        else:
            space = space_from_json(fetch(spec))
        inputs["space"] = space
        cover = doc.get("cover", "zariski")
        inputs["site"] = _site_for(space, cover)
    if "sheaf" in raw:
        if "site" not in inputs:
            raise InputError("a sheaf input needs a space input")
        inputs["sheaf"] = _presheaf_of(inputs["site"], fetch(raw["sheaf"]))
    if "pro" in raw:
        if "site" not in inputs:
            raise InputError("a pro-object input needs a space input")
        inputs["pro"] = pro_object_from_json(fetch(raw["pro"]), inputs["site"].category)
    return inputs


def _cmd_run(args) -> int:
    doc = _load_json(args.scenario)
    base = Path(args.scenario).resolve().parent
    name = doc.get("name", Path(args.scenario).stem)
    inputs = _load_scenario_inputs(doc, base)
    entries = []
    for check in doc.get("checks", []):
        op = check.get("op")
        handler = _CHECK_OPS.get(op)
        if handler is None:
            raise InputError(f"unknown check op {op!r}")
        try:
            entries.append(handler(inputs, check, args.seed, args.max_n))
        except (CategoryError, val.ValuationError, KeyError) as exc:
            entries.append({"check": op, "status": "error", "error": str(exc)})
    status = "pass" if all(e["status"] == "pass" for e in entries) else "fail"
    report = {"schema": SCHEMA, "name": name, "seed": args.seed,
              "entries": entries, "status": status}
    out = args.out or doc.get("output")
    return _emit(report, out)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="finsite",
        description="Finite Grothendieck sites and an exact valuation laboratory",
    )
    parser.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
    parser.add_argument("--out", default=None, help="write the JSON report here")
    parser.add_argument("--max-n", type=int, default=64, dest="max_n",
                        help="horizon for tower computations")
    sub = parser.add_subparsers(dest="group", required=True)

    site = sub.add_parser("site", help="categories, pretopologies, topologies")
    site_sub = site.add_subparsers(dest="action", required=True)
    p = site_sub.add_parser("validate")
    p.add_argument("category")
    p = site_sub.add_parser("topology")
    p.add_argument("category")
    p.add_argument("pretopology")
    p = site_sub.add_parser("join")
    p.add_argument("category")
    p.add_argument("pretopology")
    p.add_argument("pretopology2")

    sheaf = sub.add_parser("sheaf", help="sheaf checks over a finite space")
    sheaf_sub = sheaf.add_subparsers(dest="action", required=True)
    for action in ("sheafify", "is-sheaf"):
        p = sheaf_sub.add_parser(action)
        p.add_argument("--space", required=True)
        p.add_argument("--cover", default="zariski")
        p.add_argument("sheaf")
    p = sheaf_sub.add_parser("morphism-check")
    p.add_argument("--space", required=True)
    p.add_argument("--cover", default="zariski")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("morphism")

    points = sub.add_parser("points", help="pro-objects and fibre functors")
    points_sub = points.add_subparsers(dest="action", required=True)
    p = points_sub.add_parser("local")
    p.add_argument("--space", required=True)
    p.add_argument("--cover", default="zariski")
    p.add_argument("pro")
    p = points_sub.add_parser("fibre")
    p.add_argument("--space", required=True)
    p.add_argument("--cover", default="zariski")
    p.add_argument("pro")
    p.add_argument("sheaf")
    p = points_sub.add_parser("conservativity")
    p.add_argument("--space", required=True)
    p.add_argument("--cover", default="zariski")
    p.add_argument("--samples", type=int, default=60)
    p = points_sub.add_parser("detect-cover")
    p.add_argument("--space", required=True)
    p.add_argument("--cover", default="zariski")
    p.add_argument("--target", required=True)
    p.add_argument("--members", required=True,
                   help="comma-separated morphism names")

    push = sub.add_parser("pushforward", help="direct-image exactness checks")
    push_sub = push.add_subparsers(dest="action", required=True)
    p = push_sub.add_parser("check")
    p.add_argument("--space", required=True)
    p.add_argument("--closed", default=None, help="comma-separated closed subspace points")
    p.add_argument("--open", default=None, help="comma-separated open subspace points")
    p.add_argument("--samples", type=int, default=40)

    v = sub.add_parser("val", help="the valuation laboratory")
    val_sub = v.add_subparsers(dest="action", required=True)
    p = val_sub.add_parser("value")
    p.add_argument("expr")
    p = val_sub.add_parser("member")
    p.add_argument("expr")
    val_sub.add_parser("centers")
    p = val_sub.add_parser("escape")
    p.add_argument("a")
    p.add_argument("b")
    val_sub.add_parser("rv-trace")
    p = val_sub.add_parser("gm-zero")
    p.add_argument("expr")
    p.add_argument("--model", default="rational-field",
                   choices=list(val.SUPPORTED_MODELS))
    p = val_sub.add_parser("divisible")
    p.add_argument("--group", required=True)
    p.add_argument("--prime", type=int, required=True)

    demo = sub.add_parser("demo", help="bundled scenarios")
    demo.add_argument("name", nargs="?", default=None)

    run = sub.add_parser("run", help="run a scenario file")
    run.add_argument("scenario")
    return parser


_DISPATCH = {
    "site": _cmd_site,
    "sheaf": _cmd_sheaf,
    "points": _cmd_points,
    "pushforward": _cmd_pushforward,
    "val": _cmd_val,
    "demo": _cmd_demo,
    "run": _cmd_run,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _DISPATCH[args.group](args)
    except (InputError, CategoryError, val.ValuationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
