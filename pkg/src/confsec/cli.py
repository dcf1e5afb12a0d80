"""The ``confsec`` command-line tool.

Subcommands expose the library with JSON input/output and deterministic
seeds.  Every command accepts ``--json OUT`` to write a machine-readable
report containing a reproducible run manifest (command, arguments, seed,
tool version, input digests): rerunning the same invocation on the same
inputs produces byte-identical reports.

Exit codes: 0 success / verified; 1 verification failure or rejected
certificate; 2 invalid input.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from multiprocessing import Pool
from pathlib import Path

import jsonschema

from . import __version__
from . import bounds as bnd
from . import certificates as cert
from . import finite as fin
from . import geometry as geo
from . import planner as pl
from . import sections as sec
from . import selfmaps as sm

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2

_SCHEMA_DIR = Path(__file__).parent / "schemas"


class InputError(Exception):
    """Bad user input (exit code 2)."""


def _load_schema(name: str) -> dict:
    with open(_SCHEMA_DIR / name, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _load_json(path: str, schema: str | None = None) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError as exc:
        raise InputError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: not valid JSON ({exc})") from exc
    if schema is not None:
        try:
            jsonschema.validate(data, _load_schema(schema))
        except jsonschema.ValidationError as exc:
            raise InputError(f"{path}: does not match {schema}: {exc.message}") from exc
    return data


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _manifest(args: argparse.Namespace, inputs: list[str], outcome: str) -> dict:
    return {
        "command": args.command if not getattr(args, "subcommand", None)
        else f"{args.command} {args.subcommand}",
        "argv": [str(a) for a in args._argv],
        "seed": getattr(args, "seed", 0),
        "version": __version__,
        "inputs": {p: _sha256(p) for p in inputs},
        "outcome": outcome,
    }


def _write_report(args: argparse.Namespace, result: dict, inputs: list[str],
                  outcome: str) -> None:
    path = getattr(args, "json", None)
    if not path:
        return
    report = {"manifest": _manifest(args, inputs, outcome), "result": result}
    jsonschema.validate(report, _load_schema("report.schema.json"))
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _parse_space(text: str) -> geo.SpaceDescriptor:
    try:
        return geo.parse_space(text)
    except geo.SpaceError as exc:
        raise InputError(str(exc)) from exc


# ---------------------------------------------------------------------------
# catalog


def cmd_catalog(args: argparse.Namespace) -> int:
    space = _parse_space(args.space) if args.space else None
    entries = sm.catalog(space)
    rows = []
    for e in entries:
        fpf = {True: "yes", False: "no", None: "-"}[e.fixed_point_free]
        rows.append({
            "recipe": e.name, "space": e.space.space_id,
            "fixed_point_free": fpf, "status": e.status, "note": e.note,
        })
        print(f"{e.name:<20} {e.space.space_id:<10} fpf={fpf:<4} "
              f"{e.status:<12} {e.note}")
    _write_report(args, {"entries": rows}, [], "ok")
    return EXIT_OK


# ---------------------------------------------------------------------------
# fpp


def cmd_fpp(args: argparse.Namespace) -> int:
    space = _parse_space(args.space)
    verdict = sec.fpp_verdict(space)
    data = verdict.to_json()
    print(f"{space.space_id}: FPP={verdict.fpp}  sec(pair projection)="
          f"{data['sec21']}  [{verdict.provenance}]")
    if verdict.witness:
        print(f"  witness: {verdict.witness}")
    if not verdict.theorem_applicable:
        print("  note: the sectional characterization does not apply here")
    _write_report(args, data, [], "ok")
    return EXIT_OK


# ---------------------------------------------------------------------------
# finite


def cmd_finite(args: argparse.Namespace) -> int:
    data = _load_json(args.poset, "poset.schema.json")
    try:
        poset = fin.FinitePoset.from_json(data)
    except fin.PosetError as exc:
        raise InputError(f"{args.poset}: {exc}") from exc

    if args.subcommand == "fpp":
        result = fin.has_fpp(poset, budget=args.budget)
        payload = {
            "n": poset.n,
            "has_fpp": result.has_fpp,
            "witness": list(result.witness.values) if result.witness else None,
        }
        print(f"FPP: {result.has_fpp}"
              + (f"  witness map: {payload['witness']}" if result.witness else ""))
        _write_report(args, payload, [args.poset], "ok")
        return EXIT_OK

    if args.subcommand == "sec":
        result = fin.sec_pi21(poset, max_cover=args.max_cover, budget=args.budget)
        value: int | str | None
        if result.value is None:
            value = f"unbounded (searched covers up to {result.max_cover})"
        elif math.isinf(result.value):
            value = "infinite"
        else:
            value = int(result.value)
        payload = {
            "n": poset.n,
            "sec": value if isinstance(value, int) else None,
            "status": result.status,
            "theorem_applicable": result.theorem_applicable,
            "witnesses": [
                {"up_set": list(w.up_set), "partner": list(w.partner)}
                for w in result.witnesses
            ] if result.witnesses else None,
        }
        print(f"sec(pair projection) = {value}  [{result.status}]")
        if not result.theorem_applicable:
            print("  note: the fixed-point characterization does not apply (n = 1)")
        _write_report(args, payload, [args.poset], "ok")
        return EXIT_OK

    if args.subcommand == "mr":
        map_data = _load_json(args.map)
        try:
            f = fin.PosetMap(poset, poset, tuple(int(v) for v in map_data["values"]))
        except (KeyError, fin.PosetError) as exc:
            raise InputError(f"{args.map}: {exc}") from exc
        value = fin.mr_bruteforce(f, args.root, budget=args.budget)
        print(f"minimal root count over the homotopy class at {args.root}: {value}")
        _write_report(args, {"mr": value, "root": args.root},
                      [args.poset, args.map], "ok")
        return EXIT_OK

    raise InputError(f"unknown finite subcommand {args.subcommand!r}")


# ---------------------------------------------------------------------------
# section verify


def cmd_section(args: argparse.Namespace) -> int:
    space = _parse_space(args.space)
    recipe = args.recipe
    try:
        if recipe == "key-lemma":
            target = sec.key_lemma_cover(space, args.k, seed=args.seed)
        elif recipe == "binomial":
            if args.r is None:
                raise InputError("binomial cover needs --r")
            target = sec.binomial_cover(space, args.k, args.r, seed=args.seed)
        elif recipe == "sigma":
            if space.kind is not geo.SpaceKind.SPHERE:
                raise InputError("sigma lives on spheres")
            target = sec.sphere_sigma(space.param)
        elif recipe == "fpf-family":
            maps = sm.fixed_point_free_maps(space)
            if len(maps) < args.k - 1:
                raise InputError(
                    f"catalog has only {len(maps)} fixed-point-free maps on "
                    f"{space.space_id}; cannot build a k={args.k} section")
            target = sec.from_fpf_family(maps[: args.k - 1], seed=args.seed)
        else:
            raise InputError(f"unknown recipe {recipe!r}")
    except geo.SpaceError as exc:
        raise InputError(str(exc)) from exc

    report = sec.verify_cover(target, seed=args.seed, n=args.samples)
    data = report.to_json()
    print(f"{data['label']}: coverage={report.coverage_fraction:.4f} "
          f"identity_err={report.max_identity_error:.2e} "
          f"min_sep={report.min_image_separation:.3e} "
          f"continuity_ratio={report.max_continuity_ratio}")
    for name, ok in data["checks"].items():
        print(f"  {name:<12} {'PASS' if ok else 'FAIL'}")
    _write_report(args, data, [], "verified" if report.passed else "failed")
    return EXIT_OK if report.passed else EXIT_FAILED


# ---------------------------------------------------------------------------
# certify


def cmd_certify(args: argparse.Namespace) -> int:
    data = _load_json(args.file, "certificate.schema.json")
    want = {"cup": "cup", "induced": "induced"}[args.subcommand]
    if data.get("kind") != want:
        raise InputError(f"{args.file}: certificate kind is {data.get('kind')!r}, "
                         f"expected {want!r}")
    try:
        if want == "cup":
            certificate = cert.cup_certificate_from_json(data)
            verdict = cert.verify_cup_certificate(certificate)
        else:
            certificate = cert.induced_certificate_from_json(data)
            verdict = cert.verify_induced_certificate(certificate)
    except (cert.RingError,) as exc:
        raise InputError(str(exc)) from exc
    except (cert.ZeroClassError, cert.ProductVanishesError,
            cert.AllInjectiveError, cert.AllSurjectiveError) as exc:
        print(f"REJECTED: {exc}")
        _write_report(args, {"accepted": False, "reason": str(exc)},
                      [args.file], "rejected")
        return EXIT_FAILED
    print(f"ACCEPTED: {verdict.detail}")
    for f in verdict.facts:
        hi = "inf" if f.hi is None else f.hi
        print(f"  fact: {f.quantity} in [{f.lo}, {hi}]")
    for a in verdict.attributes:
        print(f"  attribute: {a.name}({a.subject}) = {a.value}")
    _write_report(args, verdict.to_json(), [args.file], "accepted")
    return EXIT_OK


# ---------------------------------------------------------------------------
# bounds


def cmd_bounds(args: argparse.Namespace) -> int:
    facts: list[bnd.Fact] = []
    attributes: dict = {}
    use_presets = True
    inputs = []
    if args.facts:
        data = _load_json(args.facts, "facts.schema.json")
        try:
            facts, attributes, use_presets = bnd.facts_from_json(data)
        except bnd.BoundsError as exc:
            raise InputError(f"{args.facts}: {exc}") from exc
        inputs.append(args.facts)
    try:
        store = bnd.propagate(facts, attributes=attributes, use_presets=use_presets)
        result = store.query(args.quantity)
    except bnd.BoundsError as exc:
        raise InputError(str(exc)) from exc
    except bnd.Contradiction as exc:
        print("CONTRADICTION:")
        print(exc.explain())
        _write_report(args, {"contradiction": exc.explain()}, inputs, "contradiction")
        return EXIT_FAILED
    lo = "inf" if result.lo == math.inf else int(result.lo)
    hi = "inf" if result.hi == math.inf else int(result.hi)
    print(f"{result.quantity} = [{lo}, {hi}]")
    if args.explain:
        print(result.explain())
    _write_report(args, result.to_json(), inputs, "ok")
    return EXIT_OK


# ---------------------------------------------------------------------------
# plan


def _load_configuration(path: str, space: geo.SpaceDescriptor) -> geo.Configuration:
    data = _load_json(path, "space.schema.json")
    try:
        if "points" in data:
            cfg = geo.configuration_from_json(data)
        else:
            cfg = geo.configuration(space, [geo.point_from_json(data)])
        if cfg.space != space:
            raise InputError(f"{path}: configuration lives on {cfg.space}, "
                             f"expected {space}")
        return cfg
    except geo.SpaceError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _flatten_coords(p: geo.SpacePoint) -> list[float]:
    coords = geo.point_to_json(p)["coords"]
    if isinstance(coords, dict):  # wedge point
        value = coords["value"]
        return [float(v) for v in (value if isinstance(value, list) else [value])]
    if isinstance(coords, int):
        return [float(coords)]
    return [float(c) for c in coords]


def _write_csv(plan: pl.MotionPlan, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        k = plan.samples[0].config.k
        dims = len(_flatten_coords(plan.samples[0].config.points[0]))
        header = ["t"] + [f"p{i}_{c}" for i in range(k) for c in range(dims)]
        fh.write(",".join(header) + "\n")
        for s in plan.samples:
            row = [f"{s.t:.12g}"]
            for p in s.config.points:
                row.extend(f"{x:.17g}" for x in _flatten_coords(p))
            fh.write(",".join(row) + "\n")


def cmd_plan(args: argparse.Namespace) -> int:
    if args.subcommand == "batch":
        return _cmd_plan_batch(args)
    space = _parse_space(args.space)
    start = _load_configuration(args.start, space)
    goal = _load_configuration(args.goal, space)
    try:
        query = pl.PlanQuery(space, args.k, args.r, start, goal)
        name = pl.planner_for(space, args.k, args.r)
        plan = pl.PLANNERS[name]["plan"](query, density=args.density)
    except (pl.PlannerError, pl.DegenerateQueryError) as exc:
        raise InputError(str(exc)) from exc
    info = pl.planner_info(name, space, args.k, args.r)
    report = pl.verify_plan(plan, query, seed=args.seed) if args.verify else None

    print(f"planner={name} region={plan.region_id}/{info['regions']} "
          f"samples={len(plan.samples)} optimal={info['optimal']}")
    if report is not None:
        for cname, ok in report.checks.items():
            print(f"  {cname:<20} {'PASS' if ok else 'FAIL'}")
    plan_data = plan.to_json()
    plan_data["metadata"]["optimality"] = info
    if report is not None:
        plan_data["verification"] = report.to_json()
    if args.out:
        jsonschema.validate(plan_data, _load_schema("plan.schema.json"))
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(plan_data, fh, indent=2, sort_keys=True)
            fh.write("\n")
    if args.plot:
        _write_csv(plan, args.plot)
    result = {
        "planner": name, "region_id": plan.region_id,
        "samples": len(plan.samples), "optimality": info,
    }
    if report is not None:
        result["verification"] = report.to_json()
    outcome = "verified" if report is None or report.passed else "failed"
    _write_report(args, result, [args.start, args.goal], outcome)
    return EXIT_OK if report is None or report.passed else EXIT_FAILED


def _batch_worker(payload: tuple) -> dict:
    space_id, k, r, entry, density, seed = payload
    space = geo.parse_space(space_id)
    start = geo.configuration_from_json({"space": space_id, "points": entry["start"]})
    goal = geo.configuration_from_json({"space": space_id, "points": entry["goal"]})
    query = pl.PlanQuery(space, k, r, start, goal)
    name = pl.planner_for(space, k, r)
    plan = pl.PLANNERS[name]["plan"](query, density=density)
    report = pl.verify_plan(plan, query, seed=seed)
    return {
        "region_id": plan.region_id,
        "samples": len(plan.samples),
        "passed": report.passed,
    }


def _cmd_plan_batch(args: argparse.Namespace) -> int:
    data = _load_json(args.scenarios, "scenarios.schema.json")
    space_id = data["space"]
    _parse_space(space_id)
    k, r = int(data["k"]), int(data["r"])
    payloads = [(space_id, k, r, entry, args.density, args.seed)
                for entry in data["queries"]]
    threads = args.threads
    try:
        if threads > 1:
            with Pool(threads) as pool:
                results = pool.map(_batch_worker, payloads)
        else:
            results = [_batch_worker(p) for p in payloads]
    except (pl.PlannerError, pl.DegenerateQueryError, geo.SpaceError) as exc:
        raise InputError(str(exc)) from exc
    ok = all(r["passed"] for r in results)
    for i, r in enumerate(results):
        print(f"query {i}: region={r['region_id']} samples={r['samples']} "
              f"{'PASS' if r['passed'] else 'FAIL'}")
    print(f"{sum(r['passed'] for r in results)}/{len(results)} plans verified")
    _write_report(args, {"queries": results}, [args.scenarios],
                  "verified" if ok else "failed")
    return EXIT_OK if ok else EXIT_FAILED


# ---------------------------------------------------------------------------
# parser


def _default_threads() -> int:
    env = os.environ.get("CONFSEC_THREADS")
    if env and env.isdigit() and int(env) >= 1:
        return int(env)
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="confsec",
        description="Configuration-space sections, fixed-point certification, "
                    "sectional bounds, and (k, r) motion planners.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalog", help="list the self-map catalog")
    csub = p.add_subparsers(dest="subcommand", required=True)
    c = csub.add_parser("list", help="print recipes with their spaces and status")
    c.add_argument("--space", default=None, help="restrict to one space id")
    c.add_argument("--json", default=None, help="write a JSON report")
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(func=cmd_catalog, subcommand=None)

    p = sub.add_parser("fpp", help="fixed-point-property verdict for a model space")
    p.add_argument("--space", required=True)
    p.add_argument("--json", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_fpp)

    p = sub.add_parser("finite", help="exhaustive checks on finite posets")
    fsub = p.add_subparsers(dest="subcommand", required=True)
    for name, helptext in (("fpp", "fixed point property"),
                           ("sec", "sectional number of the pair projection"),
                           ("mr", "minimal root count")):
        f = fsub.add_parser(name, help=helptext)
        f.add_argument("--poset", required=True, help="poset JSON file")
        f.add_argument("--budget", type=int, default=fin.DEFAULT_BUDGET)
        f.add_argument("--json", default=None)
        f.add_argument("--seed", type=int, default=0)
        if name == "sec":
            f.add_argument("--max-cover", type=int, default=4, dest="max_cover")
        if name == "mr":
            f.add_argument("--map", required=True, help="map JSON file with 'values'")
            f.add_argument("--root", type=int, required=True)
        f.set_defaults(func=cmd_finite)

    p = sub.add_parser("section", help="build and verify section covers")
    ssub = p.add_subparsers(dest="subcommand", required=True)
    v = ssub.add_parser("verify", help="verify a named cover or section")
    v.add_argument("--recipe", required=True,
                   choices=["key-lemma", "binomial", "sigma", "fpf-family"])
    v.add_argument("--space", required=True)
    v.add_argument("--k", type=int, required=True)
    v.add_argument("--r", type=int, default=None)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--samples", type=int, default=10_000)
    v.add_argument("--json", default=None)
    v.set_defaults(func=cmd_section, subcommand=None)

    p = sub.add_parser("certify", help="check lower-bound certificates")
    certsub = p.add_subparsers(dest="subcommand", required=True)
    for name in ("cup", "induced"):
        c = certsub.add_parser(name)
        c.add_argument("--file", required=True)
        c.add_argument("--json", default=None)
        c.add_argument("--seed", type=int, default=0)
        c.set_defaults(func=cmd_certify)

    p = sub.add_parser("bounds", help="interval queries over the inequality network")
    bsub = p.add_subparsers(dest="subcommand", required=True)
    q = bsub.add_parser("query")
    q.add_argument("--facts", default=None, help="facts JSON file")
    q.add_argument("--quantity", required=True)
    q.add_argument("--explain", action="store_true")
    q.add_argument("--json", default=None)
    q.add_argument("--seed", type=int, default=0)
    q.set_defaults(func=cmd_bounds, subcommand=None)

    p = sub.add_parser("plan", help="run the (k, r) motion planners")
    p.add_argument("--space")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--start", help="start configuration JSON")
    p.add_argument("--goal", help="goal configuration JSON")
    p.add_argument("--out", default=None, help="write the plan JSON here")
    p.add_argument("--plot", default=None, help="write a trajectory CSV here")
    p.add_argument("--verify", action="store_true")
    p.add_argument("--density", type=int, default=pl.DEFAULT_DENSITY)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", default=None)
    p.add_argument("--threads", type=int, default=_default_threads())
    p.set_defaults(func=cmd_plan, subcommand=None)
    psub = p.add_subparsers(dest="subcommand")
    b = psub.add_parser("batch", help="plan a scenario file of queries")
    b.add_argument("--scenarios", required=True)
    b.add_argument("--density", type=int, default=pl.DEFAULT_DENSITY)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--json", default=None)
    b.add_argument("--threads", type=int, default=_default_threads())
    b.set_defaults(func=cmd_plan, subcommand="batch")

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses exit code 2 for usage errors already
        return int(exc.code or 0)
    args._argv = argv
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (geo.SpaceError, fin.PosetError, sm.RecipeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
