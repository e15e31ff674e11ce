"""Command-line entry point ``stab``.

Every command prints one JSON summary line on standard output.  Exit codes:
0 success, 1 numerical failure, 2 usage or parse error, 3 acceptance failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from importlib import resources

import jsonschema
import numpy as np

from . import acceptance, chains
from .catalog import (AffinePerturbedAnosov, InverseSolveError, LinearAnosov, catalog_from_json,
                      default_catalog, load_catalog_json, named_perturbation, orbit)
from .centralizer import (BumpPushSpec, bump_push_family, commutation_residual, discreteness_probe,
                          ms_centralizer, northsouth_piece, translation_candidates)
from .conjugacy import PerturbationTooLarge, c0_distance, d0, moser_solve
from .expansive import (dense_expansiveness_probe, heteroclinic_separated_set, sensitivity_probe,
                        shrinking_ball_certificate)
from .geometry import RandomUniform, UniformGrid, sample
from .homeo import Identity
from .io import dumps, write_csv, write_json

log = logging.getLogger("stablab")

EXIT_OK, EXIT_NUMERICAL, EXIT_USAGE, EXIT_ACCEPTANCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def threads() -> int:
    """Parallelism cap from STAB_THREADS (the probes here run single-threaded)."""
    raw = os.environ.get("STAB_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"STAB_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise UsageError("STAB_THREADS must be at least 1")
    return n


def load_schema(name: str) -> dict:
    text = resources.files("stablab").joinpath(f"data/schemas/{name}.json").read_text("utf-8")
    return json.loads(text)


def emit(schema: str, obj: dict) -> None:
    jsonschema.validate(obj, load_schema(schema))
    print(dumps(obj))


def _catalog(args):
    if args.catalog is None:
        return default_catalog()
    return catalog_from_json(load_catalog_json(args.catalog))


def _map(args, name):
    cat = _catalog(args)
    if name not in cat:
        raise UsageError(f"unknown map {name!r}; available: {', '.join(cat)}")
    return cat[name]


def _point_set(f, spec: str, seed: int):
    kind, _, arg = spec.partition(":")
    try:
        n = int(arg)
    except ValueError:
        raise UsageError(f"bad point set {spec!r}") from None
    if kind == "grid":
        return sample(f.space, UniformGrid(n))
    if kind == "random":
        return sample(f.space, RandomUniform(n, seed))
    if kind == "heteroclinic":
        return heteroclinic_separated_set(f, n)
    raise UsageError(f"bad point set {spec!r}; use grid:R, random:N or heteroclinic:N")


# ---------------------------------------------------------------- commands


def cmd_catalog(args) -> int:
    cat = _catalog(args)
    maps = [{"name": n, "kind": f.kind, "space": f.space.value, "parameters": f.parameters()} for n, f in cat.items()]
    emit("catalog", {"command": "catalog list", "maps": maps})
    return EXIT_OK


def cmd_orbit(args) -> int:
    f = _map(args, args.map)
    try:
        a, b = (int(v) for v in args.range.split(":"))
    except ValueError:
        raise UsageError("--range must be a:b with integers a <= b") from None
    if a > b:
        raise UsageError("--range must be a:b with integers a <= b")
    ns, pts = orbit(f, args.x, a, b)
    header = ["n"] + [f"x{i}" for i in range(pts.shape[1])]
    rows = [[int(n)] + [float(v) for v in p] for n, p in zip(ns, pts)]
    if args.out:
        write_csv(args.out, header, rows)
    emit("orbit", {"command": "orbit", "map": f.name, "range": [a, b], "points": len(rows), "out": args.out})
    return EXIT_OK


def cmd_conjugate(args) -> int:
    base = _map(args, args.base)
    if not isinstance(base, LinearAnosov):
        raise UsageError("--base must name a linear Anosov map")
    try:
        pert = named_perturbation(args.pert)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        g = AffinePerturbedAnosov(base.matrix, pert, args.eps, name="perturbed")
    except InverseSolveError:
        raise PerturbationTooLarge("the perturbed map is not invertible") from None
    h = moser_solve(base, g, resolution=args.res, interpolation=args.interpolation,
                    residual_sampler=RandomUniform(4096, args.seed))
    dist = c0_distance(base, g)
    if args.out:
        write_json(args.out, h.to_json())
    emit("conjugate", {
        "command": "conjugate",
        "base": base.name,
        "perturbation": args.pert,
        "eps": args.eps,
        "resolution": args.res,
        "residual": h.residual,
        "sup_u": h.sup_u,
        "K_estimate": h.sup_u / dist if dist > 0 else None,
        "iterations_used": h.iterations_used,
        "injective": h.injectivity_probe(),
        "seed": args.seed,
        "out": args.out,
    })
    return EXIT_OK


def _member(f, kind: str, size: float, t: float):
    if kind == "ms":
        return ms_centralizer(northsouth_piece(f, shift=t * size))
    return bump_push_family(BumpPushSpec(f, zeta=size, t=t))


def _member_summary(f, h, t: float, seed: int) -> dict:
    return {
        "t": t,
        "commutation_residual": commutation_residual(f, h, RandomUniform(10_000, seed)),
        "d0_to_identity": d0(h, Identity(f.space), UniformGrid({1: 4096, 2: 64, 3: 16}[f.space.dimension])).value,
        "tree": h.describe(),
    }


def cmd_centralizer(args) -> int:
    f = _map(args, args.map)
    try:
        if args.action == "build":
            if args.kind == "ms" and f.kind != "NorthSouthCircle":
                raise UsageError("--kind ms needs the north-south map")
            h = _member(f, args.kind, args.bump, args.t)
            report = {"command": "centralizer build", "map": f.name, "kind": args.kind, "bump": args.bump,
                      **_member_summary(f, h, args.t, args.seed)}
            if args.out:
                write_json(args.out, report)
            report.pop("tree")
            report["out"] = args.out
            emit("centralizer_build", report)
        elif args.action == "family":
            if args.steps < 1:
                raise UsageError("--steps must be positive")
            kind = "ms" if f.kind == "NorthSouthCircle" and args.kind == "ms" else "bump"
            ts = np.linspace(0.0, 1.0, args.steps) if args.steps > 1 else np.array([1.0])
            members = [_member_summary(f, _member(f, kind, args.zeta, float(t)), float(t), args.seed) for t in ts]
            report = {"command": "centralizer family", "map": f.name, "kind": kind, "zeta": args.zeta,
                      "members": members}
            if args.out:
                write_json(args.out, report)
            emit("centralizer_family", {
                "command": "centralizer family", "map": f.name, "kind": kind, "zeta": args.zeta,
                "steps": len(members),
                "max_commutation_residual": max(m["commutation_residual"] for m in members),
                "d0_to_identity": [m["d0_to_identity"] for m in members],
                "out": args.out,
            })
        else:
            if f.space.dimension != 2:
                raise UsageError("the translation probe runs on torus maps")
            report = discreteness_probe(f, translation_candidates(args.grid), eps=args.eps)
            out = {"command": "centralizer probe", "map": f.name, "grid": args.grid, **report.to_json()}
            if args.out:
                write_json(args.out, out)
            emit("centralizer_probe", out | {"out": args.out})
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    return EXIT_OK


def cmd_expansive(args) -> int:
    f = _map(args, args.map)
    eps = args.eps if args.eps is not None else f.meta.eps0 / 2
    D = _point_set(f, args.set, args.seed)
    max_pairs = None if args.max_pairs == 0 else args.max_pairs
    r = dense_expansiveness_probe(f, D, eps, args.horizon, max_pairs=max_pairs, seed=args.seed)
    report = {"command": "expansive", "map": f.name, "set": args.set, "seed": args.seed, **r.to_json()}
    if args.out:
        write_json(args.out, report)
    if args.csv:
        d = f.space.dimension
        header = [f"x{i}" for i in range(d)] + [f"y{i}" for i in range(d)] + ["max_separation"]
        write_csv(args.csv, header, r.failing_rows())
    emit("expansive", report | {"out": args.out, "csv": args.csv})
    return EXIT_OK


def cmd_sensitivity(args) -> int:
    f = _map(args, args.map)
    X = _point_set(f, args.set, args.seed)
    r = sensitivity_probe(f, X, args.delta, args.eps, args.horizon)
    report = {"command": "sensitivity", "map": f.name, "set": args.set, "seed": args.seed, **r.to_json()}
    if args.out:
        write_json(args.out, report)
    emit("sensitivity", report | {"out": args.out})
    return EXIT_OK


def cmd_certificate(args) -> int:
    f = _map(args, args.map)
    if f.kind != "NorthSouthCircle":
        raise UsageError("shrinking-ball certificates need the north-south map")
    try:
        cert = shrinking_ball_certificate(f, args.eps)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = {"command": "certificate shrinking-ball", "map": f.name, **cert.to_json()}
    if args.out:
        write_json(args.out, report)
    emit("certificate", report | {"out": args.out})
    return EXIT_OK


def cmd_chains(args) -> int:
    try:
        with open(args.spec, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read spec: {exc}") from None
    try:
        spec = chains.parse_spec(text)
    except chains.SpecError as exc:
        out = {"valid": False, "violations": [{"line": v.line, "message": v.message} for v in exc.violations],
               "chains": [], "theta": None, "verdict": None}
        if args.format == "json":
            emit("chains", out)
        else:
            print("invalid spec")
            for v in exc.violations:
                print(f"  {v}")
        return EXIT_USAGE
    out = chains.analyze(spec, verbose=args.verbose)
    if args.format == "json":
        emit("chains", out)
    else:
        v = out["verdict"]
        print("valid spec")
        print("chains:")
        for c in out["chains"]:
            print("  " + " > ".join(c))
        print(f"theta: attractors {out['theta']['attractors']} repellers {out['theta']['repellers']}")
        for key in ("densely_expansive", "sensitive", "anosov", "centralizer_discrete"):
            print(f"{key}: {'yes' if v[key] else 'no'}")
    return EXIT_OK


def cmd_verify(args) -> int:
    results = acceptance.run_suite(args.suite)
    report = {"command": "verify", "suite": args.suite, "passed": all(r.passed for r in results),
              "criteria": [r.to_json() for r in results]}
    if args.out:
        write_json(args.out, report)
    print(acceptance.format_table(results), file=sys.stderr)
    emit("verify", report)
    return EXIT_OK if report["passed"] else EXIT_ACCEPTANCE


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for random samplers and pair subsampling")
    common.add_argument("--catalog", default=None, help="catalog JSON file (default: shipped catalog)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="stab", description="Structural-stability laboratory.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("catalog", parents=[common], help="list catalog maps")
    c.add_argument("action", choices=["list"])
    c.set_defaults(func=cmd_catalog)

    c = sub.add_parser("orbit", parents=[common], help="write an orbit segment as CSV")
    c.add_argument("--map", required=True)
    c.add_argument("--x", type=float, nargs="+", required=True)
    c.add_argument("--range", default="0:10")
    c.add_argument("--out")
    c.set_defaults(func=cmd_orbit)

    c = sub.add_parser("conjugate", parents=[common], help="solve for the conjugacy to a perturbation")
    c.add_argument("--base", default="cat")
    c.add_argument("--pert", default="default")
    c.add_argument("--eps", type=float, default=0.01)
    c.add_argument("--res", type=int, default=256)
    c.add_argument("--interpolation", choices=["series", "bilinear"], default="series")
    c.add_argument("--out")
    c.set_defaults(func=cmd_conjugate)

    c = sub.add_parser("centralizer", parents=[common], help="centralizer constructions and probes")
    c.add_argument("action", choices=["build", "family", "probe"])
    c.add_argument("--map", required=True)
    c.add_argument("--kind", choices=["ms", "bump"], default="bump")
    c.add_argument("--bump", type=float, default=0.01, help="push size of a single element")
    c.add_argument("--t", type=float, default=1.0, help="family parameter of a single element")
    c.add_argument("--zeta", type=float, default=0.01)
    c.add_argument("--steps", type=int, default=11)
    c.add_argument("--grid", type=int, default=64)
    c.add_argument("--eps", type=float, default=None)
    c.add_argument("--out")
    c.set_defaults(func=cmd_centralizer)

    c = sub.add_parser("expansive", parents=[common], help="dense expansiveness probe")
    c.add_argument("--map", required=True)
    c.add_argument("--set", default="grid:32", help="grid:R, random:N or heteroclinic:N")
    c.add_argument("--eps", type=float, default=None)
    c.add_argument("--horizon", type=int, default=20)
    c.add_argument("--max-pairs", type=int, default=100_000, help="0 tests every pair")
    c.add_argument("--out")
    c.add_argument("--csv", help="write failing pairs as CSV")
    c.set_defaults(func=cmd_expansive)

    c = sub.add_parser("sensitivity", parents=[common], help="sensitivity probe")
    c.add_argument("--map", required=True)
    c.add_argument("--set", default="grid:200")
    c.add_argument("--delta", type=float, default=1e-3)
    c.add_argument("--eps", type=float, required=True)
    c.add_argument("--horizon", type=int, default=20)
    c.add_argument("--out")
    c.set_defaults(func=cmd_sensitivity)

    c = sub.add_parser("certificate", parents=[common], help="non-expansiveness certificates")
    c.add_argument("kind", choices=["shrinking-ball"])
    c.add_argument("--map", default="northsouth")
    c.add_argument("--eps", type=float, required=True)
    c.add_argument("--out")
    c.set_defaults(func=cmd_certificate)

    c = sub.add_parser("chains", parents=[common], help="analyze a declared spectral decomposition")
    c.add_argument("action", choices=["analyze"])
    c.add_argument("--spec", required=True)
    c.add_argument("--format", choices=["json", "text"], default="json")
    c.set_defaults(func=cmd_chains)

    c = sub.add_parser("verify", parents=[common], help="run the acceptance suite")
    c.add_argument("--suite", choices=sorted(acceptance.SUITES), default="all")
    c.add_argument("--out")
    c.set_defaults(func=cmd_verify)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        log.info("seed=%d threads=%d", args.seed, threads())
        return args.func(args)
    except UsageError as exc:
        print(f"stab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PerturbationTooLarge, InverseSolveError) as exc:
        print(dumps({"command": args.command, "error": str(exc)}))
        return EXIT_NUMERICAL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
