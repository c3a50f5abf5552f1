"""Command-line interface.

Subcommands: front, sweep, arms, charlen, render, enumerate-oracle,
rerun.  Every run writes a manifest next to its primary output; ``rerun``
replays a manifest's command (with its recorded seed, ignoring PERC_SEED)
into a target directory, reproducing output files byte for byte.

Exit codes: 0 success, 2 usage, 3 validation, 4 I/O, 5 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .io import RunManifest, write_csv, write_json
from .lattice import Region
from .sampling import StripSpec, sample_strip

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_IO = 4
EXIT_BUDGET = 5

RENDER_CELL_CAP = 10_000_000


class ValidationError(Exception):
    pass


class BudgetError(Exception):
    pass


def _resolve_seed(args) -> int:
    env = os.environ.get("PERC_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ValidationError(f"PERC_SEED is not an integer: {env!r}") from exc
    return args.seed


def _manifest_path(out: str) -> str:
    return out + ".manifest.json"


def cmd_front(args) -> int:
    if args.N < 8 or args.ell < 8:
        raise ValidationError("front needs --N >= 8 and --ell >= 8")
    if args.replicas < 1:
        raise ValidationError("--replicas must be >= 1")
    seed = _resolve_seed(args)
    from .scaling import SAMPLE_COLUMNS, front_sample_row

    man = RunManifest(command="front",
                      params={"N": args.N, "ell": args.ell,
                              "replicas": args.replicas,
                              "edges_out": args.edges_out},
                      seed=seed, outputs=[args.out]).start()
    if args.threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=args.threads) as ex:
            rows = list(ex.map(
                lambda r: front_sample_row(args.N, args.ell, seed, r),
                range(args.replicas)))
    else:
        rows = [front_sample_row(args.N, args.ell, seed, r)
                for r in range(args.replicas)]
    write_csv(args.out, SAMPLE_COLUMNS, rows)
    if args.edges_out:
        from .front import extract_front
        c = sample_strip(StripSpec(N=args.N, ell=args.ell), seed, 0)
        f = extract_front(c)
        write_json(args.edges_out, {"N": args.N, "ell": args.ell,
                                    "seed": seed, "replica": 0,
                                    "edges": f.edges.tolist()})
        man.outputs.append(args.edges_out)
    man.finish().save(_manifest_path(args.out))
    return EXIT_OK


def cmd_sweep(args) -> int:
    from .scaling import (SUMMARY_COLUMNS, ExperimentSpec,
                          fit_with_small_scale_check, run_front_experiment)
    try:
        spec = ExperimentSpec.from_json(args.spec)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot parse spec file {args.spec}: {exc}")
    out = args.out or spec.output
    if not out:
        raise ValidationError("no output path (give --out or spec.output)")

    man = RunManifest(command="sweep", params={"spec": str(args.spec)},
                      seed=spec.seed, outputs=[out]).start()
    aggs, _ = run_front_experiment(spec, threads=args.threads)
    write_csv(out, SUMMARY_COLUMNS, [a.summary_row() for a in aggs])

    fits = {}
    if len(aggs) >= 3:
        for name, values in (
                ("front_length", [a.mean_T for a in aggs]),
                ("std_height", [a.mean_std_height for a in aggs]),
                ("u_plus", [a.mean_u_plus for a in aggs]),
                ("u_minus", [a.mean_u_minus for a in aggs])):
            pts = list(zip([float(a.N) for a in aggs], values))
            main, refit = fit_with_small_scale_check(pts)
            fits[name] = {
                "slope": main.slope, "intercept": main.intercept,
                "stderr": main.stderr, "bootstrap_ci": list(main.bootstrap_ci),
                "refit_slope": None if refit is None else refit.slope,
            }
    report = out + ".fits.json"
    write_json(report, {"spec": {"sweep": spec.sweep,
                                 "replicas": spec.replicas,
                                 "seed": spec.seed,
                                 "ell_rule": spec.ell_rule},
                        "fits": fits})
    man.outputs.append(report)
    man.finish().save(_manifest_path(out))
    return EXIT_OK


def cmd_arms(args) -> int:
    from .arms import ArmQuery, arm_probability
    if args.samples < 1:
        raise ValidationError("--samples must be >= 1")
    seed = _resolve_seed(args)
    ns = sorted(set(args.n))
    man = RunManifest(command="arms",
                      params={"j": args.j, "m": args.m, "p": args.p,
                              "n": ns, "samples": args.samples},
                      seed=seed, outputs=[args.out]).start()
    rows = []
    for n in ns:
        q = ArmQuery(center=(0, 0), m=args.m, n=n, j=args.j)
        est = arm_probability(args.p, q, args.samples, seed,
                              threads=args.threads)
        rows.append((args.j, args.m, n, args.p, est.trials, est.successes,
                     est.estimate, est.stderr))
    write_csv(args.out, ("j", "m", "n", "p", "trials", "successes",
                         "estimate", "stderr"), rows)
    man.finish().save(_manifest_path(args.out))
    return EXIT_OK


def cmd_charlen(args) -> int:
    from .scaling import CharLengthParams, characteristic_length
    seed = _resolve_seed(args)
    try:
        params = CharLengthParams(eps0=args.eps0, samples=args.samples)
    except ValueError as exc:
        raise ValidationError(str(exc))
    man = RunManifest(command="charlen",
                      params={"p": args.p, "eps0": args.eps0,
                              "samples": args.samples},
                      seed=seed, outputs=[args.out]).start()
    rows = []
    results = {}
    for p in args.p:
        res = characteristic_length(p, params, seed=seed)
        results[str(p)] = res.diagnostics()
        for n in sorted(res.probes):
            est = res.probes[n]
            color = "occupied" if p < 0.5 else "vacant"
            rows.append((p, n, "horizontal", color, est.trials,
                         est.successes, est.estimate, est.stderr))
    write_csv(args.out, ("p", "n", "orientation", "color", "trials",
                         "successes", "estimate", "stderr"), rows)
    report = args.out + ".json"
    write_json(report, results)
    man.outputs.append(report)
    man.finish().save(_manifest_path(args.out))
    return EXIT_OK


def cmd_render(args) -> int:
    from .front import extract_front
    from .render import render_svg
    if args.N < 1 or args.ell < 1:
        raise ValidationError("render needs --N >= 1 and --ell >= 1")
    cells = (args.ell + 1) * (2 * args.N + 1)
    if args.N * args.ell > RENDER_CELL_CAP or cells > RENDER_CELL_CAP:
        raise BudgetError(
            f"{cells} cells exceed the render cap of {RENDER_CELL_CAP}")
    seed = _resolve_seed(args)
    man = RunManifest(command="render",
                      params={"N": args.N, "ell": args.ell},
                      seed=seed, outputs=[args.out]).start()
    c = sample_strip(StripSpec(N=args.N, ell=args.ell), seed, 0)
    front = extract_front(c)
    svg = render_svg(c, front=front, band_halfwidth=args.N ** (4 / 7))
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    Path(args.out).write_text(svg)
    man.finish().save(_manifest_path(args.out))
    return EXIT_OK


def cmd_enumerate_oracle(args) -> int:
    """Write the brute-force reference tables for the small instances the
    test suite checks against."""
    from . import oracle

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    man = RunManifest(command="enumerate-oracle",
                      params={"outdir": str(outdir)}, seed=None,
                      outputs=[]).start()

    # exact crossing probabilities of small rhombi
    rows = []
    for n in (2, 3):
        region = Region(0, n, 0, n)
        for orientation in ("horizontal", "vertical"):
            for color in ("occupied", "vacant"):
                counts = oracle.enumerate_event_counts(
                    region,
                    lambda cfg, o=orientation, cl=color, r=region:
                    oracle.crossing_reference(cfg.__getitem__, r, o, cl))
                for p in (0.3, 0.5, 0.7):
                    rows.append((p, n, orientation, color,
                                 oracle.probability_from_counts(counts, p)))
    rows.sort(key=lambda r: (r[0], r[1], r[2], r[3]))
    path = outdir / "crossing_probabilities.csv"
    write_csv(path, ("p", "n", "orientation", "color", "exact_probability"),
              rows)
    man.outputs.append(str(path))

    # exact two-arm probability at the midpoint of a 15-site parallelogram
    rows = []
    region = Region(0, 2, 0, 4)
    site = (1, 2)
    counts = oracle.enumerate_event_counts(
        region,
        lambda cfg: oracle.two_arm_reference(cfg.__getitem__, region, site))
    for p in (0.3, 0.5, 0.7):
        rows.append((p, oracle.probability_from_counts(counts, p)))
    path = outdir / "two_arm_probabilities.csv"
    write_csv(path, ("p", "exact_probability"), rows)
    man.outputs.append(str(path))

    man.finish().save(str(outdir / "oracle.manifest.json"))
    return EXIT_OK


def cmd_rerun(args) -> int:
    man = RunManifest.load(args.manifest)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    argv = [man.command]
    p = man.params
    if man.command == "front":
        argv += ["--N", str(p["N"]), "--ell", str(p["ell"]),
                 "--replicas", str(p["replicas"]),
                 "--seed", str(man.seed),
                 "--out", str(outdir / Path(man.outputs[0]).name)]
        if p.get("edges_out"):
            argv += ["--edges-out", str(outdir / Path(p["edges_out"]).name)]
    elif man.command == "sweep":
        argv += ["--spec", p["spec"],
                 "--out", str(outdir / Path(man.outputs[0]).name)]
    elif man.command == "arms":
        argv += ["--j", str(p["j"]), "--m", str(p["m"]), "--p", str(p["p"]),
                 "--samples", str(p["samples"]), "--seed", str(man.seed),
                 "--out", str(outdir / Path(man.outputs[0]).name)]
        for n in p["n"]:
            argv += ["--n", str(n)]
    elif man.command == "charlen":
        argv += ["--eps0", str(p["eps0"]), "--samples", str(p["samples"]),
                 "--seed", str(man.seed),
                 "--out", str(outdir / Path(man.outputs[0]).name)]
        for pp in p["p"]:
            argv += ["--p", str(pp)]
    elif man.command == "render":
        argv += ["--N", str(p["N"]), "--ell", str(p["ell"]),
                 "--seed", str(man.seed),
                 "--out", str(outdir / Path(man.outputs[0]).name)]
    else:
        raise ValidationError(f"cannot rerun command {man.command!r}")
    env_seed = os.environ.pop("PERC_SEED", None)
    try:
        return main(argv)
    finally:
        if env_seed is not None:
            os.environ["PERC_SEED"] = env_seed


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="gradperc",
        description="Gradient-percolation simulator and exponent laboratory")
    sub = ap.add_subparsers(dest="command", required=True)

    fr = sub.add_parser("front", help="sample strips and extract fronts")
    fr.add_argument("--N", type=int, required=True)
    fr.add_argument("--ell", type=int, required=True)
    fr.add_argument("--replicas", type=int, default=1)
    fr.add_argument("--seed", type=int, default=0)
    fr.add_argument("--out", required=True)
    fr.add_argument("--edges-out", default=None)
    fr.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    fr.set_defaults(func=cmd_front)

    sw = sub.add_parser("sweep", help="run an experiment spec")
    sw.add_argument("--spec", required=True)
    sw.add_argument("--out", default=None)
    sw.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    sw.set_defaults(func=cmd_sweep)

    ar = sub.add_parser("arms", help="arm-probability sweep")
    ar.add_argument("--j", type=int, required=True)
    ar.add_argument("--m", type=int, required=True)
    ar.add_argument("--p", type=float, default=0.5)
    ar.add_argument("--n", type=int, action="append", required=True)
    ar.add_argument("--samples", type=int, default=1000)
    ar.add_argument("--seed", type=int, default=0)
    ar.add_argument("--threads", type=int, default=1)
    ar.add_argument("--out", required=True)
    ar.set_defaults(func=cmd_arms)

    ch = sub.add_parser("charlen", help="estimate L(p, eps0)")
    ch.add_argument("--p", type=float, action="append", required=True)
    ch.add_argument("--eps0", type=float, default=0.05)
    ch.add_argument("--samples", type=int, default=1000)
    ch.add_argument("--seed", type=int, default=0)
    ch.add_argument("--out", required=True)
    ch.set_defaults(func=cmd_charlen)

    re_ = sub.add_parser("render", help="render a strip to SVG")
    re_.add_argument("--N", type=int, required=True)
    re_.add_argument("--ell", type=int, required=True)
    re_.add_argument("--seed", type=int, default=0)
    re_.add_argument("--out", required=True)
    re_.set_defaults(func=cmd_render)

    en = sub.add_parser("enumerate-oracle",
                        help="write brute-force reference tables")
    en.add_argument("--outdir", required=True)
    en.set_defaults(func=cmd_enumerate_oracle)

    rr = sub.add_parser("rerun", help="replay a manifest")
    rr.add_argument("manifest")
    rr.add_argument("--outdir", required=True)
    rr.set_defaults(func=cmd_rerun)

    return ap


def main(argv=None) -> int:
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        ap.print_usage(sys.stderr)
        return EXIT_VALIDATION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except BudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
