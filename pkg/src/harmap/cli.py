"""Command-line interface.

Subcommands: eval, check, means, alexander, probe, render, suite.  Flags can
be preloaded from a flat JSON config (--config); explicit flags win.  Exit
codes: 0 all requested checks passed, 1 a check failed, 2 usage error,
3 numeric failure.  The HARMAP_THREADS environment variable caps worker
threads for sweep-style workloads.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import alexander as alex
from . import checks, families, means, probe, render, suite
from .errors import HarmapError

USAGE_EXIT = 2
CHECK_FAIL_EXIT = 1
NUMERIC_EXIT = 3


def _parse_complex(text):
    return complex(text.replace(" ", "").replace("i", "j"))


def _load_map(args, need_dilatation=False):
    """Resolve --map/--builtin flags to a family object or harmonic map."""
    if getattr(args, "map", None):
        doc = json.loads(Path(args.map).read_text())
        obj = families.from_descriptor(doc)
    elif getattr(args, "builtin", None):
        name = args.builtin
        params = {}
        if name == "f1":
            params["lam"] = _parse_complex(args.lam) if args.lam else 0.5
        if name in ("gK", "fKdelta"):
            if args.K is None:
                raise UsageError(f"--K required for builtin {name}")
            params["K"] = args.K
        if name == "fKdelta":
            if args.delta is None:
                raise UsageError("--delta required for builtin fKdelta")
            params["delta"] = args.delta
        obj = families.builtin(name, **params)
    else:
        raise UsageError("one of --map or --builtin is required")
    if getattr(args, "dilatation", None):
        dil = families._dilatation_from(json.loads(args.dilatation))
        h = obj.h if isinstance(obj, families.HarmonicMap) else obj
        obj = families.HarmonicMap(h, dil, getattr(h, "name", "map"))
    if need_dilatation and not isinstance(obj, families.HarmonicMap):
        raise UsageError("this command needs a harmonic map (add --dilatation)")
    return obj


class UsageError(SystemExit):
    def __init__(self, message):
        print(f"error: {message}", file=sys.stderr)
        super().__init__(USAGE_EXIT)


def _emit(args, payload, filename):
    text = json.dumps(payload, indent=2, default=str)
    print(text)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / filename).write_text(text + "\n")


# ---------------------------------------------------------------------------
# subcommand handlers

def cmd_eval(args):
    obj = _load_map(args)
    z = _parse_complex(args.z)
    if isinstance(obj, families.HarmonicMap):
        fz = obj.f(z)
        jac = obj.jacobian(z)
    else:
        fz = obj.value(z)
        jac = abs(obj.derivative(z)) ** 2
    _emit(args, {"z": {"re": z.real, "im": z.imag}, "f": {"re": fz.real, "im": fz.imag}, "jacobian": jac}, "eval.json")
    return 0


def cmd_check(args):
    obj = _load_map(args)
    name = args.name

    def run(check, *pos, **kw):
        if args.strict:
            return checks.strict_report(check, *pos, **kw)
        return check(*pos, r=args.r, **kw)

    if name == "convexity":
        rep = run(checks.convexity_order, obj, n=args.n, mode=args.mode)
    elif name == "starlike":
        rep = run(checks.starlike_order, obj, n=args.n)
    elif name == "rotation":
        value = checks.boundary_rotation(obj, args.r, args.n)
        _emit(args, {"name": "boundary_rotation", "value": value, "r": args.r, "grid_n": args.n}, "check.json")
        return 0
    elif name == "kaplan":
        if isinstance(obj, families.HarmonicMap):
            obj = checks.EpsSlice(obj, _parse_complex(args.eps))
        rep = run(checks.kaplan_margin, obj, n=args.n)
    elif name == "harmonic":
        if not isinstance(obj, families.HarmonicMap):
            raise UsageError("harmonic check needs a dilatation")
        rep = run(checks.harmonic_ctc_sweep, obj, args.eps_count, n=args.n)
    elif name == "certificate":
        fobj = obj
        h = obj.h if isinstance(obj, families.HarmonicMap) else obj
        if isinstance(obj, families.HarmonicMap):
            fobj = checks.EpsSlice(obj, _parse_complex(args.eps))
        label = getattr(h, "label", None)
        if isinstance(label, families.ConvexOrder) and isinstance(h, families.ProductDerivative):
            comparison = checks.comparison_from_convex_order(h)
        elif isinstance(label, families.BoundedRotation) and isinstance(h, families.ProductDerivative):
            comparison = checks.comparison_from_bounded_rotation(h)
        elif isinstance(label, families.CappedConvexity) and isinstance(obj, families.HarmonicMap):
            comparison = checks.comparison_from_capped(obj.omega, _parse_complex(args.eps))
        else:
            comparison = checks.koebe_comparison()
        rep = checks.ctc_certificate(fobj, comparison, args.r, args.n)
    elif name == "covering":
        ok = checks.covering_check(obj, args.r, args.target_radius, args.probes)
        _emit(args, {"name": "covering", "pass": ok, "r": args.r, "target_radius": args.target_radius}, "check.json")
        return 0 if ok else CHECK_FAIL_EXIT
    else:
        raise UsageError(f"unknown check {name!r}")
    _emit(args, rep.to_json(), "check.json")
    return 0 if rep.passed() else CHECK_FAIL_EXIT


def cmd_means(args):
    if args.radii:
        radii = [float(tok) for tok in args.radii.split(",")]
    else:
        radii = [args.r]
    if args.builtin == "h0" and not args.map:
        results = means.sharpness_scan(args.beta, radii, args.n)
    else:
        obj = _load_map(args)
        h = obj.h if isinstance(obj, families.HarmonicMap) else obj
        bound = means.integral_mean_bound(args.beta)
        results = [
            means.MeansResult(args.beta, r, means.integral_mean(h, args.beta, r, args.n), bound)
            for r in radii
        ]
    csv_text = means.means_csv(results)
    print(csv_text, end="")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "means.csv").write_text(csv_text)
    return 0


def cmd_alexander(args):
    fmap = _load_map(args, need_dilatation=True)
    lam = _parse_complex(args.lam) if args.lam else 1.0
    rep = alex.alexander_ctc_check(fmap, lam, args.r, args.n, starlike_floor=args.starlike_floor)
    payload = rep.to_json()

    # tighter quadrature keeps the extraction's stabilization check clear of
    # the h-value noise floor
    series = alex.taylor_coefficients(
        lambda z: np.asarray(fmap.h.value(z, tol=1e-13), dtype=complex),
        args.coefficients,
        rho=0.9,
    )
    gseries = alex.taylor_coefficients(
        lambda z: np.asarray(fmap.g(z, tol=1e-13), dtype=complex), args.coefficients, rho=0.9
    )
    H, G = alex.alexander_transform(series, gseries)
    payload["H_coefficients"] = H.to_json()
    payload["G_coefficients"] = G.to_json()
    _emit(args, payload, "alexander.json")
    return 0 if rep.passed() else CHECK_FAIL_EXIT


def cmd_probe(args):
    params = {}
    if args.conjecture == "cor1":
        params["n"] = args.n_power
    elif args.conjecture == "cor2":
        params["delta"] = args.delta if args.delta is not None else 1.0
        if args.K is not None:
            params["k"] = args.K
    elif args.conjecture == "cor3":
        params["alpha"] = args.alpha if args.alpha is not None else 1.5
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    settings = probe.ProbeSettings(
        h_instances=args.instances,
        theta_count=args.theta_count,
        bisection_steps=args.steps,
        r=args.r,
        kaplan_n=args.grid_n,
        with_injectivity=not args.no_injectivity,
        log_path=str(out / "probe.jsonl"),
    )
    result = probe.conjecture_probe(args.conjecture, params, settings, seed=args.seed)
    payload = result.to_json()
    payload["conjectured_scale"] = probe.conjectured_scale(args.conjecture, params)
    _emit(args, payload, "probe.json")
    return 0


def cmd_render(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    jobs = []
    if args.figure == "fig1":
        lam = _parse_complex(args.lam) if args.lam else 0.5
        jobs.append((f"fig1-lam{lam.real:g}", families.builtin("f1", lam=lam)))
    elif args.figure == "fig1-all":
        for i, lam in enumerate(render.FIGURE_ONE_LAMBDAS):
            jobs.append((f"fig1-{chr(97 + i)}", families.builtin("f1", lam=lam)))
    elif args.figure == "fig2":
        if args.K is None or args.delta is None:
            raise UsageError("fig2 requires --K and --delta")
        jobs.append((f"fig2-K{args.K:g}-d{args.delta:g}", families.builtin("fKdelta", K=args.K, delta=args.delta)))
    elif args.figure == "fig2-all":
        for i, (k, d) in enumerate(render.FIGURE_TWO_PARAMS):
            jobs.append((f"fig2-{chr(97 + i)}", families.builtin("fKdelta", K=k, delta=d)))
    elif args.figure == "custom":
        jobs.append(("custom", _load_map(args)))
    else:
        raise UsageError(f"unknown figure {args.figure!r}")
    written = []
    for name, fmap in jobs:
        curves = render.sample_curves(
            fmap, args.rays, args.circles, args.max_r, args.points
        )
        svg = render.emit_svg(curves, out / f"{name}.svg", args.width, args.stroke)
        csv = render.emit_csv(curves, out / f"{name}.csv")
        written.extend([str(svg), str(csv)])
    print("\n".join(written))
    return 0


def cmd_suite(args):
    results = suite.run_suite(seed=args.seed, out_dir=args.out if args.figures else None)
    print(suite.format_table(results))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "suite.json").write_text(
        json.dumps(
            [
                {
                    "cid": r.cid,
                    "description": r.description,
                    "pass": r.passed,
                    "detail": r.detail,
                    "seconds": r.seconds,
                }
                for r in results
            ],
            indent=2,
        )
        + "\n"
    )
    return 0 if all(r.passed for r in results) else CHECK_FAIL_EXIT


# ---------------------------------------------------------------------------

def _add_map_flags(p):
    p.add_argument("--map", help="JSON descriptor file for the function or map")
    p.add_argument("--builtin", help="builtin name: h0, gK, koebe_harmonic, f1, fKdelta")
    p.add_argument("--lambda", "--lam", dest="lam",
                   help="complex parameter for f1 / transform factor")
    p.add_argument("--K", type=float, help="bounded-rotation parameter")
    p.add_argument("--delta", type=float, help="dilatation-scale parameter")
    p.add_argument("--dilatation", help='inline dilatation JSON, e.g. {"variant":"rotation","params":{"theta":0}}')


def _add_grid_flags(p, r=0.99, n=2048):
    p.add_argument("--r", type=float, default=r)
    p.add_argument("--n", type=int, default=n)


def build_parser():
    root = argparse.ArgumentParser(prog="harmap", description=__doc__)
    root.add_argument("--config", help="flat JSON file of flag defaults")
    sub = root.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate f(z) and the Jacobian")
    _add_map_flags(p)
    p.add_argument("--z", required=True, help="evaluation point, e.g. 0.3+0.4j")

    p = sub.add_parser("check", help="run a named geometric check")
    p.add_argument("--name", required=True,
                   choices=["convexity", "starlike", "rotation", "kaplan", "harmonic", "certificate", "covering"])
    _add_map_flags(p)
    _add_grid_flags(p)
    p.add_argument("--mode", default="min", choices=["min", "max"])
    p.add_argument("--eps", default="1", help="slice parameter for kaplan/certificate")
    p.add_argument("--eps-count", type=int, default=32)
    p.add_argument("--target-radius", type=float, default=0.5)
    p.add_argument("--probes", type=int, default=16)
    p.add_argument("--strict", action="store_true",
                   help="evaluate over the radius schedule 0.9/0.99/0.999 and report the worst margin")

    p = sub.add_parser("means", help="integral-mean scan with the Beta bound")
    _add_map_flags(p)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--radii", help="comma-separated radii (overrides --r)")
    _add_grid_flags(p, r=0.9, n=None)

    p = sub.add_parser("alexander", help="index-division transform and its checks")
    _add_map_flags(p)
    _add_grid_flags(p)
    p.add_argument("--coefficients", type=int, default=50)
    p.add_argument("--starlike-floor", type=float, default=0.0)

    p = sub.add_parser("probe", help="bisection probe of a sharpness conjecture")
    p.add_argument("--conjecture", required=True, choices=["cor1", "cor2", "cor3"])
    p.add_argument("--n", "--n-power", dest="n_power", type=int, default=1,
                   help="monomial power for cor1")
    p.add_argument("--delta", type=float)
    p.add_argument("--K", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--instances", type=int, default=20)
    p.add_argument("--theta-count", type=int, default=16)
    p.add_argument("--steps", type=int, default=20)
    p.add_argument("--no-injectivity", action="store_true")
    p.add_argument("--r", type=float, default=0.99)
    p.add_argument("--grid-n", dest="grid_n", type=int, default=1024,
                   help="Kaplan grid size per sweep")

    p = sub.add_parser("render", help="emit SVG/CSV disk images")
    p.add_argument("--figure", required=True,
                   help="fig1, fig1-all, fig2, fig2-all, or custom (with --map/--builtin)")
    _add_map_flags(p)
    p.add_argument("--rays", type=int, default=render.DEFAULT_RAYS)
    p.add_argument("--circles", type=int, default=render.DEFAULT_CIRCLES)
    p.add_argument("--points", type=int, default=render.DEFAULT_PTS)
    p.add_argument("--max-r", type=float, default=render.DEFAULT_MAX_R)
    p.add_argument("--width", type=float, default=800.0)
    p.add_argument("--stroke", type=float, default=1.0)

    p = sub.add_parser("suite", help="run the acceptance battery")
    p.add_argument("--figures", action="store_true", help="also write the figure SVGs")

    for p in sub.choices.values():
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--out", default="./out")
    return root


HANDLERS = {
    "eval": cmd_eval,
    "check": cmd_check,
    "means": cmd_means,
    "alexander": cmd_alexander,
    "probe": cmd_probe,
    "render": cmd_render,
    "suite": cmd_suite,
}


def _apply_config(root, argv):
    """Load --config JSON as flag defaults; unknown keys are rejected."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    try:
        cfg_path = argv[idx + 1]
    except IndexError:
        raise UsageError("--config needs a file argument")
    doc = json.loads(Path(cfg_path).read_text())
    command = next((a for a in argv if not a.startswith("-") and a != cfg_path), None)
    if command is None or command not in HANDLERS:
        raise UsageError("--config requires a subcommand")
    sub = root._subparsers._group_actions[0].choices[command]
    known = {a.dest for a in sub._actions}
    extra = []
    for key, value in doc.items():
        if key not in known:
            raise UsageError(f"unknown config key {key!r}")
        flag = "--" + key.replace("_", "-")
        if f"--{key}" in argv or flag in argv:
            continue
        if isinstance(value, bool):
            if value:
                extra.append(flag)
        else:
            extra.append(flag)
            extra.append(str(value))
    cleaned = [a for i, a in enumerate(argv) if i not in (idx, idx + 1)]
    return cleaned + extra


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    root = build_parser()
    try:
        argv = _apply_config(root, argv)
        args = root.parse_args(argv)
        return HANDLERS[args.command](args)
    except UsageError as exc:
        return exc.code
    except HarmapError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return NUMERIC_EXIT


if __name__ == "__main__":
    sys.exit(main())
