"""Command-line front end.

    hamsing <command> --spec SPEC.json [options]

Commands: validate, resonance, series, continue, hunt, monodromy, wcheck.
Reports are JSON (stdout or --out); traces and event tables are CSV
(--csv).  Exit status: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import math
import os
import sys

import numpy as np

from .errors import HamsingError

COMMANDS = ("validate", "resonance", "series", "continue", "hunt", "monodromy", "wcheck")
DEFAULT_INITIAL = "0, 1.1+0.3j, -0.7+0.4j"


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument parsing


def parse_complex(text):
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise UsageError(f"cannot read a complex number from {text!r}") from exc


def parse_complex_list(text, count=None):
    parts = [p for p in text.split(",") if p.strip()]
    vals = [parse_complex(p) for p in parts]
    if count is not None and len(vals) != count:
        raise UsageError(f"expected {count} comma-separated complex numbers, got {len(vals)} in {text!r}")
    return vals


def parse_region(text):
    """'re,im,radius' or 'center,radius' with a complex center."""
    parts = [p.strip() for p in text.split(",")]
    try:
        if len(parts) == 3:
            center, radius = complex(float(parts[0]), float(parts[1])), float(parts[2])
        elif len(parts) == 2:
            center, radius = parse_complex(parts[0]), float(parts[1])
        else:
            raise ValueError
    except ValueError as exc:
        raise UsageError(f"--region expects 're,im,radius', got {text!r}") from exc
    if radius <= 0:
        raise UsageError("--region radius must be positive")
    return center, radius


def parse_path(text, start):
    """Segments separated by ';': 'line:zb' (from the current point),
    'arc:center,radius,angle_start,angle_end[,orientation]'."""
    from .flow.paths import Arc, Line, PathSpec

    segs = []
    cur = complex(start)
    for raw in text.split(";"):
        raw = raw.strip()
        if not raw:
            continue
        kind, _, body = raw.partition(":")
        if kind == "line":
            zb = parse_complex(body)
            segs.append(Line(cur, zb))
        elif kind == "arc":
            vals = [p.strip() for p in body.split(",")]
            if len(vals) not in (4, 5):
                raise UsageError(f"arc segment needs center,radius,angle_start,angle_end[,orientation]: {raw!r}")
            c = parse_complex(vals[0])
            r, a0, a1 = float(vals[1]), float(vals[2]), float(vals[3])
            o = int(vals[4]) if len(vals) == 5 else (1 if a1 >= a0 else -1)
            segs.append(Arc(c, r, a0, a1, o))
        else:
            raise UsageError(f"unknown path segment {raw!r} (use line:... or arc:...)")
        cur = segs[-1].point(segs[-1].length)
    if not segs:
        raise UsageError("empty --path")
    try:
        return PathSpec(segs)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def positive(kind):
    def conv(text):
        try:
            val = kind(text)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc
        if not val > 0:
            raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
        return val

    return conv


def precision_arg(text):
    val = positive(int)(text)
    if val < 15:
        raise argparse.ArgumentTypeError("precision must be at least 15 digits")
    return val


def build_parser():
    p = argparse.ArgumentParser(prog="hamsing", description="Movable singularities of polynomial Hamiltonian systems.")
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", required=True, help="Hamiltonian spec (JSON)")
    common.add_argument("--out", help="report path (default: stdout)")
    common.add_argument("--csv", help="plot-data CSV path")
    common.add_argument("--tol", type=positive(float), default=1e-12, help="local error tolerance")
    common.add_argument("--r-switch", type=positive(float), default=1e3, help="|y1| at which the chart takes over")
    common.add_argument("--precision", type=precision_arg, default=None,
                        help="significant digits for extended precision (>= 15; env HAMSING_PRECISION overrides)")
    common.add_argument("--initial", default=DEFAULT_INITIAL, help="initial data 'z0, y1, y2'")
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "series":
            sp.add_argument("--order", type=positive(int), default=10, help="truncation index K")
            sp.add_argument("--branch", type=int, default=0, help="leading-root index")
            sp.add_argument("--z0", default=None, help="base point for numeric coefficients")
        if name == "continue":
            sp.add_argument("--path", default=None, help="segments, e.g. 'line:1+1j;arc:0,1,0.78,3.14'")
            sp.add_argument("--to", default=None, help="end point of a straight path")
            sp.add_argument("--dense", type=int, default=0, help="extra interpolated samples per segment")
        if name == "hunt":
            sp.add_argument("--region", default="0,0,1", help="disc 're,im,radius'")
            sp.add_argument("--rays", type=positive(int), default=16)
            sp.add_argument("--loops", type=positive(int), default=None)
            sp.add_argument("--radius", type=positive(float), default=None, help="monodromy loop radius")
            sp.add_argument("--workers", type=positive(int), default=1)
        if name == "monodromy":
            sp.add_argument("--z-inf", default="auto", help="'auto' or a complex location")
            sp.add_argument("--loops", type=positive(int), default=None)
            sp.add_argument("--radius", type=positive(float), default=None)
            sp.add_argument("--region", default="0,0,6", help="search disc for --z-inf auto")
            sp.add_argument("--rays", type=positive(int), default=16)
        if name == "wcheck":
            sp.add_argument("--target", default=None, help="direction point for the approach (default: first hunt hit)")
            sp.add_argument("--r-start", type=positive(float), default=1e2)
            sp.add_argument("--r-end", type=positive(float), default=1e6)
            sp.add_argument("--region", default="0,0,6")
            sp.add_argument("--rays", type=positive(int), default=16)
    return p


def effective_precision(args, default=None):
    env = os.environ.get("HAMSING_PRECISION")
    if env:
        try:
            val = int(env)
        except ValueError as exc:
            raise UsageError(f"HAMSING_PRECISION must be an integer, got {env!r}") from exc
        if val < 15:
            raise UsageError("HAMSING_PRECISION must be at least 15")
        return val
    return args.precision if args.precision is not None else default


# ---------------------------------------------------------------------------
# serialization


def cpair(z):
    z = complex(z)
    return [z.real, z.imag]


def jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return cpair(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    return obj


def write_report(report, args):
    report = dict(report)
    report["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    text = json.dumps(jsonable(report), sort_keys=True, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


EVENT_COLUMNS = ["re_z_inf", "im_z_inf", "branch_class", "sheets", "re_C1", "im_C1", "fit_residual", "closure_defect_1"]


def write_events_csv(events, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(EVENT_COLUMNS)
        for ev in events:
            c1 = ev.leading.get("C1", [float("nan"), float("nan")])
            d1 = ev.closure_defects[0] if ev.closure_defects else float("nan")
            w.writerow([repr(float(ev.z_inf.real)), repr(float(ev.z_inf.imag)), ev.branch_class, ev.sheets,
                        repr(float(c1[0])), repr(float(c1[1])), repr(float(ev.fit_residual)), repr(float(d1))])


def emit_plot_data(obj, path):
    """Trace -> trace CSV; list of events -> events CSV."""
    from .flow.integrate import ContinuationTrace, write_trace_csv

    if isinstance(obj, ContinuationTrace):
        write_trace_csv(obj, path)
    else:
        write_events_csv(list(obj), path)


# ---------------------------------------------------------------------------
# commands


def cmd_validate(spec, args):
    from .auxw import build_J
    from .model import build_index_set, dump_spec, fixed_singularities, structural_constants

    sc = structural_constants(spec.M, spec.N)
    return {
        "command": "validate",
        "valid": True,
        "spec": json.loads(dump_spec(spec)),
        "constants": {"R": sc.R, "d": sc.d, "n": sc.n, "m": sc.m, "K0": sc.resonance_offset // sc.d,
                      "p": [sc.p.numerator, sc.p.denominator], "q": [sc.q.numerator, sc.q.denominator]},
        "index_set": sorted([list(ij) for ij in build_index_set(spec.M, spec.N)]),
        "J": sorted([list(kl) for kl in build_J(spec.M, spec.N)]),
        "fixed_singularities": [cpair(z) for z in fixed_singularities(spec)],
    }


def _generic_keys_cover(spec):
    from .model import generic_symbols

    return set(spec.alphas) - {(0, 0)} <= set(generic_symbols(spec.M, spec.N))


def cmd_resonance(spec, args):
    from .series import condition_residues, conditions_for_spec, resonance_conditions

    if _generic_keys_cover(spec):
        conds = resonance_conditions(spec.M, spec.N, spec.leading1, spec.leading2)
        template = "generic"
    else:
        conds = conditions_for_spec(spec)
        template = "spec"
    residues = condition_residues(spec, conds)
    return {
        "command": "resonance",
        "M": spec.M,
        "N": spec.N,
        "template": template,
        "count": len(conds),
        "conditions": [c.to_json() for c in conds],
        "residues": [res.to_json() for _, res in residues],
        "satisfied": all(res.is_zero() for _, res in residues),
    }


def cmd_series(spec, args):
    from .series import check_conditions, derive_formal_series, instantiate_numeric, leading_coefficients, \
        all_leading_roots

    check_conditions(spec)
    series, conds = derive_formal_series(spec, branch=args.branch, K=args.order)
    lc = leading_coefficients(spec)
    rep = {
        "command": "series",
        "M": spec.M,
        "N": spec.N,
        "order": args.order,
        "ramification": series.ramification,
        "k1": series.k1,
        "k2": series.k2,
        "leading_relation": {"R": lc.R, "kappa": lc.kappa.to_json(), "c2": repr(lc.c2)},
        "coeffs1": [c.to_text() for c in series.coeffs1],
        "coeffs2": [c.to_text() for c in series.coeffs2],
        "free_parameters": [list(fp) for fp in series.free_parameters],
        "conditions": [c.to_json() for c in conds],
    }
    if args.z0 is not None:
        z0 = parse_complex(args.z0)
        roots = all_leading_roots(spec.M, spec.N, spec.leading1, spec.leading2)
        num = instantiate_numeric(series, spec, z0, roots[args.branch % len(roots)])
        rep["numeric"] = {"z0": cpair(z0), "root": cpair(num.root), "coeffs1": [cpair(c) for c in num.coeffs1],
                          "coeffs2": [cpair(c) for c in num.coeffs2]}
    return rep


def _initial(args):
    z0, y1, y2 = parse_complex_list(args.initial, 3)
    return z0, y1, y2


def cmd_continue(spec, args):
    from .flow.integrate import continue_along_path, hamiltonian_along, write_trace_csv
    from .flow.paths import line_path

    init = _initial(args)
    if args.path:
        path = parse_path(args.path, init[0])
    elif args.to:
        path = line_path(init[0], parse_complex(args.to))
    else:
        raise UsageError("continue needs --path or --to")
    prec = effective_precision(args)
    tr = continue_along_path(spec, init, path, tol=args.tol, r_switch=args.r_switch, precision=prec,
                             dense=args.dense)
    if args.csv:
        write_trace_csv(tr, args.csv)
    H = hamiltonian_along(spec, tr)
    rep = {
        "command": "continue",
        "status": tr.status,
        "samples": len(tr),
        "end": {"s": float(tr.s[-1]), "z": cpair(tr.z[-1]), "y1": cpair(tr.y1[-1]), "y2": cpair(tr.y2[-1])},
        "stats": tr.stats,
        "hamiltonian_drift": float(np.max(np.abs(H - H[0]))) if spec.is_autonomous() else None,
    }
    if tr.blowup is not None:
        b = tr.blowup
        rep["blowup"] = {"s": float(b.s), "z": cpair(b.z), "y1": cpair(b.y1), "y2": cpair(b.y2), "arg1": b.arg1}
    return rep


def cmd_hunt(spec, args):
    from .flow.hunt import hunt_singularities

    init = _initial(args)
    region = parse_region(args.region)
    if abs(init[0] - region[0]) > region[1]:
        raise UsageError("the initial point must lie inside --region")
    events, outcomes = hunt_singularities(spec, init, region, rays=args.rays, tol=args.tol, r_switch=args.r_switch,
                                          loops=args.loops, radius=args.radius,
                                          precision=effective_precision(args), workers=args.workers)
    if args.csv:
        emit_plot_data(events, args.csv)
    return {
        "command": "hunt",
        "region": {"center": cpair(region[0]), "radius": region[1]},
        "rays": args.rays,
        "events": [ev.to_json() for ev in events],
        "ray_outcomes": [{"angle": o.angle, "status": o.status, "message": o.message} for o in outcomes],
    }


def _first_event_trace(spec, init, args):
    """Approach the first singularity found along the hunt rays (in ray order)."""
    from .flow.approach import approach_singularity
    from .flow.hunt import ray_exit

    center, rho = parse_region(args.region)
    for k in range(args.rays):
        ang = 2 * math.pi * k / args.rays
        length = ray_exit(init[0], center, rho, ang)
        if length <= 0:
            continue
        tr = approach_singularity(spec, init, init[0] + length * complex(math.cos(ang), math.sin(ang)), tol=args.tol,
                                  r_switch=args.r_switch)
        if tr.status == "blowup":
            return tr
    return None


def cmd_monodromy(spec, args):
    from .flow.approach import approach_singularity
    from .flow.hunt import analyse_blowup

    init = _initial(args)
    if args.z_inf == "auto":
        tr = _first_event_trace(spec, init, args)
        if tr is None:
            raise NoSingularity("no singularity reached along the search rays")
    else:
        zt = parse_complex(args.z_inf)
        tr = approach_singularity(spec, init, init[0] + 2 * (zt - init[0]), tol=args.tol, r_switch=args.r_switch)
        if tr.status != "blowup":
            raise NoSingularity(f"no singularity reached toward {zt}")
    prec = effective_precision(args, default=30)
    ev, landing = analyse_blowup(spec, tr, tol=args.tol, loops=args.loops, loop_radius=args.radius, precision=prec)
    return {
        "command": "monodromy",
        "z_inf": cpair(ev.z_inf),
        "sheets": ev.sheets,
        "closure_defects": ev.closure_defects,
        "loop_radius": ev.diagnostics["loop_radius"],
        "precision": prec,
        "event": ev.to_json(),
    }


def cmd_wcheck(spec, args):
    from .auxw import solve_betas
    from .errors import GammaNonzero
    from .flow.integrate import write_trace_csv
    from .flow.wtrace import w_approach

    init = _initial(args)
    gamma = None
    try:
        aux = solve_betas(spec, strict=True)
    except GammaNonzero as exc:
        gamma = {"index": list(exc.index), "residue": exc.residue.to_json()}
        aux = solve_betas(spec, strict=False)
    if args.target is not None:
        target = parse_complex(args.target)
    else:
        tr0 = _first_event_trace(spec, init, args)
        if tr0 is None:
            raise NoSingularity("no singularity reached along the search rays")
        target = init[0] + 2 * (complex(tr0.z[-1]) - init[0])
    prec = effective_precision(args, default=40)
    tr, summary, window = w_approach(spec, aux, init, target, r_start=args.r_start, r_end=args.r_end, precision=prec)
    if summary is None:
        raise NoSingularity("approach did not reach the requested |y1|")
    if args.csv:
        write_trace_csv(tr, args.csv)
    W = summary.values
    return {
        "command": "wcheck",
        "gamma_nonzero": gamma,
        "window": [args.r_start, args.r_end],
        "W_at_switch": cpair(W[0]),
        "max_abs_W": summary.abs_max,
        "min_abs_W": summary.abs_min,
        "bounded": bool(summary.abs_max <= 10 * abs(W[0])),
        "growth_slope": summary.growth_slope,
        "monotone_growth": summary.monotone_growth,
        "precision": prec,
        "samples": int(np.sum(window)),
    }


class NoSingularity(HamsingError):
    """No blow-up was reached where one was requested."""


HANDLERS = {
    "validate": cmd_validate,
    "resonance": cmd_resonance,
    "series": cmd_series,
    "continue": cmd_continue,
    "hunt": cmd_hunt,
    "monodromy": cmd_monodromy,
    "wcheck": cmd_wcheck,
}


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    from .model import load_spec

    try:
        try:
            spec = load_spec(args.spec)
        except FileNotFoundError:
            raise UsageError(f"spec file not found: {args.spec}")
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, HamsingError):
                raise
            raise UsageError(f"cannot parse spec {args.spec}: {exc}")
        report = HANDLERS[args.command](spec, args)
        write_report(report, args)
        return 0
    except UsageError as exc:
        print(f"hamsing: usage error: {exc}", file=sys.stderr)
        return 2
    except HamsingError as exc:
        print(f"hamsing: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
