"""Command-line interface: reproducible experiments over all modules.

Every command writes deterministic output (12 significant digits,
sorted JSON keys), so identical invocations are byte-identical.  Exit
codes: 0 success, 2 usage or domain problems, 3 a size cap would be
exceeded, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction

from . import boundary, render, stats
from .classify import classify
from .errors import (ArgumentError, DomainError, GeometryError,
                     NumericError, ResourceError, TilelabError)
from .geometry import TriangleShape, shape_from_pq, shape_from_theta
from .spectral import eigen, irrational_spectrum
from .substitution import (DEFAULT_TILE_CAP, build_Tn, tiling_from_json,
                           tiling_to_json)

ENV_MAX_TILES = "TILELAB_MAX_TILES"


def _round12(obj):
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    return obj


def _emit_json(data, out_path: str | None) -> None:
    text = json.dumps(_round12(data), sort_keys=True, indent=1) + "\n"
    _emit_text(text, out_path)


def _emit_text(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w") as fh:
            fh.write(text)


def _shape_from_args(args) -> TriangleShape:
    if getattr(args, "pq", None):
        try:
            p_str, q_str = args.pq.split("/")
            p, q = int(p_str), int(q_str)
        except ValueError:
            raise ArgumentError(f"--pq wants P/Q with integers, got {args.pq!r}")
        return shape_from_pq(p, q)
    return shape_from_theta(args.theta)


def _tile_cap(args) -> int:
    env = os.environ.get(ENV_MAX_TILES)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ArgumentError(f"{ENV_MAX_TILES} must be an integer, got {env!r}")
    return DEFAULT_TILE_CAP


def _add_shape_args(sub, required: bool = True) -> None:
    group = sub.add_mutually_exclusive_group(required=required)
    group.add_argument("--pq", help="rational size-ratio P/Q, e.g. 1/2")
    group.add_argument("--theta", type=float,
                       help="small angle of the prototile in radians")


def _cmd_generate(args) -> int:
    shape = _shape_from_args(args)
    tiling = build_Tn(shape, args.n, cap=_tile_cap(args))
    _emit_json(tiling_to_json(tiling), args.out)
    return 0


def _cmd_classify(args) -> int:
    shape = _shape_from_args(args)
    theta_pi = None
    if args.theta_pi == "irrational":
        theta_pi = False
    elif args.theta_pi:
        try:
            u, v = args.theta_pi.split("/")
            frac = Fraction(int(u), int(v))
        except ValueError as exc:
            raise ArgumentError("--theta-pi wants U/V or 'irrational', "
                                f"got {args.theta_pi!r}") from exc
        # the declaration must actually describe this shape
        if frac <= 0 or abs(shape.theta - float(frac) * math.pi) > 1e-9:
            raise ArgumentError(
                f"theta = {shape.theta!r} is not ({args.theta_pi})*pi")
        theta_pi = True
    report = classify(shape, theta_pi_rational=theta_pi)
    _emit_json(report.to_json(), args.out)
    return 0


def _cmd_spectral(args) -> int:
    shape = _shape_from_args(args)
    if shape.rationality is not None:
        report = eigen(shape)
        _emit_json(report.to_json(), args.out)
    else:
        report = irrational_spectrum(shape)
        _emit_json(report.to_json(), args.out)
    return 0


def _boundary_rows_til12(n_max: int):
    yield "n,f,g_at_Q,offsets"
    for n in range(1, n_max + 1):
        prof = boundary.slippage_til12(n)
        yield f"{n},{prof.f},{prof.g_at_Q},{len(prof.distinct_offsets)}"


def _boundary_rows_til2(n_max: int):
    yield "n,max_abs_f,offsets"
    for n in range(1, n_max + 1):
        bound = boundary.til2_slippage_bound(n)
        offs = boundary.til2_offsets(n)
        yield f"{n},{bound},{len(offs)}"


def _boundary_rows_til13(n_max: int):
    yield "n,fluctuation,offsets"
    for n in range(1, n_max + 1):
        fl = boundary.til13_fluctuation(n)
        offs = boundary.til13_offsets(n)
        yield f"{n},{fl},{len(offs)}"


def _cmd_boundary(args) -> int:
    rows = {
        "til12": _boundary_rows_til12,
        "til2": _boundary_rows_til2,
        "til13": _boundary_rows_til13,
    }[args.system](args.n)
    _emit_text("\n".join(rows) + "\n", args.out)
    return 0


def _cmd_stats(args) -> int:
    with open(args.infile) as fh:
        tiling = tiling_from_json(json.load(fh))
    shape = tiling.shape
    hist = stats.size_histogram(tiling, args.weighting)
    if shape.rationality is not None:
        rep = eigen(shape)
        full = rep.rho if args.weighting == "area" else rep.nu
        analytic = tuple(full[k - 1] for k in hist.labels)
        metric = "l1"
    else:
        width = shape.mu / len(hist.labels)
        limit = (stats.area_fraction_limit if args.weighting == "area"
                 else stats.count_fraction_limit)
        analytic = tuple(limit(shape, (k * width, min((k + 1) * width, shape.mu)))
                         for k in hist.labels)
        metric = "cdf_sup"
    comp = stats.ComparisonReport(
        name="size", weighting=args.weighting, labels=hist.labels,
        analytic=analytic, empirical=hist.masses,
        tolerance=args.tolerance, metric=metric)
    if args.csv:
        _emit_text(comp.to_csv(), args.out)
        return 0
    summary = {"size": comp.to_json(), "generation": tiling.generation,
               "tiles": len(tiling.tiles)}
    ori = stats.orientation_histogram(tiling)
    summary["orientation"] = {"bins": ori.bins,
                              "max_deviation": ori.max_deviation()}
    _emit_json(summary, args.out)
    return 0


def _cmd_render(args) -> int:
    with open(args.infile) as fh:
        tiling = tiling_from_json(json.load(fh))
    svg = render.render_svg(tiling, color=args.color, faults=args.faults)
    _emit_text(svg, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tilelab",
        description="generalized pinwheel substitution tilings: generation, "
                    "classification, spectra, fault-line analysis, rendering")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker cap (reserved; current pipelines are "
                             "single-process deterministic)")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="build T_n and write tiling JSON")
    _add_shape_args(g)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--out", default=None)
    g.set_defaults(func=_cmd_generate)

    c = sub.add_parser("classify", help="size/orientation finiteness report")
    _add_shape_args(c)
    c.add_argument("--theta-pi", default=None, dest="theta_pi",
                   help="declare theta = (U/V)*pi exactly (e.g. 1/4), "
                        "or 'irrational' to assert the opposite")
    c.add_argument("--out", default=None)
    c.set_defaults(func=_cmd_classify)

    s = sub.add_parser("spectral", help="population spectrum report")
    _add_shape_args(s)
    s.add_argument("--out", default=None)
    s.set_defaults(func=_cmd_spectral)

    b = sub.add_parser("boundary", help="fault-line substitution profiles (CSV)")
    b.add_argument("--system", required=True, choices=("til12", "til2", "til13"))
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--out", default=None)
    b.set_defaults(func=_cmd_boundary)

    st = sub.add_parser("stats", help="empirical vs analytic distribution tables")
    st.add_argument("--in", dest="infile", required=True)
    st.add_argument("--weighting", choices=("count", "area"), default="area")
    st.add_argument("--tolerance", type=float, default=0.02)
    st.add_argument("--csv", action="store_true",
                    help="emit the per-bin CSV table instead of the JSON summary")
    st.add_argument("--out", default=None)
    st.set_defaults(func=_cmd_stats)

    r = sub.add_parser("render", help="render tiling JSON to SVG")
    r.add_argument("--in", dest="infile", required=True)
    r.add_argument("--color", choices=("size", "phi"), default="size")
    r.add_argument("--faults", action="store_true")
    r.add_argument("--out", default=None)
    r.set_defaults(func=_cmd_render)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    if args.threads is not None and args.threads < 1:
        sys.stderr.write("error: --threads must be at least 1\n")
        return 2
    try:
        return args.func(args)
    except ResourceError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 3
    except (NumericError, GeometryError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 4
    except (ArgumentError, DomainError, FileNotFoundError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except TilelabError as exc:
        sys.stderr.write(f"internal error: {exc}\n")
        return 4


if __name__ == "__main__":
    sys.exit(main())
