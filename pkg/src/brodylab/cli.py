"""Command-line front end: ``brodylab <command> ...``.

Curves are given as a JSON document path or as ``corpus:<id>``.  Regions are
``disk:CX,CY,R``, ``square:X0,Y0,SIDE`` (lower-left corner) or
``csquare:CX,CY,SIDE`` (centred).  Results are JSON lines on stdout (or
``--out``); every record carries the run configuration.

Exit codes: 0 success, 1 failed acceptance criterion, 2 precondition
violation or bad input, 3 numerical non-convergence, 4 bound violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field

from . import corpus
from .errors import BrodyLabError, ParseError
from .io import curve_to_dict, dump_curve, load_curve, record_line, write_field_csv
from .parallel import THREADS_ENV
from .quadrature import QuadratureOptions
from .regions import Region


@dataclass(frozen=True)
class RunConfig:
    command: str
    args: dict
    threads: int | None
    seed: int
    quadrature: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------------------
# argument parsing helpers


def parse_complex(text: str) -> complex:
    try:
        parts = [float(x) for x in text.split(",")]
    except ValueError as exc:
        raise ParseError(f"bad complex number {text!r}; use RE,IM") from exc
    if len(parts) == 1:
        return complex(parts[0], 0.0)
    if len(parts) != 2:
        raise ParseError(f"bad complex number {text!r}; use RE,IM")
    return complex(parts[0], parts[1])


def parse_region(text: str) -> Region:
    try:
        kind, rest = text.split(":", 1)
        x, y, s = (float(v) for v in rest.split(","))
    except ValueError as exc:
        raise ParseError(f"bad region {text!r}; use disk:CX,CY,R, square:X0,Y0,SIDE or csquare:CX,CY,SIDE") from exc
    if kind == "disk":
        return Region.disk(complex(x, y), s)
    if kind == "square":
        return Region.square(complex(x, y), s)
    if kind == "csquare":
        return Region.centered_square(complex(x, y), s)
    raise ParseError(f"unknown region kind {kind!r}")


def parse_floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v]
    except ValueError as exc:
        raise ParseError(f"bad number list {text!r}") from exc


def resolve_curve(source: str):
    if source.startswith("corpus:"):
        try:
            return corpus.get(source.split(":", 1)[1]).curve, source
        except KeyError as exc:
            raise ParseError(str(exc)) from exc
    return load_curve(source), source


# ---------------------------------------------------------------------------
# commands


class Output:
    def __init__(self, path: str | None, config: RunConfig):
        self.fh = open(path, "w") if path else sys.stdout
        self.config = config.to_dict()

    def emit(self, op: str, curve_id, value, **extra):
        self.fh.write(record_line(op, curve_id, value, self.config, **extra) + "\n")

    def close(self):
        if self.fh is not sys.stdout:
            self.fh.close()


def _quad(args) -> QuadratureOptions:
    kw = {}
    if args.order is not None:
        kw["order"] = args.order
    if args.rtol is not None:
        kw["rtol"] = args.rtol
    if args.threads is not None:
        kw["threads"] = args.threads
    return QuadratureOptions(**kw)


def cmd_constants(args, out: Output) -> int:
    from .constants import torus_constant

    rep = torus_constant()
    out.emit("constants", None, rep.value, error_estimate=rep.error_estimate, detail=rep.to_dict())
    return 0


def cmd_eval(args, out: Output) -> int:
    from .curves import evaluate_point, spherical_derivative

    curve, cid = resolve_curve(args.curve)
    for ztxt in args.z:
        z = parse_complex(ztxt)
        p = evaluate_point(curve, z)
        out.emit("eval", cid, spherical_derivative(curve, z), z=z, point=[complex(c) for c in p.coords], error_estimate=0.0)
    return 0


def cmd_energy(args, out: Output) -> int:
    from .energy import energy, plane_energy

    curve, cid = resolve_curve(args.curve)
    opts = _quad(args)
    if args.plane:
        from .curves import Rational

        if not isinstance(curve, Rational):
            raise ParseError("--plane needs a rational curve")
        res = plane_energy(curve, args.cutoff, opts)
        out.emit("plane_energy", cid, res["value"], error_estimate=res["error_estimate"], detail=res)
        return 0
    res = energy(curve, parse_region(args.region), opts)
    out.emit("energy", cid, res.value, error_estimate=res.error_estimate, region=res.region.to_dict(),
             quadrature={"order": res.order, "depth": res.depth, "tiles": res.tiles})
    return 0


def cmd_nsa(args, out: Output) -> int:
    from .energy import nsa_profile, rho_nsa_estimate

    curve, cid = resolve_curve(args.curve)
    opts = _quad(args)
    if args.r:
        for p in nsa_profile(curve, parse_floats(args.r), opts):
            out.emit("nsa", cid, p["value"], error_estimate=p["error_estimate"], r=p["r"], brody_bound=p["brody_bound"])
    if args.r_max is not None:
        res = rho_nsa_estimate(curve, args.r_max, opts=opts)
        out.emit("rho_nsa", cid, res["value"], error_estimate=None, detail=res)
    return 0


def cmd_rho(args, out: Output) -> int:
    from .energy import FolnerSequence, folner_agreement, rho_elliptic, rho_estimate

    curve, cid = resolve_curve(args.curve)
    opts = _quad(args)
    if args.elliptic:
        res = rho_elliptic(curve, opts=opts)
        out.emit("rho_elliptic", cid, res["value"], error_estimate=res["error_estimate"], detail=res)
    if args.sizes:
        sizes = parse_floats(args.sizes)
        window = parse_region(args.window)
        if args.agreement:
            rep = folner_agreement(curve, window, sizes, opts)
            for row in rep["rows"]:
                out.emit("folner_agreement", cid, row["relative_disagreement"], error_estimate=None, detail=row)
        else:
            est = rho_estimate(curve, FolnerSequence(args.shape, tuple(sizes)), window, opts)
            for p in est.points:
                out.emit("rho", cid, p.rho, error_estimate=p.error_estimate, size=p.size, area=p.area, argmax=p.argmax,
                         shape=args.shape, window=window.to_dict())
            out.emit("rho_trend", cid, est.monotone_trend, error_estimate=None,
                     last_relative_change=est.last_relative_change)
    return 0


def cmd_nondeg(args, out: Output) -> int:
    from .nondegeneracy import classify, nondegeneracy_profile

    curve, cid = resolve_curve(args.curve)
    windows = [parse_region(w) for w in args.window]
    cert = nondegeneracy_profile(curve, args.R, windows, threads=args.threads)
    verdict = classify(cert, args.threshold)
    for w, d, a in cert.trend:
        out.emit("nondeg_trend", cid, d, error_estimate=None, window=w.to_dict(), argmin_center=a)
    out.emit("nondeg", cid, verdict, error_estimate=None, certificate=cert.to_dict(), threshold=args.threshold)
    if args.table:
        sys.stderr.write(f"{'window':<40} delta_hat\n")
        for w, d, _ in cert.trend:
            sys.stderr.write(f"{json.dumps(w.to_dict()):<40} {d:.6g}\n")
    return 0


def cmd_glue_once(args, out: Output) -> int:
    from .gluing import glue_once, verify_glue

    from .gluing import solve_constants

    curve, cid = resolve_curve(args.curve)
    consts = solve_constants(curve.N, args.mode, R0=args.R0, K=args.K)
    p = parse_complex(args.p)
    g = glue_once(curve, p, args.R, consts)
    annulus = tuple(parse_floats(args.annulus)) if args.annulus else None
    rep = verify_glue(curve, g, p, args.R, consts.K, annulus=annulus, delta0=consts.delta0)
    out.emit("glue_once", cid, rep.passed, error_estimate=None, constants=consts.to_dict(), report=rep.to_dict(),
             curve=curve_to_dict(g))
    if args.save:
        dump_curve(g, args.save)
    if args.csv_before:
        write_field_csv(args.csv_before, curve, Region.disk(p, 4 * args.R), args.R / 16)
    if args.csv_after:
        write_field_csv(args.csv_after, g, Region.disk(p, 4 * args.R), args.R / 16)
    if consts.mode == "empirical" and not rep.passed:
        return 4
    return 0


def cmd_glue_tile(args, out: Output) -> int:
    from .gluing import TilingPlan, make_nondegenerate

    from .gluing import solve_constants

    curve, cid = resolve_curve(args.curve)
    consts = solve_constants(curve.N, args.mode, R0=args.R0, K=args.K)
    if args.window % 2 != 1:
        raise ParseError("--window must be an odd number of tiles per side")
    plan = TilingPlan.square(args.R, args.window // 2, args.order_tiles)
    res = make_nondegenerate(curve, args.eps, args.tau, plan, consts, check_energy=not args.skip_energy)
    for rec in res.records:
        out.emit("glue_tile", cid, rec.case, error_estimate=None, **rec.to_dict())
    out.emit("glue_tile_summary", cid, len(res.glued_tiles), error_estimate=None, delta=res.delta,
             tail_bound=res.tail_bound, checks=list(res.checks), constants=consts.to_dict(), plan=plan.to_dict())
    if args.save:
        dump_curve(res.curve, args.save)
    window = plan.bounding_square()
    if args.csv_before:
        write_field_csv(args.csv_before, curve, window, args.R / 8)
    if args.csv_after:
        write_field_csv(args.csv_after, res.curve, window, args.R / 8)
    return 0


def cmd_dist(args, out: Output) -> int:
    from .dynmetrics import DistanceOptions, dist_inequality_check, dist_omega

    g, gid = resolve_curve(args.g)
    h, hid = resolve_curve(args.h)
    opts = DistanceOptions(n_max=args.n_max, resolution=args.resolution, threads=args.threads)
    omega = parse_region(args.omega) if args.omega else None
    res = dist_omega(g, h, omega, opts)
    out.emit("dist", f"{gid}|{hid}", res.value, error_estimate=res.error_bound, detail=res.to_dict())
    if args.inequality:
        rep = dist_inequality_check(g, h, omega, opts)
        out.emit("dist_inequality", f"{gid}|{hid}", rep.holds, error_estimate=rep.slack, detail=rep.to_dict())
    return 0


def cmd_field(args, out: Output) -> int:
    curve, cid = resolve_curve(args.curve)
    n = write_field_csv(args.csv, curve, parse_region(args.region), args.step)
    out.emit("field", cid, n, error_estimate=None, path=args.csv)
    return 0


def cmd_corpus(args, out: Output) -> int:
    import os

    for e in corpus.corpus():
        if args.dump:
            os.makedirs(args.dump, exist_ok=True)
            dump_curve(e.curve, os.path.join(args.dump, f"{e.id}.json"), e.id)
        out.emit("corpus", e.id, e.brody, error_estimate=None, N=e.curve.N, degree=e.degree, periodic=e.periodic)
    return 0


def cmd_acceptance(args, out: Output) -> int:
    from . import acceptance

    numbers = [int(x) for x in args.only.split(",")] if args.only else None
    results = acceptance.run(numbers)
    for r in results:
        out.fh.write(r.record() + "\n")
    sys.stderr.write(acceptance.table(results) + "\n")
    return 0 if all(r.passed for r in results) else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=None, help=f"worker threads (default ${THREADS_ENV} or 1)")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled grids")
    common.add_argument("--order", type=int, default=None, help="Gauss-Legendre order per tile")
    common.add_argument("--rtol", type=float, default=None, help="tile refinement tolerance")
    common.add_argument("--out", default=None, help="write JSON lines here instead of stdout")

    p = argparse.ArgumentParser(prog="brodylab", description="Numerical laboratory for Brody curves.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("constants", parents=[common], help="torus-average constant")
    s.set_defaults(func=cmd_constants)

    s = sub.add_parser("eval", parents=[common], help="point and spherical derivative")
    s.add_argument("--curve", required=True)
    s.add_argument("--z", action="append", required=True, help="RE,IM (repeatable)")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("energy", parents=[common], help="energy over a region")
    s.add_argument("--curve", required=True)
    s.add_argument("--region", default="disk:0,0,1")
    s.add_argument("--plane", action="store_true", help="total energy of a rational curve")
    s.add_argument("--cutoff", type=float, default=1e4)
    s.set_defaults(func=cmd_energy)

    s = sub.add_parser("nsa", parents=[common], help="Nevanlinna characteristic")
    s.add_argument("--curve", required=True)
    s.add_argument("--r", default=None, help="comma-separated radii")
    s.add_argument("--r-max", type=float, default=None, help="tail proxy for the NSA density")
    s.set_defaults(func=cmd_nsa)

    s = sub.add_parser("rho", parents=[common], help="energy density estimates")
    s.add_argument("--curve", required=True)
    s.add_argument("--shape", choices=["disk", "square"], default="disk")
    s.add_argument("--sizes", default=None, help="comma-separated radii or sides")
    s.add_argument("--window", default="csquare:0,0,40")
    s.add_argument("--elliptic", action="store_true", help="torus average over one period cell")
    s.add_argument("--agreement", action="store_true", help="disk vs square at matched areas (sizes are radii)")
    s.set_defaults(func=cmd_rho)

    s = sub.add_parser("nondeg", parents=[common], help="non-degeneracy profile")
    s.add_argument("--curve", required=True)
    s.add_argument("--R", type=float, required=True)
    s.add_argument("--window", action="append", required=True, help="nested windows, smallest first (repeatable)")
    s.add_argument("--threshold", type=float, default=0.05)
    s.add_argument("--table", action="store_true", help="print the trend table to stderr")
    s.set_defaults(func=cmd_nondeg)

    g = sub.add_parser("glue", help="single bump or tiled gluing")
    gsub = g.add_subparsers(dest="glue_command", required=True)
    for name in ("once", "tile"):
        s = gsub.add_parser(name, parents=[common])
        s.add_argument("--curve", required=True)
        s.add_argument("--R", type=float, required=True)
        s.add_argument("--mode", choices=["analytic", "empirical"], default="empirical")
        s.add_argument("--R0", type=float, default=None, help="empirical mode R0")
        s.add_argument("--K", type=float, default=None, help="empirical mode K")
        s.add_argument("--save", default=None, help="write the glued curve document here")
        s.add_argument("--csv-before", default=None)
        s.add_argument("--csv-after", default=None)
    s = gsub.choices["once"]
    s.add_argument("--p", required=True, help="RE,IM")
    s.add_argument("--annulus", default=None, help="R_IN,R_OUT for conditions (ii), (iii)")
    s.set_defaults(func=cmd_glue_once)
    s = gsub.choices["tile"]
    s.add_argument("--eps", type=float, required=True)
    s.add_argument("--tau", type=float, required=True)
    s.add_argument("--window", type=int, default=5, help="tiles per side (odd)")
    s.add_argument("--order-tiles", choices=["spiral", "rows", "reverse-spiral"], default="spiral")
    s.add_argument("--skip-energy", action="store_true")
    s.set_defaults(func=cmd_glue_tile)

    s = sub.add_parser("dist", parents=[common], help="compact-open distance")
    s.add_argument("--g", required=True)
    s.add_argument("--h", required=True)
    s.add_argument("--omega", default=None, help="region of translates")
    s.add_argument("--n-max", type=int, default=12)
    s.add_argument("--resolution", type=float, default=0.05)
    s.add_argument("--inequality", action="store_true")
    s.set_defaults(func=cmd_dist)

    s = sub.add_parser("field", parents=[common], help="dump |df| on a grid as CSV")
    s.add_argument("--curve", required=True)
    s.add_argument("--region", required=True)
    s.add_argument("--step", type=float, default=0.1)
    s.add_argument("--csv", required=True)
    s.set_defaults(func=cmd_field)

    s = sub.add_parser("corpus", parents=[common], help="list (and optionally dump) the curve corpus")
    s.add_argument("--dump", default=None, help="directory for curve documents")
    s.set_defaults(func=cmd_corpus)

    s = sub.add_parser("acceptance", parents=[common], help="run the acceptance criteria")
    s.add_argument("--only", default=None, help="comma-separated criterion numbers")
    s.set_defaults(func=cmd_acceptance)
    return p


def main(argv=None) -> int:
    import os

    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is not None:
        os.environ[THREADS_ENV] = str(args.threads)
    skip = {"func", "out", "threads", "seed"}
    cmd = args.command + (f" {args.glue_command}" if args.command == "glue" else "")
    config = RunConfig(
        cmd,
        {k: v for k, v in sorted(vars(args).items()) if k not in skip and k not in ("command", "glue_command")},
        args.threads,
        args.seed,
        {k: getattr(args, k) for k in ("order", "rtol") if getattr(args, k, None) is not None},
    )
    out = Output(args.out, config)
    try:
        return args.func(args, out)
    except BrodyLabError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return exc.exit_code
    finally:
        out.close()


if __name__ == "__main__":
    sys.exit(main())
