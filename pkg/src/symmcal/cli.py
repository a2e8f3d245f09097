"""Command-line front door.

Exit codes: 0 all checks pass, 1 any check fails, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import manifold as mf
from . import pde
from . import perimeter as per
from .grid import load_field, load_mask, save_field, save_mask
from .rearrange import rearrange_field, rearrange_mask
from .report import KNOWN_SUITES, SuiteConfig, VerificationReport, emit_csv
from .suites import run_suite

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


def _parse_delta(text: str, h: float) -> float:
    """Accept absolute lengths ('0.02') or cell multiples ('4h')."""
    text = text.strip()
    if text.endswith("h"):
        return float(text[:-1]) * h
    return float(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="symmcal",
        description="Symmetric decreasing rearrangement laboratory: "
        "rearrangements, perimeters, PDE comparisons and verification suites.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("rearrange", help="symmetric decreasing rearrangement of a field")
    r.add_argument("--in", dest="infile", required=True)
    r.add_argument("--out", dest="outfile", required=True)
    r.add_argument("--mask", action="store_true", help="treat the input as a region mask")

    q = sub.add_parser("perimeter", help="perimeter estimate of a mask")
    q.add_argument("--in", dest="infile", required=True)
    q.add_argument(
        "--method",
        default="minkowski",
        choices=["minkowski", "convolution", "smoothed_gradient", "face_count"],
    )
    q.add_argument("--delta", default="6h", help="radius/width: absolute or 'Nh'")

    s = sub.add_parser("poisson", help="solve -lap u = f with Dirichlet data")
    s.add_argument("--f", dest="source", required=True)
    s.add_argument("--omega", required=True)
    s.add_argument("--out", dest="outfile", required=True)

    e = sub.add_parser("eigen", help="smallest Dirichlet eigenvalue of a domain")
    e.add_argument("--omega", required=True)

    m = sub.add_parser("manifold", help="weighted radial manifold operations")
    msub = m.add_subparsers(dest="mcommand", required=True)
    mr = msub.add_parser("rearrange", help="rearrange a radial profile on a weighted grid")
    mr.add_argument("--grid", required=True)
    mr.add_argument("--in", dest="infile", required=True, help="JSON list of per-cell values")
    mr.add_argument("--out", dest="outfile", required=True)
    mv = msub.add_parser("verify", help="run the manifold suite")
    _add_suite_flags(mv, suite_fixed="manifold")

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", required=True, choices=KNOWN_SUITES)
    _add_suite_flags(v)
    return p


def _add_suite_flags(sp, suite_fixed=None):
    sp.add_argument("--n", dest="dim", type=int, default=2, choices=[1, 2, 3])
    sp.add_argument("--size", type=int, default=64)
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--seed", type=int, default=7)
    sp.add_argument("--tol-scale", dest="tol_scale", type=float, default=1.0)
    sp.add_argument("--out", default=None)
    sp.add_argument("--format", dest="fmt", default="json", choices=["json", "csv"])
    sp.set_defaults(suite_fixed=suite_fixed)


def _cmd_rearrange(args) -> int:
    if args.mask:
        save_mask(rearrange_mask(load_mask(args.infile)), args.outfile)
    else:
        save_field(rearrange_field(load_field(args.infile)), args.outfile)
    return EXIT_OK


def _cmd_perimeter(args) -> int:
    mask = load_mask(args.infile)
    h = max(mask.grid.spacing)
    if args.method == "minkowski":
        est = per.perimeter_minkowski(mask, _parse_delta(args.delta, h))
    elif args.method == "convolution":
        est = per.perimeter_convolution(mask, _parse_delta(args.delta, h))
    elif args.method == "smoothed_gradient":
        est = per.perimeter_smoothed_gradient(mask, _parse_delta(args.delta, h))
    else:
        est = per.perimeter_face_count(mask)
    print(json.dumps({"method": est.method, "value": est.value, "parameter": est.parameter}))
    return EXIT_OK


def _cmd_poisson(args) -> int:
    f = load_field(args.source)
    omega = load_mask(args.omega)
    sol = pde.solve_poisson(f, omega)
    save_field(sol.u, args.outfile)
    print(
        json.dumps(
            {"residual_norm": sol.residual_norm, "iterations": sol.iterations}
        )
    )
    return EXIT_OK


def _cmd_eigen(args) -> int:
    omega = load_mask(args.omega)
    res = pde.smallest_dirichlet_eigenvalue(omega)
    print(json.dumps({"lambda1": res.lambda1, "residual": res.residual}))
    return EXIT_OK


def _cmd_manifold(args) -> int:
    if args.mcommand == "rearrange":
        with open(args.grid, encoding="utf-8") as fh:
            g = mf.grid_from_dict(json.load(fh))
        with open(args.infile, encoding="utf-8") as fh:
            vals = np.asarray(json.load(fh), float)
        out = mf.rearrange_field(mf.ManifoldField(g, vals))
        with open(args.outfile, "w", encoding="utf-8") as fh:
            json.dump(out.values.tolist(), fh)
        return EXIT_OK
    return _run_verify(args, suite="manifold")


def _run_verify(args, suite=None) -> int:
    cfg = SuiteConfig(
        suite=suite or args.suite,
        dim=args.dim,
        size=args.size,
        trials=args.trials,
        seed=args.seed,
        tol_scale=args.tol_scale,
        threads=int(os.environ.get("SYMMCAL_THREADS", "1")),
        out=args.out,
        fmt=args.fmt,
    )
    report = run_suite(cfg)
    if args.out:
        if args.fmt == "csv":
            emit_csv(report, args.out)
        else:
            report.save(args.out)
    summary = report.to_dict()["summary"]
    print(
        f"suite={cfg.suite} checks={summary['total']} pass={summary['pass']} "
        f"fail={summary['fail']} wall={report.wall_time:.1f}s"
    )
    for c in report.failures()[:20]:
        print(f"  FAIL {c.name}: lhs={c.lhs:.6g} rhs={c.rhs:.6g} slack={c.slack:.3g} tol={c.tol:.3g}")
    return EXIT_OK if report.all_passed() else EXIT_CHECK_FAILED


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "rearrange":
            return _cmd_rearrange(args)
        if args.command == "perimeter":
            return _cmd_perimeter(args)
        if args.command == "poisson":
            return _cmd_poisson(args)
        if args.command == "eigen":
            return _cmd_eigen(args)
        if args.command == "manifold":
            return _cmd_manifold(args)
        if args.command == "verify":
            return _run_verify(args)
        parser.error(f"unknown command {args.command!r}")
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"symmcal: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
