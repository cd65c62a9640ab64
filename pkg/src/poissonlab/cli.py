"""Command-line experiment runner.

Exit codes: 0 all verdicts pass, 2 any verdict fails, 1 input error
(malformed JSON reported with line/column, missing files by path).
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import estimates, pde, report, surface
from .rearrange import WeightedSamples, direct_pairing, pairing_upper, rearrange, zygmund_norm
from .report import VerdictReport


class InputError(Exception):
    pass


def _load_json(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read input file {path!r}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path!r} at line {exc.lineno}, "
                         f"column {exc.colno}: {exc.msg}") from exc


def _load_samples(path) -> WeightedSamples:
    rows = _load_json(path)
    if not isinstance(rows, list) or not rows:
        raise InputError(f"{path!r}: expected a nonempty JSON array of rows")
    widths = {len(r) for r in rows if isinstance(r, list)}
    if widths == {2}:
        arr = np.asarray(rows, dtype=float)
        return WeightedSamples(arr[:, 0], arr[:, 1])
    if widths == {4}:
        arr = np.asarray(rows, dtype=float)
        pos = np.stack([arr[:, 1] * np.cos(arr[:, 2]), arr[:, 1] * np.sin(arr[:, 2])], axis=-1)
        return WeightedSamples(arr[:, 0], arr[:, 3], pos)
    raise InputError(f"{path!r}: rows must be (value, measure) or (value, r, theta, measure)")


def _emit(verdicts, args, series=None):
    fmt = args.format
    out = args.out
    if fmt == "json":
        if out is None:
            print(json.dumps([v.to_dict() for v in verdicts], indent=2, sort_keys=True))
        else:
            report.write_json(verdicts, out)
    elif fmt == "csv":
        if not verdicts:
            raise InputError("nothing to report")
        if out is None:
            raise InputError("csv output requires --out")
        report.write_csv(verdicts, out)
    elif fmt == "svg":
        if out is None:
            raise InputError("svg output requires --out")
        if series is None:
            x = list(range(len(verdicts)))
            y = [v.ratio for v in verdicts]
            report.write_svg(out, x, y, xlabel="verdict index", ylabel="lhs/rhs", title="verdict ratios")
        else:
            x, y, xlabel, ylabel, title = series
            report.write_svg(out, x, y, xlabel=xlabel, ylabel=ylabel, title=title)
    else:
        raise InputError(f"unknown format {fmt!r}")


def _finish(verdicts, args, series=None) -> int:
    _emit(verdicts, args, series)
    for v in verdicts:
        status = "PASS" if v.passed else "FAIL"
        print(f"{status} {v.name} lhs={v.lhs:.6g} rhs={v.rhs:.6g} "
              f"ratio={v.ratio:.6g}{' [' + v.case + ']' if v.case else ''}", file=sys.stderr)
    return 0 if all(v.passed for v in verdicts) else 2


def _radii(arg):
    return np.asarray([float(s) for s in arg.split(",")], dtype=float)


def cmd_verify_geometry(args) -> int:
    metric = surface.from_name(args.metric)
    radii = _radii(args.radii)
    verdicts = surface.geometry_bounds_verdicts(metric, args.A, args.p, radii,
                                                n_r=args.n_r, n_theta=args.n_theta)
    return _finish(verdicts, args)


def cmd_verify_norms(args) -> int:
    if args.input is not None:
        f = _load_samples(args.input)
    else:
        rng = np.random.default_rng(args.seed)
        f = WeightedSamples(rng.normal(size=200), rng.uniform(0.01, 1.0, size=200))
    prof = rearrange(f.abs())
    l1_direct = float(np.sum(np.abs(f.values) * f.measures))
    l1_star = float(np.sum(prof.values * np.diff(prof.breakpoints)))
    domain = args.domain_measure if args.domain_measure is not None else f.total_measure
    znorm = zygmund_norm(f, domain)
    verdicts = [
        VerdictReport("rearrangement_mass", l1_star, l1_direct, 1e-9),
        VerdictReport("rearrangement_mass_rev", l1_direct, l1_star, 1e-9),
        VerdictReport("hardy_littlewood_self", direct_pairing(f, f), pairing_upper(f, f), 1e-9),
        VerdictReport("zygmund_dominates_l1", l1_direct, znorm + l1_direct, 0.0),
    ]
    print(f"zygmund_norm = {znorm:.10g} (domain measure {domain:.6g})", file=sys.stderr)
    return _finish(verdicts, args)


def cmd_solve(args) -> int:
    case = estimates.ExperimentCase.from_dict(_load_json(args.case))
    sol = estimates.solve_case(case, tol=args.solver_tol)
    payload = {
        "case": case.to_dict(),
        "pole": sol.u.pole,
        "values": sol.u.values.tolist(),
        "residual": sol.report.residual_norm,
        "iterations": sol.report.iterations,
        "converged": sol.report.converged,
    }
    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.out is None:
        print(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(f"{'PASS' if sol.report.converged else 'FAIL'} solve "
          f"residual={sol.report.residual_norm:.3g} iters={sol.report.iterations}",
          file=sys.stderr)
    return 0 if sol.report.converged else 2


def cmd_interior(args) -> int:
    reports, constant, skipped = estimates.run_interior_corpus(
        args.cases, args.seed, args.n_r, args.n_theta, solver_tol=args.solver_tol)
    print(f"measured interior constant C = {constant:.6g} "
          f"({len(reports)} cases, {skipped} skipped)", file=sys.stderr)
    return _finish(reports, args)


def cmd_harnack(args) -> int:
    ks = [int(s) for s in args.ks.split(",")]
    ratios = estimates.harnack_spike_corpus(ks, n_r=args.n_r, n_theta=args.n_theta)
    med = float(np.median(ratios))
    verdicts = [VerdictReport(f"harnack_spike_k{k}", r, med * args.spread, 0.0)
                for k, r in zip(ks, ratios)]
    print(f"spike ratios: {np.array2string(ratios, precision=4)} median={med:.4g}",
          file=sys.stderr)
    return _finish(verdicts, args, series=(np.log(ks).tolist(), ratios.tolist(),
                                           "ln k", "ratio", "Harnack spike ratios"))


def cmd_global(args) -> int:
    verdicts = []
    res = estimates.global_estimate({"kind": "constant", "value": -4.0},
                                    n_r=args.n_r, n_theta=args.n_theta,
                                    run_ladder=args.ladder)
    verdicts.append(res.max_principle)
    if res.ladder is not None:
        verdicts.append(res.ladder["cauchy"])
    print(f"end-to-end ratio = {res.ratio:.6g}", file=sys.stderr)
    for i in range(args.cases):
        spec = {"kind": "random_bumps", "count": 2, "amp": (0.5, 3.0), "k": (2, 8),
                "center_r_max": 0.6, "sign": "any", "seed": args.seed * 9973 + i}
        vs, _ = estimates.global_energy_checks(spec, margin=args.headroom,
                                               n_r=args.n_r, n_theta=args.n_theta)
        verdicts.extend(VerdictReport(v.name, v.lhs, v.rhs, v.tol, f"energy-{i}") for v in vs)
    return _finish(verdicts, args)


def cmd_counterexample(args) -> int:
    ks = []
    k = args.kmin
    while k <= args.kmax:
        ks.append(k)
        k *= 2
    runs = estimates.counterexample_series(ks, n_local=args.n_local)
    slope = estimates.fit_log_slope(ks, [r.u0_raw for r in runs])
    rows = [VerdictReport(f"counterexample_k{r.k}", 0.0, r.u0_raw, 0.0,
                          f"zygmund={r.zygmund:.6g};atom={r.size_bound_minimal:.6g}")
            for r in runs]
    if args.format == "csv" and args.out is not None:
        import csv as _csv
        with open(args.out, "w", newline="") as fh:
            w = _csv.writer(fh, lineterminator="\n")
            w.writerow(["k", "u0_raw", "u0_standard", "zygmund_norm",
                        "l1_norm", "atom_size_bound", "min_radius"])
            for r in runs:
                w.writerow([r.k, f"{r.u0_raw:.10g}", f"{r.u0_standard:.10g}",
                            f"{r.zygmund:.10g}", f"{r.l1:.10g}",
                            f"{r.size_bound_minimal:.10g}", f"{r.min_radius:.10g}"])
    elif args.format == "svg" and args.out is not None:
        report.write_svg(args.out, np.log(ks).tolist(), [r.u0_raw for r in runs],
                         xlabel="ln k", ylabel="|u_k(0)|", title="potential growth")
    else:
        _emit(rows, args)
    print(f"fitted slope of |u_k(0)| vs ln k: {slope:.6g}", file=sys.stderr)
    for r in runs:
        print(f"k={r.k}: |u_k(0)|={r.u0_raw:.6g} zygmund={r.zygmund:.6g} "
              f"atom_size={r.size_bound_minimal:.6g}", file=sys.stderr)
    return 0 if slope > 0 else 2


def cmd_convergence(args) -> int:
    resolutions = [int(s) for s in args.resolutions.split(",")]
    verdicts = []
    series = None
    for kind in args.metrics.split(","):
        errors, order = estimates.manufactured_convergence(
            kind, resolutions, n_theta=args.n_theta if args.n_theta > 0 else None)
        verdicts.append(VerdictReport(f"convergence_order_{kind}", args.order_min, order, 0.0))
        verdicts.append(VerdictReport(f"convergence_order_{kind}_upper", order, args.order_max, 0.0))
        print(f"{kind}: errors {['%.3e' % e for e in errors]} order={order:.3f}",
              file=sys.stderr)
        series = (np.log(resolutions).tolist(), np.log(errors).tolist(),
                  "ln n_r", "ln error", f"convergence ({kind})")
    return _finish(verdicts, args, series=series)


def cmd_report(args) -> int:
    rows = _load_json(args.input)
    if not isinstance(rows, list):
        raise InputError(f"{args.input!r}: expected a JSON array of verdicts")
    try:
        verdicts = [VerdictReport(r["name"], r["lhs"], r["rhs"], r.get("tol", 0.0),
                                  r.get("case", "")) for r in rows]
    except (TypeError, KeyError) as exc:
        raise InputError(f"{args.input!r}: verdict rows need name/lhs/rhs fields") from exc
    if not verdicts:
        raise InputError("nothing to report")
    return _finish(verdicts, args)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="poissonlab",
                                description="Verification laboratory for Zygmund-class "
                                            "Poisson estimates on model surfaces.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, solver=False):
        sp.add_argument("--out", default=None, help="output file (default: stdout/none)")
        sp.add_argument("--format", default="json", choices=["json", "csv", "svg"])
        sp.add_argument("--seed", type=int, default=0)
        if solver:
            sp.add_argument("--solver-tol", type=float, default=1e-10)

    sp = sub.add_parser("verify-geometry", help="isoperimetric/curvature volume and length bounds")
    sp.add_argument("--metric", default="flat")
    sp.add_argument("--A", type=float, required=True)
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--radii", default="0.125,0.25,0.5,0.75,1.0")
    sp.add_argument("--n-r", type=int, default=512)
    sp.add_argument("--n-theta", type=int, default=256)
    common(sp)
    sp.set_defaults(func=cmd_verify_geometry)

    sp = sub.add_parser("verify-norms", help="rearrangement/norm self-checks on a field")
    sp.add_argument("--input", default=None,
                    help="JSON array of (value, measure) or (value, r, theta, measure)")
    sp.add_argument("--domain-measure", type=float, default=None)
    common(sp)
    sp.set_defaults(func=cmd_verify_norms)

    sp = sub.add_parser("solve", help="solve one ExperimentCase JSON")
    sp.add_argument("--case", required=True)
    common(sp, solver=True)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("interior", help="interior-estimate random corpus")
    sp.add_argument("--cases", type=int, default=100)
    sp.add_argument("--n-r", type=int, default=32)
    sp.add_argument("--n-theta", type=int, default=48)
    common(sp, solver=True)
    sp.set_defaults(func=cmd_interior)

    sp = sub.add_parser("harnack", help="Harnack spike-family corpus")
    sp.add_argument("--ks", default="8,16,32,64")
    sp.add_argument("--n-r", type=int, default=48)
    sp.add_argument("--n-theta", type=int, default=64)
    sp.add_argument("--spread", type=float, default=3.0,
                    help="each ratio must stay below spread x median")
    common(sp)
    sp.set_defaults(func=cmd_harnack)

    sp = sub.add_parser("global", help="global pipeline and energy checks")
    sp.add_argument("--cases", type=int, default=5)
    sp.add_argument("--n-r", type=int, default=48)
    sp.add_argument("--n-theta", type=int, default=64)
    sp.add_argument("--headroom", type=float, default=0.2)
    sp.add_argument("--ladder", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_global)

    sp = sub.add_parser("counterexample", help="logarithmic blow-up family")
    sp.add_argument("--kmin", type=int, default=16)
    sp.add_argument("--kmax", type=int, default=256)
    sp.add_argument("--n-local", type=int, default=384)
    common(sp)
    sp.set_defaults(func=cmd_counterexample)

    sp = sub.add_parser("convergence", help="manufactured-solution order study")
    sp.add_argument("--metrics", default="flat,sphere")
    sp.add_argument("--resolutions", default="32,64,128")
    sp.add_argument("--n-theta", type=int, default=0,
                    help="fixed angular resolution; 0 scales it with n_r")
    sp.add_argument("--order-min", type=float, default=1.7)
    sp.add_argument("--order-max", type=float, default=2.3)
    common(sp)
    sp.set_defaults(func=cmd_convergence)

    sp = sub.add_parser("report", help="re-emit a verdict JSON file")
    sp.add_argument("--input", required=True)
    common(sp)
    sp.set_defaults(func=cmd_report)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
