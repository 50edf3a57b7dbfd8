"""Command-line interface.

Subcommands
-----------
moments   tabulate even moments of the weight
verify    max residuals of the ladder/difference identities, with pass/fail
sigma     sigma_n and its derivatives on an a-grid, plus the sigma-ODE residual
scale     double-scaling study: extrapolated limits and residual trends
mc        Monte Carlo gap estimate vs the determinant route

All numbers are written as decimal strings with ceil(prec * log10(2)) + 2
significant digits, so re-parsing them at the stated precision reproduces the
binary values exactly.  Outputs are byte-identical across reruns of the same
configuration when --no-timestamp is given.

Exit codes: 0 success, 2 usage or invalid parameters, 3 precision exhausted,
4 an identity residual exceeded the threshold.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import __version__, hp, mc, moments, painleve, scaling
from .errors import PrecisionExhausted
from .hp import HPReal
from .ladder import (build_aux, check_difference_relations, check_lowering,
                     check_ode_P, check_raising, check_supplementary,
                     p_from_aux)
from .moments import WeightParams, build_table
from .ortho import build_recurrence

ENV_PREC = "GUEGAP_PREC"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PRECISION = 3
EXIT_THRESHOLD = 4


def _default_prec() -> int:
    return int(os.environ.get(ENV_PREC, moments.DEFAULT_PREC))


def _add_common(sp, weight=True):
    if weight:
        sp.add_argument("--A", default="1", help="weight coefficient A (decimal string)")
        sp.add_argument("--B", default="0", help="weight coefficient B (decimal string)")
    sp.add_argument("--prec", type=int, default=_default_prec(),
                    help=f"working precision in bits (default from ${ENV_PREC} or "
                         f"{moments.DEFAULT_PREC})")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--out", default="-", help="output path, - for stdout")
    sp.add_argument("--no-timestamp", action="store_true",
                    help="omit the timestamp for byte-identical reruns")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="guegap", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("moments", help="tabulate even moments")
    _add_common(p)
    p.add_argument("--a", required=True, help="jump location (decimal string)")
    p.add_argument("--order", type=int, required=True, help="largest m for mu_{2m}")
    p.set_defaults(fn=cmd_moments)

    p = sub.add_parser("verify", help="identity residual report")
    _add_common(p)
    p.add_argument("--a", required=True)
    p.add_argument("--n-max", type=int, default=20)
    p.add_argument("--threshold", type=float, default=1e-40,
                   help="max allowed residual (identity failures exit 4)")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("sigma", help="sigma_n on an a-grid")
    _add_common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--grid", required=True, metavar="MIN:MAX:STEP",
                   help="uniform a-grid, e.g. 0.3:0.7:1e-4")
    p.add_argument("--workers", type=int, default=1,
                   help="process count for the grid sweep")
    p.set_defaults(fn=cmd_sigma)

    p = sub.add_parser("scale", help="double-scaling study")
    _add_common(p)
    p.add_argument("--tau", required=True, help="comma-separated tau values")
    p.add_argument("--n-list", default="64,128,256",
                   help="doubling ladder of matrix sizes")
    p.add_argument("--h-tau", default="1e-3")
    p.add_argument("--prec-base", type=int, default=scaling.DEFAULT_PREC_BASE)
    p.add_argument("--prec-per-n", type=int, default=scaling.DEFAULT_PREC_PER_N)
    p.set_defaults(fn=cmd_scale)

    p = sub.add_parser("mc", help="Monte Carlo gap estimate vs determinant")
    _add_common(p, weight=False)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--case", choices=[c.value for c in mc.GapCase], required=True)
    p.add_argument("--trials", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(fn=cmd_mc)
    return ap


# -- output -------------------------------------------------------------------


def _meta(args, **extra) -> dict:
    meta = {"tool": "guegap", "version": __version__, "command": args.command,
            "prec": args.prec}
    for key in ("A", "B", "a"):
        if hasattr(args, key):
            meta[key] = getattr(args, key)
    meta.update(extra)
    if not args.no_timestamp:
        meta["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    return meta


def _dec(x, prec) -> str:
    if isinstance(x, HPReal):
        return hp.to_decimal(x)
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _emit(args, meta: dict, columns: list[str], rows: list[list]) -> None:
    prec = args.prec
    text_rows = [[_dec(v, prec) for v in row] for row in rows]
    if args.format == "json":
        payload = json.dumps({"meta": meta, "columns": columns, "rows": text_rows},
                             indent=2)
    else:
        lines = [f"# {k} = {v}" for k, v in meta.items()]
        lines.append(",".join(columns))
        lines.extend(",".join(row) for row in text_rows)
        payload = "\n".join(lines) + "\n"
    if args.out == "-":
        sys.stdout.write(payload)
        if args.format == "json":
            sys.stdout.write("\n")
    else:
        with open(args.out, "w") as fh:
            fh.write(payload)
            if args.format == "json":
                fh.write("\n")


# -- subcommands --------------------------------------------------------------


def cmd_moments(args) -> int:
    params = WeightParams(A=args.A, B=args.B, a=args.a, prec=args.prec)
    if args.order < 0:
        raise ValueError("--order must be nonnegative")
    rows = [[m, moments.moment(2 * m, params)] for m in range(args.order + 1)]
    _emit(args, _meta(args, order=args.order), ["m", "mu_2m"], rows)
    return EXIT_OK


def _z_sample(a: float) -> list[float]:
    scale = max(a, 0.5)
    out = []
    for q in (0.31, 0.73, 1.62, 2.48, 3.55):
        z = q * scale
        while abs(z - a) < 1e-3 or abs(z + a) < 1e-3:
            z *= 1.003
        out.append(z)
    return out


def cmd_verify(args) -> int:
    params = WeightParams(A=args.A, B=args.B, a=args.a, prec=args.prec)
    n_max = args.n_max
    if n_max < 3:
        raise ValueError("--n-max must be at least 3")
    worst: dict[str, float] = {}

    def record(name, value):
        v = float(value)
        if name not in worst or v > worst[name]:
            worst[name] = v

    try:
        table = build_recurrence(build_table(params, n_max), n_max)
        aux = build_aux(table)
        zs = [HPReal(z, args.prec) for z in _z_sample(float(params.a))]
        for n in range(1, n_max):
            for z in zs:
                record("lowering", check_lowering(table, aux, n, z))
                record("raising", check_raising(table, aux, n, z))
                s1, s2, s2p = check_supplementary(aux, table, n, z)
                record("S1", s1)
                record("S2", s2)
                record("S2'", s2p)
                if 2 <= n <= n_max - 1:
                    record("ode_P", check_ode_P(table, aux, n, z))
            d, c, b, a_ = check_difference_relations(aux, table, n)
            record("diff_d", d)
            record("diff_c", c)
            record("diff_b", b)
            record("diff_a", a_)
            if aux.R[n] != 0:
                p_alt = p_from_aux(aux, table, n)
                denom = abs(table.p_coeff[n]) + 1
                record("p_subleading", abs(p_alt - table.p_coeff[n]) / denom)
    except PrecisionExhausted as exc:
        meta = _meta(args, n_max=n_max, error="PrecisionExhausted",
                     error_n=exc.n, error_prec=exc.prec)
        _emit(args, meta, ["identity", "max_residual", "pass"], [])
        return EXIT_PRECISION

    rows = [[name, worst[name], worst[name] <= args.threshold]
            for name in sorted(worst)]
    ok = all(worst[name] <= args.threshold for name in worst)
    meta = _meta(args, n_max=n_max, threshold=args.threshold,
                 result="pass" if ok else "fail")
    _emit(args, meta, ["identity", "max_residual", "pass"], rows)
    return EXIT_OK if ok else EXIT_THRESHOLD


def cmd_sigma(args) -> int:
    lo, hi, step = args.grid.split(":")
    grid = painleve.AGrid.from_range(lo, hi, step, args.prec)
    data = painleve.build_grid(args.A, args.B, grid, args.n, args.prec,
                               workers=args.workers)
    series = painleve.sigma_series(data, args.n)
    resid = painleve.sigma_ode_residual(series)
    rows = [[a, series.sigma[i], series.sigma1[i], series.sigma2[i], resid[i]]
            for i, a in enumerate(grid.values)]
    meta = _meta(args, n=args.n, grid=args.grid,
                 sigma1_route=series.route_tags["sigma1"])
    _emit(args, meta, ["a", "sigma", "sigma_prime", "sigma_second", "ode_residual"],
          rows)
    return EXIT_OK


def cmd_scale(args) -> int:
    taus = [t.strip() for t in args.tau.split(",")]
    n_list = [int(t) for t in args.n_list.split(",")]
    profile = scaling.build_profile(
        args.A, args.B, taus, n_list, h_tau=args.h_tau,
        prec_base=args.prec_base, prec_per_n=args.prec_per_n)
    rows = []
    for tau in taus:
        gaps = scaling.cauchy_gaps(profile, tau)
        for levels in range(1, len(n_list) + 1):
            sig, err, order = scaling.extrapolate(
                [row[profile.center_index(tau)] for row in profile.sigma_vals],
                levels)
            pv = scaling.pv_residual(profile, tau, levels)
            res_R, res_r = scaling.limit_ode_residuals(profile, tau, levels)
            rows.append([tau, levels, n_list[levels - 1], sig, err,
                         order if order is not None else "", pv, res_R, res_r,
                         gaps[levels - 2] if levels >= 2 else ""])
    meta = _meta(args, tau=args.tau, n_list=args.n_list, h_tau=args.h_tau,
                 prec_base=args.prec_base, prec_per_n=args.prec_per_n)
    _emit(args, meta,
          ["tau", "levels", "n_max", "sigma_limit", "err_est", "order",
           "pv_residual", "R_ode_residual", "r_ode_residual", "cauchy_gap"],
          rows)
    return EXIT_OK


def cmd_mc(args) -> int:
    out = mc.compare(args.n, args.a, args.case, args.trials, args.seed,
                     workers=args.workers, prec=args.prec)
    est = out["estimate"]
    rows = [[args.n, args.a, args.case, args.trials, args.seed, est.workers,
             est.p_hat, est.std_err, out["determinant"], out["z_score"]]]
    _emit(args, _meta(args), ["n", "a", "case", "trials", "seed", "workers",
                              "p_hat", "std_err", "determinant", "z_score"], rows)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ValueError as exc:
        print(f"guegap: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PrecisionExhausted as exc:
        print(f"guegap: precision exhausted: {exc}", file=sys.stderr)
        return EXIT_PRECISION


if __name__ == "__main__":
    sys.exit(main())
