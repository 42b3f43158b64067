"""``orthomean`` command line: moment tables, root histograms, Sigma tables, checks.

Exit codes: 0 success, 1 check failure, 2 configuration error, 3 numeric error.
Data goes to files and standard output; progress goes to standard error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from .checks import format_results, run_checks
from .config import RunConfig, equilibrium_for, load_config, sigma_limit_for
from .equilibrium import EquilibriumMeasure, ks_distance
from .errors import OrthomeanError, RegularityError
from .means import lambda_moments, moment_triangle, mu_bar_moments, root_sample, sigma_partial

__all__ = ["main", "build_parser", "cmd_moments", "cmd_roots_hist", "cmd_sigma_table", "cmd_check"]


def _fmt(x) -> str:
    return "" if x is None else repr(float(x))


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.output)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    return out


def _progress(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


def cmd_moments(cfg: RunConfig) -> list[Path]:
    """Write ``moments_<kind>_<n>.csv`` for kind in mu_bar, lambda, nu."""
    out = _outdir(cfg)
    fam, method = cfg.build_family(), cfg.build_method()
    eq = equilibrium_for(cfg)
    L = cfg.L
    ref = eq.moments(L) if eq is not None else [None] * (L + 1)
    table = moment_triangle(fam, cfg.n_max, L)
    written = []
    for n in cfg.n_list:
        _progress(f"moments: n = {n}")
        series = {
            "mu_bar": mu_bar_moments(fam, method, n, L).moments,
            "lambda": lambda_moments(fam, method, n, L, table=table).moments,
            "nu": root_sample(fam, method, n).moments(L),
        }
        for kind, vals in series.items():
            rows = []
            for l in range(L + 1):
                gap = None if ref[l] is None else abs(vals[l] - ref[l])
                rows.append([l, _fmt(vals[l]), _fmt(ref[l]), _fmt(gap)])
            path = out / f"moments_{kind}_{n}.csv"
            _write_csv(path, ("l", "value", "equilibrium", "abs_gap"), rows)
            written.append(path)
    return written


def _hist_edges(eq: EquilibriumMeasure | None, roots: np.ndarray, bins: int, bound: float):
    lo, hi = eq.support if eq is not None else (-bound, bound)
    lo = min(lo, float(roots.min()))
    hi = max(hi, float(roots.max()))
    return np.linspace(lo, hi, bins + 1)


def cmd_roots_hist(cfg: RunConfig) -> dict[int, float | None]:
    """Write ``hist_<n>.csv``, ``roots_<n>.csv`` and ``equilibrium.csv``; print KS distances."""
    out = _outdir(cfg)
    fam, method = cfg.build_family(), cfg.build_method()
    eq = equilibrium_for(cfg)
    ks: dict[int, float | None] = {}
    for n in cfg.n_list:
        _progress(f"roots: n = {n}")
        sample = root_sample(fam, method, n)
        sample.to_csv(out / f"roots_{n}.csv")
        edges = _hist_edges(eq, sample.roots, cfg.bins, float(fam.support_bound))
        mass, _ = np.histogram(sample.roots, bins=edges, weights=sample.weights)
        _write_csv(out / f"hist_{n}.csv", ("bin_left", "bin_right", "weighted_mass"),
                   [[_fmt(edges[i]), _fmt(edges[i + 1]), _fmt(mass[i])] for i in range(cfg.bins)])
        ks[n] = None if eq is None else ks_distance(sample, eq)
        print(f"n={n} ks={'n/a' if ks[n] is None else format(ks[n], '.6e')}")
    if eq is not None:
        x = np.linspace(*eq.support, 1001)
        _write_csv(out / "equilibrium.csv", ("x", "density"),
                   [[_fmt(a), _fmt(d)] for a, d in zip(x, eq.density(x))])
    return ks


def cmd_sigma_table(cfg: RunConfig) -> Path:
    """Write ``sigma.csv``: partial sums against closed-form limits, even ``l_b``."""
    out = _outdir(cfg)
    fam, method = cfg.build_family(), cfg.build_method()
    rows = []
    for n in cfg.n_list:
        _progress(f"sigma: n = {n}")
        for l_b in range(0, cfg.L + 1, 2):
            for l_a in range(cfg.L - l_b + 1):
                part = sigma_partial(fam, method, n, l_a, l_b)
                closed = sigma_limit_for(cfg, l_a, l_b)
                gap = None if closed is None else abs(part - closed)
                rows.append([n, l_a, l_b, _fmt(part), _fmt(closed), _fmt(gap)])
    path = out / "sigma.csv"
    _write_csv(path, ("n", "l_a", "l_b", "partial", "closed_form", "abs_gap"), rows)
    return path


def cmd_check(cfg: RunConfig) -> int:
    results = run_checks(cfg)
    print(format_results(results))
    return 0 if all(r.ok for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("configuration")
    g.add_argument("--config", help="JSON run configuration; flags override its fields")
    g.add_argument("--family", choices=("ultraspherical", "jacobi_shift", "constant", "table"))
    g.add_argument("--lambda", dest="lam", type=float, help="ultraspherical / constant parameter")
    g.add_argument("--lambda1", type=float)
    g.add_argument("--lambda2", type=float)
    g.add_argument("--table", help="j,a,b coefficient CSV for --family table")
    g.add_argument("--mass", type=float, help="total mass for --family table")
    g.add_argument("--method",
                   choices=("cesaro", "gegenbauer", "legendre", "arithmetic", "identity", "custom"))
    g.add_argument("--alpha", type=float)
    g.add_argument("--nu", type=float)
    g.add_argument("--sigma-file", help="k,sigma CSV for --method custom")
    g.add_argument("--n", dest="n_list", type=int, nargs="+", metavar="N")
    g.add_argument("--L", type=int)
    g.add_argument("--bins", type=int)
    g.add_argument("--out", dest="output")

    p = argparse.ArgumentParser(prog="orthomean",
                                description="Mean measures of orthogonal polynomial families.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("moments", parents=[common], help="moment tables of the mean measures")
    sub.add_parser("roots-hist", parents=[common], help="weighted root histograms and KS distances")
    sub.add_parser("sigma-table", parents=[common], help="coefficient sums against their limits")
    sub.add_parser("check", parents=[common], help="run the invariant suite")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return load_config(args.config, family=args.family, **{"lambda": args.lam},
                       lambda1=args.lambda1, lambda2=args.lambda2, table=args.table,
                       mass=args.mass, method=args.method, alpha=args.alpha, nu=args.nu,
                       sigma_file=args.sigma_file, n_list=args.n_list, L=args.L,
                       bins=args.bins, output=args.output)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        if args.command == "moments":
            cmd_moments(cfg)
        elif args.command == "roots-hist":
            cmd_roots_hist(cfg)
        elif args.command == "sigma-table":
            cmd_sigma_table(cfg)
        else:
            return cmd_check(cfg)
    except RegularityError as exc:
        print(f"regularity failure at n={exc.n}, k={exc.k}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OrthomeanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
