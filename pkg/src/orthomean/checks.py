"""Invariant suite behind ``orthomean check``."""

from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .config import RunConfig, equilibrium_for, sigma_limit_for
from .equilibrium import addition_formula_residual, legendre_addition_residual
from .errors import InternalConsistencyError, RegularityError
from .means import (equilibrium_moment_from_sigma, lambda_moments, moment_triangle,
                    mu_bar_moments, path_enumeration_moment, root_sample, simon_gap)
from .spectral import eval_orthonormal, gauss_rule, local_moments
from .summation import RieszDerived, regularity_check

__all__ = ["CheckResult", "run_checks", "format_results"]

ORACLE_RTOL = 1e-11
NORLUND_RTOL = 1e-12
ADDITION_TOL = 1e-10
CHAIN_TOL = 1e-12
ADDITION_X = (-0.9, -0.6, -0.3, 0.0, 0.2, 0.5, 0.7, 0.95, 1.0)


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str  # "pass", "fail" or "skip"
    detail: str

    @property
    def ok(self) -> bool:
        return self.status != "fail"


def _result(name: str, ok: bool, detail: str) -> CheckResult:
    return CheckResult(name, "pass" if ok else "fail", detail)


def _scale_floor(bound: float, L: int) -> np.ndarray:
    return np.maximum(bound, 1.0) ** np.arange(L + 1)


def check_regularity(cfg: RunConfig, fam, method) -> Iterator[CheckResult]:
    n_max = max(2 * cfg.n_max, 20)
    try:
        rep = regularity_check(method, n_max)
        yield _result("regularity", True,
                      f"n <= {n_max}; max column weight {rep.column_max:.3e} at n = {n_max}")
    except RegularityError as exc:
        yield _result("regularity", False, f"{exc} (n={exc.n}, k={exc.k})")
        return
    try:
        regularity_check(RieszDerived(method), n_max)
        yield _result("riesz regularity", True, f"n <= {n_max}")
    except RegularityError as exc:
        yield _result("riesz regularity", False, f"{exc} (n={exc.n}, k={exc.k})")
    N = method.normalizer_seq(n_max)
    n = np.arange(n_max + 1)
    ok = bool(np.all(N >= 1 - 1e-12) and np.all(N <= n + 1 + 1e-9 * (n + 1)))
    yield _result("normalizer range", ok, "1 <= N_n <= n + 1")


def check_norlund(cfg: RunConfig, fam, method) -> Iterator[CheckResult]:
    n_max = max(cfg.n_max, 20)
    t_err = float(np.max(np.abs(method.tau_seq(n_max) / method.tau_recomputed(n_max) - 1)))
    n_err = float(np.max(np.abs(method.normalizer_seq(n_max)
                                / method.normalizer_recomputed(n_max) - 1)))
    yield _result("norlund closed forms", max(t_err, n_err) <= NORLUND_RTOL,
                  f"rel err tau {t_err:.1e}, N {n_err:.1e}")


def check_oracles(cfg: RunConfig, fam, method) -> Iterator[CheckResult]:
    L = min(cfg.L, 10)
    worst = 0.0
    for k in range(7):
        for m in range(7):
            lm = local_moments(fam, [k], [m], L)[0]
            rule = gauss_rule(fam, k, m + L // 2 + 1)
            p2 = _orthonormal_sq(fam, k, m, rule.nodes)
            scale = _scale_floor(fam.support_bound, L)
            for l in range(L + 1):
                path = path_enumeration_moment(fam, k, m, l)
                gauss = float(np.dot(rule.weights, rule.nodes ** l * p2))
                worst = max(worst, abs(path - lm[l]) / scale[l], abs(gauss - lm[l]) / scale[l])
    yield _result("moment oracles", worst <= ORACLE_RTOL,
                  f"k, m <= 6, l <= {L}; worst rel gap {worst:.1e}")


def _orthonormal_sq(fam, k, m, x):
    return eval_orthonormal(fam, k, m, x)[m] ** 2


def check_addition(cfg: RunConfig, fam, method) -> Iterator[CheckResult]:
    lam = float(cfg.family.params.get("lambda", 0.5))
    if cfg.family.kind != "ultraspherical" or lam <= 0:
        lam = 0.5
    worst = max(addition_formula_residual(lam, n, x) for n in range(21) for x in ADDITION_X)
    yield _result("addition formula", worst < ADDITION_TOL,
                  f"lambda = {lam!r}, n <= 20; max residual {worst:.1e}")
    worst = max(legendre_addition_residual(n, x) for n in range(21) for x in ADDITION_X)
    yield _result("legendre addition formula", worst < ADDITION_TOL / 10,
                  f"n <= 20; max residual {worst:.1e}")


def check_chain(cfg: RunConfig, fam, method) -> Iterator[CheckResult]:
    eq = equilibrium_for(cfg)
    if eq is None or sigma_limit_for(cfg, 0, 0) is None:
        yield CheckResult("sigma chain", "skip", "no closed-form limit for this method")
        return

    def sigma(la, lb):
        return sigma_limit_for(cfg, la, lb)

    L = cfg.L
    gap = max((abs(equilibrium_moment_from_sigma(sigma, l) - eq.moment(l)) for l in range(L + 1)),
              default=0.0)
    yield _result("sigma chain", gap <= CHAIN_TOL, f"{eq!r}, l <= {L}; max gap {gap:.1e}")


def check_means(cfg: RunConfig, fam, method) -> Iterator[CheckResult]:
    L = cfg.L
    A, B = fam.coeff_bounds(cfg.n_max + L)
    R = A + 2 * B
    table = moment_triangle(fam, cfg.n_max, L)
    bound_ok = True
    ratio = 0.0
    mass_err = 0.0
    simon_ok = True
    routes = "agree to 1e-10"
    for n in cfg.n_list:
        mb = mu_bar_moments(fam, method, n, L).moments
        try:
            lam = lambda_moments(fam, method, n, L, table=table).moments
        except InternalConsistencyError as exc:
            routes = str(exc)
            break
        nu = root_sample(fam, method, n).moments(L)
        for m in (mb, lam, nu):
            mass_err = max(mass_err, abs(m[0] - 1.0))
            bound_ok &= bool(np.all(np.abs(m) <= R ** np.arange(L + 1) * (1 + 1e-12)))
        N = method.normalizer(n)
        for l in range(1, L + 1):
            lim = 2 * l * R ** l / N
            ratio = max(ratio, abs(nu[l] - lam[l]) / lim)
        for k in sorted({0, n // 2, n}):
            for l in range(L + 1):
                g, b = simon_gap(fam, n, k, l, bounds=(A, B))
                simon_ok &= g <= b + 1e-12
        print(f"  means checked at n = {n}", file=sys.stderr)
    yield _result("mean masses", mass_err <= 1e-10, f"max |m_0 - 1| = {mass_err:.1e}")
    yield _result("moment bounds", bound_ok, f"|m_l| <= (A + 2B)^l with A + 2B = {R!r}")
    yield _result("lambda routes", routes.startswith("agree"), routes)
    yield _result("simon bound", simon_ok, "k in {0, n/2, n}")
    yield _result("nu-lambda bound", ratio <= 1.0, f"max gap / bound = {ratio:.3e}")


CHECKS: tuple[Callable[..., Iterator[CheckResult]], ...] = (
    check_regularity, check_norlund, check_oracles, check_addition, check_chain, check_means,
)


def run_checks(cfg: RunConfig) -> list[CheckResult]:
    fam = cfg.build_family()
    method = cfg.build_method(2 * cfg.n_max)
    out: list[CheckResult] = []
    for check in CHECKS:
        print(f"running {check.__name__}", file=sys.stderr)
        results = list(check(cfg, fam, method))
        out.extend(results)
        if check is check_regularity and not all(r.ok for r in results):
            break
    return out


def format_results(results: list[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{r.name:<{width}}  {r.status.upper():<4}  {r.detail}" for r in results]
    passed = sum(r.status == "pass" for r in results)
    failed = sum(r.status == "fail" for r in results)
    lines.append(f"{passed} passed, {failed} failed, {len(results) - passed - failed} skipped")
    return "\n".join(lines)
