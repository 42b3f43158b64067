"""Closed-form limit measures and the exact identities used to validate them."""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, DomainError, NumericError
from .families import ultraspherical_family
from .means import RootSample
from .spectral import eval_orthonormal
from .summation import gegenbauer

__all__ = [
    "betainc_regularized",
    "EquilibriumMeasure",
    "ArcsineMeasure",
    "GegenbauerMeasure",
    "AffineImage",
    "arcsine_measure",
    "gegenbauer_equilibrium",
    "uniform_measure",
    "affine_transfer",
    "gegenbauer_normalizer",
    "sigma_closed_form",
    "addition_formula_residual",
    "legendre_addition_residual",
    "narrow_affine_density",
    "ks_distance",
    "write_curve",
]

_CF_TOL = 1e-14
_CF_MAX_ITER = 300
_TINY = 1e-300


def _betacf(a: float, b: float, x: float) -> float:
    # modified Lentz evaluation of the incomplete beta continued fraction
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    d = 1.0 / (d if abs(d) > _TINY else _TINY)
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > _TINY else _TINY)
        c = 1.0 + aa / c
        c = c if abs(c) > _TINY else _TINY
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > _TINY else _TINY)
        c = 1.0 + aa / c
        c = c if abs(c) > _TINY else _TINY
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_TOL:
            return h
    raise NumericError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def betainc_regularized(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta ``I_x(a, b)`` for ``a, b > 0``."""
    if a <= 0 or b <= 0:
        raise DomainError("betainc needs a, b > 0")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    log_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                 + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


class EquilibriumMeasure:
    """Probability measure with a density on a compact interval."""

    kind = "measure"
    support: tuple[float, float] = (-1.0, 1.0)

    def density(self, x):
        raise NotImplementedError

    def cdf(self, x):
        raise NotImplementedError

    def moment(self, l: int) -> float:
        raise NotImplementedError

    def moments(self, L: int) -> np.ndarray:
        return np.array([self.moment(l) for l in range(L + 1)])

    def __repr__(self) -> str:
        return f"{type(self).__name__}{self.describe()}"

    def describe(self) -> str:
        return ""


class ArcsineMeasure(EquilibriumMeasure):
    """``(1/pi) / sqrt(4b^2 - (x-a)^2)`` on ``[a - 2b, a + 2b]``."""

    kind = "arcsine"

    def __init__(self, a: float, b: float):
        if not b > 0:
            raise DomainError(f"arcsine measure needs b > 0, got {b!r}")
        self.a, self.b = float(a), float(b)
        self.support = (self.a - 2 * self.b, self.a + 2 * self.b)

    def describe(self) -> str:
        return f"(a={self.a!r}, b={self.b!r})"

    def density(self, x):
        x = np.asarray(x, dtype=float)
        u = x - self.a
        inside = np.abs(u) < 2 * self.b
        with np.errstate(divide="ignore", invalid="ignore"):
            val = 1.0 / (math.pi * np.sqrt(4 * self.b ** 2 - u * u))
        val = np.where(inside, val, 0.0)
        val = np.where(np.abs(u) == 2 * self.b, np.inf, val)
        return val

    def cdf(self, x):
        t = np.clip((np.asarray(x, dtype=float) - self.a) / (2 * self.b), -1.0, 1.0)
        return np.arcsin(t) / math.pi + 0.5

    def centered_moment(self, l: int) -> float:
        if l % 2:
            return 0.0
        return math.comb(l, l // 2) * self.b ** l

    def moment(self, l: int) -> float:
        return math.fsum(math.comb(l, i) * self.a ** (l - i) * self.centered_moment(i)
                         for i in range(0, l + 1, 2))


def gegenbauer_normalizer(lam: float) -> float:
    """``int_{-1}^{1} (1 - x^2)^(lam - 1/2) dx``."""
    return math.exp(math.lgamma(0.5) + math.lgamma(lam + 0.5) - math.lgamma(lam + 1.0))


class GegenbauerMeasure(EquilibriumMeasure):
    """``(1 - x^2)^((alpha-1)/2) / m`` on [-1, 1]; uniform at alpha = 1."""

    kind = "gegenbauer_density"

    def __init__(self, alpha: float):
        if not (math.isfinite(alpha) and alpha > 0):
            raise DomainError(f"gegenbauer equilibrium needs alpha > 0, got {alpha!r}")
        self.alpha = float(alpha)
        self.norm = gegenbauer_normalizer(self.alpha / 2)
        self._moments = [1.0, 0.0]

    def describe(self) -> str:
        return f"(alpha={self.alpha!r})"

    def density(self, x):
        x = np.asarray(x, dtype=float)
        inside = np.abs(x) <= 1.0
        base = np.where(inside, (1.0 - x) * (1.0 + x), 1.0)
        with np.errstate(divide="ignore"):
            val = base ** ((self.alpha - 1) / 2) / self.norm
        return np.where(inside, val, 0.0)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.alpha == 1.0:
            return np.clip((x + 1.0) / 2.0, 0.0, 1.0)
        if self.alpha == 2.0:
            y = np.clip(x, -1.0, 1.0)
            return (y * np.sqrt((1.0 - y) * (1.0 + y)) + np.arcsin(y)) / math.pi + 0.5
        p = (self.alpha + 1) / 2
        t = np.clip((x + 1.0) / 2.0, 0.0, 1.0)
        flat = np.array([betainc_regularized(p, p, float(v)) for v in t.ravel()])
        return flat.reshape(t.shape) if t.ndim else float(flat[0])

    def moment(self, l: int) -> float:
        # m_{j+2} = m_j (j+1)/(j+alpha+2)
        while len(self._moments) <= l:
            j = len(self._moments) - 2
            self._moments.append(self._moments[j] * (j + 1) / (j + self.alpha + 2))
        return self._moments[l]


class AffineImage(EquilibriumMeasure):
    """Image of a measure on [-1, 1] under ``y -> 2b y + a``."""

    kind = "affine"

    def __init__(self, src: EquilibriumMeasure, a: float, b: float):
        if not b > 0:
            raise DomainError(f"affine transfer needs b > 0, got {b!r}")
        if tuple(src.support) != (-1.0, 1.0):
            raise DomainError("affine transfer expects a source measure on [-1, 1]")
        self.src, self.a, self.b = src, float(a), float(b)
        self.support = (self.a - 2 * self.b, self.a + 2 * self.b)

    def describe(self) -> str:
        return f"({self.src!r}, a={self.a!r}, b={self.b!r})"

    def _pull(self, x):
        return (np.asarray(x, dtype=float) - self.a) / (2 * self.b)

    def density(self, x):
        return self.src.density(self._pull(x)) / (2 * self.b)

    def cdf(self, x):
        return self.src.cdf(self._pull(x))

    def moment(self, l: int) -> float:
        s = 2 * self.b
        return math.fsum(math.comb(l, i) * self.a ** (l - i) * s ** i * self.src.moment(i)
                         for i in range(l + 1))


def arcsine_measure(a: float, b: float) -> ArcsineMeasure:
    return ArcsineMeasure(a, b)


def gegenbauer_equilibrium(alpha: float) -> GegenbauerMeasure:
    return GegenbauerMeasure(alpha)


def uniform_measure() -> GegenbauerMeasure:
    return GegenbauerMeasure(1.0)


def affine_transfer(src: EquilibriumMeasure, a: float, b: float) -> AffineImage:
    return AffineImage(src, a, b)


def narrow_affine_density(x, a: float, b: float, alpha: float):
    """Variant of the affine limit density with ``b^2 - (x-a)^2`` in place of
    ``4b^2 - (x-a)^2`` and the same prefactor.

    It lives on ``[a-b, a+b]`` and is not a probability density; it exists to
    quantify that defect. Use :class:`AffineImage` for the actual limit.
    """
    x = np.asarray(x, dtype=float)
    base = b * b - (x - a) ** 2
    inv_binom = math.exp(math.lgamma(alpha / 2 + 1) + math.lgamma(alpha / 2) - math.lgamma(alpha))
    pref = inv_binom / (2 * math.pi * b ** alpha)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = pref * np.where(base > 0, base, 1.0) ** ((alpha - 1) / 2)
    return np.where(base > 0, val, 0.0)


def _inv_binom(x: float, y: float) -> float:
    """``1 / binom(x, y)`` for real ``x >= y >= 0``."""
    return math.exp(math.lgamma(y + 1) + math.lgamma(x - y + 1) - math.lgamma(x + 1))


def sigma_closed_form(kind: str, l_a: int, l_b: int, **params: float) -> float:
    """Limits ``Sigma_{l_a, l_b}`` of the weighted coefficient sums.

    ``kind`` is one of ``uniform_nevai(a, b)``, ``arithmetic``, ``legendre``,
    ``cesaro(alpha)``, ``gegenbauer(nu)``, ``affine_cesaro(a, b, alpha)``.
    All except ``uniform_nevai`` are defined for even ``l_b`` only.
    """
    if l_a < 0 or l_b < 0:
        raise DomainError("l_a and l_b must be nonnegative")
    if kind == "uniform_nevai":
        return _pow(params["a"], l_a) * _pow(params["b"], l_b)
    if l_b % 2:
        raise DomainError(f"{kind} limits are defined for even l_b only (got {l_b})")
    try:
        if kind in ("arithmetic", "legendre"):
            if l_a:
                return 0.0
            return (math.exp(math.lgamma(1.5) + math.lgamma((l_b + 2) / 2)
                             - math.lgamma((l_b + 3) / 2)) / 2.0 ** l_b)
        if kind == "cesaro":
            alpha = float(params["alpha"])
            return 0.0 if l_a else _inv_binom((alpha + l_b) / 2, alpha / 2) / 2.0 ** l_b
        if kind == "gegenbauer":
            nu = float(params["nu"])
            return 0.0 if l_a else _inv_binom(nu + l_b / 2, nu) / 2.0 ** l_b
        if kind == "affine_cesaro":
            alpha = float(params["alpha"])
            return (_pow(params["a"], l_a) * _pow(params["b"], l_b)
                    * _inv_binom((alpha + l_b) / 2, alpha / 2))
    except KeyError as exc:
        raise DomainError(f"{kind} needs parameter {exc.args[0]!r}") from exc
    raise DomainError(f"unknown Sigma kind {kind!r}")


def _pow(x: float, e: int) -> float:
    return 1.0 if e == 0 else float(x) ** e


def addition_formula_residual(lam: float, n: int, x: float) -> float:
    """``|1/m(lam) - sum_k sigma^(G,lam)_{n,k} (1-x^2)^(n-k) p_k^(n-k,lam)(x)^2|``."""
    if not lam > 0:
        raise ConfigurationError("addition formula needs lambda > 0")
    if not -1.0 <= x <= 1.0:
        raise DomainError("x must lie in [-1, 1]")
    fam = ultraspherical_family(lam)
    row = gegenbauer(lam, n_max=max(n, 1)).row(n)
    w = (1.0 - x) * (1.0 + x)
    terms = [row[k] * w ** (n - k) * eval_orthonormal(fam, n - k, k, x)[k] ** 2
             for k in range(n + 1)]
    return abs(1.0 / gegenbauer_normalizer(lam) - math.fsum(terms))


def legendre_addition_residual(n: int, x: float) -> float:
    """``|(2n+1)/2 - p_n^(0)(x)^2 - 2 sum_{k=1}^n (1-x^2)^k p_{n-k}^(k)(x)^2|`` for
    the Legendre case lambda = 1/2."""
    if not -1.0 <= x <= 1.0:
        raise DomainError("x must lie in [-1, 1]")
    fam = ultraspherical_family(0.5)
    w = (1.0 - x) * (1.0 + x)
    terms = [eval_orthonormal(fam, 0, n, x)[n] ** 2]
    terms += [2.0 * w ** k * eval_orthonormal(fam, k, n - k, x)[n - k] ** 2 for k in range(1, n + 1)]
    return abs((2 * n + 1) / 2.0 - math.fsum(terms))


def ks_distance(sample: RootSample, measure: EquilibriumMeasure) -> float:
    """Sup distance between the weighted empirical CDF and ``measure.cdf``.

    Both one-sided limits of the step function are compared at every atom.
    """
    if len(sample) == 0:
        raise DomainError("empty sample")
    s = sample.sorted()
    after = np.cumsum(s.weights)
    before = np.concatenate([[0.0], after[:-1]])
    f = np.asarray(measure.cdf(s.roots), dtype=float)
    return float(max(np.abs(after - f).max(), np.abs(before - f).max()))


def write_curve(path: str | Path, measure: EquilibriumMeasure, points: int = 1001,
                columns: Sequence[str] = ("x", "density", "cdf")) -> None:
    """Tabulate the measure on a uniform grid over its support."""
    lo, hi = measure.support
    x = np.linspace(lo, hi, points)
    cols = {"x": x, "density": measure.density(x), "cdf": measure.cdf(x)}
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(columns))
        for i in range(points):
            w.writerow([repr(float(cols[c][i])) for c in columns])
