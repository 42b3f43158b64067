"""Doubly indexed families of orthogonality measures, given by recurrence coefficients.

A family assigns to every measure index ``k >= 0`` a measure ``mu^(k)`` whose
orthonormal polynomials satisfy

    x p_j(x) = b_{j+1} p_{j+1}(x) + a_j p_j(x) + b_j p_{j-1}(x),   p_0 = mass^(-1/2).

Coefficients with a negative index are zero, and so is ``b_0``; every
vectorised accessor in this module applies that convention.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .errors import ConfigurationError, NumericError, ValidationError

__all__ = [
    "RecurrencePair",
    "CoefficientTable",
    "CoefficientFamily",
    "UltrasphericalFamily",
    "JacobiShiftFamily",
    "ConstantFamily",
    "FamilySpec",
    "NevaiReport",
    "ultraspherical_family",
    "jacobi_shift_family",
    "constant_family",
    "stieltjes_coefficients",
    "discretize_weight",
    "uniform_nevai_report",
]


@dataclass(frozen=True)
class RecurrencePair:
    a: float
    b: float


@dataclass(frozen=True, eq=False)
class CoefficientTable:
    """Finite table of recurrence coefficients ``a_j``, ``b_j`` for ``j < len``.

    ``b[0]`` is stored as 0 by convention.
    """

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.array(self.a, dtype=float).ravel()
        b = np.array(self.b, dtype=float).ravel()
        if a.shape != b.shape:
            raise ValidationError(f"table columns differ in length: {a.size} vs {b.size}")
        if a.size == 0:
            raise ValidationError("empty coefficient table")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValidationError("coefficient table contains non-finite values")
        bad = np.flatnonzero(b[1:] <= 0.0)
        if bad.size:
            j = int(bad[0]) + 1
            raise ValidationError(f"b_{j} = {b[j]!r} must be positive")
        b[0] = 0.0
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __len__(self) -> int:
        return self.a.size

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["j", "a", "b"])
            for j, (a, b) in enumerate(zip(self.a, self.b)):
                w.writerow([j, repr(float(a)), repr(float(b))])

    @classmethod
    def from_csv(cls, path: str | Path) -> "CoefficientTable":
        try:
            with open(path, newline="", encoding="utf-8") as fh:
                rows = list(csv.DictReader(fh))
        except OSError as exc:
            raise ConfigurationError(f"cannot read coefficient table {path}: {exc}") from exc
        if not rows or set(rows[0]) != {"j", "a", "b"}:
            raise ValidationError(f"{path}: expected header j,a,b")
        rows.sort(key=lambda r: int(r["j"]))
        if [int(r["j"]) for r in rows] != list(range(len(rows))):
            raise ValidationError(f"{path}: indices must run 0..{len(rows) - 1} without gaps")
        return cls([float(r["a"]) for r in rows], [float(r["b"]) for r in rows])


class CoefficientFamily:
    """Base class. Subclasses implement ``_coefficients`` and ``mass``.

    ``_coefficients(k, j)`` receives integer arrays with ``j >= 0`` and must
    return finite arrays ``(a, b)``; the ``b`` values at ``j == 0`` are ignored.
    """

    name = "family"
    support_bound = 1.0
    k_independent = False

    def __init__(self, params: dict[str, float] | None = None):
        self.params = dict(params or {})
        self._bounds: dict[int, tuple[float, float]] = {}

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"{type(self).__name__}({args})"

    def _coefficients(self, k: np.ndarray, j: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def mass(self, k: int) -> float:
        raise NotImplementedError

    def coeffs(self, k, j) -> tuple[np.ndarray, np.ndarray]:
        """Broadcast ``k`` against ``j`` and return coefficient arrays ``(a, b)``."""
        k, j = np.broadcast_arrays(np.asarray(k, dtype=np.int64), np.asarray(j, dtype=np.int64))
        if k.size and k.min() < 0:
            raise ValueError("measure index k must be nonnegative")
        a = np.zeros(k.shape)
        b = np.zeros(k.shape)
        ok = j >= 0
        if ok.any():
            aa, bb = self._coefficients(k[ok], j[ok])
            a[ok] = aa
            b[ok] = np.where(j[ok] >= 1, bb, 0.0)
        return a, b

    def coeff(self, k: int, j: int) -> RecurrencePair:
        a, b = self.coeffs(k, j)
        return RecurrencePair(float(a), float(b))

    def table(self, k: int, size: int) -> CoefficientTable:
        a, b = self.coeffs(k, np.arange(size))
        return CoefficientTable(a, b)

    def coeff_bounds(self, n_max: int = 100, cap: int | None = None) -> tuple[float, float]:
        """Suprema ``(A, B)`` of ``|a|`` and ``b`` over ``0 <= j, k <= cap``.

        ``cap`` defaults to ``4 * n_max``.
        """
        cap = 4 * n_max if cap is None else cap
        if cap not in self._bounds:
            j = np.arange(cap + 1)
            ks = [0] if self.k_independent else range(cap + 1)
            A = B = 0.0
            chunk = max(1, 2_000_000 // (cap + 1))
            ks = np.fromiter(ks, dtype=np.int64)
            for s in range(0, ks.size, chunk):
                a, b = self.coeffs(ks[s:s + chunk, None], j[None, :])
                A = max(A, float(np.abs(a).max()))
                B = max(B, float(b.max()))
            self._bounds[cap] = (A, B)
        return self._bounds[cap]


def _log_beta(x: float, y: float) -> float:
    return math.lgamma(x) + math.lgamma(y) - math.lgamma(x + y)


class UltrasphericalFamily(CoefficientFamily):
    """Measures ``(1 - x^2)^(k + lam - 1/2) dx`` on [-1, 1]."""

    name = "ultraspherical"

    def __init__(self, lam: float):
        super().__init__({"lambda": lam})
        self.lam = float(lam)

    def _coefficients(self, k, j):
        mu = k + self.lam
        jj = np.maximum(j, 2).astype(float)
        with np.errstate(divide="ignore", invalid="ignore"):
            general = 0.5 * np.sqrt(jj * (jj + 2 * mu - 1) / ((jj + mu - 1) * (jj + mu)))
        # j = 1 in reduced form: the general expression is 0/0 at mu = 0
        first = 0.5 * np.sqrt(2.0 / (1.0 + mu))
        b = np.where(j == 1, first, general)
        return np.zeros(j.shape), b

    def mass(self, k: int) -> float:
        mu = k + self.lam
        return math.exp(_log_beta(0.5, mu + 0.5))


class JacobiShiftFamily(CoefficientFamily):
    """Measures ``(1-x^2)^k (1-x)^lam1 (1+x)^lam2 dx``: Jacobi weights with parameters
    ``(lam1 + k, lam2 + k)``."""

    name = "jacobi_shift"

    def __init__(self, lam1: float, lam2: float):
        super().__init__({"lambda1": lam1, "lambda2": lam2})
        self.lam1 = float(lam1)
        self.lam2 = float(lam2)

    def _coefficients(self, k, j):
        al = k + self.lam1
        be = k + self.lam2
        s = al + be
        jf = j.astype(float)
        jj = np.maximum(jf, 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            a_gen = (be - al) * (be + al) / ((2 * jj + s) * (2 * jj + s + 2))
            jb = np.maximum(jf, 2.0)
            b2_gen = (4 * jb * (jb + al) * (jb + be) * (jb + s)
                      / ((2 * jb + s) ** 2 * (2 * jb + s + 1) * (2 * jb + s - 1)))
        a0 = (be - al) / (s + 2)
        b2_first = 4 * (al + 1) * (be + 1) / ((s + 2) ** 2 * (s + 3))
        a = np.where(j == 0, a0, a_gen)
        b = np.sqrt(np.where(j <= 1, b2_first, b2_gen))
        return a, b

    def mass(self, k: int) -> float:
        al = k + self.lam1
        be = k + self.lam2
        return math.exp((al + be + 1) * math.log(2.0) + _log_beta(al + 1, be + 1))


class ConstantFamily(CoefficientFamily):
    """One measure, given by a finite coefficient table, repeated for every k."""

    name = "constant"
    k_independent = True

    def __init__(self, table: CoefficientTable, mass: float = 1.0,
                 support_bound: float | None = None, label: str | None = None):
        if not (math.isfinite(mass) and mass > 0):
            raise ValidationError(f"mass must be positive and finite, got {mass!r}")
        super().__init__({"mass": mass} | ({"base": label} if label else {}))
        self.coeff_table = table
        self._mass = float(mass)
        if support_bound is None:
            support_bound = float(np.abs(table.a).max() + 2 * table.b.max())
        self.support_bound = support_bound

    def _coefficients(self, k, j):
        n = len(self.coeff_table)
        if j.size and j.max() >= n:
            raise ConfigurationError(
                f"coefficient index {int(j.max())} beyond table of length {n}")
        return self.coeff_table.a[j], self.coeff_table.b[j]

    def mass(self, k: int) -> float:
        return self._mass

    def coeff_bounds(self, n_max: int = 100, cap: int | None = None) -> tuple[float, float]:
        cap = 4 * n_max if cap is None else cap
        cap = min(cap, len(self.coeff_table) - 1)
        return super().coeff_bounds(n_max, cap)


def ultraspherical_family(lam: float) -> UltrasphericalFamily:
    if not (math.isfinite(lam) and lam > -0.5):
        raise ConfigurationError(f"ultraspherical family needs lambda > -1/2, got {lam!r}")
    return UltrasphericalFamily(lam)


def jacobi_shift_family(lam1: float, lam2: float) -> JacobiShiftFamily:
    for name, v in (("lambda1", lam1), ("lambda2", lam2)):
        if not (math.isfinite(v) and v > -1):
            raise ConfigurationError(f"jacobi_shift family needs {name} > -1, got {v!r}")
    return JacobiShiftFamily(lam1, lam2)


def constant_family(coeffs: CoefficientTable, mass: float = 1.0, **kwargs) -> ConstantFamily:
    if not isinstance(coeffs, CoefficientTable):
        coeffs = CoefficientTable(*coeffs)
    return ConstantFamily(coeffs, mass, **kwargs)


# -- independent oracle: discretised Stieltjes procedure ---------------------------

def discretize_weight(weight: Callable[[np.ndarray], np.ndarray], support: tuple[float, float],
                      nodes: int = 2000) -> tuple[np.ndarray, np.ndarray]:
    """Discrete measure approximating ``weight(x) dx`` on ``support``.

    Uses ``x = c + h cos(theta)`` and Gauss-Legendre in ``theta``; the
    substitution absorbs inverse square-root endpoint singularities.
    """
    lo, hi = map(float, support)
    if not (math.isfinite(lo) and math.isfinite(hi) and hi > lo):
        raise NumericError(f"degenerate support {support!r}")
    t, wt = np.polynomial.legendre.leggauss(nodes)
    theta = 0.5 * math.pi * (t + 1.0)
    c, h = 0.5 * (hi + lo), 0.5 * (hi - lo)
    x = c + h * np.cos(theta)
    w = np.asarray(weight(x), dtype=float) * h * np.sin(theta) * wt * 0.5 * math.pi
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise NumericError("weight is negative or not finite on the support")
    if w.sum() <= 0:
        raise NumericError("weight has zero mass on the support")
    return x[::-1].copy(), w[::-1].copy()


def stieltjes_coefficients(weight: Callable[[np.ndarray], np.ndarray], support: tuple[float, float],
                           count: int, nodes: int | None = None) -> CoefficientTable:
    """Recurrence coefficients ``a_j, b_j`` (``j < count``) of the orthonormal
    polynomials for ``weight`` by the discretised Stieltjes procedure."""
    if count < 1:
        raise ConfigurationError("count must be >= 1")
    x, w = discretize_weight(weight, support, nodes or max(2000, 20 * count))
    a = np.zeros(count)
    b = np.zeros(count)
    p_prev = np.zeros_like(x)
    p = np.full_like(x, 1.0 / math.sqrt(w.sum()))
    for j in range(count):
        a[j] = np.dot(w, x * p * p)
        if j + 1 == count:
            break
        q = (x - a[j]) * p - b[j] * p_prev
        b[j + 1] = math.sqrt(np.dot(w, q * q))
        if not b[j + 1] > 0:
            raise NumericError("discrete measure exhausted before reaching count", index=j + 1)
        p_prev, p = p, q / b[j + 1]
    return CoefficientTable(a, b)


# -- uniform Nevai class diagnostic ------------------------------------------------

@dataclass
class NevaiReport:
    a: float
    b: float
    k_max: int
    onset: int
    rows: list[tuple[int, float, float]] = field(default_factory=list)
    monotone: bool = False

    def sup_a(self) -> np.ndarray:
        return np.array([r[1] for r in self.rows])

    def sup_b(self) -> np.ndarray:
        return np.array([r[2] for r in self.rows])


def uniform_nevai_report(family: CoefficientFamily, a: float, b: float, n_max: int,
                         k_max: int, onset: int | None = None, tol: float = 1e-15) -> NevaiReport:
    """``sup_{k <= k_max} |a_n^(k) - a|`` and ``|b_n^(k) - b|`` for ``1 <= n <= n_max``.

    ``monotone`` is set when both columns are non-increasing (up to ``tol``)
    from ``onset`` on; the default onset is ``n_max // 4``.
    """
    if n_max < 1 or k_max < 0:
        raise ConfigurationError("n_max must be >= 1 and k_max >= 0")
    onset = max(1, n_max // 4) if onset is None else onset
    n = np.arange(1, n_max + 1)
    ks = np.array([0]) if family.k_independent else np.arange(k_max + 1)
    aa, bb = family.coeffs(ks[:, None], n[None, :])
    sa = np.abs(aa - a).max(axis=0)
    sb = np.abs(bb - b).max(axis=0)
    tail = n >= onset
    mono = bool(np.all(np.diff(sa[tail]) <= tol) and np.all(np.diff(sb[tail]) <= tol))
    rows = [(int(i), float(x), float(y)) for i, x, y in zip(n, sa, sb)]
    return NevaiReport(a=a, b=b, k_max=k_max, onset=onset, rows=rows, monotone=mono)


# -- configuration surface ----------------------------------------------------------

_FAMILY_KINDS = ("ultraspherical", "jacobi_shift", "constant", "table")


@dataclass(frozen=True)
class FamilySpec:
    """Serializable description of a family: ``{"kind": ..., "params": {...}}``.

    ``constant`` replicates the k = 0 measure of ``ultraspherical(lambda)``
    (Legendre for the default lambda = 1/2); ``table`` reads a ``j,a,b`` CSV.
    """

    kind: str
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in _FAMILY_KINDS:
            raise ConfigurationError(
                f"unknown family kind {self.kind!r}; expected one of {', '.join(_FAMILY_KINDS)}")
        self.validate()

    def validate(self) -> None:
        p = self.params
        try:
            if self.kind in ("ultraspherical", "constant"):
                lam = float(p.get("lambda", 0.5))
                if not (math.isfinite(lam) and lam > -0.5):
                    raise ConfigurationError(f"lambda must be > -1/2, got {lam!r}")
            elif self.kind == "jacobi_shift":
                for key in ("lambda1", "lambda2"):
                    v = float(p.get(key, 0.0))
                    if not (math.isfinite(v) and v > -1):
                        raise ConfigurationError(f"{key} must be > -1, got {v!r}")
            elif "path" not in p:
                raise ConfigurationError("table family needs params.path")
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigurationError):
                raise
            raise ConfigurationError(f"bad family parameter: {exc}") from exc

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "params": dict(self.params)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "FamilySpec":
        if not isinstance(d, dict) or "kind" not in d:
            raise ConfigurationError("family spec must be an object with a 'kind' field")
        return cls(str(d["kind"]), dict(d.get("params") or {}))

    @classmethod
    def from_json(cls, text: str) -> "FamilySpec":
        return cls.from_dict(json.loads(text))

    def build(self, size: int = 512) -> CoefficientFamily:
        """Construct the family; ``size`` is the table length for ``constant``."""
        p = self.params
        if self.kind == "ultraspherical":
            return ultraspherical_family(float(p.get("lambda", 0.5)))
        if self.kind == "jacobi_shift":
            return jacobi_shift_family(float(p.get("lambda1", 0.0)), float(p.get("lambda2", 0.0)))
        if self.kind == "constant":
            base = ultraspherical_family(float(p.get("lambda", 0.5)))
            return constant_family(base.table(0, size), base.mass(0), support_bound=1.0,
                                   label=f"ultraspherical(lambda={base.lam!r}), k=0")
        table = CoefficientTable.from_csv(p["path"])
        return constant_family(table, float(p.get("mass", 1.0)))

    def limits(self) -> tuple[float, float] | None:
        """Coefficient limits ``(a, b)`` for k-independent families, else None."""
        if self.kind == "constant":
            return 0.0, 0.5
        if self.kind == "table":
            if "a_limit" in self.params and "b_limit" in self.params:
                return float(self.params["a_limit"]), float(self.params["b_limit"])
            t = CoefficientTable.from_csv(self.params["path"])
            return float(t.a[-1]), float(t.b[-1])
        return None
