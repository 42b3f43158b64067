"""Triangular summation schemes ``S_n(y) = sum_k sigma_{n,k} y_k``.

Norlund methods factor as ``sigma_{n,k} = tau_n sigma_{n-k}``. They come with
the normaliser ``N_n = tau_n sum_{k<=n} 1/tau_k`` and a derived Riesz method
with weights ``tau_n / (N_n tau_k)``.
"""

from __future__ import annotations

import csv
import math
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .errors import ConfigurationError, RegularityError, ValidationError

__all__ = [
    "SummationMethod",
    "TriangularMethod",
    "NorlundMethod",
    "RieszDerived",
    "RegularityReport",
    "regularity_check",
    "norlund_from_sigma",
    "riesz_derived",
    "cesaro",
    "arithmetic_mean",
    "legendre_method",
    "gegenbauer",
    "identity_method",
    "read_sigma_csv",
    "method_from_spec",
]

ROW_SUM_TOL = 1e-12


class SummationMethod:
    name = "method"
    params: dict[str, Any] = {}

    def row(self, n: int) -> np.ndarray:
        """Weights ``sigma_{n,0..n}``."""
        raise NotImplementedError

    def weight(self, n: int, k: int) -> float:
        if not 0 <= k <= n:
            raise IndexError(f"need 0 <= k <= n, got n={n}, k={k}")
        return float(self.row(n)[k])

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"{self.name}({args})"


class TriangularMethod(SummationMethod):
    """A scheme given directly by its weight function ``(n, k) -> sigma_{n,k}``."""

    def __init__(self, name: str, weight: Callable[[int, int], float]):
        self.name = name
        self.params = {}
        self._weight = weight

    def row(self, n: int) -> np.ndarray:
        return np.array([self._weight(n, k) for k in range(n + 1)], dtype=float)


class NorlundMethod(SummationMethod):
    """Norlund method from a sequence ``sigma_k``, normalised to ``sigma_0 = 1``.

    ``sigma`` maps an integer count ``n`` to the array ``sigma_0..sigma_{n-1}``.
    Optional closed forms for ``tau_n`` and ``N_n`` take precedence over the
    prefix-sum recomputation, which stays available as ``tau_recomputed`` and
    ``normalizer_recomputed``.
    """

    def __init__(self, name: str, sigma: Callable[[int], np.ndarray],
                 tau_closed: Callable[[np.ndarray], np.ndarray] | None = None,
                 normalizer_closed: Callable[[np.ndarray], np.ndarray] | None = None,
                 params: dict[str, Any] | None = None, n_max: int = 256):
        self.name = name
        self.params = dict(params or {})
        self._sigma_fn = sigma
        self._tau_closed = tau_closed
        self._norm_closed = normalizer_closed
        self._lock = threading.Lock()
        self._cap = -1
        s0 = float(np.asarray(sigma(1), dtype=float)[0])
        if not (math.isfinite(s0) and s0 > 0):
            raise ConfigurationError(f"Norlund method needs sigma_0 > 0, got {s0!r}")
        self._s0 = s0
        self._build(n_max)

    def _build(self, n_max: int) -> None:
        with self._lock:
            if n_max <= self._cap:
                return
            cap = max(n_max, 2 * self._cap + 1)
            s = np.asarray(self._sigma_fn(cap + 1), dtype=float)[: cap + 1] / self._s0
            if s.size < cap + 1 or not np.all(np.isfinite(s)):
                raise ValidationError("sigma sequence too short or not finite")
            prefix = np.cumsum(s)
            bad = np.flatnonzero(prefix <= 0)
            if bad.size:
                raise ConfigurationError(
                    f"partial sum sigma_0 + ... + sigma_{int(bad[0])} is not positive; "
                    "tau_n is undefined")
            tau_re = 1.0 / prefix
            norm_re = tau_re * np.cumsum(prefix)
            idx = np.arange(cap + 1)
            tau = self._tau_closed(idx) if self._tau_closed else tau_re
            norm = self._norm_closed(idx) if self._norm_closed else norm_re
            # publish complete arrays only; readers never see partial tables
            self._tables = (s, np.asarray(tau, float), np.asarray(norm, float), tau_re, norm_re)
            self._cap = cap

    def _get(self, n: int):
        if n > self._cap:
            self._build(n)
        return self._tables

    def sigma_seq(self, n: int) -> np.ndarray:
        return self._get(n)[0][: n + 1].copy()

    def tau_seq(self, n: int) -> np.ndarray:
        return self._get(n)[1][: n + 1].copy()

    def normalizer_seq(self, n: int) -> np.ndarray:
        return self._get(n)[2][: n + 1].copy()

    def tau(self, n: int) -> float:
        return float(self._get(n)[1][n])

    def normalizer(self, n: int) -> float:
        return float(self._get(n)[2][n])

    def tau_recomputed(self, n: int) -> np.ndarray:
        return self._get(n)[3][: n + 1].copy()

    def normalizer_recomputed(self, n: int) -> np.ndarray:
        return self._get(n)[4][: n + 1].copy()

    def row(self, n: int) -> np.ndarray:
        s, tau = self._get(n)[:2]
        return tau[n] * s[n::-1]

    def weight(self, n: int, k: int) -> float:
        if not 0 <= k <= n:
            raise IndexError(f"need 0 <= k <= n, got n={n}, k={k}")
        s, tau = self._get(n)[:2]
        return float(tau[n] * s[n - k])


class RieszDerived(SummationMethod):
    """Weights ``tau_{n,k} = tau_n / (N_n tau_k)`` built from a Norlund method."""

    def __init__(self, source: NorlundMethod):
        self.source = source
        self.name = f"riesz[{source.name}]"
        self.params = dict(source.params)

    def row(self, n: int) -> np.ndarray:
        tau = self.source.tau_seq(n)
        return (tau[n] / self.source.normalizer(n)) / tau


@dataclass
class RegularityReport:
    method: str
    n_max: int
    col_onset: int
    column_max: float
    decay_ratios: list[float] = field(default_factory=list)
    columns_decaying: bool = True


def regularity_check(method: SummationMethod, n_max: int, col_onset: int = 10) -> RegularityReport:
    """Verify nonnegativity and unit row sums for all ``n <= n_max``; report
    column decay at ``n_max`` for ``k <= col_onset``.

    Column decay is a finite-n trend and cannot certify the limit. Raises
    :class:`RegularityError` naming the first offending ``(n, k)``.
    """
    if not 1 <= col_onset <= n_max:
        raise ConfigurationError("need 1 <= col_onset <= n_max")
    half = None
    last = None
    for n in range(n_max + 1):
        r = method.row(n)
        neg = np.flatnonzero(r < 0)
        if neg.size:
            k = int(neg[0])
            raise RegularityError(f"{method.name}: sigma[{n},{k}] = {float(r[k])!r} < 0",
                                  n=n, k=k, condition="nonnegativity")
        total = math.fsum(r)
        if not abs(total - 1.0) <= ROW_SUM_TOL:
            k = int(np.argmax(r))
            raise RegularityError(f"{method.name}: row {n} sums to {total!r}",
                                  n=n, k=k, condition="row sum")
        if n == n_max // 2:
            half = r
        if n == n_max:
            last = r
    cols = range(col_onset + 1)
    ratios = []
    for k in cols:
        num = last[k]
        den = half[k] if k < half.size else 0.0
        ratios.append(0.0 if num == 0.0 else (num / den if den > 0 else math.inf))
    decaying = all(r < 1.0 for r in ratios)
    return RegularityReport(method.name, n_max, col_onset,
                            float(max(last[k] for k in cols)), ratios, decaying)


def norlund_from_sigma(sigma_seq, name: str = "custom", **kwargs) -> NorlundMethod:
    """Norlund method from an explicit sequence or a callable ``count -> array``.

    A finite sequence is extended by zeros.
    """
    if callable(sigma_seq):
        return NorlundMethod(name, sigma_seq, **kwargs)
    seq = np.asarray(sigma_seq, dtype=float).ravel()
    if seq.size == 0:
        raise ConfigurationError("empty sigma sequence")

    def padded(count: int) -> np.ndarray:
        out = np.zeros(count)
        m = min(count, seq.size)
        out[:m] = seq[:m]
        return out

    return NorlundMethod(name, padded, **kwargs)


def riesz_derived(m: NorlundMethod) -> RieszDerived:
    return RieszDerived(m)


def _cesaro_sigma(alpha: float) -> Callable[[int], np.ndarray]:
    def seq(count: int) -> np.ndarray:
        # binom(k + alpha - 1, k) as a running product
        i = np.arange(1, count, dtype=float)
        return np.concatenate([[1.0], np.cumprod((i + alpha - 1.0) / i)])
    return seq


def cesaro(alpha: float, n_max: int = 256) -> NorlundMethod:
    """Cesaro ``(C, alpha)``: ``sigma_k = binom(k+alpha-1, k)``,
    ``tau_n = 1/binom(n+alpha, n)``, ``N_n = (n+alpha+1)/(alpha+1)``."""
    if not (math.isfinite(alpha) and alpha > 0):
        raise ConfigurationError(f"Cesaro summation needs alpha > 0, got {alpha!r}")
    alpha = float(alpha)

    def tau(n):
        if alpha == 1.0:
            return 1.0 / (n + 1.0)
        i = np.arange(1, n.size, dtype=float)
        return np.concatenate([[1.0], np.cumprod(i / (i + alpha))])

    def norm(n):
        return (n + alpha + 1.0) / (alpha + 1.0)

    return NorlundMethod("cesaro", _cesaro_sigma(alpha), tau, norm,
                         params={"alpha": alpha}, n_max=n_max)


def arithmetic_mean(n_max: int = 256) -> NorlundMethod:
    m = cesaro(1.0, n_max)
    m.name = "arithmetic"
    m.params = {}
    return m


def legendre_method(n_max: int = 256) -> NorlundMethod:
    """``sigma = (1, 2, 2, ...)``, ``tau_n = 1/(2n+1)``, ``N_n = (n+1)^2/(2n+1)``."""
    def seq(count):
        out = np.full(count, 2.0)
        out[0] = 1.0
        return out

    return NorlundMethod("legendre", seq,
                         lambda n: 1.0 / (2.0 * n + 1.0),
                         lambda n: (n + 1.0) ** 2 / (2.0 * n + 1.0), n_max=n_max)


def gegenbauer(nu: float, n_max: int = 256) -> NorlundMethod:
    """Gegenbauer ``(G, nu)`` summation; ``nu = 1/2`` is the Legendre method."""
    if not (math.isfinite(nu) and nu > 0):
        raise ConfigurationError(f"Gegenbauer summation needs nu > 0, got {nu!r}")
    nu = float(nu)
    if nu == 0.5:
        m = legendre_method(n_max)
        m.name = "gegenbauer"
        m.params = {"nu": nu}
        return m

    def seq(count):
        # g_k = Gamma(k + 2nu - 1) / (Gamma(2nu) k!), g_1 = 1
        k = np.arange(1, count, dtype=float)
        g = np.concatenate([[1.0], np.cumprod((k[:-1] + 2 * nu - 1) / (k[:-1] + 1))])
        return np.concatenate([[1.0], (2 * k + 2 * nu - 1) * g[: k.size]])[:count]

    def tau(n):
        # h_n = Gamma(n+1) Gamma(2nu+1) / Gamma(n+2nu), h_0 = 2nu
        i = np.arange(n.size - 1, dtype=float)
        h = np.concatenate([[2 * nu], 2 * nu * np.cumprod((i + 1) / (i + 2 * nu))])
        return h / (2 * n + 2 * nu)

    def norm(n):
        return (2 * n + 2 * nu + 1) * (n + 2 * nu) / ((2 * n + 2 * nu) * (2 * nu + 1))

    return NorlundMethod("gegenbauer", seq, tau, norm, params={"nu": nu}, n_max=n_max)


def identity_method(n_max: int = 256) -> NorlundMethod:
    """``sigma_{n,k} = delta_{nk}`` as the Norlund method with ``sigma = (1, 0, 0, ...)``."""
    return NorlundMethod("identity", lambda count: np.eye(1, count).ravel(),
                         lambda n: np.ones(n.shape), lambda n: n + 1.0, n_max=n_max)


def read_sigma_csv(path: str | Path) -> np.ndarray:
    """Custom ``sigma_k`` from a ``k,sigma`` CSV; missing indices are zero."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise ConfigurationError(f"cannot read sigma file {path}: {exc}") from exc
    if not rows or set(rows[0]) != {"k", "sigma"}:
        raise ValidationError(f"{path}: expected header k,sigma")
    ks = [int(r["k"]) for r in rows]
    if min(ks) < 0:
        raise ValidationError(f"{path}: negative index")
    out = np.zeros(max(ks) + 1)
    for k, r in zip(ks, rows):
        out[k] = float(r["sigma"])
    return out


def method_from_spec(spec: dict[str, Any], n_max: int = 256) -> NorlundMethod:
    """Build a method from ``{"method": ..., "alpha"|"nu": ..., "sigma_file": ...}``."""
    kind = spec.get("method", "arithmetic")
    try:
        if kind == "cesaro":
            return cesaro(float(spec.get("alpha", 1.0)), n_max)
        if kind == "gegenbauer":
            return gegenbauer(float(spec.get("nu", 0.5)), n_max)
        if kind == "legendre":
            return legendre_method(n_max)
        if kind == "arithmetic":
            return arithmetic_mean(n_max)
        if kind == "identity":
            return identity_method(n_max)
        if kind == "custom":
            if "sigma" in spec:
                seq = np.asarray(spec["sigma"], dtype=float)
            elif "sigma_file" in spec:
                seq = read_sigma_csv(spec["sigma_file"])
            else:
                raise ConfigurationError("custom method needs sigma_file or sigma")
            return norlund_from_sigma(seq, "custom", n_max=n_max)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigurationError):
            raise
        raise ConfigurationError(f"bad method parameter: {exc}") from exc
    raise ConfigurationError(f"unknown summation method {kind!r}")
