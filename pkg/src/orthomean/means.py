"""Weighted mean measures of a coefficient family under a summation method.

Three sequences of probability measures are assembled:

* ``mu_bar_n = sum_k sigma_{n,k} (p_k^(n-k))^2 dmu^(n-k)``,
* ``lambda_n = (1/N_n) sum_k sigma_{n,k} K_k^(n-k)(x, x) dmu^(n-k)``,
* ``nu_{n+1} = (1/N_n) sum_k sigma_{n,k} sum_j delta(x_{k+1,j}^(n-k))``.

All are compactly supported, so moments determine them. Moments come from
powers of Jacobi matrices. An explicit sum over lattice paths serves as an
independent check.
"""

from __future__ import annotations

import csv
import itertools
import math
import os
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path as FsPath
from typing import Callable

import numpy as np

from .errors import ConfigurationError, InternalConsistencyError
from .families import CoefficientFamily
from .spectral import eigen_roots, jacobi_matrix, local_moments
from .summation import NorlundMethod, SummationMethod

__all__ = [
    "Path",
    "PathSignature",
    "MeanMoments",
    "RootSample",
    "max_path_length",
    "q_paths",
    "path_count",
    "signature_counts",
    "path_weight",
    "path_enumeration_moment",
    "mu_bar_moments",
    "moment_triangle",
    "lambda_moments",
    "root_sample",
    "sigma_partial",
    "nevai_shift_defect",
    "simon_gap",
    "equilibrium_moment_from_sigma",
]

DEFAULT_MAX_L = 12
LAMBDA_RTOL = 1e-10


def max_path_length() -> int:
    """Cap on the path oracle's length; ``ORTHOMEAN_MAX_L`` overrides the default 12."""
    raw = os.environ.get("ORTHOMEAN_MAX_L")
    if raw is None:
        return DEFAULT_MAX_L
    try:
        value = int(raw)
    except ValueError as exc:
        raise ConfigurationError(f"ORTHOMEAN_MAX_L must be an integer, got {raw!r}") from exc
    if value < 0:
        raise ConfigurationError("ORTHOMEAN_MAX_L must be nonnegative")
    return value


@dataclass(frozen=True)
class PathSignature:
    l_a: int
    l_b: int


@dataclass(frozen=True)
class Path:
    """Integer sequence with steps in {-1, 0, 1}."""

    steps: tuple[int, ...]

    def __post_init__(self):
        s = tuple(int(v) for v in self.steps)
        if not s:
            raise ValueError("a path has at least one vertex")
        if any(abs(b - a) > 1 for a, b in zip(s, s[1:])):
            raise ValueError(f"step larger than 1 in {s}")
        object.__setattr__(self, "steps", s)

    @property
    def length(self) -> int:
        return len(self.steps) - 1

    @property
    def closed(self) -> bool:
        """Member of Q_l: starts and ends at 0."""
        return self.steps[0] == 0 and self.steps[-1] == 0

    def shift(self, m: int) -> "Path":
        return Path(tuple(v + m for v in self.steps))

    def signature(self) -> PathSignature:
        flat = sum(a == b for a, b in zip(self.steps, self.steps[1:]))
        return PathSignature(flat, self.length - flat)


@lru_cache(maxsize=None)
def _q_path_array(l: int) -> np.ndarray:
    if l == 0:
        return np.zeros((1, 1), dtype=np.int64)
    inc = np.array([s for s in itertools.product((-1, 0, 1), repeat=l) if sum(s) == 0],
                   dtype=np.int64)
    return np.concatenate([np.zeros((inc.shape[0], 1), dtype=np.int64), np.cumsum(inc, axis=1)],
                          axis=1)


def q_paths(l: int) -> list[Path]:
    """All closed paths of length ``l`` (``rho_0 = rho_l = 0``)."""
    return [Path(tuple(r)) for r in _q_path_array(l)]


def path_count(l: int, l_b: int) -> int:
    """Closed paths of length ``l`` with ``l_b`` moving steps: ``C(l, l_b) C(l_b, l_b/2)``."""
    if l_b % 2 or not 0 <= l_b <= l:
        return 0
    return math.comb(l, l_b) * math.comb(l_b, l_b // 2)


def signature_counts(l: int) -> dict[PathSignature, int]:
    """Signature histogram of Q_l by explicit enumeration."""
    arr = _q_path_array(l)
    flat = (np.diff(arr, axis=1) == 0).sum(axis=1)
    out: dict[PathSignature, int] = {}
    for f, cnt in zip(*np.unique(flat, return_counts=True)):
        out[PathSignature(int(f), l - int(f))] = int(cnt)
    return out


def path_weight(family: CoefficientFamily, k: int, path: Path) -> float:
    """``W^(k)(rho) = prod_j w(rho_j, rho_{j+1})``: ``a_m`` on a flat step at ``m``,
    ``b_{max(rho_j, rho_{j+1})}`` on a move."""
    w = 1.0
    for p, q in zip(path.steps, path.steps[1:]):
        a, b = family.coeffs(k, max(p, q))
        w *= float(a) if p == q else float(b)
    return w


def path_enumeration_moment(family: CoefficientFamily, k: int, m: int, l: int) -> float:
    """``int x^l (p_m^(k))^2 dmu^(k)`` as the sum of ``W^(k)(T_m rho)`` over Q_l."""
    cap = max_path_length()
    if l > cap:
        raise ConfigurationError(f"path enumeration limited to l <= {cap} (got l={l}); "
                                 "raise ORTHOMEAN_MAX_L to allow more")
    if l == 0:
        return 1.0
    rho = _q_path_array(l) + m
    lo = m - l
    idx = np.arange(lo, m + l + 1)
    a, b = family.coeffs(k, idx)
    p, q = rho[:, :-1], rho[:, 1:]
    w = np.where(p == q, a[p - lo], b[np.maximum(p, q) - lo])
    return float(np.prod(w, axis=1).sum())


@dataclass(frozen=True, eq=False)
class MeanMoments:
    n: int
    kind: str
    moments: np.ndarray

    def to_rows(self) -> list[tuple[int, float]]:
        return [(l, float(v)) for l, v in enumerate(self.moments)]


@dataclass(frozen=True, eq=False)
class RootSample:
    """Weighted point masses, unsorted."""

    roots: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return self.roots.size

    def moments(self, L: int) -> np.ndarray:
        return np.array([np.dot(self.weights, self.roots ** l) for l in range(L + 1)])

    def sorted(self) -> "RootSample":
        order = np.argsort(self.roots, kind="stable")
        return RootSample(self.roots[order], self.weights[order])

    def to_csv(self, path: str | FsPath) -> None:
        s = self.sorted()
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["root", "weight"])
            for r, wt in zip(s.roots, s.weights):
                w.writerow([repr(float(r)), repr(float(wt))])


def _weighted_local_sum(family, k_meas, degree, weights, L) -> np.ndarray:
    keep = weights != 0
    if not keep.any():
        return np.zeros(L + 1)
    lm = local_moments(family, k_meas[keep], degree[keep], L)
    return weights[keep] @ lm


def mu_bar_moments(family: CoefficientFamily, method: SummationMethod, n: int, L: int) -> MeanMoments:
    """Moments ``0..L`` of ``mu_bar_n``."""
    if n < 0 or L < 0:
        raise ValueError("n and L must be nonnegative")
    k = np.arange(n + 1)
    m = _weighted_local_sum(family, n - k, k, method.row(n), L)
    return MeanMoments(n, "mu_bar", m)


def moment_triangle(family: CoefficientFamily, n: int, L: int) -> np.ndarray:
    """``T[q, j, l] = int x^l (p_j^(q))^2 dmu^(q)`` for ``q + j <= n``, zero elsewhere.

    Every mean measure of index ``<= n`` is a weighted sum over this triangle,
    so it can be computed once and reused across ``n``.
    """
    q, j = np.nonzero(np.add.outer(np.arange(n + 1), np.arange(n + 1)) <= n)
    out = np.zeros((n + 1, n + 1, L + 1))
    out[q, j] = local_moments(family, q, j, L)
    return out


def _lambda_weights(method: NorlundMethod, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Weights on the triangle ``(q, j)`` of the two expressions for ``lambda_n``.

    Direct: ``sigma_{n,k}/N_n`` on ``(n-k, j)``, ``j <= k``.
    Riesz: ``tau_{n,k} sigma_{k,i}`` on ``(k-i, i)``, ``i <= k``.
    """
    direct = np.zeros((n + 1, n + 1))
    riesz = np.zeros((n + 1, n + 1))
    row = method.row(n) / method.normalizer(n)
    tau = method.tau_seq(n)
    outer = (tau[n] / method.normalizer(n)) / tau
    for k in range(n + 1):
        direct[n - k, : k + 1] = row[k]
        i = np.arange(k + 1)
        riesz[k - i, i] += outer[k] * method.row(k)
    return direct, riesz


def lambda_moments(family: CoefficientFamily, method: NorlundMethod, n: int, L: int,
                   rtol: float = LAMBDA_RTOL, table: np.ndarray | None = None) -> MeanMoments:
    """Moments of ``lambda_n``, computed directly and as ``sum_k tau_{n,k} mu_bar_k``.

    The two routes must agree to ``rtol`` relative to
    ``max(|value|, support_bound**l)``; otherwise InternalConsistencyError.
    ``table`` may be a precomputed :func:`moment_triangle` of size ``>= n``.
    """
    if not isinstance(method, NorlundMethod):
        raise ConfigurationError("lambda_n needs a Norlund method")
    if table is None or table.shape[0] <= n or table.shape[2] <= L:
        table = moment_triangle(family, n, L)
    t = table[: n + 1, : n + 1, : L + 1]
    w_direct, w_riesz = _lambda_weights(method, n)
    direct = np.einsum("qj,qjl->l", w_direct, t)
    riesz = np.einsum("qj,qjl->l", w_riesz, t)
    scale = np.maximum(np.maximum(np.abs(direct), np.abs(riesz)),
                       float(family.support_bound) ** np.arange(L + 1))
    gap = np.abs(direct - riesz)
    if np.any(gap > rtol * scale):
        l = int(np.argmax(gap / scale))
        raise InternalConsistencyError(
            f"lambda_{n} moment {l}: direct {direct[l]!r} vs Riesz route {riesz[l]!r}", index=l)
    return MeanMoments(n, "lambda", direct)


def root_sample(family: CoefficientFamily, method: NorlundMethod, n: int) -> RootSample:
    """Zeros of ``p_{k+1}^(n-k)`` for ``k <= n``, each weighted ``sigma_{n,k}/N_n``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if not isinstance(method, NorlundMethod):
        raise ConfigurationError("nu_{n+1} needs a Norlund method")
    row = method.row(n)
    norm = method.normalizer(n)
    roots, weights = [], []
    for k in range(n + 1):
        if row[k] == 0.0:
            continue
        r = eigen_roots(jacobi_matrix(family, n - k, k + 1))
        roots.append(r)
        weights.append(np.full(r.size, row[k] / norm))
    sample = RootSample(np.concatenate(roots), np.concatenate(weights))
    total = math.fsum(sample.weights)
    if abs(total - 1.0) > 1e-10:
        raise InternalConsistencyError(f"root weights sum to {total!r}, expected 1")
    return sample


def sigma_partial(family: CoefficientFamily, method: SummationMethod, n: int,
                  l_a: int, l_b: int) -> float:
    """``sum_k sigma_{n,k} (a_k^(n-k))^l_a (b_k^(n-k))^l_b``."""
    if l_a < 0 or l_b < 0:
        raise ValueError("l_a and l_b must be nonnegative")
    k = np.arange(n + 1)
    a, b = family.coeffs(n - k, k)
    return float(np.dot(method.row(n), a ** l_a * b ** l_b))


def nevai_shift_defect(family: CoefficientFamily, method: SummationMethod, n: int,
                       shift: int) -> tuple[float, float]:
    """Weighted defects ``sum_k sigma_{n,k} |a_{k+l}^(n-k) - a_k^(n-k)|`` and the b analogue."""
    if shift < 1:
        raise ValueError("shift must be >= 1")
    k = np.arange(n + 1)
    a0, b0 = family.coeffs(n - k, k)
    a1, b1 = family.coeffs(n - k, k + shift)
    row = method.row(n)
    return float(np.dot(row, np.abs(a1 - a0))), float(np.dot(row, np.abs(b1 - b0)))


def simon_gap(family: CoefficientFamily, n: int, k: int, l: int,
              bounds: tuple[float, float] | None = None) -> tuple[float, float]:
    """``|int x^l K_k^(n-k)(x,x) dmu^(n-k) - sum_j (x_{k+1,j}^(n-k))^l|`` and its
    bound ``2 l (A + 2B)^l``."""
    if not 0 <= k <= n or l < 0:
        raise ValueError("need 0 <= k <= n and l >= 0")
    q = n - k
    kernel = local_moments(family, np.full(k + 1, q), np.arange(k + 1), l)[:, l].sum()
    power_sum = float(np.sum(eigen_roots(jacobi_matrix(family, q, k + 1)) ** l))
    A, B = bounds if bounds is not None else family.coeff_bounds(n + l)
    return abs(float(kernel) - power_sum), 2 * l * (A + 2 * B) ** l


def equilibrium_moment_from_sigma(sigma: Callable[[int, int], float], l: int) -> float:
    """Limit moment ``sum_{rho in Q_l} Sigma_{l_a, l_b}`` grouped by signature."""
    if l < 0:
        raise ValueError("l must be nonnegative")
    return math.fsum(path_count(l, lb) * sigma(l - lb, lb) for lb in range(0, l + 1, 2))
