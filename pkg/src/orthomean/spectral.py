"""Jacobi matrices and what they encode: zeros, Gauss rules, polynomial values and
local moments ``int x^l p_m^2 dmu``."""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

import numpy as np

from .errors import NumericError
from .families import CoefficientFamily

__all__ = [
    "JacobiMatrix",
    "QuadratureRule",
    "jacobi_matrix",
    "eigen_roots",
    "gauss_rule",
    "eval_orthonormal",
    "cd_kernel_diag",
    "local_moment",
    "local_moments",
    "trace_power",
    "trace_powers",
]

EPS = sys.float_info.epsilon
MAX_SWEEPS = 50


@dataclass(frozen=True, eq=False)
class JacobiMatrix:
    """Symmetric tridiagonal matrix; ``offdiag[i]`` couples rows ``i`` and ``i + 1``."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = np.array(self.diag, dtype=float).ravel()
        e = np.array(self.offdiag, dtype=float).ravel()
        if d.size == 0 or e.size != d.size - 1:
            raise ValueError(f"need n >= 1 diagonal and n - 1 off-diagonal entries, "
                             f"got {d.size} and {e.size}")
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)

    @property
    def size(self) -> int:
        return self.diag.size

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def scale(self) -> float:
        return float(np.abs(self.diag).max(initial=0.0) + 2 * np.abs(self.offdiag).max(initial=0.0))


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, f) -> float:
        return float(np.dot(self.weights, f(self.nodes)))


def jacobi_matrix(family: CoefficientFamily, k: int, size: int) -> JacobiMatrix:
    """The ``size x size`` Jacobi matrix of ``mu^(k)``: diagonal ``a_0..a_{size-1}``,
    off-diagonal ``b_1..b_{size-1}``."""
    if size < 1:
        raise ValueError("size must be >= 1")
    a, b = family.coeffs(k, np.arange(size))
    return JacobiMatrix(a, b[1:])


def _tql(d: list[float], e: list[float], z: list[float] | None) -> None:
    """Implicit QL with Wilkinson shifts, in place.

    ``e[i]`` couples ``d[i]`` and ``d[i+1]`` (``len(e) == len(d)``, last entry
    unused). If ``z`` is given it holds the first row of the eigenvector matrix
    and is rotated along.
    """
    n = len(d)
    hypot = math.hypot
    copysign = math.copysign
    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1:
                if abs(e[m]) <= EPS * (abs(d[m]) + abs(d[m + 1])):
                    break
                m += 1
            if m == l:
                break
            if sweeps == MAX_SWEEPS:
                raise NumericError(f"QL iteration did not converge for eigenvalue {l}", index=l)
            sweeps += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            while i >= l:
                f = s * e[i]
                bb = c * e[i]
                r = hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    # underflow: split the block and restart
                    d[i + 1] -= p
                    e[m] = 0.0
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * bb
                p = s * r
                d[i + 1] = g + p
                g = c * r - bb
                if z is not None:
                    f = z[i + 1]
                    z[i + 1] = s * z[i] + c * f
                    z[i] = c * z[i] - s * f
                i -= 1
            else:
                d[l] -= p
                e[l] = g
                e[m] = 0.0


def _solve(J: JacobiMatrix, vectors: bool):
    d = J.diag.tolist()
    e = J.offdiag.tolist() + [0.0]
    z = None
    if vectors:
        z = [0.0] * len(d)
        z[0] = 1.0
    _tql(d, e, z)
    order = np.argsort(d, kind="stable")
    roots = np.asarray(d)[order]
    if roots.size > 1 and not np.all(np.diff(roots) > 0):
        i = int(np.flatnonzero(np.diff(roots) <= 0)[0])
        raise NumericError(f"eigenvalues {i} and {i + 1} coincide numerically", index=i)
    first = None if z is None else np.asarray(z)[order]
    return roots, first


def eigen_roots(J: JacobiMatrix) -> np.ndarray:
    """Eigenvalues of ``J`` in ascending order, i.e. the zeros of ``p_size``."""
    return _solve(J, vectors=False)[0]


def gauss_rule(family: CoefficientFamily, k: int, m: int) -> QuadratureRule:
    """``m``-point Gauss rule for ``mu^(k)`` (Golub-Welsch)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    nodes, first = _solve(jacobi_matrix(family, k, m), vectors=True)
    return QuadratureRule(nodes, family.mass(k) * first ** 2)


def eval_orthonormal(family: CoefficientFamily, k: int, n: int, x) -> np.ndarray:
    """Values ``p_0(x), ..., p_n(x)`` of the orthonormal polynomials of ``mu^(k)``.

    The degree runs along the first axis; ``x`` may be an array.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    x = np.asarray(x, dtype=float)
    a, b = family.coeffs(k, np.arange(n + 2))
    p = np.empty((n + 1,) + x.shape)
    p[0] = 1.0 / math.sqrt(family.mass(k))
    if n >= 1:
        p[1] = (x - a[0]) * p[0] / b[1]
    for j in range(1, n):
        p[j + 1] = ((x - a[j]) * p[j] - b[j] * p[j - 1]) / b[j + 1]
    return p


def cd_kernel_diag(family: CoefficientFamily, k: int, n: int, x):
    """Christoffel-Darboux kernel on the diagonal, ``sum_{l <= n} p_l(x)^2``."""
    p = eval_orthonormal(family, k, n, x)
    return np.sum(p * p, axis=0)


# -- moments through powers of the Jacobi matrix -----------------------------------

def _window_moments(d: np.ndarray, c: np.ndarray, L: int) -> np.ndarray:
    """Diagonal entries ``(J^l)_{mm}``, ``l <= L``, one per row of the windows.

    ``d`` has shape (M, W) with the diagonal around ``m`` (centre column);
    ``c[:, s]`` couples window positions ``s`` and ``s + 1``. ``W`` must be at
    least ``2 * ceil(L / 2) + 1``.
    """
    M, W = d.shape
    h = (W - 1) // 2
    v = np.zeros((M, W))
    v[:, h] = 1.0
    powers = [v]
    for _ in range((L + 1) // 2):
        w = d * v
        w[:, :-1] += c * v[:, 1:]
        w[:, 1:] += c * v[:, :-1]
        v = w
        powers.append(v)
    out = np.empty((M, L + 1))
    for l in range(L + 1):
        i = l // 2
        out[:, l] = np.einsum("ij,ij->i", powers[i], powers[l - i])
    return out


def local_moments(family: CoefficientFamily, k, m, L: int) -> np.ndarray:
    """``int x^l (p_m^(k))^2 dmu^(k)`` for ``l = 0..L``, vectorised over ``(k, m)``.

    Returns shape ``(len, L + 1)``.
    """
    k = np.atleast_1d(np.asarray(k, dtype=np.int64))
    m = np.atleast_1d(np.asarray(m, dtype=np.int64))
    k, m = np.broadcast_arrays(k, m)
    h = (L + 1) // 2
    off = np.arange(-h, h + 1)
    d, _ = family.coeffs(k[:, None], m[:, None] + off[None, :])
    _, c = family.coeffs(k[:, None], m[:, None] + off[None, 1:])
    return _window_moments(d, c, L)


def local_moment(family: CoefficientFamily, k: int, m: int, l: int) -> float:
    if l < 0 or m < 0:
        raise ValueError("l and m must be nonnegative")
    return float(local_moments(family, [k], [m], l)[0, l])


def trace_powers(J: JacobiMatrix, L: int) -> np.ndarray:
    """``trace(J^l)`` for ``l = 0..L`` without an eigensolve."""
    n = J.size
    h = (L + 1) // 2
    dpad = np.concatenate([np.zeros(h), J.diag, np.zeros(h)])
    cpad = np.concatenate([np.zeros(h), J.offdiag, np.zeros(h + 1)])
    rows = np.arange(n)[:, None] + np.arange(2 * h + 1)[None, :]
    d = dpad[rows]
    c = cpad[rows[:, :-1]]
    return _window_moments(d, c, L).sum(axis=0)


def trace_power(J: JacobiMatrix, l: int) -> float:
    if l < 0:
        raise ValueError("l must be nonnegative")
    return float(trace_powers(J, l)[l])
