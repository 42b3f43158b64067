from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from orthomean.errors import NumericError
from orthomean.families import FamilySpec, jacobi_shift_family, ultraspherical_family
from orthomean.spectral import (JacobiMatrix, cd_kernel_diag, eigen_roots, eval_orthonormal,
                                gauss_rule, jacobi_matrix, local_moment, local_moments,
                                trace_power, trace_powers)

LEG = ultraspherical_family(0.5)
FAMILIES = [ultraspherical_family(0.5), ultraspherical_family(1.5), jacobi_shift_family(0, 1),
            jacobi_shift_family(-0.5, -0.5), FamilySpec("constant", {"lambda": 0.5}).build()]


def test_legendre_matrix_size_two():
    J = jacobi_matrix(LEG, 0, 2)
    assert np.array_equal(J.diag, [0.0, 0.0])
    assert J.offdiag[0] == pytest.approx(1 / math.sqrt(3), abs=1e-15)
    r = 1 / math.sqrt(3)
    assert np.allclose(eigen_roots(J), [-r, r], atol=1e-15)
    assert trace_power(J, 2) == pytest.approx(2 / 3, abs=1e-15)


def test_size_one():
    fam = jacobi_shift_family(0, 1)
    J = jacobi_matrix(fam, 0, 1)
    assert J.offdiag.size == 0
    assert eigen_roots(J)[0] == J.diag[0]


def test_matrix_entries_match_coefficients():
    J = jacobi_matrix(LEG, 3, 3)
    a, b = LEG.coeffs(3, np.arange(3))
    assert np.array_equal(J.diag, a) and np.array_equal(J.offdiag, b[1:])


def test_chebyshev_zeros():
    n = 40
    J = jacobi_matrix(jacobi_shift_family(-0.5, -0.5), 0, n)
    j = np.arange(1, n + 1)
    ref = np.sort(np.cos((2 * j - 1) * np.pi / (2 * n)))
    assert np.allclose(eigen_roots(J), ref, atol=1e-12)


@pytest.mark.parametrize("fam", FAMILIES, ids=lambda f: repr(f))
def test_eigenvalues_against_lapack(fam):
    for k in (0, 7):
        J = jacobi_matrix(fam, k, 150)
        ref = np.linalg.eigvalsh(J.dense())
        assert np.allclose(eigen_roots(J), ref, atol=1e-13)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=1, max_size=40),
       st.lists(st.floats(1e-3, 3), min_size=39, max_size=39))
def test_random_tridiagonal(d, e):
    J = JacobiMatrix(d, e[: len(d) - 1])
    ref = np.linalg.eigvalsh(J.dense())
    assert np.allclose(eigen_roots(J), ref, atol=1e-12 * max(1.0, J.scale()))


def test_degenerate_offdiag_raises():
    with pytest.raises(NumericError):
        eigen_roots(JacobiMatrix([0.0, 0.0], [0.0]))


def test_interlacing():
    fam = ultraspherical_family(1.5)
    for n in range(1, 61, 7):
        r = eigen_roots(jacobi_matrix(fam, 2, n))
        s = eigen_roots(jacobi_matrix(fam, 2, n + 1))
        assert np.all(s[:-1] < r) and np.all(r < s[1:])


def test_gauss_rule_legendre():
    rule = gauss_rule(LEG, 0, 1)
    assert rule.nodes[0] == pytest.approx(0.0, abs=1e-16) and rule.weights[0] == pytest.approx(2.0)
    assert gauss_rule(LEG, 0, 3).integrate(lambda x: x ** 4) == pytest.approx(0.4, abs=1e-14)


def test_gauss_rule_against_scipy():
    x, w = special.roots_jacobi(12, 0.7, -0.2)
    rule = gauss_rule(jacobi_shift_family(0.7, -0.2), 0, 12)
    assert np.allclose(rule.nodes, x, atol=1e-13)
    assert np.allclose(rule.weights, w, rtol=1e-11)


def test_gauss_rule_beta_integral():
    rule = gauss_rule(ultraspherical_family(1.5), 0, 5)
    ref, _ = integrate.quad(lambda x: x * x * (1 - x * x), -1, 1)
    assert rule.integrate(lambda x: x ** 2) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("fam", FAMILIES, ids=lambda f: repr(f))
def test_gauss_rule_invariants(fam):
    for k in (0, 4, 10):
        rule = gauss_rule(fam, k, 20)
        assert math.fsum(rule.weights) == pytest.approx(fam.mass(k), rel=1e-12)
        assert np.all(np.diff(rule.nodes) > 0)
        assert np.all(np.abs(rule.nodes) <= fam.support_bound)


@pytest.mark.parametrize("fam", FAMILIES, ids=lambda f: repr(f))
def test_gauss_rule_exactness(fam):
    for k in (0, 3, 10):
        for m in (1, 5, 20):
            rule = gauss_rule(fam, k, m)
            ref = local_moments(fam, [k], [0], 2 * m - 1)[0] * fam.mass(k)
            got = np.array([rule.integrate(lambda x, l=l: x ** l) for l in range(2 * m)])
            scale = np.maximum(np.abs(ref), fam.mass(k) * 1e-3)
            assert np.all(np.abs(got - ref) <= 1e-11 * scale)


def test_eval_orthonormal_legendre():
    x = np.linspace(-1, 1, 7)
    p = eval_orthonormal(LEG, 0, 3, x)
    assert np.allclose(p[0], 1 / math.sqrt(2))
    assert np.allclose(p[1], math.sqrt(1.5) * x)
    assert np.allclose(eval_orthonormal(LEG, 2, 5, -x)[5], -eval_orthonormal(LEG, 2, 5, x)[5])


def test_orthonormality_by_quadrature():
    fam = jacobi_shift_family(0.4, 1.2)
    rule = gauss_rule(fam, 3, 30)
    P = eval_orthonormal(fam, 3, 12, rule.nodes)
    G = (P * rule.weights) @ P.T
    assert np.allclose(G, np.eye(13), atol=1e-12)


def test_cd_kernel():
    assert np.allclose(cd_kernel_diag(LEG, 0, 0, np.linspace(-1, 1, 5)), 0.5)
    assert cd_kernel_diag(LEG, 0, 1, 1.0) == pytest.approx(2.0)
    rule = gauss_rule(LEG, 0, 12)
    for n in (0, 3, 11):
        assert rule.integrate(lambda x: cd_kernel_diag(LEG, 0, n, x)) == pytest.approx(n + 1, abs=1e-12)


def test_local_moment_examples():
    assert local_moment(LEG, 0, 0, 2) == pytest.approx(1 / 3, abs=1e-15)
    for fam in FAMILIES:
        assert local_moment(fam, 2, 5, 0) == pytest.approx(1.0, abs=1e-14)
    assert local_moment(ultraspherical_family(1.5), 1, 4, 5) == 0.0


def test_local_moments_against_quadrature():
    fam = jacobi_shift_family(0, 1)
    k, m, L = 2, 4, 9
    rule = gauss_rule(fam, k, m + L)
    p2 = eval_orthonormal(fam, k, m, rule.nodes)[m] ** 2
    ref = [rule.integrate(lambda x, l=l: x ** l * p2) for l in range(L + 1)]
    assert np.allclose(local_moments(fam, [k], [m], L)[0], ref, atol=1e-13)


@pytest.mark.parametrize("fam", FAMILIES[:3], ids=lambda f: repr(f))
def test_trace_powers_match_power_sums(fam):
    for n in (1, 17, 300):
        J = jacobi_matrix(fam, 1, n)
        r = eigen_roots(J)
        tp = trace_powers(J, 12)
        ref = np.array([np.sum(r ** l) for l in range(13)])
        assert np.allclose(tp, ref, rtol=1e-9, atol=1e-9)
    J = jacobi_matrix(fam, 0, 5)
    assert trace_power(J, 0) == 5
    assert trace_power(J, 1) == pytest.approx(J.diag.sum())
