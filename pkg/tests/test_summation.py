from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from orthomean.errors import ConfigurationError, RegularityError, ValidationError
from orthomean.summation import (TriangularMethod, arithmetic_mean, cesaro, gegenbauer,
                                 identity_method, legendre_method, method_from_spec,
                                 norlund_from_sigma, read_sigma_csv, regularity_check,
                                 riesz_derived)

BUILTINS = [arithmetic_mean(), cesaro(2.0), cesaro(0.5), legendre_method(), gegenbauer(1.0),
            gegenbauer(0.25), identity_method()]


def test_cesaro_examples():
    assert np.allclose(cesaro(1.0).row(7), 1 / 8)
    assert np.allclose(cesaro(2.0).row(2), [1 / 2, 1 / 3, 1 / 6], atol=1e-16)
    n = np.arange(50)
    assert np.allclose(cesaro(2.0).normalizer_seq(49), (n + 3) / 3)


def test_cesaro_sigma_against_scipy():
    for alpha in (0.3, 1.7, 4.0):
        k = np.arange(300)
        ref = special.binom(k + alpha - 1, k)
        assert np.allclose(cesaro(alpha).sigma_seq(299), ref, rtol=1e-12)
        assert np.allclose(cesaro(alpha).tau_seq(299), 1 / special.binom(k + alpha, k), rtol=1e-12)


def test_norlund_from_constant_sequences():
    m = norlund_from_sigma([1.0] * 101)
    n = np.arange(101)
    assert np.allclose(m.tau_seq(100), 1 / (n + 1))
    assert np.allclose(m.normalizer_seq(100), (n + 2) / 2)
    m = norlund_from_sigma([1.0] + [2.0] * 100)
    assert np.allclose(m.tau_seq(100), 1 / (2 * n + 1))
    assert np.allclose(m.normalizer_seq(100), (n + 1) ** 2 / (2 * n + 1))
    m = norlund_from_sigma([1.0])
    assert np.allclose(m.tau_seq(100), 1.0)
    assert np.allclose(m.normalizer_seq(100), n + 1)


def test_gegenbauer_half_is_legendre():
    g = gegenbauer(0.5)
    assert np.array_equal(g.sigma_seq(20), legendre_method().sigma_seq(20))
    assert g.sigma_seq(3).tolist() == [1.0, 2.0, 2.0, 2.0]


def test_gegenbauer_sigma_value():
    assert gegenbauer(1.0).sigma_seq(3)[3] == pytest.approx(7.0, rel=1e-15)


@pytest.mark.parametrize("nu", [0.25, 0.5, 1.0, 2.0])
def test_gegenbauer_closed_forms(nu):
    g = gegenbauer(nu)
    assert np.allclose(g.tau_seq(500), g.tau_recomputed(500), rtol=1e-12, atol=0)
    assert np.allclose(g.normalizer_seq(500), g.normalizer_recomputed(500), rtol=1e-12, atol=0)


@pytest.mark.parametrize("nu", [0.25, 0.75, 1.0, 2.5])
def test_gegenbauer_cesaro_relations(nu):
    n = 300
    G, C = gegenbauer(nu), cesaro(2 * nu)
    sG, sC, tG, tC = G.sigma_seq(n), C.sigma_seq(n), G.tau_seq(n), C.tau_seq(n)
    assert sG[0] == sC[0]
    assert np.allclose(sG[1:], sC[1:] + sC[:-1], rtol=1e-12, atol=0)
    assert tG[0] == tC[0]
    # 1/tau^G_n = 1/tau^C_n + 1/tau^C_{n-1}
    assert np.allclose(tG[1:], 1 / (1 / tC[1:] + 1 / tC[:-1]), rtol=1e-12, atol=0)


def test_gegenbauer_tau_relation_with_sigma_fails():
    # the variant with sigma^C_{n-1} in place of 1/tau^C_{n-1} is not an identity
    G, C = gegenbauer(1.0), cesaro(2.0)
    tG, tC, sC = G.tau_seq(50), C.tau_seq(50), C.sigma_seq(50)
    assert not np.allclose(tG[1:], 1 / (1 / tC[1:] + 1 / sC[:-1]), rtol=1e-3)


@pytest.mark.parametrize("m", BUILTINS, ids=repr)
def test_norlund_identity_and_tau(m):
    n = 400
    s, tau = m.sigma_seq(n), m.tau_seq(n)
    for k in (0, 1, 57, n):
        assert m.weight(n, k) == tau[n] * s[n - k]
    assert tau[0] == 1.0
    assert np.all(tau > 0) and np.all(np.diff(tau) <= 1e-15)
    N = m.normalizer_seq(n)
    i = np.arange(n + 1)
    assert np.all(N >= 1 - 1e-12) and np.all(N <= i + 1 + 1e-12 * (i + 1))


def test_regularity_examples():
    rep = regularity_check(arithmetic_mean(), 100)
    assert arithmetic_mean().weight(100, 3) == pytest.approx(1 / 101)
    assert rep.columns_decaying
    regularity_check(identity_method(), 100)
    bad = TriangularMethod("heavy", lambda n, k: 1.5 if k == n else 0.0)
    with pytest.raises(RegularityError) as exc:
        regularity_check(bad, 10)
    assert exc.value.n == 0 and exc.value.condition == "row sum"


def test_negative_sigma_reports_position():
    m = norlund_from_sigma([1.0, -0.5, 1.0])
    with pytest.raises(RegularityError) as exc:
        regularity_check(m, 10)
    assert (exc.value.n, exc.value.k) == (1, 0)


def test_nonpositive_prefix_rejected():
    with pytest.raises(ConfigurationError):
        norlund_from_sigma([1.0, -1.0])
    with pytest.raises(ConfigurationError):
        norlund_from_sigma([0.0, 1.0])
    with pytest.raises(ConfigurationError):
        cesaro(0.0)
    with pytest.raises(ConfigurationError):
        gegenbauer(-1.0)


def test_riesz_examples():
    r = riesz_derived(arithmetic_mean())
    n = 30
    k = np.arange(n + 1)
    assert np.allclose(r.row(n), 2 * (k + 1) / ((n + 1) * (n + 2)))
    assert np.allclose(riesz_derived(identity_method()).row(n), 1 / (n + 1))


@pytest.mark.parametrize("m", BUILTINS, ids=repr)
def test_riesz_rows(m):
    r = riesz_derived(m)
    for n in (0, 5, 200):
        row = r.row(n)
        assert math.fsum(row) == pytest.approx(1.0, abs=1e-12)
        assert np.all(row > 0) and np.all(row <= 1 / m.normalizer(n) + 1e-15)
    assert np.all(r.row(2000)[:11] < r.row(200)[:11] / 2)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0.0, 10.0), min_size=1, max_size=30).filter(lambda s: s[0] > 0.01))
def test_custom_nonnegative_sequences_are_regular(seq):
    m = norlund_from_sigma(seq)
    regularity_check(m, 60)
    r = riesz_derived(m)
    assert math.fsum(r.row(60)) == pytest.approx(1.0, abs=1e-12)


def test_lazy_growth_consistent():
    m = cesaro(1.5, n_max=4)
    late = m.row(1000)
    fresh = cesaro(1.5, n_max=2000).row(1000)
    assert np.array_equal(late, fresh)


def test_sigma_csv_and_spec(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("k,sigma\n0,1\n2,3\n")
    assert read_sigma_csv(p).tolist() == [1.0, 0.0, 3.0]
    m = method_from_spec({"method": "custom", "sigma_file": str(p)})
    assert m.sigma_seq(3).tolist() == [1.0, 0.0, 3.0, 0.0]
    (tmp_path / "bad.csv").write_text("i,s\n0,1\n")
    with pytest.raises(ValidationError):
        read_sigma_csv(tmp_path / "bad.csv")
    with pytest.raises(ConfigurationError):
        method_from_spec({"method": "borel"})
    with pytest.raises(ConfigurationError):
        method_from_spec({"method": "cesaro", "alpha": "x"})
    assert method_from_spec({"method": "gegenbauer", "nu": 1}).params == {"nu": 1.0}
