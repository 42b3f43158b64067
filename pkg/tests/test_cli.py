from __future__ import annotations

import csv
import json
import math

import pytest

from orthomean.cli import main
from orthomean.config import RunConfig, equilibrium_for, load_config, sigma_limit_for
from orthomean.errors import ConfigurationError
from orthomean.families import FamilySpec


def read(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_config_validation():
    with pytest.raises(ConfigurationError):
        RunConfig(n_list=[])
    with pytest.raises(ConfigurationError):
        RunConfig(n_list=[5, 5])
    with pytest.raises(ConfigurationError):
        RunConfig(L=13)
    with pytest.raises(ConfigurationError):
        RunConfig(bins=0)
    with pytest.raises(ConfigurationError):
        RunConfig.from_dict({"colour": 1})


def test_env_cap_allows_larger_L(monkeypatch):
    monkeypatch.setenv("ORTHOMEAN_MAX_L", "16")
    assert RunConfig(L=14).L == 14


def test_load_config_overrides(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"family": {"kind": "jacobi_shift",
                                        "params": {"lambda1": 0.0, "lambda2": 1.0}},
                             "method": {"method": "cesaro", "alpha": 2.0},
                             "n_list": [10, 20], "L": 4}))
    cfg = load_config(p, alpha=3.0, bins=7)
    assert cfg.family == FamilySpec("jacobi_shift", {"lambda1": 0.0, "lambda2": 1.0})
    assert cfg.method == {"method": "cesaro", "alpha": 3.0}
    assert (cfg.n_list, cfg.L, cfg.bins) == ([10, 20], 4, 7)
    cfg = load_config(p, family="constant")
    assert cfg.family.kind == "constant" and cfg.family.params == {}
    with pytest.raises(ConfigurationError):
        load_config(tmp_path / "missing.json")


def test_equilibrium_mapping():
    eq = equilibrium_for(load_config(None, family="constant"))
    assert eq.kind == "arcsine" and (eq.a, eq.b) == (0.0, 0.5)
    eq = equilibrium_for(load_config(None, method="cesaro", alpha=2.0))
    assert eq.alpha == 2.0
    eq = equilibrium_for(load_config(None, method="gegenbauer", nu=1.0))
    assert eq.alpha == 2.0
    assert equilibrium_for(load_config(None, method="legendre")).alpha == 1.0
    assert equilibrium_for(load_config(None, method="custom", sigma_file="x")) is None
    assert sigma_limit_for(load_config(None), 0, 2) == pytest.approx(1 / 6)


def test_moments_command(tmp_path, capsys):
    out = tmp_path / "m"
    rc = main(["moments", "--method", "cesaro", "--alpha", "1", "--n", "20", "40",
               "--L", "4", "--out", str(out)])
    assert rc == 0
    files = sorted(p.name for p in out.iterdir())
    assert len(files) == 6 and "moments_nu_40.csv" in files
    rows = read(out / "moments_lambda_40.csv")
    assert list(rows[0]) == ["l", "value", "equilibrium", "abs_gap"]
    assert float(rows[2]["equilibrium"]) == pytest.approx(1 / 3)


def test_moments_L0(tmp_path):
    assert main(["moments", "--L", "0", "--n", "5", "--out", str(tmp_path)]) == 0
    rows = read(tmp_path / "moments_mu_bar_5.csv")
    assert len(rows) == 1 and float(rows[0]["value"]) == pytest.approx(1.0, abs=1e-14)


def test_identity_constant_reduces_to_single_polynomial(tmp_path):
    from orthomean.spectral import local_moment
    main(["moments", "--family", "constant", "--method", "identity", "--n", "10", "--L", "4",
          "--out", str(tmp_path)])
    rows = read(tmp_path / "moments_mu_bar_10.csv")
    fam = FamilySpec("constant", {"lambda": 0.5}).build()
    for l in range(5):
        assert float(rows[l]["value"]) == pytest.approx(local_moment(fam, 0, 10, l), abs=1e-15)


def test_roots_hist_command(tmp_path, capsys):
    rc = main(["roots-hist", "--family", "constant", "--n", "30", "--bins", "1",
               "--out", str(tmp_path)])
    assert rc == 0
    rows = read(tmp_path / "hist_30.csv")
    assert len(rows) == 1 and float(rows[0]["weighted_mass"]) == pytest.approx(1.0, abs=1e-10)
    assert "n=30 ks=" in capsys.readouterr().out
    eq = read(tmp_path / "equilibrium.csv")
    assert len(eq) == 1001 and list(eq[0]) == ["x", "density"]


def test_hist_masses_sum_to_one(tmp_path):
    main(["roots-hist", "--method", "cesaro", "--alpha", "2", "--n", "40", "--out", str(tmp_path)])
    rows = read(tmp_path / "hist_40.csv")
    assert len(rows) == 50
    assert math.fsum(float(r["weighted_mass"]) for r in rows) == pytest.approx(1.0, abs=1e-10)


def test_sigma_table_command(tmp_path):
    main(["sigma-table", "--method", "cesaro", "--alpha", "1", "--n", "100", "--L", "4",
          "--out", str(tmp_path)])
    rows = read(tmp_path / "sigma.csv")
    for r in rows:
        assert int(r["l_b"]) % 2 == 0 and int(r["l_a"]) + int(r["l_b"]) <= 4
        if int(r["l_a"]) >= 1:
            assert float(r["partial"]) == 0.0 and float(r["closed_form"]) == 0.0
    r00 = next(r for r in rows if r["l_a"] == "0" and r["l_b"] == "0")
    assert float(r00["partial"]) == pytest.approx(1.0, abs=1e-12)
    assert float(r00["closed_form"]) == 1.0


def test_check_command_passes(tmp_path, capsys):
    assert main(["check", "--n", "10", "20", "--L", "6", "--out", str(tmp_path)]) == 0
    assert "0 failed" in capsys.readouterr().out


def test_check_reports_negative_sigma(tmp_path, capsys):
    p = tmp_path / "s.csv"
    p.write_text("k,sigma\n0,1\n1,-0.5\n2,1\n")
    rc = main(["check", "--method", "custom", "--sigma-file", str(p), "--n", "10"])
    assert rc == 1
    assert "(n=1, k=0)" in capsys.readouterr().out


def test_exit_codes(tmp_path, capsys):
    assert main(["check", "--lambda", "-0.6"]) == 2
    assert main(["moments", "--L", "20"]) == 2
    assert main(["moments", "--method", "custom", "--n", "3"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["moments", "--family", "hermite"])
    assert exc.value.code == 2


def test_moment_gaps_shrink_with_n(tmp_path):
    assert main(["moments", "--lambda", "0.5", "--method", "cesaro", "--alpha", "1",
                 "--n", "50", "100", "200", "--L", "8", "--out", str(tmp_path)]) == 0
    floor = 1e-12  # gaps below this are rounding noise
    for kind in ("mu_bar", "lambda", "nu"):
        gaps = [[float(r["abs_gap"]) for r in read(tmp_path / f"moments_{kind}_{n}.csv")]
                for n in (50, 100, 200)]
        for l in range(9):
            seq = [max(g[l], floor) for g in gaps]
            assert seq[0] >= seq[1] >= seq[2], (kind, l, seq)
