"""Run configuration and the family/method -> limit measure mapping."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .equilibrium import (EquilibriumMeasure, arcsine_measure, gegenbauer_equilibrium,
                          sigma_closed_form)
from .errors import ConfigurationError
from .families import CoefficientFamily, FamilySpec
from .means import max_path_length
from .summation import NorlundMethod, method_from_spec

__all__ = ["RunConfig", "load_config", "equilibrium_for", "sigma_limit_for"]

_METHOD_KEYS = ("method", "alpha", "nu", "sigma", "sigma_file")


@dataclass
class RunConfig:
    family: FamilySpec = field(default_factory=lambda: FamilySpec("ultraspherical", {"lambda": 0.5}))
    method: dict[str, Any] = field(default_factory=lambda: {"method": "arithmetic"})
    n_list: list[int] = field(default_factory=lambda: [50, 100, 200])
    L: int = 8
    output: str = "out"
    bins: int = 50

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if not self.n_list:
            raise ConfigurationError("n_list must be nonempty")
        if any(not isinstance(n, int) or n < 0 for n in self.n_list):
            raise ConfigurationError(f"n_list entries must be nonnegative integers: {self.n_list}")
        if any(b <= a for a, b in zip(self.n_list, self.n_list[1:])):
            raise ConfigurationError(f"n_list must be strictly ascending: {self.n_list}")
        if not isinstance(self.L, int) or self.L < 0:
            raise ConfigurationError(f"L must be a nonnegative integer, got {self.L!r}")
        cap = max_path_length()
        if self.L > cap:
            raise ConfigurationError(f"L = {self.L} exceeds the path cap {cap} (ORTHOMEAN_MAX_L)")
        if not isinstance(self.bins, int) or self.bins < 1:
            raise ConfigurationError(f"bins must be >= 1, got {self.bins!r}")
        if self.method.get("method", "arithmetic") not in (
                "cesaro", "gegenbauer", "legendre", "arithmetic", "identity", "custom"):
            raise ConfigurationError(f"unknown summation method {self.method.get('method')!r}")

    @property
    def n_max(self) -> int:
        return max(self.n_list)

    def build_family(self, n_max: int | None = None) -> CoefficientFamily:
        n = self.n_max if n_max is None else n_max
        return self.family.build(size=max(512, n + self.L + 2))

    def build_method(self, n_max: int | None = None) -> NorlundMethod:
        n = self.n_max if n_max is None else n_max
        return method_from_spec(self.method, n_max=max(256, n))

    def to_dict(self) -> dict[str, Any]:
        return {"family": self.family.to_dict(), "method": dict(self.method),
                "n_list": list(self.n_list), "L": self.L, "output": self.output,
                "bins": self.bins}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "RunConfig":
        if not isinstance(d, dict):
            raise ConfigurationError("config must be a JSON object")
        unknown = set(d) - {"family", "method", "n_list", "L", "output", "bins"}
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        kw: dict[str, Any] = {}
        if "family" in d:
            kw["family"] = FamilySpec.from_dict(d["family"])
        if "method" in d:
            m = d["method"]
            kw["method"] = {"method": m} if isinstance(m, str) else dict(m)
        for key in ("n_list", "L", "output", "bins"):
            if key in d:
                kw[key] = d[key]
        return cls(**kw)


def load_config(path: str | Path | None = None, **overrides: Any) -> RunConfig:
    """Read a JSON config (if given) and apply non-None overrides.

    Override keys: ``family``, ``lambda``, ``lambda1``, ``lambda2``, ``table``,
    ``mass``, ``method``, ``alpha``, ``nu``, ``sigma_file``, ``n_list``, ``L``,
    ``output``, ``bins``.
    """
    data: dict[str, Any] = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config {path} is not valid JSON: {exc}") from exc
    ov = {k: v for k, v in overrides.items() if v is not None}

    fam = dict(data.get("family") or {"kind": "ultraspherical", "params": {}})
    params = dict(fam.get("params") or {})
    if "family" in ov and ov["family"] != fam.get("kind"):
        fam["kind"] = ov["family"]
        params = {}
    for key, dest in (("lambda", "lambda"), ("lambda1", "lambda1"), ("lambda2", "lambda2"),
                      ("table", "path"), ("mass", "mass")):
        if key in ov:
            params[dest] = ov[key]
    fam["params"] = params
    data["family"] = fam

    meth = data.get("method") or {"method": "arithmetic"}
    meth = {"method": meth} if isinstance(meth, str) else dict(meth)
    if "method" in ov and ov["method"] != meth.get("method"):
        meth = {"method": ov["method"]}
    for key in _METHOD_KEYS[1:]:
        if key in ov:
            meth[key] = ov[key]
    data["method"] = meth

    for key in ("n_list", "L", "output", "bins"):
        if key in ov:
            data[key] = ov[key]
    return RunConfig.from_dict(data)


def equilibrium_for(cfg: RunConfig) -> EquilibriumMeasure | None:
    """Limit measure of the configured means, or None when no closed form is known."""
    limits = cfg.family.limits()
    if limits is not None:
        return arcsine_measure(*limits)
    kind = cfg.method.get("method", "arithmetic")
    if kind == "cesaro":
        return gegenbauer_equilibrium(float(cfg.method.get("alpha", 1.0)))
    if kind == "gegenbauer":
        return gegenbauer_equilibrium(2 * float(cfg.method.get("nu", 0.5)))
    if kind in ("arithmetic", "legendre"):
        return gegenbauer_equilibrium(1.0)
    if kind == "identity":
        # the k = 0 measure alone: its coefficients tend to (0, 1/2)
        return arcsine_measure(0.0, 0.5)
    return None


def sigma_limit_for(cfg: RunConfig, l_a: int, l_b: int) -> float | None:
    """Closed-form ``Sigma_{l_a, l_b}`` for the configured pair, or None."""
    limits = cfg.family.limits()
    if limits is not None:
        return sigma_closed_form("uniform_nevai", l_a, l_b, a=limits[0], b=limits[1])
    kind = cfg.method.get("method", "arithmetic")
    if kind == "cesaro":
        return sigma_closed_form("cesaro", l_a, l_b, alpha=float(cfg.method.get("alpha", 1.0)))
    if kind == "gegenbauer":
        return sigma_closed_form("gegenbauer", l_a, l_b, nu=float(cfg.method.get("nu", 0.5)))
    if kind in ("arithmetic", "legendre"):
        return sigma_closed_form(kind, l_a, l_b)
    if kind == "identity":
        return sigma_closed_form("uniform_nevai", l_a, l_b, a=0.0, b=0.5)
    return None
