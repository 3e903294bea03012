"""Run configuration: a single JSON document validated before any computation."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .geometry import PlateSystem, Profile, min_gap, profile_from_config, profile_to_config
from .material import DielectricModel, material_from_config, material_to_config
from .quad import QuadSpec

_TOP = {"material1", "material2", "profile1", "profile2", "lambda_m", "H_m", "H_list_m",
        "b", "b_grid", "quadrature", "sphere", "output", "run"}
_QUAD = {"rel_tol", "abs_tol", "max_subdivisions", "panel_order"}
_SPHERE = {"R_m", "h_max_m"}
_OUTPUT = {"path", "format"}
_RUN = {"threads", "cache_dir"}
_BGRID = {"start", "stop", "count"}


@dataclass(frozen=True)
class BGrid:
    start: float
    stop: float
    count: int

    def values(self) -> tuple:
        """Inclusive of both endpoints."""
        if self.count == 1:
            return (self.start,)
        return tuple(float(x) for x in np.linspace(self.start, self.stop, self.count))


@dataclass(frozen=True)
class RunConfig:
    material1: DielectricModel
    material2: DielectricModel
    profile1: Profile
    profile2: Profile
    lambda_m: float
    H_list_m: tuple
    b: float | None = 0.0
    b_grid: BGrid | None = None
    rel_tol: float = 1e-3
    abs_tol: float = 0.0
    max_subdivisions: int = 50
    panel_order: int = 15
    R_m: float | None = None
    h_max_m: float | None = None
    out_path: str | None = None
    out_format: str = "csv"
    threads: int = 1
    cache_dir: str | None = None
    single_H: bool = True  # remembers whether H_m or H_list_m was given

    @property
    def spec(self) -> QuadSpec:
        return QuadSpec(rel_tol=self.rel_tol, abs_tol=self.abs_tol,
                        max_subdivisions=self.max_subdivisions, panel_order=self.panel_order)

    @property
    def b_values(self) -> tuple:
        return self.b_grid.values() if self.b_grid is not None else (float(self.b),)

    def system(self, H: float | None = None, b: float = 0.0) -> PlateSystem:
        return PlateSystem(self.material1, self.material2, self.profile1, self.profile2,
                           self.lambda_m, self.H_list_m[0] if H is None else H, b)

    def to_dict(self) -> dict:
        d = {"material1": material_to_config(self.material1),
             "material2": material_to_config(self.material2),
             "profile1": profile_to_config(self.profile1),
             "profile2": profile_to_config(self.profile2),
             "lambda_m": self.lambda_m,
             "quadrature": {"rel_tol": self.rel_tol, "abs_tol": self.abs_tol,
                            "max_subdivisions": self.max_subdivisions,
                            "panel_order": self.panel_order},
             "output": {"path": self.out_path, "format": self.out_format},
             "run": {"threads": self.threads, "cache_dir": self.cache_dir}}
        if self.single_H:
            d["H_m"] = self.H_list_m[0]
        else:
            d["H_list_m"] = list(self.H_list_m)
        if self.b_grid is not None:
            d["b_grid"] = {"start": self.b_grid.start, "stop": self.b_grid.stop,
                           "count": self.b_grid.count}
        else:
            d["b"] = self.b
        if self.R_m is not None:
            d["sphere"] = {"R_m": self.R_m, "h_max_m": self.h_max_m}
        return d


def _check_keys(d, allowed, path):
    if not isinstance(d, dict):
        raise ConfigError(path, "expected an object")
    extra = set(d) - allowed
    if extra:
        raise ConfigError(f"{path}.{sorted(extra)[0]}" if path else sorted(extra)[0],
                          "unknown key")


def _pos(x, path, allow_none=False):
    if x is None and allow_none:
        return None
    try:
        v = float(x)
    except (TypeError, ValueError):
        raise ConfigError(path, f"expected a number, got {x!r}") from None
    if not (math.isfinite(v) and v > 0):
        raise ConfigError(path, f"must be positive and finite, got {x!r}")
    return v


def parse_config(d: dict, base_dir=None) -> RunConfig:
    """Validate a config dictionary; every error names the offending key path."""
    _check_keys(d, _TOP, "")
    for k in ("material1", "material2", "profile1", "profile2", "lambda_m"):
        if k not in d:
            raise ConfigError(k, "missing key")
    m1 = material_from_config(d["material1"], "material1", base_dir)
    m2 = material_from_config(d["material2"], "material2", base_dir)
    p1 = profile_from_config(d["profile1"], "profile1")
    p2 = profile_from_config(d["profile2"], "profile2")
    lam = _pos(d["lambda_m"], "lambda_m")
    if ("H_m" in d) == ("H_list_m" in d):
        raise ConfigError("H_m", "give exactly one of H_m or H_list_m")
    if "H_m" in d:
        hs, single = (_pos(d["H_m"], "H_m"),), True
    else:
        if not isinstance(d["H_list_m"], list) or not d["H_list_m"]:
            raise ConfigError("H_list_m", "expected a non-empty list")
        hs = tuple(_pos(h, f"H_list_m[{i}]") for i, h in enumerate(d["H_list_m"]))
        single = False
    if "b" in d and "b_grid" in d:
        raise ConfigError("b_grid", "give at most one of b or b_grid")
    b, grid = 0.0, None
    if "b_grid" in d:
        g = d["b_grid"]
        _check_keys(g, _BGRID, "b_grid")
        try:
            grid = BGrid(float(g["start"]), float(g["stop"]), int(g["count"]))
        except KeyError as exc:
            raise ConfigError(f"b_grid.{exc.args[0]}", "missing key") from None
        except (TypeError, ValueError) as exc:
            raise ConfigError("b_grid", str(exc)) from None
        if grid.count < 1 or not (math.isfinite(grid.start) and math.isfinite(grid.stop)):
            raise ConfigError("b_grid.count", "count must be >= 1 with finite endpoints")
        b = None
    elif "b" in d:
        try:
            b = float(d["b"])
        except (TypeError, ValueError):
            raise ConfigError("b", f"expected a number, got {d['b']!r}") from None
        if not math.isfinite(b):
            raise ConfigError("b", "must be finite")
    q = d.get("quadrature", {})
    _check_keys(q, _QUAD, "quadrature")
    rel = _pos(q.get("rel_tol", 1e-3), "quadrature.rel_tol")
    abs_tol = float(q.get("abs_tol", 0.0))
    if abs_tol < 0:
        raise ConfigError("quadrature.abs_tol", "must be non-negative")
    maxsub = int(q.get("max_subdivisions", 50))
    if maxsub < 1:
        raise ConfigError("quadrature.max_subdivisions", "must be >= 1")
    order = int(q.get("panel_order", 15))
    if order not in (15, 21):
        raise ConfigError("quadrature.panel_order", "must be 15 or 21")
    R = hmax = None
    if d.get("sphere") is not None:
        s = d["sphere"]
        _check_keys(s, _SPHERE, "sphere")
        R = _pos(s.get("R_m"), "sphere.R_m")
        hmax = _pos(s.get("h_max_m"), "sphere.h_max_m", allow_none=True)
    o = d.get("output", {})
    _check_keys(o, _OUTPUT, "output")
    fmt = o.get("format", "csv") or "csv"
    if fmt not in ("csv", "json"):
        raise ConfigError("output.format", f"must be csv or json, got {fmt!r}")
    r = d.get("run", {})
    _check_keys(r, _RUN, "run")
    threads = int(r.get("threads", 1))
    if threads < 1:
        raise ConfigError("run.threads", "must be >= 1")
    cfg = RunConfig(m1, m2, p1, p2, lam, hs, b, grid, rel, abs_tol, maxsub, order, R, hmax,
                    o.get("path"), fmt, threads, r.get("cache_dir"), single)
    for i, H in enumerate(hs):
        try:
            min_gap(cfg.system(H))
        except Exception as exc:
            raise ConfigError("H_m" if single else f"H_list_m[{i}]", str(exc)) from None
    if hmax is not None and not hmax > max(hs):
        raise ConfigError("sphere.h_max_m", "must exceed H")
    return cfg


def load_config(path) -> RunConfig:
    p = Path(path)
    try:
        d = json.loads(p.read_text())
    except OSError as exc:
        raise ConfigError(str(p), f"cannot read: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(str(p), f"invalid JSON: {exc}") from None
    return parse_config(d, base_dir=p.parent)
