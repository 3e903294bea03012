"""Deterministic (b, H) sweeps over a process pool, with a content-addressed cache."""
from __future__ import annotations

import hashlib
import json
import logging
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .constants import CONSTANTS_VERSION
from .energy import energy_per_area
from .force import ForcePoint, lateral_force_per_area
from .geometry import PlateSystem, min_gap, profile_to_config
from .material import material_to_config
from .quad import QuadSpec

log = logging.getLogger(__name__)

FORCE_HEADER = "b,H_m,F_per_area_N_m2,err_est_N_m2,converged"
ENERGY_HEADER = "b,H_m,E_per_area_J_m2,err_est_J_m2,converged"
PFA_HEADER = "b,F_N,err_est_N,converged"
CODE_VERSION = "0.1.0"


def system_config(system: PlateSystem) -> dict:
    return {"material1": material_to_config(system.material1),
            "material2": material_to_config(system.material2),
            "profile1": profile_to_config(system.profile1),
            "profile2": profile_to_config(system.profile2),
            "lambda_m": system.lam}


def spec_config(spec: QuadSpec) -> dict:
    return {"rel_tol": spec.rel_tol, "abs_tol": spec.abs_tol,
            "max_subdivisions": spec.max_subdivisions, "panel_order": spec.panel_order}


def canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(system: PlateSystem, spec: QuadSpec) -> str:
    return hashlib.sha256(canonical({"system": system_config(system),
                                     "spec": spec_config(spec)}).encode()).hexdigest()


def point_key(kind: str, system: PlateSystem, b: float, H: float, spec: QuadSpec) -> str:
    payload = {"kind": kind, "system": system_config(system), "b": repr(float(b)),
               "H": repr(float(H)), "spec": spec_config(spec), "version": CODE_VERSION,
               "constants": CONSTANTS_VERSION}
    return hashlib.sha256(canonical(payload).encode()).hexdigest()


class Cache:
    """One JSON document per key under ``root``; exact-key hits only."""

    def __init__(self, root):
        self.root = Path(root)

    def _path(self, key):
        return self.root / f"{key}.json"

    def lookup(self, key):
        p = self._path(key)
        if not p.exists():
            return None
        try:
            d = json.loads(p.read_text())
            return ForcePoint(**d)
        except (ValueError, TypeError) as exc:
            warnings.warn(f"ignoring corrupt cache entry {p.name}: {exc}", RuntimeWarning)
            return None

    def store(self, key, point: ForcePoint):
        self.root.mkdir(parents=True, exist_ok=True)
        tmp = self._path(key).with_suffix(".tmp")
        tmp.write_text(json.dumps(asdict(point)))
        tmp.replace(self._path(key))


@dataclass(frozen=True)
class SweepPlan:
    system: PlateSystem  # template; b and H are overridden per point
    b_grid: tuple
    h_list: tuple
    spec: QuadSpec
    workers: int = 1
    kind: str = "force"  # "force" or "energy"
    cache_dir: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "b_grid", tuple(float(b) for b in self.b_grid))
        object.__setattr__(self, "h_list", tuple(float(h) for h in self.h_list))
        if not self.b_grid or not self.h_list:
            raise ValueError("sweep grids must be non-empty")
        if self.kind not in ("force", "energy"):
            raise ValueError(f"unknown sweep kind {self.kind!r}")
        for H in self.h_list:
            min_gap(self.system.with_(H=H))


@dataclass
class SweepTable:
    rows: list
    kind: str = "force"
    metadata: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        header = FORCE_HEADER if self.kind == "force" else ENERGY_HEADER
        lines = [header]
        for r in self.rows:
            lines.append(",".join([_g(r.b), _g(r.H), _g(r.f_per_area), _g(r.err_est),
                                   "1" if r.converged else "0"]))
        return "\n".join(lines) + "\n"

    def write_csv(self, path):
        Path(path).write_text(self.to_csv(), newline="\n")


def _g(x) -> str:
    """17 significant digits, '.' decimal separator regardless of locale."""
    return "%.17g" % float(x) if math.isfinite(x) else "nan"


def _point(kind, system, b, H, spec):
    sysm = system.with_(H=H, b=b)
    t0 = time.perf_counter()
    try:
        if kind == "force":
            p = lateral_force_per_area(sysm, b, spec)
        else:
            e = energy_per_area(sysm, spec)
            p = ForcePoint(b, H, e.e_per_area, e.err_est, e.converged)
        return p, time.perf_counter() - t0, None
    except Exception as exc:  # a single bad point never aborts the sweep
        return ForcePoint(b, H, float("nan"), float("nan"), False, False), \
            time.perf_counter() - t0, f"{type(exc).__name__}: {exc}"


def _task(args):
    return _point(*args)


def run_sweep(plan: SweepPlan) -> SweepTable:
    t0 = time.perf_counter()
    cache = Cache(plan.cache_dir) if plan.cache_dir else None
    pts = sorted((H, b) for H in plan.h_list for b in plan.b_grid)
    results = {}
    todo = []
    for H, b in pts:
        if cache is not None:
            hit = cache.lookup(point_key(plan.kind, plan.system, b, H, plan.spec))
            if hit is not None:
                results[(H, b)] = (hit, 0.0, None)
                continue
        todo.append((H, b))
    args = [(plan.kind, plan.system, b, H, plan.spec) for H, b in todo]
    if plan.workers > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=plan.workers) as ex:
            out = list(ex.map(_task, args, chunksize=max(1, len(args) // (4 * plan.workers))))
    else:
        out = [_task(a) for a in args]
    for (H, b), res in zip(todo, out):
        results[(H, b)] = res
        if cache is not None and res[2] is None:
            cache.store(point_key(plan.kind, plan.system, b, H, plan.spec), res[0])
    rows = [results[k][0] for k in pts]
    failures = {f"{b!r}@{H!r}": results[(H, b)][2] for H, b in pts if results[(H, b)][2]}
    for k, msg in failures.items():
        log.warning("point %s failed: %s", k, msg)
    meta = {
        "config_hash": config_hash(plan.system, plan.spec),
        "tolerances": spec_config(plan.spec),
        "constants_version": CONSTANTS_VERSION,
        "code_version": CODE_VERSION,
        "kind": plan.kind,
        "computed_points": len(todo),
        "cached_points": len(pts) - len(todo),
        "failures": failures,
        "point_wall_time_s": [results[k][1] for k in pts],
        "wall_time_s": time.perf_counter() - t0,
    }
    return SweepTable(rows, plan.kind, meta)
