"""casilat command line: energy, force, pfa, flat, validate and plot."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
import time
from dataclasses import asdict
from pathlib import Path

from .config import RunConfig, load_config, parse_config
from .constants import CONSTANTS_VERSION, HBAR_C
from .energy import benchmark_spec, flat_plate_energy
from .errors import CasilatError, ConfigError
from .force import SphereSetup, pfa_sphere_curve
from .material import GOLD, SILICON, PerfectConductor
from .quad import QuadSpec
from .runner import PFA_HEADER, SweepPlan, _g, run_sweep

EXIT_OK, EXIT_INVALID, EXIT_NONCONVERGED = 0, 2, 3
FLAT_MATERIALS = {"perfect_conductor": PerfectConductor(), "gold": GOLD, "silicon": SILICON}

log = logging.getLogger("casilat")


def parse_b_grid(text: str) -> dict:
    """'start:stop:count', inclusive of both endpoints."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError("--b-grid", f"expected start:stop:count, got {text!r}")
    try:
        return {"start": float(parts[0]), "stop": float(parts[1]), "count": int(parts[2])}
    except ValueError:
        raise ConfigError("--b-grid", f"expected start:stop:count, got {text!r}") from None


def _floats(text: str, flag: str) -> list:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ConfigError(flag, f"expected comma-separated numbers, got {text!r}") from None


def build_config(args) -> RunConfig:
    """Config file first, command-line flags override."""
    if not args.config:
        raise ConfigError("--config", "a config file is required for this command")
    path = Path(args.config)
    try:
        d = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(str(path), f"invalid JSON: {exc}") from None
    if not isinstance(d, dict):
        raise ConfigError(str(path), "expected a JSON object")
    if args.b is not None:
        d.pop("b_grid", None)
        d["b"] = args.b
    if args.b_grid is not None:
        d.pop("b", None)
        d["b_grid"] = parse_b_grid(args.b_grid)
    if args.H is not None:
        d.pop("H_list_m", None)
        d["H_m"] = args.H
    if args.H_list is not None:
        d.pop("H_m", None)
        d["H_list_m"] = _floats(args.H_list, "--H-list")
    if args.tol_rel is not None:
        d.setdefault("quadrature", {})["rel_tol"] = args.tol_rel
    if args.threads is not None:
        d.setdefault("run", {})["threads"] = args.threads
    if args.out is not None or args.format is not None:
        o = d.setdefault("output", {})
        if args.out is not None:
            o["path"] = args.out
        if args.format is not None:
            o["format"] = args.format
    return parse_config(d, base_dir=path.parent)


def _emit(cfg: RunConfig, text_csv: str, rows_json: list, provenance: dict):
    if cfg.out_path is None:
        sys.stdout.write(text_csv if cfg.out_format == "csv" else
                         json.dumps({"rows": rows_json, **provenance}, indent=2) + "\n")
        return
    out = Path(cfg.out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    if cfg.out_format == "csv":
        out.write_text(text_csv, newline="\n")
    else:
        out.write_text(json.dumps({"rows": rows_json}, indent=2) + "\n", newline="\n")
    sidecar = out.with_name(out.name + ".meta.json")
    sidecar.write_text(json.dumps(provenance, indent=2, default=str) + "\n", newline="\n")
    log.info("wrote %s and %s", out, sidecar)


def _provenance(cfg: RunConfig, command: str, meta: dict, wall: float) -> dict:
    return {"command": command, "config": cfg.to_dict(), "constants_version": CONSTANTS_VERSION,
            "tolerances": {"rel_tol": cfg.rel_tol, "abs_tol": cfg.abs_tol,
                           "max_subdivisions": cfg.max_subdivisions},
            "wall_time_s": wall, "run": meta}


def cmd_sweep(cfg: RunConfig, kind: str) -> int:
    t0 = time.perf_counter()
    plan = SweepPlan(cfg.system(), cfg.b_values, cfg.H_list_m, cfg.spec, cfg.threads, kind,
                     cfg.cache_dir)
    table = run_sweep(plan)
    rows = [asdict(r) for r in table.rows]
    _emit(cfg, table.to_csv(), rows, _provenance(cfg, kind, table.metadata,
                                                 time.perf_counter() - t0))
    return EXIT_OK if all(r.converged for r in table.rows) else EXIT_NONCONVERGED


def cmd_pfa(cfg: RunConfig) -> int:
    if cfg.R_m is None:
        raise ConfigError("sphere", "the pfa command needs a sphere block with R_m")
    if len(cfg.H_list_m) != 1:
        raise ConfigError("H_list_m", "the pfa command takes a single closest separation H_m")
    t0 = time.perf_counter()
    setup = SphereSetup(cfg.system(), cfg.R_m, cfg.h_max_m)
    pts = pfa_sphere_curve(setup, cfg.b_values, cfg.spec, cfg.panel_order)
    lines = [PFA_HEADER] + [",".join([_g(p.b), _g(p.F), _g(p.err_est),
                                      "1" if p.converged else "0"]) for p in pts]
    meta = {"R_m": cfg.R_m, "h_max_m": setup.h_max}
    _emit(cfg, "\n".join(lines) + "\n", [asdict(p) for p in pts],
          _provenance(cfg, "pfa", meta, time.perf_counter() - t0))
    return EXIT_OK if all(p.converged for p in pts) else EXIT_NONCONVERGED


def cmd_flat(args) -> int:
    if args.config:
        cfg = build_config(args)
        m1, m2, hs = cfg.material1, cfg.material2, cfg.H_list_m
    else:
        if args.material not in FLAT_MATERIALS:
            raise ConfigError("--material", f"choose one of {sorted(FLAT_MATERIALS)}")
        m1 = m2 = FLAT_MATERIALS[args.material]
        hs = _floats(args.H_list, "--H-list") if args.H_list else [args.H or 1e-6]
        for h in hs:
            if not (h > 0 and math.isfinite(h)):
                raise ConfigError("--H", "must be positive")
    spec = benchmark_spec() if args.tol_rel is None else \
        QuadSpec(rel_tol=args.tol_rel, max_subdivisions=50)
    rows = []
    print("H_m,E_per_area_J_m2,err_est_J_m2,ratio_to_ideal_casimir")
    for H in hs:
        r = flat_plate_energy(m1, m2, H, spec)
        ideal = -math.pi**2 * HBAR_C / (720.0 * H**3)
        ratio = r.e_per_area / ideal
        rows.append({"H_m": H, "e_per_area": r.e_per_area, "err_est": r.err_est,
                     "ratio_to_ideal": ratio, "converged": r.converged})
        print(f"{_g(H)},{_g(r.e_per_area)},{_g(r.err_est)},{ratio:.6f}")
    if args.out:
        Path(args.out).write_text(json.dumps({"rows": rows}, indent=2) + "\n")
    return EXIT_OK if all(r["converged"] for r in rows) else EXIT_NONCONVERGED


# -- plotting -----------------------------------------------------------------

_KINDS = {
    "b,H_m,F_per_area_N_m2,err_est_N_m2,converged": ("F/A (N/m^2)", 1.0),
    "b,H_m,E_per_area_J_m2,err_est_J_m2,converged": ("E/A (J/m^2)", 1.0),
    "b,F_N,err_est_N,converged": ("F (pN)", 1e12),
}


def read_table(path) -> tuple[str, dict]:
    """Parse a table written by this tool into {H or None: [(b, y)]}."""
    text = Path(path).read_text()
    lines = text.splitlines()
    if not lines:
        raise ConfigError(f"{path}:1", "empty table")
    header = lines[0].strip()
    if header not in _KINDS:
        raise ConfigError(f"{path}:1", f"unrecognised header {header!r}")
    ncol = len(header.split(","))
    curves: dict = {}
    for i, row in enumerate(csv.reader(lines[1:]), start=2):
        if not row:
            continue
        if len(row) != ncol:
            raise ConfigError(f"{path}:{i}", f"expected {ncol} columns, got {len(row)}")
        try:
            vals = [float(v) for v in row]
        except ValueError:
            raise ConfigError(f"{path}:{i}", "non-numeric field") from None
        if ncol == 5:
            curves.setdefault(vals[1], []).append((vals[0], vals[2]))
        else:
            curves.setdefault(None, []).append((vals[0], vals[1]))
    if not curves:
        raise ConfigError(f"{path}:2", "table has no data rows")
    return header, curves


def plot_script(path) -> str:
    header, curves = read_table(path)
    ylabel, scale = _KINDS[header]
    out = [f"# gnuplot script generated by casilat from {Path(path).name}",
           "set xlabel 'b'", f"set ylabel '{ylabel}'", "set key top left", "set grid"]
    plots = []
    for n, (H, pts) in enumerate(sorted(curves.items(), key=lambda kv: (kv[0] is None, kv[0]))):
        out.append(f"$data{n} << EOD")
        out += [f"{b!r} {y * scale!r}" for b, y in sorted(pts)]
        out.append("EOD")
        title = "PFA sphere" if H is None else f"H = {H * 1e9:.4g} nm"
        plots.append(f"$data{n} using 1:2 with linespoints title '{title}'")
    out.append("plot " + ", \\\n     ".join(plots))
    return "\n".join(out) + "\n"


def cmd_plot(args) -> int:
    script = plot_script(args.table)
    if args.out:
        Path(args.out).write_text(script, newline="\n")
    else:
        sys.stdout.write(script)
    return EXIT_OK


def cmd_validate(args) -> int:
    from .validation import run_checks

    results = run_checks(quick=args.quick, only=args.only)
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="casilat", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON run configuration")
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--b", type=float, help="single displacement fraction")
        g.add_argument("--b-grid", help="start:stop:count, endpoints included")
        h = sp.add_mutually_exclusive_group()
        h.add_argument("--H", type=float, help="mean separation in m")
        h.add_argument("--H-list", help="comma-separated separations in m")
        sp.add_argument("--tol-rel", type=float)
        sp.add_argument("--threads", type=int)
        sp.add_argument("--out")
        sp.add_argument("--format", choices=["csv", "json"])

    for name in ("energy", "force", "pfa"):
        common(sub.add_parser(name, help=f"{name} sweep over b and H"))
    flat = sub.add_parser("flat", help="flat-plate benchmark energy")
    common(flat)
    flat.add_argument("--material", default="perfect_conductor",
                      help=f"one of {', '.join(sorted(FLAT_MATERIALS))}")
    val = sub.add_parser("validate", help="run the built-in acceptance checks")
    val.add_argument("--quick", action="store_true", help="skip the long figure checks")
    val.add_argument("--only", type=int, action="append", help="criterion number (repeatable)")
    pl = sub.add_parser("plot", help="gnuplot script from a result table")
    pl.add_argument("table")
    pl.add_argument("--out")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command in ("energy", "force"):
            return cmd_sweep(build_config(args), args.command)
        if args.command == "pfa":
            return cmd_pfa(build_config(args))
        if args.command == "flat":
            return cmd_flat(args)
        if args.command == "plot":
            return cmd_plot(args)
        return cmd_validate(args)
    except ConfigError as exc:
        print(f"casilat: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except CasilatError as exc:
        print(f"casilat: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
