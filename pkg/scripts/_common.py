"""Shared helpers for the figure scripts: run a config through the sweep runner
and leave a CSV, a provenance sidecar and a gnuplot script under results/."""
import argparse
import json
import sys
from pathlib import Path

from casilat.cli import plot_script
from casilat.config import load_config
from casilat.runner import SweepPlan, run_sweep

ROOT = Path(__file__).resolve().parents[1]


def parser(doc, default_config):
    p = argparse.ArgumentParser(description=doc)
    p.add_argument("--config", default=str(ROOT / "configs" / default_config))
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--count", type=int, help="override the number of b points")
    p.add_argument("--outdir", default=str(ROOT / "results"))
    p.add_argument("--cache", default=str(ROOT / "results" / "cache"))
    return p


def sweep(args, stem, kind="force"):
    cfg = load_config(args.config)
    b = cfg.b_values
    if args.count:
        from numpy import linspace
        b = tuple(float(x) for x in linspace(b[0], b[-1], args.count))
    plan = SweepPlan(cfg.system(), b, cfg.H_list_m, cfg.spec, args.threads, kind, args.cache)
    table = run_sweep(plan)
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    csv = out / f"{stem}.csv"
    table.write_csv(csv)
    (out / f"{stem}.csv.meta.json").write_text(
        json.dumps({"config": cfg.to_dict(), "run": table.metadata}, indent=2) + "\n")
    (out / f"{stem}.gp").write_text(plot_script(csv))
    bad = [r for r in table.rows if not r.converged]
    print(f"wrote {csv} ({len(table.rows)} rows, {len(bad)} not converged, "
          f"{table.metadata['wall_time_s']:.1f} s)", file=sys.stderr)
    return table
