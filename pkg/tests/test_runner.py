import json
import warnings

import pytest

from casilat.errors import GeometryOverlapError
from casilat.geometry import PlateSystem, Sinusoid
from casilat.material import GOLD, Plasma
from casilat.quad import QuadSpec
from casilat.runner import FORCE_HEADER, Cache, SweepPlan, point_key, run_sweep

SPEC = QuadSpec(rel_tol=1e-3, max_subdivisions=50)


def template(omega_p=1.3e16):
    m = Plasma(omega_p)
    return PlateSystem(m, m, Sinusoid(60e-9), Sinusoid(40e-9), 500e-9, 150e-9)


def plan(**kw):
    base = dict(system=template(), b_grid=(0.0, 0.1, 0.2, 0.3), h_list=(150e-9, 160e-9, 170e-9),
                spec=SPEC, workers=1)
    base.update(kw)
    return SweepPlan(**base)


def test_worker_count_does_not_change_table():
    a = run_sweep(plan(workers=1))
    b = run_sweep(plan(workers=4, b_grid=(0.3, 0.2, 0.1, 0.0), h_list=(170e-9, 150e-9, 160e-9)))
    assert a.to_csv() == b.to_csv()
    assert len(a.rows) == 12
    assert [(r.H, r.b) for r in a.rows] == sorted((r.H, r.b) for r in a.rows)
    assert a.metadata["config_hash"] == b.metadata["config_hash"]


def test_csv_format():
    t = run_sweep(plan(h_list=(150e-9,), b_grid=(0.0, 0.25)))
    text = t.to_csv()
    lines = text.split("\n")
    assert lines[0] == FORCE_HEADER
    assert text.endswith("\n") and "\r" not in text
    fields = lines[2].split(",")
    assert fields[0] == "0.25" and fields[4] in ("0", "1")
    assert float(fields[2]) == t.rows[1].f_per_area  # 17 digits round-trip exactly


def test_overlap_rejected_before_computing():
    with pytest.raises(GeometryOverlapError):
        plan(h_list=(150e-9, 90e-9))
    with pytest.raises(ValueError):
        plan(b_grid=())


def test_energy_kind():
    t = run_sweep(plan(kind="energy", h_list=(150e-9,), b_grid=(0.0, 0.5)))
    assert t.to_csv().startswith("b,H_m,E_per_area_J_m2,err_est_J_m2,converged\n")
    assert t.rows[1].f_per_area < t.rows[0].f_per_area < 0


def test_point_failure_is_recorded(monkeypatch):
    import casilat.runner as runner

    real = runner.lateral_force_per_area

    def flaky(system, b, spec):
        if b == 0.1:
            raise FloatingPointError("boom")
        return real(system, b, spec)

    monkeypatch.setattr(runner, "lateral_force_per_area", flaky)
    t = run_sweep(plan(h_list=(150e-9,), b_grid=(0.0, 0.1, 0.2)))
    assert len(t.rows) == 3
    assert not t.rows[1].converged
    assert "boom" in next(iter(t.metadata["failures"].values()))
    assert t.rows[0].converged and t.rows[2].converged


def test_cache_hits_and_keys(tmp_path):
    p = plan(h_list=(150e-9,), b_grid=(0.0, 0.2), cache_dir=str(tmp_path))
    first = run_sweep(p)
    assert first.metadata["computed_points"] == 2
    assert len(list(tmp_path.glob("*.json"))) == 2
    second = run_sweep(p)
    assert second.metadata["computed_points"] == 0
    assert second.to_csv() == first.to_csv()
    tighter = SweepPlan(p.system, p.b_grid, p.h_list, QuadSpec(rel_tol=1e-4), cache_dir=str(tmp_path))
    assert run_sweep(tighter).metadata["computed_points"] == 2
    other = SweepPlan(template(1.2e16), p.b_grid, p.h_list, SPEC, cache_dir=str(tmp_path))
    assert run_sweep(other).metadata["computed_points"] == 2


def test_corrupt_cache_entry_recomputed(tmp_path):
    p = plan(h_list=(150e-9,), b_grid=(0.2,), cache_dir=str(tmp_path))
    first = run_sweep(p)
    key = point_key("force", p.system, 0.2, 150e-9, SPEC)
    (tmp_path / f"{key}.json").write_text("{not json")
    with pytest.warns(RuntimeWarning, match="corrupt"):
        again = run_sweep(p)
    assert again.metadata["computed_points"] == 1
    assert again.to_csv() == first.to_csv()
    assert json.loads((tmp_path / f"{key}.json").read_text())["b"] == 0.2


def test_cache_lookup_miss(tmp_path):
    assert Cache(tmp_path).lookup("0" * 64) is None
