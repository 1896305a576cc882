import csv
import math
from pathlib import Path

import pytest

from accelchannel import cli
from accelchannel import pipeline as pl
from accelchannel.cache import ENV_VAR, DiskCache, default_cache_dir, make_key
from accelchannel.config import load_config
from accelchannel.errors import ConfigError

ROOT = Path(__file__).resolve().parents[1]

SMALL = """
[scenario]
name = custom
description = short D sweep
[modes]
accel = 0.1
[sweep.D]
values = 0, 5, 7
"""


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture
def isolated_cache(tmp_path, monkeypatch):
    root = tmp_path / "cache"
    monkeypatch.setenv(ENV_VAR, str(root))
    return root


# ---------------------------------------------------------------- cache

def test_cache_put_get(tmp_path):
    c = DiskCache(tmp_path)
    key = make_key("x", {"a": 1}, "v1")
    assert c.get(key) is None
    c.put(key, b"payload \x00\x01")
    assert c.get(key) == b"payload \x00\x01"


def test_key_depends_on_every_field():
    p = pl.ScenarioPoint(pl.ModeSetup(0.1), pl.ModeSetup(0.1))
    q = pl.ScenarioPoint(pl.ModeSetup(0.1), pl.ModeSetup(0.1), rel_tol=1e-4)
    assert p.key() == pl.ScenarioPoint(pl.ModeSetup(0.1), pl.ModeSetup(0.1)).key()
    assert p.key() != q.key()
    assert pl.ModeSetup(0.1).key() != pl.ModeSetup(0.1, wavenumber=5.1).key()
    assert make_key("x", {"a": 1}, "v1") != make_key("x", {"a": 1}, "v2")


def test_changed_tolerance_misses(tmp_path):
    c = DiskCache(tmp_path)
    c.put(make_key("point", {"tol": 1e-3}, "v"), b"1")
    assert c.get(make_key("point", {"tol": 1e-4}, "v")) is None


def test_corrupt_entry_is_a_miss(tmp_path):
    c = DiskCache(tmp_path)
    key = make_key("x", {}, "v")
    c.put(key, b"good data")
    path = c._path(key)
    raw = path.read_bytes()
    path.write_bytes(raw[:-1] + b"X")
    assert c.get(key) is None
    path.write_bytes(b"garbage")
    assert c.get(key) is None
    c.put(key, b"good data")
    assert c.get(key) == b"good data"


def test_clear_only_removes_entries(tmp_path):
    c = DiskCache(tmp_path)
    for i in range(3):
        c.put(make_key("x", {"i": i}, "v"), b"1")
    keep = tmp_path / "notes.txt"
    keep.write_text("mine")
    assert c.clear() == 3
    assert keep.exists()
    assert c.get(make_key("x", {"i": 0}, "v")) is None


def test_unwritable_cache_degrades(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    c = DiskCache(blocker / "sub")
    with pytest.warns(UserWarning):
        c.put(make_key("x", {}, "v"), b"1")
    assert c.get(make_key("x", {}, "v")) is None


def test_env_var_sets_default(isolated_cache):
    assert default_cache_dir() == isolated_cache


# ---------------------------------------------------------------- config

def test_config_errors_name_the_field():
    cases = {
        "[modes]\naccel = -1\n": "modes.accel",
        "[geometry]\norientation = sideways\n": "geometry.orientation",
        "[sweep.bogus]\nvalues = 1\n": "sweep.bogus",
        "[sweep.D]\nmin = 0\nmax = 1\npoints = 0\n": "sweep.D.points",
        "[modes]\nspeed = 3\n": "modes.speed",
        "[output]\nlog_base = 10\n": "output.log_base",
    }
    for text, path in cases.items():
        with pytest.raises(ConfigError) as err:
            load_config(text)
        assert err.value.path.startswith(path), (text, err.value.path)


def test_config_points_order_and_separation():
    cfg = load_config("[geometry]\nseparation = 20\n[sweep.accel]\nvalues = 0.1, 0.2\n[sweep.r]\nvalues = 0, 1\n"
                      "[input]\nstate = squeezed_thermal\n")
    pts = cfg.points()
    assert [(p.mode_I.accel, p.r) for p in pts] == [(0.1, 0), (0.1, 1), (0.2, 0), (0.2, 1)]
    assert pts[0].D == pytest.approx(0.0) and pts[2].D == pytest.approx(10.0)


def test_log_sweep_axis():
    cfg = load_config("[sweep.n]\nmin = 0.01\nmax = 1\npoints = 3\nscale = log\n[input]\nstate = squeezed_thermal\n")
    assert [p.n for p in cfg.points()] == pytest.approx([0.01, 0.1, 1.0])


def test_cli_exit_code_on_bad_config(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("[modes]\nL = zero\n")
    assert cli.main(["run", "--config", str(bad), "--out", str(tmp_path)]) == cli.EXIT_CONFIG
    assert "modes.L" in capsys.readouterr().err
    assert cli.main(["run", "--config", str(tmp_path / "missing.cfg")]) == cli.EXIT_CONFIG


# ---------------------------------------------------------------- list

def test_list(tmp_path, capsys):
    assert cli.main(["list"]) == 0
    out = capsys.readouterr().out
    lines = {ln.split("\t")[0]: ln for ln in out.splitlines()}
    assert "0.985" in lines["fig8"]
    assert "D=[-5..30]" in lines["fig6"]
    assert "custom" not in lines
    cfg = tmp_path / "c.cfg"
    cfg.write_text(SMALL)
    cli.main(["list", "--config", str(cfg)])
    assert "custom\t-\tD=[0..7]x3\tshort D sweep" in capsys.readouterr().out


# ---------------------------------------------------------------- run

def test_run_small_reproducible(tmp_path, isolated_cache):
    cfg = tmp_path / "small.cfg"
    cfg.write_text(SMALL)
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    assert cli.main(["run", "--config", str(cfg), "--out", str(a), "--no-cache"]) == 0
    assert cli.main(["run", "--config", str(cfg), "--out", str(b), "--no-cache"]) == 0
    assert (a / "custom.csv").read_bytes() == (b / "custom.csv").read_bytes()
    rows = read_csv(a / "custom.csv")
    assert [float(r["D"]) for r in rows] == [0, 5, 7]
    assert list(rows[0]) == pl.COLUMNS
    assert all(r["status"] == "ok" for r in rows)
    assert float(rows[0]["log_negativity"]) > 0 and float(rows[2]["log_negativity"]) == 0
    assert float(rows[0]["fidelity"]) == pytest.approx(1.0, abs=1e-6)

    # cache transparency: a cold and a warm cached run agree with the uncached one
    for _ in range(2):
        assert cli.main(["run", "--config", str(cfg), "--out", str(c)]) == 0
        for r0, r1 in zip(rows, read_csv(c / "custom.csv")):
            for col in pl.COLUMNS:
                if col in ("orientation", "mode_kind", "status", "converged", "bound_ok"):
                    assert r0[col] == r1[col]
                else:
                    x, y = float(r0[col]), float(r1[col])
                    assert (math.isnan(x) and math.isnan(y)) or abs(x - y) <= 1e-12 * max(1, abs(x))
    assert any(isolated_cache.rglob("*.bin"))
    assert cli.main(["cache-clear"]) == 0
    assert not any(isolated_cache.rglob("*.bin"))


def test_worker_count_independence(tmp_path, isolated_cache):
    cfg = tmp_path / "small.cfg"
    cfg.write_text(SMALL)
    for w in ("1", "2"):
        assert cli.main(["run", "--config", str(cfg), "--out", str(tmp_path / w), "--workers", w, "--no-cache"]) == 0
    assert (tmp_path / "1" / "custom.csv").read_bytes() == (tmp_path / "2" / "custom.csv").read_bytes()


def test_parallel_example_has_no_entanglement(tmp_path, isolated_cache):
    assert cli.main(["run", "--config", str(ROOT / "scenarios" / "parallel.cfg"), "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "custom.csv")
    assert len(rows) == 3
    assert all(float(r["log_negativity"]) == 0 for r in rows)
    assert all(r["orientation"] == "parallel" for r in rows)


def test_convergence_failure_exit_code(tmp_path, monkeypatch):
    def fail(point, cache=None):
        row = {c: math.nan for c in pl.COLUMNS}
        row.update(status="not converged", converged=False, orientation="counter", mode_kind="passive")
        return row

    monkeypatch.setattr(pl, "evaluate_row", fail)
    cfg = tmp_path / "small.cfg"
    cfg.write_text(SMALL)
    assert cli.main(["run", "--config", str(cfg), "--out", str(tmp_path), "--no-cache"]) == cli.EXIT_CONVERGENCE
    rows = read_csv(tmp_path / "custom.csv")
    assert len(rows) == 3 and rows[0]["status"] == "not converged"
