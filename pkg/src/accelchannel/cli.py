"""Command-line front end: ``accelchannel run | list | cache-clear``.

Exit codes: 0 success, 2 configuration error, 3 some point failed to converge.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import pipeline as pl
from .cache import DiskCache
from .config import ScenarioConfig, load_config
from .errors import ConfigError
from .scenarios import PRESETS, list_scenarios, preset

EXIT_OK, EXIT_CONFIG, EXIT_CONVERGENCE = 0, 2, 3


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "%.16e" % v if math.isfinite(v) else str(v)
    if isinstance(v, int):
        return str(v)
    return str(v)


def write_csv(rows: list[dict], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".part")
    with open(tmp, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(pl.COLUMNS)
        for row in rows:
            w.writerow([format_value(row[c]) for c in pl.COLUMNS])
    tmp.replace(path)


# ---------------------------------------------------------------- workers

_worker_cache = None


def _open_cache(root):
    return DiskCache(root) if root is not None else None


def _mode_payload(args):
    setup, root = args
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            return pl.mode_data(setup, _open_cache(root)).to_payload()
        except Exception:  # the point evaluation reports the error in its row
            return None


def _init_worker(payloads, root):
    global _worker_cache
    _worker_cache = _open_cache(root)
    for raw in payloads:
        if raw is not None:
            d = pl.ModeData.from_payload(raw)
            with pl._memo_lock:
                pl._memo[d.setup] = d


def _point_row(point):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return pl.evaluate_row(point, _worker_cache)


def run_points(points: list, workers: int = 1, cache_root=None) -> list[dict]:
    """Evaluate all points; mode data first (one job per distinct mode), then the points."""
    setups = []
    for p in points:
        for s in (p.mode_I, p.mode_II):
            if s not in setups:
                setups.append(s)
    if workers <= 1:
        payloads = [_mode_payload((s, cache_root)) for s in setups]
        _init_worker(payloads, cache_root)
        return [_point_row(p) for p in points]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        payloads = list(ex.map(_mode_payload, [(s, cache_root) for s in setups]))
    with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker,
                             initargs=(payloads, cache_root)) as ex:
        return list(ex.map(_point_row, points, chunksize=max(1, len(points) // (4 * workers))))


# ---------------------------------------------------------------- commands

def _resolve_config(args) -> ScenarioConfig | None:
    base = preset(args.scenario) if getattr(args, "scenario", None) else None
    if getattr(args, "config", None):
        path = Path(args.config)
        try:
            text = path.read_text()
        except OSError as err:
            raise ConfigError(str(path), f"cannot read config: {err.strerror}") from None
        return load_config(text, source=str(path), base=base)
    return base


def cmd_run(args) -> int:
    cfg = _resolve_config(args)
    if cfg is None:
        raise ConfigError("--scenario", "give --scenario NAME or --config PATH")
    points = cfg.points()
    out_dir = Path(args.out or (Path(cfg.output_path).parent if cfg.output_path else "."))
    name = Path(cfg.output_path).name if (cfg.output_path and not args.out) else f"{cfg.name}.csv"
    root = None
    if not args.no_cache:
        root = DiskCache(cfg.cache_dir).root
    t0 = time.time()
    rows = run_points(points, max(1, args.workers), root)
    path = out_dir / name
    write_csv(rows, path)
    bad = [i for i, r in enumerate(rows) if r["status"] != "ok"]
    print(f"{cfg.name}: {len(rows)} points -> {path} ({time.time() - t0:.1f} s)", file=sys.stderr)
    for i in bad:
        print(f"  row {i}: {rows[i]['status']}", file=sys.stderr)
    return EXIT_CONVERGENCE if bad else EXIT_OK


def cmd_list(args) -> int:
    custom = None
    if args.config:
        custom = _resolve_config(args)
    sys.stdout.write(list_scenarios(custom))
    return EXIT_OK


def cmd_cache_clear(args) -> int:
    root = None
    if args.config:
        root = _resolve_config(args).cache_dir
    cache = DiskCache(root)
    n = cache.clear()
    print(f"removed {n} entries from {cache.root}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="accelchannel",
                                 description="Gaussian channels seen by uniformly accelerated wave packets.")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="evaluate a scenario and write a CSV")
    run.add_argument("--scenario", choices=sorted(PRESETS), help="built-in preset")
    run.add_argument("--config", help="scenario config file (applied on top of --scenario)")
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--no-cache", action="store_true")
    run.add_argument("--out", help="output directory")
    run.set_defaults(func=cmd_run)
    ls = sub.add_parser("list", help="list the presets")
    ls.add_argument("--config", help="also list this custom scenario")
    ls.set_defaults(func=cmd_list, scenario=None)
    cc = sub.add_parser("cache-clear", help="delete cached results")
    cc.add_argument("--config", help="use the cache_dir of this config")
    cc.set_defaults(func=cmd_cache_clear, scenario=None)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
