"""Scenario configuration: a small line-based ``[section]`` / ``key = value`` format.

Example::

    [scenario]
    name = custom

    [geometry]
    orientation = parallel
    D = 0

    [modes]
    kind = passive
    accel_I = 0.0333333333333
    accel_II = 0.1

    [sweep.D]
    min = 0
    max = 5
    points = 3

Sections may be repeated only for ``sweep.<axis>``; the order of the sweep
sections fixes the loop order (first section = outermost loop).  Lines whose
first non-blank character is ``#`` or ``;`` are comments.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError
from .pipeline import ModeSetup, ScenarioPoint

SCENARIOS = ("fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig12", "custom")

# axis name -> which parameter it drives
AXES = ("accel", "accel_I", "accel_II", "D", "L", "Omega0", "wavenumber", "r", "n")

_KNOWN = {
    "scenario": {"name", "description", "figure", "note"},
    "geometry": {"orientation", "D", "separation"},
    "modes": {"kind", "accel", "accel_I", "accel_II", "L", "wavenumber", "Omega0", "mass", "a_conv"},
    "modes.I": {"L", "wavenumber", "Omega0", "mass"},
    "modes.II": {"L", "wavenumber", "Omega0", "mass"},
    "input": {"state", "r", "n", "displacement"},
    "tolerances": {"rel_tol", "abs_tol"},
    "output": {"log_base", "mbar", "path", "cache_dir"},
}
_SWEEP_KEYS = {"min", "max", "points", "scale", "values"}


@dataclass(frozen=True)
class SweepAxis:
    name: str
    values: tuple

    @classmethod
    def linear(cls, name, lo, hi, points, scale="lin"):
        if points < 1:
            raise ValueError("points must be >= 1")
        if points == 1:
            return cls(name, (float(lo),))
        if scale == "log":
            vals = np.geomspace(lo, hi, points)
        else:
            vals = np.linspace(lo, hi, points)
        return cls(name, tuple(float(v) for v in vals))


@dataclass
class ScenarioConfig:
    name: str = "custom"
    description: str = ""
    figure: str = ""
    note: str = ""
    orientation: str = "counter"
    D: float = 0.0
    separation: float | None = None  # if set, D = separation - 1/accel_I - 1/accel_II
    kind: str = "passive"
    accel_I: float = 0.1
    accel_II: float = 0.1
    mode_I: dict = field(default_factory=lambda: {"L": 2.0, "wavenumber": 5.0, "mass": 0.1})
    mode_II: dict = field(default_factory=lambda: {"L": 2.0, "wavenumber": 5.0, "mass": 0.1})
    a_conv: float = 1.0
    state: str = "vacuum"
    r: float = 0.0
    n: float = 0.0
    displacement: tuple = (0.0, 0.0, 0.0, 0.0)
    rel_tol: float = 1e-3
    abs_tol: float = 1e-14
    log_base: str = "e"
    mbar: float = 1.0
    output_path: str | None = None
    cache_dir: str | None = None
    sweep: list = field(default_factory=list)

    def points(self) -> list[ScenarioPoint]:
        """All sweep points in deterministic order (first axis outermost)."""
        axes = self.sweep or [SweepAxis("D", (self.D,))]
        out = []
        for combo in itertools.product(*(ax.values for ax in axes)):
            out.append(self._point(dict(zip((ax.name for ax in axes), combo))))
        return out

    def _point(self, over: dict) -> ScenarioPoint:
        aI = over.get("accel_I", over.get("accel", self.accel_I))
        aII = over.get("accel_II", over.get("accel", self.accel_II))
        modes = []
        for a, base in ((aI, self.mode_I), (aII, self.mode_II)):
            p = dict(base)
            for key in ("L", "wavenumber", "Omega0"):
                if key in over:
                    p[key] = over[key]
                    if key == "Omega0":
                        p.pop("wavenumber", None)
                    elif key == "wavenumber":
                        p.pop("Omega0", None)
            if "Omega0" in p:
                om = p.pop("Omega0")
                if om <= p["mass"]:
                    raise ConfigError("modes.Omega0", "Omega0 must exceed the mass")
                p["wavenumber"] = math.sqrt(om * om - p["mass"] ** 2)
            modes.append(ModeSetup(accel=a, L=p["L"], wavenumber=p["wavenumber"], mass=p["mass"],
                                   kind=self.kind, a_conv=self.a_conv))
        D = over.get("D", self.D)
        if self.separation is not None and "D" not in over:
            D = self.separation - 1.0 / aI - 1.0 / aII
        r = over.get("r", self.r)
        n = over.get("n", self.n)
        disp = self.displacement if self.state == "coherent" else (0.0, 0.0, 0.0, 0.0)
        if self.state == "vacuum" and not ({"r", "n"} & set(over)):
            r = n = 0.0
        return ScenarioPoint(modes[0], modes[1], D=float(D), orientation=self.orientation, r=float(r),
                             n=float(n), displacement=tuple(disp), mbar=self.mbar,
                             rel_tol=self.rel_tol, abs_tol=self.abs_tol,
                             log_base=math.e if self.log_base == "e" else 2.0)

    def axes_summary(self) -> str:
        parts = []
        for ax in self.sweep:
            v = ax.values
            parts.append(f"{ax.name}=[{v[0]:g}..{v[-1]:g}]x{len(v)}" if len(v) > 1 else f"{ax.name}={v[0]:g}")
        return " ".join(parts)


def parse_sections(text: str, source: str = "<config>") -> list[tuple[str, dict]]:
    """Split the text into an ordered list of (section, {key: (value, line)})."""
    sections: list[tuple[str, dict]] = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"{source}:{lineno}", "unterminated section header")
            name = line[1:-1].strip()
            if not name:
                raise ConfigError(f"{source}:{lineno}", "empty section name")
            current = {}
            sections.append((name, current))
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}", f"expected 'key = value', got {line!r}")
        if current is None:
            raise ConfigError(f"{source}:{lineno}", "key outside of any section")
        key, val = (s.strip() for s in line.split("=", 1))
        if key in current:
            raise ConfigError(f"{source}:{lineno}", f"duplicate key {key!r}")
        current[key] = (val, lineno)
    return sections


def _num(path: str, val: str) -> float:
    try:
        x = float(val)
    except ValueError:
        raise ConfigError(path, f"expected a number, got {val!r}") from None
    if not math.isfinite(x):
        raise ConfigError(path, "value must be finite")
    return x


def _pos(path: str, val: str) -> float:
    x = _num(path, val)
    if x <= 0:
        raise ConfigError(path, "value must be positive")
    return x


def _choice(path: str, val: str, options) -> str:
    if val not in options:
        raise ConfigError(path, f"expected one of {sorted(options)}, got {val!r}")
    return val


def load_config(text: str, source: str = "<config>", base: ScenarioConfig | None = None) -> ScenarioConfig:
    cfg = replace(base) if base is not None else ScenarioConfig()
    cfg.mode_I = dict(cfg.mode_I)
    cfg.mode_II = dict(cfg.mode_II)
    sweeps = []
    seen = set()
    for sec, kv in parse_sections(text, source):
        if sec.startswith("sweep."):
            sweeps.append(_parse_axis(sec, kv))
            continue
        if sec not in _KNOWN:
            raise ConfigError(sec, "unknown section")
        if sec in seen:
            raise ConfigError(sec, "section given twice")
        seen.add(sec)
        for key, (val, _) in kv.items():
            path = f"{sec}.{key}"
            if key not in _KNOWN[sec]:
                raise ConfigError(path, "unknown key")
            _apply(cfg, sec, key, val, path)
    if sweeps:
        names = [ax.name for ax in sweeps]
        if len(set(names)) != len(names):
            raise ConfigError("sweep", "axis given twice")
        if "accel" in names and ({"accel_I", "accel_II"} & set(names)):
            raise ConfigError("sweep.accel", "cannot be combined with accel_I/accel_II axes")
        cfg.sweep = sweeps
    _validate(cfg)
    return cfg


def _apply(cfg: ScenarioConfig, sec: str, key: str, val: str, path: str) -> None:
    if sec == "scenario":
        if key == "name":
            cfg.name = _choice(path, val, SCENARIOS)
        else:
            setattr(cfg, key, val)
    elif sec == "geometry":
        if key == "orientation":
            cfg.orientation = _choice(path, val, ("counter", "parallel"))
        elif key == "D":
            cfg.D = _num(path, val)
        else:
            cfg.separation = _pos(path, val)
    elif sec == "modes":
        if key == "kind":
            cfg.kind = _choice(path, val, ("passive", "active"))
        elif key == "accel":
            cfg.accel_I = cfg.accel_II = _pos(path, val)
        elif key in ("accel_I", "accel_II", "a_conv"):
            setattr(cfg, key, _pos(path, val))
        else:
            x = _pos(path, val)
            for m in (cfg.mode_I, cfg.mode_II):
                _set_mode(m, key, x)
    elif sec in ("modes.I", "modes.II"):
        _set_mode(cfg.mode_I if sec == "modes.I" else cfg.mode_II, key, _pos(path, val))
    elif sec == "input":
        if key == "state":
            cfg.state = _choice(path, val, ("vacuum", "squeezed_thermal", "coherent"))
        elif key == "displacement":
            parts = [p for p in val.replace(",", " ").split() if p]
            if len(parts) != 4:
                raise ConfigError(path, "expected four numbers")
            cfg.displacement = tuple(_num(path, p) for p in parts)
        else:
            x = _num(path, val)
            if x < 0:
                raise ConfigError(path, "value must be >= 0")
            setattr(cfg, key, x)
    elif sec == "tolerances":
        setattr(cfg, key, _pos(path, val))
    elif sec == "output":
        if key == "log_base":
            cfg.log_base = _choice(path, val, ("e", "2"))
        elif key == "mbar":
            x = _num(path, val)
            if x < 0:
                raise ConfigError(path, "value must be >= 0")
            cfg.mbar = x
        elif key == "path":
            cfg.output_path = val
        else:
            cfg.cache_dir = val


def _set_mode(m: dict, key: str, x: float) -> None:
    m[key] = x
    if key == "Omega0":
        m.pop("wavenumber", None)
    elif key == "wavenumber":
        m.pop("Omega0", None)


def _parse_axis(sec: str, kv: dict) -> SweepAxis:
    name = sec.split(".", 1)[1]
    if name not in AXES:
        raise ConfigError(sec, f"unknown sweep axis {name!r}; choose from {list(AXES)}")
    for key in kv:
        if key not in _SWEEP_KEYS:
            raise ConfigError(f"{sec}.{key}", "unknown key")
    if "values" in kv:
        if set(kv) - {"values"}:
            raise ConfigError(sec, "give either 'values' or min/max/points")
        parts = [p for p in kv["values"][0].replace(",", " ").split() if p]
        if not parts:
            raise ConfigError(f"{sec}.values", "empty list")
        return SweepAxis(name, tuple(_num(f"{sec}.values", p) for p in parts))
    for key in ("min", "max", "points"):
        if key not in kv:
            raise ConfigError(f"{sec}.{key}", "missing")
    lo = _num(f"{sec}.min", kv["min"][0])
    hi = _num(f"{sec}.max", kv["max"][0])
    try:
        pts = int(kv["points"][0])
    except ValueError:
        raise ConfigError(f"{sec}.points", "expected an integer") from None
    if pts < 1:
        raise ConfigError(f"{sec}.points", "must be >= 1")
    scale = _choice(f"{sec}.scale", kv.get("scale", ("lin", 0))[0], ("lin", "log"))
    if scale == "log" and (lo <= 0 or hi <= 0):
        raise ConfigError(f"{sec}.scale", "log axes need positive bounds")
    return SweepAxis.linear(name, lo, hi, pts, scale)


def _validate(cfg: ScenarioConfig) -> None:
    for m, sec in ((cfg.mode_I, "modes.I"), (cfg.mode_II, "modes.II")):
        if "wavenumber" not in m and "Omega0" not in m:
            raise ConfigError(sec, "needs wavenumber or Omega0")
    for ax in cfg.sweep:
        if ax.name.startswith("accel") and min(ax.values) <= 0:
            raise ConfigError(f"sweep.{ax.name}", "accelerations must be positive")
        if ax.name in ("L", "Omega0", "wavenumber") and min(ax.values) <= 0:
            raise ConfigError(f"sweep.{ax.name}", "values must be positive")
        if ax.name in ("r", "n") and min(ax.values) < 0:
            raise ConfigError(f"sweep.{ax.name}", "values must be >= 0")
    if cfg.state == "coherent" and any(ax.name in ("r", "n") for ax in cfg.sweep):
        raise ConfigError("input.state", "coherent inputs cannot sweep r or n")
    if cfg.separation is not None and any(ax.name == "D" for ax in cfg.sweep):
        raise ConfigError("geometry.separation", "cannot be combined with a D sweep")
