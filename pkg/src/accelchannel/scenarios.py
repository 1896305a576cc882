"""Built-in scenario presets, written in the config format.

All presets use counter-accelerated passive modes with L = 2, m = 0.1 and
wavenumber 5 (Omega0 ~ 5) unless they sweep those parameters.
"""

from __future__ import annotations

from .config import ScenarioConfig, load_config

PRESETS = {
    "fig4": """
[scenario]
name = fig4
figure = Fig. 4
description = vacuum log-negativity over both proper accelerations at D = 0
[sweep.accel_I]
min = 0.02
max = 0.1
points = 6
[sweep.accel_II]
min = 0.02
max = 0.1
points = 6
""",
    "fig5": """
[scenario]
name = fig5
figure = Fig. 5
description = vacuum log-negativity over packet width and central frequency at accel = 0.1
note = approximate: L and Omega0 ranges read off the figure axes
[modes]
accel = 0.1
[sweep.L]
min = 1.5
max = 4
points = 6
[sweep.Omega0]
min = 3
max = 8
points = 6
""",
    "fig6": """
[scenario]
name = fig6
figure = Fig. 6
description = vacuum log-negativity against the wedge separation D at accel = 0.1
note = D from -5 to 30; D < -5.2 would put the other wedge apex inside the packet
[modes]
accel = 0.1
[sweep.D]
min = -5
max = 30
points = 71
""",
    "fig7": """
[scenario]
name = fig7
figure = Fig. 7
description = vacuum log-negativity against accel at fixed mode separation 20 (D = 20 - 2/accel)
note = accel from 0.07; below that D < 0 is too negative for the packets
[geometry]
separation = 20
[sweep.accel]
min = 0.07
max = 0.2
points = 27
""",
    "fig8": """
[scenario]
name = fig8
figure = Fig. 8
description = fidelity of squeezed thermal inputs over (r, n) at accel = 0.1, D = 0
note = quoted alpha target 0.985, beta 4.51e-11, N 4.82e-10, N+- 1.80e-9
[modes]
accel = 0.1
[input]
state = squeezed_thermal
[sweep.r]
min = 0
max = 2
points = 9
[sweep.n]
min = 0
max = 2
points = 9
""",
    "fig9": """
[scenario]
name = fig9
figure = Fig. 9
description = fidelity of squeezed thermal inputs against accel for r in {0, 1}, n in {0, 1}
[input]
state = squeezed_thermal
[sweep.r]
values = 0, 1
[sweep.n]
values = 0, 1
[sweep.accel]
min = 0.02
max = 0.2
points = 10
""",
    "fig10": """
[scenario]
name = fig10
figure = Figs. 10-11
description = single-mode transmissivity and added noise against accel
[sweep.accel]
min = 0.02
max = 0.2
points = 10
""",
    "fig12": """
[scenario]
name = fig12
figure = Fig. 12
description = classical (mbar = 1) and quantum capacity lower bounds against accel
[output]
mbar = 1
[sweep.accel]
min = 0.02
max = 0.2
points = 10
""",
}

# Shipped example of a custom geometry: co-accelerated wedges, expected E_N = 0.
PARALLEL_EXAMPLE = """
[scenario]
name = custom
description = co-accelerated modes (parallel wedges); the log-negativity is expected to vanish
[geometry]
orientation = parallel
[modes]
accel_I = 0.0333333333333333
accel_II = 0.1
[sweep.D]
values = 0, 1, 5
"""


def preset(name: str) -> ScenarioConfig:
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return load_config(PRESETS[name], source=f"preset:{name}")


def list_scenarios(custom: ScenarioConfig | None = None) -> str:
    """Tab-separated table: name, figure, sweep axes, description, note."""
    rows = [("name", "figure", "axes", "description", "note")]
    cfgs = [preset(n) for n in PRESETS]
    if custom is not None:
        cfgs.append(custom)
    for c in cfgs:
        fixed = ""
        if c.separation is not None:
            fixed = f" separation={c.separation:g}"
        rows.append((c.name, c.figure or "-", c.axes_summary() + fixed,
                     c.description or "-", c.note or "-"))
    return "\n".join("\t".join(r) for r in rows) + "\n"
