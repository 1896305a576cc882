"""Wave packets on the t = 0 slice, the Klein-Gordon product, and mode spectra.

Positions are stored as distances from a packet's ``origin`` along its
``direction`` (+1 points right, -1 left), so a region II packet is the mirror
image of a region I packet with the same samples.  For packets in the Rindler
frame the origin is the wedge apex and the grid is the Rindler coordinate chi;
``tderiv`` is always the derivative along the future-directed time of the
packet's own frame (Minkowski t, or proper time tau at chi = 1/accel).

Frequency grids are uniform in the dimensionless order nu = Omega/a and start
at nu = 0, so every spectrum-derived scalar is independent of the convention
parameter ``a`` up to rounding.
"""

from __future__ import annotations

import io
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import CubicSpline

from . import specfun
from .errors import ConvergenceError, DomainError

REGIONS = ("I", "II")
KINDS = ("inertial", "passive_output", "active_output")

NU_STEP = 0.05
ENVELOPE_CUT = 4.2  # grid half-width in units of L/x0 on the log axis (envelope ~ e^-35)
TAIL_TOL = 1e-6


class GridDisjointError(DomainError):
    pass


@dataclass(frozen=True)
class ModeParams:
    region: str
    x0: float
    L: float
    Omega0: float
    mass: float
    accel: float = 0.0
    kind: str = "inertial"

    def __post_init__(self):
        if self.region not in REGIONS:
            raise DomainError(f"region must be one of {REGIONS}")
        if self.kind not in KINDS:
            raise DomainError(f"kind must be one of {KINDS}")
        if not (self.L > 0 and self.mass > 0):
            raise DomainError("L and mass must be positive")
        if not self.Omega0 > self.mass:
            raise DomainError("Omega0 must exceed the mass")
        if self.accel < 0:
            raise DomainError("accel must be >= 0")
        if self.kind != "inertial" and self.accel <= 0:
            raise DomainError("output modes need accel > 0")
        if self.x0 == 0 or (self.x0 > 0) != (self.region == "I"):
            raise DomainError("x0 must be positive in region I and negative in region II")
        if self.accel > 0:
            aL = self.accel * self.L
            if aL >= 0.5:
                raise DomainError(f"accel*L = {aL:.3g} violates the localization bound (< 0.5)")
            if aL > 0.2:
                warnings.warn(f"accel*L = {aL:.3g} is not small; the packet is poorly localized",
                              stacklevel=2)
        if self.Omega0 * self.L < 5:
            warnings.warn(f"Omega0*L = {self.Omega0 * self.L:.3g} < 5: broad spectrum", stacklevel=2)

    @property
    def center(self) -> float:
        return abs(self.x0)

    @property
    def wavenumber(self) -> float:
        return math.sqrt(self.Omega0 ** 2 - self.mass ** 2)


def standard_params(kind: str, accel: float, region: str = "I", L: float = 2.0,
                    mass: float = 0.1, wavenumber: float = 5.0, x0: float | None = None) -> ModeParams:
    """Mode parameters with the wavenumber fixed (Omega0 = sqrt(k0^2 + m^2)) and x0 = 1/accel."""
    if x0 is None:
        if accel <= 0:
            raise DomainError("x0 is required when accel = 0")
        x0 = 1.0 / accel
    x0 = abs(x0) if region == "I" else -abs(x0)
    return ModeParams(region=region, x0=x0, L=L, Omega0=math.hypot(wavenumber, mass), mass=mass,
                      accel=accel, kind=kind)


@dataclass(frozen=True, eq=False)
class WavePacket:
    params: ModeParams | None
    grid: np.ndarray
    value: np.ndarray
    tderiv: np.ndarray
    frame: str = "minkowski"
    origin: float = 0.0
    direction: int = 1

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        if g.ndim != 1 or len(g) < 3 or np.any(np.diff(g) <= 0):
            raise DomainError("grid must be strictly increasing with at least 3 points")
        if self.frame not in ("minkowski", "rindler"):
            raise DomainError("frame must be 'minkowski' or 'rindler'")
        if self.frame == "rindler" and (g[0] <= 0 or self.params is None or self.params.accel <= 0):
            raise DomainError("Rindler packets need chi > 0 and a positive acceleration")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "value", np.asarray(self.value, dtype=complex))
        object.__setattr__(self, "tderiv", np.asarray(self.tderiv, dtype=complex))
        if self.value.shape != g.shape or self.tderiv.shape != g.shape:
            raise DomainError("value/tderiv must match the grid")

    @property
    def log_uniform(self) -> bool:
        s = np.log(self.grid)
        d = np.diff(s)
        return bool(np.allclose(d, d[0], rtol=1e-9, atol=0))

    def weights(self) -> np.ndarray:
        """Trapezoid weights for dx on the packet's natural (uniform) axis."""
        g = self.grid
        if self.frame == "rindler" and self.log_uniform:
            ds = math.log(g[1] / g[0])
            w = g * ds
        else:
            w = np.empty_like(g)
            w[1:-1] = 0.5 * (g[2:] - g[:-2])
            w[0] = 0.5 * (g[1] - g[0])
            w[-1] = 0.5 * (g[-1] - g[-2])
            return w
        w[0] *= 0.5
        w[-1] *= 0.5
        return w

    def minkowski_samples(self):
        """(x, value, d/dt value) in global Minkowski coordinates, x increasing."""
        x = self.origin + self.direction * self.grid
        dt = self.tderiv
        if self.frame == "rindler":
            dt = dt / (self.params.accel * self.grid)
        if self.direction < 0:
            return x[::-1], self.value[::-1], dt[::-1]
        return x, self.value, dt

    def conj(self) -> "WavePacket":
        return replace(self, value=np.conj(self.value), tderiv=np.conj(self.tderiv))

    @property
    def center(self) -> float:
        """Minkowski position of the peak of |value|."""
        i = int(np.argmax(np.abs(self.value)))
        return float(self.origin + self.direction * self.grid[i])

    @property
    def width(self) -> float:
        return self.params.L if self.params is not None else 0.0

    def edge_ratio(self) -> float:
        peak = np.max(np.abs(self.value))
        return float(max(abs(self.value[0]), abs(self.value[-1])) / peak)


def log_gaussian_envelope(x, x0: float, L: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        lg = np.log(x / x0)
    return np.exp(-2.0 * (x0 / L * lg) ** 2)


def _log_extent(c: float, L: float) -> tuple[float, float]:
    return math.log(c) - ENVELOPE_CUT * L / c, math.log(c) + ENVELOPE_CUT * L / c


def _default_points(c: float, L: float, k0: float, lo: float, hi: float, per_wavelength: int = 40) -> int:
    # enough points per oscillation of sin(k0 x) at the far edge, on a log-uniform grid
    lam_s = 2 * math.pi / (k0 * math.exp(hi))
    return max(801, int(per_wavelength * (hi - lo) / lam_s) | 1)


def build_input_mode(params: ModeParams, n: int = 4001, D: float = 0.0) -> WavePacket:
    """Inertial log-Gaussian sine packet, normalized to unit KG norm.

    ``params.x0`` is the Minkowski center.  ``D`` is only recorded for symmetry
    with the output builders; callers place the packet by choosing x0.
    """
    if params.kind != "inertial":
        raise DomainError("build_input_mode needs kind='inertial'")
    c, L = params.center, params.L
    lo = max(min(c - 6 * L, c * math.exp(-4 * L / c)), 1e-9 * c)
    hi = max(c + 6 * L, c * math.exp(4 * L / c))
    x = np.linspace(lo, hi, n)
    val = log_gaussian_envelope(x, c, L) * np.sin(params.wavenumber * (x - c))
    w = np.full_like(x, x[1] - x[0])
    w[0] *= 0.5
    w[-1] *= 0.5
    val = val / math.sqrt(2 * params.Omega0 * np.sum(w * val ** 2))
    direction = 1 if params.region == "I" else -1
    return WavePacket(params, x, val.astype(complex), -1j * params.Omega0 * val, "minkowski", 0.0, direction)


def passive_profile(params: ModeParams, chi: np.ndarray) -> np.ndarray:
    """f(chi) = Im[I_{-i nu0}(m x0) I_{i nu0}(m chi)] up to a positive constant."""
    nu0 = params.Omega0 / params.accel
    m, c = params.mass, params.center
    ref = specfun.bessel_i_imag_phased(nu0, m * c)
    return (np.conj(ref) * specfun.bessel_i_imag_phased(nu0, m * chi)).imag


def _rindler_grid(params: ModeParams, n: int | None) -> np.ndarray:
    c = 1.0 / params.accel
    lo, hi = _log_extent(c, params.L)
    if n is None:
        n = _default_points(c, params.L, params.wavenumber, lo, hi)
    return np.exp(np.linspace(lo, hi, n))


def build_passive_output_mode(params: ModeParams, n: int | None = None, D: float = 0.0,
                              orientation: str = "counter") -> WavePacket:
    """Accelerated-cavity style packet psi(chi) = C' env(chi) f(chi) at chi0 = 1/accel.

    The sign of C' makes psi rise through x0 like the input sine, so alpha > 0.
    """
    if params.kind != "passive_output":
        raise DomainError("build_passive_output_mode needs kind='passive_output'")
    if abs(params.center - 1.0 / params.accel) > 1e-9 * params.center:
        raise DomainError("output modes are centered at |x0| = 1/accel")
    chi = _rindler_grid(params, n)
    val = log_gaussian_envelope(chi, params.center, params.L) * passive_profile(params, chi)
    s = np.log(chi)
    ds = s[1] - s[0]
    w = np.full_like(s, ds)
    w[0] *= 0.5
    w[-1] *= 0.5
    # (psi, psi) = 2 Omega0 int |psi|^2 ds / accel
    val = val / math.sqrt(2 * params.Omega0 * np.sum(w * val ** 2) / params.accel)
    sign = _slope_sign(params)
    val = sign * val
    origin, direction = _placement(params.region, D, orientation)
    return WavePacket(params, chi, val.astype(complex), -1j * params.Omega0 * val, "rindler",
                      origin, direction)


def _placement(region: str, D: float, orientation: str) -> tuple[float, int]:
    if orientation not in ("counter", "parallel"):
        raise DomainError("orientation must be 'counter' or 'parallel'")
    if region == "I":
        return 0.5 * D, 1
    return -0.5 * D, (-1 if orientation == "counter" else 1)


def _slope_sign(params: ModeParams) -> float:
    c = params.center
    h = 1e-3 * params.L
    f = passive_profile(params, np.array([c - h, c + h]))
    return 1.0 if f[1] - f[0] >= 0 else -1.0


@dataclass(frozen=True, eq=False)
class RindlerSpectrum:
    """Rindler amplitudes (psi, w_Omega) and (psi, w*_Omega) on a uniform nu grid.

    ``bose`` holds amps * sqrt(2 / (1 - exp(-2 pi nu))), which stays finite at
    nu = 0; the noise integrals are written in terms of it.
    """
    a_conv: float
    omega_grid: np.ndarray
    amps: np.ndarray
    region: str
    amps_neg: np.ndarray | None = None
    bose: np.ndarray | None = None
    accel: float = 0.0
    mass: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def nu(self) -> np.ndarray:
        return self.omega_grid / self.a_conv

    @property
    def step(self) -> float:
        return float(self.nu[1] - self.nu[0])

    @property
    def weights(self) -> np.ndarray:
        """Quadrature weights for dOmega (4th-order end correction at nu = 0)."""
        return self.a_conv * nu_weights(len(self.omega_grid), self.step)

    def norm(self) -> float:
        w = self.weights
        neg = 0.0 if self.amps_neg is None else np.sum(w * np.abs(self.amps_neg) ** 2)
        return float(np.sum(w * np.abs(self.amps) ** 2) - neg)

    def positive_weight(self) -> float:
        return float(np.sum(self.weights * np.abs(self.amps) ** 2))

    def negative_weight(self) -> float:
        if self.amps_neg is None:
            return 0.0
        return float(np.sum(self.weights * np.abs(self.amps_neg) ** 2))


def nu_weights(n: int, h: float) -> np.ndarray:
    """Trapezoid weights with the 4th-order end correction at the left end only.

    The right end sits far in the spectral tail where the integrand vanishes.
    """
    w = np.ones(n)
    head = [17 / 48, 59 / 48, 43 / 48, 49 / 48]
    w[:min(4, n)] = head[:min(4, n)]
    return w * h


def bose_factor(nu: np.ndarray) -> np.ndarray:
    nu = np.maximum(np.asarray(nu, dtype=float), 1e-300)
    return np.sqrt(-2.0 / np.expm1(-2 * np.pi * nu))


def default_nu_max(params: ModeParams) -> float:
    c = params.center
    nu0 = params.Omega0 / params.accel
    # the amplitude envelope is ~exp(-(nu-nu0)^2 L^2/(8 c^2)); 7 widths leaves < 1e-10
    return nu0 + 7.0 * 2.0 * c / params.L + 10.0


def _log_uniform(psi: WavePacket):
    chi = psi.grid
    if psi.log_uniform:
        return chi, psi.value, psi.tderiv
    s = np.log(chi)
    su = np.linspace(s[0], s[-1], len(s))
    out = []
    for arr in (psi.value, psi.tderiv):
        re = CubicSpline(s, arr.real)(su)
        im = CubicSpline(s, arr.imag)(su)
        out.append(re + 1j * im)
    return np.exp(su), out[0], out[1]


def _scaled_k_rows(nu: np.ndarray, x: np.ndarray, chunk: int = 256):
    """Yield (slice, sqrt(sinh(pi nu)) K_{i nu}(x)) blocks, one row per order."""
    for i in range(0, len(nu), chunk):
        sl = slice(i, min(i + chunk, len(nu)))
        yield sl, specfun.bessel_k_imag_scaled(nu[sl, None], x[None, :])


def rindler_spectrum(psi: WavePacket, a_conv: float = 1.0, nu_max: float | None = None,
                     step: float = NU_STEP) -> RindlerSpectrum:
    """Project a Rindler-frame packet on the Rindler modes w_Omega and w*_Omega."""
    if psi.frame != "rindler":
        raise DomainError("rindler_spectrum needs a Rindler-frame packet")
    if not a_conv > 0:
        raise DomainError("a_conv must be positive")
    p = psi.params
    A, m = p.accel, p.mass
    chi, val, dtau = _log_uniform(psi)
    s = np.log(chi)
    ds = s[1] - s[0]
    if nu_max is None:
        nu_max = default_nu_max(p)
    nu = np.arange(0.0, nu_max + 0.5 * step, step)
    nu_eval = np.where(nu == 0, 1e-9, nu)
    wts = np.full(len(s), ds)
    wts[0] *= 0.5
    wts[-1] *= 0.5
    # amps = sqrt(sinh)/(pi sqrt a) int ds (nu psi* - i/A dtau psi*) K ; the negative part flips nu
    a1 = wts * np.conj(val)
    a2 = wts * (-1j / A) * np.conj(dtau)
    j1 = np.empty(len(nu), dtype=complex)
    j2 = np.empty(len(nu), dtype=complex)
    x = m * chi
    for sl, krows in _scaled_k_rows(nu_eval, x):
        j1[sl] = krows @ a1
        j2[sl] = krows @ a2
    pref = 1.0 / (math.pi * math.sqrt(a_conv))
    amps_e = pref * (nu_eval * j1 + j2)
    neg = pref * (-nu_eval * j1 + j2)
    bose = amps_e * bose_factor(nu_eval)
    amps = np.where(nu == 0, 0.0, amps_e)
    neg = np.where(nu == 0, 0.0, neg)
    spec = RindlerSpectrum(a_conv, a_conv * nu, amps, p.region, neg, bose, A, m)
    _check_tail(spec)
    return spec


def _check_tail(spec: RindlerSpectrum):
    w = spec.weights
    dens = w * (np.abs(spec.amps) ** 2 + np.abs(spec.amps_neg) ** 2)
    tot = dens.sum()
    n_tail = max(1, len(dens) // 20)
    tail = dens[-n_tail:].sum() / tot
    spec.extra["tail"] = float(tail)
    if tail > TAIL_TOL:
        raise ConvergenceError(f"spectrum tail {tail:.2e} exceeds {TAIL_TOL:g}; raise nu_max")


@dataclass(frozen=True, eq=False)
class MinkowskiSpectrum:
    """(phi, u_k) and (phi, u_k*) on a rapidity grid; k = m sinh(theta), dk = omega dtheta."""
    k_grid: np.ndarray
    amps_pos: np.ndarray
    amps_neg: np.ndarray
    mass: float
    rapidity: np.ndarray | None = None

    @property
    def omega(self) -> np.ndarray:
        return np.sqrt(self.k_grid ** 2 + self.mass ** 2)

    @property
    def weights(self) -> np.ndarray:
        th = self.rapidity
        dth = th[1] - th[0]
        return self.omega * dth

    def positive_weight(self) -> float:
        return float(np.sum(self.weights * np.abs(self.amps_pos) ** 2))

    def negative_weight(self) -> float:
        return float(np.sum(self.weights * np.abs(self.amps_neg) ** 2))

    def norm(self) -> float:
        return self.positive_weight() - self.negative_weight()


def minkowski_spectrum(phi: WavePacket, k_max: float | None = None, step: float | None = None,
                       chunk: int = 256) -> MinkowskiSpectrum:
    """Plane-wave amplitudes of a packet on the t = 0 slice."""
    x, val, dt = phi.minkowski_samples()
    if phi.direction < 0:
        w = phi.weights()[::-1]
    else:
        w = phi.weights()
    p = phi.params
    m = p.mass
    if k_max is None:
        k_max = p.wavenumber + 40.0 / p.L
    xmax = float(np.max(np.abs(x)))
    th_max = math.asinh(k_max / m)
    if step is None:
        # at most ~0.3 rad of plane-wave phase between neighbouring k at the far end
        step = min(0.004, 0.3 / (math.hypot(k_max, m) * xmax))
    n = int(math.ceil(th_max / step))
    th = np.linspace(-n * step, n * step, 2 * n + 1)
    k = m * np.sinh(th)
    om = m * np.cosh(th)
    f1 = w * np.conj(val)
    f2 = w * (-1j) * np.conj(dt)
    # sums over x of e^{+-ikx} f(x); on a uniform x grid the phases follow a recurrence,
    # reseeded with an exact exponential every `chunk` columns
    dx = np.diff(x)
    uniform = np.allclose(dx, dx[0], rtol=1e-9, atol=0)
    a = np.zeros(len(k), dtype=complex)
    b = np.zeros(len(k), dtype=complex)
    a_m = np.zeros(len(k), dtype=complex)
    b_m = np.zeros(len(k), dtype=complex)
    if uniform:
        step = np.exp(1j * k * dx[0])
        for j0 in range(0, len(x), chunk):
            e = np.exp(1j * k * x[j0])
            for j in range(j0, min(j0 + chunk, len(x))):
                if j > j0:
                    e = e * step
                ec = np.conj(e)
                a += e * f1[j]
                b += e * f2[j]
                a_m += ec * f1[j]
                b_m += ec * f2[j]
    else:
        for i in range(0, len(k), chunk):
            sl = slice(i, i + chunk)
            e = np.exp(1j * np.outer(k[sl], x))
            a[sl], b[sl] = e @ f1, e @ f2
            a_m[sl], b_m[sl] = np.conj(e) @ f1, np.conj(e) @ f2
    norm = 1.0 / np.sqrt(4 * math.pi * om)
    # (phi,u_k) = int (omega phi* - i dt phi*) u_k ; (phi,u_k*) = int (-omega phi* - i dt phi*) u_k*
    pos = norm * (om * a + b)
    neg = norm * (-om * a_m + b_m)
    return MinkowskiSpectrum(k, pos, neg, m, th)


def apply_zero_frequency_cutoff(spec):
    """Drop negative-frequency amplitudes and rescale to unit KG norm."""
    if isinstance(spec, RindlerSpectrum):
        pw = spec.positive_weight()
        if pw <= 0:
            raise DomainError("spectrum has no positive-frequency weight")
        f = 1.0 / math.sqrt(pw)
        if spec.amps_neg is not None and not np.any(spec.amps_neg) and abs(pw - 1.0) < 1e-15:
            return spec
        bose = None if spec.bose is None else spec.bose * f
        return replace(spec, amps=spec.amps * f, amps_neg=np.zeros_like(spec.amps), bose=bose,
                       extra=dict(spec.extra, cutoff_scale=f))
    if isinstance(spec, MinkowskiSpectrum):
        pw = spec.positive_weight()
        if pw <= 0:
            raise DomainError("spectrum has no positive-frequency weight")
        if not np.any(spec.amps_neg) and abs(pw - 1.0) < 1e-15:
            return spec
        return replace(spec, amps_pos=spec.amps_pos / math.sqrt(pw), amps_neg=np.zeros_like(spec.amps_neg))
    raise TypeError("expected a RindlerSpectrum or MinkowskiSpectrum")


def kg_inner(f: WavePacket, g: WavePacket) -> complex:
    """(f, g) = i int dx (f* dt g - g dt f*) on the t = 0 slice."""
    xf, vf, df = f.minkowski_samples()
    xg, vg, dg = g.minkowski_samples()
    lo, hi = max(xf[0], xg[0]), min(xf[-1], xg[-1])
    if lo >= hi:
        sep = abs(f.center - g.center)
        if sep > 5 * max(f.width, g.width):
            return 0j
        raise GridDisjointError("packet grids do not overlap but the packets are not well separated")
    same = (f.grid is g.grid or (len(f.grid) == len(g.grid) and np.array_equal(f.grid, g.grid))) \
        and f.origin == g.origin and f.direction == g.direction and f.frame == g.frame
    if same:
        w = f.weights()
        if f.direction < 0:
            w = w[::-1]
        integrand = np.conj(vf) * dg - vg * np.conj(df)
        return complex(1j * np.sum(w * integrand))
    sep = abs(f.center - g.center)
    if sep > 5 * max(f.width, g.width):
        return 0j
    xs = np.union1d(xf[(xf >= lo) & (xf <= hi)], xg[(xg >= lo) & (xg <= hi)])
    fv, fd = _interp(xf, vf, xs), _interp(xf, df, xs)
    gv, gd = _interp(xg, vg, xs), _interp(xg, dg, xs)
    integrand = np.conj(fv) * gd - gv * np.conj(fd)
    return complex(1j * simpson(integrand, x=xs))


def _interp(x, y, xs):
    return CubicSpline(x, y.real)(xs) + 1j * CubicSpline(x, y.imag)(xs)


def _placement_of(params: ModeParams, D: float, orientation: str):
    return _placement(params.region, D, orientation)


def build_active_output_mode(inp: WavePacket, accel: float, a_conv: float = 1.0, D: float = 0.0,
                             orientation: str = "counter", n: int | None = None,
                             region: str | None = None):
    """Keep the positive Rindler-frequency part of the input packet.

    Returns (packet, spectrum).  The packet is psi = int dOmega (w_Omega, phi) w_Omega / alpha
    with alpha = sqrt(int dOmega |(phi, w_Omega)|^2).  The projections are taken from the
    input itself, which vanishes near the horizon, so they fall off like sqrt(Omega) at low
    frequency.  Going through the Minkowski-cutoff input instead leaves horizon tails whose
    projections grow like Omega^(-1/2) and make the thermal noise of psi diverge.
    """
    if inp.frame != "minkowski":
        raise DomainError("active modes are built from inertial packets")
    region = region or inp.params.region
    p = inp.params
    params = replace(p, kind="active_output", accel=accel,
                     x0=(1.0 / accel) * (1 if region == "I" else -1), region=region)
    x, val_x, dt_x = inp.minkowski_samples()
    chi = _rindler_grid(params, n)
    # the input sits at the output position relative to its own wedge apex
    rel = np.abs(x - inp.origin)
    order = np.argsort(rel)
    rel, val_x, dt_x = rel[order], val_x[order], dt_x[order]
    inside = (chi >= rel[0]) & (chi <= rel[-1])
    v = np.zeros(len(chi), dtype=complex)
    d = np.zeros(len(chi), dtype=complex)
    v[inside] = _interp(rel, val_x, chi[inside])
    # d/dtau = accel chi d/dt
    d[inside] = accel * chi[inside] * _interp(rel, dt_x, chi[inside])
    rp = WavePacket(replace(params, region="I", x0=1.0 / accel), chi, v, d, "rindler", 0.0, 1)
    full = rindler_spectrum(rp, a_conv)
    total = full.positive_weight()
    if total < 1e-8:
        raise DomainError("input packet has a vanishing projection on this wedge")
    alpha = math.sqrt(total)
    amps = full.amps / alpha
    spec = RindlerSpectrum(a_conv, full.omega_grid, amps, region, np.zeros_like(amps),
                           full.bose / alpha, accel, p.mass,
                           {"alpha": alpha, "negative_weight": full.negative_weight()})
    _check_tail(spec)
    nu = spec.nu
    nu_eval = np.where(nu == 0, 1e-9, nu)
    w = spec.weights
    # psi(chi) = sum_Omega dOmega conj(amps) w_Omega(chi), w_Omega = sqrt(sinh) K / (pi sqrt a)
    coef = w * np.conj(amps) / (math.pi * math.sqrt(a_conv))
    val = np.zeros(len(chi), dtype=complex)
    dtau = np.zeros(len(chi), dtype=complex)
    for sl, krows in _scaled_k_rows(nu_eval, p.mass * chi):
        val += coef[sl] @ krows
        # w_Omega ~ exp(-i Omega eta) and d/dtau = (accel / a) d/deta at chi = 1/accel
        dtau += (-1j * accel * nu_eval[sl] * coef[sl]) @ krows
    origin, direction = _placement(region, D, orientation)
    pkt = WavePacket(params, chi, val, dtau, "rindler", origin, direction)
    return pkt, spec


# ---------------------------------------------------------------- text I/O

def _header(meta: dict) -> str:
    return "\n".join(f"# {k} = {v!r}" for k, v in meta.items())


def _parse_header(lines) -> dict:
    import ast

    meta = {}
    for ln in lines:
        if not ln.startswith("#"):
            break
        k, sep, v = ln[1:].partition("=")
        if sep and not k.strip().startswith("columns"):
            meta[k.strip()] = ast.literal_eval(v.strip())
    return meta


def packet_to_text(p: WavePacket) -> str:
    meta = {"type": "WavePacket", "frame": p.frame, "origin": p.origin, "direction": p.direction}
    if p.params is not None:
        meta.update({"region": p.params.region, "x0": p.params.x0, "L": p.params.L,
                     "Omega0": p.params.Omega0, "mass": p.params.mass, "accel": p.params.accel,
                     "kind": p.params.kind})
    buf = io.StringIO()
    cols = np.column_stack([p.grid, p.value.real, p.value.imag, p.tderiv.real, p.tderiv.imag])
    np.savetxt(buf, cols, fmt="%.17g", header="position re im dt_re dt_im", comments="# columns: ")
    return _header(meta) + "\n" + buf.getvalue()


def packet_from_text(text: str) -> WavePacket:
    lines = text.splitlines()
    meta = _parse_header(lines)
    data = np.loadtxt(io.StringIO(text), comments="#", ndmin=2)
    params = None
    if "region" in meta:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            params = ModeParams(meta["region"], meta["x0"], meta["L"], meta["Omega0"], meta["mass"],
                                meta["accel"], meta["kind"])
    return WavePacket(params, data[:, 0], data[:, 1] + 1j * data[:, 2], data[:, 3] + 1j * data[:, 4],
                      meta["frame"], meta["origin"], meta["direction"])


def spectrum_to_text(s: RindlerSpectrum) -> str:
    meta = {"type": "RindlerSpectrum", "a_conv": s.a_conv, "region": s.region, "accel": s.accel,
            "mass": s.mass, "extra": {k: float(v) for k, v in s.extra.items()}}
    neg = s.amps_neg if s.amps_neg is not None else np.zeros_like(s.amps)
    bose = s.bose if s.bose is not None else np.zeros_like(s.amps)
    cols = np.column_stack([s.omega_grid, s.amps.real, s.amps.imag, neg.real, neg.imag,
                            bose.real, bose.imag])
    buf = io.StringIO()
    np.savetxt(buf, cols, fmt="%.17g", header="omega re im neg_re neg_im bose_re bose_im",
               comments="# columns: ")
    return _header(meta) + "\n" + buf.getvalue()


def spectrum_from_text(text: str) -> RindlerSpectrum:
    meta = _parse_header(text.splitlines())
    d = np.loadtxt(io.StringIO(text), comments="#", ndmin=2)
    return RindlerSpectrum(meta["a_conv"], d[:, 0], d[:, 1] + 1j * d[:, 2], meta["region"],
                           d[:, 3] + 1j * d[:, 4], d[:, 5] + 1j * d[:, 6], meta["accel"], meta["mass"],
                           dict(meta.get("extra", {})))
