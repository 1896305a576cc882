"""Minkowski-Rindler Bogoliubov coefficients and the mode overlaps alpha, beta."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, InconsistencyError
from .modes import (MinkowskiSpectrum, RindlerSpectrum, WavePacket, apply_zero_frequency_cutoff,
                    bose_factor, minkowski_spectrum, rindler_spectrum)

BOUND_TOL = 1e-9


@dataclass(frozen=True)
class MinkRindCoeff:
    region: str
    a_conv: float = 1.0
    D: float = 0.0
    orientation: str = "counter"
    mass: float = 0.1

    def __post_init__(self):
        if self.region not in ("I", "II"):
            raise DomainError("region must be 'I' or 'II'")
        if self.orientation not in ("counter", "parallel"):
            raise DomainError("orientation must be 'counter' or 'parallel'")
        if not (self.a_conv > 0 and self.mass > 0):
            raise DomainError("a_conv and mass must be positive")

    @property
    def conjugated(self) -> bool:
        # region II of the counter geometry is the mirror wedge; parallel II is a shifted copy of I
        return self.region == "II" and self.orientation == "counter"

    @property
    def shift_sign(self) -> int:
        """+1 when the wedge apex sits at +D/2, -1 at -D/2."""
        return 1 if self.region == "I" else -1


def _alpha0(c: MinkRindCoeff, nu, k):
    m = c.mass
    om = np.sqrt(k * k + m * m)
    theta = np.arcsinh(k / m)
    # e^{pi nu/2} / sqrt(sinh(pi nu)) = sqrt(2 / (1 - e^{-2 pi nu}))
    mag = bose_factor(nu) / np.sqrt(4 * math.pi * om * c.a_conv)
    ph = np.exp(-1j * nu * theta)
    val = mag * ph
    return np.conj(val) if c.conjugated else val


def mink_rindler_alpha(c: MinkRindCoeff, Omega, k):
    """alpha_{Omega k} = (u_k, w_Omega) including the wedge-shift phase."""
    Omega = np.asarray(Omega, dtype=float)
    if np.any(Omega <= 0):
        raise DomainError("Omega must be positive")
    nu = Omega / c.a_conv
    k = np.asarray(k, dtype=float)
    return _alpha0(c, nu, k) * np.exp(-0.5j * c.shift_sign * c.D * k)


def mink_rindler_beta(c: MinkRindCoeff, Omega, k):
    """beta_{Omega k} = -e^{-pi Omega/a} alpha_{Omega k}(D=0) with the opposite shift phase."""
    Omega = np.asarray(Omega, dtype=float)
    if np.any(Omega <= 0):
        raise DomainError("Omega must be positive")
    nu = Omega / c.a_conv
    k = np.asarray(k, dtype=float)
    return -np.exp(-math.pi * nu) * _alpha0(c, nu, k) * np.exp(0.5j * c.shift_sign * c.D * k)


def _support(mink: MinkowskiSpectrum, rel: float = 1e-15):
    mag = np.abs(mink.amps_pos) + np.abs(mink.amps_neg)
    keep = mag > rel * mag.max()
    idx = np.nonzero(keep)[0]
    return slice(idx[0], idx[-1] + 1)


def projections(mink: MinkowskiSpectrum, c: MinkRindCoeff, nu: np.ndarray, chunk: int = 64):
    """G = (w_Omega, phi) and H = (w_Omega, phi*) on the orders ``nu``.

    (w, phi)  =  int dk [alpha* (phi, u_k)* + beta* (phi, u_k*)*]
    (w, phi*) = -int dk [alpha* (phi, u_k*) + beta* (phi, u_k)]
    """
    sl = _support(mink)
    k = mink.k_grid[sl]
    wk = mink.weights[sl]
    pos = mink.amps_pos[sl]
    neg = mink.amps_neg[sl]
    m = c.mass
    theta = np.arcsinh(k / m)
    if c.conjugated:
        theta = -theta
    base = wk / np.sqrt(4 * math.pi * np.sqrt(k * k + m * m) * c.a_conv)
    shift = np.exp(0.5j * c.shift_sign * c.D * k)
    # conj(alpha) carries conj(shift), conj(beta) carries shift
    a_pos = base * shift * np.conj(pos)
    a_neg = base * shift * neg
    b_pos = base * np.conj(shift) * pos
    b_neg = base * np.conj(shift) * np.conj(neg)
    has_neg = bool(np.any(neg))
    nu = np.asarray(nu, dtype=float)
    nu_eval = np.where(nu == 0, 1e-9, nu)
    G = np.empty(len(nu), dtype=complex)
    H = np.empty(len(nu), dtype=complex)
    for i in range(0, len(nu), chunk):
        nus = nu_eval[i:i + chunk]
        # e^{i nu theta} row by row; exact exp at the chunk start, recurrence within it
        rows = np.empty((len(nus), len(k)), dtype=complex)
        rows[0] = np.exp(1j * nus[0] * theta)
        if len(nus) > 1:
            d = np.diff(nus)
            if np.allclose(d, d[0], rtol=1e-12, atol=0):
                step = np.exp(1j * d[0] * theta)
                for j in range(1, len(nus)):
                    rows[j] = rows[j - 1] * step
            else:
                rows[1:] = np.exp(1j * nus[1:, None] * theta)
        bf = bose_factor(nus)
        ef = np.exp(-math.pi * nus)
        g = rows @ a_pos
        h_b = rows @ b_pos
        h = 0.0
        if has_neg:
            g = g - ef * (rows @ b_neg)
            h = rows @ a_neg
        G[i:i + chunk] = bf * g
        H[i:i + chunk] = -bf * (h - ef * h_b)
    return G, H


def projection_on_rindler(mink: MinkowskiSpectrum, c: MinkRindCoeff, nu: np.ndarray,
                          conjugate_field: bool = False) -> np.ndarray:
    """(w_Omega, phi), or (w_Omega, phi*) with ``conjugate_field``."""
    G, H = projections(mink, c, nu)
    return H if conjugate_field else G


@dataclass(frozen=True)
class OverlapCoeffs:
    alpha_I: complex
    beta_I: complex
    alpha_II: complex
    beta_II: complex

    def __post_init__(self):
        for name in ("alpha_I", "beta_I", "alpha_II", "beta_II"):
            if abs(getattr(self, name)) > 1 + BOUND_TOL:
                raise InconsistencyError(f"|{name}| = {abs(getattr(self, name)):.6g} exceeds 1")

    def check_noise_bound(self, n_I: float, n_II: float, slack: float = 1e-15) -> bool:
        """2|beta|^2 <= N for both modes."""
        return (2 * abs(self.beta_I) ** 2 <= n_I + slack) and (2 * abs(self.beta_II) ** 2 <= n_II + slack)


def overlap_pair(mink: MinkowskiSpectrum, spec: RindlerSpectrum, c: MinkRindCoeff) -> tuple[complex, complex]:
    """alpha = (psi, phi) and beta = -(psi, phi*) from positive-frequency spectra."""
    nu = spec.nu
    w = spec.weights
    amps = spec.amps
    G, H = projections(mink, c, nu)
    alpha = complex(np.sum(w * amps * G))
    beta = complex(-np.sum(w * amps * H))
    return alpha, beta


def _as_spectrum(psi, a_conv: float) -> RindlerSpectrum:
    if isinstance(psi, WavePacket):
        return apply_zero_frequency_cutoff(rindler_spectrum(psi, a_conv))
    if isinstance(psi, RindlerSpectrum):
        if psi.amps_neg is not None and np.any(psi.amps_neg):
            return apply_zero_frequency_cutoff(psi)
        return psi
    raise TypeError("psi must be a WavePacket or RindlerSpectrum")


def mode_overlaps(phi_I: WavePacket, phi_II: WavePacket, psi_I, psi_II, c: MinkRindCoeff) -> OverlapCoeffs:
    """alpha_L, beta_L for both modes through the zero-frequency cutoff route.

    ``c`` fixes a_conv, D, orientation and mass; its region is ignored.
    """
    out = []
    for phi, psi, region in ((phi_I, psi_I, "I"), (phi_II, psi_II, "II")):
        cr = replace(c, region=region)
        spec = _as_spectrum(psi, c.a_conv)
        mink = apply_zero_frequency_cutoff(minkowski_spectrum(phi))
        out.extend(overlap_pair(mink, spec, cr))
    return OverlapCoeffs(out[0], out[1], out[2], out[3])


def _block(alpha: complex, beta: complex) -> np.ndarray:
    return np.array([
        [(alpha - beta).real, -(alpha + beta).imag],
        [(alpha - beta).imag, (alpha + beta).real],
    ])


def build_M(o: OverlapCoeffs) -> np.ndarray:
    M = np.zeros((4, 4))
    M[:2, :2] = _block(o.alpha_I, o.beta_I)
    M[2:, 2:] = _block(o.alpha_II, o.beta_II)
    return M
