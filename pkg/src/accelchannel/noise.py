"""The noise matrix N: Unruh diagonal terms and the cross-wedge correlations.

All integrals are written with the reduced amplitudes
b(nu) = (psi, w_Omega) * sqrt(2 / (1 - exp(-2 pi nu))), which stay finite at
nu = 0 (see ``RindlerSpectrum.bose``).  For D != 0 the double integral over
(Omega, Xi) is done in the rotated variables u = nu - xi and v = nu + xi: on a
common uniform nu grid the sum over pairs with fixed u (or v) is a discrete
correlation (or convolution), so each Bessel kernel is evaluated once per
diagonal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import specfun
from .errors import DomainError, InconsistencyError
from .modes import RindlerSpectrum, nu_weights

D_EPS_SCALE = 1e-6
LARGE_X = 40.0
# Cutoff output modes keep a small tail along their own horizon.  With D < 0 the
# apex of each wedge lies inside the other wedge, so the mode envelope there
# must be negligible for the two modes to stay independent.
APEX_ENVELOPE_TOL = 1e-9
SIGMA = np.array([[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]], dtype=float)


@dataclass(frozen=True)
class Geometry:
    D: float = 0.0
    orientation: str = "counter"
    accel_I: float = 0.1
    accel_II: float = 0.1
    L: float | None = None

    def __post_init__(self):
        if self.orientation not in ("counter", "parallel"):
            raise DomainError("orientation must be 'counter' or 'parallel'")
        if not (self.accel_I > 0 and self.accel_II > 0):
            raise DomainError("accelerations must be positive")
        if self.L is not None and self.separation <= 3 * self.L:
            raise DomainError(f"modes are {self.separation:.4g} apart; need more than 3L = {3 * self.L:.4g}")
        if self.L is not None and self.orientation == "counter" and self.D < 0:
            for acc in (self.accel_I, self.accel_II):
                env = self.apex_envelope(acc)
                if env > APEX_ENVELOPE_TOL:
                    raise DomainError(f"D = {self.D:.4g}: the other wedge's apex sits inside a mode "
                                      f"(envelope {env:.2g} there)")

    def apex_envelope(self, accel: float) -> float:
        """Log-Gaussian envelope of a mode at 1/accel, evaluated at the other wedge's apex (D < 0)."""
        c = 1 / accel
        if self.D >= 0:
            return 0.0
        return math.exp(-2 * (c / self.L * math.log(-self.D / c)) ** 2)

    @property
    def separation(self) -> float:
        """Distance between the two mode centers on the t = 0 slice."""
        if self.orientation == "counter":
            return 1 / self.accel_I + 1 / self.accel_II + self.D
        return abs(1 / self.accel_I - 1 / self.accel_II + self.D)


@dataclass(frozen=True, eq=False)
class NoiseMatrix:
    n_I: float
    n_II: float
    n_cross_plus: complex
    n_cross_minus: complex
    matrix: np.ndarray
    vacuum_excess: np.ndarray = field(default=None)
    error_estimate: float = 0.0

    @property
    def excess(self) -> np.ndarray:
        """sigma_vac_out - I, kept separately so tiny noise terms are not lost next to 1."""
        return self.vacuum_excess


class CrossTerms(tuple):
    """(N+, N-) carrying an error estimate and a convergence flag."""

    def __new__(cls, plus, minus, error_estimate=0.0, converged=True):
        obj = super().__new__(cls, (complex(plus), complex(minus)))
        obj.error_estimate = float(error_estimate)
        obj.converged = bool(converged)
        return obj


def unruh_diagonal(spec: RindlerSpectrum) -> float:
    """N = int dOmega |(psi, w_Omega)|^2 e^{-pi nu} / sinh(pi nu) = int dOmega |b|^2 e^{-2 pi nu}."""
    b = _bose(spec)
    return float(np.sum(spec.weights * np.abs(b) ** 2 * np.exp(-2 * np.pi * spec.nu)))


def _bose(spec: RindlerSpectrum) -> np.ndarray:
    if spec.bose is not None:
        return spec.bose
    from .modes import bose_factor

    b = spec.amps * bose_factor(spec.nu)
    if spec.nu[0] == 0 and len(b) > 2:
        b[0] = 2 * b[1] - b[2]
    return b


def _common(spec_I: RindlerSpectrum, spec_II: RindlerSpectrum):
    if abs(spec_I.a_conv - spec_II.a_conv) > 1e-14 * spec_I.a_conv:
        raise DomainError("spectra must share the convention parameter a")
    if abs(spec_I.step - spec_II.step) > 1e-12 or spec_I.nu[0] != 0 or spec_II.nu[0] != 0:
        raise DomainError("spectra must share a uniform nu grid starting at 0")
    n = max(len(spec_I.nu), len(spec_II.nu))
    b1 = np.zeros(n, dtype=complex)
    b2 = np.zeros(n, dtype=complex)
    b1[:len(spec_I.nu)] = _bose(spec_I)
    b2[:len(spec_II.nu)] = _bose(spec_II)
    h = spec_I.step
    return b1, b2, h * np.arange(n), h, spec_I.a_conv


def _d_eps(spec: RindlerSpectrum) -> float:
    return D_EPS_SCALE / spec.mass


def _kernel_sum(f, g, h, x, sign, mode, a_conv, weights=None):
    """(1/(pi a)) sum_ij W_i f_i W_j g_j kernel(nu_i -+ xi_j) with kernel e^{sign pi t/2} K_{it}(x).

    ``mode`` is "diff" (t = nu - xi) or "sum" (t = nu + xi).  Returns (value, scale)
    where scale bounds the magnitude of the individual terms.
    """
    n = len(f)
    w = a_conv * (nu_weights(n, h) if weights is None else weights)
    fw = w * f
    gw = w * g
    pref = 1.0 / (math.pi * a_conv)
    if x > LARGE_X:
        # |K_{it}(x)| <= K_0(x) and e^{sign pi t/2} factorizes over the two indices
        e1 = np.exp(0.5 * sign * np.pi * h * np.arange(n))
        e2 = e1 if mode == "sum" else 1 / e1
        bound = pref * _k0(x) * np.sum(np.abs(fw) * e1) * np.sum(np.abs(gw) * e2)
        return 0.0j, bound
    if mode == "diff":
        c = np.correlate(fw, np.conj(gw), "full")
        t = h * (np.arange(len(c)) - (n - 1))
    else:
        c = np.convolve(fw, gw)
        t = h * np.arange(len(c))
    live = np.abs(c) > 0
    kern = np.zeros(len(t))
    kern[live] = specfun.kernel_k_exp(t[live], x, sign)
    val = pref * np.sum(c * kern)
    # rounding in the pair sums is bounded by eps times the sum of absolute products
    ca = np.correlate(np.abs(fw), np.abs(gw), "full") if mode == "diff" else np.convolve(np.abs(fw), np.abs(gw))
    scale = pref * float(np.sum(ca * np.abs(kern)))
    return complex(val), scale


def _k0(x: float) -> float:
    from scipy.special import k0

    return float(k0(x))


def _half(arr):
    return arr[::2]


def _combine(terms, h, n, a_conv, rel_tol, abs_tol):
    """Evaluate a list of kernel sums on the full and the half grid; return values and error."""
    full = []
    err = 0.0
    for f, g, x, sign, mode in terms:
        v, scale = _kernel_sum(f, g, h, x, sign, mode, a_conv)
        v2, _ = _kernel_sum(_half(f), _half(g), 2 * h, x, sign, mode, a_conv)
        if x > LARGE_X:
            full.append(0j)
            err += scale
            continue
        full.append(v)
        # 4th-order end correction: the h-grid error is about |T_h - T_2h| / 15
        err += abs(v - v2) / 15 + 8 * np.finfo(float).eps * scale
    return full, err


def _result(plus, minus, err, rel_tol=1e-3, abs_tol=1e-14):
    ok = err <= max(abs_tol, rel_tol * max(abs(plus), abs(minus)))
    return CrossTerms(plus, minus, err, ok)


def cross_counter(spec_I: RindlerSpectrum, spec_II: RindlerSpectrum, geom: Geometry,
                  rel_tol: float = 1e-3, abs_tol: float = 1e-14) -> CrossTerms:
    """(N+, N-) for counter-accelerated modes separated by the wedge gap D."""
    if geom.orientation != "counter":
        raise DomainError("cross_counter needs a counter geometry")
    b1, b2, nu, h, a = _common(spec_I, spec_II)
    D = geom.D
    if abs(D) < _d_eps(spec_I):
        w = a * nu_weights(len(nu), h)
        v = complex(np.sum(w * b1 * b2 * np.exp(-np.pi * nu)))
        v2 = complex(np.sum(a * nu_weights(len(nu[::2]), 2 * h) * (b1 * b2 * np.exp(-np.pi * nu))[::2]))
        err = abs(v - v2) / 15
        return _result(v, v, err, rel_tol, abs_tol)
    x = spec_I.mass * abs(D)
    en = np.exp(-np.pi * nu)
    if D > 0:
        terms = [(b1, b2 * en, x, -1, "diff"),
                 (b1 * en, np.conj(b2) * en, x, 1, "sum")]
    else:
        terms = [(b1, b2 * en, x, 1, "diff"),
                 (b1, np.conj(b2), x, 1, "sum")]
    (t1, t2), err = _combine(terms, h, len(nu), a, rel_tol, abs_tol)
    return _result(t1 + t2, t1 - t2, err, rel_tol, abs_tol)


def cross_parallel(spec_I: RindlerSpectrum, spec_II: RindlerSpectrum, geom: Geometry,
                   rel_tol: float = 1e-3, abs_tol: float = 1e-14) -> CrossTerms:
    """(N+, N-) for two modes accelerated in the same direction."""
    if geom.orientation != "parallel":
        raise DomainError("cross_parallel needs a parallel geometry")
    b1, b2, nu, h, a = _common(spec_I, spec_II)
    D = geom.D
    if abs(D) < _d_eps(spec_I):
        w = a * nu_weights(len(nu), h)
        v = complex(np.sum(w * b1 * np.conj(b2)))
        v2 = complex(np.sum(a * nu_weights(len(nu[::2]), 2 * h) * (b1 * np.conj(b2))[::2]))
        err = abs(v - v2) / 15
        return _result(v, -v, err, rel_tol, abs_tol)
    x = spec_I.mass * abs(D)
    en = np.exp(-np.pi * nu)
    s = -1 if D > 0 else 1
    terms = [(b1, b2 * en, x, s, "sum"),
             (b1, np.conj(b2), x, s, "diff")]
    (t1, t2), err = _combine(terms, h, len(nu), a, rel_tol, abs_tol)
    return _result(t1 + t2, t1 - t2, err, rel_tol, abs_tol)


def vacuum_output_excess(n_I: float, n_II: float, n_plus: complex, n_minus: complex) -> np.ndarray:
    """sigma_out - I for vacuum input: diagonal Unruh terms plus the cross block."""
    X = np.zeros((4, 4))
    X[0, 0] = X[1, 1] = n_I
    X[2, 2] = X[3, 3] = n_II
    X[0, 2] = n_plus.real
    X[0, 3] = n_minus.imag
    X[1, 2] = n_plus.imag
    X[1, 3] = -n_minus.real
    X[2:, :2] = X[:2, 2:].T
    return X


def build_N(n_I: float, n_II: float, n_plus: complex, n_minus: complex, M: np.ndarray,
            error_estimate: float = 0.0, tol: float = 1e-8) -> NoiseMatrix:
    """N = sigma_vac_out - M M^T, with a physicality check on sigma_vac_out."""
    if n_I < 0 or n_II < 0:
        raise InconsistencyError("Unruh terms must be nonnegative")
    M = np.asarray(M, dtype=float)
    X = vacuum_output_excess(n_I, n_II, complex(n_plus), complex(n_minus))
    sigma = np.eye(4) + X
    lam = np.linalg.eigvalsh(sigma + 1j * SIGMA).min()
    if lam < -tol:
        raise InconsistencyError(f"vacuum output violates the uncertainty relation (min eigenvalue {lam:.3g})")
    N = sigma - M @ M.T
    N = 0.5 * (N + N.T)
    return NoiseMatrix(float(n_I), float(n_II), complex(n_plus), complex(n_minus), N, X, error_estimate)
