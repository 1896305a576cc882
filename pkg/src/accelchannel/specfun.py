"""Special functions: complex Gamma and modified Bessel functions of imaginary order.

The workhorse for the mode spectra is :func:`bessel_k_imag_scaled`, which returns
``sqrt(sinh(pi*nu)) * K_{i nu}(x)``.  That product stays O(1) for large orders,
whereas ``K_{i nu}`` alone decays like ``exp(-pi*nu/2)`` and the ``sinh`` grows
like ``exp(pi*nu)``.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .errors import ConvergenceError, DomainError

X_SWITCH = 1e-2
I_SERIES_MAX_TERMS = 500
SERIES_X_MAX = 12.0
EULER_GAMMA = 0.57721566490153286061

# Lanczos coefficients, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS_P = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _check_pole(z: complex) -> None:
    if z.real <= 0.5 and abs(z.imag) < 1e-12:
        n = round(-z.real)
        if n >= 0 and abs(z.real + n) < 1e-12:
            raise DomainError(f"Gamma has a pole at z = {-n}")


def gamma_complex(z: complex) -> complex:
    """Gamma function of a complex argument (Lanczos, reflection for Re z < 0.5)."""
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError("gamma_complex needs a finite argument")
    _check_pole(z)
    if z.real < 0.5:
        return math.pi / (cmath.sin(math.pi * z) * gamma_complex(1.0 - z))
    z -= 1.0
    acc = _LANCZOS_P[0]
    for i in range(1, len(_LANCZOS_P)):
        acc += _LANCZOS_P[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * cmath.exp(-t) * acc


def _log_sin_pi(z: np.ndarray) -> np.ndarray:
    # log(sin(pi z)) without overflow for large |Im z|; branch is irrelevant here
    out = np.empty_like(z)
    up = z.imag >= 0
    zu = np.where(up, z, np.conj(z))
    val = -1j * np.pi * zu + np.log(-np.expm1(2j * np.pi * zu)) + math.log(0.5) + 0.5j * np.pi
    out[...] = np.where(up, val, np.conj(val))
    return out


def log_gamma(z) -> np.ndarray:
    """Vectorized log Gamma (Lanczos).  Agrees with Gamma up to a multiple of 2*pi*i."""
    z = np.asarray(z, dtype=complex)
    refl = z.real < 0.5
    w = np.where(refl, 1.0 - z, z) - 1.0
    acc = np.full(w.shape, _LANCZOS_P[0], dtype=complex)
    for i in range(1, len(_LANCZOS_P)):
        acc = acc + _LANCZOS_P[i] / (w + i)
    t = w + _LANCZOS_G + 0.5
    lg = _HALF_LOG_2PI + (w + 0.5) * np.log(t) - t + np.log(acc)
    if np.any(refl):
        lg = np.where(refl, math.log(math.pi) - _log_sin_pi(np.where(refl, z, 0.5)) - lg, lg)
    return lg


def _series_0f1(nu: np.ndarray, q: np.ndarray) -> np.ndarray:
    """sum_k q^k / (k! (1+i nu)_k), elementwise; q = x^2/4."""
    term = np.ones(np.broadcast(nu, q).shape, dtype=complex)
    total = term.copy()
    for k in range(1, I_SERIES_MAX_TERMS + 1):
        term = term * q / (k * (k + 1j * nu))
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            return total
    raise ConvergenceError(f"I_(i nu) series did not converge in {I_SERIES_MAX_TERMS} terms")


def bessel_i_imag(nu: float, x: float) -> complex:
    """Modified Bessel function of the first kind I_{i nu}(x) by its ascending series."""
    if not x > 0:
        raise DomainError("bessel_i_imag needs x > 0")
    if x > 700:
        raise OverflowError("bessel_i_imag: x > 700 is outside the supported range")
    nu = float(nu)
    s = complex(_series_0f1(np.asarray(nu), np.asarray(0.25 * x * x)))
    lg = complex(log_gamma(1.0 + 1j * nu))
    logmag = -lg.real
    if logmag > 700:
        raise OverflowError("bessel_i_imag: |1/Gamma(1+i nu)| overflows")
    return s * cmath.exp(1j * nu * math.log(0.5 * x) - lg)


def bessel_i_imag_phased(nu, x) -> np.ndarray:
    """exp(i*nu*log(x/2)) * 0F1(;1+i nu; x^2/4), i.e. I_{i nu}(x) * Gamma(1+i nu).

    Free of the exp(pi*nu/2) growth of I_{i nu}; used for the accelerated-cavity profile.
    """
    nu = np.asarray(nu, dtype=float)
    x = np.asarray(x, dtype=float)
    return np.exp(1j * nu * np.log(0.5 * x)) * _series_0f1(nu, 0.25 * x * x)


def _k_small(nu: float, eps: float) -> float:
    nu = abs(nu)
    if nu < 1e-12:
        return -math.log(eps) - EULER_GAMMA
    # Re[eps^{i nu} Gamma(-i nu)] = -Im[eps^{i nu} Gamma(1 - i nu)] / nu
    lg = complex(log_gamma(1.0 - 1j * nu))
    return -math.exp(lg.real) * math.sin(nu * math.log(eps) + lg.imag) / nu


def bessel_k_imag_small(nu: float, eps: float) -> float:
    """Small-argument form Re[eps^{i nu} Gamma(-i nu)] approximating K_{i nu}(2 eps)."""
    if not 0 < eps < 0.01:
        raise DomainError("bessel_k_imag_small needs 0 < eps < 0.01")
    return _k_small(float(nu), float(eps))


def _k_quad(nu: float, x: float) -> float:
    from .quadrature import IntegrationRequest, integrate_1d

    # the integrand is below 1e-18 * exp(-x) beyond t_max
    t_max = math.acosh(1.0 + 42.0 / x)
    phase = math.pi / nu if nu > 0 else None
    req = IntegrationRequest(
        integrand=lambda t: np.exp(-x * (np.cosh(t) - 1.0)) * np.cos(nu * t),
        domain=((0.0, t_max),),
        rel_tol=1e-12,
        abs_tol=1e-15,
        max_subdivisions=4000,
        phase_scale=phase,
    )
    res = integrate_1d(req)
    if not res.converged:
        raise ConvergenceError(f"K_(i nu) quadrature failed for nu={nu}, x={x}")
    return res.value * math.exp(-x)


def _k_series_scaled(nu: np.ndarray, x: np.ndarray) -> np.ndarray:
    # sqrt(sinh(pi nu)) K_{i nu}(x) = -sqrt(pi/nu) Im[exp(i theta) 0F1(;1+i nu;x^2/4)]
    nu = np.asarray(nu, dtype=float)
    x = np.asarray(x, dtype=float)
    shape = np.broadcast(nu, x).shape
    nu_b, x_b = np.broadcast_arrays(np.atleast_1d(nu), np.atleast_1d(x))
    out = np.zeros(nu_b.shape)
    pos = nu_b > 0
    if np.any(pos):
        n = nu_b[pos]
        xx = x_b[pos]
        theta = n * np.log(0.5 * xx) - log_gamma(1.0 + 1j * n).imag
        s = _series_0f1(n, 0.25 * xx * xx)
        out[pos] = -np.sqrt(np.pi / n) * (np.exp(1j * theta) * s).imag
    return out.reshape(shape)


def _quad_well_conditioned(nu: float, x: float) -> bool:
    # cancellation in the integral representation costs ~exp(pi nu/2 - x)
    return 0.5 * math.pi * abs(nu) - x <= 18.0


def bessel_k_imag(nu: float, x: float, method: str = "auto") -> float:
    """K_{i nu}(x) for real nu and x > 0.

    ``method`` is one of ``auto``, ``quad``, ``small``, ``series``.  In ``auto`` mode
    x < X_SWITCH uses the small-argument form, the integral representation is used
    where it is well conditioned, and the ascending series covers large orders.
    """
    if not x > 0 or not math.isfinite(x):
        raise DomainError("bessel_k_imag needs finite x > 0")
    nu = abs(float(nu))
    if method == "auto":
        if x < X_SWITCH:
            method = "small"
        elif _quad_well_conditioned(nu, x):
            method = "quad"
        elif x <= SERIES_X_MAX:
            method = "series"
        else:
            method = "mp"
    if method == "small":
        return _k_small(nu, 0.5 * x)
    if method == "quad":
        return _k_quad(nu, x)
    if method == "series":
        if nu == 0.0:
            return _k_quad(nu, x)
        scaled = float(_k_series_scaled(np.array(nu), np.array(x)))
        return scaled / math.sqrt(math.sinh(math.pi * nu)) if nu < 200 else (
            scaled * math.sqrt(2.0) * math.exp(-0.5 * math.pi * nu)
        )
    if method == "mp":
        import mpmath

        return float(mpmath.besselk(1j * nu, x).real)
    raise ValueError(f"unknown method {method!r}")


def bessel_k_imag_scaled(nu, x) -> np.ndarray:
    """sqrt(sinh(pi*|nu|)) * K_{i nu}(x), vectorized over broadcastable nu and x.

    Uses the ascending series for x <= SERIES_X_MAX and falls back to the scalar
    evaluator elsewhere.
    """
    nu = np.abs(np.asarray(nu, dtype=float))
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("bessel_k_imag_scaled needs x > 0")
    shape = np.broadcast(nu, x).shape
    nu_b, x_b = np.broadcast_arrays(np.atleast_1d(nu), np.atleast_1d(x))
    out = np.zeros(nu_b.shape)
    small = x_b <= SERIES_X_MAX
    if np.any(small):
        out[small] = _k_series_scaled(nu_b[small], x_b[small])
    for idx in zip(*np.nonzero(~small)):
        n, xv = float(nu_b[idx]), float(x_b[idx])
        if n == 0.0:
            out[idx] = 0.0
            continue
        if _quad_well_conditioned(n, xv):
            k = _k_quad(n, xv)
        else:
            k = bessel_k_imag(n, xv, method="mp")
        out[idx] = k * math.sqrt(math.sinh(math.pi * n)) if n < 200 else (
            k * math.exp(0.5 * math.pi * n) / math.sqrt(2.0)
        )
    return out.reshape(shape)


def kernel_k_exp(theta, x, sign: float = 1.0) -> np.ndarray:
    """exp(sign*pi*theta/2) * K_{i theta}(x), for the wedge-separation kernels.

    With sign=+1 and large theta this is O(1) times theta^(-1/2); with sign=-1 it is
    exponentially small.  Evaluated through the scaled form to avoid overflow.
    """
    theta = np.asarray(theta, dtype=float)
    x = np.asarray(x, dtype=float)
    scaled = bessel_k_imag_scaled(theta, x)
    at = np.abs(theta)
    # exp(s pi theta / 2) / sqrt(sinh(pi |theta|))
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        log_fac = 0.5 * np.pi * sign * theta - 0.5 * (
            np.pi * at + np.log(-np.expm1(-2 * np.pi * at)) - math.log(2.0)
        )
        val = scaled * np.exp(log_fac)
    zero = at < 1e-300
    if np.any(zero):
        _, xb = np.broadcast_arrays(theta, x)
        val = np.array(val, dtype=float)
        val[zero] = [bessel_k_imag(0.0, float(xx)) for xx in np.atleast_1d(xb[zero])]
    return val
