"""Logarithmic negativity and Uhlmann fidelity for two-mode Gaussian states."""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .channel import LOG_BASES, SIGMA, GaussianState
from .errors import DomainError, InconsistencyError

# The noise terms of interest are ~1e-12 and below, so the partial-transpose
# eigenvalue differs from 1 beyond double precision; it is evaluated from
# sigma - I in extended precision.
MP_DPS = 50


@dataclass(frozen=True)
class NegativityResult:
    value: float
    min_pt_symplectic_eig: float


def _det2(a, b, c, d):
    return a * d - b * c


def _mp_det4(m):
    return mpmath.det(mpmath.matrix(m))


def log_negativity(s: GaussianState, base: float | None = None) -> NegativityResult:
    """E_N = max(0, -log nu~) with nu~ the smaller symplectic eigenvalue after partial transpose.

    The partial transpose flips the sign of p_II, which changes the sign of det C.
    """
    base = LOG_BASES.negativity if base is None else base
    X = s.excess_matrix()
    with mpmath.workdps(MP_DPS):
        one = mpmath.mpf(1)
        S = [[(one if i == j else 0) + mpmath.mpf(float(X[i][j])) for j in range(4)] for i in range(4)]
        detA = _det2(S[0][0], S[0][1], S[1][0], S[1][1])
        detB = _det2(S[2][2], S[2][3], S[3][2], S[3][3])
        detC = _det2(S[0][2], S[0][3], S[1][2], S[1][3])
        dets = _mp_det4(S)
        delta = detA + detB - 2 * detC
        disc = delta * delta - 4 * dets
        if disc < 0:
            if disc < -mpmath.mpf(10) ** -20 * max(1, abs(delta)) ** 2:
                raise InconsistencyError("partial-transpose spectrum is complex")
            disc = mpmath.mpf(0)
        nu2 = (delta - mpmath.sqrt(disc)) / 2
        if nu2 <= 0:
            raise InconsistencyError("partial-transpose eigenvalue is not positive")
        nu = mpmath.sqrt(nu2)
        val = -mpmath.log(nu) / mpmath.log(base)
        value = float(val) if val > 0 else 0.0
        return NegativityResult(value, float(nu))


def vacuum_output_delta(n_I: float, n_II: float, n_plus: complex, n_minus: complex) -> float:
    """Delta~ for the vacuum-output state written in terms of the noise terms."""
    return ((1 + n_I) ** 2 + (1 + n_II) ** 2
            + 2 * (n_plus.real * n_minus.real + n_plus.imag * n_minus.imag))


def _det_one_plus_i_sigma(cov: np.ndarray) -> float:
    """det(I + i Sigma cov) = prod (1 - nu_k^2) over the symplectic eigenvalues.

    Taking the product from the eigenvalues keeps it at roundoff level (not its square
    root) for pure states, where it vanishes.
    """
    nu = np.sort(np.abs(np.linalg.eigvals(SIGMA @ cov).imag))[::2]
    return float(np.prod(1 - nu * nu))


def _fidelity_parts(sf: GaussianState, sd: GaussianState):
    for st in (sf, sd):
        if np.max(np.abs(st.first_moments)) > 1e-12:
            raise DomainError("the fidelity formula needs zero first moments")
    I4 = np.eye(4)
    a, b = sf.cov, sd.cov
    lam = _det_one_plus_i_sigma(a) * _det_one_plus_i_sigma(b)
    gam = np.linalg.det(I4 - SIGMA @ a @ SIGMA @ b)
    dlt = np.linalg.det(a + b)
    return lam, float(np.real(gam)), float(dlt)


def _is_pure(s: GaussianState, tol: float = 1e-12) -> bool:
    return abs(np.linalg.det(s.cov) - 1) < tol * max(1.0, float(np.max(np.abs(s.cov))) ** 4)


def uhlmann_fidelity(sf: GaussianState, sd: GaussianState) -> float:
    """F = 4 / (sqrt(lam) + sqrt(gam) - sqrt((sqrt(lam) + sqrt(gam))^2 - dlt))."""
    lam, gam, dlt = _fidelity_parts(sf, sd)
    if _is_pure(sf) or _is_pure(sd):
        # lam = 0 and gam = dlt analytically; the general form would take sqrt(gam - dlt) of roundoff
        F = 4.0 / math.sqrt(dlt)
        if F > 1 + 1e-9:
            raise InconsistencyError(f"fidelity {F!r} exceeds 1")
        return min(F, 1.0)
    scale = max(1.0, abs(gam), abs(dlt))
    if lam < -1e-10 * scale or gam < -1e-10 * scale:
        raise InconsistencyError("negative determinant in the fidelity formula")
    root = math.sqrt(max(lam, 0.0)) + math.sqrt(max(gam, 0.0))
    rad = root * root - dlt
    if rad < -1e-10 * scale:
        raise InconsistencyError("negative radicand in the fidelity formula")
    F = 4.0 / (root - math.sqrt(max(rad, 0.0)))
    if F > 1 + 1e-9:
        raise InconsistencyError(f"fidelity {F!r} exceeds 1")
    return min(F, 1.0)


def pure_state_fidelity(sf: GaussianState, sd: GaussianState) -> float:
    """F = 4 / sqrt(det(sf + sd)), valid when sf is pure."""
    return 4.0 / math.sqrt(np.linalg.det(sf.cov + sd.cov))
