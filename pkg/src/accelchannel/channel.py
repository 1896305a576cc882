"""Two-mode Gaussian states and channels, single-mode reduction and capacity bounds.

Covariance matrices use the convention where the vacuum is the identity.
Quadratures are ordered (x_I, p_I, x_II, p_II).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InconsistencyError

J2 = np.array([[0.0, 1.0], [-1.0, 0.0]])
SIGMA = np.block([[J2, np.zeros((2, 2))], [np.zeros((2, 2)), J2]])
PHYS_TOL = 1e-8


@dataclass
class LogBases:
    capacity: float = 2.0
    negativity: float = math.e


LOG_BASES = LogBases()


def set_log_bases(capacity: float | None = None, negativity: float | None = None) -> None:
    """Change the logarithm bases used for capacities (default 2) and negativity (default e)."""
    for v in (capacity, negativity):
        if v is not None and not (v > 0 and v != 1):
            raise DomainError("log base must be positive and != 1")
    if capacity is not None:
        LOG_BASES.capacity = float(capacity)
    if negativity is not None:
        LOG_BASES.negativity = float(negativity)


def min_uncertainty_eig(cov: np.ndarray) -> float:
    n = cov.shape[0]
    sig = SIGMA if n == 4 else J2
    return float(np.linalg.eigvalsh(cov + 1j * sig).min())


@dataclass(frozen=True, eq=False)
class GaussianState:
    first_moments: np.ndarray
    cov: np.ndarray
    excess: np.ndarray | None = None  # cov - I, when known more precisely than cov itself

    def __post_init__(self):
        cov = np.asarray(self.cov, dtype=float)
        X = np.asarray(self.first_moments, dtype=float)
        if cov.shape != (4, 4) or X.shape != (4,):
            raise DomainError("two-mode states need a 4-vector and a 4x4 covariance")
        if np.max(np.abs(cov - cov.T)) > 1e-12 * max(1.0, np.max(np.abs(cov))):
            raise DomainError("covariance matrix is not symmetric")
        object.__setattr__(self, "cov", 0.5 * (cov + cov.T))
        object.__setattr__(self, "first_moments", X)
        if self.excess is not None:
            ex = np.asarray(self.excess, dtype=float)
            object.__setattr__(self, "excess", 0.5 * (ex + ex.T))
        lam = min_uncertainty_eig(self.cov)
        if lam < -PHYS_TOL:
            raise InconsistencyError(f"covariance violates the uncertainty relation (min eigenvalue {lam:.3g})")

    @classmethod
    def from_excess(cls, first_moments, excess) -> "GaussianState":
        ex = np.asarray(excess, dtype=float)
        return cls(first_moments, np.eye(4) + ex, ex)

    def excess_matrix(self) -> np.ndarray:
        return self.excess if self.excess is not None else self.cov - np.eye(4)


def vacuum_state() -> GaussianState:
    return GaussianState(np.zeros(4), np.eye(4), np.zeros((4, 4)))


def squeezed_thermal_state(r: float, n: float) -> GaussianState:
    if n < 0:
        raise DomainError("thermal occupation n must be >= 0")
    c, s = math.cosh(2 * r), math.sinh(2 * r)
    cov = (1 + 2 * n) * np.array([
        [c, 0, s, 0],
        [0, c, 0, -s],
        [s, 0, c, 0],
        [0, -s, 0, c],
    ])
    # cov - I written without the cancellation in cosh(2r) - 1
    ex = cov - np.eye(4)
    d = 2 * math.sinh(r) ** 2 * (1 + 2 * n) + 2 * n
    ex[0, 0] = ex[1, 1] = ex[2, 2] = ex[3, 3] = d
    return GaussianState(np.zeros(4), cov, ex)


def coherent_state(displacement) -> GaussianState:
    d = np.asarray(displacement, dtype=float)
    return GaussianState(d, np.eye(4), np.zeros((4, 4)))


@dataclass(frozen=True, eq=False)
class ChannelMatrices:
    M: np.ndarray
    N: np.ndarray
    geometry: object = None
    mode_descriptors: tuple = ()
    vacuum_excess: np.ndarray | None = None  # M M^T + N - I, if known exactly
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        M = np.asarray(self.M, dtype=float)
        N = np.asarray(self.N, dtype=float)
        if M.shape != (4, 4) or N.shape != (4, 4):
            raise DomainError("M and N must be 4x4")
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "N", 0.5 * (N + N.T))
        lam = self.cp_eigenvalue()
        if lam < -PHYS_TOL:
            raise InconsistencyError(f"channel is not completely positive (min eigenvalue {lam:.3g})")

    def cp_eigenvalue(self) -> float:
        """Smallest eigenvalue of N + i Sigma - i M Sigma M^T."""
        A = self.N + 1j * SIGMA - 1j * self.M @ SIGMA @ self.M.T
        return float(np.linalg.eigvalsh(A).min())


def apply_two_mode(ch: ChannelMatrices, s: GaussianState) -> GaussianState:
    X = ch.M @ s.first_moments
    cov = ch.M @ s.cov @ ch.M.T + ch.N
    ex = None
    if ch.vacuum_excess is not None:
        ex = ch.M @ s.excess_matrix() @ ch.M.T + ch.vacuum_excess
        cov = np.eye(4) + ex
    try:
        return GaussianState(X, cov, ex)
    except InconsistencyError as err:
        raise InconsistencyError(f"channel output is unphysical: {err}") from None


def apply_two_mode_approx(M: np.ndarray, s: GaussianState) -> GaussianState:
    """sigma' - I = M (sigma - I) M^T; valid when N is negligible against the input."""
    M = np.asarray(M, dtype=float)
    ex = M @ s.excess_matrix() @ M.T
    return GaussianState(M @ s.first_moments, np.eye(4) + ex, ex)


def reduce_single_mode(ch: ChannelMatrices) -> tuple[np.ndarray, np.ndarray]:
    """Trace out mode II: the upper-left blocks of M and N."""
    M_sm = ch.M[:2, :2].copy()
    N_sm = ch.N[:2, :2].copy()
    return M_sm, 0.5 * (N_sm + N_sm.T)


@dataclass(frozen=True)
class SingleModeCanonical:
    tau: float
    nbar: float
    rank: int

    @property
    def noise(self) -> float:
        """The canonical added noise (1 - tau)(2 nbar + 1)."""
        return (1 - self.tau) * (2 * self.nbar + 1)

    def matrices(self):
        t = self.tau
        return math.sqrt(abs(t)) * np.eye(2), abs(1 - t) * (2 * self.nbar + 1) * np.eye(2)


def canonical_form(M_sm: np.ndarray, N_sm: np.ndarray) -> SingleModeCanonical:
    M_sm = np.asarray(M_sm, dtype=float)
    N_sm = np.asarray(N_sm, dtype=float)
    tau = float(np.linalg.det(M_sm))
    if not -1 - 1e-12 <= tau <= 1 + 1e-12:
        raise DomainError("det M_sm must lie in [-1, 1]")
    detN = float(np.linalg.det(N_sm))
    if detN < -1e-12:
        raise InconsistencyError(f"det N_sm = {detN:.3g} is negative")
    detN = max(detN, 0.0)
    root = math.sqrt(detN)
    if abs(tau - 1) < 1e-12:
        nbar = root
    else:
        gap = abs(1 - tau)
        nbar = (root - gap) / (2 * gap)
    nbar = max(nbar, 0.0)
    rank = min(_rank(M_sm), _rank(N_sm))
    return SingleModeCanonical(tau, nbar, rank)


def _rank(A: np.ndarray, rel: float = 1e-10) -> int:
    s = np.linalg.svd(A, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > rel * s[0]))


def _log(x, base):
    return math.log(x) / math.log(base)


def entropy_g(x: float, base: float | None = None, strict: bool = True) -> float:
    """g(x) = ((x+1)/2) log((x+1)/2) - ((x-1)/2) log((x-1)/2), g(1) = 0.

    With ``strict=False`` arguments below 1 give 0 instead of raising.
    """
    base = LOG_BASES.capacity if base is None else base
    if x < 1:
        if strict and x < 1 - 1e-12:
            raise DomainError("entropy_g needs x >= 1")
        return 0.0
    a = 0.5 * (x + 1)
    b = 0.5 * (x - 1)
    val = a * math.log(a) - (b * math.log(b) if b > 0 else 0.0)
    return val / math.log(base)


def classical_capacity_lb(c: SingleModeCanonical, mbar: float = 1.0, base: float | None = None) -> float:
    """g(2 tau (m - n) + 2 n + 1) - g(2 n (1 - tau)), with g = 0 below 1."""
    if mbar < 0:
        raise DomainError("mbar must be >= 0")
    if mbar < c.nbar:
        warnings.warn("mbar is below the channel's thermal number; the bound is clamped", stacklevel=2)
        mbar = c.nbar
    t, n = c.tau, c.nbar
    first = entropy_g(2 * t * (mbar - n) + 2 * n + 1, base, strict=False)
    second = entropy_g(2 * n * (1 - t), base, strict=False)
    return first - second


def quantum_capacity_lb(c: SingleModeCanonical, base: float | None = None) -> float:
    """max(0, log|tau / (1 - tau)| - g(2 nbar + 1))."""
    base = LOG_BASES.capacity if base is None else base
    t = c.tau
    if abs(t - 1) < 1e-12:
        # the bound diverges at tau = 1
        return math.inf
    if t == 0:
        return 0.0
    val = _log(abs(t / (1 - t)), base) - entropy_g(2 * c.nbar + 1, base)
    return max(0.0, val)
