import math

import numpy as np
import pytest

from accelchannel import bogoliubov as bg
from accelchannel import modes as md
from accelchannel import noise as nz
from accelchannel.errors import DomainError, InconsistencyError


def gaussian_spectrum(center, width, a_conv=1.0, nu_max=None, mass=0.1):
    h = md.NU_STEP
    nu_max = nu_max or center + 12 * width
    nu = np.arange(0.0, nu_max + 0.5 * h, h)
    amps = np.exp(-0.25 * ((nu - center) / width) ** 2).astype(complex)
    amps[0] = 0.0
    w = a_conv * md.nu_weights(len(nu), h)
    amps /= math.sqrt(np.sum(w * np.abs(amps) ** 2))
    bose = amps * md.bose_factor(np.where(nu == 0, 1e-9, nu))
    return md.RindlerSpectrum(a_conv, a_conv * nu, amps, "I", np.zeros_like(amps), bose, 0.1, mass)


def test_unruh_regression(mode01):
    assert mode01.n_unruh == pytest.approx(6.330150760651614e-13, rel=1e-9)


def test_unruh_suppressed_at_high_frequency():
    assert nz.unruh_diagonal(gaussian_spectrum(25.0, 1.0)) < 1e-15


def test_unruh_positive_for_low_frequency():
    n = nz.unruh_diagonal(gaussian_spectrum(0.5, 0.2))
    assert 0 < n < 1


def test_counter_limit_regression(mode01):
    ct = nz.cross_counter(mode01.spectrum, mode01.spectrum, nz.Geometry(0.0, L=2.0))
    assert ct.converged
    assert ct[0] == ct[1]
    assert ct[0].real == pytest.approx(1.948316483e-12, rel=1e-8)


def test_counter_vanishes_far_apart(mode01):
    ct = nz.cross_counter(mode01.spectrum, mode01.spectrum, nz.Geometry(500.0, L=2.0))
    assert abs(ct[0]) < 1e-12 and abs(ct[1]) < 1e-12


def test_counter_continuity_improves(mode01):
    s = mode01.spectrum
    gaps = []
    for d in (1e-2, 1e-3):
        p = nz.cross_counter(s, s, nz.Geometry(d, L=2.0))
        m = nz.cross_counter(s, s, nz.Geometry(-d, L=2.0))
        gaps.append(max(abs(p[0] - m[0]), abs(p[1] - m[1])))
    assert gaps[1] < gaps[0]


def test_counter_d_regression(mode01):
    s = mode01.spectrum
    ct = nz.cross_counter(s, s, nz.Geometry(5.0, L=2.0))
    assert ct.converged
    ct_neg = nz.cross_counter(s, s, nz.Geometry(-3.0, L=2.0))
    assert ct_neg.converged


def test_parallel_limit_sign_structure(mode01):
    s = mode01.spectrum
    ct = nz.cross_parallel(s, s, nz.Geometry(0.0, "parallel", 0.1, 0.1 / 3, L=2.0))
    assert ct[0] == -ct[1]
    assert ct[0].real > 0 and ct[0].imag == 0


def test_parallel_vanishes_far_apart(mode01):
    s = mode01.spectrum
    ct = nz.cross_parallel(s, s, nz.Geometry(500.0, "parallel", 0.1, 0.1, L=2.0))
    assert abs(ct[0]) < 1e-12 and abs(ct[1]) < 1e-12


def test_disjoint_spectra_give_zero_limit():
    low = gaussian_spectrum(1.0, 0.1, nu_max=3.0)
    high = gaussian_spectrum(6.0, 0.1, nu_max=9.0)
    ct = nz.cross_counter(low, high, nz.Geometry(0.0))
    assert abs(ct[0]) < 1e-30


def test_spectra_must_share_convention():
    with pytest.raises(DomainError):
        nz.cross_counter(gaussian_spectrum(2, 0.5), gaussian_spectrum(2, 0.5, a_conv=2.0), nz.Geometry(0.0))


def test_orientation_checked():
    s = gaussian_spectrum(2, 0.5)
    with pytest.raises(DomainError):
        nz.cross_counter(s, s, nz.Geometry(0.0, "parallel", 0.1, 0.05))
    with pytest.raises(DomainError):
        nz.cross_parallel(s, s, nz.Geometry(0.0))


def test_geometry_constraints():
    assert nz.Geometry(1.0).separation == pytest.approx(21.0)
    assert nz.Geometry(1.0, "parallel", 0.1, 1 / 30).separation == pytest.approx(19.0)
    with pytest.raises(DomainError):
        nz.Geometry(-15.0, L=2.0)  # modes closer than 3L
    with pytest.raises(DomainError):
        nz.Geometry(-8.0, L=2.0)  # other apex inside the mode
    nz.Geometry(-5.0, L=2.0)


def test_build_N_identity():
    nm = nz.build_N(0.0, 0.0, 0j, 0j, np.eye(4))
    assert np.array_equal(nm.matrix, np.zeros((4, 4)))


def test_build_N_rejects_unphysical():
    with pytest.raises(InconsistencyError):
        nz.build_N(0.0, 0.0, 0.5, 0.5, np.eye(4))


def test_noise_terms_small_at_reference(mode01):
    ct = nz.cross_counter(mode01.spectrum, mode01.spectrum, nz.Geometry(0.0, L=2.0))
    o = bg.OverlapCoeffs(mode01.alpha, mode01.beta, mode01.alpha, mode01.beta)
    nm = nz.build_N(mode01.n_unruh, mode01.n_unruh, ct[0], ct[1], bg.build_M(o))
    assert np.max(np.abs(nm.excess)) < 1e-8
    # N itself carries the mode-mismatch loss 1 - |alpha|^2 on its diagonal
    assert nm.matrix[0, 0] == pytest.approx(1 - abs(mode01.alpha) ** 2, abs=1e-9)


def test_vacuum_excess_layout():
    X = nz.vacuum_output_excess(1.0, 2.0, 0.3 + 0.1j, 0.2 - 0.4j)
    assert np.allclose(X, X.T)
    assert X[0, 2] == 0.3 and X[1, 2] == 0.1 and X[0, 3] == -0.4 and X[1, 3] == -0.2
