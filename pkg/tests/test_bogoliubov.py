import math

import numpy as np
import pytest

from accelchannel import bogoliubov as bg
from accelchannel import modes as md
from accelchannel import pipeline as pl
from accelchannel.errors import DomainError, InconsistencyError

M = 0.1


def _tapered_k_integral(c, nu, xi, conj, sigma=8.0):
    # dk = omega d theta on a rapidity grid; a Gaussian taper stands in for the infinite line
    th = np.linspace(-12 * sigma, 12 * sigma, 200001)
    k = M * np.sinh(th)
    om = M * np.cosh(th)
    taper = np.exp(-0.5 * (th / sigma) ** 2)
    a1 = bg.mink_rindler_alpha(c, nu * c.a_conv, k)
    a2 = bg.mink_rindler_alpha(c, xi * c.a_conv, k)
    if conj:
        a2 = np.conj(a2)
    return np.trapezoid(a1 * a2 * om * taper, th)


@pytest.mark.parametrize("a_conv", [0.5, 1.0, 2.0])
def test_alpha_delta_normalization(a_conv):
    c = bg.MinkRindCoeff("I", a_conv=a_conv, mass=M)
    sigma = 8.0
    for nu, xi in [(1.0, 1.0), (1.0, 1.1), (2.5, 2.4)]:
        val = _tapered_k_integral(c, nu, xi, conj=True, sigma=sigma) * (1 - math.exp(-2 * math.pi * nu))
        # int dk alpha alpha* (1 - e^{-2 pi nu}) -> delta(Omega - Xi); tapered: Gaussian of width 1/sigma in nu
        s = nu - xi
        expected = sigma * math.sqrt(2 * math.pi) * math.exp(-0.5 * (s * sigma) ** 2) / (2 * math.pi * a_conv)
        # off the diagonal the two Bose factors do not cancel exactly
        expected *= 0.5 * (1 - math.exp(-2 * math.pi * nu)) * float(md.bose_factor(nu) * md.bose_factor(xi))
        if s == 0:
            assert val.real == pytest.approx(expected, rel=1e-6)
        assert abs(val - expected) < 1e-6 * sigma / a_conv


def test_alpha_alpha_vanishes():
    c = bg.MinkRindCoeff("I", mass=M)
    for nu, xi in [(1.0, 1.0), (0.7, 2.0), (3.0, 0.5)]:
        assert abs(_tapered_k_integral(c, nu, xi, conj=False)) < 1e-6


def test_beta_relation():
    c = bg.MinkRindCoeff("II", D=1.3, mass=M)
    k = np.linspace(-5, 5, 11)
    b = bg.mink_rindler_beta(c, 0.8, k)
    a0 = bg.mink_rindler_alpha(bg.MinkRindCoeff("II", D=0.0, mass=M), 0.8, k)
    shift = np.exp(-0.5j * 1.3 * k)  # region II apex at -D/2
    assert np.allclose(b, -math.exp(-math.pi * 0.8) * a0 * shift)


def test_coefficient_validation():
    with pytest.raises(DomainError):
        bg.MinkRindCoeff("III")
    with pytest.raises(DomainError):
        bg.mink_rindler_alpha(bg.MinkRindCoeff("I"), 0.0, 1.0)


def test_projections_match_direct_sum(mink01):
    c = bg.MinkRindCoeff("I", mass=M)
    nu = np.array([0.3, 1.7, 5.0, 5.05])
    G, H = bg.projections(mink01, c, nu)
    k, w = mink01.k_grid, mink01.weights
    for i, v in enumerate(nu):
        a = bg.mink_rindler_alpha(c, v, k)
        b = bg.mink_rindler_beta(c, v, k)
        g = np.sum(w * (np.conj(a) * np.conj(mink01.amps_pos) + np.conj(b) * np.conj(mink01.amps_neg)))
        h = -np.sum(w * (np.conj(a) * mink01.amps_neg + np.conj(b) * mink01.amps_pos))
        assert abs(G[i] - g) < 1e-10 * (abs(g) + 1e-12)
        assert abs(H[i] - h) < 1e-10 * (abs(h) + 1e-20) + 1e-22


def test_self_overlap(input01):
    assert md.kg_inner(input01, input01) == pytest.approx(1.0, abs=1e-12)
    assert abs(md.kg_inner(input01, input01.conj())) < 1e-14


def test_passive_overlaps_near_quoted_values(mode01):
    assert mode01.alpha.real == pytest.approx(0.985, rel=0.01)
    assert abs(mode01.alpha.imag) < 1e-12
    beta = abs(mode01.beta)
    assert 4.51e-12 <= beta <= 4.51e-10


def test_passive_overlap_regression(mode01):
    assert mode01.alpha.real == pytest.approx(0.9767195, abs=2e-6)
    assert mode01.beta.real == pytest.approx(5.2389e-12, rel=1e-3)


def test_cutoff_route_close_to_direct_overlap(mode01, passive01, input01):
    direct = md.kg_inner(passive01, input01).real
    assert abs(mode01.alpha.real - direct) < 1e-3


def test_active_alpha_is_unity():
    d = pl.mode_data(pl.ModeSetup(0.1, kind="active"))
    assert abs(d.alpha - 1) < 1e-3


def test_mode_overlaps_region_symmetry(input01, passive01):
    phi_II = md.build_input_mode(md.standard_params("inertial", 0.1, region="II"))
    pp = md.standard_params("passive_output", 0.1, region="II")
    psi_II = md.build_passive_output_mode(pp)
    o = bg.mode_overlaps(input01, phi_II, passive01, psi_II, bg.MinkRindCoeff("I", mass=M))
    assert o.alpha_I == pytest.approx(o.alpha_II, rel=1e-9)
    assert o.beta_I == pytest.approx(o.beta_II, rel=1e-6)


def test_build_M_examples():
    assert np.array_equal(bg.build_M(bg.OverlapCoeffs(1, 0, 1, 0)), np.eye(4))
    M_ = bg.build_M(bg.OverlapCoeffs(1j, 0, 1, 0))
    assert np.allclose(M_[:2, :2], [[0, -1], [1, 0]])
    M_ = bg.build_M(bg.OverlapCoeffs(0.985, 4.51e-11, 0.985, 4.51e-11))
    assert np.linalg.det(M_[:2, :2]) == pytest.approx(0.970225, rel=1e-9)


def test_block_determinant_identity():
    rng = np.random.default_rng(0)
    for _ in range(50):
        a = complex(*rng.uniform(-0.7, 0.7, size=2))
        b = complex(*rng.uniform(-0.1, 0.1, size=2))
        M_ = bg.build_M(bg.OverlapCoeffs(a, b, 1, 0))
        assert np.linalg.det(M_[:2, :2]) == pytest.approx(abs(a) ** 2 - abs(b) ** 2, abs=1e-14)


def test_overlap_bound_enforced():
    with pytest.raises(InconsistencyError):
        bg.OverlapCoeffs(1.01, 0, 1, 0)


def test_beta_shrinks_with_frequency():
    betas = [abs(pl.mode_data(pl.ModeSetup(0.1, wavenumber=k)).beta) for k in (2.5, 5.0, 10.0)]
    assert betas[0] > betas[1] > betas[2]


def test_noise_bound(mode01):
    o = bg.OverlapCoeffs(mode01.alpha, mode01.beta, mode01.alpha, mode01.beta)
    assert o.check_noise_bound(mode01.n_unruh, mode01.n_unruh)
