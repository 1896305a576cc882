import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import gammainc

from accelchannel import modes as md
from accelchannel.errors import DomainError


def test_params_validation():
    with pytest.raises(DomainError):
        md.standard_params("passive_output", 0.3)  # accel * L = 0.6
    with pytest.raises(DomainError):
        md.ModeParams("I", -10.0, 2.0, 5.0, 0.1, 0.1, "passive_output")
    with pytest.warns(UserWarning):
        md.standard_params("passive_output", 0.15)
    p = md.standard_params("inertial", 0.1)
    assert p.wavenumber == pytest.approx(5.0, rel=1e-14)
    assert p.Omega0 == pytest.approx(math.sqrt(25.01), rel=1e-14)


def test_input_mode_normalized(input01):
    assert md.kg_inner(input01, input01) == pytest.approx(1.0, abs=1e-6)


def test_input_mode_decays(input01):
    x, v, _ = input01.minkowski_samples()
    far = np.abs(x - 10.0) > 6 * 2.0 * 0.999
    peak = np.max(np.abs(v))
    assert np.all(np.abs(v[far]) < 1e-10 * peak)
    assert input01.edge_ratio() < 1e-10


def test_input_negative_frequency_weight(mink01):
    assert mink01.negative_weight() < 1e-3


def test_minkowski_spectrum_norm(mink01):
    assert mink01.positive_weight() - mink01.negative_weight() == pytest.approx(1.0, abs=1e-6)


def test_passive_mode_shape(passive01):
    assert abs(passive01.center - 10.0) < 0.2 * 2.0
    assert md.kg_inner(passive01, passive01) == pytest.approx(1.0, abs=1e-6)
    assert passive01.log_uniform


def test_passive_peak_matches_input(passive01, input01):
    assert abs(passive01.center - input01.center) < 0.1 * 2.0


def test_rindler_spectrum_normalization(passive_spectrum01):
    s = passive_spectrum01
    assert s.norm() == pytest.approx(1.0, abs=1e-4)
    a = np.abs(s.amps)
    assert a[0] == 0.0
    assert a[-1] < 1e-8 * a.max()


def test_negative_weights_regression(passive_spectrum01, mink01):
    # regression values for the A = 0.1, L = 2, k0 = 5, m = 0.1 packets
    assert passive_spectrum01.negative_weight() == pytest.approx(5.330155e-3, rel=1e-4)
    assert mink01.negative_weight() == pytest.approx(5.370534e-3, rel=1e-4)


def test_direct_overlap_regression(passive01, input01):
    assert md.kg_inner(passive01, input01) == pytest.approx(0.9771643, abs=1e-6)


def test_disjoint_packets_do_not_overlap(input01):
    far = md.build_input_mode(md.standard_params("inertial", 0.0, x0=60.0))
    assert md.kg_inner(input01, far) == 0
    mirror = md.build_input_mode(md.standard_params("inertial", 0.1, region="II"))
    assert md.kg_inner(input01, mirror) == 0


def test_kg_conjugate_antisymmetry():
    p1 = md.standard_params("inertial", 0.1)
    p2 = md.standard_params("inertial", 0.0, x0=10.7, wavenumber=4.0, L=1.5)
    f = md.build_input_mode(p1)
    g = md.build_input_mode(p2)
    g = replace(g, value=g.value * np.exp(0.3j), tderiv=g.tderiv * np.exp(0.3j))
    a = md.kg_inner(f, g)
    assert abs(a - np.conj(md.kg_inner(g, f))) < 1e-10
    assert abs(a + md.kg_inner(g.conj(), f.conj())) < 1e-10


def test_plane_waves_orthogonal_on_box():
    # unit-normalized box modes e^{ikx}/sqrt(2 w L) on a periodic box
    Lbox = 40.0
    x = np.linspace(0, Lbox, 4001)
    m = 0.1

    def wave(n):
        k = 2 * math.pi * n / Lbox
        w = math.hypot(k, m)
        v = np.exp(1j * k * x) / math.sqrt(2 * w * Lbox)
        return md.WavePacket(None, x, v, -1j * w * v)

    for a, b in [(3, 4), (10, 12), (5, -5)]:
        assert abs(md.kg_inner(wave(a), wave(b))) < 1e-6
    assert md.kg_inner(wave(7), wave(7)) == pytest.approx(1.0, abs=1e-3)


def test_cutoff_idempotent_and_rescale(passive_spectrum01):
    c1 = md.apply_zero_frequency_cutoff(passive_spectrum01)
    assert c1.norm() == pytest.approx(1.0, abs=1e-12)
    c2 = md.apply_zero_frequency_cutoff(c1)
    assert c2 is c1
    # a spectrum with positive weight 1 - w is rescaled by 1 / sqrt(1 - w)
    w = 0.2
    amps = c1.amps * math.sqrt(1 - w)
    s = replace(c1, amps=amps, amps_neg=c1.amps * math.sqrt(w), bose=None)
    out = md.apply_zero_frequency_cutoff(s)
    assert out.extra["cutoff_scale"] == pytest.approx(1 / math.sqrt(1 - w), rel=1e-12)


def test_envelope_is_nearly_gaussian():
    x0, L = 10.0, 2.0
    x = np.linspace(x0 - L, x0 + L, 401)
    env = md.log_gaussian_envelope(x, x0, L)
    assert np.max(np.abs(env - np.exp(-2 * ((x - x0) / L) ** 2))) < 0.1


def test_rindler_spectrum_a_independence(passive01):
    base = md.apply_zero_frequency_cutoff(md.rindler_spectrum(passive01, 1.0))
    for a in (0.5, 2.0):
        s = md.apply_zero_frequency_cutoff(md.rindler_spectrum(passive01, a))
        # same nu grid; amplitudes scale as a^(-1/2)
        assert np.allclose(s.amps * math.sqrt(a), base.amps, rtol=1e-10, atol=1e-14)
        assert s.norm() == pytest.approx(1.0, abs=1e-10)


def test_text_round_trip(passive01, passive_spectrum01):
    p2 = md.packet_from_text(md.packet_to_text(passive01))
    assert np.array_equal(p2.grid, passive01.grid)
    assert np.array_equal(p2.value, passive01.value)
    s2 = md.spectrum_from_text(md.spectrum_to_text(passive_spectrum01))
    assert np.array_equal(s2.amps, passive_spectrum01.amps)
    assert np.array_equal(s2.amps_neg, passive_spectrum01.amps_neg)
    assert s2.extra == passive_spectrum01.extra


def test_active_mode(input01):
    pkt, spec = md.build_active_output_mode(input01, 0.1)
    assert spec.norm() == pytest.approx(1.0, abs=1e-12)
    assert np.all(spec.amps_neg == 0)
    # direct overlap with the input is the projection weight, slightly above 1 from negative Rindler content
    assert spec.extra["alpha"] == pytest.approx(1.0, abs=5e-3)
    assert md.kg_inner(pkt, pkt) == pytest.approx(1.0, abs=1e-3)


def test_active_mode_needs_inertial_input(passive01):
    with pytest.raises(DomainError):
        md.build_active_output_mode(passive01, 0.1)


def test_bose_factor_limits():
    nu = np.array([1e-9, 1.0, 30.0])
    b = md.bose_factor(nu)
    assert b[2] == pytest.approx(math.sqrt(2), rel=1e-12)
    assert b[1] == pytest.approx(math.sqrt(2 / (1 - math.exp(-2 * math.pi))), rel=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.integers(400, 1500), st.integers(0, 3))
def test_nu_weights_fourth_order(n, p):
    # the right end sits in the decaying tail, so compare with the integral up to the last node
    h = 0.05
    nu = h * np.arange(n)
    val = np.sum(md.nu_weights(n, h) * nu ** p * np.exp(-nu))
    exact = math.factorial(p) * gammainc(p + 1, nu[-1])
    assert val == pytest.approx(exact, rel=2e-6)
