import math

import numpy as np
import pytest

from oracles import direct_af
from wblab.ambiguity import (
    HALF_POWER,
    NO_SIDELOBE,
    AFSurface,
    af_cuts,
    af_metrics,
    baf,
    cut_metrics,
    default_delays,
    default_dopplers,
    doppler_scale,
    naf,
    narrowband_doppler,
    resample,
)
from wblab.mtsfm import WaveformParams, random_mtsfm, synthesize, synthesize_cw, synthesize_lfm


@pytest.fixture(scope="module")
def fine_cw():
    """CW pulse at a high sample rate so the discrete AF matches its analytic form."""
    return synthesize_cw(WaveformParams(500.0, 100.0, 1.0, 65536.0))


def test_cw_zero_doppler_cut_is_triangle(fine_cw):
    delays = np.arange(-65536, 65537, 256) / 65536.0
    af = naf(fine_cw, delays, np.array([0.0]))
    np.testing.assert_allclose(af.values[0], np.clip(1 - np.abs(af.delays), 0, None), atol=1e-6)


def test_cw_zero_delay_cut_is_sinc(fine_cw):
    nu = np.linspace(-20, 20, 161)
    af = naf(fine_cw, np.array([0.0]), nu)
    np.testing.assert_allclose(af.values[:, 0], np.abs(np.sinc(nu)), atol=1e-6)


def test_delays_beyond_pulse_are_zero(desk_params):
    w = synthesize_lfm(desk_params)
    delays = np.arange(-2000, 2001, 50) / w.fs
    af = naf(w, delays, np.array([0.0]))
    assert not af.values[0][np.abs(af.delays) >= 1.0].any()


@pytest.fixture(scope="module")
def mtsfm_surface():
    params = WaveformParams.from_q_tbp(5, 100)
    w = synthesize(random_mtsfm(32, "mixed", 100.0, 1.0, 8), params)
    return naf(w, np.arange(-400, 401) / w.fs, np.arange(-40, 41) / 8.0)


def test_origin_and_cauchy_schwarz(mtsfm_surface):
    af = mtsfm_surface
    i0, j0 = np.argmin(np.abs(af.dopplers)), np.argmin(np.abs(af.delays))
    assert af.values[i0, j0] == pytest.approx(1.0, abs=1e-9)
    assert af.values.max() <= 1 + 1e-12


def test_skew_symmetry(mtsfm_surface):
    v = mtsfm_surface.values
    np.testing.assert_allclose(v, v[::-1, ::-1], atol=1e-9)


def test_zero_doppler_cut_is_autocorrelation(desk_params):
    w = synthesize(random_mtsfm(16, "even", 100.0, 1.0, 4), desk_params)
    af = naf(w, np.arange(-300, 301) / w.fs, np.array([0.0]))
    full = np.correlate(w.samples, w.samples, mode="full") / w.fs
    lags = np.arange(-(w.n - 1), w.n)
    # naf uses s(t) s*(t + tau), np.correlate gives sum a[n + k] conj(b[n])
    ref = np.abs(full[np.isin(lags, -np.arange(-300, 301))])[::-1]
    np.testing.assert_allclose(af.values[0], ref, atol=1e-12)


def test_volume_invariance():
    params = WaveformParams(500.0, 100.0, 1.0, 400.0)
    delays = np.arange(-400, 401) / params.fs
    dopplers = np.arange(-300, 301) * 0.5
    vols = []
    for w in (synthesize_cw(params), synthesize_lfm(params), synthesize(random_mtsfm(16, "even", 100.0, 1.0, 0), params)):
        af = naf(w, delays, dopplers)
        vols.append(np.sum(af.values**2) * (delays[1] - delays[0]) * 0.5)
    assert max(vols) / min(vols) - 1 < 0.02
    assert vols[0] == pytest.approx(1.0, rel=0.02)


def test_grid_validation(desk_params):
    w = synthesize_cw(desk_params)
    with pytest.raises(ValueError):
        naf(w, np.array([0.0, 0.1, 0.3]), np.array([0.0]))
    with pytest.raises(ValueError):
        naf(w, np.array([0.0]), np.array([-1.0, 0.0, 2.0]))
    af = naf(w, np.array([0.0]), np.array([0.5, 1.0]))
    with pytest.raises(ValueError):
        af_cuts(af)


def test_cuts_match_single_line_evaluation(mtsfm_surface):
    zd, zt = af_cuts(mtsfm_surface)
    i0 = np.argmin(np.abs(mtsfm_surface.dopplers))
    j0 = np.argmin(np.abs(mtsfm_surface.delays))
    np.testing.assert_array_equal(zd, mtsfm_surface.values[i0])
    np.testing.assert_array_equal(zt, mtsfm_surface.values[:, j0])


def test_cw_metrics():
    w = synthesize_cw(WaveformParams(500.0, 100.0, 1.0, 4096.0))
    af = naf(w, default_delays(1.0, w.fs)[::16], default_dopplers(1.0))
    m = af_metrics(af)
    assert m.mainlobe_width_delay == pytest.approx(2 - math.sqrt(2), abs=1e-9)
    assert m.psl_delay == NO_SIDELOBE
    # first sinc sidelobe: 20 log10(0.2172336) = -13.2619 dB
    assert m.psl_doppler == pytest.approx(-13.26, abs=0.02)


def test_mainlobe_must_be_resolved():
    x = np.linspace(-1, 1, 9)
    with pytest.raises(ValueError):
        cut_metrics(x, np.where(x == 0, 1.0, 0.1))
    with pytest.raises(ValueError):
        cut_metrics(x, np.ones_like(x))


def test_metrics_to_dict(mtsfm_surface):
    d = af_metrics(mtsfm_surface).to_dict()
    assert set(d) == {"mainlobe_width_delay", "mainlobe_width_doppler", "psl_delay", "psl_doppler", "psl_surface"}
    assert HALF_POWER == pytest.approx(10 ** (-3.0103 / 20), rel=1e-5)


def test_resample_is_band_limited_interpolation():
    n = np.arange(256)
    x = np.exp(2j * np.pi * 0.05 * n)
    pos = np.linspace(20, 230, 97)
    np.testing.assert_allclose(resample(x, pos), np.exp(2j * np.pi * 0.05 * pos), atol=1e-4)
    np.testing.assert_array_equal(resample(x, np.array([5.0, 6.0])), x[5:7])


@pytest.fixture(scope="module")
def carrier_lfm():
    p = WaveformParams.from_q_tbp(5, 100)
    p = p.with_fs(p.carrier_fs())
    return p, synthesize_lfm(p, "carrier")


def test_baf_static_target_equals_naf(carrier_lfm):
    p, w = carrier_lfm
    delays = default_delays(1.0, w.fs)[::8]
    b = baf(w, delays, [0.0])
    n = naf(w, delays, np.array([0.0]))
    np.testing.assert_allclose(b.values[0], n.values[0], atol=1e-6)


def _analytic_carrier_lfm(p):
    def s(x):
        inside = (x >= -p.T / 2) & (x < p.T / 2)
        xc = np.clip(x, -p.T / 2, p.T / 2)
        return np.where(inside, np.exp(1j * (np.pi * p.delta_f * xc**2 / p.T + 2 * np.pi * p.fc * xc)) / np.sqrt(p.T), 0)

    return s


@pytest.mark.parametrize("rdot", [-10.0, 4.0, 10.0])
def test_baf_matches_direct_evaluation(carrier_lfm, rdot):
    p, w = carrier_lfm
    delays = default_delays(1.0, w.fs)[::40]
    eta = float(doppler_scale(rdot, 1500.0))
    ref = direct_af(w.samples, _analytic_carrier_lfm(p), w.fs, w.times, delays, eta)
    np.testing.assert_allclose(baf(w, delays, [rdot]).values[0], ref, atol=1e-3)


def test_baf_reversed_range_rate_mirrors_surface(carrier_lfm):
    # |chi(tau, eta)| = |chi(-eta tau, 1/eta)|, and eta(-rdot) = 1/eta(rdot)
    p, w = carrier_lfm
    rdot = 8.0
    eta = float(doppler_scale(rdot, 1500.0))
    delays = default_delays(1.0, w.fs)[::40]
    fwd = baf(w, delays, [rdot]).values[0]
    back = direct_af(w.samples, _analytic_carrier_lfm(p), w.fs, w.times, -eta * delays, 1 / eta)
    assert float(doppler_scale(-rdot, 1500.0)) == pytest.approx(1 / eta, rel=1e-15)
    np.testing.assert_allclose(fwd, back, atol=2e-3)


def test_baf_input_checks(desk_params, carrier_lfm):
    with pytest.raises(ValueError, match="carrier"):
        baf(synthesize_lfm(desk_params), np.array([0.0]), [0.0])
    _, w = carrier_lfm
    with pytest.raises(ValueError, match="positive"):
        baf(w, np.array([0.0]), [1500.0])
    with pytest.raises(ValueError, match="positive"):
        baf(w, np.array([0.0]), [-3000.0])


def test_narrowband_doppler_mapping():
    eta = doppler_scale(np.array([-5.0, 0.0, 5.0]), 1500.0)
    nu = narrowband_doppler(eta, 500.0)
    assert nu[1] == 0.0
    # magnitude 2 rdot fc / c to first order; closing targets compress (eta > 1)
    np.testing.assert_allclose(np.abs(nu[[0, 2]]), 2 * 5.0 * 500.0 / 1500.0, rtol=1e-2)
    assert eta[2] > 1 and nu[2] < 0


def test_surface_exposes_cuts_and_kind():
    af = AFSurface(np.array([-1.0, 0.0, 1.0]), np.array([0.0]), np.array([[0.1, 1.0, 0.1]]), "narrowband", {})
    np.testing.assert_array_equal(af.zero_doppler_cut, [0.1, 1.0, 0.1])
    np.testing.assert_array_equal(af.zero_delay_cut, [1.0])
