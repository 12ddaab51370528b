import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dsqlsim import homsim
from dsqlsim.constants import CONST, C, G, angular_frequency_split
from dsqlsim.errors import DomainError, InfeasibleError, NoiseSaturationError
from dsqlsim.linkbudget import LossFactors, NoiseEnvironment, OpticalTerminal, SourceSpec
from dsqlsim.relorbit import EARTH, epsilon_observatory, epsilon_satellite_circular

taus = st.floats(-1e-12, 1e-12)
sigmas = st.floats(1e11, 5e13)


def scenario(**kw):
    base = dict(source=SourceSpec(1e9, 0.01, 0.95), tx=OpticalTerminal(1.0),
                rx=OpticalTerminal(0.3), losses=LossFactors(eta_d=0.6, eta_atm=0.55),
                noise=NoiseEnvironment(dark_rate=100.0))
    base.update(kw)
    return homsim.HomScenario(**base)


def test_dip_values():
    assert homsim.hom_dip_degenerate(0.0, 1e13) == 0.0
    assert homsim.hom_dip_degenerate(1e-13, 1e13) == pytest.approx(0.4323, abs=1e-4)
    assert homsim.hom_dip_degenerate(1.0, 1e13) == pytest.approx(0.5)


def test_entangled_values():
    assert homsim.hom_entangled(0.0, 1e13, 1e15) == 0.0
    assert homsim.hom_entangled(math.pi / 1e15, 1e11, 1e15) == pytest.approx(1.0, abs=1e-6)
    assert homsim.noisy_coincidence(0.0, 1e13, 1e15, 0.9) == pytest.approx(0.05)
    assert homsim.noisy_coincidence(3e-14, 1e13, 1e15, 0.0) == 0.5


@given(taus, sigmas)
def test_entangled_reduces_to_degenerate(tau, sigma):
    assert homsim.hom_entangled(tau, sigma, 0.0) == pytest.approx(
        homsim.hom_dip_degenerate(tau, sigma), abs=1e-15)


@given(taus, sigmas, st.floats(0, 5e15))
def test_entangled_even(tau, sigma, domega):
    assert homsim.hom_entangled(-tau, sigma, domega) == homsim.hom_entangled(tau, sigma, domega)


@given(taus, sigmas, st.floats(0, 5e15), st.floats(0, 1))
def test_noisy_coincidence_bounds(tau, sigma, domega, p):
    P = homsim.noisy_coincidence(tau, sigma, domega, p)
    assert (1 - p) / 2 - 1e-15 <= P <= (1 + p) / 2 + 1e-15
    if p == 1:
        assert P == pytest.approx(homsim.hom_entangled(tau, sigma, domega))


def test_quality_factor_squared():
    assert homsim.quality_factor_hom(0.0, 1e-9, 0.95) == 0.95
    assert homsim.quality_factor_hom(0.5e9, 1e-9, 1.0) == pytest.approx(0.25)
    with pytest.raises(NoiseSaturationError):
        homsim.quality_factor_hom(1e9, 1e-9, 1.0)


@given(st.floats(0, 9e8), st.floats(0.1, 1.0))
def test_quality_matches_single_power_squared(noise, F):
    from dsqlsim.cowsim import quality_factor
    assert homsim.quality_factor_hom(noise, 1e-9, F) == pytest.approx(
        quality_factor(noise, 1e-9, F) ** 2 / F, rel=1e-12)


def test_time_shift_trivial():
    geo = homsim.HomGeometry(1e3, u_g=-1.0, u_s=-1.0, v_g_sq=4.0, v_s_sq=4.0)
    assert homsim.relativistic_time_shift(geo) == 0.0


def test_gateway_time_shift():
    tau = homsim.relativistic_time_shift(homsim.gateway_geometry(1e3))
    # satellite clock runs fast, so the shift is negative in this sign convention
    assert tau < 0
    assert abs(tau) == pytest.approx(2.3e-15, rel=0.02)
    tau2 = homsim.relativistic_time_shift(homsim.gateway_geometry(2e3))
    assert tau2 == pytest.approx(2 * tau)


def test_gateway_phase_shift():
    tau = homsim.relativistic_time_shift(homsim.gateway_geometry(1e3))
    dphi = homsim.hom_phase_shift(angular_frequency_split(1500e-9, 1600e-9), tau)
    assert 0.17 <= abs(dphi) <= 0.21
    assert homsim.hom_phase_shift(1e15, 0.0) == 0.0


def test_doppler_order():
    geo = homsim.HomGeometry(1e3, v_s_los=3e3)
    assert homsim.relativistic_time_shift(geo) == pytest.approx(1e-5 * 1e3 / C, rel=1e-4)


@given(st.floats(7e6, 4e8))
def test_reduces_to_clock_offsets(r):
    """Zero line-of-sight velocity: tau c / ell equals eps_sat - eps_obs."""
    geo = homsim.HomGeometry(
        1e3, u_g=homsim.point_mass_potential(CONST.R_earth),
        u_s=homsim.point_mass_potential(r),
        v_g_sq=(CONST.Omega_earth * CONST.R_earth) ** 2, v_s_sq=G * CONST.M_earth / r)
    lhs = homsim.relativistic_time_shift(geo) * C / 1e3
    rhs = epsilon_satellite_circular(r) - epsilon_observatory(EARTH)
    assert lhs == pytest.approx(rhs, rel=1e-3)


def test_geo_redshift_dominated():
    r = 4.216e7
    geo = homsim.HomGeometry(1e3, u_g=homsim.point_mass_potential(CONST.R_earth),
                             u_s=homsim.point_mass_potential(r))
    assert abs(homsim.tau_gr(geo)) * C / 1e3 == pytest.approx(6e-10, rel=0.03)


def test_total_time_shift_and_nulling():
    geo = homsim.HomGeometry(1e3, u_g=-6e7, u_s=-1e7, v_s_los=100.0, delta_ell=1e-4)
    tau = homsim.total_time_shift(geo)
    assert tau == pytest.approx(homsim.tau_gr(geo) + 1e-4 / C
                                + 1e3 / C * ((1 + 100 / C) - 1), rel=1e-6)
    nulled = homsim.HomGeometry(1e3, u_g=-6e7, u_s=-1e7, v_s_los=100.0, delta_ell=1e-4,
                                tau_c=-tau)
    assert homsim.total_time_shift(nulled) == pytest.approx(0.0, abs=1e-30)
    plain = homsim.HomGeometry(1e3, u_g=-6e7, u_s=-1e7)
    assert homsim.total_time_shift(plain) == homsim.tau_gr(plain)


def test_mismatch_must_be_small():
    with pytest.raises(DomainError):
        homsim.HomGeometry(1e3, delta_ell=2.0)


def test_timing_error_sentinel():
    assert math.isinf(homsim.timing_error(0.0, 1e13, 0.0, 0.9))
    assert math.isinf(homsim.timing_error(0.0, 1e13, 1e15, 0.9))


def test_degenerate_optimum_scales_inverse_sigma():
    vals = [homsim.optimal_timing_error(s, 0.0, 0.95).dtau_opt * s for s in (1e12, 1e13, 5e13)]
    assert np.ptp(vals) < 1e-6 * vals[0]
    assert vals[0] == pytest.approx(0.639, abs=1e-3)
    ideal = homsim.optimal_timing_error(1e13, 0.0, 1.0).dtau_opt * 1e13
    assert ideal == pytest.approx(0.5, rel=1e-4)


@pytest.mark.parametrize("domega", [1.2e15, 4e15])
def test_nondegenerate_flat_and_better(domega):
    sig = np.geomspace(1e12, 4.7e13, 8)
    non = np.array([homsim.optimal_timing_error(s, domega, 0.95).dtau_opt for s in sig])
    deg = np.array([homsim.optimal_timing_error(s, 0.0, 0.95).dtau_opt for s in sig])
    assert non.max() / non.min() < 1.1
    assert np.all(deg >= 10 * non)


def test_nondegenerate_at_sigma_equal_split():
    for s in (1e13, 4e13):
        deg = homsim.optimal_timing_error(s, 0.0, 0.95).dtau_opt
        assert homsim.optimal_timing_error(s, s, 0.95).dtau_opt < deg
        # a 40% gain needs the split at about twice the bandwidth
        assert deg / homsim.optimal_timing_error(s, 2 * s, 0.95).dtau_opt == pytest.approx(
            1.4, abs=0.06)


def test_optimum_beats_fine_grid():
    s, dw, p = 2e13, 1.2e15, 0.8
    opt = homsim.optimal_timing_error(s, dw, p)
    grid = homsim.timing_error(np.linspace(1e-19, 6 / s, 200001), s, dw, p)
    assert opt.dtau_opt <= grid.min() * (1 + 1e-9)


def test_alpha_error_hom():
    base = homsim.alpha_error_hom(1e-15, 1e3, 1e7, 1e6)
    assert homsim.alpha_error_hom(1e-15, 1e3, 1e7, 4e6) == pytest.approx(base / 2)
    assert homsim.alpha_error_hom(1e-15, 2e3, 1e7, 1e6) == pytest.approx(base / 2)
    with pytest.raises(InfeasibleError):
        homsim.alpha_error_hom(1e-15, 1e3, 0.0, 1e6)


def test_scan_degenerate_equals_zero_split():
    sc = scenario(lambda2=780e-9)
    sig, h = [1e12, 1e13, 4.7e13], [500e3, 1000e3, 2000e3]
    a = homsim.hom_alpha_scan(sig, h, "degenerate", sc)
    b = homsim.hom_alpha_scan(sig, h, "nondegenerate", sc)
    assert np.array_equal(a.delta_alpha, b.delta_alpha)


def test_scan_reference_magnitudes():
    sig = np.geomspace(1e12, 4.7e13, 12)
    h = np.arange(300e3, 3001e3, 50e3)
    sc = scenario()
    deg = homsim.hom_alpha_scan(sig, h, "degenerate", sc)
    non = homsim.hom_alpha_scan(sig, h, "nondegenerate", sc)
    assert deg.min_delta_alpha == pytest.approx(0.01, rel=0.2)
    assert non.min_delta_alpha == pytest.approx(0.001, rel=0.2)
    assert deg.argmin[0] == pytest.approx(4.7e13)
    ratio = homsim.hom_alpha_ratio(sig, h, sc)
    assert np.all(ratio[np.isfinite(ratio)] >= 5)
    table = deg.long_table()
    assert list(table) == ["sigma_rad_s", "altitude_km", "delta_alpha"]
    assert len(table["delta_alpha"]) == sig.size * h.size


def test_scan_bandwidth_cap_and_units():
    sc = scenario()
    with pytest.raises(DomainError):
        homsim.hom_alpha_scan([5e13], [500e3], "degenerate", sc)
    assert homsim.hom_alpha_scan([5e13], [500e3], "degenerate", sc, enforce_cap=False)
    hz = scenario(sigma_unit="Hz")
    a = homsim.hom_alpha_scan([1e12], [800e3], "degenerate", hz)
    b = homsim.hom_alpha_scan([2 * math.pi * 1e12], [800e3], "degenerate", sc)
    assert a.delta_alpha[0, 0] == pytest.approx(b.delta_alpha[0, 0])


def test_scan_saturated_noise_reads_inf():
    sc = scenario(noise=NoiseEnvironment(dark_rate=2e9))
    res = homsim.hom_alpha_scan([1e13], [800e3], "degenerate", sc)
    assert math.isinf(res.delta_alpha[0, 0])


def test_split_defaults_and_override():
    sc = scenario()
    assert sc.split("degenerate") == 0.0
    assert sc.split("nondegenerate") == pytest.approx(angular_frequency_split(780e-9, 1550e-9))
    assert sc.split("nondegenerate") == pytest.approx(1.2e15, rel=0.01)
    assert scenario(domega=4e15).split("nondegenerate") == 4e15


def test_source_type():
    src = homsim.HomSource(2e15, 2e15, 1e13)
    assert src.degenerate and src.domega == 0.0
    assert not homsim.HomSource(2e15, 1e15, 1e13).degenerate
