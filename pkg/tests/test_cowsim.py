import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dsqlsim import cowsim
from dsqlsim.constants import C
from dsqlsim.errors import DomainError, NoiseSaturationError
from dsqlsim.linkbudget import LossFactors, OpticalTerminal, SourceSpec

IFO = cowsim.CowInterferometer(1550e-9, 400e3, 6e3)


def scenario(**kw):
    base = dict(source=SourceSpec(1e7), tx=OpticalTerminal(1.0), rx=OpticalTerminal(0.3),
                signal=cowsim.CowSignalModel(1e13, 0.95), losses=LossFactors(0.5, 0.5, 0.5, 0.5, 0.1),
                fiber_loss_db_per_km=0.2, g_model="altitude")
    base.update(kw)
    return cowsim.CowScenario(**base)


def test_gravitational_phase_reference():
    expected = 2 * math.pi / 1550e-9 * 9.80665 * 400e3 * 6e3 / C**2
    assert cowsim.gravitational_phase(IFO) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(1.06, rel=0.01)


def test_gravitational_phase_linearity():
    assert cowsim.gravitational_phase(cowsim.CowInterferometer(1550e-9, 0.0, 6e3)) == 0.0
    doubled = cowsim.CowInterferometer(1550e-9, 400e3, 6e3, alpha=1.0)
    assert cowsim.gravitational_phase(doubled) == pytest.approx(2 * cowsim.gravitational_phase(IFO))
    fibre = cowsim.CowInterferometer(1550e-9, 400e3, 6e3, refractive_index=1.47)
    assert cowsim.gravitational_phase(fibre) == pytest.approx(1.47 * cowsim.gravitational_phase(IFO))


def test_doppler_phase():
    assert 1.3e6 <= cowsim.doppler_phase(1500e-9, 10e3, 10e3) <= 1.45e6
    assert cowsim.doppler_phase(1500e-9, 10e3, 0.0) == 0.0
    assert cowsim.doppler_phase(1500e-9, 10e3, -10e3) == -cowsim.doppler_phase(1500e-9, 10e3, 10e3)


def test_detection_probability_limits():
    tiny = cowsim.CowSignalModel(1.0, 1.0)
    assert cowsim.detection_probability(math.pi, tiny, IFO) == pytest.approx(1.0)
    phis = np.linspace(0, 2 * math.pi, 50)
    assert np.allclose(cowsim.detection_probability(phis, cowsim.CowSignalModel(1e13, 0.0), IFO), 0.5)
    assert cowsim.detection_probability(math.pi / 2, cowsim.CowSignalModel(1.0, 0.9), IFO) == \
        pytest.approx(0.5)


@given(st.floats(0, 1), st.floats(1e9, 5e13), st.floats(-20, 20))
def test_detection_probability_bounds(p, sigma, phi):
    P = cowsim.detection_probability(phi, cowsim.CowSignalModel(sigma, p), IFO)
    assert (1 - p) / 2 - 1e-15 <= P <= (1 + p) / 2 + 1e-15


def test_phase_error_ideal_midpoint():
    ideal = cowsim.CowSignalModel(1.0, 1.0)
    assert cowsim.phase_error(math.pi / 2, ideal, IFO) == pytest.approx(1.0)
    assert cowsim.phase_error_raw(math.pi / 2, ideal, IFO) == pytest.approx(1 / IFO.omega0)
    assert math.isinf(cowsim.phase_error(0.0, cowsim.CowSignalModel(1e13, 0.9), IFO))


def test_noise_never_helps():
    phis = np.linspace(0.05, 2 * math.pi - 0.05, 50)
    for sigma in (1e11, 1e13):
        clean = cowsim.phase_error(phis, cowsim.CowSignalModel(sigma, 1.0), IFO)
        for p in np.linspace(0.02, 0.999, 50):
            noisy = cowsim.phase_error(phis, cowsim.CowSignalModel(sigma, p), IFO)
            assert np.all(noisy >= clean * (1 - 1e-12))


def test_optimum_ideal():
    opt = cowsim.optimal_phase_error(cowsim.CowSignalModel(1.0, 0.999), IFO)
    assert opt.phi_opt == pytest.approx(math.pi / 2, abs=1e-3)
    assert opt.dphi_opt == pytest.approx(1.0, rel=2e-3)
    flat = cowsim.optimal_phase_error(cowsim.CowSignalModel(1.0, 1.0), IFO)
    assert flat.dphi_opt == pytest.approx(1.0, rel=1e-9)


def test_optimum_decreasing_in_p():
    vals = [cowsim.optimal_phase_error(cowsim.CowSignalModel(1e13, p), IFO).dphi_opt
            for p in np.linspace(0.5, 1.0, 11)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_optimum_insensitive_to_bandwidth():
    a = cowsim.optimal_phase_error(cowsim.CowSignalModel(1e13, 0.95), IFO).dphi_opt
    b = cowsim.optimal_phase_error(cowsim.CowSignalModel(1e12, 0.95), IFO).dphi_opt
    assert abs(a / b - 1) < 0.01


def test_optimum_is_grid_minimum():
    model = cowsim.CowSignalModel(2e13, 0.8)
    opt = cowsim.optimal_phase_error(model, IFO)
    grid = cowsim.phase_error(np.linspace(1e-3, 2 * math.pi - 1e-3, 20001), model, IFO)
    assert opt.dphi_opt <= grid.min() * (1 + 1e-9)


def test_quality_factor():
    assert cowsim.quality_factor(0.0, 1e-9, 0.95) == 0.95
    assert cowsim.quality_factor(1e8, 1e-9, 0.95) == pytest.approx(0.855)
    with pytest.raises(NoiseSaturationError):
        cowsim.quality_factor(1e9, 1e-9, 0.95)
    model = cowsim.CowSignalModel.from_noise(1e13, 1e8)
    assert model.p == pytest.approx(0.855)


def test_alpha_error_scaling():
    base = cowsim.alpha_error(1.05, 1.0, 1e6)
    assert cowsim.alpha_error(1.05, 1.0, 4e6) == pytest.approx(base / 2)
    assert cowsim.alpha_error(1.05, 2.0, 1e6) == pytest.approx(base / 2)
    assert math.isinf(cowsim.alpha_error(1.05, 1.0, 0.0))
    with pytest.raises(DomainError):
        cowsim.alpha_error(1.0, 0.0, 10.0)


def test_scan_reference():
    res = cowsim.alpha_error_scan(np.arange(300e3, 3001e3, 10e3), scenario())
    assert 900e3 <= res.argmin_altitude <= 1500e3
    assert res.min_delta_alpha == pytest.approx(3e-4, rel=0.2)
    assert list(res.columns()) == ["altitude_km", "N", "phi_gr_rad", "dphi_opt_rad", "delta_alpha"]
    assert not res.empty_pass.any()


def test_scan_order_invariant():
    h = np.array([500e3, 2500e3, 900e3, 1300e3, 700e3])
    a = cowsim.alpha_error_scan(h, scenario())
    order = np.argsort(h)
    b = cowsim.alpha_error_scan(h[order], scenario())
    assert np.array_equal(a.delta_alpha[order], b.delta_alpha)


def test_scan_flags_empty_pass():
    res = cowsim.alpha_error_scan([500e3, 40000e3], scenario())
    assert res.empty_pass.tolist() == [False, True]
    assert math.isinf(res.delta_alpha[1])


def test_uniform_g_default():
    sc = scenario(g_model="uniform")
    assert sc.interferometer(1000e3).g == pytest.approx(9.80665)
    assert scenario().interferometer(1000e3).g < 9.0
    with pytest.raises(DomainError):
        scenario(g_model="tidal")


def test_fiber_efficiency():
    assert scenario().fiber_efficiency == pytest.approx(10 ** (-0.12))


def test_invalid_inputs():
    with pytest.raises(DomainError):
        cowsim.CowSignalModel(0.0, 0.5)
    with pytest.raises(DomainError):
        cowsim.CowSignalModel(1e13, 1.5)
    with pytest.raises(DomainError):
        cowsim.CowInterferometer(-1.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        cowsim.alpha_error_scan([], scenario())


def test_estimator_against_monte_carlo_point():
    from oracles import cow_case
    res = cow_case(0.93, 1e13, 1550e-9, 1.2, N=10_000, reps=4000, seed=93)
    assert abs(res.ratio - 1) < 0.05
