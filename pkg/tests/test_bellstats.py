import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.stats import poisson

from dsqlsim import bellstats as bs
from dsqlsim.errors import DomainError, InfeasibleError, NoiseSaturationError
from dsqlsim.linkbudget import LossFactors, OpticalTerminal, SourceSpec
from dsqlsim.relorbit import PassGeometry, integration_time

P_LOCAL = 1 / math.sqrt(2)


def test_correlation_coefficient():
    assert bs.correlation_coefficient((100, 100, 0, 0)) == 1.0
    assert bs.correlation_coefficient((25, 25, 25, 25)) == 0.0
    assert bs.correlation_coefficient((85, 85, 15, 15)) == pytest.approx(0.70)
    with pytest.raises(DomainError):
        bs.correlation_coefficient((0, 0, 0, 0))


@pytest.mark.parametrize("p", [0.0, 0.5, 0.85, 1.0])
def test_chsh_of_expected_counts(p):
    assert bs.chsh_s(bs.expected_counts(p, 1e4)) == pytest.approx(2 * math.sqrt(2) * p)


def test_expected_s():
    assert bs.expected_s(1.0) == pytest.approx(2.828, abs=1e-3)
    assert bs.expected_s(0.0) == 0.0
    assert bs.expected_s(P_LOCAL) == pytest.approx(2.0)


def test_sigma_s():
    assert bs.sigma_s(800, 1.0) == pytest.approx(0.1)
    assert bs.sigma_s(8, 0.0) == pytest.approx(math.sqrt(2))
    assert bs.sigma_s(1e12, 0.5) < 1e-5


def test_n_sigma_reference_points():
    assert bs.n_sigma(500, 0.85) == pytest.approx(2.83, abs=0.01)
    assert bs.n_sigma(1000, 0.90) == pytest.approx(5.59, abs=0.01)
    assert bs.n_sigma(1234, P_LOCAL) == pytest.approx(0.0, abs=1e-12)


@given(st.floats(1, 1e7), st.floats(1.001, 10), st.floats(0.0, 1.0))
def test_n_sigma_increasing_in_n(N, k, p):
    a, b = bs.n_sigma(N, p), bs.n_sigma(N * k, p)
    assert b > a if p > P_LOCAL else b <= a


@given(st.floats(1, 1e7), st.floats(0.0, 0.99), st.floats(1e-3, 0.01))
def test_n_sigma_increasing_in_p(N, p, dp):
    assert bs.n_sigma(N, min(1.0, p + dp)) > bs.n_sigma(N, p)


def _required_counts_scan(p, target):
    N = 1
    while bs.n_sigma(N, p) < target:
        N += 1
    return N


def test_required_counts():
    # direct scan oracle; the quoted 561 is the closed form with p - 1/sqrt2 rounded
    assert bs.required_counts(0.85, 3) == _required_counts_scan(0.85, 3) == 564
    assert bs.required_counts(1.0, 5) == 292
    with pytest.raises(InfeasibleError):
        bs.required_counts(P_LOCAL, 3)
    assert bs.required_counts(P_LOCAL + 1e-3, 3) > 1e6


@given(st.floats(0.72, 1.0), st.floats(0.5, 8.0))
def test_required_counts_is_minimal(p, target):
    N = bs.required_counts(p, target)
    assert bs.n_sigma(N, p) >= target
    assert N == 1 or bs.n_sigma(N - 1, p) < target


def test_accidental_rate():
    assert bs.accidental_rate(bs.RatesModel(0.0, n_a=100, n_b=100)) == pytest.approx(1e-5)
    assert bs.accidental_rate(bs.RatesModel(1e6, n_a=1, n_b=1, t_window=0.0)) == 0.0
    m = bs.RatesModel(1e6, eta_a=1e-3, eta_b=1e-3)
    assert bs.accidental_rate(m) == pytest.approx(1e-3)
    with pytest.warns(bs.PoissonApproximationWarning):
        bs.accidental_rate(bs.RatesModel(1e9, t_window=1e-9))


def test_entangled_rate_and_purity():
    assert bs.entangled_coincidence_rate(bs.RatesModel(1e7, 0, 2.6e-3, 2.6e-3)) == \
        pytest.approx(67.6)
    assert bs.entangled_coincidence_rate(bs.RatesModel(1e7, eta_a=0.0)) == 0.0
    assert bs.entangled_coincidence_rate(bs.RatesModel(1e7)) == 1e7
    assert bs.purity_from_rates(bs.RatesModel(1e7, t_window=0.0)) == 1.0
    # accidental / entangled = 0.41 sits at the local bound
    m = bs.RatesModel(1e6, n_a=math.sqrt(0.41e6 / 1e-9) - 1e6, n_b=math.sqrt(0.41e6 / 1e-9) - 1e6)
    assert bs.accidental_rate(m) / bs.entangled_coincidence_rate(m) == pytest.approx(0.41)
    assert bs.purity_from_rates(m) == pytest.approx(0.709, abs=1e-3)
    with pytest.raises(DomainError):
        bs.purity_from_rates(bs.RatesModel(0.0))


def test_effective_purity():
    assert bs.effective_purity(0.90, 0.0556, 1.0) == pytest.approx(0.85, abs=1e-3)
    assert bs.effective_purity(0.9, 0.0, 1e-9) == 0.9
    assert bs.effective_purity(1.0, 0.5e9, 1e-9) == pytest.approx(0.5)
    with pytest.raises(NoiseSaturationError):
        bs.effective_purity(1.0, 1e9, 1e-9)


@given(st.floats(0.0, 50.0), st.integers(0, 60))
def test_poisson_window_matches_scipy(mu, k):
    assert bs.poisson_window(mu, 1.0, k) == pytest.approx(poisson.pmf(k, mu), rel=1e-9, abs=1e-300)


def test_poisson_small_rate():
    assert bs.poisson_window(0.0, 1.0, 0) == 1.0
    assert bs.poisson_at_least_one(1e-3, 1.0) == pytest.approx(1e-3, rel=1e-3)
    assert bs.poisson_window(2.0, 1.0, 2) == pytest.approx(0.2707, abs=1e-4)


@pytest.mark.parametrize("p", [0.0, 1.0])
def test_simulated_s_large_n(p):
    counts = bs.simulate_bell_counts(p, 10**6, 11)
    assert counts.N == 10**6
    assert abs(bs.chsh_s(counts) - bs.expected_s(p)) < 3 * bs.sigma_s(1e6, p)


def test_simulation_is_seeded():
    a = bs.simulate_bell_counts(0.8, 5000, 3).counts
    b = bs.simulate_bell_counts(0.8, 5000, 3).counts
    assert np.array_equal(a, b)
    assert not np.array_equal(a, bs.simulate_bell_counts(0.8, 5000, 4).counts)


def _reference_scenario(**kw):
    return bs.BellScenario(SourceSpec(1e9, 0.01), OpticalTerminal(0.5, 1.05),
                           OpticalTerminal(3.5), 810e-9, LossFactors.lumped(0.1), **kw)


def test_mission_scan_fixed_time():
    res = bs.bell_mission_scan([2 * 6.371e6], [0.6, 0.85], _reference_scenario(fixed_time=5.0))
    assert res.n_pairs[0] == pytest.approx(340, rel=0.03)
    assert res.n_sigma[0, 0] == 0.0
    assert res.n_sigma[0, 1] == pytest.approx(bs.n_sigma(res.n_pairs[0], 0.85))
    assert res.n_sigma[0, 1] == pytest.approx(2.3, abs=0.05)


def test_mission_scan_clamps_beyond_geo():
    res = bs.bell_mission_scan([500e3, 4e8], [0.9], _reference_scenario(clamp_time=1800.0))
    assert res.integration_time[1] == 1800.0
    assert res.integration_time[0] == pytest.approx(
        integration_time(PassGeometry.from_altitude(500e3)))


def test_sync_drift():
    assert bs.sync_drift_budget(100e-12, 5.0) == pytest.approx(20e-12)
    assert bs.sync_drift_budget(100e-12, 4.5 * 3600) == pytest.approx(6.2e-15, rel=0.01)
    assert bs.sync_drift_budget(0.0, 5.0) == 0.0


def test_state_validation():
    with pytest.raises(DomainError):
        bs.expected_s(1.2)
    with pytest.raises(DomainError):
        bs.BellCounts(np.ones((3, 4)))
