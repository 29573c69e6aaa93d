from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import stats

import fso_cvmdi
from fso_cvmdi import (
    RngStream,
    average_over_deflection,
    fading_cdf,
    mc_average_rate,
    sample_deflection,
    simulate_pilots,
)
from fso_cvmdi.finite_size import rate_functional


@pytest.fixture(scope="module")
def tight_state(fig4_scenario):
    sc = fig4_scenario
    return fso_cvmdi.deflection_params(
        sc.beam, sc.geometry, sc.profile, sc.receiver, sc.pointing, sc.alpha0
    )


@pytest.fixture(scope="module")
def broad_state(fig4_scenario):
    sc = fig4_scenario
    geo = sc.geometry.with_distance(1000.0)
    return fso_cvmdi.deflection_params(
        sc.beam, geo, sc.profile, sc.receiver,
        fso_cvmdi.PointingError(100e-6), sc.alpha0,
    )


class TestSampleDeflection:
    def test_reproducible(self):
        a = sample_deflection(1e-6, RngStream(42, 0), size=1000)
        b = sample_deflection(1e-6, RngStream(42, 0), size=1000)
        assert np.array_equal(a, b)

    def test_streams_independent(self):
        a = sample_deflection(1e-6, RngStream(42, 0), size=1000)
        b = sample_deflection(1e-6, RngStream(42, 1), size=1000)
        assert not np.array_equal(a, b)

    def test_rayleigh_mean(self):
        sigma = 1.3e-3
        r = sample_deflection(sigma**2, RngStream(7, 0), size=10**6)
        assert np.mean(r) == pytest.approx(sigma * math.sqrt(math.pi / 2.0), rel=0.01)

    def test_distribution_ks(self):
        sigma = 2.2e-3
        r = sample_deflection(sigma**2, RngStream(11, 0), size=10**6)
        statistic, _ = stats.kstest(r, stats.rayleigh(scale=sigma).cdf)
        assert statistic < 0.01

    def test_empirical_mode_near_sigma(self):
        sigma = 1.7e-3
        r = sample_deflection(sigma**2, RngStream(13, 0), size=10**6)
        counts, edges = np.histogram(r, bins=100, range=(0.0, 5.0 * sigma))
        peak = 0.5 * (edges[np.argmax(counts)] + edges[np.argmax(counts) + 1])
        assert peak == pytest.approx(sigma, rel=0.1)


class TestTransmissivitySamples:
    def test_bin_probability_matches_sample_fraction(self, broad_state):
        # Quadrature mass of the [0.9 eta0, eta0] fading bin against the
        # Monte-Carlo fraction of samples landing there.
        eta0 = broad_state.eta0
        lo = 0.9 * eta0
        p_quad = fso_cvmdi.pilot_bin_probability(broad_state, eta0, lo, eta0 - lo)
        taus = fso_cvmdi.mc_oracle.transmissivity_samples(
            broad_state, 10**6, RngStream(17, 0)
        )
        frac = float(np.mean(taus >= lo))
        se = math.sqrt(frac * (1.0 - frac) / taus.size)
        assert abs(p_quad - frac) <= 3.0 * se

    def test_matches_fading_distribution(self, broad_state):
        taus = fso_cvmdi.mc_oracle.transmissivity_samples(
            broad_state, 10**6, RngStream(3, 0)
        )
        eta0 = broad_state.eta0
        statistic, _ = stats.kstest(
            taus, lambda t: np.vectorize(
                lambda x: fading_cdf(broad_state, eta0, float(x))
            )(t)
        )
        assert statistic < 0.01


class TestSimulatePilots:
    def test_noiseless_is_exact(self):
        sim = simulate_pilots(0.55, 0.48, 0.0, 1e3, samples=10, nu_det=1,
                              stream=RngStream(1, 0), repetitions=5)
        assert sim.mean_a == pytest.approx(0.55, abs=1e-15)
        assert sim.mean_b == pytest.approx(0.48, abs=1e-15)
        assert sim.var_a == 0.0

    def test_variance_matches_prediction(self):
        sigma_n2 = 1.0446
        n_pl, samples = 50.0, 40
        sim = simulate_pilots(0.55, 0.48, sigma_n2, n_pl, samples=samples,
                              nu_det=1, stream=RngStream(5, 0), repetitions=10**4)
        predicted = sigma_n2 / (8.0 * samples * 1 * n_pl)
        assert sim.var_a == pytest.approx(predicted, rel=0.05)
        assert sim.var_b == pytest.approx(predicted, rel=0.05)

    def test_unbiased(self):
        sigma_n2 = 1.0446
        n_pl, samples, reps = 50.0, 40, 10**4
        sim = simulate_pilots(0.55, 0.48, sigma_n2, n_pl, samples=samples,
                              nu_det=1, stream=RngStream(9, 0), repetitions=reps)
        se = math.sqrt(sim.var_a / reps)
        assert abs(sim.mean_a - 0.55) < 3.0 * se
        assert abs(sim.mean_b - 0.48) < 3.0 * se

    def test_heterodyne_outcome_count(self):
        sim = simulate_pilots(0.5, 0.5, 1.0, 1e3, samples=7, nu_det=2,
                              stream=RngStream(2, 0), repetitions=2)
        assert sim.samples_per_rep == 14


class TestMcAverageRate:
    def test_unit_functional_truncation_mass(self, tight_state):
        mc = mc_average_rate(lambda r: 1.0, tight_state, samples=10**5,
                             stream=RngStream(21, 0))
        expected = 1.0 - math.exp(
            -(tight_state.a_rec**2) / (2.0 * tight_state.sigma2)
        )
        # All draws land far inside the aperture here.
        assert mc.mean == pytest.approx(expected, abs=1e-12)

    def test_agrees_with_quadrature_nondegenerate(self, broad_state):
        # A fading functional with real variance across the support.
        eta_b_min = broad_state.eta0 * 0.5
        k_of_r = rate_functional(lambda eta: eta, broad_state, eta_b_min)
        quad = average_over_deflection(
            k_of_r, broad_state,
            breakpoints=[broad_state.deflection_radius_for(0.5)],
        ).value
        mc = mc_average_rate(k_of_r, broad_state, samples=10**6,
                             stream=RngStream(23, 0))
        assert mc.standard_error > 0.0
        assert abs(quad - mc.mean) <= 3.0 * mc.standard_error

    def test_standard_error_scaling(self, broad_state):
        eta_b_min = broad_state.eta0 * 0.5
        k_of_r = rate_functional(lambda eta: eta, broad_state, eta_b_min)
        sizes = [10**3, 10**4, 10**5, 10**6]
        errors = [
            mc_average_rate(k_of_r, broad_state, samples=n,
                            stream=RngStream(29, i)).standard_error
            for i, n in enumerate(sizes)
        ]
        slope = np.polyfit(np.log10(sizes), np.log10(errors), 1)[0]
        assert slope == pytest.approx(-0.5, abs=0.1)

    def test_determinism_across_runs(self, broad_state):
        k_of_r = rate_functional(lambda eta: eta, broad_state, 0.0)
        first = mc_average_rate(k_of_r, broad_state, samples=10**4,
                                stream=RngStream(31, 0))
        second = mc_average_rate(k_of_r, broad_state, samples=10**4,
                                 stream=RngStream(31, 0))
        assert first.mean == second.mean
        assert first.standard_error == second.standard_error

    def test_minimum_samples(self, broad_state):
        with pytest.raises(fso_cvmdi.ModelError):
            mc_average_rate(lambda r: 1.0, broad_state, samples=10,
                            stream=RngStream(1, 0))
