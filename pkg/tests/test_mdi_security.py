from __future__ import annotations

import math

import numpy as np
import pytest

from fso_cvmdi import (
    ModelError,
    ProtocolParams,
    TwoModeCM,
    asymptotic_rate,
    conditional_cm,
    conditioned_single_mode,
    entropy_g,
    excess_noise,
    gmax_default,
    holevo_bound,
    mutual_information,
    symplectic_spectrum,
)
from oracles import random_physical_cm, standard_form_matrix, symplectic_eigenvalues_4x4

STUDY = ProtocolParams(mu_a=45.0, mu_b=45.0, beta=0.98, nu_det=1, nu_el=0.01,
                       eta_eff=0.98)


def study_xi(eta_b: float, omega: float = 1.08) -> float:
    g = gmax_default(omega, omega)
    return excess_noise(0.98, eta_b, omega, omega, g, 0.98)


class TestGmax:
    def test_vacuum_ancillas(self):
        assert gmax_default(1.0, 1.0) == 0.0

    def test_symmetry(self):
        assert gmax_default(1.3, 2.7) == gmax_default(2.7, 1.3)

    def test_saturates_physicality(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            omega_a = 1.0 + rng.exponential(0.5)
            omega_b = 1.0 + rng.exponential(0.5)
            g = gmax_default(omega_a, omega_b)
            # Attack CM in standard form (omega_a, omega_b, g): its smaller
            # symplectic eigenvalue must stay physical, and the default
            # policy sits exactly on the boundary.
            nu_plus, nu_minus = symplectic_spectrum(TwoModeCM(omega_a, omega_b, g))
            assert nu_minus >= 1.0 - 1e-12
            assert nu_minus == pytest.approx(1.0, abs=1e-9)

    def test_geometric_mean_policy(self):
        assert gmax_default(1.08, 1.08, "geometric_mean") == pytest.approx(
            0.08, rel=1e-12
        )

    def test_override_validated(self):
        assert gmax_default(1.08, 1.08, 0.1) == 0.1
        with pytest.raises(ModelError):
            gmax_default(1.08, 1.08, 1.0)  # beyond the uncertainty bound


class TestExcessNoise:
    def test_lossless_links_leak_nothing(self):
        assert excess_noise(1.0, 1.0, 1.08, 1.08, 0.4, 0.98) == 0.0

    def test_vacuum_attack(self):
        assert excess_noise(0.7, 0.8, 1.0, 1.0, 0.0, 0.98) == 0.0

    def test_study_point_oracle(self):
        # Frozen direct evaluation at the 100 m study point with the
        # amplitude-threshold floor 0.81 * eta_B(100 m).
        eta_b = 0.81 * 0.97918298812582699
        omega_b = 2 * (0.98 * 4.8e-12 + 0.04) + 1
        g = gmax_default(1.08, omega_b)
        xi = excess_noise(0.98, eta_b, 1.08, omega_b, g, 0.98)
        assert xi == pytest.approx(0.03460628448392436, rel=1e-12)

    def test_domain(self):
        with pytest.raises(ModelError):
            excess_noise(0.0, 0.5, 1.08, 1.08, 0.08, 0.98)


class TestConditionalCM:
    def test_vacuum_inputs(self):
        cm = conditional_cm(1.0, 1.0, 0.5, 0.5, 1.0, 0.98)
        assert cm.a == 1.0
        assert cm.b == 1.0
        assert cm.c == 0.0

    def test_disconnected_relay(self):
        cm = conditional_cm(45.0, 45.0, 0.0, 0.0, 1.0, 0.98)
        assert cm.a == 45.0
        assert cm.b == 45.0
        assert cm.c == 0.0

    def test_study_point_physical(self):
        xi = study_xi(0.81 * 0.979)
        cm = conditional_cm(45.0, 45.0, 0.98, 0.81 * 0.979, xi + 1.01, 0.98)
        nu_plus, nu_minus = symplectic_spectrum(cm)
        assert nu_minus >= 1.0 - 1e-12
        assert cm.a <= 45.0 and cm.b <= 45.0 and cm.c >= 0.0


class TestSymplecticSpectrum:
    def test_pure_tmsv(self):
        mu = 7.3
        cm = TwoModeCM(mu, mu, math.sqrt(mu**2 - 1.0))
        nu_plus, nu_minus = symplectic_spectrum(cm)
        assert nu_plus == pytest.approx(1.0, abs=1e-10)
        assert nu_minus == pytest.approx(1.0, abs=1e-10)

    def test_uncorrelated_thermal_product(self):
        nu_plus, nu_minus = symplectic_spectrum(TwoModeCM(3.0, 7.0, 0.0))
        assert (nu_plus, nu_minus) == (7.0, 3.0)

    def test_against_generic_4x4_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            a, b, c = random_physical_cm(rng)
            got = symplectic_spectrum(TwoModeCM(a, b, c))
            expected = symplectic_eigenvalues_4x4(standard_form_matrix(a, b, c))
            assert got[0] == pytest.approx(expected[0], rel=1e-10, abs=1e-10)
            assert got[1] == pytest.approx(expected[1], rel=1e-10, abs=1e-10)

    def test_swap_invariance(self):
        assert symplectic_spectrum(TwoModeCM(3.0, 5.0, 2.0)) == pytest.approx(
            symplectic_spectrum(TwoModeCM(5.0, 3.0, 2.0))
        )

    def test_unphysical_rejected(self):
        with pytest.raises(ModelError):
            symplectic_spectrum(TwoModeCM(1.0, 1.0, 2.0))


class TestConditioning:
    def test_no_correlation_no_gain(self):
        cm = TwoModeCM(5.0, 3.0, 0.0)
        assert conditioned_single_mode(cm, "alice") == 5.0
        assert conditioned_single_mode(cm, "bob") == 3.0

    def test_heterodyne_never_subvacuum(self):
        rng = np.random.default_rng(13)
        for _ in range(200):
            a, b, c = random_physical_cm(rng)
            cm = TwoModeCM(a, b, c)
            assert conditioned_single_mode(cm, "alice") >= 1.0 - 1e-12
            assert conditioned_single_mode(cm, "bob") >= 1.0 - 1e-12

    def test_study_point_oracle(self):
        # Direct arithmetic on the frozen worst-case CM entries.
        cm = conditional_cm(45.0, 45.0, 0.98, 0.81 * 0.97918298812582699,
                            0.03460628448392436 + 1.01, 0.98)
        expected = cm.a - cm.c**2 / (cm.b + 1.0)
        assert conditioned_single_mode(cm, "alice") == expected


class TestMutualInformation:
    def test_zero_without_correlation(self):
        assert mutual_information(TwoModeCM(5.0, 3.0, 0.0)) == 0.0

    def test_nonnegative(self):
        rng = np.random.default_rng(17)
        for _ in range(100):
            a, b, c = random_physical_cm(rng)
            assert mutual_information(TwoModeCM(a, b, c)) >= 0.0

    def test_scalar_block_identity(self):
        cm = TwoModeCM(22.5, 23.7, 22.0)
        v = conditioned_single_mode(cm, "alice")
        assert mutual_information(cm) == pytest.approx(
            math.log2((1.0 + cm.a) / (1.0 + v)), rel=1e-12
        )


class TestEntropyG:
    def test_vacuum(self):
        assert entropy_g(1.0) == 0.0

    def test_exact_value_at_three(self):
        assert entropy_g(3.0) == 2.0

    def test_monotone(self):
        assert entropy_g(5.0) > entropy_g(3.0) > entropy_g(1.5) > 0.0

    def test_near_unity_clamped(self):
        assert entropy_g(1.0 - 5e-13) == 0.0

    def test_domain_error(self):
        with pytest.raises(ModelError):
            entropy_g(0.9)


class TestHolevoBound:
    def test_pure_state_zero(self):
        assert holevo_bound(1.0, 1.0, 1.0) == 0.0

    def test_sign_switch_gap(self):
        chi_minus = holevo_bound(1.9, 1.8, 1.3, "minus")
        chi_plus = holevo_bound(1.9, 1.8, 1.3, "plus")
        assert chi_plus - chi_minus == pytest.approx(2.0 * entropy_g(1.3), rel=1e-12)

    def test_nonnegative_on_study_scan(self):
        for eta_b in np.linspace(0.3, 0.99, 15):
            xi = study_xi(float(eta_b))
            breakdown = asymptotic_rate(0.98, float(eta_b), xi, STUDY)
            assert breakdown.chi_e >= 0.0


class TestAsymptoticRate:
    def test_ideal_link_positive(self):
        ideal = ProtocolParams(mu_a=45.0, mu_b=45.0, beta=1.0, nu_det=1,
                               nu_el=0.0, eta_eff=1.0)
        breakdown = asymptotic_rate(1.0, 1.0, 0.0, ideal)
        assert breakdown.rate > 0.0

    def test_zero_reconciliation_nonpositive(self):
        lazy = ProtocolParams(mu_a=45.0, mu_b=45.0, beta=0.0, nu_det=1,
                              nu_el=0.01, eta_eff=0.98)
        breakdown = asymptotic_rate(0.98, 0.9, 0.01, lazy)
        assert breakdown.rate == pytest.approx(-breakdown.chi_e)
        assert breakdown.rate <= 0.0

    def test_monotone_in_excess_noise(self):
        rates = [asymptotic_rate(0.98, 0.9, xi, STUDY).rate
                 for xi in np.linspace(0.0, 0.2, 9)]
        assert all(a >= b for a, b in zip(rates, rates[1:]))

    def test_monotone_in_reconciliation(self):
        xi = study_xi(0.9)
        rates = []
        for beta in (0.5, 0.7, 0.9, 0.98, 1.0):
            params = ProtocolParams(mu_a=45.0, mu_b=45.0, beta=beta, nu_det=1,
                                    nu_el=0.01, eta_eff=0.98)
            rates.append(asymptotic_rate(0.98, 0.9, xi, params).rate)
        assert all(a < b for a, b in zip(rates, rates[1:]))

    def test_swap_symmetry_of_spectrum(self):
        xi = study_xi(0.9)
        fwd = asymptotic_rate(0.98, 0.9, xi, STUDY)
        mirrored = ProtocolParams(mu_a=45.0, mu_b=45.0, beta=0.98, nu_det=1,
                                  nu_el=0.01, eta_eff=0.98)
        rev = asymptotic_rate(0.9, 0.98, xi, mirrored)
        # The joint CM spectrum is invariant under the (A <-> B) exchange
        # when the sources are identical.
        assert rev.nu_plus == pytest.approx(fwd.nu_plus, rel=1e-12)
        assert rev.nu_minus == pytest.approx(fwd.nu_minus, rel=1e-12)

    def test_holevo_invariant_under_mirrored_roles(self):
        # Swapping (mu, eta) pairs while also mirroring the conditioned
        # side leaves Eve's information unchanged.
        xi = study_xi(0.9)
        fwd = asymptotic_rate(0.98, 0.9, xi, STUDY)
        rev = asymptotic_rate(0.9, 0.98, xi, STUDY)
        cm_rev = conditional_cm(45.0, 45.0, 0.9, 0.98, xi + 1.01, 0.98)
        nu_c_mirror = conditioned_single_mode(cm_rev, "alice")
        chi_mirrored = holevo_bound(rev.nu_plus, rev.nu_minus, nu_c_mirror)
        assert chi_mirrored == pytest.approx(fwd.chi_e, rel=1e-12)
