"""End-to-end composition: scenario -> fading state -> security -> rates.

Stage tags on raised errors identify which layer failed (beam, noise,
security, pe, average) so the CLI can report actionable diagnostics.
"""
from __future__ import annotations

import dataclasses
import math

from . import beam_optics, finite_size, noise_budget
from .atmosphere import classify_regime, scintillation_index, warn_if_yura_marginal
from .errors import ModelError
from .finite_size import RatePoint
from .mdi_security import asymptotic_rate, excess_noise, gmax_default, relay_noise_variance
from .scenario import Scenario


def evaluate(
    scenario: Scenario,
    *,
    distance: float | None = None,
    rx_altitude: float | None = None,
    zenith: float | None = None,
    total_uses: float | None = None,
    f_th: float | None = None,
) -> RatePoint:
    """Evaluate the full rate pipeline for one link configuration.

    Keyword overrides support sweeps without rebuilding the scenario.
    """
    sc = scenario.with_overrides(
        distance=distance,
        rx_altitude=rx_altitude,
        zenith=zenith,
        total_uses=total_uses,
        f_th=f_th,
    )
    geometry = sc.geometry
    z = geometry.path_length

    regime = classify_regime(geometry, sc.profile, sc.receiver.radius, sc.beam.waist)
    warn_if_yura_marginal(regime, context=f"z = {z:.1f} m")

    state = beam_optics.deflection_params(
        sc.beam, geometry, sc.profile, sc.receiver, sc.pointing, sc.alpha0
    )
    eta_b0 = state.eta0
    eta_a, eta_b_min = finite_size.postselect_thresholds(sc.eta_a, eta_b0, sc.pilots)

    detector = sc.detector
    if sc.n_ex_mode == "model":
        # Postselection also pins the noise model to the floor transmissivity.
        n_ex = noise_budget.receiver_photons(
            detector, geometry.wavelength, sc.protocol.sigma_a2, eta_b_min,
            constants=geometry.constants,
        )
        detector = dataclasses.replace(detector, n_ex=n_ex)
    budget = noise_budget.assemble_thermal(
        detector,
        sc.environment,
        sc.receiver.radius,
        geometry.wavelength,
        sc.receiver.efficiency,
        n_bg_override=sc.n_bg_override,
        constants=geometry.constants,
    )

    g_max = gmax_default(budget.omega_a, budget.omega_b, sc.protocol.gmax_policy)
    xi_max = excess_noise(
        eta_a, eta_b_min, budget.omega_a, budget.omega_b, g_max,
        sc.protocol.eta_eff,
    )
    sigma_n2 = relay_noise_variance(xi_max, sc.protocol.nu_el)

    w = sc.epsilons.w
    eta_a_wc, eta_b_wc, xi_wc = finite_size.worst_case_params(
        eta_a, eta_b_min, xi_max, sigma_n2,
        sc.protocol.sigma_a2, sc.protocol.sigma_b2,
        sc.accounting.m_pe, sc.protocol.eta_eff, w,
    )

    nominal = asymptotic_rate(eta_a, eta_b_min, xi_max, sc.protocol)
    worst = finite_size.pe_rate(eta_a_wc, eta_b_wc, xi_wc, sc.protocol)
    k_comp_signed = finite_size.composable_rate(worst.rate, sc.accounting, sc.epsilons)
    k_comp = max(k_comp_signed, 0.0)

    if sc.pilots.rate_evaluation == "threshold":
        # Stable-channel reading: every surviving bin is keyed at the floor.
        point_rate = lambda eta_r: k_comp_signed
    else:
        point_rate = _instantaneous_rate(sc, budget, g_max)
    k_of_r = finite_size.rate_functional(point_rate, state, eta_b_min)
    k_avg = finite_size.average_rate(k_of_r, state, eta_b_min)
    indicator = finite_size.rate_functional(lambda eta_r: 1.0, state, eta_b_min)
    # Sub-unit weighted mass by construction; shave quadrature round-off.
    survival = min(finite_size.average_rate(indicator, state, eta_b_min), 1.0)

    scint = math.nan
    if geometry.kind == "slant" and geometry.rx_altitude > geometry.tx_altitude:
        scint = scintillation_index(
            geometry.tx_altitude, geometry.rx_altitude, geometry.zenith,
            sc.profile, geometry.wavelength,
        )

    return RatePoint(
        z=z,
        eta_a=eta_a,
        eta_b0=eta_b0,
        eta_b_min=eta_b_min,
        eta_atm=state.eta_atm,
        eta_st=state.eta_st,
        survival=survival,
        gamma=state.gamma,
        r0=state.r0,
        sigma=math.sqrt(state.sigma2),
        phi=state.phi,
        omega_a=budget.omega_a,
        omega_b=budget.omega_b,
        g_max=g_max,
        xi=xi_max,
        sigma_n2=sigma_n2,
        eta_a_wc=eta_a_wc,
        eta_b_wc=eta_b_wc,
        xi_wc=xi_wc,
        w=w,
        zeta_a=worst.zeta_a,
        zeta_b=worst.zeta_b,
        zeta_c=worst.zeta_c,
        nu_plus=worst.nu_plus,
        nu_minus=worst.nu_minus,
        nu_c=worst.nu_c,
        i_ab=worst.i_ab,
        chi_e=worst.chi_e,
        k_inf=nominal.rate,
        k_pe=worst.rate,
        k_comp_signed=k_comp_signed,
        k_comp=k_comp,
        k_avg=k_avg,
        epsilon=sc.epsilons.total(sc.accounting.p_ec),
        rytov_sq=regime.rytov_sq,
        z_max=regime.z_max,
        scint_index=scint,
    )


def _instantaneous_rate(scenario, budget, g_max):
    """Per-bin rate: the full security stack recomputed at eta_B(z, r)."""

    def rate_at(eta_r: float) -> float:
        xi = excess_noise(
            scenario.eta_a, eta_r, budget.omega_a, budget.omega_b, g_max,
            scenario.protocol.eta_eff,
        )
        s_n2 = relay_noise_variance(xi, scenario.protocol.nu_el)
        try:
            e_a, e_b, x_w = finite_size.worst_case_params(
                scenario.eta_a, eta_r, xi, s_n2,
                scenario.protocol.sigma_a2, scenario.protocol.sigma_b2,
                scenario.accounting.m_pe, scenario.protocol.eta_eff,
                scenario.epsilons.w,
            )
        except ModelError:
            return 0.0
        k_pe = finite_size.pe_rate(e_a, e_b, x_w, scenario.protocol).rate
        return finite_size.composable_rate(k_pe, scenario.accounting, scenario.epsilons)

    return rate_at


def end_to_end_rate(scenario: Scenario) -> RatePoint:
    """Composable deflection-averaged rate for the configured link."""
    return evaluate(scenario)


def slant_rate(scenario: Scenario) -> RatePoint:
    """Same pipeline over a slant path; geometry must be slant."""
    if scenario.geometry.kind != "slant":
        raise ModelError("slant_rate requires slant geometry", stage="geometry")
    return evaluate(scenario)
