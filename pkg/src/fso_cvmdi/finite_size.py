"""Pilot estimation, postselection, worst-case bounds and composable rates.

The finite-size pipeline for one link distance:

1. build the fading state of Bob's link and its deflection-free total
   transmissivity eta_B(z, 0);
2. fix the postselection floor eta_B,min from the threshold f_th (applied
   to the pilot amplitude by default, i.e. a factor f_th^2 on the
   transmissivity);
3. take the security parameters at the stable-channel worst case
   (eta_A, eta_B,min, Xi_max) and widen them to the parameter-estimation
   worst case with confidence radius w;
4. evaluate the composable rate and clamp negatives to zero;
5. average over the deflection density, bins below the floor contributing
   nothing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

from . import beam_optics
from .beam_optics import FadingState
from .errors import InsufficientStatisticsError, ModelError
from .mdi_security import ProtocolParams, RateBreakdown, asymptotic_rate
from .numerics import DEFAULT_QUADRATURE, QuadratureSpec, integrate, inverse_erf

ThresholdMode = Literal["amplitude", "transmissivity"]
RateEvaluation = Literal["threshold", "instantaneous"]


@dataclass(frozen=True)
class BlockAccounting:
    """Use-count bookkeeping: N = n + m_PE + m_PL."""

    total: float               # N
    m_pe: float
    m_pl: float
    digitization: int = 64     # d, bits per digitised symbol
    p_ec: float = 1.0          # error-correction success, 1 - FER

    def __post_init__(self) -> None:
        if self.m_pe < 0 or self.m_pl < 0:
            raise ValueError("sample counts must be >= 0")
        if self.n < 1:
            raise ValueError("no key uses left: N - m_PE - m_PL < 1")
        if self.digitization < 1:
            raise ValueError("digitization must be >= 1 bit")
        if not 0.0 <= self.p_ec <= 1.0:
            raise ValueError("p_ec must be in [0, 1]")

    @property
    def n(self) -> float:
        return self.total - self.m_pe - self.m_pl

    @classmethod
    def from_fractions(
        cls,
        total: float,
        pe_fraction: float,
        pilot_fraction: float,
        digitization: int = 64,
        p_ec: float = 1.0,
    ) -> "BlockAccounting":
        return cls(
            total=total,
            m_pe=pe_fraction * total,
            m_pl=pilot_fraction * total,
            digitization=digitization,
            p_ec=p_ec,
        )


@dataclass(frozen=True)
class EpsilonBudget:
    """Composable failure probabilities; the total is derived, never input."""

    eps_s: float = 1e-10   # smoothing
    eps_h: float = 1e-10   # hashing
    eps_c: float = 1e-10   # correctness
    eps_pe: float = 1e-10  # per-estimator

    def __post_init__(self) -> None:
        for name in ("eps_s", "eps_h", "eps_c", "eps_pe"):
            if not 0.0 < getattr(self, name) < 1.0:
                raise ValueError(f"{name} must be in (0, 1)")

    def total(self, p_ec: float) -> float:
        """eps = eps_c + eps_s + eps_h + 3 p_EC eps_PE."""
        return self.eps_c + self.eps_s + self.eps_h + 3.0 * p_ec * self.eps_pe

    @property
    def w(self) -> float:
        """Confidence radius sqrt(2) erfinv(1 - eps_PE)."""
        return math.sqrt(2.0) * inverse_erf(1.0 - self.eps_pe)


@dataclass(frozen=True)
class PilotConfig:
    """Pilot energy and the postselection policy."""

    n_pl: float                              # pilot photon number
    f_th: float = 1.0                        # postselection threshold
    bin_width: float = 0.01                  # delta tau, transmissivity bin
    threshold_mode: ThresholdMode = "amplitude"
    rate_evaluation: RateEvaluation = "threshold"

    def __post_init__(self) -> None:
        if self.n_pl <= 0:
            raise ValueError("pilot photon number must be > 0")
        if not 0.0 < self.f_th <= 1.0:
            raise ValueError("f_th must be in (0, 1]")
        if self.bin_width < 0:
            raise ValueError("bin width must be >= 0")

    @property
    def transmissivity_factor(self) -> float:
        """Multiplicative floor on eta_B implied by f_th.

        In ``amplitude`` mode the threshold cuts the pilot amplitude
        estimate tau, and eta scales as tau^2; in ``transmissivity`` mode
        it cuts eta directly.
        """
        if self.threshold_mode == "amplitude":
            return self.f_th**2
        return self.f_th


def pilot_bin_probability(
    state: FadingState,
    eta: float,
    tau: float,
    dtau: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Probability mass of the fading bin [tau, tau + dtau].

    Integrates the fading density; the quadrature is split at the images
    of fixed deflection multiples where the density concentrates.
    """
    if dtau < 0:
        raise ModelError("bin width must be >= 0", stage="pilots")
    if dtau == 0.0:
        return 0.0
    hi = min(tau + dtau, eta)
    if not 0.0 < tau < hi:
        raise ModelError(
            f"bin [{tau}, {tau + dtau}] outside fading support (0, {eta}]",
            stage="pilots",
        )
    # Integrate in deflection space where the density is a plain Weibull:
    # P(tau' in [tau, hi]) = P(r in [r(hi), r(tau)]).
    r_hi = _deflection_of(state, eta, tau)
    r_lo = _deflection_of(state, eta, hi)
    integrand = lambda r: beam_optics.weibull_pdf(state.sigma2, r)
    return integrate(integrand, r_lo, r_hi, spec).value


def _deflection_of(state: FadingState, eta: float, tau: float) -> float:
    if tau >= eta:
        return 0.0
    return state.r0 * math.log(eta / tau) ** (1.0 / state.gamma)


def pilot_estimator_stats(
    p_delta: float,
    m_pl: float,
    nu_det: int,
    n_pl: float,
    sigma_n2: float,
) -> float:
    """Predicted variance of the pilot transmissivity estimators.

    Sigma_N^2 / (8 p_delta m_PL nu_det n_PL); the relay-outcome noise
    Sigma_N^2 is split evenly over the two quadratures of the complex
    outcome, which is what the factor 8 encodes. Warns (via exception
    downstream) when fewer than one pilot lands in the bin.
    """
    samples = p_delta * m_pl
    if samples < 1.0:
        raise InsufficientStatisticsError(
            f"pilot bin holds {samples:.2f} < 1 samples", stage="pilots"
        )
    return sigma_n2 / (8.0 * p_delta * m_pl * nu_det * n_pl)


def postselect_thresholds(
    eta_a: float,
    eta_b: float,
    pilots: PilotConfig,
) -> tuple[float, float]:
    """Minimum accepted transmissivities (eta_A,min, eta_B,min).

    Alice's short link is stable, so her floor is the nominal value; Bob's
    floor is the f_th cut on the deflection-free transmissivity.
    """
    return eta_a, pilots.transmissivity_factor * eta_b


def worst_case_params(
    eta_a: float,
    eta_b: float,
    xi: float,
    sigma_n2: float,
    sigma_a2: float,
    sigma_b2: float,
    m_pe: float,
    eta_eff: float,
    w: float,
) -> tuple[float, float, float]:
    """Parameter-estimation worst case (eta_A~, eta_B~, Xi~).

    Each transmissivity is lowered by w estimator standard deviations and
    the excess noise raised by w; the estimator variances are the
    first-order expressions in 1/m_PE.
    """
    if m_pe < 1:
        raise InsufficientStatisticsError("m_PE must be >= 1", stage="pe")
    var_a = (16.0 * eta_a / m_pe) * (eta_a + eta_b * sigma_b2 / (2.0 * sigma_a2)) * (
        1.0 + (sigma_n2 / eta_eff) / (eta_a * sigma_a2 + eta_b * sigma_b2 / 2.0)
    )
    var_b = (16.0 * eta_b / m_pe) * (eta_b + eta_a * sigma_a2 / (2.0 * sigma_b2)) * (
        1.0 + (sigma_n2 / eta_eff) / (eta_b * sigma_b2 + eta_a * sigma_a2 / 2.0)
    )
    var_n = 2.0 * sigma_n2**2 / m_pe
    eta_a_w = eta_a - w * math.sqrt(var_a)
    eta_b_w = eta_b - w * math.sqrt(var_b)
    xi_w = xi + w * math.sqrt(var_n)
    if eta_a_w <= 0.0 or eta_b_w <= 0.0:
        raise InsufficientStatisticsError(
            f"worst-case transmissivity non-positive "
            f"(eta_A~={eta_a_w:.3g}, eta_B~={eta_b_w:.3g}) at m_PE={m_pe:g}",
            stage="pe",
        )
    return eta_a_w, eta_b_w, xi_w


def pe_rate(
    eta_a_w: float,
    eta_b_w: float,
    xi_w: float,
    params: ProtocolParams,
) -> RateBreakdown:
    """Worst-case rate: the asymptotic formula at the widened parameters."""
    return asymptotic_rate(eta_a_w, eta_b_w, xi_w, params)


def aep_penalty(accounting: BlockAccounting, eps: EpsilonBudget) -> float:
    """Delta_AEP = 4 log2(sqrt(d) + 2) sqrt(log2(18 / (p_EC^2 eps_s^4)))."""
    d = accounting.digitization
    inner = 18.0 / (accounting.p_ec**2 * eps.eps_s**4)
    return 4.0 * math.log2(math.sqrt(d) + 2.0) * math.sqrt(math.log2(inner))


def theta_correction(accounting: BlockAccounting, eps: EpsilonBudget) -> float:
    """Theta = log2(p_EC (1 - eps_s^2 / 3)) + 2 log2(sqrt(2) eps_h)."""
    return math.log2(accounting.p_ec * (1.0 - eps.eps_s**2 / 3.0)) + 2.0 * math.log2(
        math.sqrt(2.0) * eps.eps_h
    )


def composable_rate(
    k_pe: float,
    accounting: BlockAccounting,
    eps: EpsilonBudget,
) -> float:
    """Signed composable rate (n p_EC / N)(K_PE - Delta_AEP/sqrt(n) + Theta/n).

    Returns the raw value; reporting clamps at zero, and clamping must
    happen before any deflection averaging.
    """
    if accounting.p_ec == 0.0:
        return 0.0
    n = accounting.n
    return (n * accounting.p_ec / accounting.total) * (
        k_pe - aep_penalty(accounting, eps) / math.sqrt(n)
        + theta_correction(accounting, eps) / n
    )


@dataclass(frozen=True)
class RatePoint:
    """Full diagnostic record for one evaluated link configuration."""

    # geometry / channel
    z: float
    eta_a: float
    eta_b0: float          # deflection-free total on Bob's link
    eta_b_min: float       # postselection floor
    eta_atm: float
    eta_st: float
    survival: float        # deflection mass above the floor (and inside a_rec)
    # fading shape
    gamma: float
    r0: float
    sigma: float
    phi: float
    # noise
    omega_a: float
    omega_b: float
    g_max: float
    xi: float
    sigma_n2: float
    # worst case
    eta_a_wc: float
    eta_b_wc: float
    xi_wc: float
    w: float
    # rates (bits/use)
    zeta_a: float
    zeta_b: float
    zeta_c: float
    nu_plus: float
    nu_minus: float
    nu_c: float
    i_ab: float
    chi_e: float
    k_inf: float
    k_pe: float
    k_comp_signed: float
    k_comp: float          # clamped
    k_avg: float           # deflection-averaged, clamped before averaging
    epsilon: float         # total security parameter
    # regime
    rytov_sq: float = math.nan
    z_max: float = math.nan
    scint_index: float = math.nan


def rate_functional(
    point_rate: Callable[[float], float],
    state: FadingState,
    eta_b_min: float,
) -> Callable[[float], float]:
    """Deflection -> clamped key contribution, zero below the floor."""

    def k_of_r(r: float) -> float:
        eta_r = beam_optics.instantaneous_transmissivity(state, r)
        if eta_r < eta_b_min:
            return 0.0
        return max(point_rate(eta_r), 0.0)

    return k_of_r


def average_rate(
    k_of_r: Callable[[float], float],
    state: FadingState,
    eta_b_min: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Deflection average of a clamped rate functional (fading integral).

    The integration is split at the postselection cut radius so the
    adaptive rule never straddles the discontinuity.
    """
    breakpoints = []
    if 0.0 < eta_b_min < state.eta0:
        breakpoints.append(state.deflection_radius_for(eta_b_min / state.eta0))
    return beam_optics.average_over_deflection(
        k_of_r, state, spec, breakpoints=breakpoints
    ).value
