"""Transmissivity chain for a fading free-space link.

Order of effects: free-space diffraction widens the spot, fast turbulent
eddies widen it further (short-term spot) and make the centroid wander,
pointing jitter adds to the wandering, and the instantaneous deflection r
of the centroid relative to the aperture centre modulates the collected
fraction. The deflection is Rayleigh/Weibull distributed, which induces a
fading distribution on the total transmissivity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .atmosphere import (
    DEFAULT_QUADRATURE,
    LinkGeometry,
    QuadratureSpec,
    TurbulenceProfile,
    extinction_transmissivity,
    fried_length,
)
from .errors import DegenerateLinkError, ModelError
from .numerics import IntegrationResult, integrate, scaled_bessel_lambda

# Guards (see module tests): below this the log expressions in the fading
# shape parameters are ill-conditioned and the link is useless anyway.
MIN_SHORT_TERM_TRANSMISSIVITY = 1e-9
# Above this ratio rho0/w0 the weak-turbulence expansion has left its
# domain; the physical limit is zero turbulent broadening.
VACUUM_RHO_RATIO = 1e6


@dataclass(frozen=True)
class BeamParams:
    """Gaussian beam at the transmitter."""

    waist: float                 # w0, m
    wavelength: float            # m
    curvature: float = math.inf  # F0, m; inf = collimated

    def __post_init__(self) -> None:
        if self.waist <= 0 or self.wavelength <= 0:
            raise ValueError("waist and wavelength must be > 0")
        if self.curvature == 0:
            raise ValueError("radius of curvature cannot be 0 (use inf for collimated)")

    @property
    def rayleigh_length(self) -> float:
        return math.pi * self.waist**2 / self.wavelength


@dataclass(frozen=True)
class ReceiverAperture:
    radius: float             # a_rec, m
    efficiency: float = 1.0   # eta_eff

    def __post_init__(self) -> None:
        if self.radius <= 0:
            raise ValueError("aperture radius must be > 0")
        if not 0.0 < self.efficiency <= 1.0:
            raise ValueError("receiver efficiency must be in (0, 1]")


@dataclass(frozen=True)
class PointingError:
    """Transmitter angular jitter, radians."""

    jitter: float = 0.0

    def __post_init__(self) -> None:
        if self.jitter < 0:
            raise ValueError("jitter must be >= 0")


@dataclass(frozen=True)
class FadingState:
    """Everything needed to evaluate the deflected transmissivity at one z.

    ``eta_st`` is the deflection-free short-term transmissivity (turbulent
    widening included, centroid on axis); ``gamma`` and ``r0`` shape the
    deflection response eta_st * exp(-(r/r0)^gamma); ``sigma2`` is the total
    centroid-wandering variance.
    """

    spot: float            # w(z), m
    spot_st: float         # w_st(z), m
    widening_tb: float     # Sigma_TB^2, m^2
    sigma_tb2: float       # m^2
    sigma_pe2: float       # m^2
    sigma2: float          # m^2
    eta_st: float
    eta_st_ff: float       # 2 a_rec^2 / w_st^2
    gamma: float
    r0: float              # m
    eta_atm: float
    eta_eff: float
    a_rec: float
    phi: float

    @property
    def eta0(self) -> float:
        """Deflection-free total transmissivity eta_eff * eta_atm * eta_st."""
        return self.eta_eff * self.eta_atm * self.eta_st

    def deflection_radius_for(self, fraction: float) -> float:
        """Deflection r at which eta(z, r) has dropped to `fraction` * eta(z, 0)."""
        if not 0.0 < fraction < 1.0:
            raise ValueError("fraction must be in (0, 1)")
        return self.r0 * (-math.log(fraction)) ** (1.0 / self.gamma)

    def tau_breakpoints(self, eta: float) -> tuple[float, ...]:
        """Transmissivity values where the fading pdf carries its mass.

        Images of deflections {sigma/4 ... 12 sigma}; useful as quadrature
        breakpoints when integrating the fading pdf, whose support is
        concentrated absurdly close to tau = eta for tight beams.
        """
        sig = math.sqrt(self.sigma2)
        taus = []
        for mult in (0.25, 0.5, 1.0, 2.0, 3.0, 5.0, 8.0, 12.0):
            r = mult * sig
            t = eta * math.exp(-((r / self.r0) ** self.gamma))
            if 0.0 < t < eta:
                taus.append(t)
        return tuple(sorted(set(taus)))


def spot_size(beam: BeamParams, z: float) -> float:
    """Beam spot w(z) = w0 sqrt((1 - z/F0)^2 + (z/zR)^2)."""
    if z < 0:
        raise ModelError("propagation distance must be >= 0", stage="beam")
    curvature_term = 0.0 if math.isinf(beam.curvature) else z / beam.curvature
    return beam.waist * math.hypot(1.0 - curvature_term, z / beam.rayleigh_length)


def diffraction_transmissivity(spot: float, a_rec: float) -> float:
    """Fraction of a Gaussian spot of radius `spot` collected by the aperture."""
    if spot <= 0:
        raise ModelError("spot size must be > 0", stage="beam")
    return -math.expm1(-2.0 * a_rec**2 / spot**2)


def yura_broadening(
    beam: BeamParams,
    geometry: LinkGeometry,
    profile: TurbulenceProfile,
    z: float | None = None,
) -> tuple[float, float]:
    """Short-term turbulent widening (Sigma_TB^2, w_st) at distance z.

    Sigma_TB^2 = 2 (1 - phi)^2 (lambda z / (pi rho0))^2 with
    phi = 0.33 (rho0 / w0)^(1/3). In the vacuum limit (rho0 >> w0) the
    expansion leaves its domain and the broadening is pinned to zero.
    """
    geo = geometry if z is None else geometry.with_distance(z)
    dist = geo.path_length
    rho = fried_length(geo, profile)
    w = spot_size(beam, dist)
    if rho > VACUUM_RHO_RATIO * beam.waist:
        return 0.0, w
    phi = 0.33 * (rho / beam.waist) ** (1.0 / 3.0)
    widening = 2.0 * (1.0 - phi) ** 2 * (beam.wavelength * dist / (math.pi * rho)) ** 2
    return widening, math.sqrt(w**2 + widening)


def wandering_variances(
    beam: BeamParams,
    geometry: LinkGeometry,
    profile: TurbulenceProfile,
    pointing: PointingError,
    z: float | None = None,
) -> tuple[float, float, float]:
    """Centroid wandering variances (sigma_TB^2, sigma_PE^2, total sigma^2).

    Turbulent wandering 0.1337 lambda^2 z^2 / (w0^(1/3) rho0^(5/3)); the
    pointing term uses the exact pi tan^2(delta/2) z^2 geometric form
    rather than the small-angle (delta z)^2 shortcut.
    """
    geo = geometry if z is None else geometry.with_distance(z)
    dist = geo.path_length
    rho = fried_length(geo, profile)
    sigma_tb2 = 0.1337 * beam.wavelength**2 * dist**2 / (
        beam.waist ** (1.0 / 3.0) * rho ** (5.0 / 3.0)
    )
    sigma_pe2 = math.pi * math.tan(pointing.jitter / 2.0) ** 2 * dist**2
    return sigma_tb2, sigma_pe2, sigma_tb2 + sigma_pe2


def deflection_params(
    beam: BeamParams,
    geometry: LinkGeometry,
    profile: TurbulenceProfile,
    receiver: ReceiverAperture,
    pointing: PointingError,
    alpha0: float,
    z: float | None = None,
) -> FadingState:
    """Assemble the full fading state of the link at distance z.

    Raises
    ------
    DegenerateLinkError
        If the deflection-free transmissivity is below 1e-9; the log
        expressions defining (gamma, r0) are ill-conditioned there.
    """
    geo = geometry if z is None else geometry.with_distance(z)
    dist = geo.path_length
    w = spot_size(beam, dist)
    widening, w_st = yura_broadening(beam, geo, profile)
    rho = fried_length(geo, profile)
    phi = 0.33 * (rho / beam.waist) ** (1.0 / 3.0)
    eta_st = diffraction_transmissivity(w_st, receiver.radius)
    if eta_st < MIN_SHORT_TERM_TRANSMISSIVITY:
        raise DegenerateLinkError(
            f"short-term transmissivity {eta_st:.3e} below "
            f"{MIN_SHORT_TERM_TRANSMISSIVITY:g}; link is effectively dark",
            stage="beam",
        )
    eta_ff = 2.0 * receiver.radius**2 / w_st**2
    lam0 = scaled_bessel_lambda(0, eta_ff)
    lam1 = scaled_bessel_lambda(1, eta_ff)
    log_arg = 2.0 * eta_st / (1.0 - lam0)
    if log_arg <= 1.0:
        raise DegenerateLinkError(
            "fading shape undefined: ln(2 eta_st / (1 - Lambda_0)) <= 0",
            stage="beam",
        )
    ln_term = math.log(log_arg)
    gamma = 4.0 * eta_ff * lam1 / (1.0 - lam0) / ln_term
    r0 = receiver.radius * ln_term ** (-1.0 / gamma)
    sigma_tb2, sigma_pe2, sigma2 = wandering_variances(beam, geo, profile, pointing)
    eta_atm = extinction_transmissivity(geo, alpha0)
    return FadingState(
        spot=w,
        spot_st=w_st,
        widening_tb=widening,
        sigma_tb2=sigma_tb2,
        sigma_pe2=sigma_pe2,
        sigma2=sigma2,
        eta_st=eta_st,
        eta_st_ff=eta_ff,
        gamma=gamma,
        r0=r0,
        eta_atm=eta_atm,
        eta_eff=receiver.efficiency,
        a_rec=receiver.radius,
        phi=phi,
    )


def instantaneous_transmissivity(state: FadingState, r: float) -> float:
    """Total transmissivity at deflection r: eta0 * exp(-(r/r0)^gamma)."""
    if r < 0:
        raise ModelError("deflection must be >= 0", stage="beam")
    return state.eta0 * math.exp(-((r / state.r0) ** state.gamma))


def weibull_pdf(sigma2: float, r: float) -> float:
    """Deflection density (r / sigma^2) exp(-r^2 / (2 sigma^2))."""
    if sigma2 <= 0:
        raise ModelError("wandering variance must be > 0", stage="beam")
    if r < 0:
        raise ModelError("deflection must be >= 0", stage="beam")
    return (r / sigma2) * math.exp(-(r**2) / (2.0 * sigma2))


def _deflection_breakpoints(sigma: float, upper: float) -> tuple[float, ...]:
    pts = [m * sigma for m in (0.5, 1.0, 2.0, 3.0, 5.0, 8.0, 12.0)]
    return tuple(p for p in pts if 0.0 < p < upper)


def average_over_deflection(
    func: Callable[[float], float],
    state: FadingState,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    breakpoints: Sequence[float] = (),
) -> IntegrationResult:
    """Average func(r) over the deflection density on r in [0, a_rec].

    The weight is the Weibull density truncated at the aperture radius and
    deliberately NOT renormalised: deflections beyond a_rec simply
    contribute nothing. With sigma2 = 0 the average degenerates to
    func(0).

    The density's mass typically lives within a few millimetres while
    a_rec is tens of centimetres, so the quadrature is split at fixed
    multiples of sigma (plus any caller-supplied breakpoints, e.g. a
    postselection cut) and summed in ascending interval order.
    """
    if state.sigma2 == 0.0:
        return IntegrationResult(func(0.0), 0.0)
    sigma = math.sqrt(state.sigma2)
    pts = set(_deflection_breakpoints(sigma, state.a_rec))
    pts.update(p for p in breakpoints if 0.0 < p < state.a_rec)
    integrand = lambda r: weibull_pdf(state.sigma2, r) * func(r)
    return integrate(integrand, 0.0, state.a_rec, spec, breakpoints=sorted(pts))


def fading_pdf(state: FadingState, eta: float, tau: float) -> float:
    """Density of the deflected transmissivity tau in (0, eta].

    Pushforward of the Weibull deflection density through
    tau = eta exp(-(r/r0)^gamma).
    """
    if not 0.0 < tau <= eta:
        raise ModelError(
            f"fading support is (0, eta]; got tau={tau}, eta={eta}", stage="beam"
        )
    if tau == eta:
        # Boundary: exponent 2/gamma - 1 decides between 0, finite and an
        # integrable divergence; take the defined one-sided limit.
        if state.gamma > 2.0:
            return math.inf
        if state.gamma == 2.0:
            return state.r0**2 / (state.gamma * state.sigma2 * eta)
        return 0.0
    u = math.log(eta / tau)
    c = state.r0**2 / (2.0 * state.sigma2)
    return (
        (state.r0**2 / (state.gamma * state.sigma2 * tau))
        * u ** (2.0 / state.gamma - 1.0)
        * math.exp(-c * u ** (2.0 / state.gamma))
    )


def fading_cdf(state: FadingState, eta: float, tau: float) -> float:
    """P(transmissivity <= tau) = exp(-r(tau)^2 / 2 sigma^2), closed form."""
    if tau <= 0.0:
        return 0.0
    if tau >= eta:
        return 1.0
    r = state.r0 * math.log(eta / tau) ** (1.0 / state.gamma)
    return math.exp(-(r**2) / (2.0 * state.sigma2))
