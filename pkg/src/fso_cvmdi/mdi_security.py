"""Gaussian entanglement-based security model of the asymmetric CV-MDI link.

Both parties hold two-mode squeezed vacua of variance mu (SNU); the relay
performs a CV Bell measurement whose outcome conditions the joint
Alice-Bob covariance matrix. Eve's two-mode attack injects thermal states
of variances (omega_A, omega_B) with a correlation block; the worst case
takes the largest correlation the uncertainty principle allows.

All rate quantities are parameterised by (eta_A, eta_B, Xi): the two link
transmissivities and the excess noise, with the relay noise variance
Sigma_N^2 = Xi + nu_el + 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from .errors import ModelError

HolevoSign = Literal["minus", "plus"]
GmaxPolicy = Literal["max_physical", "geometric_mean"]

#: Numerical slack applied to physicality checks (symplectic eigenvalue >= 1).
PHYSICALITY_SLACK = 1e-12


@dataclass(frozen=True)
class ProtocolParams:
    """Source variances and trusted-device parameters of the protocol."""

    mu_a: float                 # TMSV variance, SNU, >= 1
    mu_b: float
    beta: float                 # reconciliation efficiency
    nu_det: int = 1
    nu_el: float = 0.0
    eta_eff: float = 1.0
    holevo_sign: HolevoSign = "minus"
    gmax_policy: GmaxPolicy | float = "max_physical"

    def __post_init__(self) -> None:
        if self.mu_a < 1.0 or self.mu_b < 1.0:
            raise ValueError("TMSV variances must be >= 1 SNU")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("reconciliation efficiency must be in [0, 1]")
        if self.nu_det not in (1, 2):
            raise ValueError("nu_det must be 1 or 2")
        if not 0.0 < self.eta_eff <= 1.0:
            raise ValueError("eta_eff must be in (0, 1]")
        if self.nu_el < 0:
            raise ValueError("electronic noise must be >= 0")

    @property
    def sigma_a2(self) -> float:
        """Alice's modulation variance mu_A - 1."""
        return self.mu_a - 1.0

    @property
    def sigma_b2(self) -> float:
        return self.mu_b - 1.0


@dataclass(frozen=True)
class TwoModeCM:
    """Two-mode covariance matrix in (a, b, c) standard form.

    Blocks a*I and b*I on the diagonal, c*Z off-diagonal.
    """

    a: float
    b: float
    c: float

    def symplectic_eigenvalues(self) -> tuple[float, float]:
        return symplectic_spectrum(self)

    def is_physical(self, slack: float = PHYSICALITY_SLACK) -> bool:
        if self.a < 1.0 - slack or self.b < 1.0 - slack:
            return False
        try:
            nu_plus, nu_minus = symplectic_spectrum(self)
        except ModelError:
            return False
        return nu_minus >= 1.0 - slack


def gmax_default(omega_a: float, omega_b: float,
                 policy: GmaxPolicy | float = "max_physical") -> float:
    """Largest attack correlation used for the worst case.

    ``max_physical`` saturates the uncertainty bound of the two-mode
    attack state: g_max = sqrt((omega_hi + 1)(omega_lo - 1)), the point
    where its smaller symplectic eigenvalue touches 1. The weaker
    ``geometric_mean`` policy sqrt((omega_A - 1)(omega_B - 1)) and explicit
    numeric overrides are kept for sensitivity studies; overrides are
    rejected if the resulting attack state would be unphysical.
    """
    if omega_a < 1.0 or omega_b < 1.0:
        raise ModelError("thermal variances must be >= 1 SNU", stage="security")
    lo, hi = sorted((omega_a, omega_b))
    ceiling = math.sqrt((hi + 1.0) * (lo - 1.0))
    if policy == "max_physical":
        return ceiling
    if policy == "geometric_mean":
        return math.sqrt((omega_a - 1.0) * (omega_b - 1.0))
    g = float(policy)
    if abs(g) > ceiling * (1.0 + PHYSICALITY_SLACK):
        raise ModelError(
            f"g_max override {g} violates physicality bound {ceiling:.6g} "
            f"for omega=({omega_a}, {omega_b})",
            stage="security",
        )
    return abs(g)


def attack_cm(omega_a: float, omega_b: float, g_max: float) -> TwoModeCM:
    """Eve's two-mode state with the worst-case correlation block."""
    return TwoModeCM(a=omega_a, b=omega_b, c=g_max)


def excess_noise(
    eta_a: float,
    eta_b: float,
    omega_a: float,
    omega_b: float,
    g_max: float,
    eta_eff: float,
) -> float:
    """Excess noise Xi of the relay outcome.

    (eta_eff/2) [(1-eta_A)(omega_A - 1) + (1-eta_B)(omega_B - 1)]
    + eta_eff g_max sqrt((1-eta_A)(1-eta_B)).
    """
    for name, eta in (("eta_a", eta_a), ("eta_b", eta_b)):
        if not 0.0 < eta <= 1.0:
            raise ModelError(f"{name} must be in (0, 1], got {eta}", stage="security")
    return (eta_eff / 2.0) * (
        (1.0 - eta_a) * (omega_a - 1.0) + (1.0 - eta_b) * (omega_b - 1.0)
    ) + eta_eff * g_max * math.sqrt((1.0 - eta_a) * (1.0 - eta_b))


def relay_noise_variance(xi: float, nu_el: float) -> float:
    """Sigma_N^2 = Xi + nu_el + 1 (1 SNU of vacuum included)."""
    return xi + nu_el + 1.0


def conditional_cm(
    mu_a: float,
    mu_b: float,
    eta_a: float,
    eta_b: float,
    sigma_n2: float,
    eta_eff: float,
) -> TwoModeCM:
    """Alice-Bob covariance matrix conditioned on the relay outcome."""
    d = eta_a * (mu_a - 1.0) + eta_b * (mu_b - 1.0) + 2.0 * sigma_n2 / eta_eff
    zeta_a = mu_a - eta_a * (mu_a**2 - 1.0) / d
    zeta_b = mu_b - eta_b * (mu_b**2 - 1.0) / d
    zeta_c = math.sqrt(eta_a * (mu_a**2 - 1.0) * eta_b * (mu_b**2 - 1.0)) / d
    return TwoModeCM(a=zeta_a, b=zeta_b, c=zeta_c)


def symplectic_spectrum(cm: TwoModeCM) -> tuple[float, float]:
    """Symplectic eigenvalues (nu_plus, nu_minus) of a standard-form CM.

    Uses the factored discriminant (a-b)^2 ((a+b)^2 - 4c^2), which is exact
    for this form and avoids the catastrophic cancellation of
    Delta^2 - 4 det V when a is close to b.
    """
    a, b, c = cm.a, cm.b, cm.c
    delta = a**2 + b**2 - 2.0 * c**2
    disc = (a - b) ** 2 * ((a + b) ** 2 - 4.0 * c**2)
    if disc < -PHYSICALITY_SLACK * max(1.0, delta**2):
        raise ModelError(
            f"covariance matrix ({a}, {b}, {c}) has complex symplectic spectrum",
            stage="security",
        )
    root = math.sqrt(max(disc, 0.0))
    nu_plus_sq = (delta + root) / 2.0
    nu_minus_sq = (delta - root) / 2.0
    if nu_minus_sq < -PHYSICALITY_SLACK * max(1.0, delta):
        raise ModelError(
            f"covariance matrix ({a}, {b}, {c}) is not positive-definite",
            stage="security",
        )
    return math.sqrt(max(nu_plus_sq, 0.0)), math.sqrt(max(nu_minus_sq, 0.0))


def conditioned_single_mode(cm: TwoModeCM, side: Literal["alice", "bob"]) -> float:
    """Variance of one mode after a heterodyne on the other.

    Heterodyne adds one vacuum unit before the Schur complement:
    alice -> zeta_a - zeta_c^2 / (zeta_b + 1), bob mirrored.
    """
    if side == "alice":
        return cm.a - cm.c**2 / (cm.b + 1.0)
    if side == "bob":
        return cm.b - cm.c**2 / (cm.a + 1.0)
    raise ValueError(f"side must be 'alice' or 'bob', got {side!r}")


def mutual_information(cm: TwoModeCM) -> float:
    """Mutual information of the heterodyne outcomes, bits per use.

    (1/2) log2 of the ratio of det(V + I) for Alice's mode before and
    after conditioning on Bob's heterodyne; for v*I single-mode blocks
    this collapses to log2((1 + zeta_a) / (1 + v_cond)).
    """
    v_prior = cm.a
    v_cond = conditioned_single_mode(cm, "alice")
    num = 1.0 + v_prior**2 + 2.0 * v_prior   # 1 + det + tr of v*I
    den = 1.0 + v_cond**2 + 2.0 * v_cond
    return 0.5 * math.log2(num / den)


def entropy_g(x: float) -> float:
    """Bosonic entropy g(x) = ((x+1)/2) log2((x+1)/2) - ((x-1)/2) log2((x-1)/2)."""
    if x < 1.0 - PHYSICALITY_SLACK:
        raise ModelError(f"entropy argument must be >= 1, got {x}", stage="security")
    if x <= 1.0 + 1e-15:
        return 0.0
    xp = (x + 1.0) / 2.0
    xm = (x - 1.0) / 2.0
    return xp * math.log2(xp) - xm * math.log2(xm)


def holevo_bound(
    nu_plus: float,
    nu_minus: float,
    nu_c: float,
    sign: HolevoSign = "minus",
) -> float:
    """Eve's Holevo information from the symplectic entropies.

    Default is g(nu_+) + g(nu_-) - g(nu_c), the reverse-reconciliation form
    in which the conditional entropy is subtracted; the ``plus`` variant
    adds the conditional term instead and is kept only for comparison
    studies (it drives every practical operating point negative).
    """
    total = entropy_g(nu_plus) + entropy_g(nu_minus)
    if sign == "minus":
        return total - entropy_g(nu_c)
    if sign == "plus":
        return total + entropy_g(nu_c)
    raise ValueError(f"unknown Holevo sign {sign!r}")


@dataclass(frozen=True)
class RateBreakdown:
    """Asymptotic-rate diagnostics at one (eta_A, eta_B, Xi) point."""

    zeta_a: float
    zeta_b: float
    zeta_c: float
    nu_plus: float
    nu_minus: float
    nu_c: float
    i_ab: float
    chi_e: float
    rate: float


def asymptotic_rate(
    eta_a: float,
    eta_b: float,
    xi: float,
    params: ProtocolParams,
) -> RateBreakdown:
    """Asymptotic key rate beta * I_AB - chi_E with full diagnostics.

    The raw (possibly negative) value is preserved; clamping is a
    reporting concern and happens downstream, before deflection averaging.
    """
    sigma_n2 = relay_noise_variance(xi, params.nu_el)
    cm = conditional_cm(
        params.mu_a, params.mu_b, eta_a, eta_b, sigma_n2, params.eta_eff
    )
    nu_plus, nu_minus = symplectic_spectrum(cm)
    nu_c = conditioned_single_mode(cm, "bob")
    i_ab = mutual_information(cm)
    chi_e = holevo_bound(nu_plus, nu_minus, nu_c, params.holevo_sign)
    return RateBreakdown(
        zeta_a=cm.a,
        zeta_b=cm.b,
        zeta_c=cm.c,
        nu_plus=nu_plus,
        nu_minus=nu_minus,
        nu_c=nu_c,
        i_ab=i_ab,
        chi_e=chi_e,
        rate=params.beta * i_ab - chi_e,
    )
