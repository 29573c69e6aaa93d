"""Turbulence profiles, extinction, coherence lengths and slant geometry.

Conventions: SI units everywhere (metres, radians); altitudes are above
sea level. Horizontal links sit inside a constant-pressure layer at the
transmitter altitude; slant links map the along-path coordinate z' to
altitude with the flat-earth rule h(z') = H_A + z' cos(theta), which is
accurate to <0.1% for the platform altitudes treated here (the slant
length itself uses the exact spherical expression).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Literal

from .errors import ModelError
from .numerics import DEFAULT_QUADRATURE, QuadratureSpec, integrate

EXTINCTION_SCALE_HEIGHT_M = 6600.0


@dataclass(frozen=True)
class PhysicalConstants:
    """Physical constants; defaults pinned to the values used by the model."""

    hbar: float = 1.054e-34        # J s
    c: float = 299792458.0         # m/s
    earth_radius: float = 6.371e6  # m

    def __post_init__(self) -> None:
        if min(self.hbar, self.c, self.earth_radius) <= 0:
            raise ValueError("physical constants must be strictly positive")


CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class TurbulenceProfile:
    """Refractive-index structure profile Cn^2.

    Either a constant value (night-time horizontal layer) or the
    Hufnagel-Valley altitude model parameterised by the ground value A and
    the rms windspeed v.
    """

    kind: Literal["constant", "hufnagel_valley"]
    cn2: float = 0.0          # m^(-2/3), constant variant
    ground_cn2: float = 0.0   # m^(-2/3), H-V parameter A
    windspeed: float = 0.0    # m/s, H-V parameter v

    def __post_init__(self) -> None:
        if self.kind == "constant":
            if self.cn2 <= 0:
                raise ValueError("constant Cn^2 must be > 0")
        elif self.kind == "hufnagel_valley":
            if self.ground_cn2 <= 0:
                raise ValueError("H-V ground value A must be > 0")
            if self.windspeed < 0:
                raise ValueError("windspeed must be >= 0")
        else:
            raise ValueError(f"unknown turbulence profile kind {self.kind!r}")

    @classmethod
    def constant(cls, cn2: float) -> "TurbulenceProfile":
        return cls(kind="constant", cn2=cn2)

    @classmethod
    def hufnagel_valley(cls, ground_cn2: float, windspeed: float) -> "TurbulenceProfile":
        return cls(kind="hufnagel_valley", ground_cn2=ground_cn2, windspeed=windspeed)


@dataclass(frozen=True)
class LinkGeometry:
    """Path geometry: horizontal at fixed altitude, or slant up to a platform.

    For slant paths the length is derived from the altitudes and the zenith
    angle; for horizontal paths it is given directly and both endpoints sit
    at ``tx_altitude``.
    """

    kind: Literal["horizontal", "slant"]
    wavelength: float              # m
    distance: float = 0.0          # m, horizontal only
    tx_altitude: float = 0.0       # m, H_A
    rx_altitude: float = 0.0       # m, H_B (slant)
    zenith: float = 0.0            # rad     (slant)
    constants: PhysicalConstants = field(default=CONSTANTS)

    def __post_init__(self) -> None:
        if self.wavelength <= 0:
            raise ValueError("wavelength must be > 0")
        if self.tx_altitude < 0:
            raise ValueError("altitudes must be >= 0")
        if self.kind == "horizontal":
            if self.distance <= 0:
                raise ValueError("horizontal path length must be > 0")
        elif self.kind == "slant":
            if self.rx_altitude < self.tx_altitude:
                raise ValueError("slant geometry requires H_B >= H_A")
            if not 0.0 <= self.zenith < math.pi / 2:
                raise ValueError("zenith angle must lie in [0, pi/2)")
        else:
            raise ValueError(f"unknown geometry kind {self.kind!r}")

    @property
    def wavenumber(self) -> float:
        """k = 2 pi / lambda."""
        return 2.0 * math.pi / self.wavelength

    @property
    def path_length(self) -> float:
        if self.kind == "horizontal":
            return self.distance
        return slant_length(
            self.tx_altitude, self.rx_altitude, self.zenith, self.constants
        )

    def altitude_at(self, s: float) -> float:
        """Altitude at along-path coordinate s (flat-earth map for slant)."""
        if self.kind == "horizontal":
            return self.tx_altitude
        return self.tx_altitude + s * math.cos(self.zenith)

    def with_distance(self, z: float) -> "LinkGeometry":
        """Copy of a horizontal geometry at a different distance."""
        if self.kind != "horizontal":
            raise ValueError("with_distance applies to horizontal geometries")
        return LinkGeometry(
            kind="horizontal",
            wavelength=self.wavelength,
            distance=z,
            tx_altitude=self.tx_altitude,
            constants=self.constants,
        )


def cn2_at_altitude(profile: TurbulenceProfile, h: float) -> float:
    """Cn^2 at altitude h.

    The Hufnagel-Valley variant is
    5.94e-53 (v/27)^2 h^10 e^(-h/1000) + 2.7e-16 e^(-h/1500) + A e^(-h/100).
    """
    if h < 0:
        raise ModelError(f"altitude must be >= 0, got {h}", stage="atmosphere")
    if profile.kind == "constant":
        return profile.cn2
    v, a = profile.windspeed, profile.ground_cn2
    return (
        5.94e-53 * (v / 27.0) ** 2 * h**10 * math.exp(-h / 1000.0)
        + 2.7e-16 * math.exp(-h / 1500.0)
        + a * math.exp(-h / 100.0)
    )


def _tiny_magnitude(spec: QuadratureSpec) -> QuadratureSpec:
    """Spec for integrals of Cn^2-scale magnitude (~1e-11 and below).

    The default absolute tolerance would dwarf the relative one there and
    let the quadrature return percent-level errors; drop it so the
    relative tolerance governs.
    """
    return QuadratureSpec(
        abs_tol=1e-40, rel_tol=spec.rel_tol, max_subdivisions=spec.max_subdivisions
    )


def integrated_cn2(
    geometry: LinkGeometry,
    profile: TurbulenceProfile,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Path integral of Cn^2 along the link, in m^(1/3)."""
    z = geometry.path_length
    if profile.kind == "constant" and geometry.kind == "horizontal":
        return profile.cn2 * z
    f = lambda s: cn2_at_altitude(profile, geometry.altitude_at(s))
    return integrate(f, 0.0, z, _tiny_magnitude(spec)).value


def extinction_transmissivity(
    geometry: LinkGeometry,
    alpha0: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Beer-Lambert atmospheric transmissivity with exponential scale height.

    The extinction coefficient at altitude h is
    alpha0 * exp(-h / 6600 m); horizontal links evaluate it at the link
    altitude, slant links integrate it along the path.
    """
    if alpha0 < 0:
        raise ModelError("extinction coefficient must be >= 0", stage="atmosphere")
    if alpha0 == 0.0:
        return 1.0
    z = geometry.path_length
    if geometry.kind == "horizontal":
        depth = alpha0 * math.exp(-geometry.tx_altitude / EXTINCTION_SCALE_HEIGHT_M) * z
    else:
        f = lambda s: math.exp(-geometry.altitude_at(s) / EXTINCTION_SCALE_HEIGHT_M)
        depth = alpha0 * integrate(f, 0.0, z, spec).value
    return math.exp(-depth)


def rytov_variance(
    geometry: LinkGeometry,
    profile: TurbulenceProfile,
    wave: Literal["plane", "spherical"] = "plane",
) -> float:
    """Rytov variance 1.23 Cn^2 k^(7/6) z^(11/6) for a constant-pressure layer.

    Spherical waves carry the standard 0.4 prefactor. Only defined for
    horizontal geometry with a constant profile; slant paths use
    ``scintillation_index`` instead.
    """
    if geometry.kind != "horizontal":
        raise ModelError(
            "Rytov variance applies to horizontal constant-pressure layers; "
            "use scintillation_index for slant paths",
            stage="atmosphere",
        )
    if profile.kind != "constant":
        raise ModelError("Rytov variance requires a constant profile", stage="atmosphere")
    if wave not in ("plane", "spherical"):
        raise ValueError(f"unknown wave kind {wave!r}")
    k = geometry.wavenumber
    z = geometry.path_length
    plane = 1.23 * profile.cn2 * k ** (7.0 / 6.0) * z ** (11.0 / 6.0)
    return plane if wave == "plane" else 0.4 * plane


def fried_length(
    geometry: LinkGeometry,
    profile: TurbulenceProfile,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Fried coherence length [0.423 k^2 integral(Cn^2)]^(-3/5)."""
    k = geometry.wavenumber
    total = integrated_cn2(geometry, profile, spec)
    if total <= 0:
        raise ModelError("path-integrated Cn^2 must be > 0", stage="atmosphere")
    return (0.423 * k**2 * total) ** (-3.0 / 5.0)


YURA_PHI_THRESHOLD = 0.4


@dataclass(frozen=True)
class RegimeReport:
    """Weak-turbulence diagnostics for a link."""

    rytov_sq: float
    z_max: float
    phi: float
    fried: float
    weak_by_rytov: bool
    weak_by_zmax: bool
    yura_applicable: bool


def classify_regime(
    geometry: LinkGeometry,
    profile: TurbulenceProfile,
    a_rec: float,
    w0: float,
) -> RegimeReport:
    """Weak-turbulence checks: Rytov < 1, z <= k min{4 a_rec^2, rho0^2}, phi < 0.4.

    Advisory only: downstream rate computation proceeds with a warning when
    the Yura condition is only weakly satisfied.
    """
    z = geometry.path_length
    rho = fried_length(geometry, profile)
    k = geometry.wavenumber
    if geometry.kind == "horizontal":
        if profile.kind == "constant":
            s_r2 = rytov_variance(geometry, profile, "plane")
        else:
            eff = TurbulenceProfile.constant(integrated_cn2(geometry, profile) / z)
            s_r2 = rytov_variance(geometry, eff, "plane")
    else:
        # Slant paths: the scintillation index plays the Rytov role.
        s_r2 = scintillation_index(
            geometry.tx_altitude, geometry.rx_altitude, geometry.zenith,
            profile, geometry.wavelength,
        )
    z_max = k * min(4.0 * a_rec**2, rho**2)
    phi = 0.33 * (rho / w0) ** (1.0 / 3.0)
    return RegimeReport(
        rytov_sq=s_r2,
        z_max=z_max,
        phi=phi,
        fried=rho,
        weak_by_rytov=s_r2 < 1.0,
        weak_by_zmax=z <= z_max,
        yura_applicable=phi < YURA_PHI_THRESHOLD,
    )


def slant_length(
    h_a: float,
    h_b: float,
    zenith: float,
    constants: PhysicalConstants = CONSTANTS,
) -> float:
    """Geometric slant-path length between altitudes h_a <= h_b at a zenith angle."""
    if h_b < h_a:
        raise ModelError("slant geometry requires H_B >= H_A", stage="atmosphere")
    if not 0.0 <= zenith < math.pi / 2:
        raise ModelError("zenith angle must lie in [0, pi/2)", stage="atmosphere")
    r_a = constants.earth_radius + h_a
    r_b = constants.earth_radius + h_b
    cos_t = math.cos(zenith)
    disc = r_b**2 + r_a**2 * (cos_t**2 - 1.0)
    # sqrt(disc) - r_a cos(theta) cancels ~earth-radius terms to leave a
    # path of a few hundred metres; the conjugate form is exact algebraic
    # rewriting with an additive numerator (h_b - h_a)(2 R + h_a + h_b).
    numerator = (h_b - h_a) * (r_a + r_b)
    return numerator / (math.sqrt(disc) + r_a * cos_t)


def scintillation_index(
    h_a: float,
    h_b: float,
    zenith: float,
    profile: TurbulenceProfile,
    wavelength: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Altitude-dependent scintillation index for a slant path.

    Computed from the altitude-weighted Rytov-type integral
    beta_R^2 = 2.25 k^(7/6) sec^(11/6)(theta) *
               integral_{H_A}^{H_B} (h - H_A)^(5/6) Cn^2(h) dh
    through the standard weak-to-strong interpolation formula. Reported as
    a regime diagnostic; it does not feed the loss chain.
    """
    if h_b <= h_a:
        raise ModelError("scintillation index requires H_B > H_A", stage="atmosphere")
    k = 2.0 * math.pi / wavelength
    f = lambda h: (h - h_a) ** (5.0 / 6.0) * cn2_at_altitude(profile, h)
    # Integrable (h - H_A)^(5/6) endpoint; give the quadrature a nudge there.
    bp = (h_a + (h_b - h_a) * 1e-6,)
    moment = integrate(f, h_a, h_b, _tiny_magnitude(spec), breakpoints=bp).value
    beta_r2 = 2.25 * k ** (7.0 / 6.0) * (1.0 / math.cos(zenith)) ** (11.0 / 6.0) * moment
    b65 = beta_r2 ** (6.0 / 5.0)
    return math.expm1(
        0.49 * beta_r2 / (1.0 + 1.11 * b65) ** (7.0 / 6.0)
        + 0.51 * beta_r2 / (1.0 + 0.69 * b65) ** (5.0 / 6.0)
    )


def warn_if_yura_marginal(report: RegimeReport, context: str = "") -> None:
    """Emit the advisory warning when phi >= 0.4; never raises.

    The message carries no per-point numbers so the default warning filter
    collapses repeats across a sweep; per-point phi is in the diagnostics.
    """
    if not report.yura_applicable:
        warnings.warn(
            "short-term broadening theory only weakly applicable "
            f"(phi >= {YURA_PHI_THRESHOLD}) for at least one evaluated point; "
            "see the phi diagnostic column",
            RuntimeWarning,
            stacklevel=2,
        )
