"""Background-sky and receiver-generated photon budgets.

Photon numbers double as shot-noise-unit noise contributions through
omega = 2 nbar + nu_det (vacuum = 1 SNU); the same numeric value is used
in both roles throughout.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Literal

from .atmosphere import CONSTANTS, PhysicalConstants
from .errors import ModelError

SKY_BRIGHTNESS_ADVISORY = (1e-6, 1e-1)  # W m^-2 nm^-1 sr^-1, night..day


@dataclass(frozen=True)
class ReceiverEnvironment:
    """Sky and collection-geometry inputs for the background photon count."""

    sky_brightness: float      # B_lambda, W m^-2 nm^-1 sr^-1
    fov: float                 # Omega_fov, sr
    filter_width: float        # Delta lambda, m
    time_window: float         # Delta t, s
    lo_bandwidth: float = 0.0  # Delta nu, Hz

    def __post_init__(self) -> None:
        for name in ("sky_brightness", "fov", "filter_width", "time_window", "lo_bandwidth"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    def check_advisory(self) -> None:
        lo, hi = SKY_BRIGHTNESS_ADVISORY
        if self.sky_brightness and not lo <= self.sky_brightness <= hi:
            warnings.warn(
                f"sky brightness {self.sky_brightness:g} outside the "
                f"[{lo:g}, {hi:g}] night-to-day advisory range",
                RuntimeWarning,
                stacklevel=2,
            )


@dataclass(frozen=True)
class DetectorParams:
    """Coherent-detection receiver parameters."""

    nep: float = 6e-12          # W / sqrt(Hz)
    bandwidth: float = 100e6    # W (detector), Hz
    lo_pulse: float = 10e-9     # Delta t_LO, s
    lo_power: float = 100e-3    # P_LO, W
    clock: float = 5e6          # Hz
    linewidth: float = 1.6e3    # l_w, Hz
    nu_el: float = 0.0          # electronic noise, SNU
    nu_det: int = 1             # 1 homodyne, 2 heterodyne
    lo_scheme: Literal["tlo", "llo"] = "llo"
    n_ex: float = 0.0           # fixed excess receiver photons

    def __post_init__(self) -> None:
        if self.nu_det not in (1, 2):
            raise ValueError("nu_det must be 1 (homodyne) or 2 (heterodyne)")
        for name in ("nep", "bandwidth", "lo_pulse", "lo_power", "clock",
                     "linewidth", "nu_el", "n_ex"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.lo_scheme not in ("tlo", "llo"):
            raise ValueError("lo_scheme must be 'tlo' or 'llo'")


@dataclass(frozen=True)
class ThermalBudget:
    """Per-link thermal photon numbers and SNU variances."""

    n_bg: float
    n_ex: float
    n_total: float   # eta_eff * n_bg + n_ex
    n_a: float
    n_b: float
    omega_a: float
    omega_b: float


def background_photons(
    env: ReceiverEnvironment,
    a_rec: float,
    wavelength: float,
    constants: PhysicalConstants = CONSTANTS,
) -> float:
    """Mean background photons per mode seen by the receiver.

    nbar_bg = pi * Gamma_rec * B / (hbar omega) with the receiver etendue
    Gamma_rec = Delta_lambda * Delta_t * Omega_fov * a_rec^2 and
    omega = 2 pi c / lambda. B is per nanometre, so the filter width is
    converted accordingly.
    """
    if a_rec <= 0 or wavelength <= 0:
        raise ModelError("aperture and wavelength must be > 0", stage="noise")
    gamma_rec = env.filter_width * env.time_window * env.fov * a_rec**2
    omega = 2.0 * math.pi * constants.c / wavelength
    brightness_si = env.sky_brightness * 1e9  # per nm -> per m
    return math.pi * gamma_rec * brightness_si / (constants.hbar * omega)


def effective_filter(
    wavelength: float,
    lo_bandwidth: float,
    time_window: float | None = None,
) -> float:
    """Spectral filter width lambda^2 * Delta_nu / c from the LO overlap.

    Warns when the bandwidth sits below the 0.44 / Delta_t transform limit
    of the pulse; narrower is not physically meaningful.
    """
    if wavelength <= 0 or lo_bandwidth < 0:
        raise ModelError("wavelength must be > 0 and bandwidth >= 0", stage="noise")
    if time_window and lo_bandwidth and lo_bandwidth < 0.44 / time_window:
        warnings.warn(
            f"LO bandwidth {lo_bandwidth:g} Hz below the transform limit "
            f"{0.44 / time_window:g} Hz of the {time_window:g} s window",
            RuntimeWarning,
            stacklevel=2,
        )
    return wavelength**2 * lo_bandwidth / CONSTANTS.c


def calibration_photons(
    det: DetectorParams,
    wavelength: float,
    constants: PhysicalConstants = CONSTANTS,
) -> float:
    """Scheme-independent receiver noise photon number.

    N = nu_det NEP^2 W Delta_t_LO / (2 hbar omega P_LO).
    """
    if det.lo_power <= 0:
        raise ModelError("LO power must be > 0", stage="noise")
    omega = 2.0 * math.pi * constants.c / wavelength
    return (
        det.nu_det * det.nep**2 * det.bandwidth * det.lo_pulse
        / (2.0 * constants.hbar * omega * det.lo_power)
    )


def receiver_photons(
    det: DetectorParams,
    wavelength: float,
    modulation_variance: float,
    eta: float,
    scheme: Literal["tlo", "llo"] | None = None,
    constants: PhysicalConstants = CONSTANTS,
) -> float:
    """Receiver-generated photons for a TLO or LLO local oscillator.

    LLO grows linearly with the link transmissivity through the residual
    phase noise pi * l_w * V_A * eta / C; TLO scales inversely, N / eta.
    """
    if not 0.0 < eta <= 1.0:
        raise ModelError(f"transmissivity must be in (0, 1], got {eta}", stage="noise")
    n_cal = calibration_photons(det, wavelength, constants)
    scheme = scheme or det.lo_scheme
    if scheme == "tlo":
        return n_cal / eta
    if scheme == "llo":
        return n_cal + math.pi * det.linewidth * modulation_variance * eta / det.clock
    raise ModelError(f"unknown LO scheme {scheme!r}", stage="noise")


def assemble_thermal(
    det: DetectorParams,
    env: ReceiverEnvironment,
    a_rec: float,
    wavelength: float,
    eta_eff: float,
    n_bg_override: float | None = None,
    constants: PhysicalConstants = CONSTANTS,
) -> ThermalBudget:
    """Thermal budget of the asymmetric configuration.

    Alice sits next to the relay, so her link only sees the receiver's own
    excess photons (n_A = n_ex); Bob's link covers essentially the whole
    distance and collects the background too (n_B = eta_eff n_bg + n_ex).
    """
    n_bg = (
        n_bg_override
        if n_bg_override is not None
        else background_photons(env, a_rec, wavelength, constants)
    )
    n_total = eta_eff * n_bg + det.n_ex
    n_a = det.n_ex
    n_b = n_total
    return ThermalBudget(
        n_bg=n_bg,
        n_ex=det.n_ex,
        n_total=n_total,
        n_a=n_a,
        n_b=n_b,
        omega_a=2.0 * n_a + det.nu_det,
        omega_b=2.0 * n_b + det.nu_det,
    )
