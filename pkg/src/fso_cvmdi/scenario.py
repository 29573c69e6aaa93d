"""Scenario configuration: TOML ingestion, validation and hashing.

Config keys carry explicit unit suffixes (``wavelength_nm``,
``jitter_urad``, ``zenith_deg``) so no reader ever has to guess; bare
angle fields are rejected by name. Validation collects every violation
before failing so a config can be repaired in one pass.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Literal

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .atmosphere import LinkGeometry, TurbulenceProfile
from .beam_optics import BeamParams, PointingError, ReceiverAperture
from .errors import ConfigError
from .finite_size import BlockAccounting, EpsilonBudget, PilotConfig
from .mdi_security import ProtocolParams
from .noise_budget import DetectorParams, ReceiverEnvironment

SCHEMA_VERSION = 1

SWEEP_VARIABLES = ("distance_m", "block_size", "f_th", "zenith_deg", "rx_altitude_m")
OPTIMIZE_VARIABLES = ("f_th", "mu")


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    start: float
    stop: float
    steps: int
    log: bool = False
    series_zenith_deg: tuple[float, ...] = ()
    series_rx_altitude_m: tuple[float, ...] = ()

    def points(self) -> list[float]:
        if self.steps == 1:
            return [self.start]
        if self.log:
            la, lb = math.log10(self.start), math.log10(self.stop)
            return [10 ** (la + (lb - la) * i / (self.steps - 1)) for i in range(self.steps)]
        return [
            self.start + (self.stop - self.start) * i / (self.steps - 1)
            for i in range(self.steps)
        ]


@dataclass(frozen=True)
class OptimizeSpec:
    variable: str
    lower: float
    upper: float
    tol: float = 1e-4


@dataclass(frozen=True)
class Scenario:
    """Fully validated scenario: typed model inputs plus run controls."""

    geometry: LinkGeometry
    beam: BeamParams
    receiver: ReceiverAperture
    pointing: PointingError
    profile: TurbulenceProfile
    environment: ReceiverEnvironment
    detector: DetectorParams
    protocol: ProtocolParams
    accounting: BlockAccounting
    epsilons: EpsilonBudget
    pilots: PilotConfig
    alpha0: float
    eta_a: float
    wave: Literal["plane", "spherical"] = "plane"
    n_bg_override: float | None = None
    n_ex_mode: Literal["fixed", "model"] = "fixed"
    sweep: SweepSpec | None = None
    optimize: OptimizeSpec | None = None
    raw: dict | None = None

    @property
    def config_hash(self) -> str:
        """Stable hash of the raw config mapping (order-independent)."""
        canonical = json.dumps(self.raw or {}, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()[:16]

    def with_overrides(
        self,
        *,
        distance: float | None = None,
        rx_altitude: float | None = None,
        zenith: float | None = None,
        total_uses: float | None = None,
        f_th: float | None = None,
        mu: float | None = None,
    ) -> "Scenario":
        sc = self
        if distance is not None:
            sc = dataclasses.replace(sc, geometry=sc.geometry.with_distance(distance))
        if rx_altitude is not None or zenith is not None:
            geo = sc.geometry
            sc = dataclasses.replace(
                sc,
                geometry=LinkGeometry(
                    kind="slant",
                    wavelength=geo.wavelength,
                    tx_altitude=geo.tx_altitude,
                    rx_altitude=rx_altitude if rx_altitude is not None else geo.rx_altitude,
                    zenith=zenith if zenith is not None else geo.zenith,
                    constants=geo.constants,
                ),
            )
        if total_uses is not None:
            frac_pe = sc.accounting.m_pe / sc.accounting.total
            frac_pl = sc.accounting.m_pl / sc.accounting.total
            sc = dataclasses.replace(
                sc,
                accounting=BlockAccounting.from_fractions(
                    total_uses, frac_pe, frac_pl,
                    sc.accounting.digitization, sc.accounting.p_ec,
                ),
            )
        if f_th is not None:
            sc = dataclasses.replace(
                sc, pilots=dataclasses.replace(sc.pilots, f_th=f_th)
            )
        if mu is not None:
            sc = dataclasses.replace(
                sc, protocol=dataclasses.replace(sc.protocol, mu_a=mu, mu_b=mu)
            )
        return sc


# Allowed keys per section; used both for unknown-key rejection and for
# the "did you forget the unit suffix" hints.
_SCHEMA: dict[str, set[str]] = {
    "": {"schema", "title"},
    "geometry": {
        "kind", "wavelength_nm", "distance_m", "altitude_m",
        "tx_altitude_m", "rx_altitude_m", "zenith_deg",
    },
    "beam": {"waist_cm", "curvature_m"},
    "receiver": {"aperture_cm", "efficiency"},
    "pointing": {"jitter_urad"},
    "turbulence": {"model", "cn2", "ground_cn2", "windspeed_mps", "wave"},
    "environment": {
        "sky_brightness", "fov_sr", "time_window_ns", "filter_pm",
        "lo_bandwidth_mhz", "background_photons",
    },
    "detector": {
        "nep_pw", "bandwidth_mhz", "lo_pulse_ns", "lo_power_mw", "clock_mhz",
        "linewidth_khz", "nu_det", "nu_el", "lo_scheme", "excess_photons",
        "excess_photons_mode",
    },
    "protocol": {"mu", "mu_a", "mu_b", "beta", "eta_a", "alpha0"},
    "blocks": {"total", "pe_fraction", "pilot_fraction", "m_pe", "m_pl",
               "digitization_bits", "fer"},
    "epsilons": {"smoothing", "hashing", "correctness", "pe"},
    "pilots": {"photons", "f_th", "bin_width"},
    "switches": {"holevo_sign", "gmax_policy", "gmax_override",
                 "threshold_mode", "rate_evaluation"},
    "sweep": {"variable", "start", "stop", "steps", "log",
              "series_zenith_deg", "series_rx_altitude_m"},
    "optimize": {"variable", "lower", "upper", "tol"},
}

_UNSUFFIXED_HINTS = {
    "jitter": "jitter_urad",
    "delta": "jitter_urad",
    "zenith": "zenith_deg",
    "theta": "zenith_deg",
    "wavelength": "wavelength_nm",
    "distance": "distance_m",
    "waist": "waist_cm",
    "aperture": "aperture_cm",
}


class _Reader:
    """Pulls typed values out of the parsed TOML, recording all violations."""

    def __init__(self, data: dict):
        self.data = data
        self.errors: list[str] = []

    def check_unknown_keys(self) -> None:
        for section, content in self.data.items():
            if not isinstance(content, dict):
                if section not in _SCHEMA[""]:
                    self._unknown("", section)
                continue
            if section not in _SCHEMA:
                self.errors.append(f"unknown section [{section}]")
                continue
            for key in content:
                if key not in _SCHEMA[section]:
                    self._unknown(section, key)

    def _unknown(self, section: str, key: str) -> None:
        path = f"{section}.{key}" if section else key
        hint = _UNSUFFIXED_HINTS.get(key)
        if hint:
            self.errors.append(
                f"{path}: unknown field; unit suffix is mandatory, use {section}.{hint}"
            )
        else:
            self.errors.append(f"{path}: unknown field")

    def get(self, section: str, key: str, default: Any = None, required: bool = False) -> Any:
        scope = self.data if section == "" else self.data.get(section, {})
        value = scope.get(key, None) if isinstance(scope, dict) else None
        if value is None:
            if required:
                self.errors.append(f"{section}.{key}: required field missing")
            return default
        return value

    def number(self, section: str, key: str, default: float | None = None,
               required: bool = False, minimum: float | None = None,
               maximum: float | None = None, exclusive_min: bool = False) -> float | None:
        value = self.get(section, key, default, required)
        if value is None:
            return None
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.errors.append(f"{section}.{key}: expected a number, got {value!r}")
            return default
        value = float(value)
        if minimum is not None and (value <= minimum if exclusive_min else value < minimum):
            op = ">" if exclusive_min else ">="
            self.errors.append(f"{section}.{key}: must be {op} {minimum}, got {value}")
            return default
        if maximum is not None and value > maximum:
            self.errors.append(f"{section}.{key}: must be <= {maximum}, got {value}")
            return default
        return value

    def build(self, factory, *args, label: str = "", **kwargs):
        """Run a dataclass constructor, converting its ValueError into a violation."""
        try:
            return factory(*args, **kwargs)
        except (ValueError, TypeError) as exc:
            self.errors.append(f"{label or getattr(factory, '__name__', 'config')}: {exc}")
            return None


def load_config(path: str | Path) -> Scenario:
    """Parse and validate a scenario TOML file.

    Raises ConfigError carrying the complete list of violations.
    """
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: TOML parse error: {exc}") from None
    return scenario_from_mapping(data)


def scenario_from_mapping(data: dict) -> Scenario:
    r = _Reader(data)
    r.check_unknown_keys()

    schema = r.get("", "schema", default=SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        r.errors.append(f"schema: unsupported version {schema} (expected {SCHEMA_VERSION})")

    kind = r.get("geometry", "kind", default="horizontal")
    if kind not in ("horizontal", "slant"):
        r.errors.append(f"geometry.kind: must be 'horizontal' or 'slant', got {kind!r}")
        kind = "horizontal"
    wavelength_nm = r.number("geometry", "wavelength_nm", required=True, minimum=0.0,
                             exclusive_min=True)
    wavelength = (wavelength_nm or 800.0) * 1e-9

    if kind == "horizontal":
        distance = r.number("geometry", "distance_m", required=True, minimum=0.0,
                            exclusive_min=True) or 1.0
        altitude = r.number("geometry", "altitude_m", default=0.0, minimum=0.0) or 0.0
        geometry = r.build(
            LinkGeometry, kind="horizontal", wavelength=wavelength,
            distance=distance, tx_altitude=altitude, label="geometry",
        )
    else:
        tx = r.number("geometry", "tx_altitude_m", required=True, minimum=0.0) or 0.0
        rx = r.number("geometry", "rx_altitude_m", required=True, minimum=0.0) or tx
        zen = r.number("geometry", "zenith_deg", required=True, minimum=0.0,
                       maximum=89.999) or 0.0
        geometry = r.build(
            LinkGeometry, kind="slant", wavelength=wavelength,
            tx_altitude=tx, rx_altitude=rx, zenith=math.radians(zen),
            label="geometry",
        )

    waist = (r.number("beam", "waist_cm", required=True, minimum=0.0,
                      exclusive_min=True) or 10.0) * 1e-2
    curvature = r.number("beam", "curvature_m")
    beam = r.build(
        BeamParams, waist=waist, wavelength=wavelength,
        curvature=math.inf if curvature is None else curvature, label="beam",
    )

    aperture = (r.number("receiver", "aperture_cm", required=True, minimum=0.0,
                         exclusive_min=True) or 20.0) * 1e-2
    efficiency = r.number("receiver", "efficiency", default=1.0, minimum=0.0,
                          maximum=1.0, exclusive_min=True) or 1.0
    receiver = r.build(ReceiverAperture, radius=aperture, efficiency=efficiency,
                       label="receiver")

    jitter = r.number("pointing", "jitter_urad", required=True, minimum=0.0)
    pointing = r.build(PointingError, jitter=(jitter or 0.0) * 1e-6, label="pointing")

    model = r.get("turbulence", "model", default="constant")
    if model == "constant":
        cn2 = r.number("turbulence", "cn2", required=True, minimum=0.0,
                       exclusive_min=True) or 1e-15
        profile = r.build(TurbulenceProfile.constant, cn2, label="turbulence")
    elif model == "hufnagel_valley":
        a = r.number("turbulence", "ground_cn2", required=True, minimum=0.0,
                     exclusive_min=True) or 1e-15
        v = r.number("turbulence", "windspeed_mps", required=True, minimum=0.0) or 0.0
        profile = r.build(TurbulenceProfile.hufnagel_valley, a, v, label="turbulence")
    else:
        r.errors.append(
            f"turbulence.model: must be 'constant' or 'hufnagel_valley', got {model!r}")
        profile = TurbulenceProfile.constant(1e-15)
    wave = r.get("turbulence", "wave", default="plane")
    if wave not in ("plane", "spherical"):
        r.errors.append(f"turbulence.wave: must be 'plane' or 'spherical', got {wave!r}")
        wave = "plane"

    lo_bandwidth = (r.number("environment", "lo_bandwidth_mhz", default=0.0,
                             minimum=0.0) or 0.0) * 1e6
    filter_pm = r.number("environment", "filter_pm", minimum=0.0)
    if filter_pm is None:
        filter_width = wavelength**2 * lo_bandwidth / 299792458.0
    else:
        filter_width = filter_pm * 1e-12
    environment = r.build(
        ReceiverEnvironment,
        sky_brightness=r.number("environment", "sky_brightness", default=0.0,
                                minimum=0.0) or 0.0,
        fov=r.number("environment", "fov_sr", default=0.0, minimum=0.0) or 0.0,
        filter_width=filter_width,
        time_window=(r.number("environment", "time_window_ns", default=0.0,
                              minimum=0.0) or 0.0) * 1e-9,
        lo_bandwidth=lo_bandwidth,
        label="environment",
    )
    n_bg_override = r.number("environment", "background_photons", minimum=0.0)

    nu_det_raw = r.get("detector", "nu_det", default=1)
    if nu_det_raw not in (1, 2):
        r.errors.append(f"detector.nu_det: must be 1 (homodyne) or 2 (heterodyne), "
                        f"got {nu_det_raw!r}")
        nu_det_raw = 1
    lo_scheme = r.get("detector", "lo_scheme", default="llo")
    if lo_scheme not in ("tlo", "llo"):
        r.errors.append(f"detector.lo_scheme: must be 'tlo' or 'llo', got {lo_scheme!r}")
        lo_scheme = "llo"
    n_ex_mode = r.get("detector", "excess_photons_mode", default="fixed")
    if n_ex_mode not in ("fixed", "model"):
        r.errors.append(
            f"detector.excess_photons_mode: must be 'fixed' or 'model', got {n_ex_mode!r}")
        n_ex_mode = "fixed"
    detector = r.build(
        DetectorParams,
        nep=(r.number("detector", "nep_pw", default=6.0, minimum=0.0) or 0.0) * 1e-12,
        bandwidth=(r.number("detector", "bandwidth_mhz", default=100.0,
                            minimum=0.0) or 0.0) * 1e6,
        lo_pulse=(r.number("detector", "lo_pulse_ns", default=10.0,
                           minimum=0.0) or 0.0) * 1e-9,
        lo_power=(r.number("detector", "lo_power_mw", default=100.0,
                           minimum=0.0) or 100.0) * 1e-3,
        clock=(r.number("detector", "clock_mhz", default=5.0, minimum=0.0) or 0.0) * 1e6,
        linewidth=(r.number("detector", "linewidth_khz", default=0.0,
                            minimum=0.0) or 0.0) * 1e3,
        nu_el=r.number("detector", "nu_el", default=0.0, minimum=0.0) or 0.0,
        nu_det=int(nu_det_raw),
        lo_scheme=lo_scheme,
        n_ex=r.number("detector", "excess_photons", default=0.0, minimum=0.0) or 0.0,
        label="detector",
    )

    mu = r.number("protocol", "mu")
    mu_a = r.number("protocol", "mu_a", default=mu)
    mu_b = r.number("protocol", "mu_b", default=mu)
    if mu_a is None or mu_b is None:
        r.errors.append("protocol.mu (or mu_a and mu_b): required field missing")
        mu_a = mu_b = 1.0
    holevo_sign = r.get("switches", "holevo_sign", default="minus")
    if holevo_sign not in ("minus", "plus"):
        r.errors.append(
            f"switches.holevo_sign: must be 'minus' or 'plus', got {holevo_sign!r}")
        holevo_sign = "minus"
    gmax_policy: Any = r.get("switches", "gmax_policy", default="max_physical")
    gmax_override = r.number("switches", "gmax_override", minimum=0.0)
    if gmax_override is not None:
        gmax_policy = gmax_override
    elif gmax_policy not in ("max_physical", "geometric_mean"):
        r.errors.append(
            "switches.gmax_policy: must be 'max_physical' or 'geometric_mean' "
            f"(or set gmax_override), got {gmax_policy!r}")
        gmax_policy = "max_physical"
    protocol = r.build(
        ProtocolParams,
        mu_a=mu_a, mu_b=mu_b,
        beta=r.number("protocol", "beta", required=True, minimum=0.0, maximum=1.0) or 0.0,
        nu_det=int(nu_det_raw),
        nu_el=detector.nu_el if detector else 0.0,
        eta_eff=efficiency,
        holevo_sign=holevo_sign,
        gmax_policy=gmax_policy,
        label="protocol",
    )
    eta_a = r.number("protocol", "eta_a", required=True, minimum=0.0, maximum=1.0,
                     exclusive_min=True) or 1.0
    alpha0 = r.number("protocol", "alpha0", default=0.0, minimum=0.0) or 0.0

    total = r.number("blocks", "total", required=True, minimum=1.0)
    m_pe = r.number("blocks", "m_pe", minimum=0.0)
    m_pl = r.number("blocks", "m_pl", minimum=0.0)
    if m_pe is None:
        m_pe = (r.number("blocks", "pe_fraction", default=0.0, minimum=0.0,
                         maximum=1.0) or 0.0) * (total or 1.0)
    if m_pl is None:
        m_pl = (r.number("blocks", "pilot_fraction", default=0.0, minimum=0.0,
                         maximum=1.0) or 0.0) * (total or 1.0)
    fer = r.number("blocks", "fer", default=0.0, minimum=0.0, maximum=1.0) or 0.0
    digitization = r.get("blocks", "digitization_bits", default=64)
    if not isinstance(digitization, int) or digitization < 1:
        r.errors.append(f"blocks.digitization_bits: must be a positive integer, "
                        f"got {digitization!r}")
        digitization = 64
    accounting = r.build(
        BlockAccounting,
        total=total or 1.0, m_pe=m_pe, m_pl=m_pl,
        digitization=digitization, p_ec=1.0 - fer,
        label="blocks",
    )

    epsilons = r.build(
        EpsilonBudget,
        eps_s=r.number("epsilons", "smoothing", default=1e-10, exclusive_min=True,
                       minimum=0.0) or 1e-10,
        eps_h=r.number("epsilons", "hashing", default=1e-10, exclusive_min=True,
                       minimum=0.0) or 1e-10,
        eps_c=r.number("epsilons", "correctness", default=1e-10, exclusive_min=True,
                       minimum=0.0) or 1e-10,
        eps_pe=r.number("epsilons", "pe", default=1e-10, exclusive_min=True,
                        minimum=0.0) or 1e-10,
        label="epsilons",
    )

    threshold_mode = r.get("switches", "threshold_mode", default="amplitude")
    if threshold_mode not in ("amplitude", "transmissivity"):
        r.errors.append(f"switches.threshold_mode: must be 'amplitude' or "
                        f"'transmissivity', got {threshold_mode!r}")
        threshold_mode = "amplitude"
    rate_evaluation = r.get("switches", "rate_evaluation", default="threshold")
    if rate_evaluation not in ("threshold", "instantaneous"):
        r.errors.append(f"switches.rate_evaluation: must be 'threshold' or "
                        f"'instantaneous', got {rate_evaluation!r}")
        rate_evaluation = "threshold"
    pilots = r.build(
        PilotConfig,
        n_pl=r.number("pilots", "photons", default=1e3, minimum=0.0,
                      exclusive_min=True) or 1e3,
        f_th=r.number("pilots", "f_th", default=1.0, minimum=0.0, maximum=1.0,
                      exclusive_min=True) or 1.0,
        bin_width=r.number("pilots", "bin_width", default=0.01, minimum=0.0) or 0.0,
        threshold_mode=threshold_mode,
        rate_evaluation=rate_evaluation,
        label="pilots",
    )

    sweep = None
    if "sweep" in data:
        variable = r.get("sweep", "variable", required=True)
        if variable not in SWEEP_VARIABLES:
            r.errors.append(
                f"sweep.variable: must be one of {', '.join(SWEEP_VARIABLES)}, "
                f"got {variable!r}")
        steps = r.get("sweep", "steps", default=21)
        if not isinstance(steps, int) or steps < 1:
            r.errors.append(f"sweep.steps: must be a positive integer, got {steps!r}")
            steps = 1
        start = r.number("sweep", "start", required=True)
        stop = r.number("sweep", "stop", required=True)
        log = r.get("sweep", "log", default=False)
        if not isinstance(log, bool):
            r.errors.append(f"sweep.log: must be a boolean, got {log!r}")
            log = False
        if start is not None and stop is not None and variable in SWEEP_VARIABLES:
            if log and (start <= 0 or stop <= 0):
                r.errors.append("sweep: log spacing requires positive start/stop")
            sweep = SweepSpec(
                variable=variable, start=start, stop=stop, steps=steps, log=log,
                series_zenith_deg=tuple(r.get("sweep", "series_zenith_deg", default=[]) or []),
                series_rx_altitude_m=tuple(
                    r.get("sweep", "series_rx_altitude_m", default=[]) or []),
            )

    optimize = None
    if "optimize" in data:
        variable = r.get("optimize", "variable", required=True)
        if variable not in OPTIMIZE_VARIABLES:
            r.errors.append(
                f"optimize.variable: must be one of {', '.join(OPTIMIZE_VARIABLES)}, "
                f"got {variable!r}")
        lower = r.number("optimize", "lower", required=True)
        upper = r.number("optimize", "upper", required=True)
        if lower is not None and upper is not None and variable in OPTIMIZE_VARIABLES:
            if variable == "mu" and lower < 1.0:
                r.errors.append("optimize: mu bounds must be >= 1 SNU")
            if variable == "f_th" and not 0.0 < lower <= 1.0 >= upper:
                r.errors.append("optimize: f_th bounds must lie in (0, 1]")
            if lower >= upper:
                r.errors.append(f"optimize: need lower < upper, got [{lower}, {upper}]")
            else:
                optimize = OptimizeSpec(
                    variable=variable, lower=lower, upper=upper,
                    tol=r.number("optimize", "tol", default=1e-4, minimum=0.0,
                                 exclusive_min=True) or 1e-4,
                )

    if r.errors:
        raise ConfigError(r.errors)
    assert geometry and beam and receiver and pointing and profile
    assert environment and detector and protocol and accounting and epsilons and pilots
    return Scenario(
        geometry=geometry,
        beam=beam,
        receiver=receiver,
        pointing=pointing,
        profile=profile,
        environment=environment,
        detector=detector,
        protocol=protocol,
        accounting=accounting,
        epsilons=epsilons,
        pilots=pilots,
        alpha0=alpha0,
        eta_a=eta_a,
        wave=wave,
        n_bg_override=n_bg_override,
        n_ex_mode=n_ex_mode,
        sweep=sweep,
        optimize=optimize,
        raw=data,
    )
