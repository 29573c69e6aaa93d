"""CSV and metadata output.

CSV files open with a ``# schema=1`` comment, carry the config hash in
every row, and format floats with shortest round-trip precision so bodies
are byte-identical across runs with the same config and seed. Run
metadata (config echo, switches, versions, seed, timestamp) goes to a
sibling ``.meta.json``; the timestamp lives only there.
"""
from __future__ import annotations

import json
import math
import platform
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy
import scipy

from . import __version__
from .finite_size import RatePoint
from .scenario import SCHEMA_VERSION, Scenario

RATE_COLUMNS: tuple[str, ...] = (
    "config_hash", "z_m", "block_size", "f_th", "zenith_deg", "rx_altitude_m",
    "eta_a", "eta_b0", "eta_b_min", "eta_atm", "eta_st", "survival",
    "gamma", "r0_m", "sigma_m", "phi",
    "omega_a", "omega_b", "g_max", "xi", "sigma_n2",
    "eta_a_wc", "eta_b_wc", "xi_wc", "w",
    "zeta_a", "zeta_b", "zeta_c", "nu_plus", "nu_minus", "nu_c",
    "i_ab", "chi_e", "k_inf", "k_pe", "k_comp_signed", "k_comp", "k_avg",
    "epsilon", "rytov_sq", "z_max_m", "scint_index",
)


def format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return repr(value)
    return str(value)


def rate_row(
    point: RatePoint,
    scenario: Scenario,
    config_hash: str,
    overrides: Mapping[str, float] | None = None,
) -> dict[str, Any]:
    ov = overrides or {}
    geo = scenario.geometry
    return {
        "config_hash": config_hash,
        "z_m": point.z,
        "block_size": ov.get("block_size", scenario.accounting.total),
        "f_th": ov.get("f_th", scenario.pilots.f_th),
        "zenith_deg": ov.get(
            "zenith_deg",
            math.degrees(geo.zenith) if geo.kind == "slant" else math.nan,
        ),
        "rx_altitude_m": ov.get(
            "rx_altitude_m", geo.rx_altitude if geo.kind == "slant" else math.nan
        ),
        "eta_a": point.eta_a,
        "eta_b0": point.eta_b0,
        "eta_b_min": point.eta_b_min,
        "eta_atm": point.eta_atm,
        "eta_st": point.eta_st,
        "survival": point.survival,
        "gamma": point.gamma,
        "r0_m": point.r0,
        "sigma_m": point.sigma,
        "phi": point.phi,
        "omega_a": point.omega_a,
        "omega_b": point.omega_b,
        "g_max": point.g_max,
        "xi": point.xi,
        "sigma_n2": point.sigma_n2,
        "eta_a_wc": point.eta_a_wc,
        "eta_b_wc": point.eta_b_wc,
        "xi_wc": point.xi_wc,
        "w": point.w,
        "zeta_a": point.zeta_a,
        "zeta_b": point.zeta_b,
        "zeta_c": point.zeta_c,
        "nu_plus": point.nu_plus,
        "nu_minus": point.nu_minus,
        "nu_c": point.nu_c,
        "i_ab": point.i_ab,
        "chi_e": point.chi_e,
        "k_inf": point.k_inf,
        "k_pe": point.k_pe,
        "k_comp_signed": point.k_comp_signed,
        "k_comp": point.k_comp,
        "k_avg": point.k_avg,
        "epsilon": point.epsilon,
        "rytov_sq": point.rytov_sq,
        "z_max_m": point.z_max,
        "scint_index": point.scint_index,
    }


def write_csv(
    path: Path,
    columns: Sequence[str],
    rows: Iterable[Mapping[str, Any]],
) -> None:
    lines = [f"# schema={SCHEMA_VERSION}", ",".join(columns)]
    for row in rows:
        lines.append(",".join(format_value(row.get(col, math.nan)) for col in columns))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_meta(
    path: Path,
    subcommand: str,
    scenario: Scenario,
    seed: int,
    extra: Mapping[str, Any] | None = None,
) -> None:
    meta = {
        "schema": SCHEMA_VERSION,
        "subcommand": subcommand,
        "config_hash": scenario.config_hash,
        "seed": seed,
        "switches": {
            "holevo_sign": scenario.protocol.holevo_sign,
            "gmax_policy": str(scenario.protocol.gmax_policy),
            "threshold_mode": scenario.pilots.threshold_mode,
            "rate_evaluation": scenario.pilots.rate_evaluation,
            "lo_scheme": scenario.detector.lo_scheme,
            "excess_photons_mode": scenario.n_ex_mode,
            "wave": scenario.wave,
        },
        "epsilon_total": scenario.epsilons.total(scenario.accounting.p_ec),
        "confidence_w": scenario.epsilons.w,
        "config": scenario.raw,
        "versions": {
            "fso_cvmdi": __version__,
            "python": platform.python_version(),
            "numpy": numpy.__version__,
            "scipy": scipy.__version__,
        },
        "generated_utc": datetime.now(timezone.utc).isoformat(),
    }
    if extra:
        meta.update(extra)
    path.write_text(json.dumps(meta, indent=2, sort_keys=False) + "\n", encoding="utf-8")
