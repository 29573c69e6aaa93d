"""Command-line front end.

    fso-cvmdi <subcommand> --config <path> --out <dir> [--seed N] [--threads N]

Subcommands: regime, noise, rate, slant, sweep, optimize, validate. Each
writes ``<out>/<subcommand>.csv`` plus ``<out>/<subcommand>.meta.json``.
Exit codes: 0 success, 2 config error, 3 model/domain error, 4 numerical
non-convergence.
"""
from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Iterable

from . import beam_optics, finite_size, mc_oracle, noise_budget, pipeline
from .atmosphere import classify_regime
from .errors import ConfigError, ModelError, NonConvergenceError
from .mc_oracle import RngStream
from .numerics import integrate, maximize_1d
from .report import RATE_COLUMNS, rate_row, write_csv, write_meta
from .scenario import Scenario, load_config

SUBCOMMANDS = ("regime", "noise", "rate", "slant", "sweep", "optimize", "validate")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_MODEL = 3
EXIT_NUMERIC = 4


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="fso-cvmdi",
        description="Free-space CV-MDI QKD channel model and key-rate engine",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("regime", "turbulence-regime diagnostics versus distance"),
        ("noise", "receiver noise photons (TLO/LLO) and background versus distance"),
        ("rate", "composable rate versus distance (horizontal path)"),
        ("slant", "composable rate and scintillation over slant paths"),
        ("sweep", "composable rate over a configured sweep axis"),
        ("optimize", "maximise the averaged rate over one parameter"),
        ("validate", "Monte-Carlo versus quadrature consistency report"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="scenario TOML file")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
        p.add_argument("--threads", type=int, default=1, help="worker pool size")
    args = parser.parse_args(argv)

    try:
        scenario = load_config(args.config)
    except ConfigError as exc:
        for violation in exc.violations:
            print(f"config error: {violation}", file=sys.stderr)
        return EXIT_CONFIG

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    runner = _RUNNERS[args.command]
    try:
        return runner(scenario, out, args.seed, max(args.threads, 1))
    except NonConvergenceError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ModelError as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return EXIT_MODEL


def _pool_map(fn: Callable, items: Iterable, threads: int) -> list:
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        # map() preserves input order, so output rows are deterministic
        # regardless of completion order.
        return list(pool.map(fn, items))


def _sweep_points(scenario: Scenario, default_variable: str,
                  default: tuple[float, float, int, bool]) -> tuple[str, list[float]]:
    sweep = scenario.sweep
    if sweep is not None:
        return sweep.variable, sweep.points()
    start, stop, steps, log = default
    if log:
        la, lb = math.log10(start), math.log10(stop)
        return default_variable, [
            10 ** (la + (lb - la) * i / (steps - 1)) for i in range(steps)
        ]
    return default_variable, [
        start + (stop - start) * i / (steps - 1) for i in range(steps)
    ]


def run_regime(scenario: Scenario, out: Path, seed: int, threads: int) -> int:
    variable, points = _sweep_points(scenario, "distance_m", (10.0, 1000.0, 61, True))
    if variable != "distance_m" or scenario.geometry.kind != "horizontal":
        raise ModelError("regime expects a horizontal distance sweep", stage="config")
    chash = scenario.config_hash

    def one(z: float) -> dict:
        geo = scenario.geometry.with_distance(z)
        rep = classify_regime(geo, scenario.profile, scenario.receiver.radius,
                              scenario.beam.waist)
        return {
            "config_hash": chash,
            "z_m": z,
            "rytov_sq": rep.rytov_sq,
            "z_max_m": rep.z_max,
            "fried_m": rep.fried,
            "phi": rep.phi,
            "spot_m": beam_optics.spot_size(scenario.beam, z),
            "weak_by_rytov": rep.weak_by_rytov,
            "weak_by_zmax": rep.weak_by_zmax,
            "yura_applicable": rep.yura_applicable,
        }

    rows = _pool_map(one, points, threads)
    columns = ("config_hash", "z_m", "rytov_sq", "z_max_m", "fried_m", "phi",
               "spot_m", "weak_by_rytov", "weak_by_zmax", "yura_applicable")
    write_csv(out / "regime.csv", columns, rows)
    write_meta(out / "regime.meta.json", "regime", scenario, seed)
    return EXIT_OK


def run_noise(scenario: Scenario, out: Path, seed: int, threads: int) -> int:
    variable, points = _sweep_points(scenario, "distance_m", (10.0, 1000.0, 61, True))
    if variable != "distance_m" or scenario.geometry.kind != "horizontal":
        raise ModelError("noise expects a horizontal distance sweep", stage="config")
    chash = scenario.config_hash
    det = scenario.detector
    wavelength = scenario.geometry.wavelength
    n_cal = noise_budget.calibration_photons(det, wavelength)
    n_bg = noise_budget.background_photons(
        scenario.environment, scenario.receiver.radius, wavelength)

    def one(z: float) -> dict:
        state = beam_optics.deflection_params(
            scenario.beam, scenario.geometry.with_distance(z), scenario.profile,
            scenario.receiver, scenario.pointing, scenario.alpha0,
        )
        eta = state.eta0
        v_a = scenario.protocol.sigma_a2
        return {
            "config_hash": chash,
            "z_m": z,
            "eta_b0": eta,
            "n_cal": n_cal,
            "n_tlo": noise_budget.receiver_photons(det, wavelength, v_a, eta, "tlo"),
            "n_llo": noise_budget.receiver_photons(det, wavelength, v_a, eta, "llo"),
            "n_bg": n_bg,
            "filter_pm": scenario.environment.filter_width * 1e12,
        }

    rows = _pool_map(one, points, threads)
    columns = ("config_hash", "z_m", "eta_b0", "n_cal", "n_tlo", "n_llo",
               "n_bg", "filter_pm")
    write_csv(out / "noise.csv", columns, rows)
    write_meta(out / "noise.meta.json", "noise", scenario, seed)
    return EXIT_OK


def run_rate(scenario: Scenario, out: Path, seed: int, threads: int) -> int:
    variable, points = _sweep_points(scenario, "distance_m", (50.0, 300.0, 26, False))
    if variable != "distance_m" or scenario.geometry.kind != "horizontal":
        raise ModelError("rate expects a horizontal distance sweep; "
                         "use `sweep` or `slant` otherwise", stage="config")
    chash = scenario.config_hash

    def one(z: float) -> dict:
        point = pipeline.evaluate(scenario, distance=z)
        return rate_row(point, scenario, chash)

    rows = _pool_map(one, points, threads)
    write_csv(out / "rate.csv", RATE_COLUMNS, rows)
    write_meta(out / "rate.meta.json", "rate", scenario, seed)
    return EXIT_OK


def run_slant(scenario: Scenario, out: Path, seed: int, threads: int) -> int:
    if scenario.geometry.kind != "slant":
        raise ModelError("slant requires slant geometry", stage="config")
    variable, points = _sweep_points(scenario, "rx_altitude_m", (40.0, 200.0, 17, False))
    sweep = scenario.sweep
    if variable == "rx_altitude_m":
        series = list(sweep.series_zenith_deg) if sweep else []
        series = series or [math.degrees(scenario.geometry.zenith)]
        combos = [(alt, zen) for zen in series for alt in points]
    elif variable == "zenith_deg":
        series = list(sweep.series_rx_altitude_m) if sweep else []
        series = series or [scenario.geometry.rx_altitude]
        combos = [(alt, zen) for alt in series for zen in points]
    else:
        raise ModelError("slant sweeps over rx_altitude_m or zenith_deg", stage="config")
    chash = scenario.config_hash

    def one(combo: tuple[float, float]) -> dict:
        alt, zen = combo
        point = pipeline.evaluate(
            scenario, rx_altitude=alt, zenith=math.radians(zen)
        )
        return rate_row(point, scenario, chash,
                        overrides={"rx_altitude_m": alt, "zenith_deg": zen})

    rows = _pool_map(one, combos, threads)
    write_csv(out / "slant.csv", RATE_COLUMNS, rows)
    write_meta(out / "slant.meta.json", "slant", scenario, seed)
    return EXIT_OK


def run_sweep(scenario: Scenario, out: Path, seed: int, threads: int) -> int:
    if scenario.sweep is None:
        raise ModelError("sweep requires a [sweep] section", stage="config")
    variable = scenario.sweep.variable
    points = scenario.sweep.points()
    chash = scenario.config_hash

    def one(value: float) -> dict:
        if variable == "distance_m":
            point = pipeline.evaluate(scenario, distance=value)
            overrides = {}
        elif variable == "block_size":
            point = pipeline.evaluate(scenario, total_uses=value)
            overrides = {"block_size": value}
        elif variable == "f_th":
            point = pipeline.evaluate(scenario, f_th=value)
            overrides = {"f_th": value}
        elif variable == "zenith_deg":
            point = pipeline.evaluate(scenario, zenith=math.radians(value))
            overrides = {"zenith_deg": value}
        elif variable == "rx_altitude_m":
            point = pipeline.evaluate(scenario, rx_altitude=value)
            overrides = {"rx_altitude_m": value}
        else:
            raise ModelError(f"unsupported sweep variable {variable!r}", stage="config")
        return rate_row(point, scenario, chash, overrides=overrides)

    rows = _pool_map(one, points, threads)
    write_csv(out / "sweep.csv", RATE_COLUMNS, rows)
    write_meta(out / "sweep.meta.json", "sweep", scenario, seed,
               extra={"sweep_variable": variable})
    return EXIT_OK


def run_optimize(scenario: Scenario, out: Path, seed: int, threads: int) -> int:
    spec = scenario.optimize
    if spec is None:
        raise ModelError("optimize requires an [optimize] section", stage="config")

    def objective(value: float) -> float:
        if spec.variable == "f_th":
            return pipeline.evaluate(scenario, f_th=value).k_avg
        return pipeline.evaluate(scenario, mu=_clip_mu(value)).k_avg

    argmax, best = maximize_1d(objective, spec.lower, spec.upper, tol=spec.tol)
    rows = [{
        "config_hash": scenario.config_hash,
        "variable": spec.variable,
        "lower": spec.lower,
        "upper": spec.upper,
        "tol": spec.tol,
        "argmax": argmax,
        "k_avg_max": best,
    }]
    columns = ("config_hash", "variable", "lower", "upper", "tol", "argmax", "k_avg_max")
    write_csv(out / "optimize.csv", columns, rows)
    write_meta(out / "optimize.meta.json", "optimize", scenario, seed,
               extra={"argmax": argmax, "k_avg_max": best})
    return EXIT_OK


def _clip_mu(value: float) -> float:
    return max(value, 1.0)


def run_validate(scenario: Scenario, out: Path, seed: int, threads: int) -> int:
    """MC-versus-quadrature consistency checks at the configured scenario."""
    chash = scenario.config_hash
    sc = scenario
    state = beam_optics.deflection_params(
        sc.beam, sc.geometry, sc.profile, sc.receiver, sc.pointing, sc.alpha0
    )
    point = pipeline.evaluate(sc)
    rows = []

    # 1. Deflection-averaged rate: quadrature vs Monte Carlo.
    k_of_r = finite_size.rate_functional(
        lambda eta_r: point.k_comp_signed, state, point.eta_b_min
    )
    mc = mc_oracle.mc_average_rate(k_of_r, state, samples=10**6,
                                   stream=RngStream(seed, 0))
    tol = 3.0 * max(mc.standard_error, 1e-12 * max(abs(mc.mean), 1.0))
    rows.append({
        "config_hash": chash, "check": "deflection_average",
        "quadrature": point.k_avg, "monte_carlo": mc.mean,
        "tolerance": tol, "passed": abs(point.k_avg - mc.mean) <= tol,
    })

    # 2. Fading pdf pushforward mass. Evaluated on a strong-wandering
    # variant of the link: when the fading support sits within ~1e-13 of
    # eta0 (tight beams), ln(eta/tau) underflows double resolution and the
    # tau-space density cannot be integrated meaningfully.
    broad = beam_optics.deflection_params(
        sc.beam, sc.geometry, sc.profile, sc.receiver,
        dataclasses.replace(sc.pointing,
                            jitter=max(sc.pointing.jitter * 50.0, 1e-3)),
        sc.alpha0,
    )
    eta0 = broad.eta0
    mass = integrate(
        lambda tau: beam_optics.fading_pdf(broad, eta0, tau),
        0.0, eta0, breakpoints=broad.tau_breakpoints(eta0),
    ).value
    rows.append({
        "config_hash": chash, "check": "fading_pdf_mass_broadened",
        "quadrature": mass, "monte_carlo": 1.0,
        "tolerance": 1e-6, "passed": abs(mass - 1.0) <= 1e-6,
    })

    # 3. Pilot estimator variance against the predicted expression.
    tau_b = math.sqrt(sc.protocol.eta_eff * point.eta_b_min / 2.0)
    tau_a = math.sqrt(sc.protocol.eta_eff * point.eta_a / 2.0)
    samples = 200
    sim = mc_oracle.simulate_pilots(
        tau_a, tau_b, point.sigma_n2, sc.pilots.n_pl, samples,
        sc.protocol.nu_det, RngStream(seed, 1), repetitions=10**4,
    )
    predicted = point.sigma_n2 / (
        8.0 * samples * sc.protocol.nu_det * sc.pilots.n_pl
    )
    rel = abs(sim.var_a - predicted) / predicted
    rows.append({
        "config_hash": chash, "check": "pilot_estimator_variance",
        "quadrature": predicted, "monte_carlo": sim.var_a,
        "tolerance": 0.05, "passed": rel <= 0.05,
    })

    columns = ("config_hash", "check", "quadrature", "monte_carlo",
               "tolerance", "passed")
    write_csv(out / "validate.csv", columns, rows)
    write_meta(out / "validate.meta.json", "validate", scenario, seed)
    if not all(row["passed"] for row in rows):
        failed = ", ".join(r["check"] for r in rows if not r["passed"])
        print(f"validation failed: {failed}", file=sys.stderr)
        return EXIT_MODEL
    return EXIT_OK


_RUNNERS = {
    "regime": run_regime,
    "noise": run_noise,
    "rate": run_rate,
    "slant": run_slant,
    "sweep": run_sweep,
    "optimize": run_optimize,
    "validate": run_validate,
}


if __name__ == "__main__":
    sys.exit(main())
