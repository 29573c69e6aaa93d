"""Monte-Carlo cross-checks for the fading and pilot layers.

Everything here is validation tooling that ships with the artifact (the
CLI exposes it through ``validate``) because the fading statistics are
the least analytically checkable layer of the model.

Reproducibility contract: draws depend only on (seed, stream index, draw
count). Streams use the counter-based Philox generator, so parallel
workers with distinct indices produce non-overlapping, order-independent
streams, and reductions use numpy's pairwise summation for bit-stable
totals regardless of worker count.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .beam_optics import FadingState
from .errors import ModelError


@dataclass(frozen=True)
class RngStream:
    """A (seed, index) pair naming one reproducible random stream."""

    seed: int
    index: int = 0

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(key=self.seed).jumped(self.index))


def sample_deflection(sigma2: float, stream: RngStream, size: int = 1) -> np.ndarray:
    """Rayleigh deflection samples r = sigma sqrt(-2 ln U).

    Inverse-CDF form of the Weibull deflection density, so a single
    uniform draw maps to a single deflection.
    """
    if sigma2 <= 0:
        raise ModelError("wandering variance must be > 0", stage="mc")
    rng = stream.generator()
    u = rng.random(size)
    u = np.where(u == 0.0, np.finfo(float).tiny, u)  # U in (0, 1]
    return math.sqrt(sigma2) * np.sqrt(-2.0 * np.log1p(-u))


@dataclass(frozen=True)
class PilotSimulation:
    """Empirical estimator moments from simulated relay pilot outcomes."""

    mean_a: float
    mean_b: float
    var_a: float
    var_b: float
    repetitions: int
    samples_per_rep: int


def simulate_pilots(
    tau_a: float,
    tau_b: float,
    sigma_n2: float,
    n_pl: float,
    samples: int,
    nu_det: int,
    stream: RngStream,
    repetitions: int = 1,
) -> PilotSimulation:
    """Simulate pilot rounds through the relay and build both estimators.

    Both parties inject coherent pilots with all quadrature means at
    sqrt(2 n_PL); the relay outcome q_C = -tau_A q_A + tau_B q_B + x_N,
    p_C = tau_A p_A + tau_B p_B + p_N carries total noise Sigma_N^2 split
    evenly over the two quadratures. The estimators average
    (-q_C + p_C) and (q_C + p_C) over the outcome pairs, normalised by
    2 sqrt(2 n_PL).
    """
    if samples < 1:
        raise ModelError("need at least one pilot outcome", stage="mc")
    rng = stream.generator()
    amp = math.sqrt(2.0 * n_pl)
    noise_scale = math.sqrt(sigma_n2 / 2.0)  # per-quadrature share
    count = samples * nu_det
    means_a = np.empty(repetitions)
    means_b = np.empty(repetitions)
    for rep in range(repetitions):
        x_n = rng.normal(0.0, noise_scale, count) if noise_scale > 0 else np.zeros(count)
        p_n = rng.normal(0.0, noise_scale, count) if noise_scale > 0 else np.zeros(count)
        q_c = -tau_a * amp + tau_b * amp + x_n
        p_c = tau_a * amp + tau_b * amp + p_n
        means_a[rep] = np.mean((-q_c + p_c) / (2.0 * amp))
        means_b[rep] = np.mean((q_c + p_c) / (2.0 * amp))
    return PilotSimulation(
        mean_a=float(np.mean(means_a)),
        mean_b=float(np.mean(means_b)),
        var_a=float(np.var(means_a, ddof=1)) if repetitions > 1 else 0.0,
        var_b=float(np.var(means_b, ddof=1)) if repetitions > 1 else 0.0,
        repetitions=repetitions,
        samples_per_rep=count,
    )


@dataclass(frozen=True)
class McAverage:
    mean: float
    standard_error: float
    samples: int


def mc_average_rate(
    k_of_r: Callable[[float], float],
    state: FadingState,
    samples: int,
    stream: RngStream,
) -> McAverage:
    """Monte-Carlo estimate of the deflection-averaged rate.

    Draws deflections from the Weibull density, zeroes samples falling
    outside the aperture radius (mirroring the truncated fading integral)
    and averages the clamped rate functional. Returns the sample mean and
    its standard error.
    """
    if samples < 1000:
        raise ModelError("mc_average_rate needs >= 1000 samples", stage="mc")
    if state.sigma2 == 0.0:
        return McAverage(mean=k_of_r(0.0), standard_error=0.0, samples=samples)
    r = sample_deflection(state.sigma2, stream, size=samples)
    values = np.zeros(samples)
    inside = r <= state.a_rec
    # The functional is scalar; vectorise over the surviving samples only.
    values[inside] = np.fromiter(
        (k_of_r(ri) for ri in r[inside]), dtype=float, count=int(np.sum(inside))
    )
    mean = float(np.mean(values))
    se = float(np.std(values, ddof=1) / math.sqrt(samples))
    return McAverage(mean=mean, standard_error=se, samples=samples)


def transmissivity_samples(
    state: FadingState,
    samples: int,
    stream: RngStream,
) -> np.ndarray:
    """Fading-channel transmissivity draws eta(z, r_i), for distribution tests."""
    r = sample_deflection(state.sigma2, stream, size=samples)
    return state.eta0 * np.exp(-((r / state.r0) ** state.gamma))
