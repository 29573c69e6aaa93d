"""Special functions, adaptive quadrature and 1-D maximisation.

All heavy lifting is delegated to scipy (exponentially scaled Bessel
functions, QUADPACK); this module pins the contracts the model layers rely
on: overflow-free evaluation at far-field arguments, tail-accurate inverse
error function, explicit non-convergence reporting, and quadrature over
semi-infinite ranges by decay-based truncation.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

from scipy import integrate as _sp_integrate
from scipy import special as _sp

from .errors import NonConvergenceError

_SQRT_PI_2 = math.sqrt(math.pi) / 2.0


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and subdivision budget for adaptive quadrature."""

    abs_tol: float = 1e-12
    rel_tol: float = 1e-9
    max_subdivisions: int = 2000

    def __post_init__(self) -> None:
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("quadrature tolerances must be > 0")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


DEFAULT_QUADRATURE = QuadratureSpec()


@dataclass(frozen=True)
class IntegrationResult:
    """Quadrature estimate together with its achieved error estimate."""

    value: float
    error_estimate: float

    def __float__(self) -> float:
        return self.value


def scaled_bessel_lambda(n: int, x: float) -> float:
    """Evaluate e^(-2x) * I_n(2x) without overflow.

    Uses the exponentially scaled modified Bessel function, so the result
    stays finite for arguments far beyond where I_n(2x) alone overflows
    (x up to 1e6 and beyond).

    Parameters
    ----------
    n : int
        Order, 0 or 1.
    x : float
        Non-negative argument.
    """
    if n not in (0, 1):
        raise ValueError(f"order must be 0 or 1, got {n}")
    if x < 0:
        raise ValueError(f"argument must be >= 0, got {x}")
    # ive(n, y) = iv(n, y) * exp(-|y|), so ive(n, 2x) is exactly the target.
    return float(_sp.ive(n, 2.0 * x))


def inverse_erf(y: float) -> float:
    """Inverse of erf on (-1, 1), accurate to ~1e-15 relative in the tails.

    scipy's erfinv alone drifts to ~1e-9 relative error near |y| -> 1; one
    Newton step in the complementary variable restores full precision
    (erf(x) - y is evaluated as (1 - y) - erfc(x), which is cancellation
    free in the tail).
    """
    if not -1.0 < y < 1.0:
        raise ValueError(f"inverse_erf domain is (-1, 1), got {y}")
    if y == 0.0:
        return 0.0
    if y < 0.0:
        return -inverse_erf(-y)
    x = float(_sp.erfinv(y))
    # Newton polish: f(x) = erf(x) - y evaluated as (1 - y) - erfc(x),
    # which is cancellation free in the tail; f'(x) = 2/sqrt(pi) exp(-x^2).
    if x * x < 700.0:  # exp(x^2) representable
        residual = (1.0 - y) - float(_sp.erfc(x))
        x -= residual * _SQRT_PI_2 * math.exp(x * x)
    return x


def _truncate_infinite_upper(
    f: Callable[[float], float], a: float, cutoff_ratio: float = 1e-16
) -> float:
    """Find b such that |f| beyond b is below cutoff_ratio of the observed peak.

    All integrands in this package decay at least Gaussian-fast, so a
    geometric probe is sufficient.
    """
    start = max(abs(a), 1.0)
    probes = [a + start * (2.0**k) for k in range(0, 60)]
    peak = max(abs(f(a + 10.0 ** (-k))) for k in range(0, 4))
    peak = max(peak, max(abs(f(p)) for p in probes[:8]))
    if peak == 0.0:
        return a + start
    for p in probes:
        if abs(f(p)) < cutoff_ratio * peak:
            return p
    return probes[-1]


def integrate(
    f: Callable[[float], float],
    a: float,
    b: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    breakpoints: Sequence[float] = (),
) -> IntegrationResult:
    """Adaptive Gauss-Kronrod integration of f over [a, b].

    An infinite upper bound is truncated where the integrand has decayed
    below 1e-16 of its observed peak. Known awkward interior points
    (discontinuities, sharp peaks, integrable endpoint singularities) can
    be passed as breakpoints; the interval is split there and the pieces
    are summed in ascending order so the reduction is deterministic.

    Raises
    ------
    NonConvergenceError
        If QUADPACK exhausts `max_subdivisions` or the achieved error
        estimate misses the requested tolerance; the partial estimate is
        attached to the exception.
    """
    if math.isinf(b):
        b = _truncate_infinite_upper(f, a)
    if a > b:
        raise ValueError(f"integration bounds out of order: {a} > {b}")
    if a == b:
        return IntegrationResult(0.0, 0.0)

    pts = sorted(p for p in set(breakpoints) if a < p < b)
    edges = [a, *pts, b]
    total = 0.0
    err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        # QUADPACK warns on roundoff-limited or awkward integrands even
        # when the returned estimate is excellent; convergence is judged
        # on the achieved error estimate below, not on the warning.
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", _sp_integrate.IntegrationWarning)
            val, abserr = _sp_integrate.quad(
                f, lo, hi,
                epsabs=spec.abs_tol,
                epsrel=spec.rel_tol,
                limit=spec.max_subdivisions,
            )
        total += val
        err += abserr
    tolerance = max(spec.abs_tol, spec.rel_tol * abs(total))
    if err > tolerance * 10.0:
        raise NonConvergenceError(
            f"quadrature error estimate {err:g} exceeds tolerance {tolerance:g}",
            partial=total,
            error_estimate=err,
        )
    return IntegrationResult(total, err)


_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def maximize_1d(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-8,
    assume_unimodal: bool = True,
    grid_points: int = 2001,
) -> tuple[float, float]:
    """Return (argmax, max) of f on [lo, hi].

    Golden-section search under the unimodality assumption; with
    ``assume_unimodal=False`` a dense grid scan picks the best bracket
    first and golden-section refines inside it. Always returns the best
    point seen, including the endpoints.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")

    best_x, best_v = lo, f(lo)
    v_hi = f(hi)
    if v_hi > best_v:
        best_x, best_v = hi, v_hi

    if not assume_unimodal:
        xs = [lo + (hi - lo) * i / (grid_points - 1) for i in range(grid_points)]
        vals = [f(x) for x in xs]
        i = max(range(grid_points), key=vals.__getitem__)
        if vals[i] > best_v:
            best_x, best_v = xs[i], vals[i]
        lo = xs[max(i - 1, 0)]
        hi = xs[min(i + 1, grid_points - 1)]

    a, b = lo, hi
    c = b - _INV_GOLDEN * (b - a)
    d = a + _INV_GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INV_GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_GOLDEN * (b - a)
            fd = f(d)
    x = (a + b) / 2.0
    v = f(x)
    for cand_x, cand_v in ((c, fc), (d, fd), (x, v)):
        if cand_v > best_v:
            best_x, best_v = cand_x, cand_v
    return best_x, best_v
