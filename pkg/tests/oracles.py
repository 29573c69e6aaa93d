"""Independent oracles used to pin expected values.

Everything here deliberately avoids the package's own code paths:
arbitrary-precision evaluation via mpmath, the generic 4x4 symplectic
eigenvalue construction via |eig(i Omega V)|, bisection inverses, and
dense-grid integration. Frozen literals in the tests were produced by
these functions at 50-digit precision.
"""
from __future__ import annotations

import numpy as np
import mpmath as mp

mp.mp.dps = 50


def bessel_lambda_hp(n: int, x: float) -> float:
    """e^(-2x) I_n(2x) at 50-digit precision.

    The float input converts to mpmath exactly (binary), so the oracle
    evaluates the same mathematical argument the implementation sees.
    """
    xm = mp.mpf(x)
    return float(mp.e ** (-2 * xm) * mp.besseli(n, 2 * xm))


def inverse_erf_bisect(y: float, iterations: int = 200) -> float:
    """Bisection on high-precision erf; independent of any erfinv routine."""
    target = mp.mpf(y)  # exact binary conversion of the double input
    sign = 1 if y >= 0 else -1
    target = abs(target)
    lo, hi = mp.mpf(0), mp.mpf(30)
    for _ in range(iterations):
        mid = (lo + hi) / 2
        if mp.erf(mid) < target:
            lo = mid
        else:
            hi = mid
    return sign * float((lo + hi) / 2)


def symplectic_eigenvalues_4x4(cm: np.ndarray) -> tuple[float, float]:
    """Generic two-mode symplectic spectrum from |eig(i Omega V)|.

    Ordering convention (q1, p1, q2, p2); Omega is the direct sum of two
    2x2 symplectic units.
    """
    omega1 = np.array([[0.0, 1.0], [-1.0, 0.0]])
    omega = np.block([
        [omega1, np.zeros((2, 2))],
        [np.zeros((2, 2)), omega1],
    ])
    eigs = np.abs(np.linalg.eigvals(1j * omega @ cm))
    eigs.sort()
    # Each symplectic eigenvalue appears twice.
    return float(eigs[3]), float(eigs[1])


def standard_form_matrix(a: float, b: float, c: float) -> np.ndarray:
    """4x4 covariance matrix for the (a, b, c) standard form."""
    z = np.diag([1.0, -1.0])
    return np.block([
        [a * np.eye(2), c * z],
        [c * z, b * np.eye(2)],
    ])


def random_physical_cm(rng: np.random.Generator) -> tuple[float, float, float]:
    """Random (a, b, c) standard form with symplectic spectrum >= 1."""
    a = 1.0 + rng.exponential(5.0)
    b = 1.0 + rng.exponential(5.0)
    lo, hi = min(a, b), max(a, b)
    c_max = np.sqrt((hi + 1.0) * (lo - 1.0))
    c = rng.uniform(0.0, c_max)
    return a, b, c


def trapezoid_integral(f, a: float, b: float, points: int = 10**6,
                       richardson: bool = False) -> float:
    """Dense trapezoid rule; f must accept numpy arrays.

    With ``richardson=True`` the O(h^2) term is cancelled by combining the
    full grid with its half-resolution subsample.
    """
    xs = np.linspace(a, b, points)
    fine = float(np.trapezoid(f(xs), xs))
    if not richardson:
        return fine
    coarse = float(np.trapezoid(f(xs[::2]), xs[::2]))
    return (4.0 * fine - coarse) / 3.0


def dense_grid_argmax(f, lo: float, hi: float, points: int = 10**4) -> tuple[float, float]:
    xs = np.linspace(lo, hi, points)
    vals = np.array([f(x) for x in xs])
    i = int(np.argmax(vals))
    return float(xs[i]), float(vals[i])
