"""Special functions and divergences used throughout the package.

Everything here is a pure scalar function. ``log_gamma`` is implemented
in-repo (Taylor series around 1 and 2, Stirling series elsewhere) so results
do not depend on the platform libm.
"""

import math

import numpy as np

__all__ = [
    "ProbSimplex",
    "as_simplex",
    "log_gamma",
    "kl_bernoulli",
    "kl_discrete",
    "lambert_w",
    "lambert_w_bounds",
    "conjugate_exp_square_bound",
    "numeric_fenchel_conjugate",
    "SIMPLEX_TOL",
    "LAMBERT_LOWER_CONST",
]

SIMPLEX_TOL = 1e-12

# Euler-Mascheroni constant.
_EULER_GAMMA = 0.57721566490153286060651209008240243
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# Bernoulli numbers B_2, B_4, ..., B_16.
_BERNOULLI = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
)
_STIRLING_COEFFS = tuple(b / ((2 * k + 2) * (2 * k + 1)) for k, b in enumerate(_BERNOULLI))
_STIRLING_MIN = 15.0


def _zeta_minus_one(s, n_terms=40):
    # zeta(s) - 1 = sum_{n >= 2} n^-s, direct sum plus Euler-Maclaurin tail.
    head = math.fsum(n ** -s for n in range(2, n_terms))
    N = float(n_terms)
    tail = N ** (1 - s) / (s - 1) + 0.5 * N ** -s
    rising = s  # s (s+1) ... (s + 2k - 2)
    for k, b in enumerate(_BERNOULLI[:5]):
        tail += b / math.factorial(2 * k + 2) * rising * N ** (-s - 2 * k - 1)
        rising *= (s + 2 * k + 1) * (s + 2 * k + 2)
    return head + tail


_SERIES_TERMS = 40
_ZETA_M1 = tuple(_zeta_minus_one(k) for k in range(2, _SERIES_TERMS + 2))


def _lgamma_2_plus(z):
    """ln Gamma(2 + z) for |z| <= 0.5 (Abramowitz & Stegun 6.1.33 rearranged)."""
    total = 0.0
    zk = -z
    for k, c in enumerate(_ZETA_M1, start=2):
        zk *= -z
        total += c * zk / k
    return z * (1.0 - _EULER_GAMMA) + total


def _stirling(x):
    inv = 1.0 / x
    inv2 = inv * inv
    series = 0.0
    power = inv
    for c in _STIRLING_COEFFS:
        series += c * power
        power *= inv2
    return (x - 0.5) * math.log(x) - x + _HALF_LOG_2PI + series


def log_gamma(x):
    """Natural log of the gamma function for real ``x > 0``.

    Accurate to about 1e-15 relative away from the zeros at 1 and 2, and
    to a few ulp of absolute error near them.
    """
    x = float(x)
    if not x > 0.0 or math.isnan(x):
        raise ValueError(f"log_gamma requires x > 0, got {x!r}")
    if math.isinf(x):
        return math.inf
    if x < 0.5:
        # Gamma(x) = Gamma(x + 1) / x, with x + 1 in [1, 1.5).
        return -math.log(x) + log_gamma(x + 1.0)
    if x <= 1.5:
        z = x - 1.0
        return _lgamma_2_plus(z) - math.log1p(z)
    if x <= 2.5:
        return _lgamma_2_plus(x - 2.0)
    if x >= _STIRLING_MIN:
        return _stirling(x)
    # Shift upward into the Stirling range.
    n = int(math.ceil(_STIRLING_MIN - x))
    prod = 1.0
    for k in range(n):
        prod *= x + k
    return _stirling(x + n) - math.log(prod)


class ProbSimplex(np.ndarray):
    """A validated point of the probability simplex (a 1-d float array)."""

    def __new__(cls, weights, tol=SIMPLEX_TOL):
        arr = np.asarray(weights, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("simplex weights must be a non-empty 1-d vector")
        if np.any(arr < 0) or not np.all(np.isfinite(arr)):
            raise ValueError("simplex weights must be finite and nonnegative")
        if abs(arr.sum() - 1.0) > tol:
            raise ValueError(f"simplex weights sum to {arr.sum()!r}, not 1")
        return arr.view(cls)

    @classmethod
    def uniform(cls, n):
        return cls(np.full(n, 1.0 / n))


def as_simplex(weights, tol=SIMPLEX_TOL):
    """Validate ``weights`` as a simplex point and return a plain ndarray."""
    return np.asarray(ProbSimplex(weights, tol=tol))


def _xlogy(x, y):
    # x * ln(x / y) with 0 ln 0 = 0
    if x == 0.0:
        return 0.0
    if y == 0.0:
        return math.inf
    return x * math.log(x / y)


def kl_bernoulli(p, q):
    """KL divergence between Bernoulli(p) and Bernoulli(q).

    Degenerate ``q`` in {0, 1} with mismatched ``p`` gives ``math.inf``
    rather than raising, so bound formulas built on top stay total.
    """
    p, q = float(p), float(q)
    if not (0.0 <= p <= 1.0) or not (0.0 <= q <= 1.0):
        raise ValueError(f"kl_bernoulli needs p, q in [0, 1], got {p!r}, {q!r}")
    value = _xlogy(p, q) + _xlogy(1.0 - p, 1.0 - q)
    return max(value, 0.0)


def kl_discrete(p, q):
    """KL(p || q) for two discrete distributions of equal length."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"shape mismatch: {p.shape} vs {q.shape}")
    support = p > 0
    if np.any(q[support] == 0):
        return math.inf
    value = float(np.sum(p[support] * np.log(p[support] / q[support])))
    return max(value, 0.0)


LAMBERT_LOWER_CONST = 0.6321
_LAMBERT_MAX_ITER = 100


def lambert_w(x):
    """Principal branch of the Lambert function on [0, inf).

    Newton iteration on ``w e^w = x`` started from ``ln(x + 1)``, which is an
    upper bound of W; since ``w e^w`` is convex the iterates decrease
    monotonically to the root.
    """
    x = float(x)
    if x < 0 or math.isnan(x):
        raise ValueError(f"lambert_w is defined here for x >= 0, got {x!r}")
    if x == 0.0:
        return 0.0
    w = math.log1p(x)
    for _ in range(_LAMBERT_MAX_ITER):
        ew = math.exp(w)
        step = (w * ew - x) / (ew * (w + 1.0))
        w_next = w - step
        if w_next >= w or abs(step) <= 1e-16 * max(1.0, w):
            # monotone decrease stopped: converged to rounding
            w = min(w, w_next)
            break
        w = w_next
    return w


def lambert_w_bounds(x):
    """Return ``(0.6321 ln(x+1), ln(x+1))``, which sandwich ``lambert_w(x)``."""
    x = float(x)
    if x < 0 or math.isnan(x):
        raise ValueError(f"lambert_w_bounds requires x >= 0, got {x!r}")
    upper = math.log1p(x)
    return LAMBERT_LOWER_CONST * upper, upper


def conjugate_exp_square_bound(y, alpha, beta):
    """Upper bound on the Fenchel conjugate of ``x -> beta exp(x^2 / (2 alpha))``.

    Returns ``y sqrt(alpha ln(alpha y^2 / beta^2 + 1)) - beta``.
    """
    if y < 0:
        raise ValueError(f"y must be nonnegative, got {y!r}")
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")
    return y * math.sqrt(alpha * math.log1p(alpha * y * y / (beta * beta))) - beta


CONJUGATE_GRID_POINTS = 10_001


def _eval_on_grid(f, xs):
    try:
        values = np.asarray(f(xs), dtype=float)
        if values.shape != xs.shape:
            raise TypeError
    except (TypeError, ValueError):
        values = np.array([f(float(x)) for x in xs], dtype=float)
    if not np.all(np.isfinite(values)):
        raise ValueError("function is not finite on the conjugate grid")
    return values


def numeric_fenchel_conjugate(f, y, radius):
    """Grid estimate of ``sup_{|x| <= radius} x y - f(x)``.

    The maximum is taken over a uniform grid of ``CONJUGATE_GRID_POINTS``
    points and then over a second grid of the same size spanning the two
    cells around the first argmax. Being a maximum over finitely many points
    this is always a lower estimate of the true supremum.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    xs = np.linspace(-radius, radius, CONJUGATE_GRID_POINTS)
    vals = xs * y - _eval_on_grid(f, xs)
    i = int(np.argmax(vals))
    best = float(vals[i])
    h = xs[1] - xs[0]
    lo, hi = max(-radius, xs[i] - h), min(radius, xs[i] + h)
    fine = np.linspace(lo, hi, CONJUGATE_GRID_POINTS)
    fine_vals = fine * y - _eval_on_grid(f, fine)
    return max(best, float(np.max(fine_vals)))
