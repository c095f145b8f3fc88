"""Coin-betting potentials and the regret certificates derived from them.

A potential is a sequence of even, log-convex functions ``F_t`` on
``(-a_t, a_t)``. Betting the fraction

    beta_t = (F_t(x + 1) - F_t(x - 1)) / (F_t(x + 1) + F_t(x - 1))

of the current wealth, where ``x`` is the running coin sum, keeps the
wealth above ``F_t(coin sum)``. All evaluation happens in log space.
"""

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .numerics import log_gamma

__all__ = [
    "PotentialKind",
    "PotentialDescriptor",
    "Potential",
    "KTPotential",
    "ExpSquarePotential",
    "PotentialEval",
    "DomainError",
    "kt_value",
    "shifted_kt_value",
    "exp_square_value",
    "betting_fraction_generic",
    "kt_betting_fraction",
    "kt_lower_bound",
    "gamma_ratio_bound_check",
    "f_inverse",
    "Violation",
    "check_excellence",
    "regret_upper_bound_olo",
    "regret_upper_bound_lea",
    "DOUBLING_FACTOR",
]

LOG_PI = math.log(math.pi)
LOG_2 = math.log(2.0)
LOG_E_SQRT_PI = 1.0 + 0.5 * LOG_PI

DOMAIN_MARGIN = 1e-9
REACH_TOL = 1e-9

# check_excellence constants
FD_STEP = 1e-5
FD_TOL = 1e-6
RECURSION_TOL = 1e-12
DIVERGENCE_OFFSET = 1e-8
DIVERGENCE_RATIO = 1e6
SYMMETRY_TOL = 1e-12
# relative accuracy of log_value, used when inverting near the flat point x = 0
INVERSE_SLACK = 1e-12

DOUBLING_FACTOR = math.sqrt(2.0) / (math.sqrt(2.0) - 1.0)


class DomainError(ValueError):
    """Raised when a potential is evaluated outside its domain."""


class PotentialKind(enum.Enum):
    KT = "kt"
    SHIFTED_KT = "shifted_kt"
    EXP_SQUARE = "exp_square"


class Potential:
    """Base class for a sequence of coin-betting potentials.

    Subclasses implement :meth:`domain_radius` and :meth:`log_value`.
    ``first_round`` is the first ``t`` at which the (b)/(d) shape conditions
    are meaningful; earlier rounds are only ever evaluated at ``x = 0``.
    """

    endowment = 1.0
    first_round = 0

    def domain_radius(self, t):
        raise NotImplementedError

    def log_value(self, t, x):
        raise NotImplementedError

    def value(self, t, x):
        return math.exp(self.log_value(t, x))

    def at(self, t):
        return PotentialEval(self, t)

    def _check_domain(self, t, x):
        if t < 0 or int(t) != t:
            raise DomainError(f"round index must be a nonnegative integer, got {t!r}")
        a = self.domain_radius(t)
        if not abs(x) < a - DOMAIN_MARGIN:
            raise DomainError(f"|x| = {abs(x)!r} outside the domain (-{a}, {a}) at t = {t}")

    def betting_fraction(self, t, x):
        return betting_fraction_generic(self.at(t), x)


class KTPotential(Potential):
    """The (delta-shifted) Krichevsky-Trofimov potential.

    ``shift = 0`` is the plain KT potential; its betting fraction is
    ``x / (t + shift)``.
    """

    def __init__(self, endowment=1.0, shift=0.0):
        if not endowment > 0:
            raise ValueError("endowment must be positive")
        if not shift >= 0:
            raise ValueError("shift must be nonnegative")
        self.endowment = float(endowment)
        self.shift = float(shift)
        self._log_const = (
            math.log(self.endowment)
            + log_gamma(self.shift + 1.0)
            - 2.0 * log_gamma((self.shift + 1.0) / 2.0)
        )

    def __repr__(self):
        return f"KTPotential(endowment={self.endowment!r}, shift={self.shift!r})"

    def domain_radius(self, t):
        return t + self.shift + 1.0

    def log_value(self, t, x):
        self._check_domain(t, x)
        half = (t + self.shift + 1.0) / 2.0
        return (
            self._log_const
            + t * LOG_2
            + log_gamma(half + x / 2.0)
            + log_gamma(half - x / 2.0)
            - log_gamma(t + self.shift + 1.0)
        )

    def betting_fraction(self, t, x):
        return kt_betting_fraction(t, x, self.shift)


def _harmonic(t):
    return math.fsum(1.0 / i for i in range(1, t + 1))


class ExpSquarePotential(Potential):
    """``F_t(x) = eps exp(x^2 / (2t) - H_t / 2)`` with ``H_t`` the harmonic number.

    Defined on the whole real line for ``t >= 1``; ``F_0`` is the constant
    endowment.
    """

    first_round = 1

    def __init__(self, endowment=1.0):
        if not endowment > 0:
            raise ValueError("endowment must be positive")
        self.endowment = float(endowment)
        self._halfh = [0.0]

    def __repr__(self):
        return f"ExpSquarePotential(endowment={self.endowment!r})"

    def _half_harmonic(self, t):
        while len(self._halfh) <= t:
            n = len(self._halfh)
            self._halfh.append(0.5 * _harmonic(n))
        return self._halfh[t]

    def domain_radius(self, t):
        return math.inf

    def log_value(self, t, x):
        self._check_domain(t, x)
        if t == 0:
            return math.log(self.endowment)
        return math.log(self.endowment) + x * x / (2.0 * t) - self._half_harmonic(t)


@dataclass(frozen=True)
class PotentialDescriptor:
    kind: PotentialKind
    endowment: float = 1.0
    shift: float = 0.0

    def __post_init__(self):
        if not self.endowment > 0:
            raise ValueError("endowment must be positive")
        if not self.shift >= 0:
            raise ValueError("shift must be nonnegative")
        if self.kind is not PotentialKind.SHIFTED_KT and self.shift != 0:
            raise ValueError(f"shift is only meaningful for ShiftedKT, not {self.kind}")

    def build(self):
        if self.kind is PotentialKind.KT:
            return KTPotential(self.endowment, 0.0)
        if self.kind is PotentialKind.SHIFTED_KT:
            return KTPotential(self.endowment, self.shift)
        return ExpSquarePotential(self.endowment)


class PotentialEval:
    """A potential frozen at round ``t``: ``F_t``, ``f_t = ln F_t`` and ``a_t``."""

    __slots__ = ("potential", "t")

    def __init__(self, potential, t):
        if t < 0 or int(t) != t:
            raise DomainError(f"round index must be a nonnegative integer, got {t!r}")
        self.potential = potential
        self.t = int(t)

    def __repr__(self):
        return f"PotentialEval({self.potential!r}, t={self.t})"

    @property
    def domain_radius(self):
        return self.potential.domain_radius(self.t)

    def log_value(self, x):
        return self.potential.log_value(self.t, x)

    def value(self, x):
        return self.potential.value(self.t, x)

    __call__ = value


def kt_value(t, x, endowment=1.0):
    """KT potential ``eps 2^t Gamma((t+1)/2 + x/2) Gamma((t+1)/2 - x/2) / (pi t!)``."""
    if abs(x) >= t + 1 - DOMAIN_MARGIN:
        raise DomainError(f"KT potential needs |x| < t + 1, got x={x!r}, t={t}")
    if not endowment > 0:
        raise ValueError("endowment must be positive")
    half = (t + 1) / 2.0
    log_f = (
        math.log(endowment)
        + t * LOG_2
        + log_gamma(half + x / 2.0)
        + log_gamma(half - x / 2.0)
        - LOG_PI
        - log_gamma(t + 1.0)
    )
    return math.exp(log_f)


def shifted_kt_value(t, x, shift):
    """Shifted KT potential (endowment 1)."""
    if not shift >= 0:
        raise ValueError("shift must be nonnegative")
    if abs(x) >= t + shift + 1 - DOMAIN_MARGIN:
        raise DomainError(f"shifted KT needs |x| < t + shift + 1, got x={x!r}")
    return KTPotential(1.0, shift).value(t, x)


def exp_square_value(t, x, endowment=1.0):
    if t < 1:
        raise DomainError("exp-square potential formula needs t >= 1")
    return ExpSquarePotential(endowment).value(t, x)


def betting_fraction_generic(potential, x):
    """Potential-based betting fraction at coin sum ``x``.

    Uses ``tanh((f_t(x + 1) - f_t(x - 1)) / 2)``, which equals the ratio
    form and never overflows. ``|x|`` must be a reachable coin sum,
    ``|x| <= t - 1``.
    """
    t = potential.t
    if t < 1 or abs(x) > t - 1 + REACH_TOL:
        raise DomainError(f"betting fraction at round {t} needs |x| <= {t - 1}, got {x!r}")
    if abs(x) + 1.0 >= potential.domain_radius - DOMAIN_MARGIN:
        raise DomainError("x + 1 falls outside the potential's domain")
    diff = potential.log_value(x + 1.0) - potential.log_value(x - 1.0)
    return math.tanh(0.5 * diff)


def kt_betting_fraction(t, x, shift=0.0):
    """Closed-form KT fraction ``x / (t + shift)``."""
    if t < 1:
        raise DomainError("betting starts at round t = 1")
    if abs(x) > t - 1 + shift + REACH_TOL:
        raise DomainError(f"coin sum {x!r} is not reachable before round {t}")
    return x / (t + shift)


def kt_lower_bound(t, x, shift=0.0):
    """``exp(x^2/(2(t+d)) + ln((1+d)/(t+d))/2 - ln(e sqrt(pi)))``, a lower bound
    on the shifted KT potential for ``|x| <= t``."""
    if t < 1:
        raise DomainError("lower bound is stated for t >= 1")
    if abs(x) > t:
        raise DomainError(f"lower bound needs |x| <= t, got {x!r}")
    td = t + shift
    return math.exp(x * x / (2.0 * td) + 0.5 * math.log((1.0 + shift) / td) - LOG_E_SQRT_PI)


def gamma_ratio_bound_check(shift):
    """Whether ``Gamma(d+1) / (2^d Gamma((d+1)/2)^2) >= sqrt(d+1) / pi`` at ``d = shift``.

    Compared in log space with a 1e-12 slack for the equality case d = 0.
    """
    if shift < 0:
        raise ValueError("shift must be nonnegative")
    lhs = log_gamma(shift + 1.0) - shift * LOG_2 - 2.0 * log_gamma((shift + 1.0) / 2.0)
    rhs = 0.5 * math.log(shift + 1.0) - LOG_PI
    return lhs >= rhs - 1e-12


def f_inverse(potential, y, tol=1e-10):
    """Nonnegative ``x`` with ``f_t(x) = y``, by bisection.

    Values of ``y`` below ``f_t(0)`` by less than the evaluation accuracy
    (``INVERSE_SLACK``, relative) map to 0. Since ``f_t`` is flat at 0, a
    value-space error ``e`` there limits ``x`` to roughly ``sqrt(e)``.
    """
    f0 = potential.log_value(0.0)
    if y < f0 - INVERSE_SLACK * max(1.0, abs(f0)):
        raise DomainError(f"y = {y!r} is below f_t(0) = {f0!r}")
    if y <= f0:
        return 0.0
    a = potential.domain_radius
    if math.isinf(a):
        hi = 1.0
        while potential.log_value(hi) < y:
            hi *= 2.0
    else:
        hi = a - 2 * DOMAIN_MARGIN
        if potential.log_value(hi) < y:
            # within bisection tolerance of the boundary
            return hi
    lo = 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if potential.log_value(mid) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class Violation(NamedTuple):
    condition: str
    t: int
    x: float
    g: float
    slack: float


def _grid_radius(potential, t):
    a = potential.domain_radius(t)
    if math.isinf(a):
        return 10.0 * (t + 1)
    return a


def _shape_violations(potential, t, n_points):
    """Conditions (b) and (d) at round t on an n_points grid over [0, a_t)."""
    out = []
    a = _grid_radius(potential, t)
    finite = not math.isinf(potential.domain_radius(t))
    top = a - DIVERGENCE_OFFSET if finite else a
    xs = np.linspace(0.0, top, n_points)
    # keep the finite-difference stencil inside the domain
    inner = xs[xs + FD_STEP < a - 2 * DOMAIN_MARGIN] if finite else xs
    logs = np.array([potential.log_value(t, x) for x in xs])

    f0 = logs[0]
    for x, lv in zip(xs[1:], logs[1:]):
        mirrored = potential.log_value(t, -x)
        if abs(mirrored - lv) > SYMMETRY_TOL * max(1.0, abs(lv)):
            out.append(Violation("b:even", t, float(x), 0.0, -abs(mirrored - lv)))

    steps = np.diff(logs)
    for x, step in zip(xs[1:], steps):
        if not step > 0:
            out.append(Violation("b:increasing", t, float(x), 0.0, float(step)))

    # log-convexity: midpoint test over symmetric grid [-top, top]
    sym = np.concatenate([-xs[:0:-1], xs])
    sym_logs = np.concatenate([logs[:0:-1], logs])
    mids = 0.5 * (sym[:-1] + sym[1:])
    for lo, hi, m, llo, lhi in zip(sym[:-1], sym[1:], mids, sym_logs[:-1], sym_logs[1:]):
        lm = potential.log_value(t, m)
        slack = 0.5 * (llo + lhi) - lm
        if slack < -SYMMETRY_TOL * max(1.0, abs(lm)):
            out.append(Violation("b:log-convex", t, float(m), 0.0, float(slack)))

    if logs[-1] - f0 <= math.log(DIVERGENCE_RATIO):
        out.append(Violation("b:divergence", t, float(xs[-1]), 0.0, float(logs[-1] - f0)))

    # (d): x F'' >= F' - tol, divided through by F(x) > 0 and using ratios
    # F(x +- h) / F(x) = exp(f(x +- h) - f(x)).
    h = FD_STEP
    for x in inner:
        fx = potential.log_value(t, x)
        up = math.exp(potential.log_value(t, x + h) - fx)
        down = math.exp(potential.log_value(t, x - h) - fx)
        d1 = (up - down) / (2.0 * h)
        d2 = (up - 2.0 + down) / (h * h)
        slack = x * d2 - d1
        if slack < -FD_TOL:
            out.append(Violation("d:x*F''>=F'", t, float(x), 0.0, float(slack)))
    return out


def _recursion_violations(potential, t, n_points, n_g):
    """Condition (c) at round t >= 1."""
    out = []
    xs = np.linspace(-(t - 1), t - 1, n_points) if t > 1 else np.array([0.0])
    gs = np.linspace(-1.0, 1.0, n_g)
    ft = potential.at(t)
    for x in xs:
        beta = betting_fraction_generic(ft, float(x))
        prev = potential.log_value(t - 1, float(x))
        for g in gs:
            lhs = math.log1p(g * beta) + prev if 1.0 + g * beta > 0 else -math.inf
            rhs = potential.log_value(t, float(x + g))
            lhs_v, rhs_v = math.exp(lhs), math.exp(rhs)
            slack = lhs_v - rhs_v
            if slack < -RECURSION_TOL * max(1.0, rhs_v):
                out.append(Violation("c:recursion", t, float(x), float(g), slack))
    return out


def check_excellence(descriptor, t_max, grid_density=50, g_points=21):
    """Check the four defining conditions of an excellent potential on grids.

    ``descriptor`` may be a :class:`PotentialDescriptor` or any
    :class:`Potential`. Returns a list of :class:`Violation`; an empty list
    means every grid check passed.
    """
    if t_max < 1:
        raise ValueError("t_max must be at least 1")
    potential = descriptor.build() if isinstance(descriptor, PotentialDescriptor) else descriptor
    report = []
    f00 = potential.value(0, 0.0)
    if abs(f00 - potential.endowment) > 1e-12 * potential.endowment:
        report.append(Violation("a:F0(0)=eps", 0, 0.0, 0.0, f00 - potential.endowment))
    for t in range(0, t_max + 1):
        if t >= potential.first_round:
            report.extend(_shape_violations(potential, t, grid_density))
        if t >= 1:
            report.extend(_recursion_violations(potential, t, grid_density, g_points))
    return report


def regret_upper_bound_olo(T, norm_u, endowment=1.0):
    """Regret bound of the KT Hilbert-space learner against a competitor of norm ``norm_u``."""
    if T <= 0:
        return 0.0
    if norm_u < 0:
        raise ValueError("norm must be nonnegative")
    main = norm_u * math.sqrt(T * math.log1p(24.0 * T * T * norm_u * norm_u / (endowment * endowment)))
    return main + endowment * (1.0 - 1.0 / (math.e * math.sqrt(math.pi * T)))


def regret_upper_bound_lea(T, kl, anytime=False):
    """``sqrt(3 T (3 + KL))``; ``anytime=True`` applies the doubling-trick factor."""
    if T < 0 or kl < 0:
        raise ValueError("T and kl must be nonnegative")
    bound = math.sqrt(3.0 * T * (3.0 + kl))
    return DOUBLING_FACTOR * bound if anytime else bound
