"""Online linear optimization over (finite-dimensional) Hilbert spaces.

Vectors are plain 1-d numpy float arrays. Rewards must lie in the unit ball;
norm violations raise instead of being clipped, since clipping would void the
regret certificates. The decision set is the whole space.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .potentials import DomainError, betting_fraction_generic

__all__ = [
    "RewardBoundError",
    "as_vector",
    "OloLearnerState",
    "new_olo_state",
    "kt_olo_predict",
    "generic_olo_predict",
    "olo_update",
    "ogd_step",
    "regret",
    "regret_curve",
    "absolute_loss_reward",
    "hilbert_step_check",
    "KTHilbertLearner",
    "PotentialHilbertLearner",
    "OnlineGradientDescent",
    "run_learner",
]

NORM_TOL = 1e-9
RESIDUAL_TIE = 1e-12


class RewardBoundError(ValueError):
    """A reward vector violated the ``||g|| <= 1`` assumption."""


def as_vector(v):
    arr = np.atleast_1d(np.array(v, dtype=float)).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector has non-finite coordinates")
    return arr


def _check_reward(g):
    norm = float(np.linalg.norm(g))
    if norm > 1.0 + NORM_TOL:
        raise RewardBoundError(f"reward norm {norm!r} exceeds 1")
    return norm


@dataclass(frozen=True)
class OloLearnerState:
    endowment: float
    reward_sum: float
    grad_sum: np.ndarray
    round: int = 0
    last_prediction: np.ndarray = field(default=None, repr=False)

    @property
    def wealth(self):
        return self.endowment + self.reward_sum

    @property
    def dim(self):
        return self.grad_sum.size


def new_olo_state(dim, endowment=1.0):
    if not endowment > 0:
        raise ValueError("endowment must be positive")
    zero = np.zeros(int(dim))
    return OloLearnerState(float(endowment), 0.0, zero, 0, zero.copy())


def kt_olo_predict(state):
    """``w_t = (eps + sum <g_i, w_i>) / t * sum g_i`` with ``t = round + 1``."""
    t = state.round + 1
    return state.wealth / t * state.grad_sum


def generic_olo_predict(state, potential):
    """Potential-based prediction: fraction ``beta_t`` of the wealth along
    the direction of the reward sum. ``potential`` is a :class:`Potential`."""
    t = state.round + 1
    norm = float(np.linalg.norm(state.grad_sum))
    if norm == 0.0:
        return np.zeros_like(state.grad_sum)
    # the reward sum norm can exceed t - 1 only by rounding
    x = min(norm, float(t - 1))
    beta = betting_fraction_generic(potential.at(t), x)
    return beta * state.wealth / norm * state.grad_sum


def olo_update(state, prediction, reward):
    reward = as_vector(reward)
    prediction = as_vector(prediction)
    if reward.shape != state.grad_sum.shape or prediction.shape != reward.shape:
        raise ValueError("dimension mismatch")
    _check_reward(reward)
    return replace(
        state,
        reward_sum=state.reward_sum + float(reward @ prediction),
        grad_sum=state.grad_sum + reward,
        round=state.round + 1,
        last_prediction=prediction,
    )


def ogd_step(w, reward, rate):
    """One step of unconstrained online gradient ascent on linear rewards."""
    if not rate > 0:
        raise ValueError("rate must be positive")
    return as_vector(w) + rate * as_vector(reward)


def regret(trace, competitor):
    """``sum <g_t, u> - sum <g_t, w_t>`` over a list of (prediction, reward)."""
    u = as_vector(competitor)
    total = 0.0
    for w, g in trace:
        w, g = as_vector(w), as_vector(g)
        if w.shape != u.shape or g.shape != u.shape:
            raise ValueError("dimension mismatch between trace and competitor")
        total += float(g @ u) - float(g @ w)
    return total


def regret_curve(predictions, rewards, competitors):
    """Vectorised regret: ``predictions``, ``rewards`` are (T, d) arrays and
    ``competitors`` is (d,) or (k, d). Returns the final regret per competitor."""
    W = np.atleast_2d(np.asarray(predictions, dtype=float))
    G = np.atleast_2d(np.asarray(rewards, dtype=float))
    U = np.atleast_2d(np.asarray(competitors, dtype=float))
    if W.shape != G.shape or U.shape[1] != G.shape[1]:
        raise ValueError("dimension mismatch")
    learner = float(np.einsum("td,td->", G, W))
    return U @ G.sum(axis=0) - learner


def absolute_loss_reward(w, x, y):
    """Negated subgradient of ``|<w, x> - y|`` for a unit-norm input ``x``."""
    x = as_vector(x)
    if abs(float(np.linalg.norm(x)) - 1.0) > NORM_TOL:
        raise ValueError("input vector must have unit L2 norm")
    residual = float(as_vector(w) @ x) - y
    if abs(residual) <= RESIDUAL_TIE:
        return np.zeros_like(x)
    return -math.copysign(1.0, residual) * x


def hilbert_step_check(potential, x, g, tol=1e-9):
    """Check ``(1 + beta_t <g, x>/||x||) F_{t-1}(||x||) >= F_t(||x + g||)``.

    ``potential`` is a :class:`PotentialEval` for round ``t``; ``beta_t`` is
    taken at ``||x||`` and is zero when ``x = 0``. The tolerance is relative
    to ``F_t(||x + g||)``.
    """
    x, g = as_vector(x), as_vector(g)
    t = potential.t
    nx = float(np.linalg.norm(x))
    if nx > t - 1 + NORM_TOL or np.linalg.norm(g) > 1.0 + NORM_TOL:
        raise DomainError("need ||x|| <= t - 1 and ||g|| <= 1")
    prev = potential.potential.value(t - 1, min(nx, float(t - 1)))
    if nx == 0.0:
        lhs = prev
    else:
        beta = betting_fraction_generic(potential, min(nx, float(t - 1)))
        lhs = (1.0 + beta * float(g @ x) / nx) * prev
    rhs = potential.value(float(np.linalg.norm(x + g)))
    return bool(lhs >= rhs - tol * max(1.0, rhs))


class KTHilbertLearner:
    """KT-based parameter-free learner for unconstrained OLO."""

    def __init__(self, dim, endowment=1.0):
        self.state = new_olo_state(dim, endowment)

    @property
    def wealth(self):
        return self.state.wealth

    def predict(self):
        return kt_olo_predict(self.state)

    def update(self, reward, prediction=None):
        if prediction is None:
            prediction = self.predict()
        self.state = olo_update(self.state, prediction, reward)


class PotentialHilbertLearner(KTHilbertLearner):
    """Same reduction, with the betting fraction computed from any excellent potential."""

    def __init__(self, dim, potential):
        super().__init__(dim, potential.endowment)
        self.potential = potential

    def predict(self):
        return generic_olo_predict(self.state, self.potential)


class OnlineGradientDescent:
    """Unconstrained OGD on rewards, ``w <- w + rate * g``, started at zero."""

    def __init__(self, dim, rate):
        if not rate > 0:
            raise ValueError("rate must be positive")
        self.rate = float(rate)
        self.w = np.zeros(int(dim))

    def predict(self):
        return self.w.copy()

    def update(self, reward, prediction=None):
        self.w = ogd_step(self.w, reward, self.rate)


def run_learner(learner, rewards):
    """Feed a (T, d) reward array to ``learner``; returns the (T, d) predictions."""
    G = np.atleast_2d(np.asarray(rewards, dtype=float))
    W = np.empty_like(G)
    for t, g in enumerate(G):
        w = learner.predict()
        W[t] = w
        learner.update(g, w)
    return W
