"""Learning with expert advice via per-expert coin betting.

Each expert ``i`` gets a one-dimensional KT bettor playing the coins
``g~_{t,i}``; the mixture puts weight ``pi_i [w_{t,i}]_+`` on expert ``i``.
The shift ``delta`` of the KT potential is ``delta_fraction * T`` for a known
horizon ``T`` and 0 for the unshifted (horizon-free) variant. The
per-expert endowment is fixed to 1: predictions are invariant to it.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .numerics import as_simplex, kl_discrete
from .potentials import KTPotential, regret_upper_bound_lea

__all__ = [
    "InvariantViolation",
    "LeaState",
    "new_lea_state",
    "unshifted_state",
    "lea_weights",
    "lea_predict",
    "lea_update",
    "potential_sum",
    "hedge_predict",
    "hedge_predictions",
    "lea_regret",
    "best_expert_regret",
    "KTExperts",
    "DoublingKTExperts",
    "doubling_wrapper",
    "doubling_epochs",
    "run_experts",
    "validate_rewards",
    "simplex_regret_bound",
]

DOMINANCE_TOL = 1e-12


class InvariantViolation(RuntimeError):
    """``sum_i pi_i g~_{t,i} w_{t,i} <= 0`` failed beyond rounding."""


@dataclass(frozen=True)
class LeaState:
    prior: np.ndarray
    shift: float
    coin_sum: np.ndarray
    wealth: np.ndarray
    last_w: np.ndarray
    round: int = 0
    horizon: int = None
    # largest value of sum_i pi_i g~ w seen so far
    max_dominance: float = -math.inf

    @property
    def n_experts(self):
        return self.prior.size


def new_lea_state(prior, horizon, delta_fraction=0.5):
    """State for the shifted algorithm with ``delta = delta_fraction * horizon``."""
    if horizon < 1 or int(horizon) != horizon:
        raise ValueError("horizon must be a positive integer")
    if delta_fraction < 0:
        raise ValueError("delta_fraction must be nonnegative")
    return _fresh(prior, delta_fraction * horizon, int(horizon))


def unshifted_state(prior):
    """State for the variant with the ``T/2`` term removed (``delta = 0``)."""
    return _fresh(prior, 0.0, None)


def _fresh(prior, shift, horizon):
    prior = as_simplex(prior).copy()
    n = prior.size
    return LeaState(prior, float(shift), np.zeros(n), np.ones(n), np.zeros(n), 0, horizon)


def validate_rewards(g, n=None):
    g = np.asarray(g, dtype=float)
    if g.ndim != 1 or (n is not None and g.size != n):
        raise ValueError("reward vector has the wrong shape")
    if np.any(g < 0.0) or np.any(g > 1.0) or not np.all(np.isfinite(g)):
        raise ValueError("expert rewards must lie in [0, 1]")
    return g


def lea_weights(state):
    """Per-expert bets ``w_{t,i} = coin_sum_i / (t + delta) * wealth_i``."""
    t = state.round + 1
    return state.coin_sum / (t + state.shift) * state.wealth


def _mixture(prior, w):
    phat = prior * np.maximum(w, 0.0)
    mass = phat.sum()
    if mass == 0.0:
        return prior.copy()
    return phat / mass


def lea_predict(state):
    if state.horizon is not None and state.round >= state.horizon:
        raise ValueError("horizon exhausted")
    return _mixture(state.prior, lea_weights(state))


def lea_update(state, prediction, reward):
    """Feed the reward vector ``g_t`` (entries in [0, 1]) to every expert's bettor.

    Raises :class:`InvariantViolation` if ``sum_i pi_i g~_i w_i`` exceeds
    ``N * 1e-12``.
    """
    g = validate_rewards(reward, state.n_experts)
    p = np.asarray(prediction, dtype=float)
    w = lea_weights(state)
    excess = g - float(g @ p)
    g_tilde = np.where(w > 0.0, excess, np.maximum(excess, 0.0))
    dominance = float(np.sum(state.prior * g_tilde * w))
    if dominance > DOMINANCE_TOL * state.n_experts:
        raise InvariantViolation(
            f"round {state.round + 1}: sum pi g~ w = {dominance!r} > 0"
        )
    t = state.round + 1
    beta = state.coin_sum / (t + state.shift)
    return replace(
        state,
        coin_sum=state.coin_sum + g_tilde,
        wealth=state.wealth * (1.0 + beta * g_tilde),
        last_w=w,
        round=t,
        max_dominance=max(state.max_dominance, dominance),
    )


def potential_sum(state):
    """``sum_i pi_i F_t(coin_sum_i)`` for the state's shifted KT potential; at most 1."""
    pot = KTPotential(1.0, state.shift)
    t = state.round
    return math.fsum(
        float(pi) * pot.value(t, float(x)) for pi, x in zip(state.prior, state.coin_sum)
    )


def hedge_predict(prior, cum_rewards, rate):
    """Exponential weights ``p_i ~ pi_i exp(rate * cum_rewards_i)``."""
    if not rate > 0:
        raise ValueError("rate must be positive")
    prior = np.asarray(prior, dtype=float)
    logits = np.log(np.where(prior > 0, prior, 1.0)) + rate * np.asarray(cum_rewards, dtype=float)
    logits = np.where(prior > 0, logits, -np.inf)
    logits -= logits.max()
    weights = np.exp(logits)
    return weights / weights.sum()


def hedge_predictions(prior, rewards, rate):
    """All Hedge predictions for a (T, N) reward matrix, vectorised over rounds."""
    G = np.asarray(rewards, dtype=float)
    cum = np.vstack([np.zeros(G.shape[1]), np.cumsum(G, axis=0)[:-1]]) if len(G) else G
    prior = np.asarray(prior, dtype=float)
    logits = np.log(np.where(prior > 0, prior, 1.0)) + rate * cum
    logits = np.where(prior > 0, logits, -np.inf)
    logits -= logits.max(axis=1, keepdims=True)
    P = np.exp(logits)
    return P / P.sum(axis=1, keepdims=True)


def lea_regret(traces, competitor):
    """``sum <g_t, u> - sum <g_t, p_t>`` over (prediction, reward) pairs."""
    u = np.asarray(competitor, dtype=float)
    total = 0.0
    for p, g in traces:
        g = np.asarray(g, dtype=float)
        if g.shape != u.shape or np.shape(p) != u.shape:
            raise ValueError("dimension mismatch")
        total += float(g @ u) - float(g @ np.asarray(p, dtype=float))
    return total


def best_expert_regret(predictions, rewards):
    """Regret to the best single expert in hindsight, for (T, N) arrays."""
    P = np.asarray(predictions, dtype=float)
    G = np.asarray(rewards, dtype=float)
    if P.shape != G.shape:
        raise ValueError("dimension mismatch")
    if G.size == 0:
        return 0.0
    return float(G.sum(axis=0).max() - np.einsum("tn,tn->", G, P))


class KTExperts:
    """Stateful wrapper: ``horizon=None`` gives the unshifted variant."""

    def __init__(self, prior, horizon=None, delta_fraction=0.5):
        if horizon is None:
            self.state = unshifted_state(prior)
        else:
            self.state = new_lea_state(prior, horizon, delta_fraction)

    def predict(self):
        return lea_predict(self.state)

    def update(self, reward, prediction=None):
        if prediction is None:
            prediction = self.predict()
        self.state = lea_update(self.state, prediction, reward)


def doubling_epochs(length, first=1):
    """Epoch lengths ``first * 2^k`` covering ``length`` rounds (last one may be cut)."""
    out = []
    size = first
    remaining = length
    while remaining > 0:
        out.append(size)
        remaining -= size
        size *= 2
    return out


class DoublingKTExperts:
    """Anytime version: restart the shifted algorithm on horizons 1, 2, 4, ..."""

    def __init__(self, prior, delta_fraction=0.5, first_horizon=1):
        self.prior = as_simplex(prior).copy()
        self.delta_fraction = delta_fraction
        self.horizon = first_horizon
        self.inner = KTExperts(self.prior, self.horizon, delta_fraction)
        self.epoch_starts = [0]
        self.rounds = 0
        self._closed_dominance = -math.inf

    @property
    def max_dominance(self):
        """Largest ``sum_i pi_i g~ w`` over every epoch so far."""
        return max(self._closed_dominance, self.inner.state.max_dominance)

    def predict(self):
        if self.inner.state.round >= self.horizon:
            self._closed_dominance = self.max_dominance
            self.horizon *= 2
            self.inner = KTExperts(self.prior, self.horizon, self.delta_fraction)
            self.epoch_starts.append(self.rounds)
        return self.inner.predict()

    def update(self, reward, prediction=None):
        if prediction is None:
            prediction = self.predict()
        self.inner.update(reward, prediction)
        self.rounds += 1


def doubling_wrapper(prior, stream, delta_fraction=0.5):
    """Run the anytime algorithm over an iterable of reward vectors.

    Returns the (T, N) array of predictions, each made before its reward.
    """
    learner = DoublingKTExperts(prior, delta_fraction)
    preds = []
    for g in stream:
        p = learner.predict()
        preds.append(p)
        learner.update(g, p)
    if not preds:
        return np.zeros((0, learner.prior.size))
    return np.array(preds)


def run_experts(learner, rewards):
    """Drive any predict/update learner over a (T, N) reward matrix."""
    G = np.asarray(rewards, dtype=float)
    P = np.empty_like(G)
    for t, g in enumerate(G):
        p = learner.predict()
        P[t] = p
        learner.update(g, p)
    return P


def simplex_regret_bound(T, competitor, prior, anytime=False):
    return regret_upper_bound_lea(T, kl_discrete(competitor, prior), anytime=anytime)
