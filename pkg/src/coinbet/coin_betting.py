"""The betting game: wealth accounting, bettors and wealth certificates."""

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .numerics import kl_bernoulli
from .potentials import KTPotential

__all__ = [
    "BettingState",
    "new_state",
    "validate_coins",
    "bet_and_settle",
    "kt_fraction_from_state",
    "kelly_fraction",
    "optimal_fixed_fraction_wealth",
    "run_kt_bettor",
    "WealthCheck",
    "kt_wealth_guarantee_check",
    "logloss_regret_to_wealth_bound",
]

_FRACTION_TOL = 1e-12
FLOOR_TOL = 1e-9


@dataclass(frozen=True)
class BettingState:
    endowment: float
    wealth: float
    coin_sum: float = 0.0
    round: int = 0

    @property
    def reward(self):
        return self.wealth - self.endowment


def new_state(endowment=1.0):
    if not endowment > 0:
        raise ValueError("endowment must be positive")
    return BettingState(float(endowment), float(endowment))


def validate_coins(coins):
    arr = np.asarray(coins, dtype=float)
    if arr.ndim != 1:
        raise ValueError("coin sequence must be one-dimensional")
    if np.any(np.abs(arr) > 1.0) or not np.all(np.isfinite(arr)):
        raise ValueError("coin outcomes must lie in [-1, 1]")
    return arr


def bet_and_settle(state, fraction, coin):
    """Stake ``fraction * wealth`` on ``coin`` and return the settled state."""
    if abs(fraction) > 1.0 + _FRACTION_TOL:
        raise ValueError(f"betting fraction {fraction!r} exceeds 1: borrowing is not allowed")
    if abs(coin) > 1.0:
        raise ValueError(f"coin outcome {coin!r} outside [-1, 1]")
    stake = fraction * state.wealth
    return replace(
        state,
        wealth=state.wealth + stake * coin,
        coin_sum=state.coin_sum + coin,
        round=state.round + 1,
    )


def kt_fraction_from_state(state, shift=0.0):
    """KT bet for the coming round: ``coin_sum / (t + shift)`` with ``t = round + 1``."""
    return state.coin_sum / (state.round + 1 + shift)


def kelly_fraction(p):
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be a probability")
    return 2.0 * p - 1.0


def optimal_fixed_fraction_wealth(coins, endowment=1.0):
    """Best constant fraction in hindsight, ``sum(g) / T``, and the wealth it earns."""
    coins = validate_coins(coins)
    if coins.size == 0:
        raise ValueError("need at least one coin")
    fraction = float(coins.sum()) / coins.size
    wealth = endowment * float(np.prod(1.0 + fraction * coins))
    return fraction, wealth


def run_kt_bettor(coins, shift=0.0, endowment=1.0):
    """Play the KT bettor on ``coins``; returns the list of states (round 0..T)."""
    coins = validate_coins(coins)
    state = new_state(endowment)
    states = [state]
    for g in coins:
        state = bet_and_settle(state, kt_fraction_from_state(state, shift), float(g))
        states.append(state)
    return states


class WealthCheck(NamedTuple):
    wealth: float
    floor: float
    holds: bool


def kt_wealth_guarantee_check(coins, shift=0.0, endowment=1.0):
    """Run the KT bettor and compare its final wealth with the potential floor.

    ``holds`` requires ``wealth >= F_T(sum g)`` (relative tolerance 1e-9)
    and, for unshifted play on +-1 coins, ``wealth >= W(beta*) / (2 sqrt(T))``.
    """
    coins = validate_coins(coins)
    T = coins.size
    wealth = run_kt_bettor(coins, shift, endowment)[-1].wealth
    floor = KTPotential(endowment, shift).value(T, float(coins.sum()))
    holds = wealth >= floor - FLOOR_TOL * max(1.0, floor)
    if holds and T > 0 and shift == 0 and np.all(np.abs(coins) == 1.0):
        _, oracle = optimal_fixed_fraction_wealth(coins, endowment)
        holds = wealth >= oracle / (2.0 * math.sqrt(T)) * (1.0 - FLOOR_TOL)
    return WealthCheck(wealth, floor, bool(holds))


def logloss_regret_to_wealth_bound(logloss_regret, T, coin_sum, endowment=1.0):
    """Wealth guaranteed to the ``beta = 2p - 1`` bettor of a log-loss predictor
    whose log-loss regret is at most ``logloss_regret``."""
    if T < 1:
        raise ValueError("T must be positive")
    if abs(coin_sum) > T:
        raise ValueError("|coin_sum| cannot exceed T")
    p = min(1.0, max(0.0, 0.5 + coin_sum / (2.0 * T)))
    return endowment * math.exp(T * kl_bernoulli(p, 0.5) - logloss_regret)
