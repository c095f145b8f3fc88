"""Betting on coin flips without knowing the bias.

A gambler starts with 1 unit and bets a signed fraction of their wealth on
each outcome g in [-1, 1]. The KT bettor uses the running average of past
outcomes as its fraction. We compare it with the best fixed fraction chosen
in hindsight and with the Kelly bet for the true heads probability.
"""

import math

import numpy as np

from coinbet.coin_betting import (
    kelly_fraction,
    kt_wealth_guarantee_check,
    optimal_fixed_fraction_wealth,
    run_kt_bettor,
)
from coinbet.potentials import KTPotential

rng = np.random.default_rng(0)
T = 2000
p = 0.6
coins = np.where(rng.random(T) < p, 1.0, -1.0)

states = run_kt_bettor(coins)
kt = np.array([s.wealth for s in states])
kelly = np.cumprod(np.r_[1.0, 1.0 + kelly_fraction(p) * coins])
frac, oracle = optimal_fixed_fraction_wealth(coins)

print(f"{T} flips with heads probability {p}")
print(f"  hindsight fraction {frac:.3f} -> wealth {oracle:.3e}")
print(f"  Kelly bet ({kelly_fraction(p):.2f})     -> wealth {kelly[-1]:.3e}")
print(f"  KT bettor            -> wealth {kt[-1]:.3e}")
print(f"  ratio KT / hindsight = {kt[-1] / oracle:.4f}, guaranteed >= 1/(2 sqrt T) = {1 / (2 * math.sqrt(T)):.4f}")

# On +-1 coins the KT wealth equals the KT potential evaluated at the coin sum.
pot = KTPotential()
print(f"  F_T(sum g) = {pot.value(T, coins.sum()):.6e} vs wealth {kt[-1]:.6e}")

# With real-valued coins the potential becomes a floor rather than an identity.
real = rng.uniform(-0.5, 1.0, 500)
chk = kt_wealth_guarantee_check(real)
print(f"\nuniform coins on [-0.5, 1]: wealth {chk.wealth:.4e} >= floor {chk.floor:.4e}: {chk.holds}")
