"""Inspecting coin-betting potentials.

A potential F_t(x) is a wealth floor as a function of the coin sum x. Good
potentials are even, log-convex, grow without bound towards the edge of their
domain and can always be backed by some bet. The grid checker looks for
counterexamples to each of these conditions.
"""

import math

import numpy as np

from coinbet.potentials import (
    ExpSquarePotential,
    KTPotential,
    Potential,
    PotentialDescriptor,
    PotentialKind,
    betting_fraction_generic,
    check_excellence,
    kt_lower_bound,
)


class TooGreedy(Potential):
    """Promises exp(x^2 / t): faster growth than any bettor can deliver."""

    first_round = 1

    def domain_radius(self, t):
        return math.inf

    def log_value(self, t, x):
        return 0.0 if t == 0 else x * x / t


t = 10
kt = KTPotential()
es = ExpSquarePotential()
print(" x     KT F_10(x)   lower bound   ExpSquare F_10(x)")
for x in np.linspace(0, 9, 7):
    print(f"{x:4.1f}  {kt.value(t, x):11.4f}  {kt_lower_bound(t, x):11.4f}  {es.value(t, x):11.4f}")

print("\nbetting fraction at coin sum 3 after 5 rounds:")
print(f"  KT          {betting_fraction_generic(kt.at(6), 3.0):.4f} (closed form 3/6 = 0.5)")
print(f"  shifted d=4 {betting_fraction_generic(KTPotential(1, 4).at(6), 3.0):.4f} (closed form 3/10)")
print(f"  ExpSquare   {betting_fraction_generic(es.at(6), 3.0):.4f}")

print("\nexcellence checks up to t = 20:")
for desc in (
    PotentialDescriptor(PotentialKind.KT),
    PotentialDescriptor(PotentialKind.SHIFTED_KT, shift=8),
    PotentialDescriptor(PotentialKind.EXP_SQUARE),
):
    print(f"  {desc.kind.name:<11} shift={desc.shift:g}: {len(check_excellence(desc, 20))} violations")
bad = check_excellence(TooGreedy(), 20)
print(f"  exp(x^2/t) : {len(bad)} violations, first: {bad[0]}")
