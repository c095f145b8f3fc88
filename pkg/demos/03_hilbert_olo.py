"""Parameter-free linear optimisation in R^d.

The KT learner bets a fraction of its wealth along the direction of the
reward sum. Against any fixed comparator u it pays roughly
||u|| sqrt(T log(T ||u||)) regret, with no learning rate to tune.
Gradient descent needs its rate matched to ||u|| to do as well.
"""

import numpy as np

from coinbet.olo import KTHilbertLearner, OnlineGradientDescent, regret_curve, run_learner
from coinbet.potentials import regret_upper_bound_olo

rng = np.random.default_rng(1)
T, d = 3000, 5
drift = rng.standard_normal(d)
drift /= np.linalg.norm(drift)
G = 0.05 * drift + rng.standard_normal((T, d)) * 0.5
G /= np.maximum(1.0, np.linalg.norm(G, axis=1, keepdims=True))

W_kt = run_learner(KTHilbertLearner(d), G)
print(f"T = {T}, d = {d}; rewards drift along a fixed unit direction")
print(f"KT final wealth {1.0 + float(np.sum(W_kt * G)):.4g}")
print(" ||u||   KT regret      bound  " + "".join(f"{'OGD ' + format(eta, 'g'):>12}" for eta in (0.001, 0.01, 0.1)))
ogd = {eta: run_learner(OnlineGradientDescent(d, eta), G) for eta in (0.001, 0.01, 0.1)}
for norm in (1.0, 10.0, 100.0, 1000.0):
    u = norm * drift
    kt = regret_curve(W_kt, G, u)[0]
    row = "".join(f"{regret_curve(W, G, u)[0]:12.4g}" for W in ogd.values())
    print(f"{norm:6g}  {kt:10.4g}  {regret_upper_bound_olo(T, norm):9.4g}  {row}")
