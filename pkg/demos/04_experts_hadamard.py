"""Experts on a Hadamard benchmark: KT mixture versus tuned Hedge.

126 experts are built from +-1 Hadamard rows and their mirrors, so they all
tie over each 64-round period except for k of them that are slightly better.
Hedge needs a learning rate; the KT mixture has none. This runs a shortened
horizon; the full-size comparison lives in the acceptance tests and in
``coinbet lea``.
"""

import numpy as np

from coinbet.harness.experiments import ExperimentConfig, run_lea_experiment

cfg = ExperimentConfig(task="lea_synthetic", T=8192, experts_k=5, eta_grid=(1e-2, 1e1, 13))
traces = run_lea_experiment(cfg)
kt, hedge = traces[0], traces[1:]

print(f"N = 126 experts, k = {cfg.experts_k} good ones, T = {cfg.T}")
print(f"KT (no rate)        regret {kt.final_regret:8.2f}")
for tr in hedge:
    bar = "#" * int(min(60, tr.final_regret / 10))
    print(f"Hedge eta = {tr.params['eta']:7.3f} regret {tr.final_regret:8.2f} {bar}")
best = min(hedge, key=lambda tr: tr.final_regret)
print(f"\nbest Hedge: eta = {best.params['eta']:.3f}; KT / best = {kt.final_regret / best.final_regret:.3f}")
print(f"KT regret at T/4, T/2, T: {kt.regret[cfg.T // 4 - 1]:.1f}, {kt.regret[cfg.T // 2 - 1]:.1f}, {kt.regret[-1]:.1f}")
