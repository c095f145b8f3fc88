"""Online regression with absolute loss, one pass, no tuning.

Each input is normalised to unit length, so the absolute-loss subgradient is
a unit vector and the KT learner applies directly. We sweep the OGD rate and
see where the untuned learner lands.
"""

from coinbet.harness.experiments import ExperimentConfig, run_olo_experiment

cfg = ExperimentConfig(task="olo_regression", T=5000, dim=10, u_norm=3.0, noise=0.1, eta_grid=(1e-2, 1e2, 13))
traces = run_olo_experiment(cfg)
kt, ogd = traces[0], traces[1:]

print(f"synthetic stream: d = {cfg.dim}, T = {cfg.T}, ||u*|| = {cfg.u_norm}, noise {cfg.noise}")
print(f"{'rate':>10}  total absolute loss")
for tr in ogd:
    print(f"{tr.params['eta']:10.3g}  {tr.final_value:10.1f}")
best = min(tr.final_value for tr in ogd)
print(f"{'KT':>10}  {kt.final_value:10.1f}   ({kt.final_value / best:.3f} x best OGD)")
