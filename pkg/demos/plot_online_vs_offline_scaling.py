"""
Online versus offline delay scaling
===================================

As the arrival rate approaches 1, the best online rule (a fixed threshold)
keeps a queue that grows like log(1/(1 - lambda)), while the offline
no-job-left-behind rule, which sees the whole future, keeps a queue that
stays bounded by (1 - p) / p.

This script sweeps lambda toward 1 at p = 0.1 and prints both, next to
their closed forms.
"""

# %%
# Setup
# -----
# A grid of five lambdas, log-spaced in 1 - lambda between 1e-2 and 1e-4.
# Each grid point gets its own sample path of one million slots.
import numpy as np

from lookahead_admission import analytics
from lookahead_admission.experiments import ExperimentConfig, parse_lambda_grid, sweep

p = 0.1
lambdas = parse_lambda_grid("1-1e-2:1-1e-4:5log")
config = ExperimentConfig(lambdas=lambdas, p=p, policies=["threshold", "nob"],
                          horizon_slots=1_000_000, seed_base=3)
rows = sweep(config)

# %%
# Results
# -------
# ``L`` is the online threshold chosen from the closed form.  The last
# column is the online scale log_{1/(1-p)}(1/(1-lambda)).
print(f"{'1-lambda':>10} {'L':>4} {'threshold':>10} {'(formula)':>10} {'NOB':>8} {'(formula)':>10} {'scale':>7}")
for lam in lambdas:
    th = next(r for r in rows if r["policy"] == "threshold" and float(r["lambda"]) == lam)
    nob = next(r for r in rows if r["policy"] == "nob" and float(r["lambda"]) == lam)
    L = int(th["L"])
    th_formula = analytics.threshold_queue_mean(analytics.ThresholdModel(p, lam, L))
    nob_formula = analytics.nob_queue_mean(analytics.NOBModel(p, lam))
    print(f"{1 - lam:10.1e} {L:4d} {float(th['avg_queue']):10.3f} {th_formula:10.3f} "
          f"{float(nob['avg_queue']):8.3f} {nob_formula:10.3f} {analytics.online_scaling(p, lam):7.2f}")

# %%
# The threshold column climbs by about 1/ln(10/9) ~ 9.5 per factor e in
# 1/(1 - lambda); the no-job-left-behind column settles near 9.
x = np.log(1 / (1 - np.array(lambdas)))
y = [float(r["avg_queue"]) for r in rows if r["policy"] == "threshold"]
print("fitted slope:", round(float(np.polyfit(x, y, 1)[0]), 2), " target:", round(1 / np.log(1 / (1 - p)), 2))
