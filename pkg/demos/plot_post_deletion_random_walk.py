"""
The queue left behind by no-job-left-behind
===========================================

Deleting exactly the arrivals whose job would never see the queue drop
below its arrival level turns the (transient) heavy-traffic queue into a
positive-recurrent random walk.  It steps up with probability
(1 - p) / (lambda + 1 - p), which is the down-probability of the original
walk, and its stationary law is geometric with ratio (1 - p) / lambda.
"""

# %%
# Simulate and delete
# -------------------
import numpy as np

from lookahead_admission import analytics
from lookahead_admission.deletion import deletion_epochs, multi_delete
from lookahead_admission.metrics import empirical_distribution, lag1_autocorrelation, transition_frequencies
from lookahead_admission.paths import ModelParams, generate_initial_path
from lookahead_admission.policies import nob_offline

p, lam = 0.5, 0.9
path = generate_initial_path(ModelParams(lam, p), 2_000_000, seed=5)
M = nob_offline(path)
q = multi_delete(path.q, M)
print(f"initial queue at the horizon: {path.q[-1]}, after deletions: {q[-1]}")
print(f"deleted {M.size} of {int(path.is_arrival.sum())} arrivals")

# %%
# Stationary law
# --------------
model = analytics.NOBModel(p, lam)
hist = empirical_distribution(q, burn_in=10_000)
for k in range(6):
    print(f"P(Q={k}): simulated {hist.frequencies[k]:.4f}  geometric {analytics.nob_steady_state(model, k):.4f}")
print("max CDF gap:", round(hist.max_cdf_deviation(lambda k: analytics.nob_cdf(model, k)), 5))

# %%
# One-step transitions
# --------------------
# The up-probability is the same whether or not the queue is empty.
f_pos, f_zero, _ = transition_frequencies(q, burn_in=10_000)
print(f"up | q>0 = {f_pos:.4f}, up | q=0 = {f_zero:.4f}, target {analytics.post_nob_up_probability(p, lam):.4f}")

# %%
# Deletion epochs
# ---------------
# Gaps between deletions are i.i.d. with mean (lambda + 1 - p) / (lambda - (1 - p)).
stats = deletion_epochs(q, M)
print(f"mean epoch {stats.mean_length:.4f} vs {analytics.nob_epoch_mean(model):.4f}, "
      f"lag-1 autocorrelation {lag1_autocorrelation(stats.lengths):+.4f}")
print("longest epoch:", int(np.max(stats.lengths)))
