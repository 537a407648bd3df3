"""
Distributed thresholds versus a central scheduler
=================================================

N stations share a central server of rate pN.  A central scheduler that
always serves the longest local queue is compared with a fully distributed
scheme: every station runs the same threshold rule and ships the jobs it
would have deleted to a FIFO central queue.
"""

# %%
# Simulation
# ----------
from lookahead_admission.paths import ModelParams
from lookahead_admission.pooling import PoolingConfig, run_pooling

params = ModelParams(0.95, 0.1)
print(f"{'N':>4} {'scheduler':>10} {'L':>3} {'local':>7} {'central':>8} {'per station':>12}")
for n in (1, 10, 50, 200):
    for scheduler in ("lqf", "threshold"):
        stats = run_pooling(PoolingConfig(n, params, epsilon=0.02, scheduler=scheduler,
                                          horizon_events=2_000_000, seed=1))
        print(f"{n:4d} {scheduler:>10} {stats.L or '-':>3} {stats.mean_local_queue:7.3f} "
              f"{stats.mean_central_queue:8.3f} {stats.system_mean_queue:12.3f}")

# %%
# The central queue does not grow with N: its load is about (p - eps) / p,
# and the redirect streams smooth out as more stations feed it.
