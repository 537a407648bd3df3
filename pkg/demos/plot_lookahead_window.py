"""
How much lookahead is enough?
=============================

The windowed rule deletes an arrival unless the queue drops below its
arrival level within the next ``w`` time units.  Small windows delete far
too much; as ``w`` grows the deletion set shrinks to the offline one.  The
question is how large ``w`` must be before the deletion budget is met.
"""

# %%
# Window sweep
# ------------
# Windows are multiples of ln(1/(1 - lambda)); the last row is the offline
# policy on the same path.
import math

from lookahead_admission.experiments import ExperimentConfig, duality_sweep, smallest_feasible_window

lam, p = 0.99, 0.1
config = ExperimentConfig(lambdas=[lam], p=p, horizon_slots=500_000, seed_base=2)
rows = duality_sweep(config)
base = math.log(1 / (1 - lam))
print(f"{'w':>9} {'w/ln':>7} {'avg queue':>10} {'rate':>8} feasible")
for r in rows:
    w = f"{float(r['w']):9.2f}" if r["w"] else "  offline"
    ratio = f"{float(r['w']) / base:7.1f}" if r["w"] else "      -"
    print(f"{w} {ratio} {float(r['avg_queue']):10.3f} {float(r['del_rate_continuous']):8.4f} {r['feasible']}")

# %%
# Calibrated constant
# -------------------
w = smallest_feasible_window(rows)
print(f"smallest feasible window {w:.1f} = {w / base:.1f} x ln(1/(1-lambda))")
