# %% [markdown]
# # Picking a gear ratio
#
# With the motor fixed at its reference size, the gear ratio alone decides
# whether the car meets its top-speed, acceleration and hill-start targets,
# and how much energy the cycle takes.

# %%
import numpy as np

from emscale import DesignVector, SimContext, resample, wltc_class3
from emscale.sim import evaluate

ctx = SimContext(resample(wltc_class3(), 1.0))

# %% [markdown]
# Margins are normalized: zero is exactly on the limit, negative means
# violated.

# %%
rows = []
for gamma in np.arange(2.0, 8.01, 0.5):
    rec = evaluate(DesignVector(gamma=float(gamma)), ctx)
    rows.append((gamma, rec))
    m = rec.margins
    energy = "%.3f MJ" % (rec.energy / 1e6) if rec.feasible else "-"
    print("gamma %.1f  top %+.3f  accel %+.3f  grade %+.3f  cycle %+.3f  %s"
          % (gamma, m["top_speed"], m["acceleration"], m["gradeability"], m["cycle"], energy))

# %% [markdown]
# Energy rises with the ratio: a higher ratio spins the motor faster, and
# iron and windage losses grow with speed. So the best feasible ratio is the
# lowest one that still makes the 0-100 km/h time.

# %%
feasible = [(g, r.energy) for g, r in rows if r.feasible]
g_best, e_best = min(feasible, key=lambda x: x[1])
print("best on this grid: gamma %.1f, %.3f MJ" % (g_best, e_best / 1e6))
