# %% [markdown]
# # The drive cycle
#
# The bundled cycle is the WLTC class 3b speed trace, 1 Hz, in km/h.
# Here we load it, look at its phases and work out what the road asks of the
# wheels before any motor is involved.

# %%
import numpy as np

from emscale import VehicleParams, resample, wltc_class3
from emscale.vehicle import wheel_torque

cycle = wltc_class3()
print(cycle.name, len(cycle), "samples,", cycle.duration, "s")
print("distance %.2f km, top speed %.1f km/h" % (cycle.distance() / 1e3, cycle.v.max() * 3.6))

# %% [markdown]
# Four phases: low, medium, high, extra high. Average speed per phase:

# %%
edges = [0, 589, 1022, 1477, 1800]
for name, lo, hi in zip(["low", "medium", "high", "extra high"], edges[:-1], edges[1:]):
    seg = cycle.v[lo:hi + 1]
    print("%-10s %4d-%4d s  mean %5.1f km/h  max %5.1f km/h" % (name, lo, hi, seg.mean() * 3.6, seg.max() * 3.6))

# %% [markdown]
# Resampling is plain linear interpolation on a uniform grid, so halving the
# step keeps every original sample.

# %%
fine = resample(cycle, 0.5)
print(len(fine), "samples at 0.5 s;", np.allclose(fine.v[::2], cycle.v))

# %% [markdown]
# Wheel torque demand over the cycle. Positive is traction, negative is braking
# that regeneration can partly recover.

# %%
vp = VehicleParams()
T = wheel_torque(vp, cycle.v, cycle.a, gate_rolling=True)
P = T * cycle.v / vp.r_w
dt = np.diff(cycle.t)
traction = np.sum(np.maximum(P[:-1], 0) * dt)
braking = np.sum(np.minimum(P[:-1], 0) * dt)
print("wheel torque range %.0f .. %.0f N m" % (T.min(), T.max()))
print("traction energy %.2f MJ, braking energy %.2f MJ" % (traction / 1e6, braking / 1e6))
