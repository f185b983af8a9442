# %% [markdown]
# # Scaling the reference motor
#
# Two outer factors stretch the machine: ``k_ax`` along the shaft and ``k_rad``
# across it. Four internal factors reshape the magnet and the slot on top of
# the radial stretch. This walk-through shows what each does to the torque
# envelope and the losses.

# %%
import numpy as np

from emscale import ReferenceMachine, ScalingVector, build_model

ref = ReferenceMachine()
base = build_model(ref, ScalingVector())
print("reference: T_peak %.0f N m, base speed %.0f rad/s, top speed %.0f rad/s" % (base.t_peak, base.w_base, base.w_max))

# %% [markdown]
# Axial scaling trades torque against base speed at constant corner power.
# Radial scaling grows torque with the cube and lowers the speed limit.

# %%
for k in [ScalingVector(k_ax=0.8), ScalingVector(k_ax=1.2), ScalingVector(k_rad=0.8), ScalingVector(k_rad=1.2)]:
    m = build_model(ref, k)
    print("k_ax=%.1f k_rad=%.1f  T_peak %6.1f  w_base %6.1f  w_max %6.1f  P_peak %5.1f kW"
          % (k.k_ax, k.k_rad, m.t_peak, m.w_base, m.w_max, m.peak_power / 1e3))

# %% [markdown]
# Internal factors. A longer magnet raises the air-gap flux with diminishing
# returns; a wider magnet raises it linearly until the teeth saturate. Thinner
# teeth leave more room for copper but saturate sooner.

# %%
for k_ml in (0.9, 1.0, 1.1):
    for k_tw in (0.9, 1.1):
        m = build_model(ref, ScalingVector(k_mw=1.1, k_ml=k_ml, k_tw=k_tw))
        print("k_mw=1.1 k_ml=%.1f k_tw=%.1f  lambda_B %.3f  lambda_A %.3f  T_peak %.1f"
              % (k_ml, k_tw, m.lambda_b, m.lambda_a, m.t_peak))

# %% [markdown]
# Loss breakdown along the envelope of the reference machine.

# %%
for w in np.linspace(100, 1000, 4):
    T = 0.5 * base.max_torque(w)
    cu, fe, mech = base.loss_components(T, w)
    eff = T * w / (T * w + cu + fe + mech)
    print("w %6.0f rad/s  T %5.1f N m  copper %6.0f W  iron %5.0f W  mech %5.0f W  eff %.3f" % (w, T, cu, fe, mech, eff))
