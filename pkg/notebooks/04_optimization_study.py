# %% [markdown]
# # Proportional vs combined scaling
#
# Proportional scaling searches only (k_ax, k_rad, gamma). Combined scaling
# also frees the four internal factors. Both minimize WLTC energy under the
# same constraints. Short runs here; the CLI default is 50 iterations per
# seed.

# %%
from emscale import SimContext, resample, wltc_class3
from emscale.runner import run_optimization
from emscale.study import delta_pct

ctx = SimContext(resample(wltc_class3(), 1.0))
ITERS, SEED = 15, 1

runs = {mode: run_optimization(ctx, mode, ITERS, SEED) for mode in ("proportional", "combined")}
for mode, r in runs.items():
    b = r.best
    print("%-12s %2d evals  best %.4f MJ  (%.1f s)" % (mode, len(r.history), b.energy / 1e6, r.wall_time))
    print("   ", ", ".join("%s=%.3f" % kv for kv in b.design.values().items()))

# %% [markdown]
# Running best per evaluation. The first entries are the Latin hypercube
# design; from there each point is the maximizer of expected improvement.

# %%
for mode, r in runs.items():
    curve = r.running_best()
    print(mode, " ".join("%.3f" % (c / 1e6) if c < float("inf") else "  -  " for c in curve[::3]))

# %% [markdown]
# Relative difference of the best designs.

# %%
p, c = runs["proportional"].best, runs["combined"].best
print("combined vs proportional: %+.3f %%" % delta_pct(c.energy, p.energy))
