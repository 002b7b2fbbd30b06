# %% [markdown]
# # Vanishing dispersion
#
# Setting mu = 0 leaves the viscous Burgers equation with the same feedback
# laws. As mu shrinks, the L2 history of the BBM-Burgers state should
# approach the Burgers one. The sweep uses sine data with feedback at both
# ends (c0 = c1 = 1, nu = 0.1). About 8 seconds.

# %%
import numpy as np

from bbmb.analysis import mu_sweep
from bbmb.scenarios import load_preset

cfg = load_preset("example2_mu_sweep")
mus = [0.5, 0.1, 0.01, 0.001, 0.0]
sweep = mu_sweep(cfg.params, cfg.stepper, mus, cfg.initial_field())

# %% [markdown]
# Largest gap over time between each run and the Burgers run.

# %%
for mu, dev in zip(sweep.mus, sweep.deviations):
    print(f"mu={mu:<6g} sup_t |L2_mu - L2_0| = {dev:.4g}")

# %% [markdown]
# A few samples of each history. At mu = 0.5 the L2 norm is not monotone:
# the decaying quantity is ||w||^2 + mu ||w_x||^2 + (mu/nu) E1, and energy
# moves between its L2 and gradient parts.

# %%
times = sweep.results[0].times
print(f"{'t':>5}" + "".join(f"{'mu=' + format(m, 'g'):>12}" for m in mus))
for t in (0, 0.5, 1, 2, 3, 5):
    i = int(np.argmin(np.abs(times - t)))
    print(f"{t:5.1f}" + "".join(f"{r.l2[i]:12.4g}" for r in sweep.results))
