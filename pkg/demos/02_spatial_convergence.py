# %% [markdown]
# # Spatial convergence and boundary superconvergence
#
# No closed-form solution is available, so the "exact" solution is the same
# scheme on a mesh eight times finer than the finest one tested. The meshes
# are nested, so coarse solutions interpolate exactly onto the reference.
#
# Expect order 2 in L2 and max norm, order 1 in the H1-type norm
# sqrt(w(0)^2 + w(1)^2 + |w_x|^2), and order 2 for the boundary controls
# (one better than the H1 rate would suggest). About 15 seconds.

# %%
from bbmb.analysis import convergence_study
from bbmb.scenarios import load_preset

cfg = load_preset("example1_controlled")
rows = convergence_study(
    cfg.params, cfg.stepper, [10, 20, 40, 80], ref_factor=8, t_eval=1.0, initial=cfg.initial_field
)

# %%
names = ("l2", "linf", "tnorm", "v0", "v1")
print(f"{'h':>8}" + "".join(f"{'e_' + n:>12}{'order':>7}" for n in names))
for r in rows:
    cells = ""
    for n in names:
        order = getattr(r, f"order_{n}")
        cells += f"{getattr(r, f'e_{n}'):12.3e}" + (f"{order:7.2f}" if order is not None else " " * 7)
    print(f"{r.h:8.4f}{cells}")
