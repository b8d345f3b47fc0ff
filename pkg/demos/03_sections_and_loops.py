# %% [markdown]
# # Crossings, pole trajectories and encircling the double pole

# %%
import numpy as np

from jostpole import Doublet, KWindow, compute_coefficients, default_profile, encircle, locate_ep, scan_window
from jostpole.analysis import pole_trajectory, section

prof = default_profile()
z = scan_window(prof, KWindow(2.0, 2.4, -0.3, 0.0), 64)
ep = locate_ep(Doublet(z[0], z[1], prof))
co = compute_coefficients(ep)
d_range = (ep.d_star - 3e-3, ep.d_star + 3e-3)

# %% [markdown]
# ## Sweeping d at fixed v3
#
# Below, at and above v3* the two energies and widths behave differently.

# %%
for v3 in (1.0381, ep.v3_star, 1.0384):
    sec = section(ep, co, v3, d_range, 201)
    dE = np.array([s.dE for s in sec.sweep])
    dG = np.array([s.dGamma for s in sec.sweep])
    print(f"v3={v3:.7f}: {sec.classification:38s} min|dE|={np.abs(dE).min():.2e} min|dGamma|={np.abs(dG).min():.2e}")

# %% [markdown]
# ## Trajectories in the complex energy plane are hyperbolae

# %%
for v3 in (1.0381, ep.v3_star, 1.0384):
    fit = pole_trajectory(section(ep, co, v3, d_range, 201))
    print(f"v3={v3:.7f}: type {fit.trajectory_type:3s} B={fit.B:+.4f} (predicted {fit.predicted_B:+.4f})  "
          f"asymptote slopes {np.round(fit.asymptote_slopes, 4)}")

# %% [markdown]
# ## Monodromy

# %%
for n in (1, 2, 3):
    res = encircle(ep, co, 1e-2, n, 256)
    print(f"{n} turn(s): {res.permutation:8s} closure mismatch {res.mismatch:.1e}")
off = encircle(ep, co, 1e-2, 1, 256, center_offset=(0.05, 0.0))
print("loop not enclosing the point:", off.permutation)
