# %% [markdown]
# # The local unfolding around the double pole
#
# Near the exceptional point the pair of poles follows a square-root law in
# the parameter offset xi = (d - d*, v3 - v3*). This notebook compares the
# first-order approximant with exact, re-polished zeros.

# %%
import numpy as np

from jostpole import Doublet, KWindow, compute_coefficients, contact_k, default_profile, locate_ep, scan_window
from jostpole.analysis import doublet_near_ep, surface_scan

prof = default_profile()
z = scan_window(prof, KWindow(2.0, 2.4, -0.3, 0.0), 64)
ep = locate_ep(Doublet(z[0], z[1], prof))
co = compute_coefficients(ep)
for key, val in co.as_dict().items():
    print(f"{key:10s} {val}")

# %% [markdown]
# ## Approximant versus exact poles on shrinking circles

# %%
for rho in (1e-2, 1e-3, 1e-4):
    worst = 0.0
    for th in np.linspace(0, 2 * np.pi, 12, endpoint=False):
        xi = rho * np.array([np.cos(th), np.sin(th)])
        exact = doublet_near_ep(ep, co, xi)
        a, b = contact_k(co, xi)
        worst = max(worst, max(abs(a - exact.k1), abs(b - exact.k2)) / abs(a - b))
    print(f"|xi| = {rho:.0e}: worst error relative to the gap {worst:.2e}")

# %% [markdown]
# ## Seams of the two sheets
#
# Along one ray the real parts of the poles meet, along the opposite ray the
# imaginary parts. For the exact poles the meeting is only approximate and
# degrades as |xi|^(3/2).

# %%
x0 = co.xi_hat0_k
for rho in (1e-4, 3e-4, 1e-3, 3e-3):
    p, m = doublet_near_ep(ep, co, rho * x0), doublet_near_ep(ep, co, -rho * x0)
    print(f"rho={rho:.0e}  +ray |dRe k|={abs(p.k1.real - p.k2.real):.1e}  "
          f"-ray |dIm k|={abs(m.k1.imag - m.k2.imag):.1e}")

# %% [markdown]
# ## A coarse surface grid

# %%
grid = surface_scan(ep, co, (2e-3, 5e-4), (9, 9))
gap = np.array([[abs(s.k1 - s.k2) for s in row] for row in grid])
np.set_printoptions(precision=4, linewidth=120)
print(gap)
