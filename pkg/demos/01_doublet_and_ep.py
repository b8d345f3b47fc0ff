# %% [markdown]
# # From a resonance doublet to its exceptional point
#
# Two s-wave resonances of the double-barrier potential sit close together
# in the fourth quadrant of the k-plane. Tuning the inner barrier thickness
# d and the outer-well level v3 pushes them into a single double pole.

# %%
import numpy as np

from jostpole import KWindow, Doublet, count_zeros, default_profile, locate_ep, s_matrix, scan_window, verify_ep

prof = default_profile()
window = KWindow(2.0, 2.4, -0.3, 0.0)
print("control point:", prof.control)
print("radii r1..r4:", np.round(prof.radii, 6))

# %% [markdown]
# ## Zeros of the Jost function in the search window

# %%
zeros = scan_window(prof, window, 64)
for z in zeros:
    print(f"k = {z.real:.7f} {z.imag:+.7f}i   E = {z * z:.6f}")
print("argument-principle count:", count_zeros(prof, window))

# %% [markdown]
# The S-matrix is unimodular on the real axis; near Re k of the narrow
# resonance the phase jumps quickly.

# %%
ks = np.linspace(2.20, 2.26, 7)
for k in ks:
    S = s_matrix(prof, k)[0]
    print(f"k={k:.3f}  |S|-1={abs(S) - 1:+.1e}  arg S={np.angle(S):+.4f}")

# %% [markdown]
# ## Locating the double zero

# %%
ep = locate_ep(Doublet(zeros[0], zeros[1], prof))
rep = verify_ep(ep)
print(f"d*  = {ep.d_star:.10f}")
print(f"v3* = {ep.v3_star:.10f}")
print(f"k_d = {ep.k_d.real:.8f} {ep.k_d.imag:+.8f}i")
print("residuals |f|, |f'|:", ep.residuals)
print("verification:", rep.as_dict()["status"], "precision", f"{rep.precision:.1e}")
