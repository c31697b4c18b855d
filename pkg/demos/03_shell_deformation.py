"""
How coupling bends the energy shell
===================================

Each system level n leaves the bath the window [E - eps_n, E + delta - eps_n].
Without coupling the windows slide down linearly with n.  With coupling the
levels shift by -kappa * n**2, so the window edges bend upwards.
"""

# %%
import numpy as np

from thermalize import ShellWindow, SystemSpec, deformation_map

system = SystemSpec.harmonic(1e-3, 51)
shell = ShellWindow(0.5, 1e-5)

# %%
for kappa in (0.0, 5e-6, 5e-4):
    rows = deformation_map(system, shell, kappa)
    lows = np.array([lo for _, lo, _ in rows])
    curvature = np.diff(lows, 2).mean() if len(lows) > 2 else float("nan")
    print(f"kappa={kappa:.0e}: {len(rows)} levels reach the bath, "
          f"lower edge {lows[0]:.4f} -> {lows[-1]:.4f}, curvature {curvature:.2e}")
