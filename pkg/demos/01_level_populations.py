"""
Level populations from bath-state counting
==========================================

A harmonic ladder of 51 levels sits in a bath of 50 identical oscillators
at frequency 1e-3.  The total energy is pinned to a thin shell at E = 0.5.
Counting how many bath states fit under each level gives its population,
and ln P_n comes out almost a straight line in n.
"""

# %%
import numpy as np

from thermalize import fit_beta, pn_counting
from thermalize.experiments import reference_setup

system, bath, shell = reference_setup()
table = pn_counting(system, bath, shell, kappa=5e-6)
p = np.array(table.probabilities())

# %%
# The first few rows, and the slope of ln P_n per level.
for n in range(6):
    print(f"n={n:2d}  P_n={p[n]:.6e}  ln P_n={np.log(p[n]):+.5f}")
print("step in ln P_n:", np.round(np.diff(np.log(p[:6])), 5))

# %%
# Straight-line fit against n over the first 21 levels.
fit = fit_beta(p, window=(0, 20), energies=np.arange(len(p), dtype=float))
print(f"slope per level {-fit.beta:.5f}, r^2 = {fit.r_squared:.6f}")
