"""
Random pure states look thermal
===============================

Draw random pure states of system plus bath inside the energy shell and trace
out the bath.  The level populations scatter around the counting result, and
the scatter shrinks roughly as one over the square root of the shell
dimension.
"""

# %%
import numpy as np

from thermalize import BathSpec, ShellWindow, SystemSpec, kappa_of, pn_typicality_check

system = SystemSpec((0.0, 1.0, 2.0), (0.0, 1.0, 2.0))
bath = BathSpec.degenerate(3, 1.0, strength=0.05)
kappa = kappa_of(bath)

# %%
medians = []
for E in (25.5, 80.5):
    report = pn_typicality_check(system, bath, ShellWindow(E, 1.0), kappa, range(100))
    medians.append(report.median_deviation)
    print(f"E={E}: dimension {report.dimension}, reference P_n "
          f"{np.round(report.reference, 4)}, median deviation {report.median_deviation:.2e}")
print(f"shrink factor {medians[0] / medians[1]:.2f}")
