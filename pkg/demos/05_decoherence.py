"""
Coherences fade as the bath grows
=================================

Two system levels whose deformed energies coincide share one bath window, so
their off-diagonal element need not vanish.  Each bath mode displaced by 0.3
multiplies the overlap by a factor below one, and the sampled coherence drops
as modes are added.
"""

# %%
import numpy as np

from thermalize import (BathSpec, ShellWindow, SystemSpec, decoherence_product, kappa_of,
                        pn_typicality_check)

delta = 0.3
for N in (1, 2, 4, 8):
    bath = BathSpec.degenerate(N, 1.0, strength=2 * delta)
    kappa = kappa_of(bath)
    system = SystemSpec((0.0, kappa), (0.0, 1.0))
    vacuum = decoherence_product(system, bath, 0, 1, (0,) * N, (0,) * N).product
    report = pn_typicality_check(system, bath, ShellWindow(2.0, 0.5), kappa, range(100),
                                 coherences=True)
    print(f"N={N}: vacuum overlap {vacuum:.4f} (exp(-N d^2/2) = {np.exp(-N * delta**2 / 2):.4f}), "
          f"dimension {report.dimension}, mean |F_01| {np.mean(report.coherences):.4f}")
