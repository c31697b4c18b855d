"""
A qubit with leftover coherence
===============================

A two-level state with Gibbs populations and a small coherence F.  Exact
diagonalization is compared with the leading small-F expansions; the gap
between them falls sixteenfold each time F is halved.
"""

# %%
from thermalize import TwoLevelState, two_level_approx, two_level_exact

beta, delta = 1.0, 1.0
previous = None
for F in (0.05, 0.025, 0.0125, 0.00625):
    state = TwoLevelState(beta, delta, F)
    exact, approx = two_level_exact(state), two_level_approx(state)
    err = abs(exact[3] - approx[3])
    ratio = "" if previous is None else f"  ratio {previous / err:.2f}"
    print(f"|F|={F:<7} beta_eff exact {exact[3]:.6f} approx {approx[3]:.6f} "
          f"S_vn {exact[2]:.6f} <= S_gibbs {approx[4]:.6f}{ratio}")
    previous = err
