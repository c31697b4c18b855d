import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_force_count
from thermalize import (BathSpec, CapExceeded, EmptyShell, NonPositiveEnergy, QuantizedShell,
                        ShellWindow, SpecError, SystemSpec, count_bath_states_exact,
                        deformation_map, enumerate_bath_states, log_omega_bath_analytic,
                        omega_bath_analytic, pn_counting, quantize_window)
from thermalize.counting import _quanta_table, admissible_levels


def test_two_modes_window_two():
    assert count_bath_states_exact(QuantizedShell((1, 1), 2, 2)) == 3


def test_vacuum_only():
    assert count_bath_states_exact(QuantizedShell((1, 2, 3), 0, 0)) == 1


def test_large_degenerate_count():
    shell = QuantizedShell((1,) * 50, 500, 500)
    assert count_bath_states_exact(shell) == math.comb(549, 49)
    assert sum(_quanta_table(shell.weights, 500)[500:501]) == math.comb(549, 49)


def test_empty_window_counts_zero():
    assert count_bath_states_exact(QuantizedShell((1, 1), 5, 4)) == 0
    assert count_bath_states_exact(QuantizedShell((1, 1), -5, -1)) == 0
    assert enumerate_bath_states(QuantizedShell((2, 3), 5, 4), cap=10) == []


def test_negative_lower_bound_clipped():
    assert count_bath_states_exact(QuantizedShell((1, 1), -3, 1)) == 3


def test_enumerate_examples():
    assert enumerate_bath_states(QuantizedShell((1, 1), 2, 2), cap=10) == [(0, 2), (1, 1), (2, 0)]
    assert enumerate_bath_states(QuantizedShell((1, 2), 2, 3), cap=10) == [
        (0, 1), (1, 1), (2, 0), (3, 0)]


def test_enumerate_cap():
    with pytest.raises(CapExceeded) as info:
        enumerate_bath_states(QuantizedShell((1, 1, 1), 0, 10), cap=5)
    assert info.value.count == math.comb(13, 3)


shells = st.builds(
    lambda ks, lo, width: QuantizedShell(tuple(ks), lo, lo + width),
    st.lists(st.integers(1, 4), min_size=1, max_size=4),
    st.integers(-3, 14),
    st.integers(-2, 6),
)


@settings(max_examples=150, deadline=None)
@given(shells)
def test_exact_matches_brute_force_and_enumeration(shell):
    brute = brute_force_count(shell.weights, shell.lo, shell.hi)
    listed = enumerate_bath_states(shell, cap=10**6)
    assert count_bath_states_exact(shell) == len(brute) == len(listed)
    assert listed == sorted(brute)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12), st.integers(1, 4), st.integers(0, 200), st.integers(0, 60))
def test_degenerate_closed_form_matches_dp(N, k, lo, width):
    hi = lo + width
    dp = _quanta_table((k,) * N, hi)
    assert count_bath_states_exact(QuantizedShell((k,) * N, lo, hi)) == sum(dp[lo:hi + 1])


def test_quantize_snaps_rounding_noise():
    bath = BathSpec.degenerate(2, 0.01)
    shell = quantize_window(bath, 1.0, 1.01)
    assert (shell.lo, shell.hi) == (100, 101)
    # closed integer window: both layers count
    assert count_bath_states_exact(shell) == 101 + 102


def test_analytic_two_modes():
    bath = BathSpec.degenerate(2, 0.01)
    assert omega_bath_analytic(1.0, 0.01, bath) == pytest.approx(100.0, rel=1e-12)
    # the single layer n1 + n2 = 100 holds 101 states
    assert count_bath_states_exact(QuantizedShell((1, 1), 100, 100)) == 101


def test_analytic_single_mode():
    bath = BathSpec((0.7,), (0.0,))
    assert omega_bath_analytic(3.0, 0.2, bath) == pytest.approx(0.2 / 0.7, rel=1e-14)


def test_analytic_large_bath_is_finite_and_ratios_match_power_law():
    bath = BathSpec.degenerate(50, 1e-3)
    logs = [log_omega_bath_analytic(0.5 - n * 1e-3, 1e-5, bath) for n in range(5)]
    assert all(math.isfinite(v) for v in logs)
    for n in range(1, 5):
        assert logs[n] - logs[0] == pytest.approx(49 * math.log((0.5 - n * 1e-3) / 0.5),
                                                  rel=1e-12)


def test_analytic_non_positive_energy():
    with pytest.raises(NonPositiveEnergy):
        omega_bath_analytic(0.0, 0.1, BathSpec.degenerate(3, 1.0))


@pytest.mark.parametrize("N", [2, 3])
def test_analytic_converges_to_exact(N):
    bath = BathSpec.degenerate(N, 1.0)
    errors = []
    for ratio in (10**2, 10**3, 10**4):
        avail = ratio + 0.5
        exact = count_bath_states_exact(quantize_window(bath, avail, avail + 1.0))
        errors.append(abs(omega_bath_analytic(avail, 1.0, bath) / exact - 1))
    assert errors[0] > errors[1] > errors[2]


def test_pn_ratio_two_levels():
    system = SystemSpec((0.0, 0.1), (0.0, 1.0))
    table = pn_counting(system, BathSpec.degenerate(50, 1e-3), ShellWindow(0.5, 1e-5), 0.0)
    p0, p1 = table.probabilities()
    assert p1 / p0 == pytest.approx((0.4 / 0.5) ** 49, rel=1e-12)


def test_pn_single_level():
    table = pn_counting(SystemSpec((0.0,), (0.0,)), BathSpec.degenerate(5, 1.0),
                        ShellWindow(10.0, 1.0), 0.0, mode="exact")
    assert table.probabilities("exact") == [1.0]
    assert table.probabilities("analytic") == [1.0]


def test_pn_table_invariants_exact():
    system = SystemSpec.harmonic(1.0, 6)
    bath = BathSpec((1.0, 2.0, 2.0, 3.0), (0.1, 0.1, 0.2, 0.3), 1.0)
    table = pn_counting(system, bath, ShellWindow(12.5, 2.0), 0.0, mode="exact")
    assert table.total_exact == sum(r.exact for r in table.records)
    assert math.fsum(table.probabilities("exact")) == pytest.approx(1.0, abs=1e-12)
    assert math.fsum(table.probabilities("analytic")) == pytest.approx(1.0, abs=1e-12)
    assert all(0 <= p <= 1 for p in table.probabilities("exact"))
    for r in table.records:
        assert r.exact == len(brute_force_count((1, 2, 2, 3), math.ceil(12.5 - r.n),
                                                math.floor(14.5 - r.n)))


def test_pn_excludes_levels_without_bath_energy():
    system = SystemSpec.harmonic(1.0, 6)
    table = pn_counting(system, BathSpec.degenerate(3, 1.0), ShellWindow(3.0, 0.5), 0.0,
                        mode="exact")
    assert table.M_effective == 3
    assert [r.admissible for r in table.records] == [True] * 3 + [False] * 3
    assert table.probabilities("exact")[3:] == [0.0, 0.0, 0.0]


def test_pn_empty_shell():
    system = SystemSpec((5.0, 6.0), (0.0, 1.0))
    with pytest.raises(EmptyShell):
        pn_counting(system, BathSpec.degenerate(3, 1.0), ShellWindow(1.0, 0.5), 0.0)
    # admissible levels but windows between grid points
    with pytest.raises(EmptyShell):
        pn_counting(SystemSpec((0.0,), (0.0,)), BathSpec.degenerate(2, 1.0),
                    ShellWindow(3.2, 0.5), 0.0, mode="exact")


def test_exact_mode_requires_commensurate_frequencies():
    bath = BathSpec((1.0, math.sqrt(2)), (0.0, 0.0), 1.0)
    with pytest.raises(SpecError):
        pn_counting(SystemSpec.harmonic(1.0, 2), bath, ShellWindow(5.0, 1.0), 0.0, mode="exact")
    # analytic mode has no such restriction
    pn_counting(SystemSpec.harmonic(1.0, 2), bath, ShellWindow(5.0, 1.0), 0.0)


def test_exact_and_analytic_agree_for_low_levels():
    # finite-N offset: C(Q+4, 4) ~ (Q+2)**4 against Q**4, so the gap is O(omega/E)
    system = SystemSpec.harmonic(1.0, 6)
    bath = BathSpec.degenerate(5, 1.0)
    gaps = []
    for E in (40.0, 100.0, 400.0):
        table = pn_counting(system, bath, ShellWindow(E, 1.0), 0.0, mode="exact")
        gaps.append(max(abs(r.p_exact - r.p_analytic) for r in table.records[:3]))
    assert gaps[0] < 4e-3
    assert gaps[1] < 1e-3
    assert gaps[2] < gaps[1] / 10


def test_admissibility_override():
    system = SystemSpec.harmonic(1e-3, 10)
    shell = ShellWindow(0.5, 1e-5)
    default = admissible_levels(system, shell, 5e-4)
    strict = admissible_levels(system, shell, 5e-4, exclude_negative_deformed=True)
    assert default == list(range(10))
    assert strict == [0, 1, 2]


def test_pn_monotone_when_levels_increase():
    system = SystemSpec.harmonic(1e-3, 30)
    table = pn_counting(system, BathSpec.degenerate(50, 1e-3), ShellWindow(0.5, 1e-5), 5e-6)
    p = table.probabilities()
    assert all(b <= a for a, b in zip(p, p[1:]))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 80), st.floats(0.1, 10.0), st.integers(2, 12), st.floats(0.0, 1.0))
def test_conformal_invariance_bound(N, E, M, frac):
    omega = E / (4 * M)
    system = SystemSpec.harmonic(omega, M)
    lam_max = M - 1
    kappa = frac * 1e-3 * E / lam_max ** 2
    bath = BathSpec.degenerate(N, omega)
    shell = ShellWindow(E, 1e-6 * E)
    p0 = np.array(pn_counting(system, bath, shell, 0.0).probabilities())
    pk = np.array(pn_counting(system, bath, shell, kappa).probabilities())
    assert np.abs(pk - p0).max() <= 10 * kappa * lam_max ** 2 * (N - 1) / E + 1e-15


def test_deformation_map_linear_without_coupling():
    system = SystemSpec.harmonic(0.1, 5)
    rows = deformation_map(system, ShellWindow(1.0, 0.05), 0.0)
    lows = np.array([lo for _, lo, _ in rows])
    assert np.allclose(np.diff(lows), -0.1)


def test_deformation_map_convex_with_coupling():
    system = SystemSpec.harmonic(0.1, 8)
    kappa = 0.004
    rows = deformation_map(system, ShellWindow(1.0, 0.05), kappa)
    for n, lo, hi in rows:
        assert lo == pytest.approx(1.0 - 0.1 * n + kappa * n * n)
        assert hi - lo == pytest.approx(0.05)
    lows = np.array([lo for _, lo, _ in rows])
    assert np.allclose(np.diff(lows, 2), 2 * kappa)


def test_deformation_map_excludes_unreachable_levels():
    system = SystemSpec.harmonic(1.0, 6)
    rows = deformation_map(system, ShellWindow(2.0, 0.5), 0.0)
    assert [n for n, _, _ in rows] == [0, 1, 2]
    rows = deformation_map(system, ShellWindow(2.0, 1.5), 0.0)
    assert rows[-1] == (3, 0.0, 0.5)
