import cmath
import math

import numpy as np
import pytest

from thermalize import (DegenerateFit, DegenerateGap, NonPositiveDenominator, SpecError,
                        SystemSpec, TwoLevelState, entropy_derivative, fit_beta, gibbs_entropy,
                        log_omega_bath_analytic, pn_counting, quasi_temperature,
                        subspace_overlap, thermodynamic_entropy, two_level_approx,
                        two_level_exact)
from thermalize.experiments import reference_setup


# ---------------------------------------------------------------- Gibbs fits

def test_fit_exact_gibbs_data():
    eps = np.linspace(0, 0.03, 31)
    p = np.exp(-98 * eps)
    p /= p.sum()
    fit = fit_beta(p, energies=eps)
    assert fit.beta == pytest.approx(98.0, abs=1e-9)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    assert max(abs(r) for r in fit.residuals) < 1e-10


def test_fit_window_and_zero_populations():
    eps = np.arange(8) * 0.1
    p = np.exp(-3 * eps)
    p[5:] = 0.0
    fit = fit_beta(p, window=(1, 7), energies=eps)
    assert fit.window == (1, 7)
    assert len(fit.residuals) == 4
    assert fit.beta == pytest.approx(3.0)


def test_fit_degenerate_inputs():
    with pytest.raises(DegenerateFit):
        fit_beta([0.5, 0.3, 0.2], energies=[1.0, 1.0, 1.0])
    with pytest.raises(DegenerateFit):
        fit_beta([0.5, 0.5, 0.0, 0.0], energies=[0, 1, 2, 3])
    with pytest.raises(ValueError):
        fit_beta([0.5, 0.5], window=(0, 4), energies=[0, 1])


def test_fit_harmonic_weak_coupling_near_theory():
    system, bath, shell = reference_setup()
    table = pn_counting(system, bath, shell, 5e-6)
    for window in ((0, 5), (0, 10), (2, 8)):
        assert fit_beta(table, window).beta == pytest.approx(98.0, rel=0.02)


def test_fit_harmonic_beta_drops_with_coupling():
    system, bath, shell = reference_setup()
    betas = [fit_beta(pn_counting(system, bath, shell, k), (1, 3)).beta
             for k in (5e-6, 5e-5, 5e-4)]
    assert betas[0] > betas[1] > betas[2]


def test_fit_bare_abscissa():
    system, bath, shell = reference_setup(M=11)
    table = pn_counting(system, bath, shell, 0.0)
    assert fit_beta(table, abscissa="bare").beta == fit_beta(table).beta
    with pytest.raises(ValueError):
        fit_beta(table, abscissa="other")


# ---------------------------------------------------------------- quasi-temperature

def test_quasi_temperature_examples():
    assert quasi_temperature(50, 0.5, 0.0, 7.0) == pytest.approx(98.0)
    assert quasi_temperature(50, 0.5, 3.0, 0.0) == pytest.approx(98.0)
    assert quasi_temperature(50, 0.5, 5e-4, 10.0) == pytest.approx(49 / 0.55)


def test_quasi_temperature_errors():
    with pytest.raises(NonPositiveDenominator):
        quasi_temperature(50, 0.0, 0.0, 1.0)
    with pytest.raises(SpecError):
        quasi_temperature(1, 0.5, 0.0, 1.0)


# ---------------------------------------------------------------- subspace overlap

def test_subspace_overlap_examples():
    system = SystemSpec.harmonic(1e-3, 4)
    assert subspace_overlap(system, 0.0, 5e-4, 0, 1) == (False, 0.0)
    assert subspace_overlap(system, 0.0, 5e-4, 2, 2) == (True, 5e-4)
    assert subspace_overlap(system, 4.9e-4, 5e-5, 0, 1)[0] is False
    hit, width = subspace_overlap(system, 9.8e-4, 5e-5, 0, 1)
    assert hit and width == pytest.approx(3e-5)


def test_subspace_overlap_symmetric():
    system = SystemSpec((0.0, 0.3, 0.5, 1.2), (0.0, 1.0, -2.0, 1.5))
    for kappa in (0.0, 0.01, 0.1):
        for n in range(4):
            for m in range(4):
                assert (subspace_overlap(system, kappa, 0.2, n, m)
                        == subspace_overlap(system, kappa, 0.2, m, n))


# ---------------------------------------------------------------- two-level state

def test_two_level_state_validation():
    with pytest.raises(SpecError):
        TwoLevelState(1.0, 1.0, 0.5)
    with pytest.raises(SpecError):
        TwoLevelState(1.0, 0.0, 0.0)
    p_plus, p_minus = TwoLevelState(1.0, 1.0).populations
    assert p_plus == pytest.approx(1 / (1 + math.e))
    assert p_plus + p_minus == pytest.approx(1.0, abs=1e-15)
    # no overflow for huge beta*delta
    assert TwoLevelState(1e4, 1.0).populations == (0.0, 1.0)


def test_two_level_diagonal_case():
    state = TwoLevelState(1.3, 0.7)
    P_plus, P_minus, S, beta_eff = two_level_exact(state)
    p_plus, p_minus = state.populations
    assert (P_plus, P_minus) == pytest.approx((p_plus, p_minus), abs=1e-15)
    assert S == pytest.approx(gibbs_entropy(1.3, 0.7), rel=1e-12)
    assert beta_eff == pytest.approx(1.3, rel=1e-12)
    approx = two_level_approx(state)
    assert approx[:4] == pytest.approx((p_plus, p_minus, approx[4], 1.3), rel=1e-14)


def test_two_level_infinite_temperature():
    state = TwoLevelState(0.0, 1.0, 0.3)
    P_plus, P_minus, _, _ = two_level_exact(state)
    assert sorted((P_plus, P_minus)) == pytest.approx([0.2, 0.8])
    with pytest.raises(DegenerateGap):
        two_level_approx(state)


def test_two_level_exact_matches_eigvalsh():
    state = TwoLevelState(0.8, 1.4, 0.1 + 0.07j)
    P_plus, P_minus, S, _ = two_level_exact(state)
    vals = np.linalg.eigvalsh(state.matrix())
    assert sorted((P_plus, P_minus)) == pytest.approx(vals, abs=1e-14)
    assert P_plus + P_minus == pytest.approx(1.0, abs=1e-15)
    assert S == pytest.approx(-sum(v * math.log(v) for v in vals), abs=1e-14)


def test_two_level_phase_invariance():
    base = two_level_exact(TwoLevelState(1.0, 1.0, 0.08))
    for phi in (0.3, 1.7, math.pi):
        rotated = two_level_exact(TwoLevelState(1.0, 1.0, 0.08 * cmath.exp(1j * phi)))
        assert rotated == pytest.approx(base, rel=1e-14)


def test_effective_beta_example():
    state = TwoLevelState(1.0, 1.0, 0.05)
    expected = 1 + 0.01 * math.cosh(0.5) ** 2 / math.tanh(0.5)
    assert two_level_approx(state)[3] == pytest.approx(expected, rel=1e-14)
    assert expected == pytest.approx(1.0275, abs=1e-4)
    assert two_level_exact(state)[3] == pytest.approx(expected, abs=0.05 ** 4 * 100)


@pytest.mark.parametrize("beta, delta", [(0.5, 0.5), (1.0, 1.0), (2.0, 0.5)])
def test_expansion_error_is_quartic(beta, delta):
    grid = (0.05, 0.025, 0.0125)
    errs = []
    for F in grid:
        state = TwoLevelState(beta, delta, F)
        exact, approx = two_level_exact(state), two_level_approx(state)
        errs.append([abs(e - a) for e, a in zip(exact, approx[:4])])
    for coarse, fine in zip(errs, errs[1:]):
        for a, b in zip(coarse, fine):
            assert 8 <= a / b <= 32
    # c fitted from the coarsest point bounds all the finer ones
    for k in range(4):
        c = errs[0][k] / grid[0] ** 4
        assert all(errs[i][k] <= 1.5 * c * grid[i] ** 4 for i in range(3))


def test_effective_beta_exceeds_beta():
    for beta in (0.3, 1.0, 4.0):
        for F in (1e-3, 0.02, 0.1):
            state = TwoLevelState(beta, 1.0, F)
            if abs(F) ** 2 <= 0.9 * math.prod(state.populations):
                assert two_level_approx(state)[3] > beta
                assert two_level_exact(state)[3] > beta


def test_coherence_lowers_entropy():
    for beta in np.linspace(0.1, 5, 9):
        for delta in np.linspace(0.1, 5, 9):
            p = TwoLevelState(beta, delta).populations
            bound = math.sqrt(0.9 * p[0] * p[1])
            for F in np.linspace(bound / 10, bound, 5):
                S = two_level_exact(TwoLevelState(beta, delta, F))[2]
                assert S <= gibbs_entropy(beta, delta)


# ---------------------------------------------------------------- entropy

def test_entropy_of_single_state():
    assert thermodynamic_entropy(1) == 0.0
    assert thermodynamic_entropy(log_count=3.5) == 3.5
    with pytest.raises(ValueError):
        thermodynamic_entropy(0)
    with pytest.raises(ValueError):
        thermodynamic_entropy(log_count=math.inf)


def test_entropy_big_integer():
    count = math.comb(549, 49)
    via_gamma = math.lgamma(550) - math.lgamma(50) - math.lgamma(501)
    assert thermodynamic_entropy(count) == pytest.approx(via_gamma, rel=1e-10)
    assert thermodynamic_entropy(10 ** 400) == pytest.approx(400 * math.log(10), rel=1e-14)


def test_entropy_derivative_is_inverse_temperature():
    _, bath, shell = reference_setup()
    beta = entropy_derivative(lambda e: log_omega_bath_analytic(e, shell.delta, bath), 0.5)
    assert beta == pytest.approx(quasi_temperature(50, 0.5, 5e-4, 0.0), rel=5e-3)
