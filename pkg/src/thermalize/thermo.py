"""Temperatures and entropies extracted from level populations.

Covers Gibbs fits of ``ln P_n``, the level-dependent quasi-temperature,
overlap of neighbouring bath windows, and the two-level quasi-thermal state
with its small-coherence expansions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .counting import CountTable
from .exceptions import DegenerateFit, DegenerateGap, NonPositiveDenominator, SpecError
from .model import SystemSpec, deformed_spectrum

__all__ = [
    "GibbsFit",
    "TwoLevelState",
    "fit_beta",
    "quasi_temperature",
    "subspace_overlap",
    "two_level_exact",
    "two_level_approx",
    "gibbs_entropy",
    "thermodynamic_entropy",
    "entropy_derivative",
]


@dataclass(frozen=True)
class GibbsFit:
    beta: float
    intercept: float
    window: tuple[int, int]
    r_squared: float
    residuals: tuple[float, ...] = field(repr=False)

    def to_dict(self) -> dict:
        return {"beta": self.beta, "intercept": self.intercept,
                "window": list(self.window), "r_squared": self.r_squared,
                "residuals": list(self.residuals)}


def fit_beta(data, window: tuple[int, int] | None = None, energies: Sequence[float] | None = None,
             abscissa: str = "deformed") -> GibbsFit:
    """Least-squares fit of ``ln P_n = intercept - beta * energy_n``.

    ``data`` is either a :class:`CountTable` or a sequence of populations.
    For a table the abscissa is the deformed level energy by default
    (``abscissa="bare"`` uses the uncoupled ones); for a plain sequence pass
    ``energies``.  ``window`` is an inclusive level-index range; levels with
    zero population inside it are skipped.
    """
    if abscissa not in ("deformed", "bare"):
        raise ValueError("abscissa must be 'deformed' or 'bare'")
    if isinstance(data, CountTable):
        mode = data.metadata.get("mode", "analytic")
        probs = np.array(data.probabilities(mode))
        attr = "epsilon_kappa" if abscissa == "deformed" else "epsilon"
        x_all = np.array([getattr(r, attr) for r in data.records])
    else:
        if energies is None:
            raise ValueError("energies are required when fitting a bare sequence")
        probs = np.asarray(data, dtype=float)
        x_all = np.asarray(energies, dtype=float)
        if x_all.shape != probs.shape:
            raise ValueError("energies and populations differ in length")
    lo, hi = (0, len(probs) - 1) if window is None else (int(window[0]), int(window[1]))
    if lo < 0 or hi >= len(probs) or hi < lo:
        raise ValueError(f"window {lo}:{hi} outside 0:{len(probs) - 1}")
    idx = np.arange(lo, hi + 1)
    idx = idx[probs[idx] > 0]
    if idx.size < 3:
        raise DegenerateFit(f"need at least 3 populated levels in {lo}:{hi}, got {idx.size}")
    x = x_all[idx]
    y = np.log(probs[idx])
    xc = x - x.mean()
    sxx = float(xc @ xc)
    if sxx == 0.0 or np.ptp(x) <= 1e-15 * max(1.0, float(np.abs(x).max())):
        raise DegenerateFit("all level energies in the window are equal")
    slope = float(xc @ (y - y.mean())) / sxx
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (intercept + slope * x)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    ss_res = float(resid @ resid)
    r2 = 1.0 if ss_tot == 0.0 else min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return GibbsFit(-slope, intercept, (lo, hi), r2, tuple(resid.tolist()))


def quasi_temperature(bath_N: int, E: float, kappa: float, lambda_n: float) -> float:
    """Level-dependent inverse temperature ``(N - 1) / (E + kappa * lambda_n**2)``."""
    if bath_N < 2:
        raise SpecError("quasi-temperature needs N >= 2")
    denom = E + kappa * lambda_n * lambda_n
    if denom <= 0:
        raise NonPositiveDenominator(f"E + kappa*lambda^2 = {denom!r}")
    return (bath_N - 1) / denom


def subspace_overlap(system: SystemSpec, kappa: float, delta: float, n: int,
                     m: int) -> tuple[bool, float]:
    """Whether the bath windows of levels ``n`` and ``m`` intersect, and by how much.

    The windows are translates of one another, so they overlap exactly when
    the deformed levels are closer than the shell thickness.
    """
    eps = deformed_spectrum(system, kappa).levels
    gap = abs(eps[n] - eps[m])
    return gap < delta, max(0.0, delta - gap)


@dataclass(frozen=True)
class TwoLevelState:
    """Quasi-thermal qubit ``[[p_+, F], [F*, p_-]]`` with Gibbs diagonal."""

    beta: float
    delta: float
    F: complex = 0.0

    def __post_init__(self):
        if self.delta <= 0:
            raise SpecError("level gap must be positive")
        p_plus, p_minus = self.populations
        if abs(self.F) ** 2 > p_plus * p_minus:
            raise SpecError(f"|F|^2 = {abs(self.F)**2!r} exceeds p+ p- = {p_plus * p_minus!r}")

    @property
    def populations(self) -> tuple[float, float]:
        x = self.beta * self.delta
        # 1/(1+e^x) and 1/(1+e^-x) without overflow
        return 0.5 * (1 - math.tanh(x / 2)), 0.5 * (1 + math.tanh(x / 2))

    def matrix(self) -> np.ndarray:
        p_plus, p_minus = self.populations
        F = complex(self.F)
        return np.array([[p_plus, F], [F.conjugate(), p_minus]])


def gibbs_entropy(beta: float, delta: float) -> float:
    """Entropy of ``diag(p_+, p_-)``: ``x/(e^x + 1) + ln(e^-x + 1)`` with ``x = beta*delta``."""
    x = beta * delta
    return x / (math.exp(x) + 1) + math.log1p(math.exp(-x))


def _vn(values) -> float:
    return -math.fsum(p * math.log(p) for p in values if p > 0)


def two_level_exact(state: TwoLevelState) -> tuple[float, float, float, float]:
    """Exact ``(P_+, P_-, S_vn, beta_eff)`` from diagonalizing the 2x2 matrix.

    ``P_+`` is the eigenvalue continuous with ``p_+``; when ``p_+ < p_-`` it
    is the smaller one.  A negative ``beta_eff`` signals inversion and is
    returned as is.
    """
    p_plus, p_minus = state.populations
    half_gap = math.sqrt(0.25 * (p_minus - p_plus) ** 2 + abs(state.F) ** 2)
    lo, hi = 0.5 - half_gap, 0.5 + half_gap
    P_plus, P_minus = (lo, hi) if p_plus <= p_minus else (hi, lo)
    S = _vn((P_plus, P_minus))
    if P_plus <= 0 or P_minus <= 0:
        beta_eff = math.copysign(math.inf, P_minus - P_plus)
    else:
        beta_eff = -math.log(P_plus / P_minus) / state.delta
    return P_plus, P_minus, S, beta_eff


def two_level_approx(state: TwoLevelState) -> tuple[float, float, float, float, float]:
    """Leading-order small-``|F|`` expansions ``(P_+, P_-, S_vn, beta_eff, S_gibbs)``."""
    x = state.beta * state.delta
    if abs(x) < 1e-6:
        raise DegenerateGap(f"beta*delta = {x!r} is too small for the expansion")
    p_plus, p_minus = state.populations
    f2 = abs(state.F) ** 2
    coth = 1.0 / math.tanh(x / 2)
    S_gibbs = gibbs_entropy(state.beta, state.delta)
    return (
        p_plus - coth * f2,
        p_minus + coth * f2,
        S_gibbs - x * f2 * coth,
        state.beta + 4 * f2 / state.delta * math.cosh(x / 2) ** 2 * coth,
        S_gibbs,
    )


def thermodynamic_entropy(count: int | None = None, *, log_count: float | None = None) -> float:
    """``ln`` of a microstate count, exact for arbitrarily large integers."""
    if log_count is not None:
        if not math.isfinite(log_count):
            raise ValueError("log_count must be finite")
        return float(log_count)
    if count is None:
        raise ValueError("give a count or a log_count")
    if count < 1:
        raise ValueError("microstate count must be at least 1")
    return math.log(count)


def entropy_derivative(log_omega, E: float, rel_step: float = 1e-4) -> float:
    """Central finite difference of ``log_omega(E)``; an inverse temperature."""
    h = rel_step * E
    return (log_omega(E + h) - log_omega(E - h)) / (2 * h)
