"""Bath microstate counting in deformed energy shells.

For system level ``n`` the bath must carry an energy in
``[E - eps_n(kappa), E + delta - eps_n(kappa)]``.  Exact counts are done on
the integer grid ``omega_j = k_j * u`` with arbitrary-precision integers;
analytic counts use the small-shell volume formula
``E_avail**(N-1) * delta / ((N-1)! * prod(omega_j))``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Literal

from .exceptions import CapExceeded, EmptyShell, NonPositiveEnergy, SpecError
from .model import BathSpec, ShellWindow, SystemSpec, deformed_spectrum

__all__ = [
    "QuantizedShell",
    "LevelCount",
    "CountTable",
    "quantize_window",
    "level_shell",
    "admissible_levels",
    "count_bath_states_exact",
    "enumerate_bath_states",
    "omega_bath_analytic",
    "log_omega_bath_analytic",
    "pn_counting",
    "deformation_map",
]

# grid snapping tolerance, relative to the quantized value
_SNAP = 1e-9


@dataclass(frozen=True)
class QuantizedShell:
    """Integer form of one bath window: ``sum_j n_j k_j`` in ``[max(lo, 0), hi]``."""

    weights: tuple[int, ...]
    lo: int
    hi: int
    unit: float = 1.0

    def __post_init__(self):
        weights = tuple(int(k) for k in self.weights)
        if not weights:
            raise SpecError("shell needs at least one mode")
        if any(k < 1 for k in weights):
            raise SpecError("mode weights must be positive integers")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "lo", int(self.lo))
        object.__setattr__(self, "hi", int(self.hi))

    @property
    def floor(self) -> int:
        return max(self.lo, 0)

    @property
    def empty(self) -> bool:
        return self.hi < self.floor


def _snap(x: float) -> float:
    r = round(x)
    if abs(x - r) <= _SNAP * max(1.0, abs(x)):
        return float(r)
    return x


def quantize_window(bath: BathSpec, e_lo: float, e_hi: float) -> QuantizedShell:
    """Quantize the bath-energy interval ``[e_lo, e_hi]`` onto the bath's grid."""
    u = bath.quantum_unit
    weights = bath.weights()
    lo = math.ceil(_snap(e_lo / u))
    hi = math.floor(_snap(e_hi / u))
    return QuantizedShell(weights, lo, hi, u)


def admissible_levels(system: SystemSpec, shell: ShellWindow, kappa: float,
                      exclude_negative_deformed: bool = False) -> list[int]:
    """Levels entering the shell sum.

    A level counts when its available bath energy ``E - eps_n(kappa)`` is
    positive and its bare energy is non-negative.  With
    ``exclude_negative_deformed`` levels whose deformed energy dropped below
    zero are also removed.
    """
    deformed = deformed_spectrum(system, kappa)
    out = []
    for n, (bare, eps) in enumerate(zip(system.energies, deformed.levels)):
        if shell.E - eps <= 0 or bare < 0:
            continue
        if exclude_negative_deformed and eps < 0:
            continue
        out.append(n)
    return out


def level_shell(bath: BathSpec, shell: ShellWindow, eps_kappa: float) -> QuantizedShell:
    return quantize_window(bath, shell.E - eps_kappa, shell.E + shell.delta - eps_kappa)


def _degenerate_count(N: int, k: int, lo: int, hi: int) -> int:
    # sum_{t=a..b} C(t+N-1, N-1) = C(b+N, N) - C(a+N-1, N)
    a = -(-lo // k)
    b = hi // k
    if b < a:
        return 0
    return math.comb(b + N, N) - (math.comb(a + N - 1, N) if a > 0 else 0)


def _quanta_table(weights: tuple[int, ...], hi: int) -> list[int]:
    """Number of occupancy vectors with exactly ``s`` total quanta, s = 0..hi."""
    dp = [0] * (hi + 1)
    dp[0] = 1
    for k in weights:
        # unbounded knapsack step for one mode: ways[s] += ways[s - k]
        for s in range(k, hi + 1):
            if dp[s - k]:
                dp[s] += dp[s - k]
    return dp


def count_bath_states_exact(shell: QuantizedShell) -> int:
    """Exact number of ``(n_1..n_N) >= 0`` with ``sum n_j k_j`` in the window."""
    lo, hi = shell.floor, shell.hi
    if hi < lo:
        return 0
    weights = shell.weights
    if len(set(weights)) == 1:
        return _degenerate_count(len(weights), weights[0], lo, hi)
    dp = _quanta_table(weights, hi)
    return sum(dp[lo:hi + 1])


def _iter_states(weights, lo, hi) -> Iterator[tuple[int, ...]]:
    N = len(weights)
    occ = [0] * N

    def rec(j, used):
        k = weights[j]
        if j == N - 1:
            start = max(0, -(-(lo - used) // k))
            for n in range(start, (hi - used) // k + 1):
                occ[j] = n
                yield tuple(occ)
            return
        for n in range((hi - used) // k + 1):
            occ[j] = n
            yield from rec(j + 1, used + n * k)

    yield from rec(0, 0)


def enumerate_bath_states(shell: QuantizedShell, cap: int) -> list[tuple[int, ...]]:
    """All occupancy vectors in the window, in lexicographic order.

    Raises :class:`CapExceeded` before doing any work if the exact count is
    above ``cap``.
    """
    count = count_bath_states_exact(shell)
    if count > cap:
        raise CapExceeded(count, cap)
    if count == 0:
        return []
    return list(_iter_states(shell.weights, shell.floor, shell.hi))


def log_omega_bath_analytic(E_avail: float, delta: float, bath: BathSpec) -> float:
    """Natural log of the analytic bath count."""
    if E_avail <= 0:
        raise NonPositiveEnergy(f"available bath energy {E_avail!r} is not positive")
    if delta <= 0:
        raise SpecError("delta must be positive")
    N = bath.N
    return ((N - 1) * math.log(E_avail) + math.log(delta) - math.lgamma(N)
            - math.fsum(math.log(w) for w in bath.frequencies))


def omega_bath_analytic(E_avail: float, delta: float, bath: BathSpec) -> float:
    return math.exp(log_omega_bath_analytic(E_avail, delta, bath))


@dataclass(frozen=True)
class LevelCount:
    n: int
    epsilon: float
    epsilon_kappa: float
    admissible: bool
    exact: int | None = None
    log_analytic: float | None = None
    p_exact: float | None = None
    p_analytic: float | None = None

    @property
    def analytic(self) -> float | None:
        if self.log_analytic is None:
            return None
        return math.exp(self.log_analytic)


@dataclass(frozen=True)
class CountTable:
    """Per-level bath counts and the resulting level populations."""

    records: tuple[LevelCount, ...]
    total_exact: int | None
    log_total_analytic: float | None
    metadata: dict = field(default_factory=dict)

    COLUMNS = ("n", "epsilon_n", "epsilon_n_kappa", "omega_exact",
               "omega_analytic_log", "p_exact", "p_analytic")

    @property
    def M_effective(self) -> int:
        return sum(r.admissible for r in self.records)

    def levels(self) -> list[int]:
        return [r.n for r in self.records]

    def probabilities(self, mode: str = "analytic") -> list[float]:
        attr = "p_exact" if mode == "exact" else "p_analytic"
        return [getattr(r, attr) or 0.0 for r in self.records]

    def rows(self) -> list[dict]:
        return [
            {
                "n": r.n,
                "epsilon_n": r.epsilon,
                "epsilon_n_kappa": r.epsilon_kappa,
                "omega_exact": r.exact,
                "omega_analytic_log": r.log_analytic,
                "p_exact": r.p_exact,
                "p_analytic": r.p_analytic,
            }
            for r in self.records
        ]

    def to_dict(self) -> dict:
        return {
            "metadata": dict(self.metadata),
            "totals": {
                "omega_exact": self.total_exact,
                "omega_analytic_log": self.log_total_analytic,
            },
            "levels": self.rows(),
        }


def _logsumexp(values: list[float]) -> float:
    top = max(values)
    return top + math.log(math.fsum(math.exp(v - top) for v in values))


def pn_counting(system: SystemSpec, bath: BathSpec, shell: ShellWindow, kappa: float,
                mode: Literal["exact", "analytic"] = "analytic",
                exclude_negative_deformed: bool = False) -> CountTable:
    """Level populations ``P_n = Omega_N(n) / sum_m Omega_N(m)``.

    ``mode="exact"`` also fills the big-integer counts and ``p_exact``;
    analytic columns are always filled.
    """
    if mode not in ("exact", "analytic"):
        raise SpecError(f"unknown counting mode {mode!r}")
    if mode == "analytic" and bath.N < 2:
        raise SpecError("analytic counting needs N >= 2")
    deformed = deformed_spectrum(system, kappa).levels
    included = set(admissible_levels(system, shell, kappa, exclude_negative_deformed))

    exact: dict[int, int] = {}
    logs: dict[int, float] = {}
    for n in sorted(included):
        avail = shell.E - deformed[n]
        logs[n] = log_omega_bath_analytic(avail, shell.delta, bath)
        if mode == "exact":
            exact[n] = count_bath_states_exact(level_shell(bath, shell, deformed[n]))

    if not included:
        raise EmptyShell("no level has positive available bath energy")
    total_exact = None
    if mode == "exact":
        total_exact = sum(exact.values())
        if total_exact == 0:
            raise EmptyShell("exact count of the shell is zero")
    log_total = _logsumexp([logs[n] for n in sorted(logs)])

    records = []
    for n in range(system.M):
        if n in included:
            records.append(LevelCount(
                n, system.energies[n], deformed[n], True,
                exact=exact.get(n),
                log_analytic=logs[n],
                p_exact=exact[n] / total_exact if total_exact else None,
                p_analytic=math.exp(logs[n] - log_total),
            ))
        else:
            records.append(LevelCount(
                n, system.energies[n], deformed[n], False,
                exact=0 if mode == "exact" else None,
                p_exact=0.0 if mode == "exact" else None,
                p_analytic=0.0,
            ))
    metadata = {
        "E": shell.E, "delta": shell.delta, "kappa": kappa, "N": bath.N,
        "M": system.M, "M_effective": len(included), "mode": mode,
    }
    return CountTable(tuple(records), total_exact, log_total, metadata)


def deformation_map(system: SystemSpec, shell: ShellWindow,
                    kappa: float) -> list[tuple[int, float, float]]:
    """Bath-energy band ``(n, lo, hi)`` for every level whose window reaches 0."""
    out = []
    for n, eps in enumerate(deformed_spectrum(system, kappa).levels):
        hi = shell.E + shell.delta - eps
        if hi < 0:
            continue
        out.append((n, max(shell.E - eps, 0.0), hi))
    return out
