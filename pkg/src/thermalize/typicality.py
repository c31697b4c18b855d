"""Random pure universe states, their reduction to the system, and decoherence factors.

Universe basis states are ``|n> (x) prod_j D(alpha_jn)|n_j>``.  Bath states
attached to different system levels are displaced by different amounts, so
tracing out the bath in the undisplaced Fock basis produces coherences

    F_nm = sum_{a in block m} sum_{b in block n} C(n, b) C*(m, a) D_m(a)^n(b)

with ``D`` a product over modes of displaced Fock overlaps
``<a_j| D(alpha_jn - alpha_jm) |b_j>``.
"""
from __future__ import annotations

import math
import os
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .counting import (admissible_levels, count_bath_states_exact, enumerate_bath_states,
                       level_shell, pn_counting)
from .exceptions import CapExceeded, EmptyShell
from .model import BathSpec, ShellWindow, SystemSpec, deformed_spectrum

__all__ = [
    "DEFAULT_CAP",
    "UniverseState",
    "ReducedDensityMatrix",
    "DecoherenceFactor",
    "TypicalityReport",
    "laguerre_assoc",
    "displaced_overlap",
    "overlap_table",
    "decoherence_product",
    "shell_basis",
    "sample_universe_state",
    "reduce_density_matrix",
    "pn_typicality_check",
    "derive_seed",
    "splitmix64",
]

DEFAULT_CAP = 10**6
_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(seed: int, index: int) -> int:
    """Seed for the ``index``-th sample: ``splitmix64(seed XOR index)``."""
    return splitmix64((int(seed) ^ int(index)) & _MASK64)


def _max_workers() -> int:
    try:
        return max(1, int(os.environ.get("THERMALIZE_THREADS", "1")))
    except ValueError:
        return 1


def laguerre_assoc(n: int, k: int, x):
    """Associated Laguerre polynomial ``L_n^(k)(x)`` by upward recurrence in ``n``.

    ``x`` may be a scalar or an array.
    """
    if n < 0 or k < 0:
        raise ValueError("n and k must be non-negative")
    prev = np.ones_like(x, dtype=float) if isinstance(x, np.ndarray) else 1.0
    if n == 0:
        return prev
    cur = 1.0 + k - x
    for i in range(1, n):
        prev, cur = cur, ((2 * i + 1 + k - x) * cur - (i + k) * prev) / (i + 1)
    return cur


def _overlap_prefactor(hi: int, lo: int, delta: float) -> float:
    # delta**(hi-lo) * exp(-delta**2/2) * sqrt(lo!/hi!), in log space
    k = hi - lo
    if delta == 0.0:
        return 1.0 if k == 0 else 0.0
    sign = -1.0 if (delta < 0 and k % 2) else 1.0
    log = (k * math.log(abs(delta)) - 0.5 * delta * delta
           + 0.5 * (math.lgamma(lo + 1) - math.lgamma(hi + 1)))
    return sign * math.exp(log)


def displaced_overlap(m_j: int, n_j: int, delta_alpha: float) -> float:
    """Fock matrix element ``<m_j| D(delta_alpha) |n_j>`` for real displacement."""
    if m_j < 0 or n_j < 0:
        raise ValueError("occupations must be non-negative")
    if m_j < n_j:
        # <m|D(d)|n> = <n|D(-d)|m> for real d
        return displaced_overlap(n_j, m_j, -delta_alpha)
    pref = _overlap_prefactor(m_j, n_j, delta_alpha)
    if pref == 0.0:
        return 0.0
    return pref * laguerre_assoc(n_j, m_j - n_j, delta_alpha * delta_alpha)


@lru_cache(maxsize=256)
def overlap_table(size: int, delta_alpha: float) -> np.ndarray:
    """Matrix ``G[a, b] = <a| D(delta_alpha) |b>`` for ``a, b < size`` (read-only).

    Each diagonal offset ``k`` is one Laguerre recurrence run, so the whole
    table costs ``O(size**2)``.
    """
    G = np.zeros((size, size))
    x = delta_alpha * delta_alpha
    for k in range(size):
        parity = -1.0 if k % 2 else 1.0
        prev, cur = 0.0, 1.0
        for i in range(size - k):
            if i == 1:
                prev, cur = cur, 1.0 + k - x
            elif i > 1:
                prev, cur = cur, ((2 * i - 1 + k - x) * cur - (i - 1 + k) * prev) / i
            val = _overlap_prefactor(i + k, i, delta_alpha) * cur
            G[i + k, i] = val
            if k:
                G[i, i + k] = parity * val
    G.setflags(write=False)
    return G


@dataclass(frozen=True)
class DecoherenceFactor:
    factors: np.ndarray = field(repr=False)
    product: float

    @property
    def N(self) -> int:
        return len(self.factors)


def _relative_displacement(system: SystemSpec, bath: BathSpec, n: int, m: int) -> np.ndarray:
    # alpha_jn - alpha_jm = -g_j (lambda_n - lambda_m) / (2 omega_j)
    g = np.asarray(bath.strengths)
    w = np.asarray(bath.frequencies)
    return -g * (system.couplings[n] - system.couplings[m]) / (2.0 * w)


def decoherence_product(system: SystemSpec, bath: BathSpec, n: int, m: int,
                        occ_n: Sequence[int], occ_m: Sequence[int]) -> DecoherenceFactor:
    """Per-mode overlaps ``<occ_m[j](m)|occ_n[j](n)>`` and their product."""
    if len(occ_n) != bath.N or len(occ_m) != bath.N:
        raise ValueError("occupancy vectors must have one entry per bath mode")
    deltas = _relative_displacement(system, bath, n, m)
    d = np.array([displaced_overlap(int(a), int(b), float(dj))
                  for a, b, dj in zip(occ_m, occ_n, deltas)])
    return DecoherenceFactor(d, float(np.prod(d)))


@dataclass(frozen=True)
class UniverseState:
    """Amplitudes over the shell basis ``(n, occupancy)``."""

    basis: tuple[tuple[int, tuple[int, ...]], ...]
    amplitudes: np.ndarray = field(repr=False)
    seed: int | None = None

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def levels(self) -> np.ndarray:
        return np.fromiter((lvl for lvl, _ in self.basis), dtype=np.int64,
                           count=len(self.basis))

    def occupancies(self) -> np.ndarray:
        return np.array([occ for _, occ in self.basis], dtype=np.int64)


def shell_basis(system: SystemSpec, bath: BathSpec, shell: ShellWindow, kappa: float,
                cap: int = DEFAULT_CAP,
                exclude_negative_deformed: bool = False) -> tuple[tuple[int, tuple[int, ...]], ...]:
    """All universe basis labels in the shell, ordered by level then occupancy."""
    deformed = deformed_spectrum(system, kappa).levels
    levels = admissible_levels(system, shell, kappa, exclude_negative_deformed)
    shells = {n: level_shell(bath, shell, deformed[n]) for n in levels}
    total = sum(count_bath_states_exact(s) for s in shells.values())
    if total > cap:
        raise CapExceeded(total, cap)
    if total == 0:
        raise EmptyShell("the constrained subspace is empty")
    return tuple((n, occ) for n in levels for occ in enumerate_bath_states(shells[n], cap))


def _sphere_amplitudes(dim: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def sample_universe_state(system: SystemSpec, bath: BathSpec, shell: ShellWindow,
                          kappa: float, seed: int, cap: int = DEFAULT_CAP,
                          basis=None) -> UniverseState:
    """Draw a state uniformly from the unit sphere of the constrained subspace.

    ``basis`` may be passed in to skip re-enumerating the shell.
    """
    if basis is None:
        basis = shell_basis(system, bath, shell, kappa, cap)
    return UniverseState(tuple(basis), _sphere_amplitudes(len(basis), seed), seed)


@dataclass(frozen=True)
class ReducedDensityMatrix:
    matrix: np.ndarray = field(repr=False)

    @property
    def M(self) -> int:
        return self.matrix.shape[0]

    @property
    def populations(self) -> np.ndarray:
        return self.matrix.diagonal().real.copy()

    def coherence(self, n: int, m: int) -> complex:
        return complex(self.matrix[n, m])

    def max_coherence(self) -> float:
        off = self.matrix - np.diag(self.matrix.diagonal())
        return float(np.abs(off).max()) if self.M > 1 else 0.0

    def check(self, atol: float = 1e-12, psd_tol: float = 1e-10) -> dict:
        """Hermiticity, unit trace and positivity flags."""
        rho = self.matrix
        eig = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
        return {
            "hermitian": bool(np.allclose(rho, rho.conj().T, rtol=0, atol=atol)),
            "trace_one": abs(np.trace(rho) - 1.0) <= atol,
            "psd": bool(eig.min() >= -psd_tol),
        }

    def to_dict(self) -> dict:
        """Row-major ``[re, im]`` pairs."""
        return {"M": self.M,
                "matrix": [[float(z.real), float(z.imag)] for z in self.matrix.ravel()]}


def reduce_density_matrix(state: UniverseState, system: SystemSpec, bath: BathSpec,
                          kappa: float | None = None, chunk: int = 1024) -> ReducedDensityMatrix:
    """Trace the bath out of ``|psi><psi|``.

    ``kappa`` does not enter the reduction (the displacements depend on the
    strengths alone); it is accepted for call-site symmetry.
    """
    M = system.M
    C = np.asarray(state.amplitudes, dtype=complex)
    levels = state.levels()
    occ = state.occupancies()
    blocks = {n: np.flatnonzero(levels == n) for n in range(M)}
    size = int(occ.max()) + 1 if occ.size else 1

    rho = np.zeros((M, M), dtype=complex)
    for n in range(M):
        rho[n, n] = np.vdot(C[blocks[n]], C[blocks[n]]).real
    for n in range(M):
        bn = blocks[n]
        if not bn.size:
            continue
        for m in range(n + 1, M):
            bm = blocks[m]
            if not bm.size:
                continue
            deltas = _relative_displacement(system, bath, n, m)
            tables = [overlap_table(size, float(d)) for d in deltas]
            occ_n, occ_m = occ[bn], occ[bm]
            Cn, Cm = C[bn], C[bm]
            acc = 0j
            for start in range(0, bm.size, chunk):
                rows = slice(start, start + chunk)
                D = np.ones((occ_m[rows].shape[0], bn.size))
                for j, G in enumerate(tables):
                    D *= G[np.ix_(occ_m[rows, j], occ_n[:, j])]
                acc += np.conj(Cm[rows]) @ (D @ Cn)
            rho[n, m] = acc
            rho[m, n] = np.conj(acc)
    return ReducedDensityMatrix(rho)


@dataclass
class TypicalityReport:
    dimension: int
    reference: list[float]
    seeds: list[int]
    sampled: list[list[float]]
    deviations: list[float]
    coherences: list[float] | None = None

    @property
    def median_deviation(self) -> float:
        return float(statistics.median(self.deviations))

    def to_dict(self) -> dict:
        out = {
            "dimension": self.dimension,
            "reference": self.reference,
            "seeds": self.seeds,
            "sampled": self.sampled,
            "deviations": self.deviations,
            "median_deviation": self.median_deviation,
        }
        if self.coherences is not None:
            out["max_coherence"] = self.coherences
            out["mean_max_coherence"] = float(np.mean(self.coherences))
        return out


def pn_typicality_check(system: SystemSpec, bath: BathSpec, shell: ShellWindow,
                        kappa: float, seeds: Sequence[int], cap: int = DEFAULT_CAP,
                        coherences: bool = False) -> TypicalityReport:
    """Compare sampled populations with the counting ratio, one sample per seed.

    With ``coherences=True`` the full reduced matrix is built per seed and
    the largest ``|F_nm|`` is recorded as well.
    """
    basis = shell_basis(system, bath, shell, kappa, cap)
    table = pn_counting(system, bath, shell, kappa, mode="exact")
    reference = np.array(table.probabilities("exact"))
    levels = np.fromiter((lvl for lvl, _ in basis), dtype=np.int64, count=len(basis))

    def one(seed):
        amps = _sphere_amplitudes(len(basis), seed)
        pops = np.bincount(levels, weights=np.abs(amps) ** 2, minlength=system.M)
        coh = None
        if coherences:
            rdm = reduce_density_matrix(UniverseState(basis, amps, seed), system, bath, kappa)
            coh = rdm.max_coherence()
        return pops, float(np.abs(pops - reference).max()), coh

    seeds = [int(s) for s in seeds]
    workers = _max_workers()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(one, seeds))
    else:
        results = [one(s) for s in seeds]
    return TypicalityReport(
        dimension=len(basis),
        reference=reference.tolist(),
        seeds=seeds,
        sampled=[r[0].tolist() for r in results],
        deviations=[r[1] for r in results],
        coherences=[r[2] for r in results] if coherences else None,
    )
