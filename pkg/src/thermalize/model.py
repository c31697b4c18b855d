"""System, bath and coupling data model for the dephasing universe.

The universe is an M-level system with energies ``eps_n`` coupled to N
oscillators through ``lambda_n |n><n| (g_j a_j^dag + h.c.)``.  Because the
coupling commutes with the system Hamiltonian the spectrum is known in
closed form: each level is shifted to ``eps_n - kappa * lambda_n**2`` and
the bath modes are displaced by ``alpha_jn = -lambda_n g_j / (2 omega_j)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import SpecError

__all__ = [
    "SystemSpec",
    "BathSpec",
    "CouplingSummary",
    "DeformedSpectrum",
    "ShellWindow",
    "kappa_of",
    "coupling_summary",
    "deformed_spectrum",
    "level_spacing_effective",
]

_COMMENSURATE_RTOL = 1e-12


def _as_float_tuple(values, name):
    try:
        out = tuple(float(v) for v in values)
    except TypeError as exc:
        raise SpecError(f"{name} must be a sequence of numbers") from exc
    if not all(math.isfinite(v) for v in out):
        raise SpecError(f"{name} must be finite")
    return out


@dataclass(frozen=True)
class SystemSpec:
    """An M-level system: bare energies and coupling weights, indexed from 0."""

    energies: tuple[float, ...]
    couplings: tuple[float, ...]

    def __post_init__(self):
        energies = _as_float_tuple(self.energies, "energies")
        couplings = _as_float_tuple(self.couplings, "couplings")
        if len(energies) < 1:
            raise SpecError("system needs at least one level")
        if len(couplings) != len(energies):
            raise SpecError(
                f"couplings has length {len(couplings)}, energies has {len(energies)}"
            )
        if any(b < a for a, b in zip(energies, energies[1:])):
            raise SpecError("energies must be non-decreasing")
        object.__setattr__(self, "energies", energies)
        object.__setattr__(self, "couplings", couplings)

    @classmethod
    def harmonic(cls, omega: float, M: int) -> "SystemSpec":
        """Truncated oscillator: ``eps_n = n * omega`` and ``lambda_n = n``."""
        if M < 1:
            raise SpecError("M must be >= 1")
        return cls(tuple(n * omega for n in range(M)), tuple(float(n) for n in range(M)))

    @property
    def M(self) -> int:
        return len(self.energies)


@dataclass(frozen=True)
class BathSpec:
    """N oscillator modes with frequencies, coupling strengths and a counting unit.

    ``quantum_unit`` is only needed for exact counting; every frequency must
    then be an integer multiple of it.
    """

    frequencies: tuple[float, ...]
    strengths: tuple[float, ...]
    quantum_unit: float | None = None

    def __post_init__(self):
        freqs = _as_float_tuple(self.frequencies, "frequencies")
        strengths = _as_float_tuple(self.strengths, "strengths")
        if len(freqs) < 1:
            raise SpecError("bath needs at least one mode")
        if len(strengths) != len(freqs):
            raise SpecError(
                f"strengths has length {len(strengths)}, frequencies has {len(freqs)}"
            )
        if any(w <= 0 for w in freqs):
            raise SpecError("all bath frequencies must be positive")
        if self.quantum_unit is not None:
            u = float(self.quantum_unit)
            if not (math.isfinite(u) and u > 0):
                raise SpecError("quantum_unit must be positive")
            object.__setattr__(self, "quantum_unit", u)
        object.__setattr__(self, "frequencies", freqs)
        object.__setattr__(self, "strengths", strengths)

    @classmethod
    def degenerate(cls, N: int, omega: float, strength: float = 0.0,
                   quantum_unit: float | None = None) -> "BathSpec":
        return cls((omega,) * N, (strength,) * N,
                   omega if quantum_unit is None else quantum_unit)

    @property
    def N(self) -> int:
        return len(self.frequencies)

    def weights(self) -> tuple[int, ...]:
        """Integer frequencies ``omega_j / u`` used by exact counting."""
        u = self.quantum_unit
        if u is None:
            raise SpecError("exact counting needs a quantum_unit")
        out = []
        for w in self.frequencies:
            ratio = w / u
            k = round(ratio)
            if k < 1 or abs(ratio - k) > _COMMENSURATE_RTOL * max(1.0, abs(ratio)):
                raise SpecError(
                    f"frequency {w!r} is not a positive integer multiple of unit {u!r}"
                )
            out.append(int(k))
        return tuple(out)

    def scaled(self, factor: float) -> "BathSpec":
        """Copy with every strength multiplied by ``factor``."""
        return BathSpec(self.frequencies, tuple(g * factor for g in self.strengths),
                        self.quantum_unit)


@dataclass(frozen=True)
class CouplingSummary:
    kappa: float
    displacements: np.ndarray = field(repr=False)  # shape (M, N): alpha[n, j]

    def relative_displacement(self, n: int, m: int) -> np.ndarray:
        """Per-mode ``alpha_jn - alpha_jm``."""
        return self.displacements[n] - self.displacements[m]


@dataclass(frozen=True)
class DeformedSpectrum:
    levels: tuple[float, ...]

    def __len__(self):
        return len(self.levels)

    def __getitem__(self, n):
        return self.levels[n]


@dataclass(frozen=True)
class ShellWindow:
    """Total-energy window ``[E, E + delta]``."""

    E: float
    delta: float

    def __post_init__(self):
        E, delta = float(self.E), float(self.delta)
        if not (math.isfinite(E) and math.isfinite(delta)):
            raise SpecError("shell bounds must be finite")
        if delta <= 0:
            raise SpecError("shell thickness delta must be positive")
        if E < 0:
            raise SpecError("shell energy E must be non-negative")
        object.__setattr__(self, "E", E)
        object.__setattr__(self, "delta", delta)


def kappa_of(bath: BathSpec) -> float:
    return math.fsum(g * g / (4.0 * w) for g, w in zip(bath.strengths, bath.frequencies))


def coupling_summary(system: SystemSpec, bath: BathSpec) -> CouplingSummary:
    """Interaction strength ``kappa`` and the displacement matrix ``alpha[n, j]``."""
    lam = np.asarray(system.couplings, dtype=float)
    g = np.asarray(bath.strengths, dtype=float)
    w = np.asarray(bath.frequencies, dtype=float)
    alpha = -np.outer(lam, g / (2.0 * w))
    alpha.setflags(write=False)
    return CouplingSummary(kappa_of(bath), alpha)


def deformed_spectrum(system: SystemSpec, kappa: float) -> DeformedSpectrum:
    if kappa < 0:
        raise SpecError("kappa must be non-negative")
    if kappa == 0:
        return DeformedSpectrum(system.energies)
    return DeformedSpectrum(tuple(
        e - kappa * lam * lam for e, lam in zip(system.energies, system.couplings)
    ))


def level_spacing_effective(system: SystemSpec, kappa: float, n: int) -> float:
    """Gap between deformed levels ``n + 1`` and ``n``; may be negative."""
    if not 0 <= n < system.M - 1:
        raise IndexError(f"level index {n} out of range for M={system.M}")
    e, lam = system.energies, system.couplings
    return (e[n + 1] - e[n]) - kappa * (lam[n + 1] ** 2 - lam[n] ** 2)

