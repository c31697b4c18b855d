"""Kinematic thermalization of a dephasing system coupled to a finite oscillator bath.

Exact and analytic microstate counting in deformed energy shells, random
pure-state typicality with exact decoherence factors, and temperature and
entropy extraction from the resulting system states.
"""
__version__ = "0.1.0"

from .exceptions import (CapExceeded, ConfigError, DegenerateFit, DegenerateGap, EmptyShell,
                         NonPositiveDenominator, NonPositiveEnergy, SpecError, ThermalizeError)
from .model import (BathSpec, CouplingSummary, DeformedSpectrum, ShellWindow, SystemSpec,
                    coupling_summary, deformed_spectrum, kappa_of, level_spacing_effective)
from .counting import (CountTable, LevelCount, QuantizedShell, admissible_levels,
                       count_bath_states_exact, deformation_map, enumerate_bath_states,
                       level_shell, log_omega_bath_analytic, omega_bath_analytic, pn_counting,
                       quantize_window)
from .typicality import (DecoherenceFactor, ReducedDensityMatrix, TypicalityReport,
                         UniverseState, decoherence_product, derive_seed, displaced_overlap,
                         laguerre_assoc, overlap_table, pn_typicality_check,
                         reduce_density_matrix, sample_universe_state, shell_basis)
from .thermo import (GibbsFit, TwoLevelState, entropy_derivative, fit_beta, gibbs_entropy,
                     quasi_temperature, subspace_overlap, thermodynamic_entropy,
                     two_level_approx, two_level_exact)
