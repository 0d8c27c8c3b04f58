"""cavityscat: Fourier-modal solver for TM/TE plane-wave scattering by
multi-layered rectangular cavities in a perfectly conducting ground plane.

The boundary value problem is reduced to a small dense linear system for the
aperture Fourier coefficients via a layer connection formula and a weakly
singular transparent boundary condition; see README.md for usage.
"""

from .assembly import (ApertureSolution, ApertureSystem, ModeLayout,
                       SystemFactorization, build_system, solve, solve_system)
from .errors import (CavityScatError, ConnectionResonanceError, ModalResonanceError,
                     OracleConvergenceError, SingularSystemError, SpecFileError,
                     UnsupportedPolarizationError, ValidationError)
from .modal import ModalTables, build_modal_tables
from .model import (Cavity, IncidentWave, Layer, ProblemSpec, QuadratureConfig,
                    kappa_from_material, load_spec, save_spec, validate)
from .postprocess import (FieldMap, RcsSweep, backscatter_sweep, diagonal_trace,
                          enhancement, field_at, field_grid, rcs_tm)
from .quadrature import SingularBlockCache, gauss_rule, singular_block

__version__ = "0.1.0"

__all__ = [
    "ApertureSolution", "ApertureSystem", "Cavity", "CavityScatError",
    "ConnectionResonanceError", "FieldMap", "IncidentWave", "Layer",
    "ModalResonanceError", "ModalTables", "ModeLayout", "OracleConvergenceError",
    "ProblemSpec", "QuadratureConfig", "RcsSweep", "SingularBlockCache",
    "SingularSystemError", "SpecFileError", "SystemFactorization",
    "UnsupportedPolarizationError", "ValidationError", "backscatter_sweep",
    "build_modal_tables", "build_system", "diagonal_trace", "enhancement",
    "field_at", "field_grid", "gauss_rule", "kappa_from_material", "load_spec",
    "rcs_tm", "save_spec", "singular_block", "solve", "solve_system", "validate",
]
