"""Linear stability of photo-thermal bioconvection in a porous layer.

The package computes the quiescent basic state of a phototactic cell
suspension heated and illuminated from above, the growth-rate spectrum of
its linear perturbations in a Darcy-Brinkman porous medium, neutral
stability curves R(k), and critical Rayleigh numbers for rigid-free and
rigid-rigid boundaries.
"""

from .errors import (
    BiostabError,
    ConfigError,
    ConvergenceError,
    EigensolverError,
    KRangeError,
    NoNeutralPointError,
)
from .model import (
    PhototaxisModel,
    SuspensionParams,
    calibrate_beta,
    d2taxis_dG2,
    dtaxis_dG,
    light_field,
    taxis,
    xi,
)
from .neutral import (
    CriticalPoint,
    NeutralCurve,
    SweepResult,
    SweepRow,
    default_k_grid,
    find_critical,
    sweep,
    trace_branch,
)
from .stability import (
    ModeProblem,
    NeutralPoint,
    Spectrum,
    assemble_operators,
    growth_spectrum,
    refine_nrk,
    solve_neutral_R,
)
from .steady import BasicState, aleph_coefficients, solve_basic_state

__version__ = "1.0.0"

__all__ = [
    "BasicState",
    "BiostabError",
    "ConfigError",
    "ConvergenceError",
    "CriticalPoint",
    "EigensolverError",
    "KRangeError",
    "ModeProblem",
    "NeutralCurve",
    "NeutralPoint",
    "NoNeutralPointError",
    "PhototaxisModel",
    "Spectrum",
    "SuspensionParams",
    "SweepResult",
    "SweepRow",
    "aleph_coefficients",
    "assemble_operators",
    "calibrate_beta",
    "d2taxis_dG2",
    "default_k_grid",
    "dtaxis_dG",
    "find_critical",
    "growth_spectrum",
    "light_field",
    "refine_nrk",
    "solve_basic_state",
    "solve_neutral_R",
    "sweep",
    "taxis",
    "trace_branch",
    "xi",
]
