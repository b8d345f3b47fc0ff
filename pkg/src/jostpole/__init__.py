"""Resonance doublets of a double-barrier potential and their exceptional point.

Poles of the s-wave S-matrix are found as complex zeros of an exact,
closed-form Jost function. Two of them can be tuned into a double zero by
adjusting the inner barrier thickness ``d`` and the outer-well level
``v3``; around that point the library builds the first-order unfolding and
tracks sections, pole trajectories and loop monodromy.
"""

from .potential import ControlPoint, FixedParams, PotentialProfile, default_fixed, default_profile, region_wave_number
from .jost import (
    ChainSingularity,
    DerivativePrecision,
    PoleOnAxis,
    jost_function,
    jost_k_derivatives,
    jost_param_derivatives,
    jost_values,
    log_deriv_chain,
    regular_solution,
    s_matrix,
    zero_threshold,
)
from .rootfind import (
    DerivativeVanishes,
    Doublet,
    IdentityAmbiguous,
    KWindow,
    NonConvergence,
    count_zeros,
    polish_zero,
    scan_window,
    track_doublet,
)
from .exceptional import ExceptionalPoint, SingularJacobian, locate_ep, verify_ep
from .unfolding import (
    SecondDerivativeTooSmall,
    UnfoldingCoefficients,
    XiPoint,
    branch_sqrt,
    compute_coefficients,
    contact_energy,
    contact_k,
    cut_lines,
)
from .analysis import doublet_near_ep, encircle, pole_trajectory, section, surface_scan

__version__ = "0.1.0"
