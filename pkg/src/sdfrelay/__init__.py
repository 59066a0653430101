"""Outage probability and spatial-contention diversity of selection
decode-and-forward relaying in a Poisson field of interferers."""

__version__ = "0.1.0"

from .analytic import (OutageBreakdown, QuadratureSettings, outage_rayleigh, psi, q_bc_rayleigh,
                       q_mac_rayleigh, q_norelay_rayleigh, small_lambda_coefficients)
from .bounds import (nearest_interferer_equivalence, q_bc_asymptotic_pathloss_only,
                     q_bc_lower_bound_fading_marks, q_bc_lower_bound_pathloss_only, tightness_diagnostic)
from .diversity import estimate_scdo, fit_loglog_slope, verify_theorem_table
from .errors import DomainError, QuadratureError, ZeroOutageError
from .geometry import dominant_regions, lens_area, path_loss
from .model import FadingSpec, NetworkConfig, NodeLayout
from .montecarlo import SimulationParams, estimate_outage
from .optimizer import optimize_relay_line, sweep_alpha_curve

__all__ = [
    "DomainError", "FadingSpec", "NetworkConfig", "NodeLayout", "OutageBreakdown", "QuadratureError",
    "QuadratureSettings", "SimulationParams", "ZeroOutageError", "dominant_regions", "estimate_outage",
    "estimate_scdo", "fit_loglog_slope", "lens_area", "nearest_interferer_equivalence",
    "optimize_relay_line", "outage_rayleigh", "path_loss", "psi", "q_bc_asymptotic_pathloss_only",
    "q_bc_lower_bound_fading_marks", "q_bc_lower_bound_pathloss_only", "q_bc_rayleigh",
    "q_mac_rayleigh", "q_norelay_rayleigh", "small_lambda_coefficients", "sweep_alpha_curve",
    "tightness_diagnostic", "verify_theorem_table",
]
