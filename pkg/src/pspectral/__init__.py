"""Sharp lower bounds for the first Neumann eigenvalue of the p-Laplacian on
manifolds with Ricci curvature bounded below by ``(n-1) k < 0``."""
from .eigen import EigenEstimate, delta_bar, lambda_bar, shoot_phase, verify_diameter_minimality
from .models import (ModelFamily, ModelSolution, Params, PrueferState, alpha_critical, critical_l,
                     find_abar, integrate_pruefer, model_landscape, sharpness_diameter_bound,
                     solve_model, weight_T)
from .ptrig import cosp, phase_from_cartesian, pi_p, signed_pow, sincosp, sinp

__version__ = "0.1.0"

__all__ = [
    "EigenEstimate", "ModelFamily", "ModelSolution", "Params", "PrueferState", "alpha_critical",
    "cosp", "critical_l", "delta_bar", "find_abar", "integrate_pruefer", "lambda_bar",
    "model_landscape", "phase_from_cartesian", "pi_p", "sharpness_diameter_bound", "shoot_phase",
    "signed_pow", "sincosp", "sinp", "solve_model", "verify_diameter_minimality", "weight_T",
]
