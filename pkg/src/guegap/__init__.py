"""High-precision Hankel-determinant pipeline for the jump-Gaussian weight.

The library computes moments, orthogonal-polynomial recurrence data, gap
probabilities and the auxiliary quantities of the ladder-operator framework
for the weight e^(-x^2) (A + B theta(x^2 - a^2)), and verifies the
difference, Riccati, second-order ODE and double-scaling (Painleve V
sigma-form) identities they satisfy, all in explicit-precision arithmetic.
"""

__version__ = "0.1.0"

from .errors import (AnZero, AuxDegenerate, DivisionBreakdown, PoleAtJump,
                     PoleInODE, PrecisionExhausted)
from .hp import HPReal, barnes_g, erfc_hp, gamma_half
from .ladder import (AuxSequence, An_Bn, build_aux, check_difference_relations,
                     check_lowering, check_ode_P, check_raising,
                     check_supplementary, p_from_aux)
from .mc import (GapCase, GapEstimate, NormalizationC, determinant_probability,
                 gap_estimate, normalization, sample_spectrum)
from .moments import (MomentTable, WeightParams, build_table, moment,
                      tail_integral)
from .ortho import (RecurrenceTable, build_recurrence,
                    build_recurrence_adaptive, eval_poly, eval_poly_derivs,
                    hankel_logdet, hankel_logdet_direct)
from .painleve import (AGrid, GridData, SigmaSeries, branch_signs, build_grid,
                       diff_relations_in_a, r_sigma_residuals, iterate_beta,
                       r_from_R_residuals, riccati_residuals,
                       second_order_residuals, sigma_ode_residual,
                       sigma_series)
from .scaling import (ScalingProfile, build_profile, cauchy_gaps, extrapolate,
                      limit_branch, limit_ode_residuals, pv_residual)

__all__ = [
    "__version__",
    "HPReal", "erfc_hp", "gamma_half", "barnes_g",
    "WeightParams", "MomentTable", "moment", "tail_integral", "build_table",
    "RecurrenceTable", "build_recurrence", "build_recurrence_adaptive",
    "eval_poly", "eval_poly_derivs", "hankel_logdet", "hankel_logdet_direct",
    "AuxSequence", "build_aux", "An_Bn", "check_lowering", "check_raising",
    "check_supplementary", "check_difference_relations", "p_from_aux",
    "check_ode_P",
    "AGrid", "GridData", "build_grid", "iterate_beta", "diff_relations_in_a",
    "riccati_residuals", "r_from_R_residuals", "second_order_residuals",
    "branch_signs", "SigmaSeries", "sigma_series", "r_sigma_residuals",
    "sigma_ode_residual",
    "ScalingProfile", "build_profile", "extrapolate", "pv_residual",
    "limit_ode_residuals", "limit_branch", "cauchy_gaps",
    "GapCase", "GapEstimate", "NormalizationC", "normalization",
    "sample_spectrum", "gap_estimate", "determinant_probability",
    "PrecisionExhausted", "PoleAtJump", "AuxDegenerate", "DivisionBreakdown",
    "PoleInODE", "AnZero",
]
