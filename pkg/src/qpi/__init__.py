"""Exponential asymptotics of the first q-difference Painleve equation.

Library layout:

- ``series``      truncated complex Taylor arithmetic about a base point
- ``branches``    leading-order quartic branches, singularities, symmetries
- ``recurrence``  asymptotic-series coefficients and late-order fitting
- ``singulants``  contour-integral singulants, prefactors, late-order constant
- ``stokes``      Stokes/anti-Stokes geometry, erf smoothing, evaluation
- ``iteration``   direct iteration of the discrete equation and comparison
- ``cli``         the ``qpi`` command-line surface
"""

from .branches import (
    ANCHORS,
    SingularPoint,
    branch_series,
    branch_value,
    branch_values,
    far_field_class,
    local_expansion,
    singular_points,
    symmetry_image,
)
from .iteration import IterationConfig, Trajectory, iterate, rescaled_residual, shoot_initial_conditions
from .recurrence import (
    CoefficientTable,
    compute_coefficients,
    first_correction,
    fit_late_order,
    forcing_term,
    q_expansion_polynomial,
    stirling_first,
)
from .series import TruncatedSeries, newton_root
from .singulants import (
    H_factor,
    PathSpec,
    SingulantValue,
    continue_arccosh,
    inner_coefficients,
    lambda_constant,
    prefactor_G,
    prefactor_U,
    late_order_predict,
    sigma,
    singulant,
)
from .stokes import (
    AsymptoticApproximation,
    TracedCurve,
    classify_point,
    evaluate_solution,
    initial_directions,
    map_to_x,
    optimal_truncation,
    stokes_multiplier,
    trace_curve,
)

__version__ = "0.1.0"
