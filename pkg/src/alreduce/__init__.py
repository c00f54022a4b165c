"""Order reductions of singular radiation-reaction equations of motion.

The package builds the physical (runaway-free) second-order reduction of
damped third-order equations of motion three ways: as an asymptotic series
in the damping time, as a weighted integral over the forward light ray of
the force, and in closed form for pulse and uniform-magnetic-field cases,
with fixed-point and stability analysis for the latter.
"""

from .errors import BracketError, DomainError, IntegrationError, ParameterError
from .forces import (
    ConstantForce,
    ExponentialForce,
    Force1D,
    GaussianPulse,
    LinearForce,
    PhysicalParams,
    SinusoidalForce,
    cyclotron_frequency,
    force_from_descriptor,
    hermite,
    make_standard_forces,
    tau0_from_params,
)
from .magnetic3d import (
    STABILITY_THRESHOLD_MU,
    BifurcationRow,
    CoeffPair,
    FixedPointReport,
    MagneticSystem,
    approx_rhs,
    bifurcation_scan,
    fixed_point_coeffs,
    fixed_points,
    iterate_recurrence,
    map_jacobian,
    recurrence_step,
    reduced_rhs,
    spectral_radius,
    spiral_velocity,
    stability_threshold,
)
from .numerics import QuadratureRule, StepperConfig, erfcx, gauss_laguerre, rk4_step
from .reduction1d import (
    FixedOrder,
    LimitStudyRow,
    PulseReduction,
    ReductionSeries,
    SeriesEvaluation,
    SmallestTerm,
    gaussian_reduction,
    integral_reduction,
    limit_study,
    preacceleration,
    write_limit_study_csv,
)
from .simulate import (
    Trajectory,
    run_full_1d,
    run_full_3d,
    run_reduced,
    runaway_metric,
    write_trajectory_csv,
)

__version__ = "0.1.0"
