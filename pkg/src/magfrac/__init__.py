"""Discrete magnetic fractional seminorms, operators and variational constants."""

from .domain import DomainSpec, Grid, PairRegion, SubsetMask, build_grid, pair_region, split
from .errors import NumericalContractError, ValidationError
from .fields import (
    GridFunction,
    VectorFieldSpec,
    WeightFunction,
    affine_field,
    constant_field,
    eval_field,
    gauge_transform,
    linear_field,
    lp_norm,
    make_indicator,
    ramp_function,
    rotation_field,
    smoothed_random_function,
    weighted_mean,
    zero_field,
)
from .seminorm import (
    SeminormBreakdown,
    SeminormParams,
    diamagnetic_gap,
    embedding_check,
    embedding_norm_bound,
    magnetic_seminorm,
    norm_equivalence_check,
    reduced_kernel,
    seminorm_x1_only,
)
from .operator import (
    RegionalOperator,
    apply_operator,
    assemble,
    hermitian_residual,
    quadratic_form,
)
from .spectral import Spectrum, deflated_energy, eigensolve, gap_report
from .variational import (
    BestConstantResult,
    EnergyResult,
    GroundStateSet,
    OptimizerConfig,
    PoincareResult,
    best_constant,
    energy,
    energy_objective,
    ground_state_distance,
    ground_states,
    poincare_constant,
    small_support_poincare_check,
    trace_norm_bound,
)
from .experiments import (
    indicator_report,
    punctured_inequality_check,
    ramp_decay_sweep,
    validate_exponent_conditions,
)

__version__ = "0.1.0"
