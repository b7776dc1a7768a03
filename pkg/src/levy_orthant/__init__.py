"""Rate functions and rare-event estimates for a multivariate Lévy process
hitting a remote translated orthant ``s * g + Q+``."""

from .asympt import AsymptoticFit, fit_a0, fit_exponent, predict
from .conditions import ConditionReport, check_conditions
from .errors import (
    ConditionError,
    ConfigError,
    DegenerateModel,
    DomainError,
    FitError,
    LevyOrthantError,
    NoConvergence,
    NoFiniteMinimum,
    NoRoot,
    VertexNotMpp,
)
from .model import (
    ExpAlong,
    GaussianJump,
    JumpComponent,
    LevyModel,
    PointMasses,
    cumulant,
    cumulant_derivatives,
    in_domain,
    mean,
    model_from_dict,
    reserve_process,
    scale_time,
)
from .rates import (
    LegendreSolution,
    MppSolution,
    OrthantTarget,
    SecondRateSolution,
    ToleranceProfile,
    legendre,
    most_probable_scale,
    normal_at,
    orthant_mpp,
    second_rate,
)
from .sim import HitEstimate, SimConfig, sample_increment, simulate_hitting_crude, simulate_hitting_is, tilt_model

__version__ = "0.1.0"
