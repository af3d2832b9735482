"""d_θ-медиана и среднее Ауманна для интервальных данных."""
from config.settings import TOOL_VERSION as __version__

from .core.errors import (
    ArithmeticOverflowError, DatasetParseError, IntervalMedianError, InvalidInputError,
    InvalidParameterError, NumericFailureError,
)
from .core.interval import Interval, Sample, ThetaConfig, add, d_theta, from_plane, scale, to_plane
from .services.estimators import (
    EstimateReport, GridBounds, aumann_mean, brute_force_frechet_mean, brute_force_median,
    centered_objective, collinearity_check, default_bounds, dtheta_median, fsbp, objective,
    squared_objective,
)
from .services.simulation import (
    Contamination, ExperimentResult, ExperimentSpec, IntervalDistribution, Law, TruthProvenance,
    breakdown_experiment, consistency_experiment, population_median_truth, sample_intervals, substream,
)
