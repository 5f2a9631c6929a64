"""Scenario generation and DSS safety assessment."""

from .dataset import Dataset, Provenance
from .kinematics import GapParams, VehicleParams, VehicleState, position_at, state_at, velocity_at
from .pipeline import BatchGenerationError, BatchGenerator, generate_batch
from .safety import (
    BatchEvaluationError,
    CriticalityReport,
    DssSeries,
    dss_at,
    evaluate_batch,
    evaluate_series,
    scan_criticality,
    select_critical,
)
from .sampling import NormalSpec, RandomSource, ReactionTimeSamplingError, TruncationBounds
from .scenario import ConfigError, GenerationConfig, ScenarioParams, ScenarioSeries, TimeVector
from .special import GammaSpec, gamma_cdf, gamma_function, gamma_inv_cdf

__all__ = [
    'Dataset',
    'Provenance',
    'GapParams',
    'VehicleParams',
    'VehicleState',
    'position_at',
    'state_at',
    'velocity_at',
    'BatchGenerationError',
    'BatchGenerator',
    'generate_batch',
    'BatchEvaluationError',
    'CriticalityReport',
    'DssSeries',
    'dss_at',
    'evaluate_batch',
    'evaluate_series',
    'scan_criticality',
    'select_critical',
    'NormalSpec',
    'RandomSource',
    'ReactionTimeSamplingError',
    'TruncationBounds',
    'ConfigError',
    'GenerationConfig',
    'ScenarioParams',
    'ScenarioSeries',
    'TimeVector',
    'GammaSpec',
    'gamma_cdf',
    'gamma_function',
    'gamma_inv_cdf',
]
