"""Quaternion attitude estimation library and batch simulation harness.

Three estimators (complementary filter, multiplicative EKF, quaternion UKF)
share one measurement frontend and are compared on synthetic and recorded
trajectories with IMU + magnetometer sensor corruption models.
"""

from . import rotations
from .cf import CfState, CfWeights, cf_propagate, cf_update, simplified_ekf_weights
from .config import ScenarioConfig, SimParams, canonical_scenarios, load_params
from .ekf import EkfState, ekf_propagate, ekf_update
from .frontend import (
    DynamicsDetector,
    MagKnowledge,
    MagUsage,
    ObsKind,
    VectorObservation,
    accel_observation,
    mag_observation,
)
from .harness import RunConfig, RunResult, emit_outputs, run_case, run_matrix
from .metrics import compute_metrics, error_euler_vector, euler_angles
from .rotations import Rep
from .sensors import SensorConfig, SensorSimulator
from .trajectories import gen_mockup, load_trajectory, resample, save_trajectory
from .ukf import UkfState, ukf_propagate, ukf_sigma_points, ukf_update

__all__ = [
    "CfState",
    "CfWeights",
    "DynamicsDetector",
    "EkfState",
    "MagKnowledge",
    "MagUsage",
    "ObsKind",
    "Rep",
    "RunConfig",
    "RunResult",
    "ScenarioConfig",
    "SensorConfig",
    "SensorSimulator",
    "SimParams",
    "UkfState",
    "VectorObservation",
    "accel_observation",
    "canonical_scenarios",
    "cf_propagate",
    "cf_update",
    "compute_metrics",
    "ekf_propagate",
    "ekf_update",
    "emit_outputs",
    "error_euler_vector",
    "euler_angles",
    "gen_mockup",
    "load_params",
    "load_trajectory",
    "mag_observation",
    "resample",
    "rotations",
    "run_case",
    "run_matrix",
    "save_trajectory",
    "simplified_ekf_weights",
    "ukf_propagate",
    "ukf_sigma_points",
    "ukf_update",
]

__version__ = "0.1.0"
