"""Complementary filter: gyro propagation plus fixed-weight vector updates.

The measurement update is geometric: the small rotation separating each
measured unit vector from its predicted direction is estimated with a cross
product, scaled by an empirical weight, and applied multiplicatively to the
attitude; a small fraction of the same correction is bled into the gyro
bias estimate.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .frontend import ObsKind
from .rotations import quat_conjugate, quat_delta_update, quat_transform, vec_cross


@dataclass
class CfState:
    q: np.ndarray                 # body -> inertial attitude estimate
    b: np.ndarray = field(default_factory=lambda: np.zeros(3))  # gyro bias, rad/s


def _vec3(x):
    x = np.asarray(x, dtype=float)
    return np.full(3, float(x)) if x.ndim == 0 else x


@dataclass
class CfWeights:
    """Per-axis measurement weights; scalars broadcast to all three axes."""

    w_a_accel: np.ndarray = 0.0002
    w_a_mag: np.ndarray = 0.002
    w_b: np.ndarray = 0.03

    def __post_init__(self):
        self.w_a_accel = _vec3(self.w_a_accel)
        self.w_a_mag = _vec3(self.w_a_mag)
        self.w_b = _vec3(self.w_b)

    def w_a_for(self, kind):
        return self.w_a_accel if kind is ObsKind.ACCEL else self.w_a_mag


def cf_propagate(state, omega_g, dt):
    """Integrate the attitude with the bias-corrected gyro rate; bias is constant."""
    w = np.asarray(omega_g, dtype=float) - state.b
    return CfState(q=quat_delta_update(state.q, w * dt, 2), b=state.b.copy())


def _to_body(q, v):
    return quat_transform(quat_conjugate(q), v)


def predicted_direction(state, obs):
    """Unit prediction of the measured vector in the estimated body frame."""
    v = _to_body(state.q, obs.v_ref_N)
    n = np.linalg.norm(v)
    if n < 1e-9:
        return None
    return v / n


def measured_direction(state, obs):
    """Unit measured vector, with the horizontal projection applied when present."""
    y = obs.xi_bar
    if obs.projection is not None:
        y = obs.projection @ y
        n = np.linalg.norm(y)
        if n < 1e-9:
            return None
        y = y / n
    return y


def cf_update(state, observations, weights):
    """Apply one combined measurement update for a list of observations.

    delta_theta_i = xi_bar_i x v_bar_i for each observation; the corrections
    are weighted per axis and summed, the bias absorbs -w_b of the sum, and
    the attitude is updated multiplicatively.
    """
    da = np.zeros(3)
    for obs in observations:
        v_bar = predicted_direction(state, obs)
        y_bar = measured_direction(state, obs)
        if v_bar is None or y_bar is None:
            continue
        da += weights.w_a_for(obs.kind) * vec_cross(y_bar, v_bar)
    b = state.b - weights.w_b * da
    return CfState(q=quat_delta_update(state.q, da, 1), b=b)


def simplified_ekf_weights(phi, psi, rho):
    """Steady-state scalar weights an EKF reduces to under isotropic covariances.

    With P_aa = phi I, P_ab = -psi I and R = rho I the Kalman gain collapses
    to w_a = 1 / (1 + rho/phi) on the cross-product correction and
    w_b = psi / phi on the bias fraction.
    """
    if phi <= 0.0 or rho <= 0.0:
        raise DomainError("phi and rho must be positive")
    if psi < 0.0:
        raise DomainError("psi must be non-negative")
    return 1.0 / (1.0 + rho / phi), psi / phi
