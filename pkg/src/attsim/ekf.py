"""Multiplicative extended Kalman filter on a 6-state attitude error model.

The quaternion is propagated directly; the 6x6 covariance tracks a small
body-frame attitude perturbation (first 3 states) and the gyro bias error
(last 3).  Measurement updates linearize normalized vector observations.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import CovarianceError, DegenerateInput, SingularInnovation
from .frontend import ObsKind
from .rotations import (
    cross_matrix,
    quat_conjugate,
    quat_delta_update,
    quat_transform,
)

PSD_TOL = 1e-9

_JITTER6 = PSD_TOL * np.eye(6)


@dataclass
class EkfState:
    q: np.ndarray
    b: np.ndarray = field(default_factory=lambda: np.zeros(3))
    P: np.ndarray = field(default_factory=lambda: np.zeros((6, 6)))


def symmetrize(p):
    return 0.5 * (p + p.T)


def check_psd(p, where):
    """Raise CovarianceError if the smallest eigenvalue drops below -PSD_TOL."""
    try:
        np.linalg.cholesky(p + (_JITTER6 if p.shape[0] == 6 else PSD_TOL * np.eye(p.shape[0])))
    except np.linalg.LinAlgError:
        lo = float(np.min(np.linalg.eigvalsh(p)))
        raise CovarianceError(
            f"covariance not PSD after {where}: min eigenvalue {lo:.3e}"
        ) from None


def _to_body(q, v):
    return quat_transform(quat_conjugate(q), v)


def ekf_propagate(state, omega_g, dt, Q):
    """Propagate attitude, bias, and covariance over dt.

    Covariance follows the continuous Lyapunov equation Pdot = F P + F^T P + Q
    discretized with one Euler step at the sample rate, with
    F = [[-0.5 [(w_g - b) x], -I], [0, 0]].
    """
    w = np.asarray(omega_g, dtype=float) - state.b
    q = quat_delta_update(state.q, w * dt, 2)
    f = np.zeros((6, 6))
    f[:3, :3] = -0.5 * cross_matrix(w)
    f[:3, 3:] = -np.eye(3)
    p = state.P + dt * (f @ state.P + state.P @ f.T + Q)
    p = symmetrize(p)
    check_psd(p, "propagation")
    return EkfState(q=q, b=state.b.copy(), P=p)


def _unit(v):
    n = float(np.sqrt(v @ v))
    if n < 1e-9:
        raise DegenerateInput("projected observation vector vanished")
    return v / n


def _linearized_measurement(q, obs):
    """Innovation and attitude measurement matrix for one observation.

    The horizontal magnetometer case compares the projected measured and
    reference directions, both normalized, so that knowing only the field's
    horizontal direction (not its dip) leaves a perfect estimate with zero
    innovation.  Its Jacobian is the projected cross-product form evaluated
    at the predicted direction of the assumed field, composed with the
    normalization Jacobian.  Evaluating it at the noisy measured vector
    instead correlates H with the innovation noise, and the rectified
    product drives the filter away from level; the measured vector's dip
    component also claims roll information the assumed field cannot
    support.
    """
    if obs.kind is ObsKind.MAG_HORIZONTAL:
        y_raw = obs.projection @ obs.xi_bar
        ny = float(np.sqrt(y_raw @ y_raw))
        if ny < 1e-9:
            raise DegenerateInput("projected observation vector vanished")
        v_bar = _unit(_to_body(q, obs.v_ref_N))
        z = y_raw / ny - v_bar
        h_a = (np.eye(3) - np.outer(v_bar, v_bar)) @ obs.projection @ cross_matrix(
            v_bar
        )
    else:
        v_bar = _unit(_to_body(q, obs.v_ref_N))
        z = obs.xi_bar - v_bar
        h_a = cross_matrix(v_bar)
    return z, h_a


def ekf_update(state, obs, R):
    """Kalman update for one vector observation with measurement covariance R."""
    z, h_a = _linearized_measurement(state.q, obs)
    p_aa = state.P[:3, :3]
    p_ab = state.P[:3, 3:]
    s = h_a @ p_aa @ h_a.T + R
    w = np.vstack([p_aa, p_ab.T]) @ h_a.T
    try:
        k = np.linalg.solve(s, w.T).T
    except np.linalg.LinAlgError as exc:
        raise SingularInnovation(f"innovation covariance singular: {exc}") from None
    dx = k @ z
    p = state.P - k @ h_a @ np.hstack([p_aa, p_ab])
    p = symmetrize(p)
    check_psd(p, "measurement update")
    return EkfState(
        q=quat_delta_update(state.q, dx[:3], 1),
        b=state.b + dx[3:],
        P=p,
    )
