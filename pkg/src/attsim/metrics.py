"""Attitude error computation and the four scalar run metrics.

Errors are expressed as body-frame Euler vectors (angle * axis) so they stay
meaningful far from level flight; Euler angles are used only for the final
heading / pitch / roll numbers.
"""

from dataclasses import dataclass

import numpy as np

from .errors import EmptySeries
from .rotations import normalize, quat_conjugate, quat_mult, quat_to_dcm

RAD2DEG = 180.0 / np.pi
DEG2RAD = np.pi / 180.0


def error_euler_vector(q_hat, q_true):
    """Body-frame Euler-vector attitude error between estimate and truth.

    Built from dq = q_hat* (x) q_true; the magnitude is the rotation angle
    separating the two attitudes.  Exactly zero error returns exact zeros.
    """
    dq = quat_mult(quat_conjugate(q_hat), q_true)
    if dq[0] < 0.0:
        dq = -dq
    s = np.linalg.norm(dq[1:])
    if s < 1e-12:
        return np.zeros(3)
    phi = 2.0 * np.arccos(np.clip(dq[0], -1.0, 1.0))
    return (phi / s) * dq[1:]


def euler_angles(q):
    """(heading, pitch, roll) of a body->inertial quaternion, ZYX order, rad.

    heading in (-pi, pi], pitch in [-pi/2, pi/2], roll in (-pi, pi].  At
    gimbal lock (|pitch| = pi/2) heading keeps the atan2 convention.
    """
    c = quat_to_dcm(q)
    heading = np.arctan2(c[1, 0], c[0, 0])
    pitch = np.arcsin(-np.clip(c[2, 0], -1.0, 1.0))
    roll = np.arctan2(c[2, 1], c[2, 2])
    return heading, pitch, roll


def euler_to_quat(heading, pitch, roll):
    """Quaternion from ZYX heading-pitch-roll angles (rad)."""
    qz = np.array([np.cos(heading / 2), 0.0, 0.0, np.sin(heading / 2)])
    qy = np.array([np.cos(pitch / 2), 0.0, np.sin(pitch / 2), 0.0])
    qx = np.array([np.cos(roll / 2), np.sin(roll / 2), 0.0, 0.0])
    return normalize(quat_mult(quat_mult(qz, qy), qx))


def wrap_angle(x):
    """Wrap an angle (or array) to (-pi, pi]."""
    return -((-np.asarray(x) + np.pi) % (2.0 * np.pi) - np.pi)


@dataclass
class ErrorSample:
    """Attitude and bias error at one timestamp (all radians / rad/s)."""

    t: float
    dav: np.ndarray        # error Euler vector, body frame
    euler_err: np.ndarray  # heading, pitch, roll errors
    bias_err: np.ndarray   # gyro bias estimate error


@dataclass
class MetricsReport:
    """Scalar run metrics, degrees."""

    max_ev_z: float
    max_ev_xy: float
    fin_h: float
    fin_pr: float


def error_sample(t, q_hat, b_hat, q_true, b_true):
    """Build an ErrorSample from estimator and truth states."""
    dav = error_euler_vector(q_hat, q_true)
    e_hat = np.array(euler_angles(q_hat))
    e_true = np.array(euler_angles(q_true))
    return ErrorSample(
        t=t,
        dav=dav,
        euler_err=wrap_angle(e_hat - e_true),
        bias_err=np.asarray(b_hat) - np.asarray(b_true),
    )


def euler_vector_error_series(q_hat, q_true):
    """Vectorized error_euler_vector over (n, 4) quaternion arrays."""
    dq = quat_mult(quat_conjugate(q_hat), q_true)
    dq = np.where(dq[:, :1] < 0.0, -dq, dq)
    s = np.linalg.norm(dq[:, 1:], axis=1)
    phi = 2.0 * np.arccos(np.clip(dq[:, 0], -1.0, 1.0))
    tiny = s < 1e-12
    f = np.where(tiny, 0.0, phi / np.where(tiny, 1.0, s))
    return f[:, None] * dq[:, 1:]


def euler_angle_series(q):
    """Vectorized euler_angles over an (n, 4) quaternion array."""
    c = quat_to_dcm(q)
    heading = np.arctan2(c[:, 1, 0], c[:, 0, 0])
    pitch = np.arcsin(-np.clip(c[:, 2, 0], -1.0, 1.0))
    roll = np.arctan2(c[:, 2, 1], c[:, 2, 2])
    return np.column_stack([heading, pitch, roll])


def compute_metrics(series):
    """Reduce an error series to the four scalar metrics (degrees).

    MaxEVz / MaxEVxy take the maximum absolute Euler-vector error component
    over the whole run; FinH / FinPR use the last sample only.
    """
    if not series:
        raise EmptySeries("cannot compute metrics of an empty series")
    dav = np.array([s.dav for s in series])
    last = series[-1]
    return MetricsReport(
        max_ev_z=float(np.max(np.abs(dav[:, 2]))) * RAD2DEG,
        max_ev_xy=float(np.max(np.abs(dav[:, :2]))) * RAD2DEG,
        fin_h=abs(float(last.euler_err[0])) * RAD2DEG,
        fin_pr=float(np.max(np.abs(last.euler_err[1:]))) * RAD2DEG,
    )
