"""Measurement frontend shared by all estimators.

Raw sensor vectors are turned into normalized VectorObservation values so
the complementary filter, EKF, and UKF consume identical inputs each tick.
Also hosts the horizontal magnetometer projection, the low-dynamics
detector, and scheduled gain selection.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput
from .rotations import quat_to_dcm

# Projector onto the plane perpendicular to the inertial vertical
# (I - mu mu^T for mu = [0, 0, 1]): keeps the horizontal field components.
MU_VERTICAL = np.array([0.0, 0.0, 1.0])
C_MU = np.eye(3) - np.outer(MU_VERTICAL, MU_VERTICAL)

_EPS_NORM = 1e-6


class ObsKind(enum.Enum):
    ACCEL = "accel"
    MAG_HORIZONTAL = "mag_horizontal"
    MAG_3D = "mag_3d"


class MagUsage(enum.Enum):
    NONE = "none"
    HORIZONTAL = "horizontal"
    XYZ = "xyz"


class MagKnowledge(enum.Enum):
    DECLINATION_ONLY = "declination_only"
    XYZ = "xyz"


@dataclass
class VectorObservation:
    """One normalized body-frame vector measurement plus its inertial reference.

    For the horizontal magnetometer case, ``projection`` carries the chain
    C(q_hat)^T C_mu C(q_hat) that maps a body vector to the inertial frame,
    zeroes its vertical component, and maps it back to the estimated body
    frame; estimators compare the projected measured and reference
    directions after normalizing each.
    """

    xi_bar: np.ndarray       # unit measured vector, body frame
    v_ref_N: np.ndarray      # known reference, inertial frame
    kind: ObsKind
    projection: np.ndarray | None = None


def _unit(v, what):
    n = np.linalg.norm(v)
    if n < _EPS_NORM:
        raise DegenerateInput(f"{what} norm {n:.2e} too small to normalize")
    return v / n


def accel_observation(xi_accel, gravity, rddot_est=None):
    """Accelerometer observation against the gravity (+ known rddot) reference.

    Raises DegenerateInput for near-zero measurements (free fall) or a
    near-zero reference, in which case the update should be skipped.
    """
    v_ref = np.asarray(gravity, dtype=float)
    if rddot_est is not None:
        v_ref = v_ref + np.asarray(rddot_est, dtype=float)
    if np.linalg.norm(v_ref) < _EPS_NORM:
        raise DegenerateInput("accelerometer reference vector is degenerate")
    return VectorObservation(
        xi_bar=_unit(np.asarray(xi_accel, dtype=float), "accelerometer measurement"),
        v_ref_N=v_ref,
        kind=ObsKind.ACCEL,
    )


def mag_observation(xi_mag, q_hat, field_N, usage):
    """Magnetometer observation for the configured usage.

    horizontal: the observation carries the body-frame projection chain and
    a reference equal to the horizontal part of the (normalized) field.
    xyz: plain normalized vectors, identity projection.
    """
    xi_bar = _unit(np.asarray(xi_mag, dtype=float), "magnetometer measurement")
    m_bar = _unit(np.asarray(field_N, dtype=float), "magnetic field reference")
    if usage is MagUsage.XYZ:
        return VectorObservation(
            xi_bar=xi_bar, v_ref_N=m_bar, kind=ObsKind.MAG_3D, projection=np.eye(3)
        )
    if usage is MagUsage.HORIZONTAL:
        ref = C_MU @ m_bar
        if np.linalg.norm(ref) < _EPS_NORM:
            raise DegenerateInput("magnetic field is vertical; no horizontal reference")
        c_nb = quat_to_dcm(q_hat)
        chain = c_nb.T @ C_MU @ c_nb
        return VectorObservation(
            xi_bar=xi_bar, v_ref_N=ref, kind=ObsKind.MAG_HORIZONTAL, projection=chain
        )
    raise DegenerateInput(f"magnetometer usage {usage!r} yields no observation")


def assumed_field(cfg_field, knowledge, declination=None):
    """Inertial field vector the estimator believes in.

    xyz knowledge uses the configured field; declination-only knowledge uses
    a horizontal unit vector rotated by the declination angle (defaulting to
    the configured field's own horizontal direction).
    """
    cfg_field = np.asarray(cfg_field, dtype=float)
    if knowledge is MagKnowledge.XYZ:
        return cfg_field
    if declination is None:
        declination = np.arctan2(cfg_field[1], cfg_field[0])
    return np.array([np.cos(declination), np.sin(declination), 0.0])


@dataclass
class DetectorConfig:
    t_high: float = 2.0     # m/s^2; a single exceedance resets the filter
    t_low: float = 0.7      # m/s^2; filtered deviation below this => low dynamics
    window_s: float = 5.0   # moving-average span
    gravity_mag: float = 9.81


class DynamicsDetector:
    """Hysteretic low-dynamics detector on the accelerometer norm.

    Tracks mu = | |accel| - g | through a moving average mu_f over the
    configured window.  Any sample with mu above t_high flushes the whole
    window to that value, so confidence has to rebuild over a full window
    before low_dynamics can latch TRUE again.  The window starts filled with
    t_high, keeping the detector FALSE until real data accumulates.
    """

    def __init__(self, cfg, rate):
        self.cfg = cfg
        n = max(1, round(cfg.window_s * rate))
        self.window = np.full(n, cfg.t_high)
        self._idx = 0
        self._sum = float(np.sum(self.window))
        self.mu_f = self._sum / n
        self.low_dynamics = bool(self.mu_f < cfg.t_low)

    def update(self, accel):
        accel = np.asarray(accel)
        mu = abs(float(np.sqrt(accel @ accel)) - self.cfg.gravity_mag)
        if mu > self.cfg.t_high:
            self.window[:] = mu
            self._sum = mu * self.window.size
        else:
            self._sum += mu - self.window[self._idx]
            self.window[self._idx] = mu
            self._idx = (self._idx + 1) % self.window.size
        self.mu_f = self._sum / self.window.size
        self.low_dynamics = bool(self.mu_f < self.cfg.t_low)
        return self.low_dynamics


@dataclass
class GainSchedule:
    """Nominal and low-dynamics parameter sets for one estimator."""

    nominal: object
    low_dyn: object = None


def select_gains(schedule, low_dynamics, dynamic_gains_on):
    """Pick the active parameter set for this tick."""
    if dynamic_gains_on and low_dynamics and schedule.low_dyn is not None:
        return schedule.low_dyn
    return schedule.nominal
