"""Unscented Kalman filter with multiplicative quaternion sigma points.

Sigma points are 6-vector perturbations (attitude + bias) drawn from the
columns of a Cholesky square root; each is composed onto the quaternion
estimate, propagated to first order, and the perturbations are recovered
relative to the propagated central quaternion.  Measurement statistics are
formed from the same propagated sigma set.
"""

from dataclasses import dataclass, field

import numpy as np

from .ekf import check_psd, symmetrize
from .errors import (
    CholeskyError,
    DegenerateInput,
    QuaternionDivergence,
    SingularInnovation,
)
from .rotations import quat_conjugate, quat_delta_update, quat_mult, quat_transform

N_STATES = 6


@dataclass
class UkfState:
    q: np.ndarray
    b: np.ndarray = field(default_factory=lambda: np.zeros(3))
    P: np.ndarray = field(default_factory=lambda: np.zeros((6, 6)))


@dataclass
class SigmaSet:
    """Propagated sigma data reused by the measurement updates of one tick."""

    q_prop: np.ndarray   # (13, 4) propagated quaternion points, row 0 central
    dx: np.ndarray       # (13, 6) propagated state perturbations, row 0 zero
    dx_mean: np.ndarray  # (6,) weighted mean perturbation


def _chol_with_jitter(m):
    try:
        return np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        pass
    try:
        return np.linalg.cholesky(m + 1e-12 * np.eye(m.shape[0]))
    except np.linalg.LinAlgError as exc:
        raise CholeskyError(f"sigma-point square root failed: {exc}") from None


def ukf_sigma_points(P, Q, dt, lam):
    """Perturbation sigma points from +/- columns of sqrt((n+lam)(P + dt Q)).

    Returns a (2n+1, 6) array whose first row is the zero perturbation.
    """
    m = (N_STATES + lam) * (P + dt * Q)
    root = _chol_with_jitter(m)
    pts = np.zeros((2 * N_STATES + 1, N_STATES))
    pts[1 : N_STATES + 1] = root.T
    pts[N_STATES + 1 :] = -root.T
    return pts


_WEIGHTS_CACHE = {}


def _weights(lam):
    w = _WEIGHTS_CACHE.get(lam)
    if w is None:
        c = 1.0 / (N_STATES + lam)
        w = np.full(2 * N_STATES + 1, 0.5 * c)
        w[0] = lam * c
        _WEIGHTS_CACHE[lam] = w
    return w


def ukf_propagate(state, omega_g, dt, Q, lam):
    """Propagate the state through the sigma-point cloud.

    Returns the propagated state and the sigma set needed by this tick's
    measurement updates.
    """
    dx0 = ukf_sigma_points(state.P, Q, dt, lam)
    omega = np.asarray(omega_g, dtype=float) - (state.b + dx0[:, 3:])
    q_pts = quat_delta_update(state.q, dx0[:, :3], 1)
    q_prop = quat_delta_update(q_pts, omega * dt, 1)
    rel = quat_mult(quat_conjugate(q_prop[0]), q_prop)
    if np.any(rel[:, 0] < 0.9):
        raise QuaternionDivergence(
            f"sigma spread too large: min relative scalar {float(np.min(rel[:, 0])):.3f}"
        )
    # recover perturbations as twice the vector part over the scalar part:
    # the normalized [1, da/2] build map is the Gibbs parametrization, so
    # this recovery inverts it exactly and the covariance keeps its full
    # process-noise growth (plain 2*vec shrinks the spread by O(|da|^2) and
    # silently caps P where that shrinkage cancels dt*Q)
    dx = np.concatenate([2.0 * rel[:, 1:] / rel[:, :1], dx0[:, 3:]], axis=1)
    c = 1.0 / (N_STATES + lam)
    dx_mean = 0.5 * c * np.sum(dx[1:], axis=0)
    dev = dx - dx_mean
    p = (dev.T * _weights(lam)) @ dev
    p = symmetrize(p)
    check_psd(p, "UKF propagation")
    new = UkfState(
        q=quat_delta_update(q_prop[0], dx_mean[:3], 1),
        b=state.b + dx_mean[3:],
        P=p,
    )
    return new, SigmaSet(q_prop=q_prop, dx=dx, dx_mean=dx_mean)


def innovation_gain(p_xs, s):
    """Kalman gain K = P_xs S^-1 for innovation covariance S."""
    try:
        return np.linalg.solve(s, p_xs.T).T
    except np.linalg.LinAlgError as exc:
        raise SingularInnovation(f"innovation covariance singular: {exc}") from None


def ukf_update(state, obs, R, sigma, lam):
    """Statistical measurement update against the propagated sigma set.

    Measurement sigma points are the reference vector rotated into each
    sigma body frame and normalized individually; the innovation compares
    the measured unit vector with the re-normalized weighted mean.

    When the observation carries a projection chain (horizontal
    magnetometer), the chain is part of the measurement function and is
    applied to the sigma predictions exactly as to the real measurement;
    otherwise the sigma statistics would claim pitch/roll information that
    the projected measurement cannot carry, collapsing the covariance.
    """
    xi = quat_transform(quat_conjugate(sigma.q_prop), obs.v_ref_N)
    if obs.projection is not None:
        xi = xi @ obs.projection.T
    norms = np.sqrt(np.sum(xi * xi, axis=1, keepdims=True))
    if np.any(norms < 1e-9):
        raise DegenerateInput("projected sigma measurement vanished")
    xi = xi / norms
    w = _weights(lam)
    xi_mean = w @ xi
    dev_xi = xi - xi_mean
    dev_x = sigma.dx - sigma.dx_mean
    p_ss = (dev_xi.T * w) @ dev_xi
    p_xs = (dev_x.T * w) @ dev_xi
    s = p_ss + R

    y = obs.xi_bar
    if obs.projection is not None:
        y = obs.projection @ y
        ny = np.linalg.norm(y)
        if ny < 1e-9:
            raise DegenerateInput("projected observation vector vanished")
        y = y / ny
    innovation = y - xi_mean / np.linalg.norm(xi_mean)

    k = innovation_gain(p_xs, s)
    dx = k @ innovation
    p = symmetrize(state.P - k @ s @ k.T)
    check_psd(p, "UKF measurement update")
    return UkfState(
        q=quat_delta_update(state.q, dx[:3], 1),
        b=state.b + dx[3:],
        P=p,
    )
