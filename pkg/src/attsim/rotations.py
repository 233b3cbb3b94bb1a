"""Exact attitude algebra: quaternions, 3-parameter rotation vectors, DCMs.

Conventions
-----------
* Quaternions are scalar-first numpy arrays ``[q0, qx, qy, qz]`` with unit
  norm.  A vehicle attitude quaternion maps body-frame vectors into the
  inertial frame: ``v_N = C(q) @ v_B``.
* A DCM ``C`` transforms final-frame coordinates to the initial frame, so
  cascading ``quat_mult(q1, q2)`` matches ``C1 @ C2``.
* ``q`` and ``-q`` are the same rotation; functions returning quaternions
  make no sign promise, so compare rotations via DCMs or error angles.
* Everything broadcasts over leading axes: quaternions occupy a trailing
  axis of length 4, vectors of length 3.
"""

import enum

import numpy as np

from .errors import DomainError


class Rep(enum.Enum):
    """Three-parameter attitude representations.

    EULER_VECTOR  rotation angle times unit axis, rad; singular rate at 2*pi
    GIBBS         2 tan(phi/2) * axis; unbounded as phi -> pi
    MRP           4 tan(phi/4) * axis; singular at phi = 2*pi
    """

    EULER_VECTOR = "euler_vector"
    GIBBS = "gibbs"
    MRP = "mrp"


IDENTITY_QUAT = np.array([1.0, 0.0, 0.0, 0.0])

# Gibbs conversions reject rotations closer than ~1e-6 rad to pi, where the
# vector magnitude blows up.  q0 = cos(phi/2) ~ (pi - phi)/2 near pi.
_GIBBS_Q0_MIN = 5e-7


def vec_cross(a, b):
    """Componentwise cross product; same as np.cross but cheap on small arrays."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ax, ay, az = a[..., 0], a[..., 1], a[..., 2]
    bx, by, bz = b[..., 0], b[..., 1], b[..., 2]
    return np.stack(
        [ay * bz - az * by, az * bx - ax * bz, ax * by - ay * bx], axis=-1
    )


def normalize(q):
    """Scale a quaternion (or array of them) to unit norm."""
    q = np.asarray(q, dtype=float)
    n = np.sqrt(np.sum(q * q, axis=-1, keepdims=True))
    if np.any(n < 1e-15):
        raise DomainError("cannot normalize a zero-norm quaternion")
    return q / n


def quat_mult(q, p):
    """Quaternion product q (x) p.

    Cascades transformations through an intermediate frame: if q maps A to N
    and p maps B to A, the product maps B to N.
    """
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    q0, q1, q2, q3 = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    p0, p1, p2, p3 = p[..., 0], p[..., 1], p[..., 2], p[..., 3]
    return np.stack(
        [
            q0 * p0 - q1 * p1 - q2 * p2 - q3 * p3,
            q0 * p1 + q1 * p0 + q2 * p3 - q3 * p2,
            q0 * p2 + q2 * p0 + q3 * p1 - q1 * p3,
            q0 * p3 + q3 * p0 + q1 * p2 - q2 * p1,
        ],
        axis=-1,
    )


def quat_conjugate(q):
    """Conjugate [q0, -qv]; inverse rotation for unit quaternions."""
    return np.asarray(q, dtype=float) * np.array([1.0, -1.0, -1.0, -1.0])


def quat_transform(q, v):
    """Rotate a body-frame vector into the inertial frame: C(q) @ v.

    Evaluated as the sandwich product q (x) [0, v] (x) q*, expanded to the
    usual two-cross-product form.
    """
    q = np.asarray(q, dtype=float)
    v = np.asarray(v, dtype=float)
    q0 = q[..., 0]
    q1, q2, q3 = q[..., 1], q[..., 2], q[..., 3]
    v1, v2, v3 = v[..., 0], v[..., 1], v[..., 2]
    tx = 2.0 * (q2 * v3 - q3 * v2)
    ty = 2.0 * (q3 * v1 - q1 * v3)
    tz = 2.0 * (q1 * v2 - q2 * v1)
    return np.stack(
        [
            v1 + q0 * tx + q2 * tz - q3 * ty,
            v2 + q0 * ty + q3 * tx - q1 * tz,
            v3 + q0 * tz + q1 * ty - q2 * tx,
        ],
        axis=-1,
    )


def quat_to_dcm(q):
    """DCM from a unit quaternion: C = (q0^2 - |qv|^2) I + 2 q0 [qv x] + 2 qv qv^T."""
    q = np.asarray(q, dtype=float)
    q0 = q[..., 0]
    q1, q2, q3 = q[..., 1], q[..., 2], q[..., 3]
    s = q0 * q0 - (q1 * q1 + q2 * q2 + q3 * q3)
    c = np.empty(q.shape[:-1] + (3, 3))
    c[..., 0, 0] = s + 2.0 * q1 * q1
    c[..., 0, 1] = 2.0 * (q1 * q2 - q0 * q3)
    c[..., 0, 2] = 2.0 * (q1 * q3 + q0 * q2)
    c[..., 1, 0] = 2.0 * (q1 * q2 + q0 * q3)
    c[..., 1, 1] = s + 2.0 * q2 * q2
    c[..., 1, 2] = 2.0 * (q2 * q3 - q0 * q1)
    c[..., 2, 0] = 2.0 * (q1 * q3 - q0 * q2)
    c[..., 2, 1] = 2.0 * (q2 * q3 + q0 * q1)
    c[..., 2, 2] = s + 2.0 * q3 * q3
    return c


def cross_matrix(v):
    """Skew-symmetric matrix [v x] with [v x] @ u = cross(v, u)."""
    v = np.asarray(v, dtype=float)
    m = np.zeros(v.shape[:-1] + (3, 3))
    m[..., 0, 1] = -v[..., 2]
    m[..., 0, 2] = v[..., 1]
    m[..., 1, 0] = v[..., 2]
    m[..., 1, 2] = -v[..., 0]
    m[..., 2, 0] = -v[..., 1]
    m[..., 2, 1] = v[..., 0]
    return m


def small_angle_quat(da, order=2):
    """Small-rotation quaternion approximation.

    order 1: [1, da/2]; order 2: [1 - |da|^2/8, da/2].  Not normalized;
    the two agree with the exact quaternion to O(|da|^2) and O(|da|^3).
    """
    da = np.asarray(da, dtype=float)
    if order == 1:
        w = np.ones(da.shape[:-1] + (1,))
    elif order == 2:
        w = 1.0 - np.sum(da * da, axis=-1, keepdims=True) / 8.0
    else:
        raise DomainError(f"order must be 1 or 2, got {order}")
    return np.concatenate([w, da / 2.0], axis=-1)


def perturbation_dcm(da, order=2):
    """Small-rotation DCM: I + [da x] (+ [da x]^2 / 2 at order 2).

    Identical for all three 3-parameter representations at these orders.
    """
    da = np.asarray(da, dtype=float)
    ax = cross_matrix(da)
    c = np.eye(3) + ax
    if order == 2:
        c = c + 0.5 * (ax @ ax)
    elif order != 1:
        raise DomainError(f"order must be 1 or 2, got {order}")
    return c


def vec3_to_quat(rep, a):
    """Unit quaternion from a 3-parameter attitude vector."""
    a = np.asarray(a, dtype=float)
    if rep is Rep.EULER_VECTOR:
        alpha = 0.5 * np.linalg.norm(a)
        if alpha < 1e-8:
            f = 0.5 - alpha * alpha / 12.0
        else:
            f = np.sin(alpha) / (2.0 * alpha)
        return np.concatenate([[np.cos(alpha)], f * a])
    if rep is Rep.GIBBS:
        alpha = 0.25 * float(a @ a)
        return np.concatenate([[1.0], 0.5 * a]) / np.sqrt(1.0 + alpha)
    if rep is Rep.MRP:
        alpha = float(a @ a) / 16.0
        return np.concatenate([[1.0 - alpha], 0.5 * a]) / (1.0 + alpha)
    raise DomainError(f"unknown representation {rep!r}")


def quat_to_vec3(rep, q):
    """3-parameter attitude vector from a unit quaternion.

    The principal rotation (angle <= pi) is always returned, so the sign of
    q does not matter.  Gibbs raises DomainError within ~1e-6 rad of pi.
    """
    q = np.asarray(q, dtype=float)
    if q[0] < 0.0:
        q = -q
    q0 = min(q[0], 1.0)
    qv = q[1:]
    if rep is Rep.EULER_VECTOR:
        s = np.linalg.norm(qv)
        if s < 1e-9:
            return 2.0 * qv
        phi = 2.0 * np.arccos(q0)
        return (phi / s) * qv
    if rep is Rep.GIBBS:
        if q0 < _GIBBS_Q0_MIN:
            raise DomainError("Gibbs vector undefined: rotation within 1e-6 of pi")
        return 2.0 * qv / q0
    if rep is Rep.MRP:
        return 4.0 * qv / (1.0 + q0)
    raise DomainError(f"unknown representation {rep!r}")


def vec3_to_dcm(rep, a):
    """DCM from a 3-parameter attitude vector (exact, closed form)."""
    a = np.asarray(a, dtype=float)
    ax = cross_matrix(a)
    ax2 = ax @ ax
    if rep is Rep.EULER_VECTOR:
        phi = np.linalg.norm(a)
        if phi < 1e-6:
            c1 = 1.0 - phi * phi / 6.0
            c2 = 0.5 - phi * phi / 24.0
        else:
            c1 = np.sin(phi) / phi
            c2 = (1.0 - np.cos(phi)) / (phi * phi)
        return np.eye(3) + c1 * ax + c2 * ax2
    if rep is Rep.GIBBS:
        alpha = 0.25 * float(a @ a)
        return np.eye(3) + ax / (1.0 + alpha) + ax2 / (2.0 * (1.0 + alpha))
    if rep is Rep.MRP:
        alpha = float(a @ a) / 16.0
        d = (1.0 + alpha) ** 2
        return np.eye(3) + ((1.0 - alpha) / d) * ax + ax2 / (2.0 * d)
    raise DomainError(f"unknown representation {rep!r}")


def kinematic_rate(rep, a, w):
    """Exact time derivative of a 3-parameter attitude vector.

    ``w`` is the body angular velocity, rad/s.  All three representations
    reduce to w + 0.5 a x w to first order in a.
    """
    a = np.asarray(a, dtype=float)
    w = np.asarray(w, dtype=float)
    if rep is Rep.EULER_VECTOR:
        alpha = 0.5 * np.linalg.norm(a)
        if alpha < 1e-4:
            c = 1.0 / 12.0 + alpha * alpha / 180.0
        else:
            s = np.sin(alpha)
            # cot(alpha) blows up at multiples of pi (rotation angle 2k*pi)
            if abs(s) < 1e-9:
                raise DomainError("Euler-vector rate singular at |a| = 2k*pi")
            c = (1.0 - alpha * np.cos(alpha) / s) / (4.0 * alpha * alpha)
        return w + 0.5 * vec_cross(a, w) + c * vec_cross(a, vec_cross(a, w))
    if rep is Rep.GIBBS:
        return w + 0.5 * vec_cross(a, w) + 0.25 * float(w @ a) * a
    if rep is Rep.MRP:
        alpha = float(a @ a) / 16.0
        return (1.0 - alpha) * w + 0.5 * vec_cross(a, w) + 0.125 * float(w @ a) * a
    raise DomainError(f"unknown representation {rep!r}")


def quat_rate(q, w):
    """Quaternion kinematics: dq/dt = 0.5 q (x) [0, w]."""
    q = np.asarray(q, dtype=float)
    w = np.asarray(w, dtype=float)
    zw = np.concatenate([np.zeros(w.shape[:-1] + (1,)), w], axis=-1)
    return 0.5 * quat_mult(q, zw)


def omega_matrix(w):
    """4x4 matrix Omega(w) with dq/dt = 0.5 Omega q; equivalent to quat_rate."""
    w1, w2, w3 = np.asarray(w, dtype=float)
    return np.array(
        [
            [0.0, -w1, -w2, -w3],
            [w1, 0.0, w3, -w2],
            [w2, -w3, 0.0, w1],
            [w3, w2, -w1, 0.0],
        ]
    )


def dcm_rate(c, w):
    """DCM kinematics: dC/dt = C [w x]."""
    return np.asarray(c, dtype=float) @ cross_matrix(w)


def quat_delta_update(q, da, order=1):
    """Apply a small multiplicative rotation da to q and renormalize.

    order 1 is q + 0.5 q (x) [0, da]; order 2 composes the second-order
    small-angle quaternion.
    """
    if order == 1:
        dq = small_angle_quat(np.asarray(da, dtype=float), 1)
    elif order == 2:
        dq = small_angle_quat(np.asarray(da, dtype=float), 2)
    else:
        raise DomainError(f"order must be 1 or 2, got {order}")
    return normalize(quat_mult(q, dq))


def quat_integrate_step(q, w, wdot, dt):
    """One integration step of q with angular velocity w and acceleration wdot.

    Uses the two-term Taylor update whose second-order terms are
    [-dt^2 |w|^2 / 4, wdot dt^2 / 2]; the result is renormalized.
    """
    w = np.asarray(w, dtype=float)
    wdot = np.asarray(wdot, dtype=float)
    dv = np.concatenate(
        [[-dt * dt * float(w @ w) / 4.0], w * dt + 0.5 * wdot * dt * dt]
    )
    return normalize(q + 0.5 * quat_mult(q, dv))


def slerp(qa, qb, u):
    """Spherical-linear interpolation between unit quaternions, sign-aligned."""
    qa = np.asarray(qa, dtype=float)
    qb = np.asarray(qb, dtype=float)
    if float(qa @ qb) < 0.0:
        qb = -qb
    d = np.clip(float(qa @ qb), -1.0, 1.0)
    ang = np.arccos(d)
    if ang < 1e-9:
        return normalize(qa + u * (qb - qa))
    s = np.sin(ang)
    return (np.sin((1.0 - u) * ang) / s) * qa + (np.sin(u * ang) / s) * qb


def rotation_angle(q):
    """Principal rotation angle of a unit quaternion, in [0, pi]."""
    q = np.asarray(q, dtype=float)
    return 2.0 * np.arccos(np.clip(abs(q[..., 0]), -1.0, 1.0))
