"""Ground-truth trajectories: synthetic mockup cases and CSV ingestion.

Mockup cases prescribe angular-velocity profiles with zero translation
acceleration; the attitude is integrated with fixed-step RK4 on the
quaternion kinematics.  Externally recorded flights are ingested from CSV
files with columns ``t,qw,qx,qy,qz,wx,wy,wz,ax,ay,az`` (seconds, unit
body->inertial quaternion, body rad/s, inertial m/s^2 translation
acceleration); ``#`` starts a comment line.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ParseError, ValidationError
from .metrics import DEG2RAD
from .rotations import normalize, slerp
from .sensors import TruthSample

CSV_COLUMNS = ["t", "qw", "qx", "qy", "qz", "wx", "wy", "wz", "ax", "ay", "az"]

MOCKUP_CASES = ("mockup_long_hover", "mockup_easy", "mockup_slowrot", "mockup")
FLIGHT_CASES = (
    "straightup",
    "bumpy_hover",
    "straightflight",
    "longturn_bothways",
    "longturn",
)
CANONICAL_CASES = MOCKUP_CASES + FLIGHT_CASES


@dataclass
class Trajectory:
    name: str
    t: np.ndarray       # (n,), strictly increasing, s
    q: np.ndarray       # (n, 4) unit quaternions
    w: np.ndarray       # (n, 3) body rad/s
    rddot: np.ndarray   # (n, 3) inertial m/s^2
    rate: float

    def samples(self):
        return [
            TruthSample(t=float(self.t[k]), q=self.q[k], w=self.w[k], rddot=self.rddot[k])
            for k in range(len(self.t))
        ]


def _mockup_rates(case, t, hover_start):
    """Angular velocity profile (rad/s) evaluated at times t; hover after hover_start."""
    t = np.asarray(t, dtype=float)
    if case == "mockup_long_hover":
        return np.zeros(t.shape + (3,))
    if case == "mockup_easy":
        amp = np.array([4.0, 3.0, 5.0]) * DEG2RAD
        freq = np.array([0.11, 0.17, 0.23])
        w = amp * np.sin(2.0 * np.pi * freq * t[..., None])
    elif case == "mockup_slowrot":
        # constant 6 deg/s roll for 60 s closes a full 360 degree rotation
        w = np.zeros(t.shape + (3,))
        w[..., 0] = 6.0 * DEG2RAD
    elif case == "mockup":
        amp = np.array([300.0, 200.0, 150.0]) * DEG2RAD
        freq = np.array([0.20, 0.31, 0.47])
        w = amp * np.sin(2.0 * np.pi * freq * t[..., None])
    else:
        raise ValueError(f"unknown mockup case {case!r}")
    w[t >= hover_start] = 0.0
    return w


def _qdot(q, w):
    # dq/dt = 0.5 q (x) [0, w], unrolled to plain floats for the RK4 loop
    q0, q1, q2, q3 = q
    w1, w2, w3 = w
    return (
        0.5 * (-q1 * w1 - q2 * w2 - q3 * w3),
        0.5 * (q0 * w1 + q2 * w3 - q3 * w2),
        0.5 * (q0 * w2 + q3 * w1 - q1 * w3),
        0.5 * (q0 * w3 + q1 * w2 - q2 * w1),
    )


def _rk4_quat_step(q, w0, w_mid, w1, dt):
    k1 = _qdot(q, w0)
    k2 = _qdot([q[i] + 0.5 * dt * k1[i] for i in range(4)], w_mid)
    k3 = _qdot([q[i] + 0.5 * dt * k2[i] for i in range(4)], w_mid)
    k4 = _qdot([q[i] + dt * k3[i] for i in range(4)], w1)
    out = [
        q[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        for i in range(4)
    ]
    n = np.sqrt(out[0] ** 2 + out[1] ** 2 + out[2] ** 2 + out[3] ** 2)
    return [x / n for x in out]


def gen_mockup(case, rate=100.0, duration=120.0):
    """Generate a mockup trajectory: maneuver for the first half, exact hover after.

    The quaternion truth is integrated with fixed-step RK4 and renormalized
    each step.  Translation acceleration is identically zero for every
    mockup case.
    """
    if rate <= 0.0:
        raise ValueError("rate must be positive")
    hover_start = duration / 2.0
    dt = 1.0 / rate
    n = round(duration * rate) + 1
    t = np.arange(n) * dt
    w = _mockup_rates(case, t, hover_start)
    w_mid = _mockup_rates(case, t[:-1] + 0.5 * dt, hover_start)
    w_list = w.tolist()
    w_mid_list = w_mid.tolist()
    q = np.empty((n, 4))
    q[0] = np.array([1.0, 0.0, 0.0, 0.0])
    qk = [1.0, 0.0, 0.0, 0.0]
    for k in range(1, n):
        qk = _rk4_quat_step(qk, w_list[k - 1], w_mid_list[k - 1], w_list[k], dt)
        q[k] = qk
    return Trajectory(
        name=case, t=t, q=q, w=w, rddot=np.zeros((n, 3)), rate=rate
    )


def load_trajectory(path):
    """Parse and validate a trajectory CSV file."""
    rows = []
    header_seen = False
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = [s.strip() for s in line.split(",")]
            if not header_seen:
                if [s.lower() for s in fields] != CSV_COLUMNS:
                    raise ParseError(
                        f"header must be {','.join(CSV_COLUMNS)}", lineno
                    )
                header_seen = True
                continue
            if len(fields) != len(CSV_COLUMNS):
                raise ParseError(
                    f"expected {len(CSV_COLUMNS)} columns, got {len(fields)}", lineno
                )
            values = []
            for col, s in enumerate(fields, 1):
                try:
                    values.append(float(s))
                except ValueError:
                    raise ParseError(f"not a number: {s!r}", lineno, col) from None
            rows.append(values)
    if not header_seen:
        raise ParseError("missing header row", 1)
    if len(rows) < 2:
        raise ValidationError(f"{path}: need at least 2 samples, got {len(rows)}")

    data = np.array(rows)
    t = data[:, 0]
    q = data[:, 1:5]
    if np.any(np.diff(t) <= 0.0):
        k = int(np.argmax(np.diff(t) <= 0.0))
        raise ValidationError(f"{path}: time not strictly increasing at sample {k + 1}")
    norms = np.linalg.norm(q, axis=1)
    bad = np.abs(norms - 1.0) > 1e-3
    if np.any(bad):
        k = int(np.argmax(bad))
        raise ValidationError(
            f"{path}: quaternion norm {norms[k]:.6f} at sample {k} (tolerance 1e-3)"
        )
    n = len(t)
    return Trajectory(
        name=str(path),
        t=t,
        q=q / norms[:, None],
        w=data[:, 5:8],
        rddot=data[:, 8:11],
        rate=(n - 1) / (t[-1] - t[0]),
    )


def save_trajectory(traj, path):
    """Write a trajectory in the CSV ingestion format, full float precision."""
    with open(path, "w", encoding="utf-8") as f:
        f.write(",".join(CSV_COLUMNS) + "\n")
        for k in range(len(traj.t)):
            row = [traj.t[k], *traj.q[k], *traj.w[k], *traj.rddot[k]]
            f.write(",".join(repr(float(x)) for x in row) + "\n")


def resample(traj, rate):
    """Resample to a uniform rate: slerp for attitude, linear for rates.

    Endpoints are preserved exactly.
    """
    if rate <= 0.0:
        raise ValueError("rate must be positive")
    duration = traj.t[-1] - traj.t[0]
    n = round(duration * rate) + 1
    t_new = traj.t[0] + np.arange(n) / rate
    t_new[-1] = traj.t[-1]
    w_new = np.column_stack([np.interp(t_new, traj.t, traj.w[:, i]) for i in range(3)])
    a_new = np.column_stack(
        [np.interp(t_new, traj.t, traj.rddot[:, i]) for i in range(3)]
    )
    q_new = np.empty((n, 4))
    idx = np.clip(np.searchsorted(traj.t, t_new, side="right") - 1, 0, len(traj.t) - 2)
    for k in range(n):
        i = idx[k]
        span = traj.t[i + 1] - traj.t[i]
        u = (t_new[k] - traj.t[i]) / span
        q_new[k] = normalize(slerp(traj.q[i], traj.q[i + 1], float(np.clip(u, 0.0, 1.0))))
    return Trajectory(
        name=traj.name, t=t_new, q=q_new, w=w_new, rddot=a_new, rate=rate
    )
