"""Sensor corruption models: accelerometer, gyroscope, magnetometer.

The accelerometer measures specific force (gravity reaction plus translation
acceleration) rotated into the body frame; the gyroscope adds a slowly
drifting bias generated as a low-pass-filtered random walk; the magnetometer
measures the local field in the body frame.  Each sensor draws from its own
RNG stream so enabling or reconfiguring one never shifts another's draws.
"""

from dataclasses import dataclass, field

import numpy as np

from .metrics import DEG2RAD
from .rotations import quat_conjugate, quat_transform


@dataclass
class SensorConfig:
    accel_noise_std: float = 0.5            # m/s^2 per axis
    gyro_noise_std: float = 0.05 * DEG2RAD  # rad/s per axis
    gyro_bias_walk_std: float = 0.2 * DEG2RAD  # rad/s accumulated per sqrt(minute)
    gyro_bias_lpf_tau: float = 5.0          # s, single-pole IIR on the walk
    mag_noise_std: float = 0.015            # gauss per axis
    gravity: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 9.81]))
    mag_field: np.ndarray = field(default_factory=lambda: np.array([0.21, 0.0, 0.43]))
    sample_rate: float = 100.0              # Hz, shared by all sensors
    seed: int = 0

    def __post_init__(self):
        self.gravity = np.asarray(self.gravity, dtype=float)
        self.mag_field = np.asarray(self.mag_field, dtype=float)


@dataclass
class TruthSample:
    """Ground-truth kinematic state at one timestamp."""

    t: float
    q: np.ndarray       # body -> inertial attitude
    w: np.ndarray       # body angular velocity, rad/s
    rddot: np.ndarray   # inertial translation acceleration, m/s^2


@dataclass
class GyroBiasState:
    """Random-walk state and the low-pass-filtered bias actually applied."""

    b_raw: np.ndarray = field(default_factory=lambda: np.zeros(3))
    b: np.ndarray = field(default_factory=lambda: np.zeros(3))


@dataclass
class SensorSample:
    t: float
    accel: np.ndarray
    gyro: np.ndarray
    mag: np.ndarray
    true_bias: np.ndarray  # logged for bias-error metrics


def step_gyro_bias(state, cfg, dt, rng):
    """Advance the gyro bias by dt: random-walk step, then single-pole LPF.

    The walk's per-step std scales with sqrt(dt) so the accumulated drift is
    independent of sample rate.
    """
    step_std = cfg.gyro_bias_walk_std * np.sqrt(dt / 60.0)
    b_raw = state.b_raw + rng.normal(0.0, 1.0, 3) * step_std
    if cfg.gyro_bias_lpf_tau <= 0.0:
        b = b_raw.copy()
    else:
        alpha = dt / cfg.gyro_bias_lpf_tau
        b = state.b + alpha * (b_raw - state.b)
    return GyroBiasState(b_raw=b_raw, b=b)


def _to_body(q, v):
    return quat_transform(quat_conjugate(q), v)


def simulate_accel(truth, cfg, rng):
    """Accelerometer: (gravity + rddot) in body coordinates plus white noise."""
    return _to_body(truth.q, cfg.gravity + truth.rddot) + rng.normal(
        0.0, 1.0, 3
    ) * cfg.accel_noise_std


def simulate_gyro(truth, bias, cfg, rng):
    """Gyroscope: true rate plus filtered bias plus white noise."""
    return truth.w + bias.b + rng.normal(0.0, 1.0, 3) * cfg.gyro_noise_std


def simulate_mag(truth, cfg, rng):
    """Magnetometer: inertial field in body coordinates plus white noise."""
    return _to_body(truth.q, cfg.mag_field) + rng.normal(0.0, 1.0, 3) * cfg.mag_noise_std


class SensorSimulator:
    """Streams corrupted sensor samples for a truth trajectory.

    Owns four independent RNG streams (accel, gyro noise, bias walk, mag)
    spawned from the configured seed, so identical seed + config + trajectory
    gives bit-identical output.
    """

    def __init__(self, cfg):
        self.cfg = cfg
        seq = np.random.SeedSequence(cfg.seed).spawn(4)
        self._rng_accel = np.random.default_rng(seq[0])
        self._rng_gyro = np.random.default_rng(seq[1])
        self._rng_bias = np.random.default_rng(seq[2])
        self._rng_mag = np.random.default_rng(seq[3])
        self.bias = GyroBiasState()

    def sample(self, truth, dt=None):
        """Corrupt one truth sample; dt advances the bias walk (None: first sample)."""
        if dt is not None:
            self.bias = step_gyro_bias(self.bias, self.cfg, dt, self._rng_bias)
        return SensorSample(
            t=truth.t,
            accel=simulate_accel(truth, self.cfg, self._rng_accel),
            gyro=simulate_gyro(truth, self.bias, self.cfg, self._rng_gyro),
            mag=simulate_mag(truth, self.cfg, self._rng_mag),
            true_bias=self.bias.b.copy(),
        )

    def stream(self, truth_samples):
        """Corrupt a whole trajectory into a list of SensorSample.

        Vectorized, but draw-for-draw identical to calling sample() in a
        loop: each sensor stream just consumes its own RNG sequentially.
        """
        n = len(truth_samples)
        cfg = self.cfg
        t = np.array([s.t for s in truth_samples])
        q = np.array([s.q for s in truth_samples])
        w = np.array([s.w for s in truth_samples])
        rddot = np.array([s.rddot for s in truth_samples])

        b_raw = np.empty((n, 3))
        b = np.empty((n, 3))
        b_raw[0] = self.bias.b_raw
        b[0] = self.bias.b
        if n > 1:
            dts = np.diff(t)
            steps = self._rng_bias.normal(0.0, 1.0, (n - 1, 3)) * (
                cfg.gyro_bias_walk_std * np.sqrt(dts / 60.0)
            )[:, None]
            b_raw[1:] = self.bias.b_raw + np.cumsum(steps, axis=0)
            if cfg.gyro_bias_lpf_tau <= 0.0:
                b[1:] = b_raw[1:]
            else:
                prev = b[0]
                alphas = dts / cfg.gyro_bias_lpf_tau
                for k in range(1, n):
                    prev = prev + alphas[k - 1] * (b_raw[k] - prev)
                    b[k] = prev
        self.bias = GyroBiasState(b_raw=b_raw[-1].copy(), b=b[-1].copy())

        accel = _to_body(q, cfg.gravity + rddot) + self._rng_accel.normal(
            0.0, 1.0, (n, 3)
        ) * cfg.accel_noise_std
        gyro = w + b + self._rng_gyro.normal(0.0, 1.0, (n, 3)) * cfg.gyro_noise_std
        mag = _to_body(q, np.broadcast_to(cfg.mag_field, (n, 3))) + self._rng_mag.normal(
            0.0, 1.0, (n, 3)
        ) * cfg.mag_noise_std
        return [
            SensorSample(
                t=float(t[k]), accel=accel[k], gyro=gyro[k], mag=mag[k], true_bias=b[k]
            )
            for k in range(n)
        ]
