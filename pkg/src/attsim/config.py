"""Harness configuration: estimator tunings, scenarios, INI file loading.

One flat key = value file (INI sections) carries everything the batch
runner needs; the coded defaults below are the canonical parameter set and
an absent file means "use them as is".
"""

import configparser
from dataclasses import dataclass, field, replace

import numpy as np

from .cf import CfWeights
from .errors import ConfigError
from .frontend import DetectorConfig, GainSchedule, MagKnowledge, MagUsage
from .metrics import DEG2RAD
from .sensors import SensorConfig


@dataclass
class KalmanMeas:
    """Measurement noise standard deviations; R = std^2 I per observation."""

    accel_std: float
    mag_std: float

    def __post_init__(self):
        self._r_accel = self.accel_std**2 * np.eye(3)
        self._r_mag = self.mag_std**2 * np.eye(3)

    def r_for(self, kind):
        from .frontend import ObsKind

        return self._r_accel if kind is ObsKind.ACCEL else self._r_mag


@dataclass
class ScenarioConfig:
    name: str
    mag_field_knowledge: MagKnowledge | None
    mag_meas_usage: MagUsage
    dynamic_gains: bool


def canonical_scenarios():
    return {
        "nominal": ScenarioConfig(
            "nominal", MagKnowledge.DECLINATION_ONLY, MagUsage.HORIZONTAL, False
        ),
        "no_mag": ScenarioConfig("no_mag", None, MagUsage.NONE, False),
        "3D_mag": ScenarioConfig("3D_mag", MagKnowledge.XYZ, MagUsage.XYZ, False),
        "dynamic_gains": ScenarioConfig(
            "dynamic_gains", MagKnowledge.DECLINATION_ONLY, MagUsage.HORIZONTAL, True
        ),
    }


@dataclass
class SimParams:
    """Everything a run needs besides the scenario, test case, and seed."""

    sensors: SensorConfig = field(default_factory=SensorConfig)
    cf: GainSchedule = field(
        default_factory=lambda: GainSchedule(
            nominal=CfWeights(w_a_accel=0.0002, w_a_mag=0.002, w_b=0.03),
            low_dyn=CfWeights(w_a_accel=0.002, w_a_mag=0.02, w_b=0.03),
        )
    )
    ekf_meas: GainSchedule = field(
        default_factory=lambda: GainSchedule(
            nominal=KalmanMeas(accel_std=30.0, mag_std=0.47),
            low_dyn=KalmanMeas(accel_std=4.9, mag_std=0.094),
        )
    )
    ukf_meas: GainSchedule = field(
        default_factory=lambda: GainSchedule(
            nominal=KalmanMeas(accel_std=10.0, mag_std=0.24),
            low_dyn=KalmanMeas(accel_std=4.9, mag_std=0.094),
        )
    )
    # process noise: attitude std per sqrt(second), bias walk std per sqrt(minute)
    process_att_std: float = 1.0 * DEG2RAD
    process_bias_walk_std: float = 0.5 * DEG2RAD
    p0_att_std: float = 1.0 * DEG2RAD
    p0_bias_std: float = 0.1 * DEG2RAD
    ukf_lambda: float = 1.0
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    declination: float | None = None
    sample_rate: float = 100.0
    duration: float = 120.0
    scenarios: dict = field(default_factory=canonical_scenarios)


def process_noise_matrix(params):
    """6x6 continuous-time process noise (per-second growth rates)."""
    q_att = params.process_att_std**2
    q_bias = params.process_bias_walk_std**2 / 60.0
    return np.diag([q_att] * 3 + [q_bias] * 3)


def p0_matrix(params):
    return np.diag([params.p0_att_std**2] * 3 + [params.p0_bias_std**2] * 3)


def _vec(text):
    return np.array([float(s) for s in text.split(",")])


def _bool(text):
    t = text.strip().lower()
    if t in ("on", "true", "1", "yes"):
        return True
    if t in ("off", "false", "0", "no"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _scenario_from_section(name, section):
    usage = MagUsage(section.get("mag_meas_usage", "horizontal"))
    knowledge = None
    if usage is not MagUsage.NONE:
        knowledge = MagKnowledge(
            section.get("mag_field_knowledge", "declination_only")
        )
    return ScenarioConfig(
        name, knowledge, usage, _bool(section.get("dynamic_gains", "off"))
    )


def load_params(path):
    """Load SimParams from an INI file; unspecified keys keep their defaults."""
    ini = configparser.ConfigParser()
    read = ini.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    p = SimParams()
    try:
        if ini.has_section("sim"):
            s = ini["sim"]
            p.sample_rate = s.getfloat("sample_rate", p.sample_rate)
            p.duration = s.getfloat("duration", p.duration)
        if ini.has_section("sensors"):
            s = ini["sensors"]
            p.sensors = replace(
                p.sensors,
                accel_noise_std=s.getfloat("accel_noise_std", p.sensors.accel_noise_std),
                gyro_noise_std=s.getfloat(
                    "gyro_noise_std_deg", p.sensors.gyro_noise_std / DEG2RAD
                )
                * DEG2RAD,
                gyro_bias_walk_std=s.getfloat(
                    "gyro_bias_walk_deg_per_min",
                    p.sensors.gyro_bias_walk_std / DEG2RAD,
                )
                * DEG2RAD,
                gyro_bias_lpf_tau=s.getfloat(
                    "gyro_bias_lpf_tau", p.sensors.gyro_bias_lpf_tau
                ),
                mag_noise_std=s.getfloat("mag_noise_std", p.sensors.mag_noise_std),
                gravity=_vec(s.get("gravity", "0.0, 0.0, 9.81")),
                mag_field=_vec(s.get("mag_field", "0.21, 0.0, 0.43")),
            )
            if "declination_deg" in s:
                p.declination = s.getfloat("declination_deg") * DEG2RAD
        if ini.has_section("cf"):
            s = ini["cf"]
            p.cf = GainSchedule(
                nominal=CfWeights(
                    w_a_accel=s.getfloat("w_a_accel", 0.0002),
                    w_a_mag=s.getfloat("w_a_mag", 0.002),
                    w_b=s.getfloat("w_b", 0.03),
                ),
                low_dyn=CfWeights(
                    w_a_accel=s.getfloat("low_dyn_w_a_accel", 0.002),
                    w_a_mag=s.getfloat("low_dyn_w_a_mag", 0.02),
                    w_b=s.getfloat("w_b", 0.03),
                ),
            )
        if ini.has_section("ekf"):
            s = ini["ekf"]
            p.ekf_meas = GainSchedule(
                nominal=KalmanMeas(
                    s.getfloat("r_accel_std", 30.0), s.getfloat("r_mag_std", 0.47)
                ),
                low_dyn=KalmanMeas(
                    s.getfloat("low_dyn_r_accel_std", 4.9),
                    s.getfloat("low_dyn_r_mag_std", 0.094),
                ),
            )
        if ini.has_section("ukf"):
            s = ini["ukf"]
            p.ukf_meas = GainSchedule(
                nominal=KalmanMeas(
                    s.getfloat("r_accel_std", 10.0), s.getfloat("r_mag_std", 0.24)
                ),
                low_dyn=KalmanMeas(
                    s.getfloat("low_dyn_r_accel_std", 4.9),
                    s.getfloat("low_dyn_r_mag_std", 0.094),
                ),
            )
            p.ukf_lambda = s.getfloat("lambda", p.ukf_lambda)
        if ini.has_section("process"):
            s = ini["process"]
            p.process_att_std = s.getfloat("att_std_deg", 1.0) * DEG2RAD
            p.process_bias_walk_std = s.getfloat("bias_walk_deg_per_min", 0.5) * DEG2RAD
            p.p0_att_std = s.getfloat("p0_att_std_deg", 1.0) * DEG2RAD
            p.p0_bias_std = s.getfloat("p0_bias_std_deg_s", 0.1) * DEG2RAD
        if ini.has_section("detector"):
            s = ini["detector"]
            p.detector = DetectorConfig(
                t_high=s.getfloat("t_high", 2.0),
                t_low=s.getfloat("t_low", 0.7),
                window_s=s.getfloat("window_s", 5.0),
                gravity_mag=s.getfloat("gravity_mag", 9.81),
            )
        for section in ini.sections():
            if section.startswith("scenario."):
                name = section.split(".", 1)[1]
                p.scenarios[name] = _scenario_from_section(name, ini[section])
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"bad value in {path}: {exc}") from None
    return p
