"""Batch runner: execute scenario x estimator x test-case simulations.

Each run corrupts a truth trajectory into sensor streams, feeds the chosen
estimator one tick at a time (sense, detect, select gains, propagate,
update accel, update mag, record error), and reduces the error series to
the four scalar metrics.  Sensor streams depend only on (seed, test case),
never on the estimator or scenario, so every estimator sees identical data.
"""

import json
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import cf as cf_mod
from . import ekf as ekf_mod
from . import ukf as ukf_mod
from .config import (
    ScenarioConfig,
    SimParams,
    canonical_scenarios,
    p0_matrix,
    process_noise_matrix,
)
from .errors import AttsimError, ConfigError, DegenerateInput
from .frontend import (
    DynamicsDetector,
    MagUsage,
    accel_observation,
    assumed_field,
    mag_observation,
    select_gains,
)
from .metrics import (
    MetricsReport,
    euler_angle_series,
    euler_vector_error_series,
    wrap_angle,
)
from .sensors import SensorSimulator
from .trajectories import (
    CANONICAL_CASES,
    MOCKUP_CASES,
    gen_mockup,
    load_trajectory,
    resample,
)

ESTIMATORS = ("cf", "ekf", "ukf")

SUMMARY_HEADER = "scenario,testcase,estimator,MaxEVz,MaxEVxy,FinH,FinPR"


@dataclass
class RunConfig:
    estimator: str
    scenario: ScenarioConfig
    testcase: str
    seed: int
    params: SimParams = field(default_factory=SimParams)
    trajectory_dir: str | None = None


@dataclass
class RunResult:
    scenario: str
    testcase: str
    estimator: str
    seed: int
    metrics: MetricsReport
    t: np.ndarray
    dav: np.ndarray          # (n, 3) error Euler vector, rad
    euler_err: np.ndarray    # (n, 3) heading/pitch/roll error, rad
    bias_err: np.ndarray     # (n, 3) rad/s
    mu_f: np.ndarray         # (n,) detector filtered deviation
    low_dynamics: np.ndarray  # (n,) 0/1
    accel: np.ndarray
    gyro: np.ndarray
    q_true: np.ndarray
    q_est: np.ndarray
    mag_update_count: int
    accel_skip_count: int
    wall_time: float


def case_entropy(seed, testcase):
    """Per-case RNG entropy, independent of estimator and scenario."""
    return [int(seed), int.from_bytes(testcase.encode("utf-8"), "big")]


def resolve_trajectory(cfg):
    """Generate a mockup case or load (and resample) a recorded trajectory."""
    p = cfg.params
    if cfg.testcase in MOCKUP_CASES:
        return gen_mockup(cfg.testcase, rate=p.sample_rate, duration=p.duration)
    path = Path(cfg.testcase)
    if not path.exists() and cfg.trajectory_dir is not None:
        path = Path(cfg.trajectory_dir) / f"{cfg.testcase}.csv"
    if not path.exists():
        raise ConfigError(
            f"test case {cfg.testcase!r} is not a mockup case and no trajectory "
            f"file was found at {path}"
        )
    traj = load_trajectory(path)
    traj.name = cfg.testcase
    if abs(traj.rate - p.sample_rate) > 1e-9:
        traj = resample(traj, p.sample_rate)
    return traj


def generate_sensor_stream(cfg, traj):
    """Corrupt the truth into sensor samples; identical for all estimators."""
    sensors = replace(cfg.params.sensors, sample_rate=cfg.params.sample_rate)
    sensors.seed = case_entropy(cfg.seed, cfg.testcase)
    return SensorSimulator(sensors).stream(traj.samples())


def run_case(cfg, traj=None, stream=None):
    """Execute one run; deterministic given the config.

    ``traj`` and ``stream`` may be passed in to share work across estimators
    runs of the same (seed, testcase); they are never modified.
    """
    if cfg.estimator not in ESTIMATORS:
        raise ConfigError(f"unknown estimator {cfg.estimator!r}")
    p = cfg.params
    scen = cfg.scenario
    if traj is None:
        traj = resolve_trajectory(cfg)
    if stream is None:
        stream = generate_sensor_stream(cfg, traj)

    t0 = time.perf_counter()
    gravity = p.sensors.gravity
    mag_on = scen.mag_meas_usage is not MagUsage.NONE
    field_n = (
        assumed_field(p.sensors.mag_field, scen.mag_field_knowledge, p.declination)
        if mag_on
        else None
    )
    q_mat = process_noise_matrix(p)
    detector = DynamicsDetector(p.detector, p.sample_rate)

    est = cfg.estimator
    if est == "cf":
        state = cf_mod.CfState(q=traj.q[0].copy())
    elif est == "ekf":
        state = ekf_mod.EkfState(q=traj.q[0].copy(), P=p0_matrix(p))
    else:
        state = ukf_mod.UkfState(q=traj.q[0].copy(), P=p0_matrix(p))
    sigma = None

    n = len(traj.t)
    mu_f = np.empty(n)
    low_dyn = np.zeros(n)
    accel = np.empty((n, 3))
    gyro = np.empty((n, 3))
    true_bias = np.empty((n, 3))
    q_est = np.empty((n, 4))
    b_est = np.empty((n, 3))
    mag_updates = 0
    accel_skips = 0

    for k in range(n):
        s = stream[k]
        detector.update(s.accel)
        low = detector.low_dynamics
        if k > 0:
            dt = float(traj.t[k] - traj.t[k - 1])
            if est == "cf":
                weights = select_gains(p.cf, low, scen.dynamic_gains)
                state = cf_mod.cf_propagate(state, s.gyro, dt)
                obs_list = []
                try:
                    obs_list.append(accel_observation(s.accel, gravity))
                except DegenerateInput:
                    accel_skips += 1
                if mag_on:
                    try:
                        obs_list.append(
                            mag_observation(s.mag, state.q, field_n, scen.mag_meas_usage)
                        )
                        mag_updates += 1
                    except DegenerateInput:
                        pass
                state = cf_mod.cf_update(state, obs_list, weights)
            else:
                meas = select_gains(
                    p.ekf_meas if est == "ekf" else p.ukf_meas,
                    low,
                    scen.dynamic_gains,
                )
                if est == "ekf":
                    state = ekf_mod.ekf_propagate(state, s.gyro, dt, q_mat)
                else:
                    state, sigma = ukf_mod.ukf_propagate(
                        state, s.gyro, dt, q_mat, p.ukf_lambda
                    )
                try:
                    obs = accel_observation(s.accel, gravity)
                    if est == "ekf":
                        state = ekf_mod.ekf_update(state, obs, meas.r_for(obs.kind))
                    else:
                        state = ukf_mod.ukf_update(
                            state, obs, meas.r_for(obs.kind), sigma, p.ukf_lambda
                        )
                except DegenerateInput:
                    accel_skips += 1
                if mag_on:
                    try:
                        obs = mag_observation(
                            s.mag, state.q, field_n, scen.mag_meas_usage
                        )
                        if est == "ekf":
                            state = ekf_mod.ekf_update(state, obs, meas.r_for(obs.kind))
                        else:
                            state = ukf_mod.ukf_update(
                                state, obs, meas.r_for(obs.kind), sigma, p.ukf_lambda
                            )
                        mag_updates += 1
                    except DegenerateInput:
                        pass
        mu_f[k] = detector.mu_f
        low_dyn[k] = 1.0 if low else 0.0
        accel[k] = s.accel
        gyro[k] = s.gyro
        true_bias[k] = s.true_bias
        q_est[k] = state.q
        b_est[k] = state.b

    dav = euler_vector_error_series(q_est, traj.q)
    euler_err = wrap_angle(euler_angle_series(q_est) - euler_angle_series(traj.q))
    bias_err = b_est - true_bias
    metrics = MetricsReport(
        max_ev_z=float(np.max(np.abs(dav[:, 2]))) * 180.0 / np.pi,
        max_ev_xy=float(np.max(np.abs(dav[:, :2]))) * 180.0 / np.pi,
        fin_h=abs(float(euler_err[-1, 0])) * 180.0 / np.pi,
        fin_pr=float(np.max(np.abs(euler_err[-1, 1:]))) * 180.0 / np.pi,
    )
    return RunResult(
        scenario=scen.name,
        testcase=traj.name,
        estimator=est,
        seed=cfg.seed,
        metrics=metrics,
        t=traj.t.copy(),
        dav=dav,
        euler_err=euler_err,
        bias_err=bias_err,
        mu_f=mu_f,
        low_dynamics=low_dyn,
        accel=accel,
        gyro=gyro,
        q_true=traj.q.copy(),
        q_est=q_est,
        mag_update_count=mag_updates,
        accel_skip_count=accel_skips,
        wall_time=time.perf_counter() - t0,
    )


@dataclass
class MatrixOutcome:
    config: RunConfig
    result: RunResult | None
    error: str | None


def run_matrix(configs):
    """Run every config, sharing sensor streams per (seed, testcase).

    A failing run produces an error outcome; the matrix continues.
    """
    outcomes = []
    cache = {}
    for cfg in configs:
        try:
            key = (cfg.seed, cfg.testcase, cfg.params.sample_rate, cfg.params.duration)
            if key not in cache:
                traj = resolve_trajectory(cfg)
                cache[key] = (traj, generate_sensor_stream(cfg, traj))
            traj, stream = cache[key]
            outcomes.append(MatrixOutcome(cfg, run_case(cfg, traj, stream), None))
        except (AttsimError, OSError) as exc:
            outcomes.append(MatrixOutcome(cfg, None, f"{type(exc).__name__}: {exc}"))
    return outcomes


def _case_order(name):
    return (CANONICAL_CASES.index(name), "") if name in CANONICAL_CASES else (
        len(CANONICAL_CASES),
        name,
    )


def sort_outcomes(outcomes, scenario_order):
    s_order = {name: i for i, name in enumerate(scenario_order)}
    return sorted(
        outcomes,
        key=lambda o: (
            s_order.get(o.config.scenario.name, len(s_order)),
            o.config.scenario.name,
            _case_order(o.config.testcase),
            ESTIMATORS.index(o.config.estimator),
        ),
    )


def _params_to_jsonable(params):
    def conv(x):
        if isinstance(x, np.ndarray):
            return x.tolist()
        if isinstance(x, dict):
            return {k: conv(v) for k, v in x.items()}
        if isinstance(x, (list, tuple)):
            return [conv(v) for v in x]
        if hasattr(x, "value") and hasattr(x, "name"):  # enums
            return x.value
        return x

    return conv(asdict(params))


def emit_outputs(outcomes, outdir, scenario_order=None, manifest=None,
                 write_timeseries=True):
    """Write summary.csv, per-run timeseries CSVs, failures.txt, manifest.json.

    Float fields use repr so a rerun of the same manifest is bit-identical.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    if scenario_order is None:
        scenario_order = list(canonical_scenarios())
    ordered = sort_outcomes(outcomes, scenario_order)

    lines = [SUMMARY_HEADER]
    failures = []
    for o in ordered:
        base = f"{o.config.scenario.name},{o.config.testcase},{o.config.estimator}"
        if o.result is None:
            lines.append(f"{base},,,,")
            failures.append(f"{base}: {o.error}")
        else:
            m = o.result.metrics
            lines.append(
                f"{base},{m.max_ev_z!r},{m.max_ev_xy!r},{m.fin_h!r},{m.fin_pr!r}"
            )
    (outdir / "summary.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    if failures:
        (outdir / "failures.txt").write_text("\n".join(failures) + "\n", encoding="utf-8")

    if write_timeseries:
        for o in ordered:
            if o.result is None:
                continue
            _write_timeseries(o.result, outdir)

    if manifest is not None:
        (outdir / "manifest.json").write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    return len(failures)


TIMESERIES_HEADER = (
    "t,ax,ay,az,gx,gy,gz,"
    "qw_true,qx_true,qy_true,qz_true,qw_est,qx_est,qy_est,qz_est,"
    "ev_x,ev_y,ev_z,err_heading,err_pitch,err_roll,"
    "bias_err_x,bias_err_y,bias_err_z,mu_f,low_dynamics"
)


def _write_timeseries(r, outdir):
    name = f"ts_{r.scenario}_{r.testcase}_{r.estimator}.csv"
    cols = np.column_stack(
        [
            r.t,
            r.accel,
            r.gyro,
            r.q_true,
            r.q_est,
            r.dav,
            r.euler_err,
            r.bias_err,
            r.mu_f,
            r.low_dynamics,
        ]
    )
    with open(outdir / name, "w", encoding="utf-8") as f:
        f.write(TIMESERIES_HEADER + "\n")
        for row in cols:
            f.write(",".join(repr(float(x)) for x in row) + "\n")


def build_manifest(seed, params, scenario_names, testcases, estimators):
    return {
        "seed": seed,
        "scenarios": list(scenario_names),
        "testcases": list(testcases),
        "estimators": list(estimators),
        "params": _params_to_jsonable(params),
    }
