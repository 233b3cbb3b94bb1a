"""Command line interface for the batch simulation harness.

Verbs: ``run`` (one case), ``matrix`` (scenario x case x estimator batch),
``gen-mockup`` (write a synthetic trajectory CSV), ``validate-trajectory``.
Exit codes: 0 full success, 1 any failed run/validation, 2 config error.
"""

import argparse
import json
import sys
from dataclasses import replace

from .config import SimParams, load_params
from .errors import AttsimError, ConfigError, TrajectoryError
from .harness import (
    ESTIMATORS,
    RunConfig,
    build_manifest,
    emit_outputs,
    run_case,
    run_matrix,
)
from .trajectories import MOCKUP_CASES, gen_mockup, load_trajectory, save_trajectory


def _add_common(p):
    p.add_argument("--config", help="INI parameter file")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--rate", type=float, help="sample rate, Hz")
    p.add_argument("--duration", type=float, help="run duration, s")
    p.add_argument("--trajectory-dir", help="directory with <testcase>.csv files")
    p.add_argument("--out", default="out", help="output directory")


def _load_common(args):
    params = load_params(args.config) if args.config else SimParams()
    if args.rate is not None:
        params.sample_rate = args.rate
    if args.duration is not None:
        params.duration = args.duration
    return params


def _scenario(params, name):
    try:
        return params.scenarios[name]
    except KeyError:
        raise ConfigError(
            f"unknown scenario {name!r}; available: {', '.join(params.scenarios)}"
        ) from None


def _cmd_run(args):
    params = _load_common(args)
    cfg = RunConfig(
        estimator=args.estimator,
        scenario=_scenario(params, args.scenario),
        testcase=args.testcase,
        seed=args.seed,
        params=params,
        trajectory_dir=args.trajectory_dir,
    )
    result = run_case(cfg)
    m = result.metrics
    print(
        f"{result.scenario},{result.testcase},{result.estimator}: "
        f"MaxEVz={m.max_ev_z:.4f} MaxEVxy={m.max_ev_xy:.4f} "
        f"FinH={m.fin_h:.4f} FinPR={m.fin_pr:.4f} deg "
        f"({result.wall_time:.2f} s)"
    )
    from .harness import MatrixOutcome

    emit_outputs(
        [MatrixOutcome(cfg, result, None)],
        args.out,
        scenario_order=[args.scenario],
        manifest=build_manifest(
            args.seed, params, [args.scenario], [args.testcase], [args.estimator]
        ),
    )
    return 0


def _params_from_manifest(doc):
    params = SimParams()
    d = doc.get("params", {})
    # keep it simple: rebuild only the fields the manifest can change
    import numpy as np

    from .cf import CfWeights
    from .config import KalmanMeas
    from .frontend import DetectorConfig, GainSchedule

    sensors = d.get("sensors", {})
    for key in (
        "accel_noise_std",
        "gyro_noise_std",
        "gyro_bias_walk_std",
        "gyro_bias_lpf_tau",
        "mag_noise_std",
        "sample_rate",
    ):
        if key in sensors:
            setattr(params.sensors, key, sensors[key])
    for key in ("gravity", "mag_field"):
        if key in sensors:
            setattr(params.sensors, key, np.asarray(sensors[key], dtype=float))
    for sched, cls in (("cf", CfWeights), ("ekf_meas", KalmanMeas), ("ukf_meas", KalmanMeas)):
        if sched in d:
            setattr(
                params,
                sched,
                GainSchedule(
                    nominal=cls(**{k: _maybe_arr(v) for k, v in d[sched]["nominal"].items()}),
                    low_dyn=cls(**{k: _maybe_arr(v) for k, v in d[sched]["low_dyn"].items()}),
                ),
            )
    for key in (
        "process_att_std",
        "process_bias_walk_std",
        "p0_att_std",
        "p0_bias_std",
        "ukf_lambda",
        "declination",
        "sample_rate",
        "duration",
    ):
        if key in d:
            setattr(params, key, d[key])
    if "detector" in d:
        params.detector = DetectorConfig(**d["detector"])
    return params


def _maybe_arr(v):
    import numpy as np

    return np.asarray(v, dtype=float) if isinstance(v, list) else v


def _cmd_matrix(args):
    if args.manifest:
        doc = json.loads(open(args.manifest, encoding="utf-8").read())
        params = _params_from_manifest(doc)
        seed = doc["seed"]
        scenario_names = doc["scenarios"]
        testcases = doc["testcases"]
        estimators = doc["estimators"]
    else:
        params = _load_common(args)
        seed = args.seed
        scenario_names = [s.strip() for s in args.scenarios.split(",")]
        testcases = [s.strip() for s in args.testcases.split(",")]
        estimators = [s.strip() for s in args.estimators.split(",")]
    for est in estimators:
        if est not in ESTIMATORS:
            raise ConfigError(f"unknown estimator {est!r}")
    configs = [
        RunConfig(
            estimator=est,
            scenario=_scenario(params, sc),
            testcase=tc,
            seed=seed,
            params=params,
            trajectory_dir=args.trajectory_dir,
        )
        for sc in scenario_names
        for tc in testcases
        for est in estimators
    ]
    outcomes = run_matrix(configs)
    failures = emit_outputs(
        outcomes,
        args.out,
        scenario_order=scenario_names,
        manifest=build_manifest(seed, params, scenario_names, testcases, estimators),
        write_timeseries=not args.no_timeseries,
    )
    done = sum(1 for o in outcomes if o.result is not None)
    print(f"{done}/{len(outcomes)} runs succeeded; outputs in {args.out}")
    for o in outcomes:
        if o.error:
            print(f"  FAILED {o.config.scenario.name},{o.config.testcase},"
                  f"{o.config.estimator}: {o.error}", file=sys.stderr)
    return 1 if failures else 0


def _cmd_gen_mockup(args):
    traj = gen_mockup(args.case, rate=args.rate, duration=args.duration)
    save_trajectory(traj, args.out)
    print(f"wrote {args.out}: {len(traj.t)} samples at {args.rate} Hz")
    return 0


def _cmd_validate(args):
    try:
        traj = load_trajectory(args.path)
    except TrajectoryError as exc:
        print(f"INVALID {args.path}: {exc}", file=sys.stderr)
        return 1
    print(
        f"OK {args.path}: {len(traj.t)} samples, "
        f"{traj.t[-1] - traj.t[0]:.3f} s at ~{traj.rate:.2f} Hz"
    )
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="attsim", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one scenario/testcase/estimator")
    p.add_argument("--estimator", choices=ESTIMATORS, required=True)
    p.add_argument("--testcase", required=True)
    p.add_argument("--scenario", default="nominal")
    _add_common(p)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("matrix", help="run a batch and emit metric tables")
    p.add_argument("--estimators", default=",".join(ESTIMATORS))
    p.add_argument("--testcases", default=",".join(MOCKUP_CASES))
    p.add_argument("--scenarios", default="nominal")
    p.add_argument("--manifest", help="rerun exactly from a manifest.json")
    p.add_argument("--no-timeseries", action="store_true")
    _add_common(p)
    p.set_defaults(func=_cmd_matrix)

    p = sub.add_parser("gen-mockup", help="write a mockup trajectory CSV")
    p.add_argument("--case", choices=MOCKUP_CASES, required=True)
    p.add_argument("--rate", type=float, default=100.0)
    p.add_argument("--duration", type=float, default=120.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen_mockup)

    p = sub.add_parser("validate-trajectory", help="check a trajectory CSV")
    p.add_argument("path")
    p.set_defaults(func=_cmd_validate)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except AttsimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
