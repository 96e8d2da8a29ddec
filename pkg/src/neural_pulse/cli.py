"""Command-line entry point: ``neural-pulse <subcommand> --config run.json``.

Exit codes: 0 success, 1 hypothesis/config error, 2 numerical failure,
3 verification failure.
"""

import argparse
import csv
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .config import FORMATS, RunConfig
from .errors import NeuralPulseError
from .front import evans_front, phi_f_prime, solve_front_speed
from .jacobian import jacobian_at_base, partials_f, partials_g
from .kernels import check_hypotheses, kernel_from_config
from .pulse import ModelParams, solve_pulse
from .simulator import GridConfig, initial_bump, run_pulse_experiment
from .verification import verify_pulse

log = logging.getLogger("neural_pulse")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_VERIFY = 0, 1, 2, 3
EVANS_LAMBDAS = (-0.5, -0.25, -0.1, 0.0, 0.1, 0.25, 0.5, 1.0, 3.0)


def _clean(obj):
    """JSON-ready copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj) if math.isfinite(obj) else None
    return obj


def load_schema(name):
    text = resources.files("neural_pulse").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


class Output:
    def __init__(self, out_dir, fmt):
        self.dir = Path(out_dir)
        self.fmt = fmt
        self.dir.mkdir(parents=True, exist_ok=True)

    def json(self, name, schema, payload):
        payload = _clean(payload)
        jsonschema.validate(payload, load_schema(schema))
        if self.fmt in ("json", "both"):
            path = self.dir / f"{name}.json"
            path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
            log.info("wrote %s", path)
        return payload

    def csv(self, name, header, rows):
        if self.fmt not in ("csv", "both"):
            return
        path = self.dir / f"{name}.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for row in rows:
                w.writerow([_fmt(v) for v in row])
        log.info("wrote %s", path)


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return v


def _setup(cfg):
    kernel = kernel_from_config(cfg.kernel, cfg.base_dir)
    check_hypotheses(kernel, cfg.theta, cfg.gamma).raise_if_failed()
    return kernel


def cmd_front(cfg, out):
    kernel = _setup(cfg)
    front = solve_front_speed(kernel, cfg.theta)
    evans = [{"lambda": lam, "value": evans_front(front, lam)} for lam in EVANS_LAMBDAS]
    out.json("front", "front", {
        "c_f": front.speed, "residual": front.residual,
        "phi_f_prime": phi_f_prime(front.speed, kernel), "evans": evans,
        "theta": cfg.theta, "kernel": kernel.to_config()})
    zlo = -front.horizon(1e-8) if cfg.profile.z_min is None else cfg.profile.z_min
    zhi = front.horizon(1e-8) if cfg.profile.z_max is None else cfg.profile.z_max
    z = np.linspace(zlo, zhi, cfg.profile.n)
    out.csv("front_profile", ["z", "U_f", "U_f_prime"],
            zip(z, front.profile(z), front.profile_derivative(z)))
    return EXIT_OK


def _solve(cfg, kernel, eps, front=None):
    params = ModelParams(cfg.theta, cfg.gamma, eps)
    return solve_pulse(kernel, params, eps_max=cfg.solver.eps_max, tol=cfg.solver.tol,
                       max_iter=cfg.solver.max_iter, front=front, check=False)


def cmd_pulse(cfg, out):
    kernel = _setup(cfg)
    sol = _solve(cfg, kernel, cfg.epsilon)
    w = sol.wave
    ft, fc, _ = partials_f(w.tau, w.speed, w.epsilon, kernel, cfg.gamma, with_eps=False)
    gt, gc, _ = partials_g(w.tau, w.speed, w.epsilon, kernel, cfg.gamma, with_eps=False)
    out.json("pulse", "pulse", {
        "epsilon": w.epsilon, "c": w.speed, "a": w.width, "tau": w.tau,
        "iterations": sol.newton.iterations, "residual": sol.newton.residual,
        "det_J_estimate": ft * gc - fc * gt, "jacobian_condition": sol.newton.condition})
    lo, hi = sol.horizon(1e-8)
    zlo = lo if cfg.profile.z_min is None else cfg.profile.z_min
    zhi = hi if cfg.profile.z_max is None else cfg.profile.z_max
    z = np.linspace(zlo, zhi, cfg.profile.n)
    U, Q, dU, dQ = sol.profile(z)
    out.csv("pulse_profile", ["z", "U", "Q", "U_prime", "Q_prime"], zip(z, U, Q, dU, dQ))
    return EXIT_OK


def cmd_asymptotics(cfg, out):
    kernel = _setup(cfg)
    jb = jacobian_at_base(kernel, cfg.theta, cfg.gamma)
    payload = jb.to_dict()
    payload["predictions"] = [{"epsilon": e, "tau": jb.predict(e)[0], "c": jb.predict(e)[1]}
                              for e in cfg.epsilons]
    out.json("asymptotics", "asymptotics", payload)
    return EXIT_OK


def cmd_verify(cfg, out):
    kernel = _setup(cfg)
    front = solve_front_speed(kernel, cfg.theta)
    sol = _solve(cfg, kernel, cfg.epsilon, front)
    v = cfg.verification
    rep, orbit, s0 = verify_pulse(sol, front, hausdorff_bound=v.hausdorff_bound,
                                  resolution=v.resolution, z0=v.z0, delta=v.delta)
    payload = rep.to_dict()
    payload.update({"epsilon": cfg.epsilon, "c": sol.speed, "a": sol.width})
    out.json("verify", "verify", payload)
    rows = [("pulse", u, q) for u, q in orbit.points]
    for name, curve in s0.named().items():
        rows.extend((name, u, q) for u, q in curve.points)
    out.csv("orbits", ["curve", "U", "Q"], rows)
    return EXIT_OK if rep.passed else EXIT_VERIFY


def grid_from_options(opts, kernel, front_speed):
    extra = {k: getattr(opts, k) for k in ("t_end", "tracking_start", "record_every",
                                           "bump_center", "bump_width", "bump_height")}
    grid = GridConfig.for_front(kernel, front_speed, L=opts.L, h=opts.h, **extra)
    if opts.dt is not None:
        grid = GridConfig(**{**grid.__dict__, "dt": opts.dt})
    return grid


def _one_sided(cfg):
    flag = cfg.simulator.one_sided
    return cfg.epsilon > 0 if flag is None else bool(flag)


def cmd_simulate(cfg, out):
    kernel = _setup(cfg)
    front = solve_front_speed(kernel, cfg.theta)
    grid = grid_from_options(cfg.simulator, kernel, front.speed)
    params = ModelParams(cfg.theta, cfg.gamma, cfg.epsilon)
    init = initial_bump(grid, cfg.theta, front.speed, one_sided=_one_sided(cfg))
    res = run_pulse_experiment(grid, kernel, params, init, front_speed=front.speed)
    payload = res.to_dict()
    payload.update({"epsilon": cfg.epsilon, "c_f": front.speed,
                    "grid": {"L": grid.L, "n_points": grid.n_points, "h": grid.h,
                             "dt": grid.dt, "t_end": grid.t_end,
                             "tracking_start": grid.tracking_start},
                    "one_sided_seed": _one_sided(cfg)})
    out.json("simulate", "simulate", payload)
    out.csv("simulate_timeseries", ["t", "front_position", "back_position"],
            zip(res.times, res.front_positions, res.back_positions))
    out.csv("simulate_final", ["x", "u", "q"], zip(res.x, res.final.u, res.final.q))
    return EXIT_OK if res.status == "ok" else EXIT_NUMERICAL


def _sweep_row(cfg_dict, base_dir, eps):
    """One sweep entry; runs in a worker process."""
    cfg = RunConfig.from_dict(cfg_dict, base_dir)
    row = {"epsilon": eps, "tau": None, "c": None, "a": None, "d_H": None,
           "crossings": None, "first_order_error_tau": None, "first_order_error_c": None,
           "passed": False, "error": None, "exit_code": EXIT_OK}
    try:
        kernel = kernel_from_config(cfg.kernel, cfg.base_dir)
        front = solve_front_speed(kernel, cfg.theta)
        jb = jacobian_at_base(kernel, cfg.theta, cfg.gamma, front=front)
        sol = _solve(cfg, kernel, eps, front)
        v = cfg.verification
        rep, _, _ = verify_pulse(sol, front, hausdorff_bound=v.hausdorff_bound,
                                 resolution=v.resolution, z0=v.z0, delta=v.delta,
                                 regions=False)
        tau_p, c_p = jb.predict(eps)
        row.update(tau=sol.wave.tau, c=sol.speed, a=sol.width, d_H=rep.hausdorff,
                   crossings=len(rep.crossings), first_order_error_tau=sol.wave.tau - tau_p,
                   first_order_error_c=sol.speed - c_p, passed=rep.passed)
        if not rep.passed:
            row["exit_code"] = EXIT_VERIFY
    except NeuralPulseError as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
        row["exit_code"] = exc.exit_code
    return row


def cmd_sweep(cfg, out):
    _setup(cfg)
    eps_list = sorted(cfg.epsilons, reverse=True)
    data = cfg.to_dict()
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            rows = list(pool.map(_sweep_row, [data] * len(eps_list),
                                 [cfg.base_dir] * len(eps_list), eps_list))
    else:
        rows = [_sweep_row(data, cfg.base_dir, e) for e in eps_list]
    d_h = [r["d_H"] for r in rows]
    monotone = all(a is not None and b is not None and b < a
                   for a, b in zip(d_h, d_h[1:]))
    codes = [r["exit_code"] for r in rows]
    all_passed = all(c == EXIT_OK for c in codes)
    out.json("sweep", "sweep", {"rows": rows, "all_passed": all_passed,
                                "d_H_decreasing": monotone})
    cols = ["epsilon", "tau", "c", "a", "d_H", "crossings", "first_order_error_tau",
            "first_order_error_c", "passed"]
    out.csv("sweep", cols, ([r[k] for k in cols] for r in rows))
    if all_passed:
        return EXIT_OK
    return EXIT_VERIFY if EXIT_VERIFY in codes else max(codes)


COMMANDS = {"front": cmd_front, "pulse": cmd_pulse, "asymptotics": cmd_asymptotics,
            "verify": cmd_verify, "simulate": cmd_simulate, "sweep": cmd_sweep}


def build_parser():
    p = argparse.ArgumentParser(prog="neural-pulse", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--out", help="output directory (overrides config)")
    p.add_argument("--format", choices=FORMATS, help="output format (overrides config)")
    p.add_argument("--workers", type=int, help="parallel sweep workers (overrides config)")
    p.add_argument("--epsilon", type=float, help="epsilon (overrides config)")
    return p


def main(argv=None):
    logging.basicConfig(level=os.environ.get("NEURAL_PULSE_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.load(args.config)
        for key in ("out", "format", "workers", "epsilon"):
            val = getattr(args, key)
            if val is not None:
                setattr(cfg, key, val)
        cfg.validate()
        out = Output(cfg.out, cfg.format)
        code = COMMANDS[args.command](cfg, out)
    except NeuralPulseError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except jsonschema.ValidationError as exc:
        print(f"error: output failed schema validation: {exc.message}", file=sys.stderr)
        return EXIT_NUMERICAL
    return code


if __name__ == "__main__":
    sys.exit(main())
