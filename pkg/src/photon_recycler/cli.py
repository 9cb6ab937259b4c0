"""Command-line interface: simulate, sweep, report, validate.

Configuration comes from flags, from a JSON document (``--config``), or
both; flags override file values, and unknown keys in the document are
rejected by name.  Data outputs are deterministic: identical configuration
yields byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analytic, control, io as pr_io, sweep, validate
from .analytic import InfeasibleProtocolError
from .core import SimConfig, simulate_single_pass, simulate_two_pass
from .policies import CouplingPolicy
from .pulses import PulseSpec

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2

_PULSE_ALIASES = {"exp": "exp_decay", "exp_decay": "exp_decay",
                  "square": "square", "tabulated": "tabulated"}

_ALLOWED_KEYS = {
    "": {"command", "pulse", "policy1", "policy2", "sim", "grid",
         "output_path", "format"},
    "pulse": {"kind", "b_max", "gamma", "duration", "samples", "sample_step"},
    "policy1": {"kind", "kappa_max", "table", "table_step"},
    "policy2": {"kind", "kappa_max", "table", "table_step"},
    "sim": {"dt", "t_end", "delay", "kappa_i", "eps_a"},
    "grid": {"kappa_min", "kappa_max", "points"},
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str = ""
    pulse: dict = field(default_factory=dict)
    policy1: dict = field(default_factory=dict)
    policy2: dict = field(default_factory=dict)
    sim: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)
    output_path: str | None = None
    format: str = "csv"


def _check_keys(doc: dict, section: str) -> None:
    allowed = _ALLOWED_KEYS[section]
    for key in doc:
        if key not in allowed:
            where = f"{section}.{key}" if section else key
            raise ConfigError(f"unknown configuration key: {where!r}")


def load_config(path: str | None) -> RunConfig:
    cfg = RunConfig()
    if path is None:
        return cfg
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}")
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    _check_keys(doc, "")
    for section in ("pulse", "policy1", "policy2", "sim", "grid"):
        sub = doc.get(section, {})
        if sub is None:
            sub = {}
        if not isinstance(sub, dict):
            raise ConfigError(f"config section {section!r} must be an object")
        _check_keys(sub, section)
        setattr(cfg, section, dict(sub))
    if "command" in doc:
        cfg.command = doc["command"]
    if "output_path" in doc:
        cfg.output_path = doc["output_path"]
    if "format" in doc:
        cfg.format = doc["format"]
    return cfg


def _merge_flag(section: dict, key: str, value) -> None:
    if value is not None:
        section[key] = value


def _build_pulse(cfg: RunConfig) -> PulseSpec:
    spec = dict(cfg.pulse)
    kind = _PULSE_ALIASES.get(spec.pop("kind", "exp_decay"))
    if kind is None:
        raise ConfigError(f"unknown pulse kind {cfg.pulse.get('kind')!r}")
    try:
        if kind == "square":
            return PulseSpec.square(b_max=float(spec.get("b_max", 1.0)))
        if kind == "exp_decay":
            return PulseSpec.exp_decay(gamma=float(spec.get("gamma", 1.0)))
        samples = np.asarray(spec["samples"], dtype=float)
        return PulseSpec.tabulated(samples, float(spec["sample_step"]))
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"pulse: {exc}")


def _build_policy(section: dict, default_cap: float | None) -> CouplingPolicy | None:
    spec = dict(section)
    cap = spec.get("kappa_max", default_cap)
    if cap is None:
        return None
    cap = float(cap)
    kind = spec.get("kind", "greedy")
    try:
        if kind == "greedy":
            if cap == 0.0:
                return None
            return CouplingPolicy.greedy(cap)
        if kind == "constant":
            return CouplingPolicy.constant(cap)
        if kind == "tabulated":
            return CouplingPolicy.tabulated(np.asarray(spec["table"], dtype=float),
                                            float(spec["table_step"]), kappa_max=cap)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"policy: {exc}")
    raise ConfigError(f"unknown policy kind {kind!r}")


def _default_t_end(pulse: PulseSpec, kappa1_max: float, kappa2_max: float | None,
                   kappa_i: float) -> float:
    if pulse.kind == "square":
        return 2.0 / pulse.b_max**2
    if pulse.kind == "tabulated":
        return 2.0 * pulse.support()
    gamma = pulse.gamma
    if kappa_i == 0.0:
        return 40.0 / gamma
    nm = analytic.noisy_metrics(kappa1_max / gamma,
                                (kappa2_max or kappa1_max) / gamma,
                                kappa_i / gamma)
    stop = nm.T2 if (kappa2_max and nm.T2 is not None) else nm.T1
    return stop / gamma


def cmd_simulate(cfg: RunConfig) -> int:
    pulse = _build_pulse(cfg)
    policy1 = _build_policy(cfg.policy1, None)
    if policy1 is None:
        raise ConfigError("kappa1_max (or a policy1 section) is required")
    policy2 = _build_policy(cfg.policy2, None)

    sim = dict(cfg.sim)
    kappa_i = float(sim.get("kappa_i", 0.0))
    dt = float(sim.get("dt", 1e-4))
    t_end = sim.get("t_end")
    if t_end is None:
        t_end = _default_t_end(pulse, policy1.kappa_max,
                               policy2.kappa_max if policy2 else None, kappa_i)
    delay_selected = None
    delay = sim.get("delay")
    if policy2 is not None and delay is None:
        if pulse.kind == "exp_decay":
            delay_selected = analytic.select_delay_exp(
                policy1.kappa_max / pulse.gamma,
                policy2.kappa_max / pulse.gamma,
                kappa_i / pulse.gamma) / pulse.gamma
            t1 = analytic.capped_exit_time_exp(policy1.kappa_max / pulse.gamma,
                                               kappa_i / pulse.gamma) / pulse.gamma
            delay = control.snap_delay_up(max(delay_selected, t1), dt)
        elif pulse.kind == "tabulated":
            raise ConfigError("two-pass runs with a tabulated pulse need an "
                              "explicit sim.delay")
        else:
            probe = SimConfig(dt=dt, t_end=float(t_end), kappa_i=kappa_i,
                              eps_a=float(sim.get("eps_a", 1e-12)))
            res = control.select_delay_square(pulse, policy1.kappa_max,
                                              policy2.kappa_max, probe)
            delay = res.delay
            if not res.perfect:
                print(f"note: no perfect-capture delay in the window; using "
                      f"delay={res.delay:g} with residual loss {res.loss:.3e}",
                      file=sys.stderr)
    config = SimConfig(dt=dt, t_end=float(t_end), delay=float(delay or 0.0),
                       kappa_i=kappa_i, eps_a=float(sim.get("eps_a", 1e-12)))

    if policy2 is None:
        traj = simulate_single_pass(pulse, policy1, config)
    else:
        traj = simulate_two_pass(pulse, policy1, policy2, config)
    if delay_selected is not None:
        traj.meta["delay_selected"] = delay_selected

    out = cfg.output_path or "trajectory.csv"
    if cfg.format == "json":
        payload = {"meta": traj.meta,
                   "columns": {name: getattr(traj, name).tolist()
                               for name in pr_io.TRAJECTORY_COLUMNS}}
        Path(out).write_text(json.dumps(payload) + "\n", encoding="utf-8")
    else:
        pr_io.write_trajectory_csv(traj, out)
    print(f"wrote {out}: final a^2 = {traj.final_a_sq:.9f}, "
          f"loss = {traj.final_loss:.3e}, ledger violation = {traj.ledger_violation():.3e}")
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    pulse_kind = _PULSE_ALIASES.get(cfg.pulse.get("kind", "square"))
    grid = sweep.GridSpec(kappa_min=float(cfg.grid.get("kappa_min", 0.2)),
                          kappa_max=float(cfg.grid.get("kappa_max", 6.0)),
                          points=int(cfg.grid.get("points", 60)))
    sim = dict(cfg.sim)
    dt = float(sim.get("dt", 5e-4))
    t_end = float(sim.get("t_end", 2.0 if pulse_kind == "square" else 40.0))
    config = SimConfig(dt=dt, t_end=t_end, kappa_i=float(sim.get("kappa_i", 0.0)))
    threads = sim.get("threads")
    grid_result = sweep.loss_grid(pulse_kind, grid, config,
                                  threads=int(threads) if threads else None)
    out = cfg.output_path or "heatmap.csv"
    pr_io.write_heatmap_csv(grid_result, out)
    n_nan = int(np.sum(np.isnan(grid_result.loss)))
    print(f"wrote {out}: {grid.points}x{grid.points} cells, {n_nan} failures")
    return EXIT_OK if n_nan == 0 else EXIT_CHECK_FAILED


def cmd_report(cfg: RunConfig) -> int:
    pulse_kind = _PULSE_ALIASES.get(cfg.pulse.get("kind", "exp_decay"))
    policy1 = cfg.policy1.get("kappa_max")
    if policy1 is None:
        raise ConfigError("kappa1_max is required for a report")
    kappa2 = cfg.policy2.get("kappa_max")
    report = analytic.build_report(pulse_kind, float(policy1),
                                   float(kappa2) if kappa2 is not None else None,
                                   kappa_i=float(cfg.sim.get("kappa_i", 0.0)),
                                   tau_max=cfg.sim.get("tau_max"))
    text = pr_io.write_report_json(report.as_dict(), cfg.output_path)
    if cfg.output_path:
        print(f"wrote {cfg.output_path}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_validate(cfg: RunConfig) -> int:
    sim = dict(cfg.sim)
    dt = float(sim.get("dt", 1e-4))
    kappas = cfg.grid.get("kappas", validate.DEFAULT_KAPPAS)
    kappa_is = cfg.grid.get("kappa_is", validate.DEFAULT_KAPPA_IS)
    rows = validate.run_validation(tuple(kappas), tuple(kappa_is), dt=dt,
                                   include_two_pass=bool(cfg.grid.get("two_pass", True)))
    print(validate.format_table(rows))
    return EXIT_OK if all(r.passed for r in rows) else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="photon-recycler",
        description="Simulate tunable-coupling cavity photon capture with "
                    "recycled reflections; sweep loss landscapes; evaluate "
                    "closed forms; cross-validate the two.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON configuration document")
        p.add_argument("--out", dest="output_path", help="output file path")

    p_sim = sub.add_parser("simulate", help="integrate one capture run to CSV")
    add_common(p_sim)
    p_sim.add_argument("--pulse", choices=("exp", "square"), default=None)
    p_sim.add_argument("--kappa1-max", type=float)
    p_sim.add_argument("--kappa2-max", type=float)
    p_sim.add_argument("--kappa-i", type=float)
    p_sim.add_argument("--policy1", choices=("greedy", "constant"))
    p_sim.add_argument("--policy2", choices=("greedy", "constant"))
    p_sim.add_argument("--delay", type=float)
    p_sim.add_argument("--dt", type=float)
    p_sim.add_argument("--t-end", type=float)
    p_sim.add_argument("--format", choices=("csv", "json"))

    p_sweep = sub.add_parser("sweep", help="loss landscape over the cap plane")
    add_common(p_sweep)
    p_sweep.add_argument("--pulse", choices=("exp", "square"), default=None)
    p_sweep.add_argument("--grid-min", type=float)
    p_sweep.add_argument("--grid-max", type=float)
    p_sweep.add_argument("--grid-points", type=int)
    p_sweep.add_argument("--dt", type=float)
    p_sweep.add_argument("--kappa-i", type=float)
    p_sweep.add_argument("--threads", type=int)

    p_rep = sub.add_parser("report", help="closed-form quantities as JSON")
    add_common(p_rep)
    p_rep.add_argument("--pulse", choices=("exp", "square"), default=None)
    p_rep.add_argument("--kappa1-max", type=float)
    p_rep.add_argument("--kappa2-max", type=float)
    p_rep.add_argument("--kappa-i", type=float)
    p_rep.add_argument("--tau-max", type=float)

    p_val = sub.add_parser("validate", help="closed form vs simulation table")
    add_common(p_val)
    p_val.add_argument("--dt", type=float)
    p_val.add_argument("--kappas", help="comma-separated coupling caps")
    p_val.add_argument("--kappa-is", help="comma-separated intrinsic losses")
    p_val.add_argument("--skip-two-pass", action="store_true")

    return parser


def _apply_flags(cfg: RunConfig, args: argparse.Namespace) -> None:
    cfg.command = args.command
    if getattr(args, "output_path", None):
        cfg.output_path = args.output_path
    if getattr(args, "format", None):
        cfg.format = args.format
    if getattr(args, "pulse", None):
        cfg.pulse["kind"] = args.pulse
    if getattr(args, "kappa1_max", None) is not None:
        cfg.policy1["kappa_max"] = args.kappa1_max
    if getattr(args, "kappa2_max", None) is not None:
        cfg.policy2["kappa_max"] = args.kappa2_max
    if getattr(args, "policy1", None):
        cfg.policy1["kind"] = args.policy1
    if getattr(args, "policy2", None):
        cfg.policy2["kind"] = args.policy2
    for name in ("kappa_i", "dt", "t_end", "delay"):
        value = getattr(args, name, None)
        if value is not None:
            cfg.sim[name] = value
    if args.command == "sweep":
        for flag, key in (("grid_min", "kappa_min"), ("grid_max", "kappa_max"),
                          ("grid_points", "points")):
            value = getattr(args, flag, None)
            if value is not None:
                cfg.grid[key] = value
        if getattr(args, "threads", None) is not None:
            cfg.sim["threads"] = args.threads
    if args.command == "validate":
        if getattr(args, "kappas", None):
            cfg.grid["kappas"] = [float(x) for x in args.kappas.split(",")]
        if getattr(args, "kappa_is", None):
            cfg.grid["kappa_is"] = [float(x) for x in args.kappa_is.split(",")]
        if getattr(args, "skip_two_pass", False):
            cfg.grid["two_pass"] = False


_COMMANDS = {"simulate": cmd_simulate, "sweep": cmd_sweep,
             "report": cmd_report, "validate": cmd_validate}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        _apply_flags(cfg, args)
        return _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleProtocolError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
