"""Experiment orchestration: config parsing, sweeps, CSV output.

Every sweep writes one CSV file mirroring a figure-style result: QFI versus
protocol duration, normalized QFI for control variants, robustness against
estimation error, Bloch-sphere trajectories, concurrence traces and
generalized-Bloch diagnostics. Outputs are deterministic and independent of
the worker count; each file carries the fully resolved configuration as
`#`-prefixed comment lines.
"""

from __future__ import annotations

import concurrent.futures
import dataclasses
import os
from dataclasses import dataclass, field

import numpy as np
import yaml

from . import krotov, metrology, pulses, scenarios
from .dynamics import TimeGrid, propagate_forward
from .linalg import bloch_from_state, generalized_bloch
from .metrology import concurrence

SWEEP_KINDS = ("qfi_vs_T", "normalized_qfi", "robustness", "trajectory",
               "concurrence_trace", "bloch_diagnostics", "uncontrolled_baseline")

_CONFIG_KEYS = {
    "scenario", "true_value", "T", "dt", "n_steps", "probe", "control_mask",
    "lambda_base", "ramp_fraction", "max_iterations", "cost_tolerance", "delta",
    "amplitude_cap", "guess_amplitude", "reseed_cycles", "reseed_window",
    "sweep", "robustness_range", "variants", "controlled", "pulses",
    "output_dir", "workers",
}


@dataclass
class ExperimentConfig:
    scenario: str
    sweep: str
    true_value: float | None = None
    T: list = field(default_factory=list)      # one or more durations
    dt: float = 0.01
    n_steps: int | None = None                 # overrides dt when set
    probe: str | None = None
    control_mask: list | None = None           # e.g. ["xyz"] or ["xyz", "xy"]
    lambda_base: float = 1.0
    ramp_fraction: float = 0.05
    max_iterations: int = 2000
    cost_tolerance: float = 1e-6
    delta: float = 1e-3
    amplitude_cap: float | None = None
    guess_amplitude: float = 0.01
    reseed_cycles: int = 0
    reseed_window: int = 0                     # 0 -> auto (n_steps // 20)
    robustness_range: list | None = None       # [lo, hi, n_points]
    variants: list = field(default_factory=lambda: ["uncontrolled", "full"])
    controlled: bool = True
    pulses: str | None = None
    output_dir: str = "."
    workers: int = 1


def _fail(key, message):
    raise ValueError("config key %r: %s" % (key, message))


def parse_config(path):
    """Read and validate a YAML experiment config; unknown keys are errors."""
    if not os.path.exists(path):
        raise FileNotFoundError("config file not found: %s" % path)
    with open(path) as fh:
        raw = yaml.safe_load(fh) or {}
    if not isinstance(raw, dict):
        raise ValueError("config file must contain a flat key-value mapping")
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ValueError("unknown config key(s): %s" % ", ".join(sorted(unknown)))
    return resolve_config(raw)


def resolve_config(raw):
    """Validate a raw mapping and fill defaults; returns ExperimentConfig."""
    if "scenario" not in raw:
        _fail("scenario", "is required")
    if raw["scenario"] not in scenarios.SCENARIO_NAMES:
        _fail("scenario", "unknown scenario %r; known: %s"
              % (raw["scenario"], ", ".join(scenarios.SCENARIO_NAMES)))
    if "sweep" not in raw:
        _fail("sweep", "is required")
    if raw["sweep"] not in SWEEP_KINDS:
        _fail("sweep", "unknown sweep %r; known: %s"
              % (raw["sweep"], ", ".join(SWEEP_KINDS)))

    cfg = ExperimentConfig(scenario=raw["scenario"], sweep=raw["sweep"])
    for key, value in raw.items():
        if key in ("scenario", "sweep"):
            continue
        if key == "T":
            value = [float(v) for v in np.atleast_1d(value)]
            if any(v <= 0 for v in value):
                _fail("T", "durations must be positive")
        setattr(cfg, key, value)

    if cfg.dt is not None and cfg.dt <= 0:
        _fail("dt", "must be positive, got %r" % cfg.dt)
    if cfg.n_steps is not None and cfg.n_steps < 1:
        _fail("n_steps", "must be a positive integer")
    if not cfg.T and cfg.sweep != "uncontrolled_baseline":
        _fail("T", "is required")
    if cfg.lambda_base <= 0:
        _fail("lambda_base", "must be positive")
    if not 0 < cfg.ramp_fraction < 0.5:
        _fail("ramp_fraction", "must lie in (0, 0.5)")
    if cfg.delta <= 0:
        _fail("delta", "must be positive")
    if cfg.workers < 1:
        _fail("workers", "must be >= 1")
    if cfg.probe is not None and cfg.probe not in scenarios.PROBE_NAMES:
        _fail("probe", "unknown probe %r" % cfg.probe)
    if cfg.sweep == "robustness":
        rr = cfg.robustness_range
        if not (isinstance(rr, (list, tuple)) and len(rr) == 3):
            _fail("robustness_range", "must be [lo, hi, n_points]")
        lo, hi, n = float(rr[0]), float(rr[1]), int(rr[2])
        if not lo < hi or n < 2:
            _fail("robustness_range", "needs lo < hi and n_points >= 2")
        x0 = cfg.true_value if cfg.true_value is not None else \
            scenarios.get_scenario(cfg.scenario).nominal_value
        if not lo <= x0 <= hi:
            _fail("robustness_range", "must contain the true value %g" % x0)
    return cfg


def _spec_for(cfg):
    overrides = {}
    if cfg.true_value is not None:
        overrides["nominal_value"] = float(cfg.true_value)
    if cfg.probe is not None:
        overrides["probe"] = cfg.probe
    if cfg.control_mask is not None:
        overrides["control_mask"] = tuple(tuple(m) for m in cfg.control_mask)
    return scenarios.get_scenario(cfg.scenario, **overrides)


def _grid_for(cfg, T):
    n = cfg.n_steps if cfg.n_steps else max(1, int(round(T / cfg.dt)))
    return TimeGrid(T, n)


def _krotov_config(cfg):
    return krotov.KrotovConfig(
        lambda_base=cfg.lambda_base,
        shape=krotov.ShapeSpec(cfg.ramp_fraction),
        max_iterations=cfg.max_iterations,
        cost_tolerance=cfg.cost_tolerance,
        delta=cfg.delta,
        amplitude_cap=cfg.amplitude_cap,
    )


def optimize_scenario(spec, grid, cfg, x=None):
    """Optimize with optional reseed cycles; returns the best OptimizationResult."""
    kconfig = _krotov_config(cfg)
    guess = krotov.default_guess(spec, grid, kconfig.shape, cfg.guess_amplitude)
    result = krotov.optimize(spec, grid, guess, kconfig, x=x)
    window = cfg.reseed_window or max(3, grid.n_steps // 20)
    for _ in range(cfg.reseed_cycles):
        guess = krotov.reseed(result, window, grid, kconfig.shape)
        again = krotov.optimize(spec, grid, guess, kconfig, x=x)
        if again.qfi_final > result.qfi_final:
            result = again
    return result


def uncontrolled_qfi(spec, grid, delta=1e-3, x=None):
    x = spec.nominal_value if x is None else x
    model = scenarios.build_model(spec, x)
    schedule = np.zeros((len(model.controls), grid.n_steps))
    return krotov.evaluate_schedule_qfi(spec, grid, schedule, x, delta)


def _write_csv(path, cfg, header, rows):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w") as fh:
        for key, value in sorted(dataclasses.asdict(cfg).items()):
            fh.write("# %s: %s\n" % (key, value))
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    return path


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    return "%.12g" % v


def _map_tasks(fn, tasks, workers):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


# --- per-point worker functions (module level for picklability) -------------

def _qfi_point(args):
    cfg, T = args
    spec = _spec_for(cfg)
    grid = _grid_for(cfg, T)
    unc = uncontrolled_qfi(spec, grid, cfg.delta)
    analytic = scenarios.analytic_uncontrolled_qfi(spec, T)
    try:
        result = optimize_scenario(spec, grid, cfg)
        raw = result.qfi_final
        status = "ok" if np.isfinite(raw) else "diverged"
    except RuntimeError:
        raw, status = float("nan"), "diverged"
    reported = raw
    if cfg.scenario == "tq-int-zz" and np.isfinite(raw):
        # plotting convention: never report below the uncontrolled curve
        reported = max(raw, unc)
    return [T, unc, analytic, reported, raw, status]


def run_qfi_vs_T(cfg, out_path=None):
    rows = _map_tasks(_qfi_point, [(cfg, T) for T in sorted(cfg.T)], cfg.workers)
    path = out_path or os.path.join(cfg.output_dir, "%s_qfi_vs_T.csv" % cfg.scenario)
    return _write_csv(path, cfg, ["T", "qfi_uncontrolled", "qfi_uncontrolled_analytic",
                                  "qfi_controlled", "qfi_controlled_raw", "status"],
                      rows)


def _variant_spec(cfg, name):
    """Resolve a normalized-QFI variant name to (spec, controlled)."""
    spec = _spec_for(cfg)
    if name == "uncontrolled":
        return spec, False
    if name == "full":
        return spec, True
    if name.startswith("probe-"):
        probe = {"zero": "zero", "plus": "plus", "plusplus": "plus_plus",
                 "bell": "bell_phi_plus"}.get(name[6:])
        if probe is None:
            raise ValueError("unknown probe variant %r" % name)
        return dataclasses.replace(spec, probe=probe), True
    if name == "q1":
        if spec.system != "two_qubit":
            raise ValueError("variant q1 needs a two-qubit scenario")
        mask = (spec.control_mask[0], ())
        return dataclasses.replace(spec, control_mask=mask), True
    if set(name) <= {"x", "y", "z"} and name:
        axes = tuple(sorted(set(name), key="xyz".index))
        n_qubits = 1 if spec.system == "single_qubit" else 2
        return dataclasses.replace(spec, control_mask=(axes,) * n_qubits), True
    raise ValueError("unknown variant %r" % name)


def _normalized_point(args):
    cfg, T = args
    grid = _grid_for(cfg, T)
    row = [T]
    for name in cfg.variants:
        spec, controlled = _variant_spec(cfg, name)
        if not controlled:
            qfi = uncontrolled_qfi(spec, grid, cfg.delta)
        elif not spec.control_labels:
            qfi = float("nan")
        else:
            qfi = optimize_scenario(spec, grid, cfg).qfi_final
        row.append(qfi / T)
    return row


def run_normalized_qfi(cfg, out_path=None):
    rows = _map_tasks(_normalized_point, [(cfg, T) for T in sorted(cfg.T)],
                      cfg.workers)
    header = ["T"] + ["qfi_per_T_%s" % v for v in cfg.variants]
    path = out_path or os.path.join(cfg.output_dir,
                                    "%s_normalized_qfi.csv" % cfg.scenario)
    return _write_csv(path, cfg, header, rows)


def _robustness_point(args):
    cfg, x_hat = args
    spec = _spec_for(cfg)
    grid = _grid_for(cfg, cfg.T[0])
    x0 = spec.nominal_value
    try:
        result = optimize_scenario(spec, grid, cfg, x=x_hat)
        at_true = krotov.evaluate_schedule_qfi(spec, grid, result.schedule, x0,
                                               cfg.delta)
        at_xhat = result.qfi_final
        status = "ok"
    except RuntimeError:
        at_true, at_xhat, status = float("nan"), float("nan"), "diverged"
    return [x_hat, at_true, at_xhat, status]


def run_robustness(cfg, out_path=None):
    lo, hi, n = cfg.robustness_range
    spec = _spec_for(cfg)
    grid = _grid_for(cfg, cfg.T[0])
    unc = uncontrolled_qfi(spec, grid, cfg.delta)
    xs = np.linspace(float(lo), float(hi), int(n))
    rows = _map_tasks(_robustness_point, [(cfg, x) for x in xs], cfg.workers)
    rows = [r[:3] + [unc] + r[3:] for r in rows]
    path = out_path or os.path.join(cfg.output_dir,
                                    "%s_robustness.csv" % cfg.scenario)
    return _write_csv(path, cfg, ["x_hat", "qfi_controlled_at_true",
                                  "qfi_at_x_hat", "qfi_uncontrolled", "status"],
                      rows)


def _schedule_for_trace(cfg, spec, grid):
    if cfg.pulses:
        schedule, _ = pulses.load_pulses(cfg.pulses, grid)
        return schedule
    if cfg.controlled:
        return optimize_scenario(spec, grid, cfg).schedule
    model = scenarios.build_model(spec, spec.nominal_value)
    return np.zeros((len(model.controls), grid.n_steps))


def _pair_trajectories(spec, grid, schedule, x0, delta):
    rho0 = scenarios.default_probe(spec)
    traj_a = propagate_forward(scenarios.build_model(spec, x0), schedule, grid, rho0)
    traj_b = propagate_forward(scenarios.build_model(spec, x0 + delta), schedule,
                               grid, rho0)
    return traj_a, traj_b


def run_trajectory(cfg, out_path=None):
    spec = _spec_for(cfg)
    grid = _grid_for(cfg, cfg.T[0])
    schedule = _schedule_for_trace(cfg, spec, grid)
    traj_a, traj_b = _pair_trajectories(spec, grid, schedule, spec.nominal_value,
                                        cfg.delta)
    rows = []
    if spec.dim == 2:
        header = ["t", "r1_a", "r2_a", "r3_a", "r1_b", "r2_b", "r3_b"]
        for t, sa, sb in zip(grid.nodes, traj_a, traj_b):
            rows.append([t, *bloch_from_state(sa), *bloch_from_state(sb)])
    else:
        header = (["t"] + ["c%d_a" % i for i in range(15)]
                  + ["c%d_b" % i for i in range(15)] + ["length_diff", "angle"])
        for t, sa, sb in zip(grid.nodes, traj_a, traj_b):
            ldiff, ang = metrology.bloch_pair_diagnostics(sa, sb)
            rows.append([t, *generalized_bloch(sa), *generalized_bloch(sb),
                         ldiff, ang])
    path = out_path or os.path.join(cfg.output_dir,
                                    "%s_trajectory.csv" % cfg.scenario)
    return _write_csv(path, cfg, header, rows)


def run_bloch_diagnostics(cfg, out_path=None):
    spec = _spec_for(cfg)
    if spec.dim != 4:
        raise ValueError("bloch_diagnostics requires a two-qubit scenario")
    grid = _grid_for(cfg, cfg.T[0])
    x0, delta = spec.nominal_value, cfg.delta
    model = scenarios.build_model(spec, x0)
    free = np.zeros((len(model.controls), grid.n_steps))
    unc_a, unc_b = _pair_trajectories(spec, grid, free, x0, delta)
    schedule = _schedule_for_trace(cfg, spec, grid)
    ctl_a, ctl_b = _pair_trajectories(spec, grid, schedule, x0, delta)
    rows = []
    for k, t in enumerate(grid.nodes):
        lu, au = metrology.bloch_pair_diagnostics(unc_a[k], unc_b[k])
        lc, ac = metrology.bloch_pair_diagnostics(ctl_a[k], ctl_b[k])
        rows.append([t, lu, au, lc, ac])
    path = out_path or os.path.join(cfg.output_dir,
                                    "%s_bloch_diagnostics.csv" % cfg.scenario)
    return _write_csv(path, cfg, ["t", "length_diff_uncontrolled",
                                  "angle_uncontrolled", "length_diff_controlled",
                                  "angle_controlled"], rows)


def run_concurrence_trace(cfg, out_path=None):
    spec = _spec_for(cfg)
    if spec.dim != 4:
        raise ValueError("concurrence trace requires a two-qubit scenario")
    grid = _grid_for(cfg, cfg.T[0])
    x0 = spec.nominal_value
    model = scenarios.build_model(spec, x0)
    rho0 = scenarios.default_probe(spec)
    free = np.zeros((len(model.controls), grid.n_steps))
    unc = propagate_forward(model, free, grid, rho0)
    schedule = _schedule_for_trace(cfg, spec, grid)
    ctl = propagate_forward(model, schedule, grid, rho0)
    rows = [[t, concurrence(su), concurrence(sc)]
            for t, su, sc in zip(grid.nodes, unc, ctl)]
    path = out_path or os.path.join(cfg.output_dir,
                                    "%s_concurrence.csv" % cfg.scenario)
    return _write_csv(path, cfg, ["t", "concurrence_uncontrolled",
                                  "concurrence_controlled"], rows)


def _baseline_point(args):
    cfg, T = args
    spec = _spec_for(cfg)
    grid = _grid_for(cfg, T)
    return [T, uncontrolled_qfi(spec, grid, cfg.delta),
            scenarios.analytic_uncontrolled_qfi(spec, T)]


def run_uncontrolled_baseline(cfg, out_path=None):
    rows = _map_tasks(_baseline_point, [(cfg, T) for T in sorted(cfg.T)],
                      cfg.workers)
    path = out_path or os.path.join(cfg.output_dir,
                                    "%s_uncontrolled_baseline.csv" % cfg.scenario)
    return _write_csv(path, cfg, ["T", "qfi_simulated", "qfi_analytic"], rows)


_SWEEP_RUNNERS = {
    "qfi_vs_T": run_qfi_vs_T,
    "normalized_qfi": run_normalized_qfi,
    "robustness": run_robustness,
    "trajectory": run_trajectory,
    "concurrence_trace": run_concurrence_trace,
    "bloch_diagnostics": run_bloch_diagnostics,
    "uncontrolled_baseline": run_uncontrolled_baseline,
}


def run_experiment(cfg, out_path=None):
    """Dispatch a config to its sweep runner; returns the CSV path."""
    return _SWEEP_RUNNERS[cfg.sweep](cfg, out_path)
