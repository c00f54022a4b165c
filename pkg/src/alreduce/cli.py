"""Command-line front end: every study as a reproducible CSV/JSON emitter.

Commands
    reduce1d   series-vs-integral table for a force model
    pulse      pulse-width/damping-time limit study table
    magnetic   fixed-points | bifurcation | threshold | simulate
    simulate   full1d | full3d | reduced trajectory runs
    verify     cross-module oracle checks, nonzero exit on any breach

Flag values override config-file values, which override built-in defaults.
All numeric output is printed with 17 significant digits, so identical
configurations produce byte-identical files.  Failures report a JSON error
object on stderr and a nonzero exit status.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import magnetic3d, reduction1d, simulate
from .errors import BracketError, DomainError, IntegrationError, ParameterError
from .forces import ExponentialForce, Force1D, GaussianPulse, force_from_descriptor
from .magnetic3d import (
    STABILITY_THRESHOLD_MU,
    CoeffPair,
    MagneticSystem,
    fixed_points,
    recurrence_step,
    reduced_rhs,
    spiral_velocity,
    stability_threshold,
)
from .numerics import StepperConfig, erfcx, gauss_laguerre
from .reduction1d import (
    FixedOrder,
    PulseReduction,
    ReductionSeries,
    SmallestTerm,
    gaussian_reduction,
    integral_reduction,
    limit_study,
    write_limit_study_csv,
)
from .simulate import run_full_1d, run_full_3d, run_reduced, runaway_metric
from .tableio import write_csv

__all__ = ["main", "entrypoint"]


def _parse_floats(text: str) -> list:
    try:
        values = [float(x) for x in str(text).split(",") if x.strip() != ""]
    except ValueError as exc:
        raise ParameterError(f"expected comma-separated numbers, got {text!r}") from exc
    if not values:
        raise ParameterError(f"expected at least one number in {text!r}")
    return values


def _parse_vec3(text) -> np.ndarray:
    if isinstance(text, (list, tuple)):
        values = [float(x) for x in text]
    else:
        values = _parse_floats(text)
    if len(values) != 3:
        raise ParameterError(f"expected 3 components, got {len(values)} in {text!r}")
    return np.array(values)


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ParameterError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParameterError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ParameterError("config file must contain a JSON object")
    return cfg


class _Options:
    """Flag > config > default resolution for one command invocation."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.config = _load_config(getattr(args, "config", None))

    def get(self, key, default=None):
        flag = getattr(self.args, key, None)
        if flag is not None:
            return flag
        if key in self.config:
            return self.config[key]
        return default

    def force(self, key="force", default=None) -> Force1D:
        raw = self.get(key, default)
        if raw is None:
            raise ParameterError("a force descriptor is required (--force or config)")
        if isinstance(raw, str):
            try:
                raw = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise ParameterError(f"force descriptor is not valid JSON: {exc}") from exc
        return force_from_descriptor(raw)

    def magnetic_system(self) -> MagneticSystem:
        mu = self.get("mu")
        tau0 = self.get("tau0")
        omega = self.get("omega")
        if mu is not None:
            if omega is not None:
                raise ParameterError("give either --mu or --omega, not both")
            tau0 = 1.0 if tau0 is None else float(tau0)
            mu = float(mu)
            if mu <= 0:
                raise ParameterError(f"mu must be positive, got {mu}")
            return MagneticSystem(tau0=tau0, omega=(0.0, 0.0, mu / tau0))
        if omega is None or tau0 is None:
            raise ParameterError("give --mu, or both --tau0 and --omega")
        return MagneticSystem(tau0=float(tau0), omega=tuple(_parse_vec3(omega)))


def _open_output(path):
    if path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline="\n"), True


def _write_table(path, header, rows) -> None:
    fh, close = _open_output(path)
    try:
        write_csv(header, rows, fh)
    finally:
        if close:
            fh.close()


def _write_json(path, obj) -> None:
    fh, close = _open_output(path)
    try:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
    finally:
        if close:
            fh.close()


def _write_trajectory(path, traj) -> None:
    if path == "-":
        simulate.write_trajectory_csv(traj, sys.stdout)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        simulate.write_trajectory_csv(traj, fh)
    sidecar = path[: -len(".csv")] + ".json" if path.endswith(".csv") else path + ".json"
    with open(sidecar, "w", encoding="utf-8", newline="\n") as fh:
        simulate.write_trajectory_metadata(traj, fh)


# ---------------------------------------------------------------------------
# reduce1d


def cmd_reduce1d(args) -> int:
    opt = _Options(args)
    tau0 = float(opt.get("tau0", 1.0))
    force = opt.force(default={"model": "gaussian", "params": {"f0": 1.0, "eps": 1.0}})
    t_min = float(opt.get("t_min", -1.0))
    t_max = float(opt.get("t_max", 1.0))
    t_steps = int(opt.get("t_steps", 21))
    if t_steps < 1:
        raise ParameterError(f"t-steps must be >= 1, got {t_steps}")
    nodes = int(opt.get("quad_nodes", 64))
    fixed = opt.get("fixed_order")
    if fixed is not None:
        truncation = FixedOrder(int(fixed))
    else:
        truncation = SmallestTerm(int(opt.get("max_order", reduction1d.DEFAULT_MAX_ORDER)))

    rule = gauss_laguerre(nodes)
    series = ReductionSeries(tau0=tau0, force=force, truncation=truncation)
    rows = []
    for t in np.linspace(t_min, t_max, t_steps):
        ev = series.evaluate(float(t))
        integral = integral_reduction(force, tau0, float(t), rule)
        rows.append(
            (
                float(t),
                ev.value,
                ev.order_used,
                ev.first_omitted,
                ev.diverged,
                integral,
                abs(ev.value - integral),
            )
        )
    _write_table(
        opt.get("output", "-"),
        ("t", "series", "order", "first_omitted", "diverged", "integral", "abs_diff"),
        rows,
    )
    return 0


# ---------------------------------------------------------------------------
# pulse


def cmd_pulse(args) -> int:
    opt = _Options(args)
    f0 = float(opt.get("f0", 1.0))
    tau0_grid = _as_grid(opt.get("tau0_grid", [1.0, 0.01]))
    eps_grid = _as_grid(opt.get("eps_grid", [1.0, 0.01]))
    if any(e == 0 for e in eps_grid):
        raise ParameterError(
            "eps = 0 is rejected: an ideal kick changes the force faster than "
            "the damping time, outside the reduction's applicability; use "
            "preacceleration() for that limit and keep pulse widths positive"
        )
    t_grid = opt.get("t_grid")
    if t_grid is not None:
        t_grid = _as_grid(t_grid)
    else:
        t_grid = list(
            np.linspace(
                float(opt.get("t_min", -3.0)),
                float(opt.get("t_max", 3.0)),
                int(opt.get("t_steps", 25)),
            )
        )
    rows = limit_study(f0, tau0_grid, eps_grid, t_grid)
    path = opt.get("output", "-")
    fh, close = _open_output(path)
    try:
        write_limit_study_csv(rows, fh)
    finally:
        if close:
            fh.close()
    return 0


def _as_grid(value) -> list:
    if isinstance(value, (list, tuple)):
        return [float(x) for x in value]
    return _parse_floats(value)


# ---------------------------------------------------------------------------
# magnetic


def cmd_magnetic_fixed_points(args) -> int:
    opt = _Options(args)
    report = fixed_points(opt.magnetic_system())
    _write_json(opt.get("output", "-"), report.to_json_dict())
    return 0


def cmd_magnetic_threshold(args) -> int:
    opt = _Options(args)
    tol = float(opt.get("tol", 1e-6))
    mu_star = stability_threshold(tol)
    _write_json(opt.get("output", "-"), {"mu_star": mu_star, "tolerance": tol})
    return 0


def cmd_magnetic_bifurcation(args) -> int:
    opt = _Options(args)
    mu_min = float(opt.get("mu_min", 0.0))
    mu_max = float(opt.get("mu_max", 0.9))
    steps = int(opt.get("steps", 90))
    if steps < 1:
        raise ParameterError(f"steps must be >= 1, got {steps}")
    n_iter = int(opt.get("n_iter", 500))
    n_keep = int(opt.get("n_keep", 8))
    grid = [mu_min + (mu_max - mu_min) * k / steps for k in range(steps + 1)]
    rows = magnetic3d.bifurcation_scan(grid, n_iter, n_keep)
    path = opt.get("output", "-")
    fh, close = _open_output(path)
    try:
        magnetic3d.write_bifurcation_csv(rows, fh)
    finally:
        if close:
            fh.close()
    return 0


def cmd_magnetic_simulate(args) -> int:
    opt = _Options(args)
    system = opt.magnetic_system()
    prefix = opt.get("out_prefix")
    if prefix is None:
        raise ParameterError("--out-prefix is required for magnetic simulate")
    v0 = _parse_vec3(opt.get("v0", "1,0,0"))
    x0 = _parse_vec3(opt.get("x0", "0,0,0"))
    a0 = reduced_rhs(system, v0) + _parse_vec3(opt.get("a0_offset", "0,0,0"))
    step = float(opt.get("step", system.tau0 / 100.0))
    t_end = opt.get("t_end")
    if t_end is None:
        if system.omega_mag == 0.0:
            raise ParameterError("zero field has no cyclotron period; give --t-end")
        t_end = float(opt.get("periods", 3.0)) * 2.0 * math.pi / system.omega_mag
    cfg = StepperConfig(step=step)
    span = (0.0, float(t_end))

    reduced = run_reduced(lambda v, t: reduced_rhs(system, v), x0, v0, cfg, span)
    full = run_full_3d(system, x0, v0, a0, cfg, span)
    _write_trajectory(f"{prefix}_reduced.csv", reduced)
    _write_trajectory(f"{prefix}_full3d.csv", full)

    n = min(len(reduced.times), len(full.times))
    vr = reduced.block("v")[:n]
    vf = full.block("v")[:n]
    dev = np.linalg.norm(vf - vr, axis=1) / np.linalg.norm(vr, axis=1)
    summary = {
        "mu": system.mu,
        "tau0": system.tau0,
        "t_end": float(t_end),
        "step": step,
        "full_diverged": full.diverged,
        "compared_samples": int(n),
        "max_rel_velocity_deviation": float(np.max(dev)),
        "final_rel_velocity_deviation": float(dev[-1]),
    }
    _write_json(f"{prefix}_summary.json", summary)
    return 0


# ---------------------------------------------------------------------------
# simulate


def _stepper(opt, tau0) -> StepperConfig:
    return StepperConfig(step=float(opt.get("step", tau0 / 100.0)))


def cmd_simulate_full1d(args) -> int:
    opt = _Options(args)
    tau0 = float(opt.get("tau0", 1.0))
    force = opt.force(default={"model": "constant", "params": {"amplitude": 0.0}})
    traj = run_full_1d(
        force,
        tau0,
        float(opt.get("x0", 0.0)),
        float(opt.get("v0", 0.0)),
        float(opt.get("a0", 0.0)),
        _stepper(opt, tau0),
        (float(opt.get("t_start", 0.0)), float(opt.get("t_end", 10.0))),
    )
    _write_trajectory(opt.get("output", "-"), traj)
    return 0


def cmd_simulate_full3d(args) -> int:
    opt = _Options(args)
    system = opt.magnetic_system()
    v0 = _parse_vec3(opt.get("v0", "1,0,0"))
    a0_raw = opt.get("a0", "reduced")
    a0 = reduced_rhs(system, v0) if a0_raw == "reduced" else _parse_vec3(a0_raw)
    traj = run_full_3d(
        system,
        _parse_vec3(opt.get("x0", "0,0,0")),
        v0,
        a0,
        _stepper(opt, system.tau0),
        (float(opt.get("t_start", 0.0)), float(opt.get("t_end", 10.0 * system.tau0))),
    )
    _write_trajectory(opt.get("output", "-"), traj)
    return 0


def cmd_simulate_reduced(args) -> int:
    opt = _Options(args)
    has_field = opt.get("mu") is not None or opt.get("omega") is not None
    if has_field:
        system = opt.magnetic_system()
        tau0 = system.tau0
        rhs = lambda v, t: reduced_rhs(system, v)
        x0 = _parse_vec3(opt.get("x0", "0,0,0"))
        v0 = _parse_vec3(opt.get("v0", "1,0,0"))
    else:
        tau0 = float(opt.get("tau0", 1.0))
        force = opt.force(default={"model": "gaussian", "params": {"f0": 1.0, "eps": 10.0}})
        rule = gauss_laguerre(int(opt.get("quad_nodes", 64)))
        rhs = lambda v, t: np.array([integral_reduction(force, tau0, float(t), rule)])
        x0 = float(opt.get("x0", 0.0))
        v0 = float(opt.get("v0", 0.0))
    traj = run_reduced(
        rhs,
        x0,
        v0,
        _stepper(opt, tau0),
        (float(opt.get("t_start", 0.0)), float(opt.get("t_end", 10.0 * tau0))),
    )
    _write_trajectory(opt.get("output", "-"), traj)
    return 0


# ---------------------------------------------------------------------------
# verify


def _check_quadrature():
    rule = gauss_laguerre(20)
    worst = 0.0
    for k in range(0, 40):
        got = math.fsum(w * u**k for w, u in zip(rule.weights, rule.nodes))
        worst = max(worst, abs(got - math.factorial(k)) / math.factorial(k))
    return worst <= 1e-12, f"monomial exactness n=20, worst rel {worst:.2e} (tol 1e-12)"


def _check_erfcx():
    # erfc(z) + erfc(-z) = 2, with erfc recovered as exp(-z^2) * erfcx(z).
    worst = 0.0
    for z in np.linspace(-5.0, 5.0, 81):
        lhs = math.exp(-z * z) * (erfcx(float(z)) + erfcx(float(-z)))
        worst = max(worst, abs(lhs - 2.0))
    return worst <= 1e-12, f"reflection identity on [-5,5], worst abs {worst:.2e} (tol 1e-12)"


def _check_series_vs_integral():
    force = ExponentialForce(amplitude=1.0, rate=0.5)
    series = ReductionSeries(tau0=1.0, force=force)
    rule = gauss_laguerre(64)
    worst = 0.0
    for t in np.linspace(-1.0, 1.0, 21):
        val = series.evaluate(float(t)).value
        ref = integral_reduction(force, 1.0, float(t), rule)
        worst = max(worst, abs(val - ref) / abs(ref))
    return worst <= 1e-8, f"exponential reduction, worst rel {worst:.2e} (tol 1e-8)"


def _check_pulse_closed_form():
    tau0, eps = 1.0, 10.0
    rule = gauss_laguerre(64)
    pulse = PulseReduction(f0=1.0, tau0=tau0, eps=eps)
    force = GaussianPulse(f0=1.0, eps=eps)
    worst = 0.0
    for t in np.linspace(-5 * eps, 5 * eps, 101):
        closed = gaussian_reduction(pulse, float(t))
        integ = integral_reduction(force, tau0, float(t), rule)
        worst = max(worst, abs(closed - integ) / abs(closed))
    return worst <= 1e-10, f"Gaussian closed form vs quadrature, worst rel {worst:.2e} (tol 1e-10)"


def _check_recurrence():
    worst = 0.0
    for mu in (0.01, 0.05, 0.1, 0.3, 0.6):
        system = MagneticSystem(tau0=1.0, omega=(0.0, 0.0, mu))
        c = CoeffPair(1.0, 0.0)
        for _ in range(100000):
            nxt = recurrence_step(c, system)
            if abs(nxt.alpha - c.alpha) < 1e-14 and abs(nxt.beta - c.beta) < 1e-14:
                c = nxt
                break
            c = nxt
        alpha, b = magnetic3d._plus_coeffs_closed(mu)
        worst = max(worst, abs(c.alpha - alpha), abs(c.beta - b))
    return worst <= 1e-10, f"iterated map vs closed form, worst dev {worst:.2e} (tol 1e-10)"


def _check_threshold():
    mu_star = stability_threshold(1e-8)
    err = abs(mu_star - STABILITY_THRESHOLD_MU)
    return err <= 1e-6, f"bisection vs closed form, |diff| {err:.2e} (tol 1e-6)"


def _check_rk4_vs_spiral():
    system = MagneticSystem(tau0=1.0, omega=(0.0, 0.0, 0.1))
    v0 = np.array([1.0, 0.0, 0.25])
    period = 2.0 * math.pi / system.omega_mag
    cfg = StepperConfig(step=0.01)
    traj = run_reduced(lambda v, t: reduced_rhs(system, v), np.zeros(3), v0, cfg, (0.0, 2 * period))
    got = traj.block("v")[-1]
    want = spiral_velocity(system, v0, float(traj.times[-1]))
    err = float(np.linalg.norm(got - want) / np.linalg.norm(want))
    return err <= 1e-8, f"RK4 vs exact spiral after 2 turns, rel {err:.2e} (tol 1e-8)"


def _check_runaway_rate():
    from .forces import ConstantForce

    traj = run_full_1d(ConstantForce(0.0), 1.0, 0.0, 0.0, 1.0, StepperConfig(step=0.01), (0.0, 10.0))
    rate = runaway_metric(traj, 1.0)
    err = abs(rate - 1.0)
    return err <= 1e-3, f"free-particle growth rate {rate:.6f} (tol 1e-3 around 1)"


def cmd_verify(args) -> int:
    checks = [
        ("quadrature-exactness", _check_quadrature),
        ("erfcx-reflection", _check_erfcx),
        ("series-vs-integral", _check_series_vs_integral),
        ("pulse-closed-form", _check_pulse_closed_form),
        ("recurrence-vs-closed-form", _check_recurrence),
        ("stability-threshold", _check_threshold),
        ("rk4-vs-spiral", _check_rk4_vs_spiral),
        ("runaway-rate", _check_runaway_rate),
    ]
    failures = 0
    for name, fn in checks:
        ok, detail = fn()
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        failures += 0 if ok else 1
    print(f"{len(checks) - failures}/{len(checks)} checks passed")
    return 0 if failures == 0 else 1


# ---------------------------------------------------------------------------
# parser


def _add_common(p):
    p.add_argument("--config", help="JSON config file; flags override its values")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="alreduce",
        description="Order reductions of damped third-order equations of motion",
    )
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("reduce1d", help="series-vs-integral reduction table for a force")
    _add_common(p)
    p.add_argument("--tau0", type=float, help="damping time tau0 (time units); default 1.0")
    p.add_argument("--force", help='force descriptor JSON {"model":...,"params":{...}}; default gaussian f0=1, eps=1')
    p.add_argument("--t-min", type=float, dest="t_min", help="grid start (time units); default -1.0")
    p.add_argument("--t-max", type=float, dest="t_max", help="grid end (time units); default 1.0")
    p.add_argument("--t-steps", type=int, dest="t_steps", help="grid points (count); default 21")
    p.add_argument("--quad-nodes", type=int, dest="quad_nodes", help="Gauss-Laguerre nodes (count); default 64")
    p.add_argument("--max-order", type=int, dest="max_order", help="smallest-term order cap (count); default 200")
    p.add_argument("--fixed-order", type=int, dest="fixed_order", help="use a fixed truncation order instead (count)")
    p.add_argument("--output", help="CSV path or - for stdout; default -")
    p.set_defaults(handler=cmd_reduce1d)

    p = sub.add_parser("pulse", help="pulse limit study: accel vs its two non-commuting limits")
    _add_common(p)
    p.add_argument("--f0", type=float, help="pulse impulse f0 (velocity units); default 1.0")
    p.add_argument("--tau0-grid", dest="tau0_grid", help="comma list of tau0 values (time units); default 1.0,0.01")
    p.add_argument("--eps-grid", dest="eps_grid", help="comma list of pulse widths (time units); default 1.0,0.01")
    p.add_argument("--t-grid", dest="t_grid", help="explicit comma list of times (time units)")
    p.add_argument("--t-min", type=float, dest="t_min", help="grid start (time units); default -3.0")
    p.add_argument("--t-max", type=float, dest="t_max", help="grid end (time units); default 3.0")
    p.add_argument("--t-steps", type=int, dest="t_steps", help="grid points (count); default 25")
    p.add_argument("--output", help="CSV path or - for stdout; default -")
    p.set_defaults(handler=cmd_pulse)

    p = sub.add_parser("magnetic", help="uniform-field studies")
    msub = p.add_subparsers(dest="subcommand")

    def magnetic_flags(q):
        _add_common(q)
        q.add_argument("--mu", type=float, help="dimensionless tau0*|omega| (pure number)")
        q.add_argument("--tau0", type=float, help="damping time tau0 (time units)")
        q.add_argument("--omega", help="rotation vector o1,o2,o3 (1/time units)")

    q = msub.add_parser("fixed-points", help="fixed points, spectra, stability report")
    magnetic_flags(q)
    q.add_argument("--output", help="JSON path or - for stdout; default -")
    q.set_defaults(handler=cmd_magnetic_fixed_points)

    q = msub.add_parser("threshold", help="stability threshold in mu by bisection")
    _add_common(q)
    q.add_argument("--tol", type=float, help="bisection tolerance on mu (pure number); default 1e-6")
    q.add_argument("--output", help="JSON path or - for stdout; default -")
    q.set_defaults(handler=cmd_magnetic_threshold)

    q = msub.add_parser("bifurcation", help="tail iterates of the coefficient map over a mu grid")
    _add_common(q)
    q.add_argument("--mu-min", type=float, dest="mu_min", help="grid start (pure number); default 0.0")
    q.add_argument("--mu-max", type=float, dest="mu_max", help="grid end (pure number); default 0.9")
    q.add_argument("--steps", type=int, help="grid intervals (count); default 90")
    q.add_argument("--n-iter", type=int, dest="n_iter", help="iterations per mu (count); default 500")
    q.add_argument("--n-keep", type=int, dest="n_keep", help="tail iterates kept (count); default 8")
    q.add_argument("--output", help="CSV path or - for stdout; default -")
    q.set_defaults(handler=cmd_magnetic_bifurcation)

    q = msub.add_parser("simulate", help="compare the full singular run against the reduced run")
    magnetic_flags(q)
    q.add_argument("--v0", help="initial velocity v1,v2,v3 (length/time); default 1,0,0")
    q.add_argument("--x0", help="initial position x1,x2,x3 (length); default 0,0,0")
    q.add_argument("--a0-offset", dest="a0_offset", help="offset added to the reduced seed acceleration a1,a2,a3 (length/time^2); default 0,0,0")
    q.add_argument("--periods", type=float, help="run length in cyclotron periods (pure number); default 3")
    q.add_argument("--t-end", type=float, dest="t_end", help="run length override (time units)")
    q.add_argument("--step", type=float, help="integrator step (time units); default tau0/100")
    q.add_argument("--out-prefix", dest="out_prefix", help="prefix for the two trajectory CSVs and the summary JSON")
    q.set_defaults(handler=cmd_magnetic_simulate)

    p = sub.add_parser("simulate", help="single trajectory runs")
    ssub = p.add_subparsers(dest="subcommand")

    q = ssub.add_parser("full1d", help="full singular 1-D equation (runaways expected)")
    _add_common(q)
    q.add_argument("--tau0", type=float, help="damping time tau0 (time units); default 1.0")
    q.add_argument("--force", help="force descriptor JSON; default zero force")
    q.add_argument("--x0", type=float, help="initial position (length); default 0")
    q.add_argument("--v0", type=float, help="initial velocity (length/time); default 0")
    q.add_argument("--a0", type=float, help="initial acceleration (length/time^2); default 0")
    q.add_argument("--t-start", type=float, dest="t_start", help="start time (time units); default 0")
    q.add_argument("--t-end", type=float, dest="t_end", help="end time (time units); default 10")
    q.add_argument("--step", type=float, help="integrator step (time units); default tau0/100")
    q.add_argument("--output", help="CSV path or - for stdout; default -")
    q.set_defaults(handler=cmd_simulate_full1d)

    q = ssub.add_parser("full3d", help="full singular magnetic equation (9-state)")
    magnetic_flags(q)
    q.add_argument("--v0", help="initial velocity v1,v2,v3 (length/time); default 1,0,0")
    q.add_argument("--x0", help="initial position x1,x2,x3 (length); default 0,0,0")
    q.add_argument("--a0", help="initial acceleration a1,a2,a3 or 'reduced' to seed from the reduced equation; default reduced")
    q.add_argument("--t-start", type=float, dest="t_start", help="start time (time units); default 0")
    q.add_argument("--t-end", type=float, dest="t_end", help="end time (time units); default 10*tau0")
    q.add_argument("--step", type=float, help="integrator step (time units); default tau0/100")
    q.add_argument("--output", help="CSV path or - for stdout; default -")
    q.set_defaults(handler=cmd_simulate_full3d)

    q = ssub.add_parser("reduced", help="reduced equation: magnetic (with --mu/--omega) or 1-D force (with --force)")
    magnetic_flags(q)
    q.add_argument("--force", help="force descriptor JSON for the 1-D reduced run")
    q.add_argument("--quad-nodes", type=int, dest="quad_nodes", help="Gauss-Laguerre nodes for the 1-D field (count); default 64")
    q.add_argument("--v0", help="initial velocity (scalar, or v1,v2,v3 with a field); default 0 / 1,0,0")
    q.add_argument("--x0", help="initial position (scalar, or x1,x2,x3 with a field); default 0 / 0,0,0")
    q.add_argument("--t-start", type=float, dest="t_start", help="start time (time units); default 0")
    q.add_argument("--t-end", type=float, dest="t_end", help="end time (time units); default 10*tau0")
    q.add_argument("--step", type=float, help="integrator step (time units); default tau0/100")
    q.add_argument("--output", help="CSV path or - for stdout; default -")
    q.set_defaults(handler=cmd_simulate_reduced)

    p = sub.add_parser("verify", help="run the cross-module oracle checks")
    _add_common(p)
    p.set_defaults(handler=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = getattr(args, "handler", None)
    if handler is None:
        parser.print_help()
        return 2
    try:
        return handler(args)
    except (ParameterError, DomainError) as exc:
        _emit_error(type(exc).__name__, str(exc))
        return 2
    except (BracketError, IntegrationError) as exc:
        _emit_error(type(exc).__name__, str(exc))
        return 3
    except OSError as exc:
        _emit_error("OSError", str(exc))
        return 4


def _emit_error(kind: str, message: str) -> None:
    json.dump({"error": {"type": kind, "message": message}}, sys.stderr)
    sys.stderr.write("\n")


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
