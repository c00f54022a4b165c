"""Trajectory integration for the reduced and the full (singular) equations.

The full third-order equations are integrated as first-order systems whose
extra state is the acceleration; their generic solutions run away like
exp(t/tau0), and that behavior is a first-class result here, not a
failure.  Overflowing runs are truncated and marked, which keeps emitted
tables well-formed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import IntegrationError, ParameterError
from .forces import Force1D
from .magnetic3d import MagneticSystem, cross3
from .numerics import StepperConfig
from .tableio import write_csv

__all__ = [
    "Trajectory",
    "run_reduced",
    "run_full_1d",
    "run_full_3d",
    "runaway_metric",
    "write_trajectory_csv",
    "trajectory_metadata",
]

# Truncate once any state component passes this; the next few RK4 stages
# would push it to inf and poison the whole step with NaNs.
_STATE_LIMIT = 1e150


@dataclass
class Trajectory:
    """Uniformly sampled kinematic history plus run metadata.

    states has one row per time; columns are named by `columns` (scalar runs
    use x, v, a; vector runs x1..x3, v1..v3, a1..a3).  metadata records the
    equation id, its parameters, the stepper settings, and whether the run
    was truncated by divergence.
    """

    times: np.ndarray
    states: np.ndarray
    columns: tuple
    metadata: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        try:
            idx = self.columns.index(name)
        except ValueError:
            raise ParameterError(f"no column {name!r}; have {self.columns}") from None
        return self.states[:, idx]

    def block(self, prefix: str) -> np.ndarray:
        """All columns named prefix or prefix followed by an axis digit."""
        idx = [
            i
            for i, name in enumerate(self.columns)
            if name == prefix or (name.startswith(prefix) and name[len(prefix):].isdigit())
        ]
        if not idx:
            raise ParameterError(f"no {prefix!r} columns in {self.columns}")
        return self.states[:, idx]

    @property
    def diverged(self) -> bool:
        return bool(self.metadata.get("diverged", False))


def _integrate(rhs, y0: np.ndarray, cfg: StepperConfig, t_span, columns, metadata) -> Trajectory:
    t_start, t_end = float(t_span[0]), float(t_span[1])
    if not t_end > t_start:
        raise ParameterError(f"t_span must satisfy t_end > t_start, got {t_span}")
    h = cfg.step
    n_steps = int(math.floor((t_end - t_start) / h + 1e-9))
    if n_steps < 1:
        raise ParameterError("t_span shorter than one step")
    if n_steps > cfg.max_steps:
        raise ParameterError(
            f"run needs {n_steps} steps but max_steps is {cfg.max_steps}"
        )

    states = np.empty((n_steps + 1, y0.size))
    states[0] = y0
    y = y0
    diverged = False
    filled = n_steps + 1
    for k in range(n_steps):
        t = t_start + k * h
        try:
            y = _rk4(rhs, y, t, h)
        except IntegrationError:
            diverged = True
            filled = k + 1
            break
        if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > _STATE_LIMIT:
            diverged = True
            filled = k + 1
            break
        states[k + 1] = y

    times = t_start + h * np.arange(filled)
    meta = dict(metadata)
    meta["stepper"] = {"step": cfg.step, "method": cfg.method, "max_steps": cfg.max_steps}
    meta["diverged"] = diverged
    meta["last_time"] = float(times[-1])
    return Trajectory(times=times, states=states[:filled], columns=tuple(columns), metadata=meta)


def _rk4(rhs, y, t, h):
    # Inlined classical step; rhs is trusted to return the right shape here
    # and only finiteness is policed (hot loop).
    k1 = rhs(y, t)
    k2 = rhs(y + (0.5 * h) * k1, t + 0.5 * h)
    k3 = rhs(y + (0.5 * h) * k2, t + 0.5 * h)
    k4 = rhs(y + h * k3, t + h)
    out = y + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
    if not np.all(np.isfinite(out)):
        raise IntegrationError(f"non-finite state reached at t={t}", time=t)
    return out


def _kinematic_columns(dim: int, with_accel: bool) -> tuple:
    if dim == 1:
        names = ["x", "v"] + (["a"] if with_accel else [])
        return tuple(names)
    base = [f"x{i}" for i in range(1, dim + 1)] + [f"v{i}" for i in range(1, dim + 1)]
    if with_accel:
        base += [f"a{i}" for i in range(1, dim + 1)]
    return tuple(base)


def run_reduced(rhs, x0, v0, cfg: StepperConfig, t_span) -> Trajectory:
    """Integrate the reduced second-order motion xddot = rhs(v, t).

    rhs is an acceleration field called as rhs(v, t); scalar and 3-vector
    states are both supported.  The stored trajectory also carries the
    acceleration sampled from rhs along the run so the same diagnostics
    apply to reduced and full runs.
    """
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    v0 = np.atleast_1d(np.asarray(v0, dtype=float))
    if x0.shape != v0.shape:
        raise ParameterError("x0 and v0 must have matching shapes")
    dim = x0.size

    def system(y, t):
        v = y[dim:]
        out = np.empty(2 * dim)
        out[:dim] = v
        out[dim:] = rhs(v, t)
        return out

    traj = _integrate(
        system,
        np.concatenate((x0, v0)),
        cfg,
        t_span,
        _kinematic_columns(dim, with_accel=False),
        {"equation": "reduced", "dim": dim},
    )
    traj.states = np.hstack((traj.states, _sample_field(rhs, traj, dim)))
    traj.columns = _kinematic_columns(dim, with_accel=True)
    return traj


def _sample_field(rhs, traj: Trajectory, dim: int) -> np.ndarray:
    # Batched evaluation when the field broadcasts over rows (the magnetic
    # fields do); otherwise one call per sample.
    velocities = traj.states[:, dim:]
    try:
        out = np.asarray(rhs(velocities, traj.times), dtype=float)
        if out.shape == velocities.shape:
            return out
    except Exception:
        pass
    return np.array(
        [np.atleast_1d(rhs(row, t)) for row, t in zip(velocities, traj.times)]
    )


def run_full_1d(
    force: Force1D, tau0: float, x0: float, v0: float, a0: float,
    cfg: StepperConfig, t_span,
) -> Trajectory:
    """Integrate the singular 1-D equation as (x, v, a)' = (v, a, (a - f)/tau0).

    Generic a0 excites the runaway branch and the acceleration grows like
    exp(t/tau0); that is the expected physics, and overflow merely truncates
    the trajectory with a divergence marker.
    """
    if not (math.isfinite(tau0) and tau0 > 0):
        raise ParameterError(f"tau0 must be positive and finite, got {tau0}")

    def system(y, t):
        return np.array([y[1], y[2], (y[2] - force.value(t)) / tau0])

    return _integrate(
        system,
        np.array([x0, v0, a0], dtype=float),
        cfg,
        t_span,
        _kinematic_columns(1, with_accel=True),
        {"equation": "full1d", "tau0": tau0, "force": force.descriptor()},
    )


def run_full_3d(
    sys: MagneticSystem, x0, v0, a0, cfg: StepperConfig, t_span
) -> Trajectory:
    """Integrate the singular magnetic equation as the 9-state system
    (x, v, a)' = (v, a, (a - W x v)/tau0)."""
    om = sys.omega_vec
    tau0 = sys.tau0

    def system(y, t):
        v = y[3:6]
        a = y[6:9]
        out = np.empty(9)
        out[0:3] = v
        out[3:6] = a
        out[6:9] = (a - cross3(om, v)) / tau0
        return out

    y0 = np.concatenate(
        [np.asarray(p, dtype=float).reshape(3) for p in (x0, v0, a0)]
    )
    return _integrate(
        system,
        y0,
        cfg,
        t_span,
        _kinematic_columns(3, with_accel=True),
        {"equation": "full3d", "tau0": tau0, "omega": list(sys.omega)},
    )


def runaway_metric(traj: Trajectory, tau0: float):
    """Exponential growth rate of |a| over the final third, in 1/tau0 units.

    A least-squares slope of log|a| against t; ~1 flags a runaway, ~0 or
    negative flags physical behavior.  Returns None (undefined, distinct
    from an error) when the acceleration is identically zero.
    """
    acc = traj.block("a")
    norms = np.linalg.norm(acc, axis=1)
    if np.all(norms == 0.0):
        return None
    start = (2 * len(norms)) // 3
    t = traj.times[start:]
    y = norms[start:]
    mask = y > 0.0
    if int(mask.sum()) < 10:
        raise ParameterError(
            "runaway metric needs at least 10 nonzero-acceleration samples "
            "in the final third of the trajectory"
        )
    slope = np.polyfit(t[mask], np.log(y[mask]), 1)[0]
    return float(slope * tau0)


def write_trajectory_csv(traj: Trajectory, fh) -> None:
    header = ("t",) + traj.columns
    rows = ((traj.times[i], *traj.states[i]) for i in range(len(traj.times)))
    write_csv(header, rows, fh)


def trajectory_metadata(traj: Trajectory) -> dict:
    """JSON-safe sidecar describing the run."""
    meta = dict(traj.metadata)
    meta["columns"] = list(traj.columns)
    meta["samples"] = int(len(traj.times))
    return meta


def write_trajectory_metadata(traj: Trajectory, fh) -> None:
    json.dump(trajectory_metadata(traj), fh, indent=2, sort_keys=True)
    fh.write("\n")
