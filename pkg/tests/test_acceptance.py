"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines.  Every tolerance is pinned here, not calibrated.

Criterion 7 (full singular equation shadowing the reduced one for three
cyclotron turns at mu = 0.1) is implemented exactly as stated and is
expected to FAIL in IEEE double precision: seeding on the reduced solution
is exact only to machine rounding (~1e-16 relative), and the singular
equation amplifies any off-branch component at the runaway rate
(1 + tau0 beta+)/tau0.  That contamination crosses the 1e-4 tolerance near
t = 28 tau0, less than half a cyclotron period (62.8 tau0), and reaches
~1e66 by three periods.  The growth law itself is verified by the other
half of this suite (criterion 6) and by the shadowing-window tests in
test_simulate.py; no double-precision integrator of the stated equations
can satisfy the three-period window.
"""

import math
import time

import numpy as np
import pytest

from alreduce.cli import main as cli_main
from alreduce.forces import ConstantForce, GaussianPulse
from alreduce.magnetic3d import (
    CoeffPair,
    MagneticSystem,
    fixed_point_coeffs,
    fixed_points,
    recurrence_step,
    reduced_rhs,
)
from alreduce.numerics import StepperConfig, erfcx, gauss_laguerre, rk4_step
from alreduce.reduction1d import (
    PulseReduction,
    ReductionSeries,
    gaussian_reduction,
    integral_reduction,
    preacceleration,
)
from alreduce.simulate import run_full_1d, run_full_3d, run_reduced, runaway_metric

THRESHOLD_CLOSED_FORM = math.sqrt(3.0 + 2.0 * math.sqrt(3.0)) / 4.0


def _report(number, name, ok, detail):
    print(f"ACCEPTANCE {number} {'PASS' if ok else 'FAIL'}: {name} [{detail}]")


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def test_criterion_1_stability_threshold(tmp_path):
    out = tmp_path / "threshold.json"
    with Timer() as timer:
        code = cli_main(["magnetic", "threshold", "--tol", "1e-6", "--output", str(out)])
    import json

    mu_star = json.loads(out.read_text())["mu_star"]
    err = abs(mu_star - THRESHOLD_CLOSED_FORM)
    ok = code == 0 and err <= 1e-6 and timer.elapsed < 1.0
    _report(1, "stability threshold", ok, f"mu*={mu_star:.7f}, |err|={err:.2e}, {timer.elapsed:.2f}s")
    assert code == 0
    assert err <= 1e-6
    assert timer.elapsed < 1.0


def test_criterion_2_fixed_point_oracle_equivalence():
    with Timer() as timer:
        worst = 0.0
        for mu in (0.01, 0.05, 0.1, 0.3, 0.6):
            sys = MagneticSystem(tau0=1.0, omega=(0.0, 0.0, mu))
            c = CoeffPair(1.0, 0.0)
            for _ in range(100000):
                nxt = recurrence_step(c, sys)
                if abs(nxt.alpha - c.alpha) < 1e-14 and abs(nxt.beta - c.beta) < 1e-14:
                    c = nxt
                    break
                c = nxt
            alpha, b = fixed_point_coeffs(mu)
            worst = max(worst, abs(c.alpha - alpha), abs(c.beta - b))
    ok = worst <= 1e-10 and timer.elapsed < 1.0
    _report(2, "iterated recurrence vs closed form", ok, f"worst dev={worst:.2e}, {timer.elapsed:.2f}s")
    assert worst <= 1e-10
    assert timer.elapsed < 1.0


def test_criterion_3_minus_point_always_unstable():
    with Timer() as timer:
        radii = []
        for mu in np.logspace(-3, 1, 41):
            report = fixed_points(MagneticSystem(tau0=1.0, omega=(0.0, 0.0, float(mu))))
            radii.append(report.spectral_radius_minus)
        min_radius = min(radii)
    ok = min_radius > 1.0 and timer.elapsed < 1.0
    _report(3, "repelling point spectral radius > 1", ok, f"min radius={min_radius:.6f}, {timer.elapsed:.2f}s")
    assert min_radius > 1.0
    assert timer.elapsed < 1.0


def test_criterion_4_series_integral_closed_form_triangle():
    tau0 = 1.0
    eps = 10.0 * tau0
    force = GaussianPulse(f0=1.0, eps=eps)
    pulse = PulseReduction(f0=1.0, tau0=tau0, eps=eps)
    series = ReductionSeries(tau0=tau0, force=force)
    rule = gauss_laguerre(64)
    with Timer() as timer:
        worst_pair = 0.0
        worst_series = 0.0
        for t in np.linspace(-5.0 * eps, 5.0 * eps, 101):
            closed = gaussian_reduction(pulse, float(t))
            integ = integral_reduction(force, tau0, float(t), rule)
            worst_pair = max(worst_pair, abs(closed - integ) / abs(closed))
            ev = series.evaluate(float(t))
            for ref in (closed, integ):
                worst_series = max(worst_series, abs(ev.value - ref) / ev.first_omitted)
    ok = worst_pair <= 1e-10 and worst_series <= 2.0 and timer.elapsed < 1.0
    _report(
        4,
        "series/integral/closed-form triangle",
        ok,
        f"closed-vs-integral rel={worst_pair:.2e}, series err/bound={worst_series:.3f}, {timer.elapsed:.2f}s",
    )
    assert worst_pair <= 1e-10
    assert worst_series <= 2.0
    assert timer.elapsed < 1.0


def test_criterion_5_non_commuting_limits():
    f0 = 1.0
    with Timer() as timer:
        # the two comparison columns at t = -tau0 with eps << tau0
        tau0 = 1.0
        radiationless = GaussianPulse(f0=f0, eps=tau0 / 100.0).value(-tau0)
        kick = preacceleration(PulseReduction(f0=f0, tau0=tau0), -tau0)
        columns_disagree = kick > math.e * radiationless

        # eps -> 0 at fixed tau0: monotone approach to the kick column
        eps_devs = [
            abs(gaussian_reduction(PulseReduction(f0=f0, tau0=tau0, eps=e), -tau0) - kick)
            for e in (tau0 / 4.0, tau0 / 16.0, tau0 / 64.0)
        ]
        eps_monotone = eps_devs[0] > eps_devs[1] > eps_devs[2]

        # tau0 -> 0 at fixed eps: monotone approach to the radiationless column
        eps_fixed = 1.0
        target = GaussianPulse(f0=f0, eps=eps_fixed).value(-eps_fixed)
        tau_devs = [
            abs(gaussian_reduction(PulseReduction(f0=f0, tau0=tt, eps=eps_fixed), -eps_fixed) - target)
            for tt in (eps_fixed / 4.0, eps_fixed / 16.0, eps_fixed / 64.0)
        ]
        tau_monotone = tau_devs[0] > tau_devs[1] > tau_devs[2]
    ok = columns_disagree and eps_monotone and tau_monotone and timer.elapsed < 1.0
    _report(
        5,
        "non-commuting limits",
        ok,
        f"column ratio={kick / max(radiationless, 5e-324):.3g}, eps-seq={eps_devs[2]:.2e}, "
        f"tau0-seq={tau_devs[2]:.2e}, {timer.elapsed:.2f}s",
    )
    assert columns_disagree
    assert eps_monotone
    assert tau_monotone
    assert timer.elapsed < 1.0


def test_criterion_6_runaway_growth_rates():
    tau0 = 1.0
    cfg = StepperConfig(step=tau0 / 100.0)
    with Timer() as timer:
        free = run_full_1d(ConstantForce(0.0), tau0, 0.0, 0.0, 1.0, cfg, (0.0, 10.0))
        free_rate = runaway_metric(free, tau0)

        sys = MagneticSystem(tau0=tau0, omega=(0.0, 0.0, 0.1))
        reduced = run_reduced(lambda v, t: reduced_rhs(sys, v), np.zeros(3), np.array([1.0, 0.0, 0.25]), cfg, (0.0, 30.0))
        reduced_rate = runaway_metric(reduced, tau0)
        _, b = fixed_point_coeffs(0.1)
    free_ok = abs(free_rate - 1.0) <= 1e-3
    reduced_ok = abs(reduced_rate + b) <= 0.1 * b
    ok = free_ok and reduced_ok and timer.elapsed < 5.0
    _report(
        6,
        "runaway growth rates",
        ok,
        f"free={free_rate:.6f} (want 1+-1e-3), reduced={reduced_rate:.6f} (want {-b:.6f}+-10%), {timer.elapsed:.2f}s",
    )
    assert free_ok
    assert reduced_ok
    assert timer.elapsed < 5.0


def test_criterion_7_reduction_validity_window():
    # Stated window: mu = 0.1, step tau0/100, velocity within 1e-4 relative
    # for 3 cyclotron periods.  See the module docstring: the runaway mode
    # amplifies double-precision seeding noise past 1e-4 at ~28 tau0, well
    # inside the first period, so this criterion cannot pass as stated.
    tau0 = 1.0
    mu = 0.1
    sys = MagneticSystem(tau0=tau0, omega=(0.0, 0.0, mu / tau0))
    v0 = np.array([1.0, 0.0, 0.25])
    period = 2.0 * math.pi / sys.omega_mag
    cfg = StepperConfig(step=tau0 / 100.0)
    span = (0.0, 3.0 * period)
    with Timer() as timer:
        full = run_full_3d(sys, np.zeros(3), v0, reduced_rhs(sys, v0), cfg, span)
        reduced = run_reduced(lambda v, t: reduced_rhs(sys, v), np.zeros(3), v0, cfg, span)
        vf = full.block("v")
        vr = reduced.block("v")
        dev = np.linalg.norm(vf - vr, axis=1) / np.linalg.norm(vr, axis=1)
        max_dev = float(np.max(dev))
        crossed = np.argmax(dev > 1e-4)
        crossing_time = float(full.times[crossed]) if np.any(dev > 1e-4) else math.inf
    ok = max_dev <= 1e-4 and timer.elapsed < 10.0
    _report(
        7,
        "3-period reduction validity window",
        ok,
        f"max rel dev={max_dev:.3e} (tol 1e-4), 1e-4 crossed at t={crossing_time:.1f} tau0 "
        f"of {3 * period:.1f}, {timer.elapsed:.2f}s",
    )
    assert timer.elapsed < 10.0
    assert max_dev <= 1e-4, (
        f"runaway contamination: deviation reaches {max_dev:.3e} by three periods "
        f"({3 * period:.1f} tau0); the 1e-4 tolerance is crossed at t={crossing_time:.1f} tau0 "
        f"because rounding noise (~1e-16) grows as exp(t (1 + tau0 beta+)/tau0). A "
        f"double-precision integrator of the stated equations cannot hold this window."
    )


def test_criterion_8_numerics_property_suites():
    with Timer() as timer:
        # quadrature exactness, n = 1..20, k <= 2n-1
        worst_quad = 0.0
        for n in range(1, 21):
            rule = gauss_laguerre(n)
            for k in range(2 * n):
                moment = math.fsum(w * u**k for w, u in zip(rule.weights, rule.nodes))
                worst_quad = max(worst_quad, abs(moment - math.factorial(k)) / math.factorial(k))

        # erfcx reflection identity and monotonicity
        worst_erfcx = 0.0
        for z in np.linspace(-5.0, 5.0, 101):
            lhs = math.exp(-z * z) * (erfcx(float(z)) + erfcx(float(-z)))
            worst_erfcx = max(worst_erfcx, abs(lhs - 2.0))
        grid = [erfcx(float(z)) for z in np.linspace(0.0, 30.0, 301)]
        monotone = all(a > b for a, b in zip(grid, grid[1:]))

        # RK4 reproduces cubics in one step and converges at 4th order
        h = 0.37
        cubic = rk4_step([0.0], 0.0, lambda s, t: np.array([3.0 * t * t]), h)
        cubic_err = abs(cubic[0] - h**3)

        def endpoint_error(step):
            y = np.array([1.0])
            t = 0.0
            for _ in range(round(1.0 / step)):
                y = rk4_step(y, t, lambda s, t: s, step)
                t += step
            return abs(y[0] - math.e)

        ratio = endpoint_error(0.01) / endpoint_error(0.005)
    ok = (
        worst_quad <= 1e-12
        and worst_erfcx <= 1e-12
        and monotone
        and cubic_err <= 1e-15
        and 14.0 <= ratio <= 18.0
        and timer.elapsed < 5.0
    )
    _report(
        8,
        "numerics property suites",
        ok,
        f"quad={worst_quad:.2e}, erfcx={worst_erfcx:.2e}, cubic={cubic_err:.1e}, "
        f"rk4 ratio={ratio:.1f}, {timer.elapsed:.2f}s",
    )
    assert worst_quad <= 1e-12
    assert worst_erfcx <= 1e-12
    assert monotone
    assert cubic_err <= 1e-15
    assert 14.0 <= ratio <= 18.0
    assert timer.elapsed < 5.0
