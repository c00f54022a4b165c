import io
import math
from dataclasses import dataclass
from typing import ClassVar

import numpy as np
import pytest
from hypothesis import given, strategies as st

from alreduce.errors import ParameterError
from alreduce.forces import ConstantForce, ExponentialForce, Force1D, GaussianPulse, LinearForce
from alreduce.numerics import gauss_laguerre
from alreduce.reduction1d import (
    LIMIT_STUDY_HEADER,
    FixedOrder,
    PulseReduction,
    ReductionSeries,
    SmallestTerm,
    gaussian_reduction,
    integral_reduction,
    limit_study,
    preacceleration,
    write_limit_study_csv,
)

RULE64 = gauss_laguerre(64)


@dataclass(frozen=True)
class CubicForce(Force1D):
    """t^3 test force; terminates the reduction series at order 3."""

    model: ClassVar[str] = "cubic"

    def value(self, t):
        return t**3

    def _derivative(self, t, k):
        return {1: 3.0 * t * t, 2: 6.0 * t, 3: 6.0}.get(k, 0.0)

    @property
    def params(self):
        return {}


class TestSeries:
    def test_constant_force_any_truncation(self):
        force = ConstantForce(amplitude=3.5)
        for truncation in (FixedOrder(0), FixedOrder(7), SmallestTerm()):
            series = ReductionSeries(tau0=0.25, force=force, truncation=truncation)
            ev = series.evaluate(1.7)
            assert ev.value == 3.5
            assert not ev.diverged

    def test_order_zero_is_radiationless(self):
        force = GaussianPulse(f0=1.0, eps=2.0)
        series = ReductionSeries(tau0=0.3, force=force, truncation=FixedOrder(0))
        for t in (-1.0, 0.0, 0.4):
            assert series.evaluate(t).value == force.value(t)

    def test_linear_force_is_exact_at_first_order(self):
        # dyadic values keep the float sums exact
        series = ReductionSeries(tau0=0.25, force=LinearForce(1.0, 0.0), truncation=FixedOrder(1))
        ev = series.evaluate(0.5)
        assert ev.value == 0.75
        assert ev.first_omitted == 0.0
        series5 = ReductionSeries(tau0=0.25, force=LinearForce(1.0, 0.0), truncation=FixedOrder(5))
        assert series5.evaluate(0.5).value == 0.75

    def test_linear_force_smallest_term_terminates(self):
        series = ReductionSeries(tau0=0.25, force=LinearForce(1.0, 0.0))
        ev = series.evaluate(0.5)
        assert ev.value == 0.75
        assert ev.order_used == 1
        assert ev.first_omitted == 0.0
        assert not ev.diverged

    def test_geometric_series_oracle(self):
        # terms (lambda tau0)^k e^(lambda t); at t=0 the partial sum is the
        # geometric sum (1 - r^41)/(1 - r) with r = 1/2
        series = ReductionSeries(tau0=1.0, force=ExponentialForce(1.0, 0.5), truncation=FixedOrder(40))
        ev = series.evaluate(0.0)
        oracle = (1.0 - 0.5**41) / (1.0 - 0.5)
        assert ev.value == pytest.approx(oracle, rel=1e-15)
        assert ev.value == pytest.approx(2.0, abs=1e-10)

    def test_partial_sum_difference_is_next_term(self):
        series_n = ReductionSeries(tau0=0.25, force=CubicForce(), truncation=FixedOrder(2))
        series_n1 = ReductionSeries(tau0=0.25, force=CubicForce(), truncation=FixedOrder(3))
        t = 0.5
        diff = series_n1.evaluate(t).value - series_n.evaluate(t).value
        assert diff == 0.25**3 * CubicForce().derivative(t, 3)

    @given(t=st.floats(min_value=-2.0, max_value=2.0), n=st.integers(min_value=0, max_value=6))
    def test_iteration_identity_polynomial(self, t, n):
        # One substitution step: next = f + tau0 * d/dt(previous partial sum).
        tau0 = 0.25
        force = CubicForce()
        series_next = ReductionSeries(tau0=tau0, force=force, truncation=FixedOrder(n + 1))
        partial_derivative = math.fsum(tau0**k * force.derivative(t, k + 1) for k in range(n + 1))
        lhs = series_next.evaluate(t).value
        rhs = force.value(t) + tau0 * partial_derivative
        assert lhs == pytest.approx(rhs, rel=1e-14, abs=1e-14)

    @pytest.mark.parametrize("rate", [0.5, 0.9])
    def test_smallest_term_matches_integral_for_exponential(self, rate):
        force = ExponentialForce(amplitude=1.0, rate=rate)
        series = ReductionSeries(tau0=1.0, force=force)
        worst = 0.0
        for t in np.linspace(-1.0, 1.0, 21):
            got = series.evaluate(float(t))
            ref = integral_reduction(force, 1.0, float(t), RULE64)
            worst = max(worst, abs(got.value - ref) / abs(ref))
            assert not got.diverged
        assert worst <= 1e-8

    def test_asymptotic_truncation_bound_wide_pulse(self):
        # eps = 10 tau0: optimal truncation lands within twice its own
        # first-omitted-term estimate of the quadrature value.
        eps = 10.0
        force = GaussianPulse(f0=1.0, eps=eps)
        series = ReductionSeries(tau0=1.0, force=force)
        for t in np.linspace(-5 * eps, 5 * eps, 51):
            ev = series.evaluate(float(t))
            ref = integral_reduction(force, 1.0, float(t), RULE64)
            assert ev.first_omitted > 0.0
            assert abs(ev.value - ref) <= 2.0 * ev.first_omitted

    def test_divergence_detected_for_narrow_pulse(self):
        # eps = tau0/2: the term envelope grows before the cap at every t.
        series = ReductionSeries(tau0=1.0, force=GaussianPulse(f0=1.0, eps=0.5))
        for t in np.linspace(-2.0, 2.0, 21):
            ev = series.evaluate(float(t))
            assert ev.diverged

    def test_narrow_pulse_terms_grow_from_the_start_at_peak(self):
        series = ReductionSeries(tau0=1.0, force=GaussianPulse(f0=1.0, eps=0.5))
        ev = series.evaluate(0.0)
        assert ev.diverged
        assert ev.order_used == 0
        assert ev.value == GaussianPulse(f0=1.0, eps=0.5).value(0.0)

    def test_fixed_order_beyond_guard_rejected(self):
        series = ReductionSeries(tau0=1.0, force=GaussianPulse(f0=1.0, eps=1.0), truncation=FixedOrder(70))
        with pytest.raises(ParameterError):
            series.evaluate(0.0)

    def test_fixed_order_at_guard_has_no_error_estimate(self):
        series = ReductionSeries(tau0=1.0, force=GaussianPulse(f0=1.0, eps=1.0), truncation=FixedOrder(60))
        ev = series.evaluate(0.3)
        assert math.isnan(ev.first_omitted)

    @pytest.mark.parametrize("tau0", [0.0, -1.0, math.inf])
    def test_bad_tau0_rejected(self, tau0):
        with pytest.raises(ParameterError):
            ReductionSeries(tau0=tau0, force=ConstantForce())


class TestIntegral:
    def test_constant(self):
        for n in (1, 2, 64):
            rule = gauss_laguerre(n)
            got = integral_reduction(ConstantForce(2.5), 0.7, 1.3, rule)
            assert got == pytest.approx(2.5, rel=1e-14)

    @pytest.mark.parametrize("n", [1, 2, 8])
    def test_linear_shift(self, n):
        # int e^-u (t + tau0 u) du = t + tau0, exact for every rule
        rule = gauss_laguerre(n)
        got = integral_reduction(LinearForce(1.0, 0.0), 0.3, 1.1, rule)
        assert got == pytest.approx(1.4, rel=1e-13)

    def test_exponential_oracle(self):
        # analytic integral 1/(1 - lambda tau0) = 2 at t = 0
        got = integral_reduction(ExponentialForce(1.0, 0.5), 1.0, 0.0, RULE64)
        assert got == pytest.approx(2.0, abs=1e-9)

    def test_bad_tau0_rejected(self):
        with pytest.raises(ParameterError):
            integral_reduction(ConstantForce(), 0.0, 0.0, RULE64)


class TestPulseClosedForms:
    def test_preacceleration_after_kick_is_zero(self):
        pulse = PulseReduction(f0=3.0, tau0=0.5)
        assert preacceleration(pulse, 1.0) == 0.0
        assert preacceleration(pulse, 1e-12) == 0.0

    def test_preacceleration_one_damping_time_early(self):
        pulse = PulseReduction(f0=3.0, tau0=0.5)
        assert preacceleration(pulse, -0.5) == pytest.approx(3.0 / 0.5 * math.exp(-1.0), rel=1e-15)

    def test_left_limit_convention_at_zero(self):
        pulse = PulseReduction(f0=3.0, tau0=0.5)
        assert preacceleration(pulse, 0.0) == 3.0 / 0.5

    def test_velocity_gained_equals_impulse(self):
        # int_{-inf}^0 (f0/tau0) e^(t/tau0) dt = f0; Simpson on [-40 tau0, 0].
        pulse = PulseReduction(f0=2.0, tau0=0.3)
        n = 40001
        ts, h = np.linspace(-40 * 0.3, 0.0, n, retstep=True)
        vals = np.array([preacceleration(pulse, t) for t in ts])
        integral = (h / 3.0) * (vals[0] + vals[-1] + 4.0 * vals[1::2].sum() + 2.0 * vals[2:-1:2].sum())
        assert integral == pytest.approx(2.0, rel=1e-10)

    @given(t=st.floats(min_value=-50.0, max_value=-1e-3))
    def test_monotone_increasing_before_kick(self, t):
        pulse = PulseReduction(f0=1.0, tau0=1.0)
        assert preacceleration(pulse, t) < preacceleration(pulse, t * 0.5)

    def test_preacceleration_requires_zero_width(self):
        with pytest.raises(ParameterError):
            preacceleration(PulseReduction(f0=1.0, tau0=1.0, eps=0.1), 0.0)

    def test_gaussian_requires_positive_width(self):
        with pytest.raises(ParameterError):
            gaussian_reduction(PulseReduction(f0=1.0, tau0=1.0, eps=0.0), 0.0)

    def test_matches_quadrature_far_in_the_tail(self):
        # t = 10 eps with eps = tau0: the integrand is a boundary layer of
        # width tau0/(2t) and needs the 200-node rule to resolve; 64 nodes
        # suffice through t = 3 eps.
        pulse = PulseReduction(f0=1.0, tau0=1.0, eps=1.0)
        force = GaussianPulse(f0=1.0, eps=1.0)
        closed = gaussian_reduction(pulse, 10.0)
        integ = integral_reduction(force, 1.0, 10.0, gauss_laguerre(200))
        assert closed == pytest.approx(integ, rel=1e-10)
        closed3 = gaussian_reduction(pulse, 3.0)
        integ3 = integral_reduction(force, 1.0, 3.0, RULE64)
        assert closed3 == pytest.approx(integ3, rel=1e-10)

    def test_decays_far_before_the_pulse(self):
        pulse = PulseReduction(f0=1.0, tau0=1.0, eps=1.0)
        assert abs(gaussian_reduction(pulse, -40.0)) < 1e-12 * 1.0 / 1.0

    def test_no_overflow_very_far_before_the_pulse(self):
        pulse = PulseReduction(f0=1.0, tau0=1.0, eps=0.01)
        for t in (-5.0, -50.0, -5000.0):
            value = gaussian_reduction(pulse, t)
            assert math.isfinite(value)
            assert value >= 0.0

    def test_no_overflow_far_after_the_pulse(self):
        # the textbook form of the closed form overflows past t ~ 700 tau0
        pulse = PulseReduction(f0=1.0, tau0=1.0, eps=1.0)
        value = gaussian_reduction(pulse, 1500.0)
        assert math.isfinite(value)
        assert value >= 0.0

    @given(f0=st.floats(min_value=-10.0, max_value=10.0), t=st.floats(min_value=-5.0, max_value=5.0))
    def test_linearity_in_impulse(self, f0, t):
        one = gaussian_reduction(PulseReduction(f0=1.0, tau0=1.0, eps=1.0), t)
        scaled = gaussian_reduction(PulseReduction(f0=f0, tau0=1.0, eps=1.0), t)
        assert scaled == pytest.approx(f0 * one, rel=1e-12, abs=1e-300)

    def test_narrow_width_limit_approaches_preacceleration(self):
        kick = PulseReduction(f0=1.0, tau0=1.0)
        target = preacceleration(kick, -1.0)
        deviations = [
            abs(gaussian_reduction(PulseReduction(f0=1.0, tau0=1.0, eps=eps), -1.0) - target)
            for eps in (0.25, 1.0 / 16.0, 1.0 / 64.0)
        ]
        assert deviations[0] > deviations[1] > deviations[2]


class TestLimitStudy:
    def test_grid_shape_and_columns(self):
        rows = limit_study(1.0, [1.0, 0.1], [0.5], [-1.0, 0.0, 1.0])
        assert len(rows) == 6
        assert rows[0].t == -1.0

    def test_small_damping_tracks_radiationless(self):
        # tau0 = eps/100: the reduction deviates from f by ~tau0 |f'|.
        ts = list(np.linspace(-3.0, 3.0, 25))
        rows = limit_study(1.0, [0.01], [1.0], ts)
        max_dev = max(abs(r.accel - r.radiationless) for r in rows)
        max_f = max(r.radiationless for r in rows)
        assert max_dev <= 0.05 * max_f

    def test_narrow_pulse_tracks_preacceleration(self):
        # eps = tau0/100 at t = -2 tau0: within 5% of (f0/tau0) e^-2.
        rows = limit_study(1.0, [1.0], [0.01], [-2.0])
        assert rows[0].accel == pytest.approx(math.exp(-2.0), rel=0.05)

    def test_comparison_columns_disagree_before_the_kick(self):
        # the two limits do not commute: at t = -tau0 with eps << tau0 the
        # radiationless column is ~0 while the kick column is (f0/tau0)/e.
        rows = limit_study(1.0, [1.0], [0.01], [-1.0])
        row = rows[0]
        assert row.preacc == pytest.approx(math.exp(-1.0), rel=1e-12)
        assert row.preacc > math.e * row.radiationless

    def test_empty_grid_rejected(self):
        with pytest.raises(ParameterError):
            limit_study(1.0, [], [1.0], [0.0])

    @pytest.mark.parametrize("bad", [0.0, -1.0, math.nan])
    def test_nonpositive_grid_values_rejected(self, bad):
        with pytest.raises(ParameterError):
            limit_study(1.0, [1.0], [bad], [0.0])

    def test_csv_emission(self):
        rows = limit_study(1.0, [1.0], [0.5], [0.25])
        buf = io.StringIO()
        write_limit_study_csv(rows, buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == ",".join(LIMIT_STUDY_HEADER)
        fields = lines[1].split(",")
        assert len(fields) == 6
        assert fields[0] == "0.25"
        # 17 significant digits survive a round trip
        assert float(fields[3]) == rows[0].accel
