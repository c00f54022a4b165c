"""Order reduction of the 1-D damped equation xddot = f(t) + tau0 * xdddot.

The physical (runaway-free) reduction admits two equivalent evaluations:

* a power series in tau0 whose k-th term is tau0^k f^(k)(t), generated by
  successively substituting the previous reduction into the damping term;
* the integral of exp(-u) f(t + tau0 u) over u in (0, inf), evaluated here
  by Gauss-Laguerre quadrature.

The series is asymptotic rather than convergent for pulse-like forces, so
the default truncation is the smallest-term (superasymptotic) rule with
divergence diagnostics instead of a convergence assertion.  Closed forms
for ideal and Gaussian pulses cover the preacceleration regime where the
series cannot reach.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

from .errors import ParameterError
from .forces import Force1D, GaussianPulse
from .numerics import QuadratureRule, erfcx
from .tableio import write_csv

__all__ = [
    "FixedOrder",
    "SmallestTerm",
    "SeriesEvaluation",
    "ReductionSeries",
    "PulseReduction",
    "LimitStudyRow",
    "integral_reduction",
    "preacceleration",
    "gaussian_reduction",
    "limit_study",
    "write_limit_study_csv",
    "LIMIT_STUDY_HEADER",
]

DEFAULT_MAX_ORDER = 200

LIMIT_STUDY_HEADER = ("t", "tau0", "eps", "accel", "radiationless", "preacc")


@dataclass(frozen=True)
class FixedOrder:
    """Truncate the reduction series after the term of this order."""

    order: int

    def __post_init__(self):
        if self.order < 0:
            raise ParameterError(f"series order must be >= 0, got {self.order}")


@dataclass(frozen=True)
class SmallestTerm:
    """Stop just before the smallest-magnitude term, capped at max_order.

    This is the standard optimal truncation for asymptotic series: partial
    sums improve while the terms shrink and degrade once they grow again.
    Term size is judged by the two-term envelope max(|t_k|, |t_{k+1}|), so an
    accidental zero of one term (the oscillatory derivative factors have
    roots that sweep past any fixed t) cannot fake an early optimum.
    """

    max_order: int = DEFAULT_MAX_ORDER

    def __post_init__(self):
        if self.max_order < 1:
            raise ParameterError(f"max_order must be >= 1, got {self.max_order}")


@dataclass(frozen=True)
class SeriesEvaluation:
    """Value of a truncated reduction series plus truncation diagnostics.

    order_used is the highest term index included; first_omitted is the
    magnitude of the next (omitted) term, the natural error estimate; and
    diverged records whether the term magnitudes started growing before the
    order cap, the signature of an asymptotic series evaluated outside its
    useful range.
    """

    value: float
    order_used: int
    first_omitted: float
    diverged: bool


@dataclass(frozen=True)
class ReductionSeries:
    """Power-series reduction sum_k tau0^k f^(k)(t) under a truncation rule."""

    tau0: float
    force: Force1D
    truncation: Union[FixedOrder, SmallestTerm] = field(default_factory=SmallestTerm)

    def __post_init__(self):
        if not (math.isfinite(self.tau0) and self.tau0 > 0):
            raise ParameterError(f"tau0 must be positive and finite, got {self.tau0}")

    def evaluate(self, t: float) -> SeriesEvaluation:
        if isinstance(self.truncation, FixedOrder):
            return self._evaluate_fixed(t, self.truncation.order)
        return self._evaluate_smallest(t, self._effective_cap(self.truncation.max_order))

    def _effective_cap(self, max_order: int) -> int:
        limit = self.force.derivative_order_limit
        if limit is None:
            return max_order
        return min(max_order, limit)

    def _term(self, t: float, k: int) -> float:
        return self.tau0**k * self.force.derivative(t, k)

    def _evaluate_fixed(self, t: float, order: int) -> SeriesEvaluation:
        terms = [self._term(t, k) for k in range(order + 1)]
        value = math.fsum(terms)
        limit = self.force.derivative_order_limit
        if limit is not None and order + 1 > limit:
            # The requested order itself is legal; the error estimate simply
            # has no next term to look at.
            first_omitted = math.nan
        else:
            first_omitted = abs(self._term(t, order + 1))
        return SeriesEvaluation(value, order, first_omitted, False)

    def _evaluate_smallest(self, t: float, cap: int) -> SeriesEvaluation:
        terms = [self._term(t, k) for k in range(cap + 1)]
        mags = [abs(x) for x in terms]

        # Two consecutive vanishing terms at the cap mean the series
        # terminated (polynomial forces); keep every nonzero term.
        if cap >= 1 and mags[-1] == 0.0 and mags[-2] == 0.0:
            last_nonzero = 0
            for k, m in enumerate(mags):
                if m > 0.0:
                    last_nonzero = k
            value = math.fsum(terms[: last_nonzero + 1])
            return SeriesEvaluation(value, last_nonzero, 0.0, False)

        envelope = [max(mags[k], mags[k + 1]) for k in range(cap)]
        smallest = min(range(cap), key=lambda k: envelope[k])
        diverged = any(e > envelope[smallest] for e in envelope[smallest + 1 :])
        if smallest == 0:
            # Terms grow from the start; keep the radiationless term anyway.
            order_used = 0
            first_omitted = envelope[1] if cap >= 2 else mags[1]
        else:
            order_used = smallest - 1
            first_omitted = envelope[smallest]
        value = math.fsum(terms[: order_used + 1])
        return SeriesEvaluation(value, order_used, first_omitted, diverged)


def integral_reduction(force: Force1D, tau0: float, t: float, rule: QuadratureRule) -> float:
    """Quadrature evaluation of the physical reduction at time t.

    Computes sum_i w_i f(t + tau0 u_i); exact whenever f restricted to the
    sampled ray is a polynomial of degree <= 2n - 1.
    """
    if not (math.isfinite(tau0) and tau0 > 0):
        raise ParameterError(f"tau0 must be positive and finite, got {tau0}")
    return math.fsum(
        w * force.value(t + tau0 * u) for w, u in zip(rule.weights, rule.nodes)
    )


@dataclass(frozen=True)
class PulseReduction:
    """Closed-form reduction of a pulse of impulse f0 and width eps.

    eps = 0 selects the ideal-kick closed form, which exhibits
    preacceleration; eps > 0 selects the Gaussian-pulse closed form, finite
    and positive everywhere for f0 > 0.
    """

    f0: float
    tau0: float
    eps: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.tau0) and self.tau0 > 0):
            raise ParameterError(f"tau0 must be positive and finite, got {self.tau0}")
        if not (math.isfinite(self.eps) and self.eps >= 0):
            raise ParameterError(f"eps must be >= 0 and finite, got {self.eps}")


def preacceleration(pulse: PulseReduction, t: float) -> float:
    """Acceleration of the ideal-kick reduction: (f0/tau0) e^(t/tau0) ahead
    of the kick (t < 0) and zero after it.

    At t = 0 exactly, returns the left limit f0/tau0 (convention; the jump
    happens at the kick).
    """
    if pulse.eps != 0.0:
        raise ParameterError(
            f"ideal-kick closed form requires eps == 0, got eps={pulse.eps}"
        )
    if t > 0.0:
        return 0.0
    return pulse.f0 / pulse.tau0 * math.exp(t / pulse.tau0)


def gaussian_reduction(pulse: PulseReduction, t: float) -> float:
    """Closed-form reduction of the Gaussian pulse.

    Mathematically (f0 / 2 tau0) e^(t/tau0) e^(eps^2/4 tau0^2) erfc(z) with
    z = t/eps + eps/(2 tau0), but that form overflows for t beyond a few
    hundred tau0.  Since z^2 = (t/eps)^2 + t/tau0 + eps^2/(4 tau0^2), the
    identical product (f0 / 2 tau0) e^(-(t/eps)^2) erfcx(z) stays in range;
    for z < 0 the reflection erfcx(z) = 2 e^(z^2) - erfcx(-z) is folded in
    analytically so no factor ever overflows.
    """
    if pulse.eps <= 0.0:
        raise ParameterError(
            f"Gaussian closed form requires eps > 0, got eps={pulse.eps}"
        )
    pre = pulse.f0 / (2.0 * pulse.tau0)
    x = t / pulse.eps
    z = x + pulse.eps / (2.0 * pulse.tau0)
    if z >= 0.0:
        return pre * math.exp(-x * x) * erfcx(z)
    # z^2 - x^2 factored as (z - x)(z + x) to avoid cancellation for large |x|;
    # on this branch the exponent is always negative.
    zsq_minus_xsq = (z - x) * (z + x)
    return pre * (2.0 * math.exp(zsq_minus_xsq) - math.exp(-x * x) * erfcx(-z))


@dataclass(frozen=True)
class LimitStudyRow:
    t: float
    tau0: float
    eps: float
    accel: float
    radiationless: float
    preacc: float


def limit_study(f0, tau0_grid, eps_grid, t_grid) -> list:
    """Tabulate the Gaussian-pulse reduction against its two limits.

    For every (t, tau0, eps) grid point the row carries the closed-form
    acceleration plus two comparison columns: the no-damping limit f(t)
    (tau0 -> 0) and the ideal-kick limit (eps -> 0).  The two limits do not
    commute, which the table makes directly visible.
    """
    tau0_grid = [float(x) for x in tau0_grid]
    eps_grid = [float(x) for x in eps_grid]
    t_grid = [float(x) for x in t_grid]
    if not tau0_grid or not eps_grid or not t_grid:
        raise ParameterError("limit_study requires nonempty tau0, eps, and t grids")
    for name, grid in (("tau0", tau0_grid), ("eps", eps_grid)):
        if any(not (math.isfinite(v) and v > 0) for v in grid):
            raise ParameterError(f"all {name} grid values must be positive and finite")

    rows = []
    for t in t_grid:
        for tau0 in tau0_grid:
            kick = PulseReduction(f0=f0, tau0=tau0, eps=0.0)
            for eps in eps_grid:
                pulse = PulseReduction(f0=f0, tau0=tau0, eps=eps)
                rows.append(
                    LimitStudyRow(
                        t=t,
                        tau0=tau0,
                        eps=eps,
                        accel=gaussian_reduction(pulse, t),
                        radiationless=GaussianPulse(f0=f0, eps=eps).value(t),
                        preacc=preacceleration(kick, t),
                    )
                )
    return rows


def write_limit_study_csv(rows, fh) -> None:
    write_csv(
        LIMIT_STUDY_HEADER,
        ((r.t, r.tau0, r.eps, r.accel, r.radiationless, r.preacc) for r in rows),
        fh,
    )
