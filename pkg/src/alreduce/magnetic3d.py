"""Exact order reduction for a charge spiraling in a uniform magnetic field.

Successive substitution of the previous reduction into the damping term
maps the ansatz  a(v) = alpha * W x v - beta * v_perp  (W the rotation
vector, v_perp the velocity component normal to W) onto itself with

    alpha' = 1 - 2 tau0 alpha beta,
    beta'  = tau0 (|W|^2 alpha^2 - beta^2),

starting from (alpha, beta) = (1, 0).  The map has two fixed points; the
attracting one defines the physical reduced equation of motion and the
other is always repelling.

Stability here means stability of the two-dimensional coefficient map:
its Jacobian at a fixed point is

    J = [[-2 tau0 beta, -2 tau0 alpha],
         [ 2 tau0 |W|^2 alpha, -2 tau0 beta]],

whose eigenvalues are -2 tau0 beta +/- 2 i tau0 |W| alpha, so the spectral
radius is 2 tau0 sqrt(beta^2 + |W|^2 alpha^2).  Writing mu = tau0 |W| and
s = sqrt(1 + 16 mu^2), the radius at the attracting point is
sqrt(s + 1 - sqrt(2 (s + 1))), which crosses 1 exactly at s = 1 + sqrt(3),
i.e. at mu = sqrt(3 + 2 sqrt(3)) / 4 ~ 0.6356.  Everything in this module
is a pure function of its arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BracketError, ParameterError
from .tableio import write_csv

__all__ = [
    "CoeffPair",
    "MagneticSystem",
    "FixedPointReport",
    "STABILITY_THRESHOLD_MU",
    "MU_SERIES_CUTOFF",
    "recurrence_step",
    "iterate_recurrence",
    "fixed_points",
    "fixed_point_coeffs",
    "map_jacobian",
    "spectral_radius",
    "stability_threshold",
    "bifurcation_scan",
    "BifurcationRow",
    "BIFURCATION_HEADER",
    "write_bifurcation_csv",
    "reduced_rhs",
    "approx_rhs",
    "spiral_velocity",
]

# Exact stability boundary of the coefficient map (see module docstring).
STABILITY_THRESHOLD_MU = math.sqrt(3.0 + 2.0 * math.sqrt(3.0)) / 4.0

# Below this mu the reduced coefficients come from their small-mu expansion;
# the closed form is a 0/0 ratio at mu = 0 and the two branches agree to
# ~1e-12 relative at the switch.
MU_SERIES_CUTOFF = 1e-4

# Magnitudes past this during iteration count as divergence (the next step
# would square them toward overflow).
_DIVERGENCE_LIMIT = 1e100

BIFURCATION_HEADER = ("mu", "iter", "alpha", "tau0_beta")


@dataclass(frozen=True)
class CoeffPair:
    """State (alpha, beta) of the coefficient recurrence.

    alpha is dimensionless, beta has dimension 1/time.  The iteration always
    starts from (1, 0), the no-damping reduction.
    """

    alpha: float
    beta: float


INITIAL_COEFFS = CoeffPair(1.0, 0.0)


@dataclass(frozen=True)
class MagneticSystem:
    """Damping time tau0 and uniform rotation vector (cyclotron) omega."""

    tau0: float
    omega: tuple

    def __post_init__(self):
        if not (math.isfinite(self.tau0) and self.tau0 > 0):
            raise ParameterError(f"tau0 must be positive and finite, got {self.tau0}")
        vec = np.asarray(self.omega, dtype=float)
        if vec.shape != (3,):
            raise ParameterError(f"omega must be a 3-vector, got shape {vec.shape}")
        object.__setattr__(self, "omega", tuple(float(c) for c in vec))
        # Derived quantities are cached; the fields evaluate them per call.
        object.__setattr__(self, "_omega_arr", vec.copy())
        object.__setattr__(self, "_omega_mag", float(np.linalg.norm(vec)))

    @property
    def omega_vec(self) -> np.ndarray:
        return self._omega_arr

    @property
    def omega_mag(self) -> float:
        return self._omega_mag

    @property
    def mu(self) -> float:
        """The single dimensionless control parameter tau0 * |omega|."""
        return self.tau0 * self._omega_mag


def recurrence_step(c: CoeffPair, sys: MagneticSystem) -> CoeffPair:
    """One substitution step of the coefficient map."""
    om = sys.omega_mag
    return CoeffPair(
        alpha=1.0 - 2.0 * sys.tau0 * c.alpha * c.beta,
        beta=sys.tau0 * (om * om * c.alpha * c.alpha - c.beta * c.beta),
    )


def iterate_recurrence(sys: MagneticSystem, n: int, start: CoeffPair = INITIAL_COEFFS) -> CoeffPair:
    """n applications of the coefficient map."""
    if n < 0:
        raise ParameterError(f"iteration count must be >= 0, got {n}")
    c = start
    for _ in range(int(n)):
        c = recurrence_step(c, sys)
    return c


def _plus_coeffs_closed(mu: float) -> tuple[float, float]:
    """Attracting fixed point in dimensionless form (alpha, tau0*beta).

    Algebraically identical to the textbook closed form
        alpha = sqrt((s - 1) / 2) / (2 mu),  tau0 beta = (sqrt((s+1)/2) - 1) / 2
    with s = sqrt(1 + 16 mu^2), but rearranged through s - 1 = 16 mu^2/(1+s)
    so neither expression suffers cancellation (or 0/0) as mu -> 0.
    """
    s = math.hypot(1.0, 4.0 * mu)
    q = math.sqrt(0.5 * (s + 1.0))
    alpha = math.sqrt(2.0 / (1.0 + s))
    b = 4.0 * mu * mu / ((1.0 + s) * (q + 1.0))
    return alpha, b


def _minus_coeffs_closed(mu: float) -> tuple[float, float]:
    """Repelling fixed point in dimensionless form (alpha, tau0*beta)."""
    s = math.hypot(1.0, 4.0 * mu)
    q = math.sqrt(0.5 * (s + 1.0))
    return -math.sqrt(2.0 / (1.0 + s)), -(q + 1.0) / 2.0


def _plus_coeffs_series(mu: float) -> tuple[float, float]:
    # Expansions alpha = 1 - 2 mu^2 + 14 mu^4 + O(mu^6) and
    # tau0 beta = mu^2 - 5 mu^4 + O(mu^6); below the cutoff the omitted
    # O(mu^6) terms are < 1e-24 relative.
    mu2 = mu * mu
    return 1.0 - 2.0 * mu2 + 14.0 * mu2 * mu2, mu2 * (1.0 - 5.0 * mu2)


def fixed_point_coeffs(mu: float) -> tuple[float, float]:
    """(alpha, tau0*beta) of the attracting point, series-patched near mu=0."""
    if mu < MU_SERIES_CUTOFF:
        return _plus_coeffs_series(mu)
    return _plus_coeffs_closed(mu)


def map_jacobian(c: CoeffPair, sys: MagneticSystem) -> np.ndarray:
    """Jacobian of the coefficient map at (alpha, beta)."""
    om = sys.omega_mag
    t0 = sys.tau0
    return np.array(
        [
            [-2.0 * t0 * c.beta, -2.0 * t0 * c.alpha],
            [2.0 * t0 * om * om * c.alpha, -2.0 * t0 * c.beta],
        ]
    )


def _eigenvalues(c: CoeffPair, sys: MagneticSystem) -> tuple[complex, complex]:
    # Closed form for the 2x2 Jacobian spectrum: -2 tau0 beta +/- 2i tau0 |W| alpha.
    re = -2.0 * sys.tau0 * c.beta
    im = 2.0 * sys.tau0 * sys.omega_mag * c.alpha
    return complex(re, im), complex(re, -im)


def spectral_radius(c: CoeffPair, sys: MagneticSystem) -> float:
    return 2.0 * sys.tau0 * math.hypot(c.beta, sys.omega_mag * c.alpha)


def _radius_plus_dimensionless(mu: float) -> float:
    alpha, b = _plus_coeffs_closed(mu)
    return 2.0 * math.hypot(b, mu * alpha)


@dataclass(frozen=True)
class FixedPointReport:
    """Fixed points of the coefficient map with their linear stability."""

    mu: float
    tau0: float
    plus: CoeffPair
    minus: CoeffPair
    eigenvalues_plus: tuple
    eigenvalues_minus: tuple
    spectral_radius_plus: float
    spectral_radius_minus: float
    stable_plus: bool
    stable_minus: bool
    below_threshold: bool

    def to_json_dict(self) -> dict:
        return {
            "mu": self.mu,
            "plus": {
                "alpha": self.plus.alpha,
                "tau0_beta": self.tau0 * self.plus.beta,
            },
            "minus": {
                "alpha": self.minus.alpha,
                "tau0_beta": self.tau0 * self.minus.beta,
            },
            "spectral_radius_plus": self.spectral_radius_plus,
            "stable": self.stable_plus,
        }


def fixed_points(sys: MagneticSystem) -> FixedPointReport:
    """Both fixed points with spectra and a stable/unstable classification.

    Requires |omega| > 0; the zero-field reduction is handled directly by
    reduced_rhs and has no coefficient map to linearize.
    """
    om = sys.omega_mag
    if om == 0.0:
        raise ParameterError(
            "fixed points are undefined at omega = 0; use reduced_rhs, which "
            "handles the zero-field limit directly"
        )
    mu = sys.mu
    ap, bp = _plus_coeffs_closed(mu)
    am, bm = _minus_coeffs_closed(mu)
    plus = CoeffPair(ap, bp / sys.tau0)
    minus = CoeffPair(am, bm / sys.tau0)
    rad_p = spectral_radius(plus, sys)
    rad_m = spectral_radius(minus, sys)
    return FixedPointReport(
        mu=mu,
        tau0=sys.tau0,
        plus=plus,
        minus=minus,
        eigenvalues_plus=_eigenvalues(plus, sys),
        eigenvalues_minus=_eigenvalues(minus, sys),
        spectral_radius_plus=rad_p,
        spectral_radius_minus=rad_m,
        stable_plus=rad_p < 1.0,
        stable_minus=rad_m < 1.0,
        below_threshold=mu < STABILITY_THRESHOLD_MU,
    )


def stability_threshold(tolerance: float) -> float:
    """Locate the mu where the attracting point loses stability.

    Bisection on (spectral radius - 1); the result agrees with the closed
    form sqrt(3 + 2 sqrt(3)) / 4 to within the requested tolerance.
    """
    if not (isinstance(tolerance, (int, float)) and tolerance > 0):
        raise ParameterError(f"tolerance must be positive, got {tolerance!r}")
    lo, hi = 0.05, 0.95
    g_lo = _radius_plus_dimensionless(lo) - 1.0
    g_hi = _radius_plus_dimensionless(hi) - 1.0
    if not (g_lo < 0.0 < g_hi):
        raise BracketError(
            "stability bracket [0.05, 0.95] does not straddle the radius-1 "
            "crossing; the Jacobian spectrum is inconsistent"
        )
    while hi - lo > tolerance:
        mid = 0.5 * (lo + hi)
        if _radius_plus_dimensionless(mid) - 1.0 < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class BifurcationRow:
    """One kept iterate (or a divergence marker with NaN coordinates)."""

    mu: float
    iteration: int
    alpha: float
    tau0_beta: float

    @property
    def diverged(self) -> bool:
        return math.isnan(self.alpha)


def bifurcation_scan(mu_grid, n_iter: int, n_keep: int) -> list:
    """Iterate the dimensionless map from (1, 0) and keep the tail iterates.

    For each mu the final n_keep iterates are recorded as (alpha, tau0*beta);
    below the stability threshold they collapse onto the attracting point.
    Overflow during iteration produces a single NaN marker row at the step
    where it happened rather than an error.
    """
    mu_grid = [float(m) for m in mu_grid]
    if not mu_grid:
        raise ParameterError("bifurcation scan requires a nonempty mu grid")
    if any(m < 0 or not math.isfinite(m) for m in mu_grid):
        raise ParameterError("mu grid values must be finite and >= 0")
    if n_keep < 1 or n_iter <= n_keep:
        raise ParameterError(
            f"need n_iter > n_keep >= 1, got n_iter={n_iter}, n_keep={n_keep}"
        )

    rows = []
    for mu in mu_grid:
        # tau0 = 1, |omega| = mu makes beta already the dimensionless product.
        a, b = 1.0, 0.0
        tail = []
        marker = None
        for k in range(1, int(n_iter) + 1):
            a, b = 1.0 - 2.0 * a * b, mu * mu * a * a - b * b
            if not (math.isfinite(a) and math.isfinite(b)) or max(abs(a), abs(b)) > _DIVERGENCE_LIMIT:
                marker = BifurcationRow(mu, k, math.nan, math.nan)
                break
            if k > n_iter - n_keep:
                tail.append(BifurcationRow(mu, k, a, b))
        if marker is not None:
            rows.append(marker)
        else:
            rows.extend(tail)
    return rows


def write_bifurcation_csv(rows, fh) -> None:
    write_csv(
        BIFURCATION_HEADER,
        ((r.mu, r.iteration, r.alpha, r.tau0_beta) for r in rows),
        fh,
    )


def _split_velocity(omega_vec: np.ndarray, om: float, v: np.ndarray):
    # Works for a single velocity or a batch with shape (..., 3).
    unit = omega_vec / om
    v_par = np.asarray(v @ unit)[..., None] * unit
    return v_par, v - v_par


def cross3(a: np.ndarray, v: np.ndarray) -> np.ndarray:
    """a x v for a fixed 3-vector a and v of shape (..., 3).

    np.cross spends most of its time shuffling axes for inputs this small;
    the explicit components are ~10x faster in the integrator hot loop.
    """
    out = np.empty_like(v)
    out[..., 0] = a[1] * v[..., 2] - a[2] * v[..., 1]
    out[..., 1] = a[2] * v[..., 0] - a[0] * v[..., 2]
    out[..., 2] = a[0] * v[..., 1] - a[1] * v[..., 0]
    return out


def _coefficient_field(alpha: float, beta: float, sys: MagneticSystem, v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    om_vec = sys.omega_vec
    om = sys.omega_mag
    if om == 0.0:
        return np.zeros_like(v)
    _, v_perp = _split_velocity(om_vec, om, v)
    return alpha * cross3(om_vec, v) - beta * v_perp


def reduced_rhs(sys: MagneticSystem, v) -> np.ndarray:
    """Acceleration of the reduced (second-order) equation of motion.

    a = alpha+ W x v - beta+ v_perp with the attracting-point coefficients;
    the output has no component along the field.  Zero field gives zero
    acceleration (free particle), and for mu below the series cutoff the
    coefficients come from their small-mu expansion.  Accepts a single
    velocity or a batch with shape (..., 3).
    """
    alpha, b = fixed_point_coeffs(sys.mu)
    return _coefficient_field(alpha, b / sys.tau0, sys, v)


def approx_rhs(sys: MagneticSystem, n: int, v) -> np.ndarray:
    """Acceleration after n substitution steps: alpha_n W x v - beta_n v_perp.

    n = 0 is the no-damping rotation W x v; as n grows the field converges
    (inside the stability range) to reduced_rhs.
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 0:
        raise ParameterError(f"approximation order must be an integer >= 0, got {n!r}")
    c = iterate_recurrence(sys, n)
    return _coefficient_field(c.alpha, c.beta, sys, v)


def spiral_velocity(sys: MagneticSystem, v0, t: float) -> np.ndarray:
    """Exact velocity of the reduced equation: a damped rotation.

    The reduced equation is linear in v, leaves the parallel component
    untouched, and contracts the perpendicular one while rotating it:
    v(t) = v_par + exp(-beta+ t) R(alpha+ |W| t) v_perp, with the rotation
    sense fixed so that dv/dt at t = 0 equals reduced_rhs(v0).  Serves as
    the integrator oracle.
    """
    v0 = np.asarray(v0, dtype=float)
    om_vec = sys.omega_vec
    om = sys.omega_mag
    if om == 0.0:
        return v0.copy()
    alpha, b = fixed_point_coeffs(sys.mu)
    beta = b / sys.tau0
    unit = om_vec / om
    v_par, v_perp = _split_velocity(om_vec, om, v0)
    angle = alpha * om * t
    rotated = math.cos(angle) * v_perp + math.sin(angle) * cross3(unit, v_perp)
    return v_par + math.exp(-beta * t) * rotated
