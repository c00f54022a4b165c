"""Driving forces per unit mass with exact analytic derivatives.

The reduction series needs f, f', f'', ... to high order, so every force
model carries closed-form derivatives instead of automatic or numerical
differentiation.  Models are frozen dataclasses; evaluation is pure.
"""

from __future__ import annotations

import abc
import math
from dataclasses import dataclass
from typing import ClassVar, Optional

import numpy as np

from .errors import ParameterError

__all__ = [
    "Force1D",
    "ConstantForce",
    "LinearForce",
    "ExponentialForce",
    "SinusoidalForce",
    "GaussianPulse",
    "PhysicalParams",
    "hermite",
    "make_standard_forces",
    "force_from_descriptor",
    "tau0_from_params",
    "cyclotron_frequency",
]

# Gaussian derivatives grow factorially with order; beyond this the Hermite
# prefactors overflow silently for narrow pulses.
MAX_GAUSSIAN_DERIVATIVE = 60

_SQRT_PI = math.sqrt(math.pi)


class Force1D(abc.ABC):
    """Time-dependent force per unit mass f(t) with exact k-th derivatives."""

    model: ClassVar[str] = "abstract"

    @abc.abstractmethod
    def value(self, t: float) -> float:
        """f(t)."""

    def derivative(self, t: float, k: int) -> float:
        """k-th derivative of f at t; derivative(t, 0) is exactly value(t)."""
        if isinstance(k, bool) or not isinstance(k, (int, np.integer)):
            raise ParameterError(f"derivative order must be an integer, got {k!r}")
        if k < 0:
            raise ParameterError(f"derivative order must be >= 0, got {k}")
        if k == 0:
            return self.value(t)
        limit = self.derivative_order_limit
        if limit is not None and k > limit:
            raise ParameterError(
                f"{self.model} force supports derivatives up to order {limit}, got {k}"
            )
        return self._derivative(t, int(k))

    @abc.abstractmethod
    def _derivative(self, t: float, k: int) -> float:
        """k-th derivative for k >= 1."""

    @property
    def derivative_order_limit(self) -> Optional[int]:
        """Highest safe derivative order, or None when unbounded."""
        return None

    @property
    @abc.abstractmethod
    def params(self) -> dict:
        """Model parameters, JSON-serializable."""

    def descriptor(self) -> dict:
        """JSON object {model, params} used by configs and the CLI."""
        return {"model": self.model, "params": dict(self.params)}


@dataclass(frozen=True)
class ConstantForce(Force1D):
    amplitude: float = 1.0

    model: ClassVar[str] = "constant"

    def value(self, t):
        return self.amplitude

    def _derivative(self, t, k):
        return 0.0

    @property
    def params(self):
        return {"amplitude": self.amplitude}


@dataclass(frozen=True)
class LinearForce(Force1D):
    slope: float = 1.0
    intercept: float = 0.0

    model: ClassVar[str] = "linear"

    def value(self, t):
        return self.slope * t + self.intercept

    def _derivative(self, t, k):
        return self.slope if k == 1 else 0.0

    @property
    def params(self):
        return {"slope": self.slope, "intercept": self.intercept}


@dataclass(frozen=True)
class ExponentialForce(Force1D):
    """a * exp(rate * t); every derivative just multiplies by the rate."""

    amplitude: float = 1.0
    rate: float = 1.0

    model: ClassVar[str] = "exponential"

    def value(self, t):
        return self.amplitude * math.exp(self.rate * t)

    def _derivative(self, t, k):
        return self.amplitude * self.rate**k * math.exp(self.rate * t)

    @property
    def params(self):
        return {"amplitude": self.amplitude, "rate": self.rate}


@dataclass(frozen=True)
class SinusoidalForce(Force1D):
    """a * sin(omega t + phase); derivatives cycle with period 4."""

    amplitude: float = 1.0
    omega: float = 1.0
    phase: float = 0.0

    model: ClassVar[str] = "sinusoidal"

    def value(self, t):
        return self.amplitude * math.sin(self.omega * t + self.phase)

    def _derivative(self, t, k):
        arg = self.omega * t + self.phase
        phase_fn = (math.sin, math.cos)[k % 2]
        sign = -1.0 if k % 4 in (2, 3) else 1.0
        return self.amplitude * self.omega**k * sign * phase_fn(arg)

    @property
    def params(self):
        return {"amplitude": self.amplitude, "omega": self.omega, "phase": self.phase}


@dataclass(frozen=True)
class GaussianPulse(Force1D):
    """Normalized pulse f0/(eps sqrt(pi)) exp(-(t/eps)^2) of impulse f0.

    The impulse integral over all t is f0, so eps -> 0 approaches an ideal
    kick of strength f0 while keeping every derivative finite.
    """

    f0: float = 1.0
    eps: float = 1.0

    model: ClassVar[str] = "gaussian"

    def __post_init__(self):
        if not (math.isfinite(self.eps) and self.eps > 0):
            raise ParameterError(f"pulse width eps must be positive, got {self.eps}")

    @property
    def peak(self) -> float:
        return self.f0 / (self.eps * _SQRT_PI)

    def value(self, t):
        x = t / self.eps
        return self.peak * math.exp(-x * x)

    def _derivative(self, t, k):
        # d^k/dt^k exp(-x^2) = (-1/eps)^k H_k(x) exp(-x^2) with x = t/eps.
        x = t / self.eps
        return self.peak * hermite(k, x) * math.exp(-x * x) * (-1.0 / self.eps) ** k

    @property
    def derivative_order_limit(self):
        return MAX_GAUSSIAN_DERIVATIVE

    @property
    def params(self):
        return {"f0": self.f0, "eps": self.eps}


def hermite(k: int, x: float) -> float:
    """Physicists' Hermite polynomial H_k(x) by the three-term recurrence."""
    if k < 0:
        raise ParameterError(f"Hermite order must be >= 0, got {k}")
    if k == 0:
        return 1.0
    prev, cur = 1.0, 2.0 * x
    for j in range(1, k):
        prev, cur = cur, 2.0 * x * cur - 2.0 * j * prev
    return cur


_FORCE_MODELS = {
    cls.model: cls
    for cls in (ConstantForce, LinearForce, ExponentialForce, SinusoidalForce, GaussianPulse)
}


def make_standard_forces() -> dict:
    """Catalog of one default instance per force model."""
    return {name: cls() for name, cls in _FORCE_MODELS.items()}


def force_from_descriptor(descriptor: dict) -> Force1D:
    """Rebuild a force from its {model, params} JSON object."""
    if not isinstance(descriptor, dict) or "model" not in descriptor:
        raise ParameterError("force descriptor must be an object with a 'model' key")
    model = descriptor["model"]
    params = descriptor.get("params", {})
    cls = _FORCE_MODELS.get(model)
    if cls is None:
        known = ", ".join(sorted(_FORCE_MODELS))
        raise ParameterError(f"unknown force model {model!r}; known models: {known}")
    if not isinstance(params, dict):
        raise ParameterError("force descriptor 'params' must be an object")
    try:
        return cls(**params)
    except TypeError as exc:
        raise ParameterError(f"bad parameters for force model {model!r}: {exc}") from exc


@dataclass(frozen=True)
class PhysicalParams:
    """Charge, mass, light speed, and field in Gaussian (CGS) units.

    Only a convenience layer: the rest of the library takes the damping time
    and the rotation vector as primitive inputs.
    """

    charge: float  # statcoulomb
    mass: float  # gram
    light_speed: float = 2.99792458e10  # cm/s
    magnetic_field: tuple = (0.0, 0.0, 0.0)  # gauss

    def __post_init__(self):
        if not self.mass > 0:
            raise ParameterError(f"mass must be positive, got {self.mass}")
        if not self.light_speed > 0:
            raise ParameterError(f"light speed must be positive, got {self.light_speed}")


def tau0_from_params(p: PhysicalParams) -> float:
    """Radiation-reaction timescale 2 e^2 / (3 m c^3), in seconds."""
    return 2.0 * p.charge**2 / (3.0 * p.mass * p.light_speed**3)


def cyclotron_frequency(p: PhysicalParams) -> np.ndarray:
    """Rotation vector -e B / m componentwise, in 1/s."""
    return (-p.charge / p.mass) * np.asarray(p.magnetic_field, dtype=float)
