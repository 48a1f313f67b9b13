"""Physical parameters, phase-space states and the planar potential families.

Every quantity accepts ``int``, ``Fraction`` or ``str`` ("p/q") inputs, which are
kept as exact rationals, or ``float`` inputs, which switch evaluation to floating
point. Evaluations of the polynomial and inverse-square potentials stay exact when
every input is rational; the Kepler-type families need square roots and always
return floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from fractions import Fraction
from numbers import Rational
from typing import Union

Number = Union[Fraction, float]

__all__ = [
    "SingularEvaluationError",
    "Parameters",
    "PhaseState",
    "Potential",
    "IsotropicOscillator",
    "OscillatorGravity",
    "AnisotropicOscillator",
    "SWI",
    "SWII",
    "SWIII",
    "SWIV",
    "as_number",
    "is_exact",
    "rod_inertia",
    "hamiltonian_value",
    "potential_value",
    "potential_gradient",
]


class SingularEvaluationError(ArithmeticError):
    """A potential was evaluated on its singular set."""

    def __init__(self, variant: str, coordinate: str, message: str | None = None):
        self.variant = variant
        self.coordinate = coordinate
        super().__init__(message or f"{variant} potential is singular at {coordinate} = 0")


def as_number(value) -> Number:
    """Coerce a user value to ``Fraction`` (exact) or ``float``."""
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, Rational):
        return Fraction(int(value.numerator), int(value.denominator))
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a number")


def is_exact(*values) -> bool:
    return all(isinstance(v, Fraction) for v in values)


def _require_positive(name: str, value: Number) -> None:
    if not value > 0:
        raise ValueError(f"{name} must be positive, got {value}")


def rod_inertia(mass, rod_length) -> Number:
    """Moment of inertia of a homogeneous rod about its centre, ``M l^2 / 12``."""
    mass, rod_length = as_number(mass), as_number(rod_length)
    _require_positive("mass", mass)
    _require_positive("rod_length", rod_length)
    return mass * rod_length**2 / 12


def _sqrt_exact(q: Fraction) -> Fraction | None:
    num, den = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if num * num == q.numerator and den * den == q.denominator:
        return Fraction(num, den)
    return None


@dataclass(frozen=True)
class Parameters:
    """Mass ``M``, oscillator frequency ``omega``, rotor inertia ``I`` and gravity ``g``.

    ``omega_x`` and ``omega_y`` are only read by the anisotropic oscillator.
    """

    mass: Number
    omega: Number
    inertia: Number
    gravity: Number = Fraction(0)
    omega_x: Number | None = None
    omega_y: Number | None = None

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if value is not None:
                object.__setattr__(self, f.name, as_number(value))
        _require_positive("mass", self.mass)
        _require_positive("omega", self.omega)
        _require_positive("inertia", self.inertia)
        if self.gravity < 0:
            raise ValueError(f"gravity must be nonnegative, got {self.gravity}")
        for name in ("omega_x", "omega_y"):
            value = getattr(self, name)
            if value is not None:
                _require_positive(name, value)

    @classmethod
    def from_rod(cls, mass, omega, rod_length, **kwargs) -> "Parameters":
        return cls(mass=mass, omega=omega, inertia=rod_inertia(mass, rod_length), **kwargs)

    @staticmethod
    def omega_from_k(k, mass) -> Number:
        """``omega = sqrt(k / M)``; exact only when ``k / M`` is a rational square."""
        k, mass = as_number(k), as_number(mass)
        _require_positive("k", k)
        _require_positive("mass", mass)
        if is_exact(k, mass):
            root = _sqrt_exact(k / mass)
            if root is not None:
                return root
        return math.sqrt(float(k) / float(mass))

    @property
    def exact(self) -> bool:
        return is_exact(*(v for v in (getattr(self, f.name) for f in fields(self)) if v is not None))


@dataclass(frozen=True)
class PhaseState:
    """A point ``(x, y, theta, p_x, p_y, p_theta)``; ``theta`` is never wrapped."""

    x: Number = Fraction(0)
    y: Number = Fraction(0)
    theta: Number = Fraction(0)
    p_x: Number = Fraction(0)
    p_y: Number = Fraction(0)
    p_theta: Number = Fraction(0)

    def __post_init__(self):
        for f in fields(self):
            value = as_number(getattr(self, f.name))
            if isinstance(value, float) and not math.isfinite(value):
                raise ValueError(f"{f.name} must be finite, got {value}")
            object.__setattr__(self, f.name, value)

    def as_tuple(self) -> tuple:
        return (self.x, self.y, self.theta, self.p_x, self.p_y, self.p_theta)

    def as_floats(self) -> tuple[float, ...]:
        return tuple(float(v) for v in self.as_tuple())

    @property
    def exact(self) -> bool:
        return is_exact(*self.as_tuple())

    def wrapped_theta(self) -> float:
        """``theta`` reduced to ``[0, 2 pi)``, for display only."""
        return float(self.theta) % (2 * math.pi)

    @classmethod
    def from_sequence(cls, values) -> "PhaseState":
        x, y, theta, p_x, p_y, p_theta = values
        return cls(x, y, theta, p_x, p_y, p_theta)


class Potential:
    """Base class of the planar potential families ``V(x, y)``.

    Subclasses are frozen dataclasses; ``value`` and ``gradient`` take the mass
    because the oscillator families scale with it.
    """

    variant: str = ""

    def value(self, x, y, mass):
        raise NotImplementedError

    def gradient(self, x, y, mass):
        raise NotImplementedError

    def coefficients(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def __post_init__(self):
        for f in fields(self):
            object.__setattr__(self, f.name, as_number(getattr(self, f.name)))


@dataclass(frozen=True)
class IsotropicOscillator(Potential):
    omega: Number = Fraction(1)
    variant = "isotropic"

    def value(self, x, y, mass):
        return mass * self.omega**2 * (x * x + y * y) / 2

    def gradient(self, x, y, mass):
        k = mass * self.omega**2
        return k * x, k * y


@dataclass(frozen=True)
class OscillatorGravity(Potential):
    """Isotropic oscillator in a vertical plane, ``y`` pointing up."""

    omega: Number = Fraction(1)
    gravity: Number = Fraction(0)
    variant = "gravity"

    def value(self, x, y, mass):
        return mass * self.omega**2 * (x * x + y * y) / 2 + mass * self.gravity * y

    def gradient(self, x, y, mass):
        k = mass * self.omega**2
        return k * x, k * y + mass * self.gravity


@dataclass(frozen=True)
class AnisotropicOscillator(Potential):
    omega_x: Number = Fraction(1)
    omega_y: Number = Fraction(1)
    variant = "anisotropic"

    def value(self, x, y, mass):
        return mass * (self.omega_x**2 * x * x + self.omega_y**2 * y * y) / 2

    def gradient(self, x, y, mass):
        return mass * self.omega_x**2 * x, mass * self.omega_y**2 * y


@dataclass(frozen=True)
class SWI(Potential):
    """``alpha (x^2 + y^2) + beta / x^2 + gamma / y^2``."""

    alpha: Number = Fraction(1)
    beta: Number = Fraction(0)
    gamma: Number = Fraction(0)
    variant = "sw_i"

    def _check(self, x, y):
        if x == 0:
            raise SingularEvaluationError(self.variant, "x")
        if y == 0:
            raise SingularEvaluationError(self.variant, "y")

    def value(self, x, y, mass):
        self._check(x, y)
        return self.alpha * (x * x + y * y) + self.beta / (x * x) + self.gamma / (y * y)

    def gradient(self, x, y, mass):
        self._check(x, y)
        return (
            2 * self.alpha * x - 2 * self.beta / x**3,
            2 * self.alpha * y - 2 * self.gamma / y**3,
        )


@dataclass(frozen=True)
class SWII(Potential):
    """``alpha (x^2 + 4 y^2) + beta / x^2 + gamma y`` (fixed 1:2 frequency ratio)."""

    alpha: Number = Fraction(1)
    beta: Number = Fraction(0)
    gamma: Number = Fraction(0)
    variant = "sw_ii"

    def value(self, x, y, mass):
        if x == 0:
            raise SingularEvaluationError(self.variant, "x")
        return self.alpha * (x * x + 4 * y * y) + self.beta / (x * x) + self.gamma * y

    def gradient(self, x, y, mass):
        if x == 0:
            raise SingularEvaluationError(self.variant, "x")
        return 2 * self.alpha * x - 2 * self.beta / x**3, 8 * self.alpha * y + self.gamma


def _polar(variant: str, x, y) -> tuple[float, float, float]:
    x, y = float(x), float(y)
    r = math.hypot(x, y)
    if r == 0:
        raise SingularEvaluationError(variant, "r")
    return x, y, r


@dataclass(frozen=True)
class SWIII(Potential):
    """``alpha / r + (beta / cos^2(phi/2) + gamma / sin^2(phi/2)) / r^2``.

    With ``cos^2(phi/2) = (r + x) / 2r`` the angular part becomes
    ``2 beta / (r (r + x)) + 2 gamma / (r (r - x))``.
    """

    alpha: Number = Fraction(-1)
    beta: Number = Fraction(0)
    gamma: Number = Fraction(0)
    variant = "sw_iii"

    def _terms(self, x, y):
        x, y, r = _polar(self.variant, x, y)
        plus, minus = r + x, r - x
        if self.beta != 0 and plus == 0:
            raise SingularEvaluationError(self.variant, "y", "sw_iii potential is singular on the negative x-axis")
        if self.gamma != 0 and minus == 0:
            raise SingularEvaluationError(self.variant, "y", "sw_iii potential is singular on the positive x-axis")
        return x, y, r, plus, minus

    def value(self, x, y, mass):
        x, y, r, plus, minus = self._terms(x, y)
        v = float(self.alpha) / r
        if self.beta != 0:
            v += 2 * float(self.beta) / (r * plus)
        if self.gamma != 0:
            v += 2 * float(self.gamma) / (r * minus)
        return v

    def gradient(self, x, y, mass):
        x, y, r, plus, minus = self._terms(x, y)
        rx, ry = x / r, y / r
        gx = -float(self.alpha) * rx / r**2
        gy = -float(self.alpha) * ry / r**2
        # d/dv [1 / (r s)] = -(r_v s + r s_v) / (r s)^2 with s = r +- x
        if self.beta != 0:
            c = -2 * float(self.beta) / (r * plus) ** 2
            gx += c * (rx * plus + r * (rx + 1))
            gy += c * (ry * plus + r * ry)
        if self.gamma != 0:
            c = -2 * float(self.gamma) / (r * minus) ** 2
            gx += c * (rx * minus + r * (rx - 1))
            gy += c * (ry * minus + r * ry)
        return gx, gy


@dataclass(frozen=True)
class SWIV(Potential):
    """``alpha / r + (beta cos(phi/2) + gamma sin(phi/2)) / sqrt(r)``, ``phi`` in ``(-pi, pi]``."""

    alpha: Number = Fraction(-1)
    beta: Number = Fraction(0)
    gamma: Number = Fraction(0)
    variant = "sw_iv"

    def value(self, x, y, mass):
        x, y, r = _polar(self.variant, x, y)
        half = math.atan2(y, x) / 2
        return float(self.alpha) / r + (float(self.beta) * math.cos(half) + float(self.gamma) * math.sin(half)) / math.sqrt(r)

    def gradient(self, x, y, mass):
        x, y, r = _polar(self.variant, x, y)
        half = math.atan2(y, x) / 2
        c, s = math.cos(half), math.sin(half)
        alpha, beta, gamma = float(self.alpha), float(self.beta), float(self.gamma)
        angular = beta * c + gamma * s
        d_angular = (-beta * s + gamma * c) / 2  # d/dphi
        dr = -alpha / r**2 - angular / (2 * r**1.5)
        dphi = d_angular / math.sqrt(r)
        # dr/dx = x/r, dphi/dx = -y/r^2
        return dr * x / r - dphi * y / r**2, dr * y / r + dphi * x / r**2


POTENTIALS: dict[str, type[Potential]] = {
    cls.variant: cls
    for cls in (IsotropicOscillator, OscillatorGravity, AnisotropicOscillator, SWI, SWII, SWIII, SWIV)
}


def potential_value(pot: Potential, params: Parameters, x, y):
    return pot.value(as_number(x), as_number(y), params.mass)


def potential_gradient(pot: Potential, params: Parameters, x, y):
    """Closed-form ``(dV/dx, dV/dy)``."""
    return pot.gradient(as_number(x), as_number(y), params.mass)


def hamiltonian_value(params: Parameters, pot: Potential, s: PhaseState):
    """``(p_x^2 + p_y^2) / 2M + V(x, y) + p_theta^2 / 2I``; exact on rational inputs."""
    kinetic = (s.p_x**2 + s.p_y**2) / (2 * params.mass)
    rotor = s.p_theta**2 / (2 * params.inertia)
    return kinetic + pot.value(s.x, s.y, params.mass) + rotor
