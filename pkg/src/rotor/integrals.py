"""Named observables of the oscillator-plus-rotor systems.

Two variants are supported: ``"isotropic"`` (``V = M w^2 r^2 / 2``) and
``"gravity"`` (the same plus ``M g y``). Parameters are converted to exact
rationals; a float parameter becomes the rational value of that float.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

from .algebra import Observable, RationalComplex, conjugate, fourier, var
from .model import Parameters

__all__ = [
    "VARIANTS",
    "Coefficients",
    "build_named",
    "build_K",
    "build_Kbar",
    "build_P",
    "build_Q",
    "resolve",
    "NAMED",
]

VARIANTS = ("isotropic", "gravity")

X, Y, PX, PY, PTHETA = (var(v) for v in ("x", "y", "p_x", "p_y", "p_theta"))
I = RationalComplex(0, 1)


@dataclass(frozen=True)
class Coefficients:
    """Exact ``M``, ``omega``, ``I``, ``g`` used by the builders."""

    mass: Fraction
    omega: Fraction
    inertia: Fraction
    gravity: Fraction

    @classmethod
    def of(cls, params: Parameters) -> "Coefficients":
        return cls(*(Fraction(v) for v in (params.mass, params.omega, params.inertia, params.gravity)))

    @property
    def shift(self) -> Fraction:
        """Vertical offset ``g / omega^2`` of the gravity equilibrium."""
        return self.gravity / self.omega**2


def _check_variant(variant: str) -> None:
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")


def _hamiltonian(c: Coefficients, variant: str) -> Observable:
    h = (PX**2 + PY**2) / (2 * c.mass) + (X**2 + Y**2) * (c.mass * c.omega**2 / 2) + PTHETA**2 / (2 * c.inertia)
    if variant == "gravity":
        h = h + Y * (c.mass * c.gravity)
    return h


def _y_shifted(c: Coefficients) -> Observable:
    return Y + c.shift


def _ladder(c: Coefficients, y: Observable) -> Observable:
    # Z = w + i M omega u with u = x + i y
    return (PX + I * PY) + I * (c.mass * c.omega) * (X + I * y)


def _builders(c: Coefficients, variant: str) -> dict:
    ys = _y_shifted(c)
    u = X + I * Y
    w = PX + I * PY
    z = _ladder(c, ys if variant == "gravity" else Y)
    half_k = c.mass * c.omega**2 / 2
    return {
        "H": lambda: _hamiltonian(c, variant),
        "F1": lambda: _hamiltonian(c, variant),
        "F2": lambda: PTHETA**2 / (2 * c.inertia),
        "p_theta": lambda: PTHETA,
        "L": lambda: X * PY - Y * PX,
        "G1": lambda: PX * PY / (2 * c.mass) + X * Y * half_k,
        "G2": lambda: (PX**2 - PY**2) / (2 * c.mass) + (X**2 - Y**2) * half_k,
        "L'": lambda: X * PY - ys * PX,
        "G1'": lambda: PX * PY / (2 * c.mass) + X * ys * half_k,
        "G2'": lambda: (PX**2 - PY**2) / (2 * c.mass) + (X**2 - ys**2) * half_k,
        "u": lambda: u,
        "w": lambda: w,
        "Z": lambda: z,
        "ubar": lambda: conjugate(u),
        "wbar": lambda: conjugate(w),
        "Zbar": lambda: conjugate(z),
    }


NAMED = ("H", "F1", "F2", "p_theta", "L", "G1", "G2", "L'", "G1'", "G2'", "u", "w", "Z", "ubar", "wbar", "Zbar")
_ALIASES = {"Lp": "L'", "G1p": "G1'", "G2p": "G2'", "ptheta": "p_theta", "Z̄": "Zbar", "ū": "ubar", "w̄": "wbar"}


def build_named(name: str, params: Parameters, variant: str = "isotropic") -> Observable:
    """Build ``H``/``F1``, ``F2``, ``L``, ``G1``, ``G2``, the primed ``L'``, ``G1'``, ``G2'``
    (recentred at the gravity equilibrium; equal to the unprimed ones when ``g = 0``),
    the ladder functions ``u``, ``w``, ``Z`` and their conjugates, or ``p_theta``.

    In the gravity variant ``H`` carries the ``M g y`` term and ``Z`` uses the
    shifted coordinate ``y + g / omega^2``.
    """
    _check_variant(variant)
    name = _ALIASES.get(name, name)
    table = _builders(Coefficients.of(params), variant)
    if name not in table:
        raise KeyError(f"unknown observable {name!r}")
    return table[name]()


def _check_indices(m: int, n: int) -> None:
    if not isinstance(m, int) or m <= 0:
        raise ValueError(f"m must be a positive integer, got {m!r}")
    if not isinstance(n, int) or n == 0:
        raise ValueError(f"n must be a nonzero integer, got {n!r}")
    if math.gcd(m, abs(n)) != 1:
        raise ValueError(f"(m, n) = ({m}, {n}) is not a coprime pair")


def build_K(m: int, n: int, params: Parameters, variant: str = "isotropic") -> Observable:
    """``K_{m,n} = Z^m exp(-i n theta)``."""
    _check_indices(m, n)
    return build_named("Z", params, variant) ** m * fourier(-n)


def build_Kbar(m: int, n: int, params: Parameters, variant: str = "isotropic") -> Observable:
    return conjugate(build_K(m, n, params, variant))


def build_P(m: int, n: int, params: Parameters, variant: str = "isotropic") -> Observable:
    """Real part ``(K + Kbar) / 2``."""
    k = build_K(m, n, params, variant)
    return (k + conjugate(k)) / 2


def build_Q(m: int, n: int, params: Parameters, variant: str = "isotropic") -> Observable:
    """Imaginary part ``(K - Kbar) / 2i``."""
    k = build_K(m, n, params, variant)
    return (k - conjugate(k)) * RationalComplex(0, Fraction(-1, 2))


_INDEXED = re.compile(r"^(K|Kbar|P|Q)_(\d+)_(-?\d+)$")
_INDEXED_BUILDERS = {"K": build_K, "Kbar": build_Kbar, "P": build_P, "Q": build_Q}


def resolve(name: str, params: Parameters, variant: str = "isotropic") -> Observable:
    """Like :func:`build_named` but also accepts ``K_m_n``, ``Kbar_m_n``, ``P_m_n``, ``Q_m_n``."""
    match = _INDEXED.match(name)
    if match:
        family, m, n = match.group(1), int(match.group(2)), int(match.group(3))
        return _INDEXED_BUILDERS[family](m, n, params, variant)
    return build_named(name, params, variant)

