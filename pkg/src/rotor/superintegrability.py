"""Certificates of the structural claims: Jacobian rank, resonance detection,
exact bracket relations and conservation scans."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .algebra import (
    Observable,
    RationalComplex,
    evaluate,
    evaluate_array,
    is_real,
    is_zero,
    partial_derivative,
    poisson_bracket,
    VARIABLES,
)
from .dynamics import analytic_flow, analytic_variant, with_potential
from .integrals import Coefficients, build_K, build_named
from .model import Parameters, PhaseState, Potential

__all__ = [
    "ComplexObservableError",
    "RankReport",
    "ResonanceResult",
    "RelationCheck",
    "ScanResult",
    "gradient_matrix",
    "exact_rank",
    "rank",
    "certify_rank",
    "sampled_rank",
    "resonance_detect",
    "verify_relation",
    "casimir_residual",
    "conservation_scan",
    "is_resonant",
    "DEFAULT_TOLERANCE",
]

DEFAULT_TOLERANCE = 1e-10


class ComplexObservableError(ValueError):
    """A gradient was requested for an observable that is not real-valued."""


@dataclass(frozen=True)
class RankReport:
    observable_names: tuple[str, ...]
    state: PhaseState | None
    mode: str
    rank: int
    singular_values: tuple[float, ...] = ()
    tolerance: float | None = None

    def to_dict(self) -> dict:
        return {
            "observables": list(self.observable_names),
            "state": None if self.state is None else [str(v) for v in self.state.as_tuple()],
            "mode": self.mode,
            "rank": self.rank,
            "singular_values": list(self.singular_values),
            "tolerance": self.tolerance,
        }


@dataclass(frozen=True)
class ResonanceResult:
    capital_omega: float
    omega: float
    m: int
    n: int
    max_denominator: int
    abs_error: float
    found: bool

    def to_dict(self) -> dict:
        return {
            "capital_omega": self.capital_omega,
            "omega": self.omega,
            "m": self.m,
            "n": self.n,
            "max_denominator": self.max_denominator,
            "abs_error": self.abs_error,
            "found": self.found,
        }


@dataclass(frozen=True)
class RelationCheck:
    exact_zero: bool
    residual: Observable


@dataclass(frozen=True)
class ScanResult:
    resonant: bool
    drift: float
    initial_modulus: float


def gradient_matrix(observables: Sequence[Observable], s: PhaseState):
    """Rows ``dO_i/d(x, y, theta, p_x, p_y, p_theta)`` evaluated at ``s``.

    Entries are ``Fraction`` when ``s`` allows exact evaluation (rational
    coordinates, ``theta == 0``); otherwise a float ``numpy`` array is returned.
    """
    for i, obs in enumerate(observables):
        if not is_real(obs):
            raise ComplexObservableError(f"observable #{i} is not real-valued; use P/Q instead of K")
    rows = []
    exact = True
    for obs in observables:
        row = []
        for v in VARIABLES:
            value = evaluate(partial_derivative(obs, v), s)
            if isinstance(value, RationalComplex):
                row.append(value.re)
            else:
                exact = False
                row.append(value.real)
        rows.append(row)
    if exact:
        return rows
    return np.array(rows, dtype=float)


def exact_rank(matrix: Sequence[Sequence]) -> int:
    """Rank by fraction-free (Bareiss) elimination over the integers.

    Each row is first multiplied by the lcm of its denominators, which does not
    change the rank.
    """
    rows = []
    for row in matrix:
        row = [Fraction(v) for v in row]
        lcm = 1
        for v in row:
            lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
        rows.append([int(v * lcm) for v in row])
    if not rows:
        return 0
    n_rows, n_cols = len(rows), len(rows[0])
    r = 0
    prev = 1
    for c in range(n_cols):
        pivot = next((i for i in range(r, n_rows) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        p = rows[r][c]
        for i in range(r + 1, n_rows):
            a = rows[i][c]
            rows[i] = [(p * rows[i][j] - a * rows[r][j]) // prev for j in range(n_cols)]
        prev = p
        r += 1
        if r == n_rows:
            break
    return r


def rank(matrix, mode: str = "exact", tolerance: float = DEFAULT_TOLERANCE) -> RankReport:
    """Exact rank, or numerical rank counting singular values above ``tolerance * s_max``."""
    if mode == "exact":
        if isinstance(matrix, np.ndarray) or any(not isinstance(v, (int, Fraction)) for row in matrix for v in row):
            raise TypeError("exact rank needs rational entries")
        return RankReport((), None, "exact", exact_rank(matrix))
    if mode == "floating":
        if not 0 < tolerance < 1:
            raise ValueError("tolerance must lie in (0, 1)")
        a = np.array([[float(v) for v in row] for row in matrix], dtype=float)
        sv = np.linalg.svd(a, compute_uv=False) if a.size else np.array([])
        top = sv[0] if sv.size else 0.0
        r = int(np.sum(sv > tolerance * top)) if top > 0 else 0
        return RankReport((), None, "floating", r, tuple(float(v) for v in sv), tolerance)
    raise ValueError(f"unknown rank mode {mode!r}")


def certify_rank(
    observables: Mapping[str, Observable],
    state: PhaseState,
    mode: str = "exact",
    tolerance: float = DEFAULT_TOLERANCE,
) -> RankReport:
    matrix = gradient_matrix(list(observables.values()), state)
    report = rank(matrix, mode, tolerance)
    return RankReport(tuple(observables), state, report.mode, report.rank, report.singular_values, report.tolerance)


def sampled_rank(
    observables: Mapping[str, Observable],
    rng: np.random.Generator,
    samples: int = 100,
    tolerance: float = DEFAULT_TOLERANCE,
    p_theta=None,
) -> int:
    """Largest floating rank over random states (rank is a generic property)."""
    obs = list(observables.values())
    derivs = [[partial_derivative(o, v) for v in VARIABLES] for o in obs]
    states = rng.uniform(-2.0, 2.0, size=(samples, 6))
    if p_theta is not None:
        states[:, 5] = float(p_theta)
    best = 0
    for row in states:
        matrix = np.array([[evaluate_array(d, row)[0].real for d in ds] for ds in derivs])
        best = max(best, rank(matrix, "floating", tolerance).rank)
    return best


def _closest_fraction(ratio: Fraction, max_denominator: int) -> Fraction:
    """Closest nonzero fraction with denominator <= ``max_denominator``.

    Ties go to the smaller denominator, then to the smaller value.
    """
    best = ratio.limit_denominator(max_denominator)
    if best == 0:
        # m must be a positive integer, so the closest admissible value is +-1/N
        best = Fraction(-1 if ratio < 0 else 1, max_denominator)
    # the only possible tie partner is the mirror image of best about ratio
    mirror = 2 * ratio - best
    if mirror != best and mirror != 0 and mirror.denominator <= max_denominator:
        best = min(best, mirror, key=lambda f: (f.denominator, f))
    return best


def resonance_detect(capital_omega, omega, max_denominator: int, tol: float) -> ResonanceResult:
    """Best rational approximation ``m/n`` of ``capital_omega / omega`` with ``|n| <= max_denominator``.

    ``m`` is positive and ``n`` carries the sign of the ratio. Exact ``int``/``Fraction``
    inputs give an exact error, so ``tol = 0`` tests commensurability exactly.
    """
    if not omega > 0:
        raise ValueError("omega must be positive")
    if max_denominator < 1:
        raise ValueError("max_denominator must be at least 1")
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    ratio = Fraction(capital_omega) / Fraction(omega)
    best = _closest_fraction(ratio, max_denominator)
    m, n = abs(best.numerator), best.denominator * (-1 if best < 0 else 1)
    error = abs(ratio - best)
    return ResonanceResult(float(capital_omega), float(omega), m, n, max_denominator, float(error), error <= tol)


def verify_relation(lhs: Observable, rhs: Observable) -> RelationCheck:
    residual = lhs - rhs
    return RelationCheck(is_zero(residual), residual)


def casimir_residual(params: Parameters, variant: str = "isotropic", builder: Callable | None = None) -> Observable:
    """``4 G1^2 + G2^2 + w^2 L^2 - (F1 - F2)^2``, or its primed counterpart shifted by
    ``M g^2 / 2 w^2`` in the gravity variant. Zero when the Casimir identity holds."""
    build = builder or build_named
    c = Coefficients.of(params)
    f1, f2 = build("F1", params, variant), build("F2", params, variant)
    if variant == "gravity":
        g1, g2, ang = build("G1'", params, variant), build("G2'", params, variant), build("L'", params, variant)
        energy = f1 - f2 + c.mass * c.gravity**2 / (2 * c.omega**2)
    else:
        g1, g2, ang = build("G1", params, variant), build("G2", params, variant), build("L", params, variant)
        energy = f1 - f2
    return 4 * g1 * g1 + g2 * g2 + c.omega**2 * ang * ang - energy * energy


def is_resonant(m: int, n: int, params: Parameters, p_theta) -> bool:
    """``m omega I - n p_theta == 0`` in exact arithmetic."""
    c = Coefficients.of(params)
    return m * c.omega * c.inertia - n * Fraction(p_theta) == 0


def conservation_scan(
    pot: Potential,
    params: Parameters,
    s0: PhaseState,
    candidates: Iterable[tuple[int, int]],
    t_final: float,
    samples: int = 2001,
) -> dict[tuple[int, int], ScanResult]:
    """Along the closed-form trajectory, measure ``max_t |K_{m,n}(t) - K_{m,n}(0)|``."""
    variant = analytic_variant(pot)
    if variant is None:
        raise ValueError(f"conservation scan needs a closed-form flow; got {pot.variant}")
    flow_params = with_potential(params, pot)
    times = np.linspace(0.0, t_final, samples)
    states = np.array([analytic_flow(flow_params, variant, s0, t).as_floats() for t in times])
    out = {}
    for m, n in candidates:
        k = build_K(m, n, flow_params, variant)
        values = evaluate_array(k, states)
        out[(m, n)] = ScanResult(
            resonant=is_resonant(m, n, flow_params, s0.p_theta),
            drift=float(np.max(np.abs(values - values[0]))),
            initial_modulus=float(abs(values[0])),
        )
    return out
