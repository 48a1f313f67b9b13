"""Closed-form flows, a velocity-Verlet integrator and conservation diagnostics."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from typing import Sequence, TextIO

import numpy as np
from scipy.interpolate import CubicSpline

from .algebra import evaluate_array
from .integrals import resolve
from .model import (
    IsotropicOscillator,
    OscillatorGravity,
    Parameters,
    PhaseState,
    Potential,
    hamiltonian_value,
)

__all__ = [
    "Trajectory",
    "DriftEntry",
    "DriftReport",
    "analytic_flow",
    "verlet_step",
    "simulate",
    "drift_report",
    "recurrence_error",
    "theta_advance",
    "write_csv",
    "analytic_variant",
    "with_potential",
]

COLUMNS = ("t", "x", "y", "theta", "px", "py", "ptheta")


@dataclass
class Trajectory:
    """Samples of a run. ``states`` has one row ``(x, y, theta, p_x, p_y, p_theta)`` per time."""

    times: np.ndarray
    states: np.ndarray
    tracked: dict[str, np.ndarray] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.asarray(self.states, dtype=float)
        if self.states.shape != (len(self.times), 6):
            raise ValueError("states must have shape (len(times), 6)")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        for name, values in self.tracked.items():
            if len(values) != len(self.times):
                raise ValueError(f"tracked series {name!r} has the wrong length")

    def __len__(self):
        return len(self.times)

    def state(self, i: int) -> PhaseState:
        return PhaseState.from_sequence(float(v) for v in self.states[i])


@dataclass(frozen=True)
class DriftEntry:
    initial: complex
    max_abs: float
    max_rel: float


@dataclass(frozen=True)
class DriftReport:
    entries: dict[str, DriftEntry]

    def __getitem__(self, name: str) -> DriftEntry:
        return self.entries[name]

    def summary(self) -> str:
        lines = [f"{'observable':<12} {'initial':>28} {'max |dev|':>12} {'max rel':>12}"]
        for name, e in self.entries.items():
            init = f"{e.initial.real:.10g}{e.initial.imag:+.10g}j"
            lines.append(f"{name:<12} {init:>28} {e.max_abs:12.3e} {e.max_rel:12.3e}")
        return "\n".join(lines)


def analytic_variant(pot: Potential) -> str | None:
    """``"isotropic"`` or ``"gravity"`` for potentials with a closed-form flow, else None."""
    if isinstance(pot, OscillatorGravity):
        return "gravity"
    if isinstance(pot, IsotropicOscillator):
        return "isotropic"
    return None


def _isotropic(mass: float, omega: float, inertia: float, s, t: float) -> tuple[float, ...]:
    x0, y0, th0, px0, py0, pth = s
    c, sn = math.cos(omega * t), math.sin(omega * t)
    mw = mass * omega
    return (
        x0 * c + px0 / mw * sn,
        y0 * c + py0 / mw * sn,
        th0 + pth / inertia * t,
        px0 * c - mw * x0 * sn,
        py0 * c - mw * y0 * sn,
        pth,
    )


def analytic_flow(params: Parameters, variant: str, s0: PhaseState, t: float) -> PhaseState:
    """Closed-form state at time ``t``.

    The gravity flow is the isotropic flow conjugated by the shift
    ``y -> y + g / omega^2``.
    """
    mass, omega, inertia = float(params.mass), float(params.omega), float(params.inertia)
    s = s0.as_floats()
    if variant == "isotropic":
        return PhaseState.from_sequence(_isotropic(mass, omega, inertia, s, t))
    if variant == "gravity":
        shift = float(params.gravity) / omega**2
        moved = _isotropic(mass, omega, inertia, (s[0], s[1] + shift, *s[2:]), t)
        return PhaseState.from_sequence((moved[0], moved[1] - shift, *moved[2:]))
    raise ValueError(f"no closed-form flow for variant {variant!r}")


def verlet_step(pot: Potential, params: Parameters, s: PhaseState, dt: float) -> PhaseState:
    """One velocity-Verlet step; ``p_theta`` is carried over untouched."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    mass, inertia = float(params.mass), float(params.inertia)
    x, y, th, px, py, pth = s.as_floats()
    out = _verlet_run(_float_potential(pot).gradient, mass, inertia, (x, y, th, px, py), float(s.p_theta), dt, 1, 1)
    x, y, th, px, py = out[-1]
    return PhaseState(x, y, th, px, py, s.p_theta)


def _verlet_run(gradient, mass, inertia, start, pth, dt, n_steps, stride):
    """Integrate ``n_steps`` and return the rows at every ``stride``-th step plus the last."""
    x, y, th, px, py = start
    half = dt / 2
    inv_m = dt / mass
    dth = pth / inertia * dt
    gx, gy = gradient(x, y, mass)
    rows = [start]
    for i in range(1, n_steps + 1):
        px -= half * gx
        py -= half * gy
        x += inv_m * px
        y += inv_m * py
        th += dth
        gx, gy = gradient(x, y, mass)
        px -= half * gx
        py -= half * gy
        if i % stride == 0 or i == n_steps:
            rows.append((x, y, th, px, py))
    return rows


def _float_potential(pot: Potential) -> Potential:
    """Same potential with float coefficients, for the stepping loop."""
    return replace(pot, **{k: float(v) for k, v in pot.coefficients().items()})


def _step_count(dt: float, t_final: float) -> int:
    return max(1, math.ceil(t_final / dt - 1e-9))


def simulate(
    pot: Potential,
    params: Parameters,
    s0: PhaseState,
    dt: float = 1e-3,
    t_final: float = 2 * math.pi,
    sample_stride: int | None = None,
    tracked: Sequence[str] = (),
    method: str = "verlet",
) -> Trajectory:
    """Run from ``s0`` to ``t_final`` and sample every ``sample_stride`` steps.

    The step is shrunk to ``t_final / ceil(t_final / dt)`` so the last sample
    falls exactly on ``t_final``. Without an explicit stride at most about
    10^4 samples are kept. ``tracked`` names are resolved with
    :func:`rotor.integrals.resolve` (``"H"`` is evaluated with the full
    potential, so it works for every family).
    """
    if not t_final > 0:
        raise ValueError("t_final must be positive")
    if not dt > 0:
        raise ValueError("dt must be positive")
    n_steps = _step_count(dt, t_final)
    dt_eff = t_final / n_steps
    stride = sample_stride or max(1, math.ceil(n_steps / 10_000))
    if stride < 1:
        raise ValueError("sample_stride must be a positive integer")
    indices = list(range(0, n_steps + 1, stride))
    if indices[-1] != n_steps:
        indices.append(n_steps)
    times = np.array(indices, dtype=float) * dt_eff
    times[-1] = t_final

    observables = _tracked_observables(pot, params, tracked)
    variant = analytic_variant(pot)
    if method == "analytic":
        if variant is None:
            raise ValueError(f"no closed-form flow for the {pot.variant} potential")
        flow_params = with_potential(params, pot)
        states = np.array([analytic_flow(flow_params, variant, s0, t).as_floats() for t in times])
    elif method == "verlet":
        f = s0.as_floats()
        pth = float(s0.p_theta)
        rows = _verlet_run(_float_potential(pot).gradient, float(params.mass), float(params.inertia), f[:5], pth, dt_eff, n_steps, stride)
        states = np.array([(x, y, th, px, py, pth) for x, y, th, px, py in rows])
    else:
        raise ValueError(f"unknown method {method!r}")

    values = {}
    for name, obs in observables.items():
        if obs is None:
            values[name] = np.array(
                [complex(hamiltonian_value(params, pot, PhaseState.from_sequence(row))) for row in states]
            )
        else:
            values[name] = evaluate_array(obs, states)
    meta = {
        "potential": pot.variant,
        "coefficients": {k: str(v) for k, v in pot.coefficients().items()},
        "params": {k: str(v) for k, v in vars(params).items() if v is not None},
        "method": method,
        "dt": dt_eff,
        "t_final": t_final,
        "sample_stride": stride,
    }
    return Trajectory(times, states, values, meta)


def with_potential(params: Parameters, pot: Potential) -> Parameters:
    """Parameters whose ``omega``/``gravity`` follow the oscillator potential."""
    if isinstance(pot, OscillatorGravity):
        return replace(params, omega=pot.omega, gravity=pot.gravity)
    if isinstance(pot, IsotropicOscillator):
        return replace(params, omega=pot.omega, gravity=0)
    return params


def _tracked_observables(pot: Potential, params: Parameters, names: Sequence[str]) -> dict:
    variant = analytic_variant(pot)
    out = {}
    for name in names:
        if name in ("H", "F1"):
            out[name] = None
            continue
        if variant is None:
            if name not in ("F2", "p_theta", "L"):
                raise KeyError(f"observable {name!r} is not defined for the {pot.variant} potential")
            out[name] = resolve(name, params, "isotropic")
        else:
            out[name] = resolve(name, with_potential(params, pot), variant)
    return out


def drift_report(traj: Trajectory) -> DriftReport:
    """Largest deviation of each tracked series from its first value."""
    if len(traj) < 2:
        raise ValueError("drift needs at least two samples")
    if not traj.tracked:
        raise ValueError("trajectory tracks no observables")
    entries = {}
    for name, values in traj.tracked.items():
        values = np.asarray(values, dtype=complex)
        initial = complex(values[0])
        dev = float(np.max(np.abs(values - initial)))
        entries[name] = DriftEntry(initial, dev, dev / max(1.0, abs(initial)))
    return DriftReport(entries)


def _state_at(traj: Trajectory, t: float) -> np.ndarray:
    span = traj.times[-1] - traj.times[0]
    slack = 1e-12 * max(1.0, abs(span))
    if t < traj.times[0] - slack or t > traj.times[-1] + slack:
        raise ValueError(f"time {t} outside the sampled range [{traj.times[0]}, {traj.times[-1]}]")
    nearest = int(np.argmin(np.abs(traj.times - t)))
    if abs(traj.times[nearest] - t) <= slack:
        return traj.states[nearest]
    return CubicSpline(traj.times, traj.states, axis=0)(t)


def recurrence_error(traj: Trajectory, period: float) -> float:
    """Distance in ``(x, y, p_x, p_y)`` between the state at ``period`` and the first sample.

    Sample times are used as they are; in between, a cubic spline interpolates.
    ``theta`` is left out; see :func:`theta_advance`.
    """
    later = _state_at(traj, period)
    first = traj.states[0]
    cols = [0, 1, 3, 4]
    return float(np.linalg.norm(later[cols] - first[cols]))


def theta_advance(traj: Trajectory, t: float) -> float:
    """Unwrapped rotor angle gained between the first sample and ``t``."""
    return float(_state_at(traj, t)[2] - traj.states[0][2])


def write_csv(traj: Trajectory, out: TextIO) -> None:
    """Plot-ready CSV: ``t, x, y, theta, px, py, ptheta`` then ``<name>_re, <name>_im`` per tracked series."""
    writer = csv.writer(out, lineterminator="\n")
    header = list(COLUMNS)
    for name in traj.tracked:
        header += [f"{name}_re", f"{name}_im"]
    writer.writerow(header)
    tracked = list(traj.tracked.values())
    for i, t in enumerate(traj.times):
        row = [t, *traj.states[i]]
        for values in tracked:
            row += [values[i].real, values[i].imag]
        writer.writerow([format(float(v), ".17g") for v in row])
