"""Scenario files: one TOML document per scenario.

Rationals are written as integers or ``"p/q"`` strings and stay exact; plain
floats stay floats. Times may also be written as ``"2pi"``, ``"1/3 pi"``.
Example::

    [parameters]
    mass = 1
    k = 1              # or: omega = 1
    rod_length = 1     # or: inertia = "1/12"

    [potential]
    variant = "isotropic"

    [initial_state]
    x = 1
    p_y = 1
    p_theta = "1/12"

    [run]
    method = "analytic"
    t_final = "2pi"
    tracked = ["H", "p_theta", "P_1_1"]
"""

from __future__ import annotations

import math
import re
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .model import (
    POTENTIALS,
    AnisotropicOscillator,
    IsotropicOscillator,
    OscillatorGravity,
    Parameters,
    PhaseState,
    Potential,
    as_number,
)

__all__ = ["ConfigError", "RunConfig", "AnalysisConfig", "ScenarioConfig", "load", "loads", "bundled", "BUNDLED"]

BUNDLED = ("fig2", "gravity", "aniso_3_5", "resonant_rank")

_SECTIONS = {
    "parameters": {"mass", "omega", "k", "inertia", "rod_length", "gravity", "omega_x", "omega_y"},
    "potential": {"variant", "alpha", "beta", "gamma"},
    "initial_state": {"x", "y", "theta", "p_x", "p_y", "p_theta"},
    "run": {"dt", "t_final", "sample_stride", "method", "tracked", "period"},
    "analysis": {
        "integrals", "state", "expected_rank", "rank_mode", "tolerance",
        "candidates", "max_denominator", "scan_t_final",
    },
}


class ConfigError(ValueError):
    """Malformed scenario file; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


@dataclass(frozen=True)
class RunConfig:
    dt: float = 1e-3
    t_final: float = 2 * math.pi
    sample_stride: int | None = None
    method: str = "verlet"
    tracked: tuple[str, ...] = ("H", "p_theta")
    period: float | None = None


@dataclass(frozen=True)
class AnalysisConfig:
    integrals: tuple[str, ...] = ("F1", "F2", "G1", "G2", "P_1_1")
    state: PhaseState | None = None
    expected_rank: int | None = None
    rank_mode: str = "exact"
    tolerance: float = 1e-10
    candidates: tuple[tuple[int, int], ...] = ()
    max_denominator: int = 100
    scan_t_final: float | None = None


@dataclass(frozen=True)
class ScenarioConfig:
    parameters: Parameters
    potential: Potential
    initial_state: PhaseState
    run: RunConfig = field(default_factory=RunConfig)
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    name: str = ""


_PI_RE = re.compile(r"^\s*([0-9./+-]*)\s*\*?\s*pi\s*$")


def _number(key: str, value):
    try:
        return as_number(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ConfigError(key, f"expected an integer, float or 'p/q' string, got {value!r}") from None


def _time(key: str, value) -> float:
    if isinstance(value, str):
        match = _PI_RE.match(value)
        if match:
            factor = match.group(1) or "1"
            return float(_number(key, factor)) * math.pi
    result = float(_number(key, value))
    if not result > 0:
        raise ConfigError(key, "must be positive")
    return result


def _state(key: str, block) -> PhaseState:
    if isinstance(block, list):
        if len(block) != 6:
            raise ConfigError(key, "expected six values (x, y, theta, p_x, p_y, p_theta)")
        block = dict(zip(("x", "y", "theta", "p_x", "p_y", "p_theta"), block))
    _reject_unknown(key, block, _SECTIONS["initial_state"])
    try:
        return PhaseState(**{k: _number(f"{key}.{k}", v) for k, v in block.items()})
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(key, str(exc)) from None


def _integer(key: str, value, minimum: int) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise ConfigError(key, f"expected an integer >= {minimum}")
    return value


def _reject_unknown(section: str, block: dict, allowed: set) -> None:
    if not isinstance(block, dict):
        raise ConfigError(section, "expected a table")
    for k in block:
        if k not in allowed:
            raise ConfigError(f"{section}.{k}", "unknown key")


def _parameters(block: dict) -> Parameters:
    _reject_unknown("parameters", block, _SECTIONS["parameters"])
    if ("omega" in block) == ("k" in block):
        raise ConfigError("parameters.omega", "give exactly one of omega or k")
    if ("inertia" in block) == ("rod_length" in block):
        raise ConfigError("parameters.inertia", "give exactly one of inertia or rod_length")
    if "mass" not in block:
        raise ConfigError("parameters.mass", "missing")
    values = {k: _number(f"parameters.{k}", v) for k, v in block.items()}
    mass = values.pop("mass")
    try:
        omega = values.pop("omega") if "omega" in values else Parameters.omega_from_k(values.pop("k"), mass)
        if "rod_length" in values:
            return Parameters.from_rod(mass, omega, values.pop("rod_length"), **values)
        return Parameters(mass=mass, omega=omega, **values)
    except ValueError as exc:
        raise ConfigError("parameters", str(exc)) from None


def _potential(block: dict, params: Parameters) -> Potential:
    _reject_unknown("potential", block, _SECTIONS["potential"])
    variant = block.get("variant")
    if variant not in POTENTIALS:
        raise ConfigError("potential.variant", f"expected one of {sorted(POTENTIALS)}, got {variant!r}")
    coeffs = {k: _number(f"potential.{k}", v) for k, v in block.items() if k != "variant"}
    if variant in ("isotropic", "gravity", "anisotropic") and coeffs:
        raise ConfigError(f"potential.{next(iter(coeffs))}", "oscillator coefficients come from [parameters]")
    if variant == "isotropic":
        return IsotropicOscillator(params.omega)
    if variant == "gravity":
        return OscillatorGravity(params.omega, params.gravity)
    if variant == "anisotropic":
        if params.omega_x is None or params.omega_y is None:
            raise ConfigError("parameters.omega_x", "the anisotropic variant needs omega_x and omega_y")
        return AnisotropicOscillator(params.omega_x, params.omega_y)
    return POTENTIALS[variant](**coeffs)


def _run(block: dict) -> RunConfig:
    _reject_unknown("run", block, _SECTIONS["run"])
    kwargs = {}
    if "dt" in block:
        kwargs["dt"] = _time("run.dt", block["dt"])
    if "t_final" in block:
        kwargs["t_final"] = _time("run.t_final", block["t_final"])
    if "period" in block:
        kwargs["period"] = _time("run.period", block["period"])
    if "sample_stride" in block:
        stride = block["sample_stride"]
        if not isinstance(stride, int) or isinstance(stride, bool) or stride < 1:
            raise ConfigError("run.sample_stride", "expected a positive integer")
        kwargs["sample_stride"] = stride
    if "method" in block:
        if block["method"] not in ("analytic", "verlet"):
            raise ConfigError("run.method", "expected 'analytic' or 'verlet'")
        kwargs["method"] = block["method"]
    if "tracked" in block:
        tracked = block["tracked"]
        if not isinstance(tracked, list) or not all(isinstance(t, str) for t in tracked):
            raise ConfigError("run.tracked", "expected a list of observable names")
        kwargs["tracked"] = tuple(tracked)
    return RunConfig(**kwargs)


def _analysis(block: dict) -> AnalysisConfig:
    _reject_unknown("analysis", block, _SECTIONS["analysis"])
    kwargs = {}
    if "integrals" in block:
        kwargs["integrals"] = tuple(block["integrals"])
    if "state" in block:
        kwargs["state"] = _state("analysis.state", block["state"])
    if "expected_rank" in block:
        kwargs["expected_rank"] = _integer("analysis.expected_rank", block["expected_rank"], 0)
    if "rank_mode" in block:
        if block["rank_mode"] not in ("exact", "floating"):
            raise ConfigError("analysis.rank_mode", "expected 'exact' or 'floating'")
        kwargs["rank_mode"] = block["rank_mode"]
    if "tolerance" in block:
        tol = block["tolerance"]
        if not isinstance(tol, (int, float)) or isinstance(tol, bool) or not 0 < tol < 1:
            raise ConfigError("analysis.tolerance", "expected a number in (0, 1)")
        kwargs["tolerance"] = float(tol)
    if "candidates" in block:
        try:
            kwargs["candidates"] = tuple((int(m), int(n)) for m, n in block["candidates"])
        except (TypeError, ValueError):
            raise ConfigError("analysis.candidates", "expected a list of [m, n] pairs") from None
    if "max_denominator" in block:
        kwargs["max_denominator"] = _integer("analysis.max_denominator", block["max_denominator"], 1)
    if "scan_t_final" in block:
        kwargs["scan_t_final"] = _time("analysis.scan_t_final", block["scan_t_final"])
    return AnalysisConfig(**kwargs)


def from_dict(doc: dict, name: str = "") -> ScenarioConfig:
    for section in doc:
        if section not in _SECTIONS:
            raise ConfigError(section, "unknown section")
    for required in ("parameters", "potential", "initial_state"):
        if required not in doc:
            raise ConfigError(required, "missing section")
    params = _parameters(doc["parameters"])
    return ScenarioConfig(
        parameters=params,
        potential=_potential(doc["potential"], params),
        initial_state=_state("initial_state", doc["initial_state"]),
        run=_run(doc.get("run", {})),
        analysis=_analysis(doc.get("analysis", {})),
        name=name,
    )


def loads(text: str, name: str = "") -> ScenarioConfig:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("<file>", f"not valid TOML: {exc}") from None
    return from_dict(doc, name)


def load(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError("<file>", str(exc)) from None
    return loads(text, path.stem)


def bundled_text(name: str) -> str:
    if name not in BUNDLED:
        raise ConfigError("<scenario>", f"unknown bundled scenario {name!r}; choose from {BUNDLED}")
    return resources.files("rotor").joinpath("scenarios", f"{name}.toml").read_text()


def bundled(name: str) -> ScenarioConfig:
    return loads(bundled_text(name), name)
