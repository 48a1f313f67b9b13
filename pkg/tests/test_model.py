import math
import random
from fractions import Fraction as F

import pytest

from rotor.model import (
    SWI,
    SWII,
    SWIII,
    SWIV,
    AnisotropicOscillator,
    IsotropicOscillator,
    OscillatorGravity,
    Parameters,
    PhaseState,
    SingularEvaluationError,
    hamiltonian_value,
    potential_gradient,
    potential_value,
    rod_inertia,
)

UNIT = Parameters(mass=1, omega=1, inertia=F(1, 12))


class TestRodInertia:
    @pytest.mark.parametrize(
        "mass, length, expected",
        [(1, 1, F(1, 12)), (12, 1, F(1)), (1, 2, F(1, 3))],
    )
    def test_values(self, mass, length, expected):
        assert rod_inertia(mass, length) == expected

    @pytest.mark.parametrize("mass, length", [(0, 1), (1, 0), (-1, 2), (1, "-1/2")])
    def test_rejects_nonpositive(self, mass, length):
        with pytest.raises(ValueError):
            rod_inertia(mass, length)

    def test_from_rod(self):
        p = Parameters.from_rod(mass=3, omega=2, rod_length=F(1, 2))
        assert p.inertia == F(3, 4) / 12


class TestParameters:
    def test_rejects_bad_values(self):
        with pytest.raises(ValueError):
            Parameters(mass=0, omega=1, inertia=1)
        with pytest.raises(ValueError):
            Parameters(mass=1, omega=1, inertia=1, gravity=-1)

    def test_strings_are_exact(self):
        p = Parameters(mass="3/2", omega=1, inertia="1/12", gravity="49/5")
        assert p.gravity == F(49, 5) and p.exact

    def test_omega_from_k_exact_square(self):
        assert Parameters.omega_from_k(F(9, 4), 1) == F(3, 2)
        assert Parameters.omega_from_k(8, 2) == 2

    def test_omega_from_k_falls_back_to_float(self):
        w = Parameters.omega_from_k(2, 1)
        assert isinstance(w, float) and w == pytest.approx(math.sqrt(2))


class TestHamiltonian:
    def test_zero_state(self):
        assert hamiltonian_value(UNIT, IsotropicOscillator(1), PhaseState()) == 0

    def test_hand_substitution(self):
        s = PhaseState(x=1, y=0, theta=0, p_x=0, p_y=1, p_theta=0)
        value = hamiltonian_value(UNIT, IsotropicOscillator(1), s)
        assert value == 1 and isinstance(value, F)

    def test_gravity_at_origin(self):
        assert hamiltonian_value(UNIT, OscillatorGravity(1, F(49, 5)), PhaseState()) == 0

    def test_gravity_term(self):
        s = PhaseState(y=2)
        # M w^2 y^2 / 2 + M g y = 2 + 2 * 49/5
        assert hamiltonian_value(UNIT, OscillatorGravity(1, F(49, 5)), s) == 2 + F(98, 5)

    def test_rotor_term(self):
        s = PhaseState(p_theta=1)
        assert hamiltonian_value(UNIT, IsotropicOscillator(1), s) == 6

    def test_singular_evaluation_names_coordinate(self):
        with pytest.raises(SingularEvaluationError) as info:
            hamiltonian_value(UNIT, SWI(1, 1, 1), PhaseState(x=0, y=1))
        assert info.value.coordinate == "x"
        with pytest.raises(SingularEvaluationError) as info:
            hamiltonian_value(UNIT, SWI(1, 1, 1), PhaseState(x=1, y=0))
        assert info.value.coordinate == "y"
        with pytest.raises(SingularEvaluationError) as info:
            hamiltonian_value(UNIT, SWIII(-1, 0, 0), PhaseState())
        assert info.value.coordinate == "r"
        with pytest.raises(SingularEvaluationError):
            hamiltonian_value(UNIT, SWII(1, 1, 1), PhaseState(x=0, y=3))
        with pytest.raises(SingularEvaluationError):
            hamiltonian_value(UNIT, SWIV(-1, 1, 1), PhaseState())


class TestGradient:
    def test_origin(self):
        assert potential_gradient(IsotropicOscillator(1), UNIT, 0, 0) == (0, 0)

    def test_isotropic(self):
        assert potential_gradient(IsotropicOscillator(1), UNIT, 2, -3) == (2, -3)

    def test_gravity(self):
        assert potential_gradient(OscillatorGravity(1, 2), UNIT, 0, 0) == (0, 2)

    def test_anisotropic(self):
        assert potential_gradient(AnisotropicOscillator(3, 5), UNIT, 1, 1) == (9, 25)


ALL_POTENTIALS = [
    IsotropicOscillator(F(3, 2)),
    OscillatorGravity(F(2, 3), F(49, 5)),
    AnisotropicOscillator(3, 5),
    SWI(F(1, 2), F(1, 3), F(2, 5)),
    SWII(F(1, 2), F(1, 3), F(-2, 5)),
    SWIII(-1, F(1, 3), F(2, 5)),
    SWIV(-1, F(1, 3), F(2, 5)),
]


def _random_point(rng):
    # away from the axes and the origin, so every family is regular
    return rng.choice([-1, 1]) * rng.uniform(0.3, 2.0), rng.choice([-1, 1]) * rng.uniform(0.3, 2.0)


@pytest.mark.parametrize("pot", ALL_POTENTIALS, ids=lambda p: p.variant)
def test_gradient_matches_central_difference(pot):
    rng = random.Random(7)
    params = Parameters(mass=F(3, 2), omega=1, inertia=1)
    h = 1e-5
    for _ in range(50):
        x, y = _random_point(rng)
        gx, gy = potential_gradient(pot, params, x, y)
        fx = (potential_value(pot, params, x + h, y) - potential_value(pot, params, x - h, y)) / (2 * h)
        fy = (potential_value(pot, params, x, y + h) - potential_value(pot, params, x, y - h)) / (2 * h)
        scale = max(1.0, abs(gx), abs(gy))
        assert abs(fx - gx) / scale <= 1e-8
        assert abs(fy - gy) / scale <= 1e-8


@pytest.mark.parametrize("pot", ALL_POTENTIALS, ids=lambda p: p.variant)
def test_theta_is_cyclic(pot):
    rng = random.Random(3)
    for _ in range(20):
        x, y = _random_point(rng)
        s = PhaseState(x, y, rng.uniform(-10, 10), 0.3, -0.7, 0.2)
        moved = PhaseState(x, y, s.theta + rng.uniform(-10, 10), 0.3, -0.7, 0.2)
        assert hamiltonian_value(UNIT, pot, s) == hamiltonian_value(UNIT, pot, moved)


@pytest.mark.parametrize("pot", ALL_POTENTIALS[:5], ids=lambda p: p.variant)
def test_exact_and_float_agree(pot):
    rng = random.Random(11)
    for _ in range(20):
        vals = [F(rng.randint(1, 40), rng.randint(1, 9)) * rng.choice([-1, 1]) for _ in range(6)]
        exact = hamiltonian_value(UNIT, pot, PhaseState(*vals))
        assert isinstance(exact, F)
        floats = hamiltonian_value(
            Parameters(1.0, 1.0, 1 / 12), pot, PhaseState(*(float(v) for v in vals))
        )
        assert float(exact) == pytest.approx(floats, rel=1e-13)


def test_phase_state_rejects_non_finite():
    with pytest.raises(ValueError):
        PhaseState(x=math.nan)
    with pytest.raises(ValueError):
        PhaseState(p_y=math.inf)


def test_theta_is_stored_unwrapped():
    s = PhaseState(theta=7 * math.pi)
    assert s.theta == 7 * math.pi
    assert s.wrapped_theta() == pytest.approx(math.pi)
