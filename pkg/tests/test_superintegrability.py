import math
import random
from fractions import Fraction as F

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from rotor.algebra import evaluate_array, is_zero, poisson_bracket, var
from rotor.dynamics import analytic_flow
from rotor.integrals import build_K, build_named, build_P, build_Q
from rotor.model import AnisotropicOscillator, IsotropicOscillator, OscillatorGravity, Parameters, PhaseState
from rotor.superintegrability import (
    ComplexObservableError,
    casimir_residual,
    certify_rank,
    conservation_scan,
    exact_rank,
    gradient_matrix,
    rank,
    resonance_detect,
    sampled_rank,
    verify_relation,
)

from oracles import brute_force_resonance

UNIT = Parameters(1, 1, F(1, 12))
GENERIC = PhaseState(1, F(1, 2), 0, F(1, 3), F(1, 5), F(1, 12))


def integral_set(params, names, variant="isotropic"):
    out = {}
    for name in names:
        out[name] = build_P(1, 1, params, variant) if name == "P_1_1" else build_named(name, params, variant)
    return out


class TestGradientMatrix:
    def test_f2_row(self):
        assert gradient_matrix([build_named("F2", UNIT)], PhaseState(p_theta=1)) == [[0, 0, 0, 0, 0, 12]]

    def test_angular_momentum_row(self):
        assert gradient_matrix([build_named("L", UNIT)], PhaseState(x=1)) == [[0, 0, 0, 0, 1, 0]]

    def test_g1_vanishes_at_origin(self):
        assert gradient_matrix([build_named("G1", UNIT)], PhaseState()) == [[0] * 6]

    def test_float_state_gives_array(self):
        m = gradient_matrix([build_P(1, 1, UNIT)], PhaseState(0.1, 0.2, 0.3, 0.4, 0.5, 0.6))
        assert isinstance(m, np.ndarray) and m.shape == (1, 6)
        # dP/dp_x = cos(theta)
        assert m[0, 3] == pytest.approx(math.cos(0.3))

    def test_complex_observable_rejected(self):
        with pytest.raises(ComplexObservableError):
            gradient_matrix([build_K(1, 1, UNIT)], GENERIC)


class TestRank:
    @pytest.mark.parametrize(
        "names, expected",
        [
            (("F1", "F2", "G1", "G2", "P_1_1"), 5),
            (("F1", "F2", "G1", "G2"), 4),
            (("F1", "F2", "G1", "G2", "P_1_1", "L"), 5),
            (("F1", "F2", "L", "G1", "G2"), 4),
        ],
    )
    def test_rank_statements(self, names, expected):
        obs = integral_set(UNIT, names)
        assert certify_rank(obs, GENERIC, "exact").rank == expected
        assert certify_rank(obs, GENERIC, "floating").rank == expected
        assert sampled_rank(obs, np.random.default_rng(0), p_theta=F(1, 12)) == expected

    def test_degenerate_origin(self):
        obs = integral_set(UNIT, ("F1", "F2", "G1", "G2", "P_1_1"))
        assert certify_rank(obs, PhaseState(p_theta=F(1, 12)), "exact").rank < 5

    @settings(max_examples=200, deadline=None)
    @given(
        st.lists(
            st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=7), min_size=6, max_size=6),
            min_size=1,
            max_size=7,
        ),
        st.booleans(),
    )
    def test_exact_rank_matches_sympy(self, rows, duplicate):
        if duplicate:
            # force a dependency so low ranks get exercised
            rows = rows + [[2 * a - b for a, b in zip(rows[0], rows[-1])]]
        assert exact_rank(rows) == sympy.Matrix(rows).rank()

    @settings(max_examples=100, deadline=None)
    @given(
        st.lists(
            st.lists(st.integers(-4, 4), min_size=6, max_size=6), min_size=1, max_size=6
        ),
        st.randoms(use_true_random=False),
    )
    def test_row_scaling_and_permutation(self, rows, rnd):
        base = exact_rank(rows)
        scaled = []
        for row in rows:
            factor = F(rnd.choice([-3, 2, 5]), 7)
            scaled.append([factor * v for v in row])
        rnd.shuffle(scaled)
        assert exact_rank(scaled) == base

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.lists(st.integers(-3, 3), min_size=6, max_size=6), min_size=1, max_size=6))
    def test_exact_and_floating_agree(self, rows):
        assert rank(rows, "exact").rank == rank(rows, "floating").rank

    def test_mode_errors(self):
        with pytest.raises(TypeError):
            rank([[0.5, 1.0]], "exact")
        with pytest.raises(ValueError):
            rank([[1, 0]], "floating", tolerance=1.5)
        with pytest.raises(ValueError):
            rank([[1, 0]], "qr")

    def test_floating_report(self):
        report = rank([[3, 0], [0, 4]], "floating")
        assert report.singular_values == (4.0, 3.0) and report.rank == 2

    def test_report_serializes(self):
        report = certify_rank(integral_set(UNIT, ("F2",)), GENERIC)
        doc = report.to_dict()
        assert doc["observables"] == ["F2"] and doc["rank"] == 1
        assert doc["state"] == ["1", "1/2", "0", "1/3", "1/5", "1/12"]


class TestResonanceDetect:
    def test_unit_ratio(self):
        r = resonance_detect(1.0, 1.0, 10, 1e-9)
        assert (r.m, r.n, r.found) == (1, 1, True)

    def test_three_quarters(self):
        r = resonance_detect(0.75, 1.0, 10, 1e-9)
        assert (r.m, r.n, r.found) == (3, 4, True)

    def test_root_two_not_found(self):
        r = resonance_detect(math.sqrt(2), 1.0, 100, 1e-6)
        assert not r.found
        assert r.abs_error == pytest.approx(7.2e-5, rel=0.01)
        assert math.gcd(r.m, abs(r.n)) == 1 and abs(r.n) <= 100

    def test_negative_ratio(self):
        r = resonance_detect(F(-2, 3), 1, 10, 0)
        assert (r.m, r.n, r.found) == (2, -3, True)

    def test_tiny_ratio_clamps_to_one(self):
        r = resonance_detect(F(1, 1000), 1, 10, 1e-9)
        assert (r.m, r.n, r.found) == (1, 10, False)

    def test_exact_zero_tolerance(self):
        assert resonance_detect(F(5, 7), F(1, 2), 20, 0).found
        assert not resonance_detect(F(5, 7), F(1, 2), 6, 0).found

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            resonance_detect(1, 0, 10, 1e-9)
        with pytest.raises(ValueError):
            resonance_detect(1, 1, 0, 1e-9)
        with pytest.raises(ValueError):
            resonance_detect(1, 1, 10, -1)

    def test_matches_brute_force_on_1000_cases(self):
        rng = random.Random(2024)
        for _ in range(1000):
            max_den = rng.randint(1, 60)
            if rng.random() < 0.5:
                capital = rng.uniform(-5, 5)
            else:
                # rational inputs exercise exact hits and exact ties
                capital = F(rng.randint(-300, 300), rng.randint(1, 2 * max_den + 2))
            omega = rng.choice([1, F(1, 2), 2.5, F(3, 7)])
            r = resonance_detect(capital, omega, max_den, 1e-9)
            expected = brute_force_resonance(F(capital) / F(omega), max_den)
            assert F(r.m, r.n) == expected
            assert r.m >= 1 and math.gcd(r.m, abs(r.n)) == 1

    def test_tie_prefers_smaller_denominator(self):
        # 5/12 is exactly halfway between 1/3 and 1/2
        r = resonance_detect(F(5, 12), 1, 3, 1e-9)
        assert (r.m, r.n) == (1, 2)


class TestRelations:
    def test_su2_examples(self):
        p = Parameters(F(3, 2), F(2, 3), 1)
        ang, g1, g2 = (build_named(n, p) for n in ("L", "G1", "G2"))
        assert verify_relation(poisson_bracket(ang, g2), 4 * g1).exact_zero
        assert verify_relation(poisson_bracket(g1, g2), -(p.omega**2) * ang).exact_zero

    def test_gravity_example(self):
        p = Parameters(1, 1, 1, gravity=2)
        lhs = poisson_bracket(build_named("F1", p, "gravity"), build_named("L", p, "gravity"))
        assert verify_relation(lhs, 2 * var("x")).exact_zero

    def test_residual_reported(self):
        ang, g1 = build_named("L", UNIT), build_named("G1", UNIT)
        check = verify_relation(poisson_bracket(ang, g1), build_named("G2", UNIT))
        assert not check.exact_zero
        assert check.residual == -2 * build_named("G2", UNIT)

    def test_casimir(self):
        assert is_zero(casimir_residual(UNIT))
        assert is_zero(casimir_residual(Parameters(1, 1, 1, gravity=2), "gravity"))
        assert casimir_residual(Parameters(2, 3, 1), "gravity") == casimir_residual(Parameters(2, 3, 1))

    def test_casimir_catches_wrong_builder(self):
        def broken(name, params, variant="isotropic"):
            obs = build_named(name, params, variant)
            return 2 * obs if name == "G1" else obs

        assert not is_zero(casimir_residual(UNIT, builder=broken))


class TestConservationScan:
    def test_resonant_and_not(self):
        s0 = PhaseState(1, 0.5, 0, 0.3, 1, F(1, 12))
        out = conservation_scan(IsotropicOscillator(1), UNIT, s0, [(1, 1), (1, 2), (2, 1)], 10 * 2 * math.pi)
        assert out[(1, 1)].resonant and out[(1, 1)].drift <= 1e-10
        assert not out[(1, 2)].resonant
        assert out[(1, 2)].drift == pytest.approx(2 * out[(1, 2)].initial_modulus, rel=1e-3)
        assert not out[(2, 1)].resonant

    def test_double_rotor_speed(self):
        s0 = PhaseState(1, 0.5, 0, 0.3, 1, F(1, 6))
        out = conservation_scan(IsotropicOscillator(1), UNIT, s0, [(2, 1), (1, 1)], 4 * math.pi)
        assert out[(2, 1)].resonant and out[(2, 1)].drift <= 1e-10 * max(1, out[(2, 1)].initial_modulus)
        assert not out[(1, 1)].resonant and out[(1, 1)].drift > 0.1 * out[(1, 1)].initial_modulus

    def test_gravity_variant(self):
        p = Parameters(1, 1, F(1, 12), gravity=F(49, 5))
        s0 = PhaseState(1, F(-49, 5), 0, 0, 1, F(1, 12))
        out = conservation_scan(OscillatorGravity(1, F(49, 5)), p, s0, [(1, 1)], 2 * math.pi)
        assert out[(1, 1)].resonant and out[(1, 1)].drift <= 1e-10 * max(1, out[(1, 1)].initial_modulus)

    def test_unsupported_variant(self):
        with pytest.raises(ValueError):
            conservation_scan(AnisotropicOscillator(3, 5), UNIT, GENERIC, [(1, 1)], 1.0)

    @settings(max_examples=30, deadline=None)
    @given(
        st.integers(1, 4),
        st.integers(-4, 4).filter(lambda n: n != 0),
        st.fractions(min_value=F(-3), max_value=F(3), max_denominator=6),
    )
    def test_resonant_flag_matches_detector(self, m, n, p_theta):
        if math.gcd(m, abs(n)) != 1:
            return
        s0 = PhaseState(F(1, 2), F(1, 3), 0, F(-1, 4), 1, p_theta)
        out = conservation_scan(IsotropicOscillator(1), UNIT, s0, [(m, n)], 1.0, samples=5)
        detected = resonance_detect(p_theta / UNIT.inertia, 1, 4, 0)
        expected = detected.found and F(detected.m, detected.n) == F(m, n)
        assert out[(m, n)].resonant == expected

    @settings(max_examples=30, deadline=None)
    @given(
        st.lists(st.floats(-2, 2, allow_nan=False), min_size=6, max_size=6),
        st.sampled_from([(1, 1), (1, -2), (3, 2), (4, -3)]),
    )
    def test_modulus_conserved(self, values, mn):
        s0 = PhaseState(*values)
        params = Parameters(F(3, 2), F(2, 3), F(1, 5))
        k = build_K(*mn, params)
        times = np.linspace(0, 30, 301)
        states = np.array([analytic_flow(params, "isotropic", s0, t).as_floats() for t in times])
        mod = np.abs(evaluate_array(k, states))
        assert np.max(np.abs(mod - mod[0])) <= 1e-10 * max(1.0, mod[0])
