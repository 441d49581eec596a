"""RK4 trajectories, exponential maps, and preservation of solutions."""

import math

import numpy as np
import pytest

from phasesym.expr import Constant, DomainError, parse
from phasesym.flow import (
    TransformedCurve,
    Trajectory,
    exp_map_phase,
    exp_map_time,
    integrate_system,
    resample_uniform,
    solution_preservation_check,
)
from phasesym.jets import PhaseGenerator, System2D, TimeGenerator

UV = frozenset({"u", "v"})
TUV = frozenset({"t", "u", "v"})


def linear_system():
    return System2D(parse("-u+v", UV), parse("u-v", UV))


def polar_system():
    return System2D(Constant(1.0), parse("v*(1-v^2)", UV), chart="polar-theta-r")


def linear_closed(u0, v0, ts):
    mean = (u0 + v0) / 2.0
    half = (u0 - v0) / 2.0
    decay = np.exp(-2.0 * np.asarray(ts))
    return mean + half * decay, mean - half * decay


class TestTrajectoryType:
    def test_validation(self):
        with pytest.raises(ValueError):
            Trajectory([0.0, 1.0, 0.5], [0, 0, 0], [0, 0, 0], 1.0)
        with pytest.raises(ValueError):
            Trajectory([0.0, 0.5, 1.5], [0, 0, 0], [0, 0, 0], 0.5)
        with pytest.raises(ValueError):
            Trajectory([0.0, 1.0], [0.0, np.inf], [0.0, 0.0], 1.0)

    def test_short_final_step_allowed(self):
        tr = Trajectory([0.0, 0.1, 0.2, 0.25], np.zeros(4), np.zeros(4), 0.1)
        assert len(tr) == 4


class TestIntegrateSystem:
    def test_linear_against_closed_form(self):
        tr = integrate_system(linear_system(), (2.0, 1.0), (0.0, 1.0), 1e-3)
        u_want, v_want = linear_closed(2.0, 1.0, tr.t)
        assert np.abs(tr.u - u_want).max() <= 1e-8
        assert np.abs(tr.v - v_want).max() <= 1e-8
        assert tr.u[-1] == pytest.approx(1.5676676416183064, abs=1e-8)
        assert tr.v[-1] == pytest.approx(1.4323323583816936, abs=1e-8)

    def test_equilibrium_is_constant(self):
        tr = integrate_system(linear_system(), (1.5, 1.5), (0.0, 2.0), 1e-2)
        assert np.all(tr.u == 1.5)
        assert np.all(tr.v == 1.5)

    def test_invariant_circle_polar(self):
        tr = integrate_system(polar_system(), (0.0, 1.0), (0.0, 5.0), 1e-2)
        assert np.all(tr.v == 1.0)
        assert tr.u[-1] == pytest.approx(5.0, abs=1e-12)

    def test_partial_final_step(self):
        tr = integrate_system(linear_system(), (2.0, 1.0), (0.0, 0.35), 0.1)
        assert tr.t[-1] == 0.35
        assert len(tr) == 5
        assert np.diff(tr.t)[-1] == pytest.approx(0.05, abs=1e-12)

    def test_finite_time_blowup_detected(self):
        s = System2D(parse("u^2", UV), Constant(0.0))
        with pytest.raises(DomainError):
            integrate_system(s, (3.0, 0.0), (0.0, 0.4), 1e-3)

    def test_bad_step_rejected(self):
        with pytest.raises(ValueError):
            integrate_system(linear_system(), (1.0, 0.0), (0.0, 1.0), 0.0)


class TestExpMapTime:
    def test_pure_scaling(self):
        x = TimeGenerator(Constant(0.0), parse("u", UV), parse("v", UV))
        base = Trajectory([0.0], [2.0], [1.0], 1e-3)
        tc = exp_map_time(x, base, math.log(2.0))
        assert tc.t_hat[0] == 0.0
        assert tc.u_hat[0] == pytest.approx(4.0, abs=1e-8)
        assert tc.v_hat[0] == pytest.approx(2.0, abs=1e-8)

    def test_time_translation(self):
        x = TimeGenerator(Constant(1.0), Constant(0.0), Constant(0.0))
        base = integrate_system(linear_system(), (2.0, 1.0), (0.0, 0.2), 1e-2)
        tc = exp_map_time(x, base, 0.7)
        assert np.abs(tc.t_hat - (base.t + 0.7)).max() <= 1e-12
        assert np.array_equal(tc.u_hat, base.u)
        assert np.array_equal(tc.v_hat, base.v)

    def test_rotation_lift_quarter_turn(self):
        x = TimeGenerator(Constant(0.0), parse("-v", UV), parse("u", UV))
        base = Trajectory([0.0], [1.0], [0.0], 1e-3)
        tc = exp_map_time(x, base, math.pi / 2)
        assert tc.t_hat[0] == 0.0
        assert tc.u_hat[0] == pytest.approx(0.0, abs=1e-8)
        assert tc.v_hat[0] == pytest.approx(1.0, abs=1e-8)

    def test_epsilon_zero_is_identity(self):
        x = TimeGenerator(parse("u+v", TUV), parse("u", UV), parse("v", UV))
        base = integrate_system(linear_system(), (2.0, 1.0), (0.0, 0.1), 1e-2)
        tc = exp_map_time(x, base, 0.0)
        assert np.array_equal(tc.u_hat, base.u)
        assert tc.epsilon == 0.0

    def test_failure_names_sample(self):
        x = TimeGenerator(Constant(0.0), parse("u^2", UV), Constant(0.0))
        base = Trajectory([0.0, 1e-3], [3.0, 3.0], [0.0, 0.0], 1e-3)
        with pytest.raises(DomainError) as err:
            exp_map_time(x, base, 0.5)
        assert "sample index" in str(err.value)


class TestExpMapPhase:
    def test_scaling(self):
        y = PhaseGenerator(parse("u", UV), parse("v", UV))
        out = exp_map_phase(y, (1.0, 1.0), 1.0)
        assert out[0] == pytest.approx(math.e, abs=1e-8)
        assert out[1] == pytest.approx(math.e, abs=1e-8)

    def test_quarter_rotation(self):
        y = PhaseGenerator(parse("-v", UV), parse("u", UV))
        out = exp_map_phase(y, (1.0, 0.0), math.pi / 2)
        assert out[0] == pytest.approx(0.0, abs=1e-10)
        assert out[1] == pytest.approx(1.0, abs=1e-10)

    def test_generalized_rotation_tangent(self):
        y = PhaseGenerator(parse("(u+v)/(u-v)*v", UV), parse("-((u+v)/(u-v))*u", UV))
        eps = 1e-6
        out = exp_map_phase(y, (2.0, 1.0), eps)
        assert (out[0] - 2.0) / eps == pytest.approx(3.0, rel=1e-4)
        assert (out[1] - 1.0) / eps == pytest.approx(-6.0, rel=1e-4)

    def test_group_property(self):
        y = PhaseGenerator(parse("(u+v)/(u-v)*v", UV), parse("-((u+v)/(u-v))*u", UV))
        once = exp_map_phase(y, (2.0, 1.0), 0.05)
        twice = exp_map_phase(y, once, 0.03)
        direct = exp_map_phase(y, (2.0, 1.0), 0.08)
        assert abs(twice[0] - direct[0]) <= 1e-8
        assert abs(twice[1] - direct[1]) <= 1e-8

    def test_inverse(self):
        y = PhaseGenerator(parse("u", UV), parse("v", UV))
        there = exp_map_phase(y, (0.7, -0.3), 0.4)
        back = exp_map_phase(y, there, -0.4)
        assert back[0] == pytest.approx(0.7, abs=1e-8)
        assert back[1] == pytest.approx(-0.3, abs=1e-8)


class TestPreservation:
    def test_identity_transform_truncation_only(self):
        s = linear_system()
        base = integrate_system(s, (2.0, 1.0), (0.0, 0.5), 1e-3)
        tc = exp_map_time(
            TimeGenerator(Constant(0.0), Constant(0.0), Constant(0.0)), base, 0.0
        )
        report = solution_preservation_check(s, tc)
        assert report.max_abs_residual <= 1e-5

    def test_symmetry_preserves_solutions(self):
        s = linear_system()
        x = TimeGenerator(parse("u+v", TUV), parse("u", UV), parse("v", UV))
        base = integrate_system(s, (2.0, 1.0), (0.0, 0.5), 1e-3)
        report = solution_preservation_check(s, exp_map_time(x, base, 0.5))
        assert report.max_abs_residual <= 1e-4

    def test_non_symmetry_breaks_solutions(self):
        s = linear_system()
        x = TimeGenerator(Constant(0.0), parse("u", UV), Constant(0.0))
        base = integrate_system(s, (2.0, 1.0), (0.0, 0.5), 1e-3)
        report = solution_preservation_check(s, exp_map_time(x, base, 0.5))
        assert report.max_abs_residual > 1e-2

    def test_non_monotone_rejected(self):
        base = integrate_system(linear_system(), (2.0, 1.0), (0.0, 0.01), 1e-3)
        crafted = TransformedCurve(
            np.array([0.0, 1.0, 0.5]), np.zeros(3), np.zeros(3), 0.0, base
        )
        with pytest.raises(DomainError):
            solution_preservation_check(linear_system(), crafted)


class TestGroupPropertiesTime:
    def test_compose_and_invert(self):
        s = linear_system()
        x = TimeGenerator(
            parse("-(1/2)*((u+v)/(u-v))^2", TUV),
            parse("(u+v)/(u-v)*v", UV),
            parse("-((u+v)/(u-v))*u", UV),
        )
        base = integrate_system(s, (2.0, 1.0), (0.0, 0.3), 1e-2)
        ab = exp_map_time(x, exp_map_time(x, base, 0.1), 0.05)
        direct = exp_map_time(x, base, 0.15)
        assert np.abs(ab.t_hat - direct.t_hat).max() <= 1e-8
        assert np.abs(ab.u_hat - direct.u_hat).max() <= 1e-8
        assert np.abs(ab.v_hat - direct.v_hat).max() <= 1e-8
        back = exp_map_time(x, direct, -0.15)
        assert np.abs(back.u_hat - base.u).max() <= 1e-8
        assert np.abs(back.t_hat - base.t).max() <= 1e-8


class TestResample:
    def test_uniform_output_matches_closed_form(self):
        s = linear_system()
        x = TimeGenerator(
            parse("-(1/2)*((u+v)/(u-v))^2", TUV),
            parse("(u+v)/(u-v)*v", UV),
            parse("-((u+v)/(u-v))*u", UV),
        )
        base = integrate_system(s, (2.0, 1.0), (0.0, 0.3), 1e-3)
        tc = exp_map_time(x, base, 0.1)
        tr = resample_uniform(tc, 1e-2)
        assert np.abs(np.diff(tr.t)[:-1] - 1e-2).max() <= 1e-12
        # resampled points must still be (near-)solutions
        check = solution_preservation_check(s, exp_map_time(
            TimeGenerator(Constant(0.0), Constant(0.0), Constant(0.0)), tr, 0.0
        ))
        assert check.max_abs_residual <= 1e-3


class TestConvergence:
    def test_rk4_order(self):
        s = linear_system()
        errors = []
        for h in (0.02, 0.01):
            tr = integrate_system(s, (2.0, 1.0), (0.0, 1.0), h)
            u_want, v_want = linear_closed(2.0, 1.0, tr.t)
            errors.append(
                max(np.abs(tr.u - u_want).max(), np.abs(tr.v - v_want).max())
            )
        exponent = math.log2(errors[0] / errors[1])
        assert exponent >= 3.8
