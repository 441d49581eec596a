"""Jet-space types, total derivatives, and prolongation."""

import numpy as np
import pytest

from helpers import random_jet_time, random_phase_generator, random_time_generator
from phasesym.expr import Constant, Div, Variable, eval, parse, simplify
from phasesym.jets import (
    ChartMismatchError,
    JetPointPhase,
    JetPointTime,
    PhaseGenerator,
    System2D,
    TimeGenerator,
    is_on_shell_phase,
    is_on_shell_time,
    on_shell_phase,
    on_shell_time,
    phase_rhs,
    prolong_phase,
    prolong_time,
    require_same_chart,
    total_derivative_time,
)

UV = frozenset({"u", "v"})


def linear_system():
    return System2D(parse("-u+v", UV), parse("u-v", UV))


def nonlinear_system():
    return System2D(
        parse("u-v-u^3-u*v^2", UV),
        parse("u+v-v^3-u^2*v", UV),
    )


class TestTypes:
    def test_system_rejects_time_dependence(self):
        with pytest.raises(ValueError):
            System2D(parse("t*u", {"t", "u", "v"}), parse("v", UV))

    def test_time_generator_rejects_t_in_eta(self):
        t_u = parse("t*u", {"t", "u", "v"})
        with pytest.raises(ValueError):
            TimeGenerator(Constant(0.0), t_u, Constant(0.0))

    def test_time_generator_allows_t_in_xi(self):
        x = TimeGenerator(parse("t+u", {"t", "u", "v"}), parse("u", UV), parse("v", UV))
        assert x.xi == parse("t+u", {"t", "u", "v"})

    def test_unchecked_bypasses_validation(self):
        t_u = parse("t*u", {"t", "u", "v"})
        x = TimeGenerator.unchecked(Constant(0.0), t_u, Constant(0.0))
        assert x.eta_u == t_u

    def test_phase_generator_rejects_derivative_coordinates(self):
        with pytest.raises(ValueError):
            PhaseGenerator(parse("vprime", {"vprime"}), Constant(0.0))

    def test_chart_mismatch(self):
        s = System2D(parse("u", UV), parse("v", UV), chart="cartesian-uv")
        y = PhaseGenerator(Constant(1.0), Constant(0.0), chart="polar-theta-r")
        with pytest.raises(ChartMismatchError):
            require_same_chart(s, y)
        require_same_chart(s, PhaseGenerator(Constant(1.0), Constant(0.0)))


class TestPhaseRhs:
    def test_structure_and_linear_value(self):
        s = linear_system()
        omega = phase_rhs(s)
        assert omega == Div(s.omega_v, s.omega_u)
        for u, v in ((2.0, 1.0), (-1.0, 3.0), (0.5, 0.0)):
            assert eval(omega, {"u": u, "v": v}) == pytest.approx(-1.0, abs=1e-14)

    def test_horizontal_flow(self):
        s = System2D(Constant(1.0), Constant(0.0))
        assert eval(phase_rhs(s), {"u": 0.3, "v": -2.0}) == 0.0

    def test_nonlinear_point(self):
        value = eval(phase_rhs(nonlinear_system()), {"u": 2.0, "v": 0.0})
        assert value == pytest.approx(-1.0 / 3.0, abs=1e-14)


class TestTotalDerivative:
    def test_time_coordinate(self):
        out = total_derivative_time(Variable("t"), linear_system(), on_shell=True)
        assert out == Constant(1.0)

    def test_conserved_sum(self):
        out = total_derivative_time(parse("u+v", UV), linear_system(), on_shell=True)
        for u, v in ((2.0, 1.0), (0.0, 0.0), (-1.5, 2.5)):
            assert eval(out, {"u": u, "v": v}) == pytest.approx(0.0, abs=1e-14)

    def test_product_on_shell(self):
        out = total_derivative_time(parse("u*v", UV), linear_system(), on_shell=True)
        assert eval(out, {"u": 2.0, "v": 1.0}) == pytest.approx(1.0, abs=1e-14)

    def test_off_shell_uses_derivative_coordinates(self):
        out = total_derivative_time(parse("u*v", UV), linear_system(), on_shell=False)
        b = {"t": 0.0, "u": 2.0, "v": 1.0, "udot": 3.0, "vdot": -1.0}
        assert eval(out, b) == pytest.approx(1.0 * 3.0 + 2.0 * (-1.0), abs=1e-14)


class TestProlongTime:
    def test_time_scaling_generator(self):
        x = TimeGenerator(Variable("t"), Constant(0.0), Constant(0.0))
        p = prolong_time(x, linear_system())
        j = {"t": 0.5, "u": 2.0, "v": 1.0, "udot": -1.0, "vdot": 1.0}
        assert eval(p.eta_u1, j) == pytest.approx(1.0, abs=1e-14)
        assert eval(p.eta_v1, j) == pytest.approx(-1.0, abs=1e-14)

    def test_time_translation(self):
        x = TimeGenerator(Constant(1.0), Constant(0.0), Constant(0.0))
        p = prolong_time(x, linear_system())
        assert p.eta_u1 == Constant(0.0)
        assert p.eta_v1 == Constant(0.0)

    def test_scaling_lift_off_shell(self):
        x = TimeGenerator(Constant(0.0), Variable("u"), Variable("v"))
        p = prolong_time(x, linear_system())
        assert p.eta_u1 == Variable("udot")
        assert p.eta_v1 == Variable("vdot")

    def test_on_shell_matches_off_shell_at_solution_jets(self):
        rng = np.random.default_rng(11)
        s = nonlinear_system()
        for _ in range(20):
            x = random_time_generator(rng, with_t_in_xi=bool(rng.integers(2)))
            p = prolong_time(x, s)
            t = float(rng.uniform(-1, 1))
            u = float(rng.uniform(-2, 2))
            v = float(rng.uniform(-2, 2))
            j = on_shell_time(s, t, u, v)
            assert is_on_shell_time(s, j)
            b = j.bindings()
            on_b = {"t": t, "u": u, "v": v}
            assert abs(eval(p.eta_u1, b) - eval(p.eta_u1_on, on_b)) <= 1e-12 * (
                1 + abs(eval(p.eta_u1, b))
            )
            assert abs(eval(p.eta_v1, b) - eval(p.eta_v1_on, on_b)) <= 1e-12 * (
                1 + abs(eval(p.eta_v1, b))
            )


class TestProlongPhase:
    def test_scaling(self):
        y = PhaseGenerator(Variable("u"), Variable("v"))
        assert prolong_phase(y) == Constant(0.0)

    def test_rotation(self):
        y = PhaseGenerator(parse("-v", UV), Variable("u"))
        out = prolong_phase(y)
        for vp in (-2.0, 0.0, 0.7):
            b = {"u": 0.3, "v": -1.0, "vprime": vp}
            assert eval(out, b) == pytest.approx(1 + vp**2, abs=1e-14)

    def test_u_scaling_only(self):
        y = PhaseGenerator(Variable("u"), Constant(0.0))
        out = prolong_phase(y)
        for vp in (-1.5, 2.0):
            assert eval(out, {"u": 1.0, "v": 1.0, "vprime": vp}) == pytest.approx(
                -vp, abs=1e-14
            )

    def test_zero_generator(self):
        assert prolong_phase(PhaseGenerator(Constant(0.0), Constant(0.0))) == Constant(0.0)


class TestLinearity:
    def test_time_prolongation_linear_in_generator(self):
        rng = np.random.default_rng(23)
        s = linear_system()
        x1 = random_time_generator(rng, with_t_in_xi=True)
        x2 = random_time_generator(rng)
        a, b = 1.75, -0.4
        combo = TimeGenerator(
            simplify(a * x1.xi + b * x2.xi),
            simplify(a * x1.eta_u + b * x2.eta_u),
            simplify(a * x1.eta_v + b * x2.eta_v),
        )
        p1 = prolong_time(x1, s)
        p2 = prolong_time(x2, s)
        pc = prolong_time(combo, s)
        for _ in range(100):
            j = random_jet_time(rng).bindings()
            for field in ("eta_u1", "eta_v1"):
                got = eval(getattr(pc, field), j)
                want = a * eval(getattr(p1, field), j) + b * eval(getattr(p2, field), j)
                assert abs(got - want) <= 1e-10 * (1 + abs(want))

    def test_phase_prolongation_linear_in_generator(self):
        rng = np.random.default_rng(29)
        y1 = random_phase_generator(rng)
        y2 = random_phase_generator(rng)
        a, b = -2.0, 0.3
        combo = PhaseGenerator(
            simplify(a * y1.zeta_u + b * y2.zeta_u),
            simplify(a * y1.zeta_v + b * y2.zeta_v),
        )
        p1, p2, pc = prolong_phase(y1), prolong_phase(y2), prolong_phase(combo)
        for _ in range(100):
            b3 = {
                "u": float(rng.uniform(-2, 2)),
                "v": float(rng.uniform(-2, 2)),
                "vprime": float(rng.uniform(-3, 3)),
            }
            got = eval(pc, b3)
            want = a * eval(p1, b3) + b * eval(p2, b3)
            assert abs(got - want) <= 1e-10 * (1 + abs(want))


class TestOnShellHelpers:
    def test_phase_jet(self):
        s = linear_system()
        j = on_shell_phase(s, 2.0, 1.0)
        assert j == JetPointPhase(2.0, 1.0, -1.0)
        assert is_on_shell_phase(s, j)
        assert not is_on_shell_phase(s, JetPointPhase(2.0, 1.0, -0.5))

    def test_time_jet(self):
        s = linear_system()
        j = on_shell_time(s, 0.0, 2.0, 1.0)
        assert j == JetPointTime(0.0, 2.0, 1.0, -1.0, 1.0)
        assert not is_on_shell_time(s, JetPointTime(0.0, 2.0, 1.0, 0.0, 1.0))
