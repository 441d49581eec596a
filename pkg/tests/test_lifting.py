"""Lifting condition: right-hand sides, characteristics, closed-form checks."""

import math

import numpy as np
import pytest

from phasesym.expr import Constant, DomainError, eval, parse
from phasesym.flow import integrate_system
from phasesym.jets import ChartMismatchError, PhaseGenerator, System2D
from phasesym.lifting import (
    LiftResult,
    LiftSpec,
    assemble_lift,
    check_lift_consistency,
    is_constant_of_motion,
    lift_characteristic,
    lift_rhs,
    verify_lift,
)
from phasesym.models import (
    lift_xi,
    linear_model,
    nonlinear_model,
    nonlinear_model_polar,
)
from phasesym.reduction import pushforward
from phasesym.verify import ResidualReport, SampleRegion, is_symmetry_time

UV = frozenset({"u", "v"})
C = frozenset({"c"})


def genrot():
    return linear_model().generators["generalized-rotation"]


class TestLiftRhs:
    def test_scaling_rhs_vanishes(self):
        m = linear_model()
        assert lift_rhs(m.system, m.generators["scaling"]) == Constant(0.0)

    def test_generalized_rotation_value(self):
        g = lift_rhs(linear_model().system, genrot())
        assert eval(g, {"u": 2.0, "v": 1.0}) == pytest.approx(-18.0, abs=1e-12)

    def test_v_form_agrees_for_symmetry(self):
        g = lift_rhs(linear_model().system, genrot(), "v-form")
        assert eval(g, {"u": 2.0, "v": 1.0}) == pytest.approx(-18.0, abs=1e-12)

    def test_polar_rotation_rhs_vanishes(self):
        p = nonlinear_model_polar()
        assert lift_rhs(p.system, p.generators["rotation"]) == Constant(0.0)

    def test_unknown_form(self):
        m = linear_model()
        with pytest.raises(ValueError):
            lift_rhs(m.system, m.generators["scaling"], "w-form")

    def test_identically_zero_divisor(self):
        s = System2D(Constant(0.0), parse("v", UV))
        with pytest.raises(ValueError):
            lift_rhs(s, PhaseGenerator(parse("u", UV), parse("v", UV)))

    def test_chart_mismatch(self):
        p = nonlinear_model_polar()
        with pytest.raises(ChartMismatchError):
            lift_rhs(linear_model().system, p.generators["rotation"])


class TestConsistency:
    def test_symmetry_forms_agree(self):
        m = linear_model()
        ok, report = check_lift_consistency(
            m.system, genrot(), m.region_for("generalized-rotation")
        )
        assert ok
        assert report.max_abs_residual <= 1e-9
        assert report.per_component["res_phase"] <= 1e-8

    def test_homogeneous_case_both_zero(self):
        m = linear_model()
        ok, report = check_lift_consistency(
            m.system, m.generators["scaling"], m.default_region
        )
        assert ok
        assert report.max_abs_residual == 0.0

    def test_non_symmetry_has_unit_gap(self):
        # for zeta = (u, 0) on this system the two forms differ by exactly 1
        m = linear_model()
        y = PhaseGenerator(parse("u", UV), Constant(0.0))
        ok, report = check_lift_consistency(
            m.system, y, m.region_for("generalized-rotation")
        )
        assert not ok
        assert report.max_abs_residual == pytest.approx(1.0, abs=1e-9)
        assert report.per_component["res_phase"] == pytest.approx(1.0, abs=1e-9)


class TestIsConstantOfMotion:
    def test_conserved_total(self):
        m = linear_model()
        ok, report = is_constant_of_motion(m.system, parse("u+v", UV), m.default_region)
        assert ok
        assert report.max_abs_residual <= 1e-12

    def test_not_conserved(self):
        m = linear_model()
        ok, report = is_constant_of_motion(m.system, parse("u", UV), m.default_region)
        assert not ok
        assert report.max_abs_residual == pytest.approx(6.0, abs=1e-12)


class TestLiftSpecValidation:
    def test_free_requires_constant(self):
        with pytest.raises(ValueError):
            LiftSpec(genrot(), free=parse("c", C))

    def test_free_variable_restricted(self):
        with pytest.raises(ValueError):
            LiftSpec(genrot(), free=parse("c+u", {"c", "u"}), c_expr=parse("u+v", UV))

    def test_constant_variable_restricted(self):
        with pytest.raises(ValueError):
            LiftSpec(genrot(), c_expr=parse("t", {"t"}))

    def test_guard_threshold_positive(self):
        with pytest.raises(ValueError):
            LiftSpec(genrot(), guards=((parse("u-v", UV), 0.0),))


class TestLiftCharacteristic:
    def test_homogeneous_lift_stays_zero(self):
        m = linear_model()
        spec = LiftSpec(
            m.generators["scaling"], c_expr=m.lifts["scaling"].c_expr
        )
        lr = lift_characteristic(m.system, spec, (2.0, 1.0), 0.0, (0.0, 2.0), 1e-3)
        assert np.all(lr.xi == 0.0)
        assert lr.residual_report.per_component["d_t_c"] <= 1e-9

    def test_generalized_rotation_matches_closed_form(self):
        m = linear_model()
        lift = m.lifts["generalized-rotation"]
        spec = LiftSpec(genrot(), guards=lift.guards)
        lr = lift_characteristic(
            m.system,
            spec,
            (2.0, 1.0),
            -4.5,
            (0.0, math.log(2.0) / 4.0),
            1e-4,
            xi_closed=lift.xi_closed,
        )
        assert lr.xi[-1] == pytest.approx(-9.0, abs=1e-6)
        assert lr.residual_report.max_abs_residual <= 1e-6
        assert lr.residual_report.per_component["xi_gap"] <= 1e-6

    def test_polar_lift_is_constant_of_motion_value(self):
        p = nonlinear_model_polar()
        lift = p.lifts["rotation"]
        spec = LiftSpec(
            p.generators["rotation"],
            free=parse("c", C),
            c_expr=lift.c_expr,
            guards=lift.guards,
        )
        lr = lift_characteristic(p.system, spec, (0.0, 2.0), 0.0, (0.0, 1.0), 1e-3)
        assert np.all(lr.xi == lr.xi[0])
        assert lr.xi[0] == pytest.approx(math.log(2.0 / math.sqrt(3.0)), abs=1e-12)

    def test_characteristic_is_the_trajectory(self):
        m = linear_model()
        spec = LiftSpec(genrot(), guards=m.lifts["generalized-rotation"].guards)
        lr = lift_characteristic(m.system, spec, (2.0, 1.0), -4.5, (0.0, 0.25), 1e-3)
        tr = integrate_system(m.system, (2.0, 1.0), (0.0, 0.25), 1e-3)
        assert np.array_equal(lr.t, tr.t)
        assert np.array_equal(lr.u, tr.u)
        assert np.array_equal(lr.v, tr.v)

    def test_guard_stops_near_singular_set(self):
        m = linear_model()
        spec = LiftSpec(genrot(), guards=m.lifts["generalized-rotation"].guards)
        with pytest.raises(DomainError) as err:
            lift_characteristic(m.system, spec, (2.0, 1.0), -4.5, (0.0, 4.0), 1e-3)
        assert "guard" in str(err.value)

    def test_free_part_seeds_initial_value(self):
        m = linear_model()
        spec = LiftSpec(
            m.generators["scaling"], free=parse("c", C), c_expr=parse("u+v", UV)
        )
        lr = lift_characteristic(m.system, spec, (2.0, 1.0), 0.0, (0.0, 1.0), 1e-3)
        assert lr.xi[0] == 3.0
        assert np.all(lr.xi == 3.0)

    def test_bogus_constant_of_motion_rejected(self):
        m = linear_model()
        spec = LiftSpec(
            m.generators["scaling"], free=parse("c", C), c_expr=parse("u", UV)
        )
        with pytest.raises(ValueError) as err:
            lift_characteristic(m.system, spec, (2.0, 1.0), 0.0, (0.0, 1.0), 1e-3)
        assert "conserved" in str(err.value)

    def test_singular_closed_form_rejected(self):
        m = linear_model()
        spec = LiftSpec(m.generators["scaling"])
        with pytest.raises(DomainError):
            lift_characteristic(
                m.system,
                spec,
                (2.0, 1.0),
                0.0,
                (0.0, 1.0),
                1e-3,
                xi_closed=parse("ln(u-2)", UV),
            )


class TestVerifyLift:
    def test_generalized_rotation_closed_form(self):
        m = linear_model()
        report = verify_lift(
            m.system,
            genrot(),
            m.lifts["generalized-rotation"].xi_closed,
            m.region_for("generalized-rotation"),
        )
        assert report.max_abs_residual <= 1e-9

    def test_scaling_with_identity_free_part(self):
        m = linear_model()
        report = verify_lift(
            m.system, m.generators["scaling"], parse("u+v", UV), m.default_region
        )
        assert report.max_abs_residual == 0.0

    def test_wrong_lift_residual_shape(self):
        # for xi = u the residual is omega_u itself, i.e. |v - u|
        m = linear_model()
        region = SampleRegion((1.9, 2.1), (0.9, 1.1), 3)
        report = verify_lift(m.system, m.generators["scaling"], parse("u", UV), region)
        assert report.max_abs_residual == pytest.approx(1.2, abs=1e-12)

    def test_time_dependent_lift_sampled_in_t(self):
        # residual of xi = t*u is u + t*(v-u); largest at t=-1, u=2.1, v=0.9
        m = linear_model()
        region = SampleRegion((1.9, 2.1), (0.9, 1.1), 3)
        report = verify_lift(
            m.system, m.generators["scaling"], parse("t*u", {"t", "u"}), region
        )
        assert report.max_abs_residual == pytest.approx(3.3, abs=1e-12)
        assert report.n_evaluated == 27

    def test_free_function_freedom(self):
        m = linear_model()
        lift = m.lifts["generalized-rotation"]
        for free in (None, parse("c", C), parse("-c/10", C)):
            xi = lift_xi(lift, free)
            report = verify_lift(
                m.system, genrot(), xi, m.region_for("generalized-rotation")
            )
            assert report.max_abs_residual <= 1e-9, free

    def test_cartesian_rotation_lift(self):
        n = nonlinear_model()
        xi = lift_xi(n.lifts["rotation"], parse("c", C))
        report = verify_lift(
            n.system, n.generators["rotation"], xi, n.default_region
        )
        assert report.max_abs_residual <= 1e-9


class TestAssembleLift:
    def test_round_trip_to_phase(self):
        m = linear_model()
        y = m.generators["scaling"]
        x = assemble_lift(y, parse("u+v", UV))
        assert pushforward(x) == y

    def test_packaged_lifts_certify_in_time(self):
        for m, gname, free in (
            (linear_model(), "scaling", None),
            (linear_model(), "generalized-rotation", None),
            (nonlinear_model(), "rotation", parse("c", C)),
            (nonlinear_model_polar(), "rotation", parse("c", C)),
        ):
            xi = lift_xi(m.lifts[gname], free)
            x = assemble_lift(m.generators[gname], xi)
            ok, report = is_symmetry_time(m.system, x, m.region_for(gname), tol=1e-8)
            assert ok, (m.name, gname, report.max_abs_residual)


class TestLiftResultValidation:
    def test_column_lengths(self):
        report = ResidualReport(0.0, (0.0, 0.0, 0.0), 1)
        with pytest.raises(ValueError):
            LiftResult([0.0, 1.0], [0.0], [0.0], [0.0], None, report)

    def test_ordered_time(self):
        report = ResidualReport(0.0, (0.0, 0.0, 0.0), 2)
        with pytest.raises(ValueError):
            LiftResult(
                [1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0], None, report
            )

    def test_finite_samples(self):
        report = ResidualReport(0.0, (0.0, 0.0, 0.0), 2)
        with pytest.raises(ValueError):
            LiftResult(
                [0.0, 1.0], [0.0, 0.0], [0.0, 0.0], [0.0, math.inf], None, report
            )
