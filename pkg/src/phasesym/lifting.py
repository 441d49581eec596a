"""Lift phase-plane generators to the time domain.

A phase generator Y = zeta_u d_u + zeta_v d_v extends to a time-domain
generator xi d_t + Y exactly when (D_t xi) restricted to solutions equals a
right-hand side G(u, v) built from the system and Y.  G can be formed from
the u-components or the v-components; the two agree precisely when Y is a
symmetry of the phase flow, so the gap between them doubles as an
obstruction test.

The condition is an advection equation along trajectories, so xi is found by
integrating G along solution curves (the characteristics), starting from a
free initial value.  The freedom in the solution is an arbitrary function of
the system's constants of motion, exposed here as an optional expression in
the single variable "c".
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .expr import (
    Constant,
    DomainError,
    Expr,
    compile_scalar,
    compile_vector,
    simplify,
    to_string,
    variables_of,
)
from .expr import eval as _eval
from .flow import _integrate_path
from .jets import (
    PhaseGenerator,
    System2D,
    TimeGenerator,
    require_same_chart,
    total_derivative_time,
)
from .verify import (
    ResidualReport,
    SampleRegion,
    _directional,
    _grid_max,
    is_symmetry_phase,
)

_UV = ("u", "v")

# conservation slack for a proposed constant of motion, |D_t c| on solutions
_CONSERVATION_TOL = 1e-9


@dataclass(frozen=True)
class LiftSpec:
    """What to lift: a phase generator plus the optional free part.

    free, when present, is an expression in the single variable "c" and is
    composed with c_expr, a constant of motion of the system; it fixes the
    otherwise arbitrary additive part of the lifted time component.  guards
    are (expression, threshold) pairs that must stay away from zero along
    characteristics.
    """

    y: PhaseGenerator
    free: Expr | None = None
    c_expr: Expr | None = None
    guards: tuple[tuple[Expr, float], ...] = ()

    def __post_init__(self):
        if self.free is not None:
            if self.c_expr is None:
                raise ValueError("free function given without a constant of motion")
            extra = variables_of(self.free) - {"c"}
            if extra:
                raise ValueError(
                    f"free function may only use 'c', got {sorted(extra)}"
                )
        if self.c_expr is not None:
            extra = variables_of(self.c_expr) - {"u", "v"}
            if extra:
                raise ValueError(
                    f"constant of motion may only use u, v, got {sorted(extra)}"
                )
        for guard, threshold in self.guards:
            if variables_of(guard) - {"u", "v"}:
                raise ValueError(f"guard '{to_string(guard)}' may only use u, v")
            if threshold <= 0:
                raise ValueError("guard thresholds must be positive")


@dataclass(frozen=True, eq=False)
class LiftResult:
    """Samples (t, u, v, xi) along one characteristic.

    residual_report compares xi against the closed form when one was given,
    otherwise it reports the drift of the constant of motion.
    """

    t: np.ndarray
    u: np.ndarray
    v: np.ndarray
    xi: np.ndarray
    xi_closed: Expr | None
    residual_report: ResidualReport

    def __post_init__(self):
        for name in ("t", "u", "v", "xi"):
            object.__setattr__(
                self, name, np.asarray(getattr(self, name), dtype=float)
            )
        n = self.t.size
        if any(getattr(self, name).size != n for name in ("u", "v", "xi")):
            raise ValueError("sample columns must have equal length")
        if n > 1 and not np.all(np.diff(self.t) > 0):
            raise ValueError("samples must be ordered by strictly increasing t")
        for name in ("t", "u", "v", "xi"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"non-finite values in column {name!r}")

    def __len__(self) -> int:
        return int(self.t.size)


def lift_rhs(s: System2D, y: PhaseGenerator, form: str = "u-form") -> Expr:
    """Right-hand side G(u, v) of the lifting condition (D_t xi)|sol = G.

    u-form divides by omega_u, v-form by omega_v; both are rejected when the
    divisor is identically zero.
    """
    require_same_chart(s, y)
    if form == "u-form":
        divisor, zeta = s.omega_u, y.zeta_u
    elif form == "v-form":
        divisor, zeta = s.omega_v, y.zeta_v
    else:
        raise ValueError(f"form must be 'u-form' or 'v-form', got {form!r}")
    if simplify(divisor) == Constant(0.0):
        raise ValueError(f"{form} divisor {to_string(divisor)!r} is identically zero")
    numerator = _directional(s.omega_u, s.omega_v, zeta) - _directional(
        y.zeta_u, y.zeta_v, divisor
    )
    return simplify(numerator / divisor)


def _default_rhs(s: System2D, y: PhaseGenerator) -> Expr:
    if simplify(s.omega_u) == Constant(0.0):
        return lift_rhs(s, y, "v-form")
    return lift_rhs(s, y, "u-form")


def is_constant_of_motion(s: System2D, c_expr: Expr, region: SampleRegion, tol: float = _CONSERVATION_TOL):
    """True iff |D_t c| on solutions stays below tol over the region."""
    rate = simplify(total_derivative_time(c_expr, s, on_shell=True))
    pts = region.points()
    val, point, _ = _grid_max((rate,), _UV, (pts[:, 0], pts[:, 1]), ("d_t_c",))
    report = ResidualReport(val, point, pts.shape[0])
    return val <= tol, report


def check_lift_consistency(
    s: System2D, y: PhaseGenerator, region: SampleRegion, tol: float = 1e-9
):
    """Do the u-form and v-form right-hand sides agree on the region?

    They agree exactly when y generates a phase symmetry, so a nonzero gap is
    an obstruction to lifting.  The phase residual is evaluated alongside and
    reported for context.
    """
    gap = simplify(lift_rhs(s, y, "u-form") - lift_rhs(s, y, "v-form"))
    pts = region.points()
    val, point, _ = _grid_max((gap,), _UV, (pts[:, 0], pts[:, 1]), ("form_gap",))
    _, phase_report = is_symmetry_phase(s, y, region, tol)
    report = ResidualReport(
        val,
        point,
        pts.shape[0],
        per_component={
            "form_gap": val,
            "res_phase": phase_report.max_abs_residual,
        },
    )
    return val <= tol, report


def lift_characteristic(
    s: System2D,
    spec: LiftSpec,
    initial,
    xi0: float,
    t_span,
    h: float,
    xi_closed: Expr | None = None,
) -> LiftResult:
    """Integrate (u, v, xi) jointly along one characteristic.

    The (u, v) columns are produced by the same stepper and compiled
    right-hand sides as flow.integrate_system, so they match a plain
    trajectory from the same start bit for bit.  xi starts from
    xi0 + free(c(u0, v0)) and accumulates G along the curve.  When xi_closed
    is given the report holds the worst gap |xi - xi_closed(t, u, v)|.
    """
    require_same_chart(s, spec.y)
    g = _default_rhs(s, spec.y)
    f_u = compile_scalar(s.omega_u, _UV)
    f_v = compile_scalar(s.omega_v, _UV)
    f_g = compile_scalar(g, _UV)

    u0, v0 = float(initial[0]), float(initial[1])
    xi_start = float(xi0)
    if spec.free is not None:
        c0 = _eval(spec.c_expr, {"u": u0, "v": v0})
        xi_start += _eval(spec.free, {"c": c0})

    def f(_t, state):
        u, v, _xi = state
        return (f_u(u, v), f_v(u, v), f_g(u, v))

    t0, t1 = float(t_span[0]), float(t_span[1])
    ts, states = _integrate_path(f, (u0, v0, xi_start), t0, t1, h)
    n = len(states)
    us = np.fromiter((st[0] for st in states), dtype=float, count=n)
    vs = np.fromiter((st[1] for st in states), dtype=float, count=n)
    xis = np.fromiter((st[2] for st in states), dtype=float, count=n)

    for guard, threshold in spec.guards:
        vals = compile_vector(guard, _UV)(us, vs)
        bad = np.flatnonzero(~(np.abs(vals) >= threshold))
        if bad.size:
            i = int(bad[0])
            raise DomainError(
                f"guard '{to_string(guard)}' below {threshold:g} at t={ts[i]!r}"
            )

    drift_max = None
    drift_at = None
    if spec.c_expr is not None:
        rate = simplify(total_derivative_time(spec.c_expr, s, on_shell=True))
        drift = np.abs(compile_vector(rate, _UV)(us, vs))
        if not np.all(np.isfinite(drift)):
            i = int(np.argmax(~np.isfinite(drift)))
            raise DomainError(
                f"constant of motion not evaluable at t={ts[i]!r}"
            )
        i = int(np.argmax(drift))
        drift_max, drift_at = float(drift[i]), i
        if drift_max > _CONSERVATION_TOL:
            raise ValueError(
                "c_expr is not conserved along the characteristic "
                f"(max |D_t c| = {drift_max:g} at t={ts[i]!r})"
            )

    if xi_closed is not None:
        closed_vals = compile_vector(xi_closed, ("t", "u", "v"))(ts, us, vs)
        if not np.all(np.isfinite(closed_vals)):
            i = int(np.argmax(~np.isfinite(closed_vals)))
            raise DomainError(f"closed form not evaluable at t={ts[i]!r}")
        gaps = np.abs(xis - closed_vals)
        i = int(np.argmax(gaps))
        report = ResidualReport(
            float(gaps[i]),
            (float(ts[i]), float(us[i]), float(vs[i])),
            n,
            per_component={"xi_gap": float(gaps[i])},
        )
    elif drift_max is not None:
        i = drift_at
        report = ResidualReport(
            drift_max,
            (float(ts[i]), float(us[i]), float(vs[i])),
            n,
            per_component={"d_t_c": drift_max},
        )
    else:
        report = ResidualReport(0.0, (float(ts[0]), float(us[0]), float(vs[0])), n)
    return LiftResult(ts, us, vs, xis, xi_closed, report)


def verify_lift(
    s: System2D, y: PhaseGenerator, xi: Expr, region: SampleRegion
) -> ResidualReport:
    """Max |(D_t xi)|sol - G| over the region: does xi solve the lift?"""
    require_same_chart(s, y)
    residual = simplify(
        total_derivative_time(xi, s, on_shell=True) - _default_rhs(s, y)
    )
    pts = region.points()
    us, vs = pts[:, 0], pts[:, 1]
    t_samples = (-1.0, 0.0, 1.0) if "t" in variables_of(residual) else (0.0,)
    best, best_point = -1.0, None
    for t in t_samples:
        col_t = np.full(us.shape, t)
        val, point, _ = _grid_max(
            (residual,), ("t", "u", "v"), (col_t, us, vs), ("residual",)
        )
        if val > best:
            best, best_point = val, point
    return ResidualReport(best, best_point, us.size * len(t_samples))


def assemble_lift(y: PhaseGenerator, xi: Expr) -> TimeGenerator:
    """Time-domain generator xi d_t + zeta_u d_u + zeta_v d_v."""
    return TimeGenerator(xi, y.zeta_u, y.zeta_v, chart=y.chart)
