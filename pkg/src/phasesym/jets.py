"""Planar systems, infinitesimal generators, and jet-space prolongation.

Coordinates are fixed package-wide: t is time and (u, v) are the states.
The derivative coordinates udot, vdot (time domain, J5 = (t,u,v,udot,vdot))
and vprime (phase plane, J3 = (u,v,vprime)) are ordinary expression
variables, so prolonged tangents ride the same evaluation pipeline as every
other scalar field.
"""

from __future__ import annotations

from dataclasses import dataclass

from .expr import (
    Add,
    Div,
    Expr,
    Mul,
    Sub,
    Variable,
    diff,
    simplify,
    substitute,
    variables_of,
)
from .expr import eval as _eval

__all__ = [
    "System2D",
    "TimeGenerator",
    "PhaseGenerator",
    "JetPointTime",
    "JetPointPhase",
    "ProlongedTime",
    "ChartMismatchError",
    "require_same_chart",
    "phase_rhs",
    "total_derivative_time",
    "prolong_time",
    "prolong_phase",
    "on_shell_time",
    "on_shell_phase",
    "is_on_shell_time",
    "is_on_shell_phase",
]

_STATE_VARS = frozenset({"u", "v"})
_TIME_VARS = frozenset({"t", "u", "v"})


class ChartMismatchError(ValueError):
    """A generator bound to one coordinate chart was used with another."""


def _check_vars(e: Expr, allowed: frozenset, what: str) -> None:
    extra = variables_of(e) - allowed
    if extra:
        raise ValueError(
            f"{what} may only reference {sorted(allowed)}, found {sorted(extra)}"
        )


@dataclass(frozen=True)
class System2D:
    """Autonomous planar system du/dt = omega_u(u,v), dv/dt = omega_v(u,v).

    The chart name is descriptive (e.g. "cartesian-uv", "polar-theta-r") and
    is used only to reject cross-chart generator/system pairings.
    """

    omega_u: Expr
    omega_v: Expr
    chart: str = "cartesian-uv"

    def __post_init__(self):
        _check_vars(self.omega_u, _STATE_VARS, "omega_u")
        _check_vars(self.omega_v, _STATE_VARS, "omega_v")


@dataclass(frozen=True)
class TimeGenerator:
    """Time-domain generator X = xi d_t + eta_u d_u + eta_v d_v.

    eta_u and eta_v must be t-free so the flow preserves autonomy; xi may
    reference t, u, and v (lifted generators are in general not
    fibre-preserving).  chart=None means chart-agnostic.
    """

    xi: Expr
    eta_u: Expr
    eta_v: Expr
    chart: "str | None" = None

    def __post_init__(self):
        _check_vars(self.xi, _TIME_VARS, "xi")
        _check_vars(self.eta_u, _STATE_VARS, "eta_u")
        _check_vars(self.eta_v, _STATE_VARS, "eta_v")

    @classmethod
    def unchecked(cls, xi: Expr, eta_u: Expr, eta_v: Expr, chart=None):
        """Construct without invariant checks (for exercising validators)."""
        self = object.__new__(cls)
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "eta_u", eta_u)
        object.__setattr__(self, "eta_v", eta_v)
        object.__setattr__(self, "chart", chart)
        return self


@dataclass(frozen=True)
class PhaseGenerator:
    """Phase-plane generator Y = zeta_u d_u + zeta_v d_v."""

    zeta_u: Expr
    zeta_v: Expr
    chart: "str | None" = None

    def __post_init__(self):
        _check_vars(self.zeta_u, _STATE_VARS, "zeta_u")
        _check_vars(self.zeta_v, _STATE_VARS, "zeta_v")


@dataclass(frozen=True)
class JetPointTime:
    """A point (t, u, v, udot, vdot) of the time-domain jet space J5."""

    t: float
    u: float
    v: float
    udot: float
    vdot: float

    def bindings(self) -> dict:
        return {"t": self.t, "u": self.u, "v": self.v, "udot": self.udot, "vdot": self.vdot}


@dataclass(frozen=True)
class JetPointPhase:
    """A point (u, v, vprime) of the phase-plane jet space J3."""

    u: float
    v: float
    vprime: float

    def bindings(self) -> dict:
        return {"u": self.u, "v": self.v, "vprime": self.vprime}


def require_same_chart(s: System2D, generator) -> None:
    """Reject a generator bound to a different chart than the system."""
    chart = getattr(generator, "chart", None)
    if chart is not None and chart != s.chart:
        raise ChartMismatchError(
            f"generator chart '{chart}' does not match system chart '{s.chart}'"
        )


# ---------------------------------------------------------------------------
# Phase-plane reduction of the system itself


def phase_rhs(s: System2D) -> Expr:
    """Slope field Omega = omega_v/omega_u of the reduced ODE dv/du = Omega.

    Returned unsimplified; evaluation where omega_u vanishes raises the
    expression domain error.
    """
    return Div(s.omega_v, s.omega_u)


# ---------------------------------------------------------------------------
# Total derivatives and prolongation


def total_derivative_time(phi: Expr, s: System2D, on_shell: bool) -> Expr:
    """Total time derivative D_t phi = d_t phi + udot d_u phi + vdot d_v phi.

    With on_shell=True the derivative coordinates are replaced by the system
    right-hand sides, giving D_t phi restricted to solutions as an expression
    over {t, u, v}.
    """
    du = Variable("udot") if not on_shell else s.omega_u
    dv = Variable("vdot") if not on_shell else s.omega_v
    out = Add(diff(phi, "t"), Add(Mul(du, diff(phi, "u")), Mul(dv, diff(phi, "v"))))
    return simplify(out)


@dataclass(frozen=True)
class ProlongedTime:
    """First prolongation tangents of a time-domain generator.

    eta_u1/eta_v1 are over {t,u,v,udot,vdot}; the _on variants have
    udot -> omega_u, vdot -> omega_v substituted and are over {t,u,v}.
    """

    eta_u1: Expr
    eta_v1: Expr
    eta_u1_on: Expr
    eta_v1_on: Expr


def prolong_time(x: TimeGenerator, s: System2D) -> ProlongedTime:
    """First prolongation: eta^(1) = D_t eta - (udot|vdot) D_t xi."""
    d_xi = total_derivative_time(x.xi, s, on_shell=False)
    d_eta_u = total_derivative_time(x.eta_u, s, on_shell=False)
    d_eta_v = total_derivative_time(x.eta_v, s, on_shell=False)
    eta_u1 = simplify(Sub(d_eta_u, Mul(Variable("udot"), d_xi)))
    eta_v1 = simplify(Sub(d_eta_v, Mul(Variable("vdot"), d_xi)))
    on = {"udot": s.omega_u, "vdot": s.omega_v}
    return ProlongedTime(
        eta_u1,
        eta_v1,
        simplify(substitute(eta_u1, on)),
        simplify(substitute(eta_v1, on)),
    )


def prolong_phase(y: PhaseGenerator) -> Expr:
    """First prolongation zeta_v1 = D_u zeta_v - vprime D_u zeta_u.

    D_u = d_u + vprime d_v; result is over {u, v, vprime}.
    """
    vp = Variable("vprime")
    d_zeta_v = Add(diff(y.zeta_v, "u"), Mul(vp, diff(y.zeta_v, "v")))
    d_zeta_u = Add(diff(y.zeta_u, "u"), Mul(vp, diff(y.zeta_u, "v")))
    return simplify(Sub(d_zeta_v, Mul(vp, d_zeta_u)))


# ---------------------------------------------------------------------------
# On-shell jet points


def on_shell_time(s: System2D, t: float, u: float, v: float) -> JetPointTime:
    """The unique point of the solution variety over (t, u, v)."""
    b = {"u": u, "v": v}
    return JetPointTime(t, u, v, _eval(s.omega_u, b), _eval(s.omega_v, b))


def on_shell_phase(s: System2D, u: float, v: float) -> JetPointPhase:
    """The unique point of the reduced solution variety over (u, v)."""
    return JetPointPhase(u, v, _eval(phase_rhs(s), {"u": u, "v": v}))


def is_on_shell_time(s: System2D, j: JetPointTime, tol: float = 1e-12) -> bool:
    b = {"u": j.u, "v": j.v}
    return (
        abs(j.udot - _eval(s.omega_u, b)) <= tol
        and abs(j.vdot - _eval(s.omega_v, b)) <= tol
    )


def is_on_shell_phase(s: System2D, j: JetPointPhase, tol: float = 1e-12) -> bool:
    return abs(j.vprime - _eval(phase_rhs(s), {"u": j.u, "v": j.v})) <= tol
