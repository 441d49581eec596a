"""Built-in 2D systems with known symmetries, lifts, and coordinate maps.

Three catalog entries ship with the package:

* ``linear-mass-conserved``: a 2x2 linear exchange system whose total u+v is
  conserved.  It carries a uniform scaling symmetry and a generalized
  rotation whose time component blows up on the diagonal u=v.
* ``nonlinear-oscillator``: a cubic planar oscillator with an attracting
  unit circle, written in Cartesian coordinates.  Its rotation symmetry is
  exact everywhere; the closed-form time component is singular on the unit
  circle and at the origin.
* ``nonlinear-oscillator-polar``: the same oscillator after u = r cos(theta),
  v = r sin(theta), with u standing for theta and v for r.

Each entry packages the system, its phase generators, closed-form lift data,
and sampling regions that stay clear of the singular sets.
"""

from __future__ import annotations

import functools
import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from .expr import (
    Constant,
    DomainError,
    Expr,
    parse,
    simplify,
    substitute,
    variables_of,
)
from .jets import PhaseGenerator, System2D, TimeGenerator
from .verify import SampleRegion

_UV = frozenset({"u", "v"})

MODEL_NAMES = (
    "linear-mass-conserved",
    "nonlinear-oscillator",
    "nonlinear-oscillator-polar",
)

# closed_solution callables map ((u0, v0), ts) -> (u array, v array)
ClosedSolution = Callable[[tuple[float, float], np.ndarray], tuple[np.ndarray, np.ndarray]]


@dataclass(frozen=True)
class ModelLift:
    """Closed-form time component attached to one phase generator.

    xi_closed is the particular solution with the free function set to zero.
    c_expr is the constant of motion the free function composes with.  guards
    are (expression, threshold) pairs that must stay bounded away from zero
    along characteristics; crossing one means the lift is singular there.
    """

    generator: str
    xi_closed: Expr
    c_expr: Expr | None = None
    guards: tuple[tuple[Expr, float], ...] = ()


@dataclass(frozen=True, eq=False)
class NamedModel:
    """A system bundled with named generators, lifts, and sample regions.

    Instances returned by the builders are shared and must be treated as
    read-only.  regions holds per-generator overrides of default_region for
    generators whose lift has extra singular sets.
    """

    name: str
    system: System2D
    generators: dict[str, PhaseGenerator]
    lifts: dict[str, ModelLift]
    default_region: SampleRegion
    regions: dict[str, SampleRegion] = field(default_factory=dict)
    closed_solution: ClosedSolution | None = None
    time_generators: dict[str, TimeGenerator] = field(default_factory=dict)

    def region_for(self, generator: str) -> SampleRegion:
        return self.regions.get(generator, self.default_region)


def lift_xi(lift: ModelLift, free: Expr | None = None) -> Expr:
    """Full time component xi_closed + free(c) for a choice of free function.

    free, when given, must be an expression in the single variable "c"; it is
    composed with the lift's constant of motion.
    """
    if free is None:
        return lift.xi_closed
    if lift.c_expr is None:
        raise ValueError(
            f"lift for {lift.generator!r} has no constant of motion to compose with"
        )
    extra = variables_of(free) - {"c"}
    if extra:
        raise ValueError(
            f"free function may only use 'c', got {sorted(extra)}"
        )
    return simplify(lift.xi_closed + substitute(free, {"c": lift.c_expr}))


def to_polar(point: tuple[float, float]) -> tuple[float, float]:
    """(u, v) -> (theta, r) with theta in (-pi, pi]; origin has no angle."""
    u, v = point
    if u == 0.0 and v == 0.0:
        raise DomainError("polar angle undefined at the origin")
    theta = math.atan2(v, u)
    if theta <= -math.pi:
        theta += 2.0 * math.pi
    return theta, math.hypot(u, v)


def from_polar(point: tuple[float, float]) -> tuple[float, float]:
    theta, r = point
    return r * math.cos(theta), r * math.sin(theta)


def to_polar_curve(u, v) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized to_polar with the angle unwrapped along the curve."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    r = np.hypot(u, v)
    if np.any(r == 0.0):
        raise DomainError("polar angle undefined at the origin")
    return np.unwrap(np.arctan2(v, u)), r


def from_polar_curve(theta, r) -> tuple[np.ndarray, np.ndarray]:
    theta = np.asarray(theta, dtype=float)
    r = np.asarray(r, dtype=float)
    return r * np.cos(theta), r * np.sin(theta)


def unwrap_series(values, period: float = 2.0 * math.pi) -> np.ndarray:
    """Remove jumps of the given period from a sampled series.

    Useful for series built from the two-argument arctangent, which jumps by
    2 pi whenever a trajectory winds past the branch cut.
    """
    return np.unwrap(np.asarray(values, dtype=float), period=period)


def _linear_closed(initial, ts):
    u0, v0 = initial
    ts = np.asarray(ts, dtype=float)
    mean = (u0 + v0) / 2.0
    half = (u0 - v0) / 2.0
    decay = np.exp(-2.0 * ts)
    return mean + half * decay, mean - half * decay


def _polar_closed(initial, ts):
    theta0, r0 = initial
    ts = np.asarray(ts, dtype=float)
    denom = r0 * r0 + (1.0 - r0 * r0) * np.exp(-2.0 * ts)
    if np.any(denom <= 0.0):
        raise DomainError("closed-form radius undefined over this span")
    return theta0 + ts, r0 / np.sqrt(denom)


def _cartesian_closed(initial, ts):
    theta, r = _polar_closed(to_polar(initial), ts)
    return r * np.cos(theta), r * np.sin(theta)


@functools.cache
def linear_model() -> NamedModel:
    """Linear exchange system du/dt = -u+v, dv/dt = u-v."""
    omega_u = parse("-u+v", _UV)
    scaling = PhaseGenerator(parse("u", _UV), parse("v", _UV))
    genrot = PhaseGenerator(
        parse("(u+v)/(u-v)*v", _UV), parse("-((u+v)/(u-v))*u", _UV)
    )
    total = parse("u+v", _UV)
    return NamedModel(
        name="linear-mass-conserved",
        system=System2D(omega_u, parse("u-v", _UV)),
        generators={"scaling": scaling, "generalized-rotation": genrot},
        lifts={
            "scaling": ModelLift("scaling", Constant(0.0), c_expr=total),
            "generalized-rotation": ModelLift(
                "generalized-rotation",
                parse("-(1/2)*((u+v)/(u-v))^2", _UV),
                c_expr=total,
                guards=((parse("u-v", _UV), 1e-3),),
            ),
        },
        default_region=SampleRegion(
            (-3.0, 3.0), (-3.0, 3.0), 41, exclusions=((omega_u, 0.05),)
        ),
        regions={
            "generalized-rotation": SampleRegion(
                (-3.0, 3.0),
                (-3.0, 3.0),
                41,
                exclusions=((parse("u-v", _UV), 0.1),),
            )
        },
        closed_solution=_linear_closed,
    )


@functools.cache
def nonlinear_model() -> NamedModel:
    """Cubic oscillator with an attracting unit circle, Cartesian chart."""
    omega_u = parse("u-v-u^3-u*v^2", _UV)
    omega_v = parse("u+v-v^3-u^2*v", _UV)
    return NamedModel(
        name="nonlinear-oscillator",
        system=System2D(omega_u, omega_v),
        generators={"rotation": PhaseGenerator(parse("-v", _UV), parse("u", _UV))},
        lifts={
            "rotation": ModelLift(
                "rotation",
                Constant(0.0),
                c_expr=parse(
                    "ln(sqrt((u^2+v^2)/abs(1-u^2-v^2)))-atan2(v, u)", _UV
                ),
                guards=((parse("1-u^2-v^2", _UV), 1e-3),),
            )
        },
        default_region=SampleRegion(
            (-2.5, 2.5),
            (-2.5, 2.5),
            41,
            exclusions=(
                (omega_u, 0.05),
                (omega_v, 0.05),
                (parse("u^2+v^2", _UV), 0.04),
                (parse("1-u^2-v^2", _UV), 0.19),
            ),
        ),
        closed_solution=_cartesian_closed,
    )


@functools.cache
def nonlinear_model_polar() -> NamedModel:
    """The cubic oscillator in polar coordinates: u is theta, v is r."""
    return NamedModel(
        name="nonlinear-oscillator-polar",
        system=System2D(
            Constant(1.0), parse("v*(1-v^2)", _UV), chart="polar-theta-r"
        ),
        generators={
            "rotation": PhaseGenerator(
                Constant(1.0), Constant(0.0), chart="polar-theta-r"
            )
        },
        lifts={
            "rotation": ModelLift(
                "rotation",
                Constant(0.0),
                c_expr=parse("ln(v/sqrt(abs(1-v^2)))-u", _UV),
                guards=(
                    (parse("1-v^2", _UV), 1e-3),
                    (parse("v", _UV), 1e-3),
                ),
            )
        },
        default_region=SampleRegion(
            (-3.2, 3.2),
            (0.2, 2.5),
            41,
            exclusions=((parse("1-v^2", _UV), 0.19),),
        ),
        closed_solution=_polar_closed,
    )


_BUILDERS = {
    "linear-mass-conserved": linear_model,
    "nonlinear-oscillator": nonlinear_model,
    "nonlinear-oscillator-polar": nonlinear_model_polar,
}


def get_model(name: str) -> NamedModel:
    try:
        builder = _BUILDERS[name]
    except KeyError:
        known = ", ".join(MODEL_NAMES)
        raise ValueError(f"unknown model {name!r}; built-ins: {known}") from None
    return builder()


def builtin_models() -> tuple[NamedModel, ...]:
    return tuple(get_model(name) for name in MODEL_NAMES)
