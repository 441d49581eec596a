"""Trajectory integration, generator flows, and solution preservation.

Everything is classical fixed-step RK4: reproducible, easy to reason about,
and fast enough at desk scale.  The same scalar stepper drives both system
trajectories and characteristic integration (see lifting), so shared (u, v)
columns agree bitwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .expr import DomainError, compile_scalar, compile_vector
from .jets import ChartMismatchError, PhaseGenerator, System2D, TimeGenerator
from .verify import ResidualReport

__all__ = [
    "Trajectory",
    "TransformedCurve",
    "integrate_system",
    "exp_map_time",
    "exp_map_phase",
    "solution_preservation_check",
    "resample_uniform",
]

_SPACING_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Uniformly sampled solution curve (t_i, u_i, v_i) with nominal step h.

    Interior steps are exactly h (within 1e-12); the final step may be
    shorter where the span is not an integer number of steps.
    """

    t: np.ndarray
    u: np.ndarray
    v: np.ndarray
    h: float
    chart: str = "cartesian-uv"

    def __post_init__(self):
        for name in ("t", "u", "v"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if not (self.t.size == self.u.size == self.v.size):
            raise ValueError("t, u, v must have equal length")
        if self.t.size < 1:
            raise ValueError("trajectory needs at least one sample")
        for name in ("t", "u", "v"):
            if not np.isfinite(getattr(self, name)).all():
                raise ValueError(f"non-finite values in {name}")
        steps = np.diff(self.t)
        if steps.size:
            if not (steps > 0).all():
                raise ValueError("t must be strictly increasing")
            interior = steps[:-1]
            if interior.size and np.abs(interior - self.h).max() > _SPACING_TOL:
                raise ValueError("interior spacing must equal h")
            if steps[-1] > self.h + 2 * _SPACING_TOL:
                raise ValueError("final step may not exceed h")

    def __len__(self):
        return self.t.size


@dataclass(frozen=True, eq=False)
class TransformedCurve:
    """Image of a trajectory under a finite generator flow exp(eps X).

    t_hat need not be uniformly spaced: lifted generators transform time
    non-uniformly.  source is the curve the flow started from.
    """

    t_hat: np.ndarray
    u_hat: np.ndarray
    v_hat: np.ndarray
    epsilon: float
    source: "Trajectory | TransformedCurve"

    def __post_init__(self):
        for name in ("t_hat", "u_hat", "v_hat"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
            if not np.isfinite(getattr(self, name)).all():
                raise ValueError(f"non-finite values in {name}")
        if not (self.t_hat.size == self.u_hat.size == self.v_hat.size):
            raise ValueError("t_hat, u_hat, v_hat must have equal length")

    @property
    def chart(self) -> str:
        return self.source.chart

    def __len__(self):
        return self.t_hat.size


# ---------------------------------------------------------------------------
# Scalar RK4 core (shared with characteristic lifting)


def _step_plan(t0: float, t1: float, h: float):
    """(full-step count, final partial step or None) covering [t0, t1]."""
    if h <= 0:
        raise ValueError("step h must be positive")
    total = t1 - t0
    if total < 0:
        raise ValueError("t_span must be ordered (t0 <= t1)")
    n_full = int(math.floor(total / h + 1e-9))
    h_last = t1 - (t0 + n_full * h)
    return n_full, (h_last if h_last > _SPACING_TOL else None)


def _rk4_step(f, t: float, state: tuple, h: float) -> tuple:
    k1 = f(t, state)
    s2 = tuple(x + 0.5 * h * k for x, k in zip(state, k1))
    k2 = f(t + 0.5 * h, s2)
    s3 = tuple(x + 0.5 * h * k for x, k in zip(state, k2))
    k3 = f(t + 0.5 * h, s3)
    s4 = tuple(x + h * k for x, k in zip(state, k3))
    k4 = f(t + h, s4)
    return tuple(
        x + (h / 6.0) * (a + 2.0 * (b + c) + d)
        for x, a, b, c, d in zip(state, k1, k2, k3, k4)
    )


def _integrate_path(f, state0: tuple, t0: float, t1: float, h: float):
    """All RK4 samples of d(state)/dt = f(t, state) over [t0, t1].

    Returns (t array, list of state tuples).  Raises DomainError naming the
    first bad t when the right-hand side fails or produces non-finite values.
    """
    n_full, h_last = _step_plan(t0, t1, h)
    ts = [t0]
    states = [tuple(float(x) for x in state0)]
    state = states[0]
    plan = [(t0 + k * h, h) for k in range(n_full)]
    if h_last is not None:
        plan.append((t0 + n_full * h, h_last))
    for t, step in plan:
        try:
            state = _rk4_step(f, t, state, step)
        except DomainError as exc:
            raise DomainError(f"{exc} (integration failed near t={t!r})") from exc
        except (ArithmeticError, ValueError) as exc:
            raise DomainError(f"integration failed near t={t!r}: {exc}") from exc
        if not all(math.isfinite(x) for x in state):
            raise DomainError(f"non-finite state at t={t + step!r}")
        ts.append(t + step)
        states.append(state)
    if ts:
        ts[-1] = t1  # land exactly on the requested endpoint
    return np.asarray(ts, dtype=float), states


def integrate_system(s: System2D, initial, t_span, h: float) -> Trajectory:
    """Fixed-step RK4 trajectory of the system from the given initial state."""
    f_u = compile_scalar(s.omega_u, ("u", "v"))
    f_v = compile_scalar(s.omega_v, ("u", "v"))

    def f(_t, state):
        u, v = state
        return (f_u(u, v), f_v(u, v))

    t0, t1 = float(t_span[0]), float(t_span[1])
    ts, states = _integrate_path(f, (initial[0], initial[1]), t0, t1, h)
    us = np.fromiter((st[0] for st in states), dtype=float, count=len(states))
    vs = np.fromiter((st[1] for st in states), dtype=float, count=len(states))
    return Trajectory(ts, us, vs, h, s.chart)


# ---------------------------------------------------------------------------
# Exponential maps


def _curve_columns(curve):
    if isinstance(curve, TransformedCurve):
        return curve.t_hat, curve.u_hat, curve.v_hat
    return curve.t, curve.u, curve.v


def _signed_plan(epsilon: float, h_eps: float):
    n_full, h_last = _step_plan(0.0, abs(epsilon), h_eps)
    sign = 1.0 if epsilon >= 0 else -1.0
    steps = [sign * h_eps] * n_full
    if h_last is not None:
        steps.append(sign * h_last)
    return steps


def exp_map_time(
    x: TimeGenerator, curve, epsilon: float, h_eps: float = 1e-3
) -> TransformedCurve:
    """Flow every sample of a curve by exp(epsilon X) in parallel.

    Each sample point (t, u, v) moves along d(t,u,v)/d eps = (xi, eta_u,
    eta_v), integrated with RK4 in eps.  Raises DomainError naming the first
    failing sample index and the eps reached.
    """
    if x.chart is not None and x.chart != curve.chart:
        raise ChartMismatchError(
            f"generator chart '{x.chart}' does not match curve chart '{curve.chart}'"
        )
    cols = ("t", "u", "v")
    f_t = compile_vector(x.xi, cols)
    f_u = compile_vector(x.eta_u, cols)
    f_v = compile_vector(x.eta_v, cols)

    def f(state):
        return (f_t(*state), f_u(*state), f_v(*state))

    t, u, v = _curve_columns(curve)
    state = (t.copy(), u.copy(), v.copy())
    reached = 0.0
    for step in _signed_plan(epsilon, h_eps):
        state = _rk4_vec_step(f, state, step)
        reached += step
        bad = ~(
            np.isfinite(state[0]) & np.isfinite(state[1]) & np.isfinite(state[2])
        )
        if bad.any():
            i = int(np.argmax(bad))
            raise DomainError(
                f"flow failed at sample index {i} (epsilon={reached!r})"
            )
    return TransformedCurve(state[0], state[1], state[2], float(epsilon), curve)


def _rk4_vec_step(f, state: tuple, h: float) -> tuple:
    k1 = f(state)
    s2 = tuple(x + 0.5 * h * k for x, k in zip(state, k1))
    k2 = f(s2)
    s3 = tuple(x + 0.5 * h * k for x, k in zip(state, k2))
    k3 = f(s3)
    s4 = tuple(x + h * k for x, k in zip(state, k3))
    k4 = f(s4)
    return tuple(
        x + (h / 6.0) * (a + 2.0 * (b + c) + d)
        for x, a, b, c, d in zip(state, k1, k2, k3, k4)
    )


def exp_map_phase(y: PhaseGenerator, point, epsilon: float, h_eps: float = 1e-3) -> tuple:
    """Flow a single phase point by exp(epsilon Y)."""
    f_u = compile_scalar(y.zeta_u, ("u", "v"))
    f_v = compile_scalar(y.zeta_v, ("u", "v"))
    sign = 1.0 if epsilon >= 0 else -1.0

    def f(_s, state):
        u, v = state
        return (sign * f_u(u, v), sign * f_v(u, v))

    _, states = _integrate_path(f, (point[0], point[1]), 0.0, abs(epsilon), h_eps)
    return states[-1]


# ---------------------------------------------------------------------------
# Preservation check and resampling


def solution_preservation_check(s: System2D, tc: TransformedCurve) -> ResidualReport:
    """Are the transformed samples still a solution curve of the system?

    Central second-order finite differences of (u_hat, v_hat) with respect to
    t_hat on the (possibly non-uniform) grid, compared against the system
    right-hand side.  Requires strictly monotone t_hat.
    """
    t, u, v = tc.t_hat, tc.u_hat, tc.v_hat
    if t.size < 3:
        raise ValueError("need at least three samples for the central stencil")
    dt = np.diff(t)
    if not ((dt > 0).all() or (dt < 0).all()):
        raise DomainError("transformed time is not strictly monotone; cannot differentiate")
    h1 = t[1:-1] - t[:-2]
    h2 = t[2:] - t[1:-1]
    per = {}
    worst = (-1.0, None)
    mid = slice(1, -1)
    for label, values, omega in (("res_u", u, s.omega_u), ("res_v", v, s.omega_v)):
        derivative = (
            -h2 / (h1 * (h1 + h2)) * values[:-2]
            + (h2 - h1) / (h1 * h2) * values[1:-1]
            + h1 / (h2 * (h1 + h2)) * values[2:]
        )
        rhs = compile_vector(omega, ("u", "v"))(u[mid], v[mid])
        gap = np.abs(derivative - rhs)
        if not np.isfinite(gap).all():
            i = int(np.argmax(~np.isfinite(gap)))
            raise DomainError(f"right-hand side not evaluable at t_hat={t[1 + i]!r}")
        i = int(np.argmax(gap))
        per[label] = float(gap[i])
        if gap[i] > worst[0]:
            worst = (float(gap[i]), (float(t[1 + i]), float(u[1 + i]), float(v[1 + i])))
    return ResidualReport(worst[0], worst[1], int(t.size - 2), per)


def resample_uniform(tc: TransformedCurve, h: float) -> Trajectory:
    """Monotone-cubic resample onto a uniform grid (for plotting).

    Shape-preserving interpolation; the tail shorter than h is dropped.
    """
    if h <= 0:
        raise ValueError("step h must be positive")
    t, u, v = tc.t_hat, tc.u_hat, tc.v_hat
    dt = np.diff(t)
    if not ((dt > 0).all() or (dt < 0).all()):
        raise DomainError("transformed time is not strictly monotone; cannot resample")
    if dt[0] < 0:
        t, u, v = t[::-1], u[::-1], v[::-1]
    interp_u = PchipInterpolator(t, u)
    interp_v = PchipInterpolator(t, v)
    n = int(math.floor((t[-1] - t[0]) / h + 1e-9))
    ts = t[0] + h * np.arange(n + 1)
    return Trajectory(ts, interp_u(ts), interp_v(ts), h, tc.chart)
