"""Push-forward of time-domain generators to the phase plane.

The reduction map sends (t,u,v,udot,vdot) to (u,v,vdot/udot).  Prolonged
time-domain generators push forward to well-defined phase-plane jet fields,
and the push-forward of a prolongation equals the prolongation of the
push-forward; verify_commutation measures that identity pointwise.
"""

from __future__ import annotations

import numpy as np

from .expr import DomainError, compile_vector
from .expr import eval as _eval
from .jets import (
    JetPointTime,
    PhaseGenerator,
    System2D,
    TimeGenerator,
    prolong_phase,
    prolong_time,
    require_same_chart,
)
from .verify import ResidualReport

__all__ = [
    "pushforward",
    "pushforward_prolonged_numeric",
    "verify_commutation",
    "sample_jets",
]

DEFAULT_JET_SEED = 20260823

_J5 = ("t", "u", "v", "udot", "vdot")


def pushforward(x: TimeGenerator) -> PhaseGenerator:
    """Drop the time tangent: f_* X = eta_u d_u + eta_v d_v."""
    return PhaseGenerator(x.eta_u, x.eta_v, chart=x.chart)


def pushforward_prolonged_numeric(x: TimeGenerator, s: System2D, j: JetPointTime) -> tuple:
    """Push the prolonged generator through the reduction map at one jet.

    Returns the (d_u, d_v, d_vprime) components at the image point
    (u, v, vdot/udot); the jet need not lie on the solution variety.
    """
    require_same_chart(s, x)
    if abs(j.udot) < 1e-12:
        raise DomainError(f"reduction map undefined where udot vanishes (udot={j.udot!r})")
    p = prolong_time(x, s)
    b = j.bindings()
    eta_u1 = _eval(p.eta_u1, b)
    eta_v1 = _eval(p.eta_v1, b)
    vprime = j.vdot / j.udot
    return (
        _eval(x.eta_u, b),
        _eval(x.eta_v, b),
        (-vprime * eta_u1 + eta_v1) / j.udot,
    )


def verify_commutation(
    x: TimeGenerator,
    s: System2D,
    jets,
    min_udot: float = 1e-9,
) -> ResidualReport:
    """Max difference between f_*(X^(1)) and (f_*X)^(1) over sampled jets.

    The identity is exact and pointwise in the full jet space, so residuals
    are pure rounding noise for any autonomous-eta generator.
    """
    require_same_chart(s, x)
    jets = list(jets)
    if not jets:
        raise ValueError("need at least one jet point")
    cols = tuple(
        np.array([getattr(j, name) for j in jets], dtype=float) for name in _J5
    )
    ts, us, vs, udots, vdots = cols
    small = np.abs(udots) < min_udot
    if small.any():
        i = int(np.argmax(small))
        raise ValueError(
            f"jet {i} violates the |udot| >= {min_udot} threshold (udot={udots[i]!r})"
        )

    p = prolong_time(x, s)
    eta_u1 = compile_vector(p.eta_u1, _J5)(*cols)
    eta_v1 = compile_vector(p.eta_v1, _J5)(*cols)
    vprime = vdots / udots
    pushed = (
        compile_vector(x.eta_u, _J5)(*cols),
        compile_vector(x.eta_v, _J5)(*cols),
        (-vprime * eta_u1 + eta_v1) / udots,
    )

    y = pushforward(x)
    z1 = prolong_phase(y)
    j3 = ("u", "v", "vprime")
    reduced = (
        compile_vector(y.zeta_u, j3)(us, vs, vprime),
        compile_vector(y.zeta_v, j3)(us, vs, vprime),
        compile_vector(z1, j3)(us, vs, vprime),
    )

    best_val, best_point, per = -1.0, None, {}
    for label, a, b in zip(("zeta_u", "zeta_v", "zeta_v1"), pushed, reduced):
        gap = np.abs(a - b)
        if not np.isfinite(gap).all():
            i = int(np.argmax(~np.isfinite(gap)))
            raise DomainError(f"commutation difference not evaluable at jet {jets[i]}")
        i = int(np.argmax(gap))
        per[label] = float(gap[i])
        if gap[i] > best_val:
            best_val = float(gap[i])
            best_point = (float(ts[i]), float(us[i]), float(vs[i]), float(udots[i]), float(vdots[i]))
    return ResidualReport(best_val, best_point, len(jets), per)


def sample_jets(
    n: int,
    seed: int = DEFAULT_JET_SEED,
    min_udot: float = 0.1,
    bound: float = 2.0,
) -> list:
    """Deterministic random jets with |udot| bounded away from zero."""
    rng = np.random.default_rng(seed)
    jets = []
    while len(jets) < n:
        udot = float(rng.uniform(-bound, bound))
        if abs(udot) < min_udot:
            continue
        jets.append(
            JetPointTime(
                float(rng.uniform(-1.0, 1.0)),
                float(rng.uniform(-bound, bound)),
                float(rng.uniform(-bound, bound)),
                udot,
                float(rng.uniform(-bound, bound)),
            )
        )
    return jets
