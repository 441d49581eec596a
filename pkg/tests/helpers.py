"""Shared builders for randomized property tests (seeded, no frameworks)."""

from phasesym.expr import Constant, Mul, Pow, Variable, simplify
from phasesym.jets import JetPointTime, PhaseGenerator, TimeGenerator


def random_polynomial(rng, names=("u", "v"), degree=3, keep=0.5):
    """Random bivariate polynomial of total degree <= degree.

    Coefficients are rounded uniforms in [-2, 2]; each monomial is kept with
    probability `keep`.  May degenerate to the zero polynomial.
    """
    first, second = Variable(names[0]), Variable(names[1])
    tree = Constant(0.0)
    for i in range(degree + 1):
        for j in range(degree + 1 - i):
            if rng.random() > keep:
                continue
            coeff = round(float(rng.uniform(-2.0, 2.0)), 3)
            term = Constant(coeff)
            if i:
                term = Mul(term, first if i == 1 else Pow(first, Constant(float(i))))
            if j:
                term = Mul(term, second if j == 1 else Pow(second, Constant(float(j))))
            tree = tree + term
    return simplify(tree)


def random_time_generator(rng, with_t_in_xi=False):
    """Random polynomial time-domain generator with t-free eta."""
    xi = random_polynomial(rng)
    if with_t_in_xi:
        xi = simplify(xi + Mul(Variable("t"), random_polynomial(rng, degree=2)))
    return TimeGenerator(xi, random_polynomial(rng), random_polynomial(rng))


def random_phase_generator(rng):
    return PhaseGenerator(random_polynomial(rng), random_polynomial(rng))


def random_jet_time(rng, min_udot=0.1):
    """Random J5 point with |udot| bounded away from zero."""
    while True:
        udot = float(rng.uniform(-2.0, 2.0))
        if abs(udot) >= min_udot:
            break
    return JetPointTime(
        float(rng.uniform(-1.0, 1.0)),
        float(rng.uniform(-2.0, 2.0)),
        float(rng.uniform(-2.0, 2.0)),
        udot,
        float(rng.uniform(-2.0, 2.0)),
    )
