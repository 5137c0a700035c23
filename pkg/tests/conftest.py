import random

import pytest

from telescoper.exact import POLY, T, X, parse_poly
from telescoper.module import build_system, element


def make_trivial():
    return build_system(1, "1", [["1"]], "1", [["1"]])


def make_cubed_binomial():
    # W = binom(t, x)^3
    return build_system(1, "(1+x)^3", [["(t-x)^3"]], "(1+t-x)^3", [["(1+t)^3"]],
                        orbit_reps=["x+1", "x-t"])


def make_rank_two():
    return build_system(
        2, "(x+2)*(t^2-1)^2",
        [["(x+t^2)*(x+2)*(t^2-1)", "(x^2+(t^2+1)*x+1)*(x+2)*(t^2-1)^2"],
         ["-x-1", "-(x^2+2*x-t^2+2)*(t^2-1)"]],
        "t*(t+2)*(t^2-1)",
        [["t^2*(t+2)^2", "t*(x+1)*(2*t+1)*(t+2)*(t^2-1)"], ["0", "(t^2-1)^2"]],
        orbit_reps=["x+2", "x^2+(t^2+1)*x+1"],
    )


SYSTEMS = {
    "trivial": make_trivial,
    "cubed_binomial": make_cubed_binomial,
    "rank_two": make_rank_two,
}


@pytest.fixture(scope="session")
def trivial():
    return make_trivial()


@pytest.fixture(scope="session")
def cubed_binomial():
    return make_cubed_binomial()


@pytest.fixture(scope="session")
def rank_two():
    return make_rank_two()


@pytest.fixture(scope="session")
def all_systems():
    return {name: make() for name, make in SYSTEMS.items()}


def rand_poly(rng, dx=2, dt=2, lo=-3, hi=3, density=0.6):
    """Random polynomial in Q[t, x] with small integer coefficients."""
    p = POLY.zero
    for i in range(dx + 1):
        for j in range(dt + 1):
            if rng.random() < density:
                p += rng.randint(lo, hi) * X ** i * T ** j
    return p


def rand_nonzero_poly(rng, **kw):
    while True:
        p = rand_poly(rng, **kw)
        if p:
            return p


def rand_linear_factor(rng):
    """A random integer-linear factor ``m*t + n*x + c`` with ``n != 0``."""
    n = rng.choice([1, 1, 1, 2, -1])
    m = rng.randint(-2, 2)
    return n * X + m * T + rng.randint(-3, 3)


def rand_element(rng, system, max_factors=2, dx=2, dt=1):
    """Random element with an integer-linear denominator."""
    a = [rand_poly(rng, dx=dx, dt=dt) for _ in range(system.r)]
    if not any(a):
        a[0] = POLY.one
    u = POLY.one
    for _ in range(rng.randint(0, max_factors)):
        u *= rand_linear_factor(rng)
    return element(system, a, u)


def seeded(seed):
    return random.Random(seed)


def P(text):
    return parse_poly(text)
