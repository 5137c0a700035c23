"""Acceptance criteria, one test per criterion.

Each test prints a single ``[PASS]``/``[FAIL]`` line with its timing.  Run
``pytest tests/test_acceptance.py -v`` or execute this file directly.
"""

import time
from fractions import Fraction
from math import comb

import pytest

from conftest import (
    P, SYSTEMS, make_cubed_binomial, make_rank_two, make_trivial, rand_element, seeded,
)
from telescoper.cli import corpus_path, load_problem, parse_problem
from telescoper.exact import POLY, UZ, RatFun, shift_poly, to_kx
from telescoper.module import (
    apply_Sx, check_compatibility, check_suitable_properties, delta_x, element,
)
from telescoper.reduction import ap_reduce, is_summable, remainder_form
from telescoper.shifts import (
    OrbitExponent, integer_linear_decompose, norm, norm_star, shift_equivalent_x,
)
from telescoper.telescoping import (
    NoTelescoperExists, apply_operator, compute_telescoper, decide_existence,
    verify_telescoper,
)

T_RATIONAL = ["-(t^2 + 3*t + 2)", "2*t^2 + 4*t", "-(t^2 + t)"]
T_BINOMIAL = ["-8*(t + 1)^2", "-(7*t^2 + 21*t + 16)", "(t + 2)^2"]
T_RANK_TWO = ["3*t^3 + 9*t^2 + 8*t", "-(6*t^3 + 15*t^2 + 13*t + 2)",
              "3*t^3 + 3*t^2 - 4*t - 6", "3*t^2 + 3*t + 2"]


def report(capsys, number, title, ok, seconds, limit=None, detail=""):
    timing = f"{seconds:.2f}s" + (f" (limit {limit:g}s)" if limit else "")
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} {timing} {detail}".rstrip()
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)
    return ok


def _timed(fn):
    start = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - start


def source_operator_checks(coeffs, f):
    g = is_summable(apply_operator(coeffs, f))
    return g is not None and verify_telescoper(coeffs, f, g)


# 1. rational example with a double pole

def criterion_1():
    def run():
        f = element(make_trivial(), ["(x^2 + t)/(x - t)^2"])
        exists = decide_existence(f).verdict == "exists"
        T = compute_telescoper(f)
        found = T.order <= 2 and verify_telescoper(T.coeffs, f, T.certificate)
        return exists and found and source_operator_checks(T_RATIONAL, f), T.order
    (ok, order), secs = _timed(run)
    return ok and secs < 5, secs, 5, f"order={order}"


def test_criterion_1(capsys):
    ok, secs, limit, detail = criterion_1()
    assert report(capsys, 1, "rational example exists, telescoper order <= 2", ok, secs, limit,
                  detail)


# 2. rational example with a non-linear denominator

def criterion_2():
    def run():
        v = decide_existence(element(make_trivial(), ["1/(x^2 + t)"]))
        return v.verdict == "not_exists" and v.stem == P("x^2 + t")
    ok, secs = _timed(run)
    return ok and secs < 5, secs, 5, "stem=x^2 + t"


def test_criterion_2(capsys):
    ok, secs, limit, detail = criterion_2()
    assert report(capsys, 2, "rational example has no telescoper", ok, secs, limit, detail)


# 3. cubes of binomial coefficients

def criterion_3():
    def run():
        f = element(make_cubed_binomial(), ["1"])
        T = compute_telescoper(f)
        found = T.order <= 2 and verify_telescoper(T.coeffs, f, T.certificate)
        return found and source_operator_checks(T_BINOMIAL, f), T.order
    (ok, order), secs = _timed(run)
    return ok and secs < 10, secs, 10, f"order={order}"


def test_criterion_3(capsys):
    ok, secs, limit, detail = criterion_3()
    assert report(capsys, 3, "binomial cubes telescoper order <= 2", ok, secs, limit, detail)


# 4. rank-two module, proper element

def criterion_4():
    def run():
        f = element(make_rank_two(), ["1", "0"], "x + t")
        T = compute_telescoper(f)
        found = T.order <= 3 and verify_telescoper(T.coeffs, f, T.certificate)
        lead = RatFun.coerce(T_RANK_TWO[-1]) == RatFun.coerce("3*t^2 + 3*t + 2")
        return found and lead and source_operator_checks(T_RANK_TWO, f), T.order
    (ok, order), secs = _timed(run)
    return ok and secs < 60, secs, 60, f"order={order}"


def test_criterion_4(capsys):
    ok, secs, limit, detail = criterion_4()
    assert report(capsys, 4, "rank-two telescoper order <= 3", ok, secs, limit, detail)


# 5. rank-two module, non-linear denominator

def criterion_5():
    def run():
        f = element(make_rank_two(), ["1", "0"], "x^2 + t")
        v = decide_existence(f)
        try:
            compute_telescoper(f)
            refused = False
        except NoTelescoperExists:
            refused = True
        return v.verdict == "not_exists" and v.stem == P("x^2 + t") and refused
    ok, secs = _timed(run)
    return ok and secs < 10, secs, 10, "stem=x^2 + t"


def test_criterion_5(capsys):
    ok, secs, limit, detail = criterion_5()
    assert report(capsys, 5, "rank-two example has no telescoper", ok, secs, limit, detail)


# 6. compatibility and suitability diagnostics

def criterion_6():
    def run():
        oks = []
        for make in SYSTEMS.values():
            S = make()
            rep = check_suitable_properties(S)
            oks.append(check_compatibility(S)[0] and rep.all_ok
                       and all(v for _, v in rep.details))
        S = make_rank_two()
        oks.append(S.e == P("(x+2)*(t^2-1)^2") and S.det_M == P("(t^2-1)^4*(x+2)"))
        return all(oks)
    ok, secs = _timed(run)
    return ok, secs, None, "3 systems"


def test_criterion_6(capsys):
    ok, secs, limit, detail = criterion_6()
    assert report(capsys, 6, "compatibility and suitability of all systems", ok, secs, limit,
                  detail)


# 7. property suites

CASES = 201


def _systems():
    return [make() for make in SYSTEMS.values()]


def prop_reconstruction():
    rng = seeded(701)
    systems = _systems()
    for i in range(CASES):
        S = systems[i % 3]
        f = rand_element(rng, S)
        g, h = ap_reduce(f)
        if apply_Sx(g) - g + h != f:
            return False
        rf = remainder_form(f)
        if delta_x(rf.certificate_g) + rf.residual() != f:
            return False
    return True


def prop_summable_differences():
    rng = seeded(702)
    systems = _systems()
    for i in range(CASES):
        S = systems[i % 3]
        f = delta_x(rand_element(rng, S))
        g = is_summable(f)
        if g is None or apply_Sx(g) - g != f:
            return False
    return True


def prop_norm():
    rng = seeded(703)

    def rand_xi():
        return OrbitExponent({rng.randint(-4, 4): rng.randint(0, 4)
                              for _ in range(rng.randint(0, 5))})

    for _ in range(CASES):
        a, b = rand_xi(), rand_xi()
        if norm(a + b) > norm(a) + norm(b):
            return False
        n, j, s = rng.randint(1, 4), rng.randint(-4, 4), rng.randint(0, 6)
        if norm(a.shift(n * j)) != norm(a):
            return False
        total = OrbitExponent()
        for k in range(s + 1):
            total = total + a.shift(n * k)
        if norm(total) > norm_star(a):
            return False
    return True


def prop_decompose():
    rng = seeded(704)
    z = UZ.gens[0]
    nonlinear = [P("x^2 + t"), P("x*t + 1"), P("x^2 + t^2 + 1")]
    for _ in range(CASES):
        q = POLY(rng.choice([1, -2, 3]))
        for _ in range(rng.randint(0, 3)):
            m, n = rng.randint(-2, 2), rng.randint(0, 2)
            if (m, n) == (0, 0):
                n = 1
            h = z ** rng.randint(1, 2) + rng.randint(-3, 3)
            lin = m * P("t") + n * P("x")
            base = POLY.zero
            for (k,), c in h.terms():
                base += POLY(c) * lin ** k
            q *= base * shift_poly(base, rng.randint(-2, 2), rng.randint(-2, 2))
        if rng.random() < 0.5:
            q *= rng.choice(nonlinear)
        if integer_linear_decompose(q).expand() != q:
            return False
    return True


def prop_shift_equivalence():
    rng = seeded(705)
    bases = [P("x - t"), P("x^2 + t"), P("x^2 + t*x + 1"), P("x^3 - t"), P("2*x + t")]
    for _ in range(CASES):
        p = rng.choice(bases)
        q = shift_poly(rng.choice(bases) if rng.random() < 0.3 else p,
                       rng.randint(0, 1) if rng.random() < 0.3 else 0, rng.randint(-6, 6))
        target = to_kx(q).monic()
        brute = next((k for k in range(-12, 13)
                      if to_kx(shift_poly(p, 0, k)).monic() == target), None)
        if shift_equivalent_x(p, q) != brute:
            return False
    return True


def prop_numeric_sums():
    rng = seeded(706)
    checks = 0
    cases = [(make_trivial(), lambda t, x: Fraction(1)),
             (make_cubed_binomial(), lambda t, x: Fraction(comb(t, x)) ** 3)]
    for S, weight in cases:
        for _ in range(10):
            f = delta_x(rand_element(rng, S, max_factors=1))
            g = is_summable(f)
            if g is None:
                return False
            fc, gc = f.coefficients()[0], g.coefficients()[0]
            done = 0
            while done < 20:
                t0 = rng.randint(6, 30)
                a = rng.randint(0, 3)
                b = rng.randint(a, t0 - 2)
                try:
                    total = sum((fc.evaluate(t0, x) * weight(t0, x) for x in range(a, b + 1)),
                                Fraction(0))
                    closed = (gc.evaluate(t0, b + 1) * weight(t0, b + 1)
                              - gc.evaluate(t0, a) * weight(t0, a))
                except ZeroDivisionError:
                    continue
                if total != closed:
                    return False
                done += 1
                checks += 1
    return checks >= 200


PROPERTIES = [
    ("7a", "reduction reconstruction", prop_reconstruction),
    ("7b", "summability of differences", prop_summable_differences),
    ("7c", "norm inequalities", prop_norm),
    ("7d", "integer-linear decomposition reconstruction", prop_decompose),
    ("7e", "shift equivalence vs brute force", prop_shift_equivalence),
    ("7f", "numeric telescoping sums", prop_numeric_sums),
]


@pytest.mark.parametrize("label, title, prop", PROPERTIES, ids=[p[0] for p in PROPERTIES])
def test_criterion_7(capsys, label, title, prop):
    ok, secs = _timed(prop)
    assert report(capsys, label, title, ok, secs)


# 8. decision agrees with search

def criterion_8():
    def run():
        inputs = []
        for name in ["proper1", "proper1b", "proper2", "proper3", "proper3b"]:
            inputs.append(load_problem(parse_problem(corpus_path(f"{name}.prob")))[1])
        rng = seeded(801)
        systems = _systems()
        for i in range(50):
            inputs.append(rand_element(rng, systems[i % 3], max_factors=1, dx=1))
        agree = 0
        for f in inputs:
            exists = decide_existence(f).exists
            try:
                T = compute_telescoper(f)
                found = verify_telescoper(T.coeffs, f, T.certificate)
            except NoTelescoperExists:
                found = False
            agree += exists == found
        return agree == len(inputs), agree, len(inputs)
    (ok, agree, total), secs = _timed(run)
    return ok, secs, None, f"{agree}/{total} agree"


def test_criterion_8(capsys):
    ok, secs, limit, detail = criterion_8()
    assert report(capsys, 8, "existence decision agrees with telescoper search", ok, secs, limit,
                  detail)


if __name__ == "__main__":
    for number, crit in [(1, criterion_1), (2, criterion_2), (3, criterion_3),
                         (4, criterion_4), (5, criterion_5), (6, criterion_6)]:
        ok, secs, limit, detail = crit()
        report(None, number, crit.__name__, ok, secs, limit, detail)
    for label, title, prop in PROPERTIES:
        ok, secs = _timed(prop)
        report(None, label, title, ok, secs)
    ok, secs, limit, detail = criterion_8()
    report(None, 8, "decision/search agreement", ok, secs, limit, detail)
