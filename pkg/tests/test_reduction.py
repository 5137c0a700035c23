from fractions import Fraction
from math import comb

import pytest

from conftest import P, SYSTEMS, rand_element, rand_poly, seeded
from telescoper.exact import POLY, RatFun, X, from_kx, to_kx
from telescoper.module import apply_Sx, delta_x, element, zero_element
from telescoper.reduction import (
    ap_reduce, build_NV, degree_bound, full_decompose, is_summable, normal_form,
    orbit_partial_fractions, remainder_form, shift_reduce_term,
)
from telescoper.shifts import is_shift_free_x


def term_element(S, term):
    den_num, den_den = from_kx(term.denominator)
    coeffs = []
    for c in term.numer:
        n, d = from_kx(c)
        coeffs.append(RatFun(n * den_den, d * den_num))
    return element(S, coeffs)


def poly_part_element(S, part):
    coeffs = []
    for c in part:
        n, d = from_kx(c)
        coeffs.append(RatFun(n, d))
    return element(S, coeffs)


def reassemble(f):
    part, terms = orbit_partial_fractions(f)
    total = poly_part_element(f.system, part)
    for term in terms:
        total = total + term_element(f.system, term)
    return total, part, terms


# partial fractions

def test_partial_fractions_textbook(trivial):
    f = element(trivial, ["1/(x*(x+1))"])
    total, part, terms = reassemble(f)
    assert total == f and not any(part)
    assert {(t.rep, t.shift, t.mult) for t in terms} == {(to_kx(X), 0, 1), (to_kx(X), 1, 1)}


def test_partial_fractions_double_pole(trivial):
    f = element(trivial, ["(x^2+t)/(x-t)^2"])
    total, part, terms = reassemble(f)
    assert total == f and any(part)
    assert max(t.mult for t in terms) == 2
    assert {t.rep for t in terms} == {to_kx(P("x - t"))}


@pytest.mark.parametrize("name", sorted(SYSTEMS))
def test_partial_fractions_reconstruct(name):
    S = SYSTEMS[name]()
    rng = seeded(107)
    for _ in range(100):
        f = rand_element(rng, S)
        assert reassemble(f)[0] == f


# shift reduction of one term

def test_shift_reduce_single_term(trivial):
    part, terms = orbit_partial_fractions(element(trivial, ["1/(x+1)"]))
    g, h = shift_reduce_term(terms[0], trivial)
    # 1/(x+1) = Delta_x(1/x) + 1/x
    assert g == element(trivial, ["1/x"]) and h == element(trivial, ["1/x"])


def test_shift_reduce_identity_at_representative(trivial):
    f = element(trivial, ["1/x"])
    _, terms = orbit_partial_fractions(f)
    g, h = shift_reduce_term(terms[0], trivial)
    assert g == zero_element(trivial) and h == f


def test_shift_reduce_rank_two(rank_two):
    f = element(rank_two, ["1/(x+t+1)", "x/(x+t+1)"])
    _, terms = orbit_partial_fractions(f)
    for term in terms:
        g, h = shift_reduce_term(term, rank_two)
        assert delta_x(g) + h == term_element(rank_two, term)
        allowed = P("(x+t)") ** term.mult * rank_two.e * rank_two.e_inv
        assert allowed.rem(h.u) == 0


# AP reduction and remainder form

def test_ap_reduce_examples(trivial, rank_two):
    g, h = ap_reduce(element(trivial, ["1/(x*(x+1))"]))
    assert remainder_form(h).d.degree() == 0 and not any(remainder_form(h).P)
    g, h = ap_reduce(element(rank_two, ["1", "0"], "x^2+t"))
    assert h.u == P("x^2 + t")


@pytest.mark.parametrize("name", sorted(SYSTEMS))
def test_reduction_reconstructs(name):
    S = SYSTEMS[name]()
    rng = seeded(109)
    for _ in range(200):
        f = rand_element(rng, S)
        g, h = ap_reduce(f)
        assert apply_Sx(g) - g + h == f
        assert is_shift_free_x(h.u)
        rf = remainder_form(f)
        assert delta_x(rf.certificate_g) + rf.residual() == f
        assert all(c.degree() < rf.d.degree() for c in rf.P if c)
        reps = POLY.one
        for q in S.orbit_reps:
            reps *= q
        assert is_shift_free_x(rf.d_poly * reps)


def test_remainder_form_examples(trivial):
    rf = remainder_form(zero_element(trivial))
    assert rf.d.degree() == 0 and not any(rf.P) and not any(rf.R)
    rf = remainder_form(element(trivial, ["(x^2+t)/(x-t)^2"]))
    assert rf.d_poly == P("(x-t)^2") and any(rf.P)


def test_ap_reduce_idempotent(all_systems):
    rng = seeded(113)
    for S in all_systems.values():
        for _ in range(30):
            _, h = ap_reduce(rand_element(rng, S))
            g2, h2 = ap_reduce(h)
            assert not g2 and h2 == h


# summability

def test_is_summable_examples(trivial):
    assert is_summable(element(trivial, ["1/(x*(x+1))"])) == element(trivial, ["-1/x"])
    assert is_summable(element(trivial, ["1/x"])) is None
    rf = remainder_form(element(trivial, ["1/x"]))
    assert rf.d_poly == X and any(rf.P)


@pytest.mark.parametrize("name", sorted(SYSTEMS))
def test_is_summable_on_differences(name):
    S = SYSTEMS[name]()
    rng = seeded(127)
    for _ in range(200):
        w = rand_element(rng, S)
        f = delta_x(w)
        g = is_summable(f)
        assert g is not None and apply_Sx(g) - g == f
        fd = full_decompose(f)
        assert not any(fd.P) and not any(fd.Q)
        rf = remainder_form(f)
        assert rf.d.degree() == 0 and not any(rf.P)


def test_summable_residual_has_polynomial_certificate(all_systems):
    # if an AP residual h is summable then its denominator divides e and
    # the certificate is polynomial
    rng = seeded(131)
    for S in all_systems.values():
        for _ in range(30):
            _, h = ap_reduce(delta_x(rand_element(rng, S)))
            g = is_summable(h)
            assert g is not None
            assert S.e.rem(h.u) == 0
            assert g.u.is_ground


def _sum_check(f, g, weight, rng, points=20):
    done = 0
    attempts = 0
    while done < points and attempts < 500:
        attempts += 1
        t0 = rng.randint(6, 30)
        a = rng.randint(0, 3)
        b = rng.randint(a, t0 - 2)
        try:
            total = sum((f.evaluate(t0, x) * weight(t0, x) for x in range(a, b + 1)), Fraction(0))
            closed = g.evaluate(t0, b + 1) * weight(t0, b + 1) - g.evaluate(t0, a) * weight(t0, a)
        except ZeroDivisionError:
            continue
        assert total == closed
        done += 1
    assert done == points


def test_numeric_telescoping_sum_rational(trivial):
    rng = seeded(137)
    for _ in range(10):
        w = rand_element(rng, trivial)
        f = delta_x(w)
        g = is_summable(f)
        _sum_check(f.coefficients()[0], g.coefficients()[0], lambda t, x: 1, rng)


def test_numeric_telescoping_sum_binomial_cubes(cubed_binomial):
    rng = seeded(139)
    for _ in range(10):
        f = delta_x(rand_element(rng, cubed_binomial, max_factors=1))
        g = is_summable(f)
        _sum_check(f.coefficients()[0], g.coefficients()[0],
                   lambda t, x: Fraction(comb(t, x)) ** 3, rng)


# polynomial part: degree bound and N_V

def test_nv_dimensions(trivial, cubed_binomial, rank_two):
    assert build_NV(trivial).dim == 0
    nv = build_NV(cubed_binomial)
    assert nv.dim >= 1
    assert is_summable(element(cubed_binomial, ["1"])) is None
    assert build_NV(rank_two).dim == 2


def test_nv_window(all_systems):
    for S in all_systems.values():
        nv = build_NV(S)
        assert nv.mu == min([-t for t in S.tau] + [0])
        assert S.e.rem(nv.a.num) == 0 or nv.a.num.rem(S.e) == 0


def test_image_elements_reduce_to_zero(all_systems):
    for S in all_systems.values():
        for i in range(S.r):
            for j in range(5):
                coeffs = [POLY.zero] * S.r
                coeffs[i] = X ** j
                f = delta_x(element(S, coeffs))
                fd = full_decompose(f)
                assert fd.is_zero_remainder()
                assert delta_x(fd.certificate_g) == f


def test_normal_form_is_canonical(all_systems):
    # R and R + (image of Delta_x on polynomials) share a normal form
    rng = seeded(149)
    for S in all_systems.values():
        for _ in range(20):
            R = tuple(to_kx(rand_poly(rng, dx=3, dt=1)) for _ in range(S.r))
            nf, _ = normal_form(S, R)
            w = element(S, [rand_poly(rng, dx=2, dt=1) for _ in range(S.r)])
            img = delta_x(w)
            # img = (1/e) R' W with R' polynomial in x
            e_kx = to_kx(S.e)
            shift = []
            for c in img.coefficients():
                v = to_kx(c.num) * e_kx
                q, r = divmod(v, to_kx(c.den))
                assert not r
                shift.append(q)
            nf2, _ = normal_form(S, tuple(a + b for a, b in zip(R, shift)))
            assert nf == nf2
            nf3, _ = normal_form(S, nf)
            assert nf3 == nf


def test_degree_bound_monotone(all_systems):
    for S in all_systems.values():
        bounds = [degree_bound(S, D) for D in range(0, 8)]
        assert all(b >= -1 for b in bounds)
        assert bounds == sorted(bounds)


def test_full_decompose_examples(trivial, rank_two):
    fd = full_decompose(zero_element(trivial))
    assert fd.is_zero_remainder() and not any(fd.Q)
    fd = full_decompose(element(trivial, ["1/(x^2+t)"]))
    assert any(fd.P)
    fd = full_decompose(element(rank_two, ["1", "0"], "x^2+t"))
    assert any(fd.P)


def test_full_decompose_reconstructs(all_systems):
    # f = Delta_x(g) + (1/d) P W + (1/a) Q V with V_i = x^tau_i W_i
    rng = seeded(151)
    for S in all_systems.values():
        for _ in range(30):
            f = rand_element(rng, S)
            fd = full_decompose(f)
            dn, dd = from_kx(fd.d)
            coeffs = []
            for i in range(S.r):
                pn, pd = from_kx(fd.P[i])
                xp = RatFun(X ** S.tau[i], POLY.one) if S.tau[i] >= 0 else \
                    RatFun(POLY.one, X ** -S.tau[i])
                coeffs.append(RatFun(pn * dd, pd * dn) + fd.Q[i] / RatFun(fd.a, POLY.one) * xp)
            assert delta_x(fd.certificate_g) + element(S, coeffs) == f


def test_canonical_representative_is_orbit_invariant():
    from telescoper.reduction import _canonical_rep
    rng = seeded(157)
    for _ in range(200):
        base = rand_poly(rng, dx=0, dt=2, lo=-5, hi=5)
        deg = rng.randint(1, 3)
        p = to_kx(rng.choice([1, 2, 3]) * X ** deg + base * X ** (deg - 1)
                  + rand_poly(rng, dx=max(deg - 2, 0), dt=1)).monic()
        c = _canonical_rep(p)
        assert _canonical_rep(c) == c
        assert _canonical_rep(p.shift(rng.randint(-5, 5))) == c
