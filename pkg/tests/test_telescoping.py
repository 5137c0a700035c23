import pytest

from conftest import P, rand_element, seeded
from telescoper.exact import RatFun
from telescoper.module import apply_St, build_system, element
from telescoper.reduction import build_NV, is_summable
from telescoper.telescoping import (
    NoTelescoperExists, NotProper, apply_operator, compute_telescoper, decide_existence,
    is_proper, is_spread_diagnostic, order_bound, stem, verify_telescoper,
)

# telescopers as printed in the source examples
T_RATIONAL = ["-(t^2 + 3*t + 2)", "2*t^2 + 4*t", "-(t^2 + t)"]
T_BINOMIAL = ["-8*(t + 1)^2", "-(7*t^2 + 21*t + 16)", "(t + 2)^2"]
T_RANK_TWO = ["3*t^3 + 9*t^2 + 8*t", "-(6*t^3 + 15*t^2 + 13*t + 2)",
              "3*t^3 + 3*t^2 - 4*t - 6", "3*t^2 + 3*t + 2"]


@pytest.fixture(scope="module")
def rational_f(trivial):
    return element(trivial, ["(x^2 + t)/(x - t)^2"])


@pytest.fixture(scope="module")
def rational_g(trivial):
    return element(trivial, ["1/(x^2 + t)"])


@pytest.fixture(scope="module")
def binomial_f(cubed_binomial):
    return element(cubed_binomial, ["1"])


@pytest.fixture(scope="module")
def rank_two_f(rank_two):
    return element(rank_two, ["1", "0"], "x + t")


@pytest.fixture(scope="module")
def rank_two_g(rank_two):
    return element(rank_two, ["1", "0"], "x^2 + t")


# stems and properness

def test_stem_examples(trivial, rational_f, rational_g, binomial_f, rank_two_g):
    assert stem(rational_f).stem == 1 and stem(rational_f).linear_part == P("(x - t)^2")
    assert stem(rational_g).stem == P("x^2 + t")
    assert stem(element(trivial, ["1"])).stem == 1
    assert is_proper(rational_f) and is_proper(binomial_f)
    assert not is_proper(rank_two_g)


def test_stem_times_linear_part_is_denominator():
    rng = seeded(163)
    from conftest import make_trivial
    S = make_trivial()
    for _ in range(100):
        f = rand_element(rng, S)
        extra = rng.choice([P("1"), P("x^2 + t"), P("x*t + 1")])
        f = element(S, [RatFun(f.a[0], f.u * extra)])
        st = stem(f)
        assert st.stem * st.linear_part == f.u
        assert (st.stem == 1) == (extra == 1 or not f.a[0])


# existence

def test_existence_examples(rational_f, rational_g, binomial_f, rank_two_f, rank_two_g):
    assert decide_existence(rational_f).verdict == "exists"
    v = decide_existence(rational_g)
    assert v.verdict == "not_exists" and v.stem == P("x^2 + t")
    assert decide_existence(binomial_f).exists
    assert decide_existence(rank_two_f).exists
    v = decide_existence(rank_two_g)
    assert not v.exists and v.stem == P("x^2 + t")


def test_existence_evidence_reconstructs(rank_two_g):
    from telescoper.module import delta_x
    v = decide_existence(rank_two_g)
    assert delta_x(v.certificate) + v.residual == rank_two_g


def test_shifted_non_linear_denominator_is_reduced_first(trivial):
    # 1/(x^2+t) - 1/((x+1)^2+t) is summable, so a telescoper (T = 1) exists
    f = element(trivial, ["1/(x^2 + t) - 1/((x+1)^2 + t)"])
    assert decide_existence(f).exists
    assert compute_telescoper(f).order == 0


# order bound

def test_order_bound_examples(trivial, rational_f, binomial_f):
    b = order_bound(rational_f)
    assert b.bound >= 2
    b = order_bound(element(trivial, ["x^2 + t"]))
    assert (b.k, b.b, b.bound) == (0, 1, build_NV(trivial).dim)
    assert order_bound(binomial_f).bound >= 2


def test_order_bound_rejects_improper(rational_g):
    with pytest.raises(NotProper):
        order_bound(rational_g)


# operators

def test_apply_operator_basics(trivial, rational_f):
    assert apply_operator(["1"], rational_f) == rational_f
    f = element(trivial, ["1/(x^2 + 3)"])
    assert not apply_operator(["-1", "1"], f)


def test_source_telescopers_are_telescopers(rational_f, binomial_f, rank_two_f):
    for coeffs, f in [(T_RATIONAL, rational_f), (T_BINOMIAL, binomial_f),
                      (T_RANK_TWO, rank_two_f)]:
        tf = apply_operator(coeffs, f)
        g = is_summable(tf)
        assert g is not None
        assert verify_telescoper(coeffs, f, g, seed=5)


def test_apply_operator_rejects_x_dependence(rational_f):
    with pytest.raises(ValueError):
        apply_operator(["x"], rational_f)


# telescoper construction

def test_rational_example(rational_f):
    T = compute_telescoper(rational_f)
    assert T.order <= 2
    assert verify_telescoper(T.coeffs, rational_f, T.certificate)
    # the source operator up to sign
    assert [str(c) for c in T.coeffs] == ["t^2 + 3*t + 2", "-2*t^2 - 4*t", "t^2 + t"]


def test_binomial_example(binomial_f):
    T = compute_telescoper(binomial_f)
    assert T.order <= 2
    assert [RatFun.coerce(c) for c in T_BINOMIAL] == list(T.coeffs)


def test_rank_two_example(rank_two_f):
    T = compute_telescoper(rank_two_f)
    assert T.order <= 3
    assert verify_telescoper(T.coeffs, rank_two_f, T.certificate, seed=1)
    assert list(T.coeffs) == [RatFun.coerce(c) for c in T_RANK_TWO]


def test_no_telescoper(rational_g, rank_two_g):
    with pytest.raises(NoTelescoperExists):
        compute_telescoper(rational_g)
    with pytest.raises(NoTelescoperExists):
        compute_telescoper(rank_two_g)


def test_forced_search_warns_and_fails(rational_g):
    with pytest.warns(UserWarning):
        with pytest.raises(NoTelescoperExists):
            compute_telescoper(rational_g, max_order=2)


def test_perturbed_telescoper_fails(rational_f):
    T = compute_telescoper(rational_f)
    bumped = (T.coeffs[0] + 1,) + T.coeffs[1:]
    assert not verify_telescoper(bumped, rational_f, T.certificate)
    assert not verify_telescoper(bumped, rational_f, T.certificate, seed=3)


def test_left_multiple_is_telescoper(rational_f, binomial_f):
    # (S_t - 1) T is a telescoper with certificate S_t g - g
    for f in (rational_f, binomial_f):
        T = compute_telescoper(f)
        c = list(T.coeffs)
        left = [-c[0]] + [c[i - 1].shift(1, 0) - c[i] for i in range(1, len(c))] \
            + [c[-1].shift(1, 0)]
        g = apply_St(T.certificate) - T.certificate
        assert verify_telescoper(left, f, g)


def test_scaling_invariance(rational_f, binomial_f):
    lam = RatFun(P("t + 3"), P("t^2 + 1"))
    for f in (rational_f, binomial_f):
        T = compute_telescoper(f)
        scaled = f.scale(lam)
        adjusted = [c / lam.shift(i, 0) for i, c in enumerate(T.coeffs)]
        assert verify_telescoper(adjusted, scaled, T.certificate)
        T2 = compute_telescoper(scaled)
        assert verify_telescoper(T2.coeffs, scaled, T2.certificate)
        assert T2.order == T.order


def test_random_elements_sound(all_systems):
    rng = seeded(167)
    for name, S in all_systems.items():
        for _ in range(4 if name != "trivial" else 10):
            f = rand_element(rng, S, max_factors=1, dx=1)
            T = compute_telescoper(f)
            assert verify_telescoper(T.coeffs, f, T.certificate)
            assert T.order <= order_bound(f).bound


def test_stem_invariant_under_basis_change(trivial):
    # W' = (t + 1) W: S_t W' = (t + 2)/(t + 1) W'
    alt = build_system(1, "1", [["1"]], "t + 1", [["t + 2"]])
    for text in ["(x^2 + t)/(x - t)^2", "1/(x^2 + t)", "1/((x + t)*(x^2 + 1))", "x/(2*x - t)"]:
        f = element(trivial, [text])
        g = element(alt, [RatFun.coerce(text) / RatFun(P("t + 1"), P("1"))])
        assert stem(f).stem == stem(g).stem
        assert decide_existence(f).exists == decide_existence(g).exists


def test_spread_diagnostic(trivial, rational_g):
    assert not is_spread_diagnostic(rational_g)
    assert is_summable(rational_g) is None
    assert is_spread_diagnostic(element(trivial, ["x"]))
    spread = element(trivial, ["1/((x^2 + t)*(x^2 + 2*x + 1 + t))"])
    assert is_spread_diagnostic(spread)
