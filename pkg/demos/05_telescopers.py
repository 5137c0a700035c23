"""
Creative telescoping
====================

For a proper element ``f`` the existence test reduces the stem, the order
bound caps the search, and the telescoper ``T`` in ``S_t`` comes with a
certificate ``g`` such that ``T f = Delta_x(g)``.
"""

from telescoper import (
    build_system, compute_telescoper, decide_existence, element,
    order_bound, stem, verify_telescoper,
)

rational = build_system(1, "1", [["1"]], "1", [["1"]])
binomial = build_system(1, "(1+x)^3", [["(t-x)^3"]], "(1+t-x)^3", [["(1+t)^3"]],
                        orbit_reps=["x+1", "x-t"])
rank_two = build_system(
    2, "(x+2)*(t^2-1)^2",
    [["(x+t^2)*(x+2)*(t^2-1)", "(x^2+(t^2+1)*x+1)*(x+2)*(t^2-1)^2"],
     ["-x-1", "-(x^2+2*x-t^2+2)*(t^2-1)"]],
    "t*(t+2)*(t^2-1)",
    [["t^2*(t+2)^2", "t*(x+1)*(2*t+1)*(t+2)*(t^2-1)"], ["0", "(t^2-1)^2"]],
    orbit_reps=["x+2", "x^2+(t^2+1)*x+1"],
)

cases = [
    ("(x^2 + t)/(x - t)^2", element(rational, ["x^2 + t"], "(x - t)^2")),
    ("binomial(t, x)^3", element(binomial, ["1"])),
    ("rank two, W_1/(x + t)", element(rank_two, ["1", "0"], "x + t")),
]
for name, f in cases:
    v = decide_existence(f)
    print(f"{name}: stem {stem(f).stem}, telescoper exists: {v.exists}, "
          f"order bound {order_bound(f).bound}")
    T = compute_telescoper(f)
    print("  T =", T)
    print("  verified:", verify_telescoper(T.coeffs, f, T.certificate))

# A non-proper element: the stem x^2 + t is not integer-linear
f = element(rational, ["1"], "x^2 + t")
print("1/(x^2 + t): telescoper exists:", decide_existence(f).exists)
