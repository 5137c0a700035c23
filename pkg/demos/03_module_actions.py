"""
Shift systems and module elements
=================================

A first-order system is given by ``S_x W = (M/e) W`` and
``S_t W = (M_t/e_t) W``.  Here ``W = binomial(t, x)^3``, checked against
exact integer binomials.
"""

from math import comb

from telescoper import (
    apply_St, apply_Sx, apply_Sx_inv, build_system, check_compatibility,
    check_suitable_properties, delta_x, element,
)

S = build_system(1, "(1+x)^3", [["(t-x)^3"]], "(1+t-x)^3", [["(1+t)^3"]],
                 orbit_reps=["x+1", "x-t"])
print("compatible:", check_compatibility(S))
print(check_suitable_properties(S))

f = element(S, ["1"], "x + 1")
print("f         =", f)
print("S_x f     =", apply_Sx(f))
print("S_t f     =", apply_St(f))
print("Delta_x f =", delta_x(f))
print("S_x^-1 S_x f == f:", apply_Sx_inv(apply_Sx(f)) == f)


def value(h, t0, x0):
    c = h.coefficients()[0]
    return c.num(x0, t0) / c.den(x0, t0) * comb(t0, x0) ** 3


t0, x0 = 9, 4
print("S_x f at (t, x) = (9, 4):", value(apply_Sx(f), t0, x0),
      " direct:", 1 / (x0 + 2) * comb(t0, x0 + 1) ** 3)
