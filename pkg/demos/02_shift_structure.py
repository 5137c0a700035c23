"""
Integer-linear polynomials and shift orbits
===========================================

An irreducible polynomial that depends on x and t only through
``m*t + n*x`` is integer-linear.  Shifts along the direction ``tau`` move
it within its orbit; every other shift moves it to a different orbit.
"""

from telescoper import (
    OrbitExponent, format_poly, integer_linear_decompose,
    is_integer_linear_irreducible, norm, norm_star, parse_poly,
    shift_equivalent_x, tau_apply,
)

for text in ["2*t - 3*x + 5", "x - t", "x^2 + t", "(x + t)^2 + 1"]:
    res = is_integer_linear_irreducible(parse_poly(text))
    if res is None:
        print(f"{text:>14}: not integer-linear")
    else:
        d, h = res
        print(f"{text:>14}: direction (m, n) = ({d.m}, {d.n}), generator h(z) = {h}")

d, _ = is_integer_linear_irreducible(parse_poly("x - t"))
print("tau(x - t)     =", format_poly(tau_apply(parse_poly("x - t"), d, 1)))
print("tau^-2(x - t)  =", format_poly(tau_apply(parse_poly("x - t"), d, -2)))

# Group the integer-linear factors of a polynomial by orbit
dec = integer_linear_decompose(parse_poly("(x - t)*(x - t - 1)^2*(x^2 + t)"))
for c in dec.classes:
    print(f"class of {format_poly(c.q)}: exponent {c.xi}, norm {norm(c.xi)}")
print("non-linear part:", format_poly(dec.non_linear_part))

xi = OrbitExponent({0: 1, 2: 2})
print("norm(1 + 2 tau^2) =", norm(xi), " norm* =", norm_star(xi))

# x-shift equivalence: q = sigma_x^k p
print("x - t - 3 = sigma_x^k(x - t) with k =",
      shift_equivalent_x(parse_poly("x - t"), parse_poly("x - t - 3")))
