"""
Exact arithmetic in Q(t, x)
===========================

Polynomials live in a sparse ring over Q with generators x and t.  Text
input uses a small grammar (``^`` for powers, implicit products are not
allowed) and output round-trips through the same parser.
"""

from telescoper import (
    RatFun, bivar_factor_x, dispersion_set, format_poly, parse_poly,
    poly_gcd, resultant_x, shift_poly, squarefree_decomp,
)

p = parse_poly("(x - t)^2*(x + t + 1)")
q = parse_poly("(x - t)*(x - 2*t)")
print("p            =", format_poly(p))
print("gcd(p, q)    =", format_poly(poly_gcd(p, q)))
print("res_x(x-t, x+t) =", format_poly(resultant_x(parse_poly("x - t"), parse_poly("x + t"))))

# Square-free parts and irreducible factors with respect to x
for part, k in squarefree_decomp(p):
    print(f"  square-free part of multiplicity {k}: {format_poly(part)}")
for fac, k in bivar_factor_x(p):
    print(f"  irreducible factor {format_poly(fac)} ^ {k}")

# sigma_x^i sigma_t^j acts by substitution
print("sigma_x(p)   =", format_poly(shift_poly(p, 1, 0)))

# Integer k with gcd(p, sigma_x^k q) nontrivial
print("dispersion(x-t, x-t-3) =", dispersion_set(parse_poly("x - t"), parse_poly("x - t - 3")))

# Rational functions are kept reduced with a monic denominator
r = RatFun(parse_poly("x^2 - t^2"), parse_poly("2*x - 2*t"))
print("(x^2 - t^2)/(2x - 2t) =", r)
