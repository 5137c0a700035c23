"""
Additive reduction and summability
==================================

Every element decomposes as ``Delta_x(g)`` plus a remainder whose pole
part is reduced orbit by orbit and whose polynomial part is reduced to a
normal form in a finite-dimensional complement.  The remainder is zero
exactly when the element is summable.
"""

from telescoper import (
    build_NV, build_system, delta_x, element, format_poly, full_decompose,
    is_summable, remainder_form,
)

S = build_system(1, "1", [["1"]], "1", [["1"]])   # rational functions

g = element(S, ["x^2 + t"], "(x - t)*(x + 2)")
f = delta_x(g)
print("f = Delta_x(g) with f =", f)
print("recovered certificate:", is_summable(f))

h = element(S, ["1"], "(x + 1)*(x - t)^2")
rf = remainder_form(h)
print("remainder of", h)
print("  d =", format_poly(rf.d_poly), " P =", [str(p) for p in rf.P],
      " R =", [str(p) for p in rf.R])
print("  summable:", is_summable(h) is not None)

B = build_system(1, "(1+x)^3", [["(t-x)^3"]], "(1+t-x)^3", [["(1+t)^3"]],
                 orbit_reps=["x+1", "x-t"])
nv = build_NV(B)
print("binomial cubes: polynomial cokernel dimension", nv.dim, "basis", nv.basis)
fd = full_decompose(element(B, ["x^3"]))
print("x^3 W: normal form", [str(c) for c in fd.R_nf], " zero:", fd.is_zero_remainder())
