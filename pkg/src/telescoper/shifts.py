"""Integer-linear polynomials, shift equivalence and orbit exponents.

A polynomial is integer-linear when it is a product of factors ``h(m*t + n*x)``
with ``h`` univariate and ``m, n`` integers.  For a fixed direction ``(m, n)``
the shift ``tau = sigma_t^a sigma_x^b`` with ``a*m + b*n = 1`` maps
``h(m*t + n*x)`` to ``h(m*t + n*x + 1)``; multiplicities of a factor along its
tau-orbit are recorded as an :class:`OrbitExponent` in N[tau, 1/tau].
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from sympy import QQ

from .exact import (
    POLY, UZ, Poly, deg_x, diff, full_factor, bivar_factor_x,
    monic, poly, shift_poly, to_kx,
)

__all__ = [
    "Direction", "OrbitExponent", "IntegerLinearDecomp", "DirectionMismatch",
    "make_direction", "is_integer_linear_irreducible", "is_integer_linear",
    "integer_linear_decompose", "tau_apply", "norm", "norm_star",
    "shift_equivalent_x", "is_spread_x", "is_shift_free_x", "tau_index",
]


class DirectionMismatch(ValueError):
    """The polynomial is not invariant along the requested direction."""


@dataclass(frozen=True)
class Direction:
    """Normalized direction ``(m, n)`` with its shift exponents ``(a, b)``.

    ``gcd(m, n) = 1``, ``n >= 0``, ``m = 1`` when ``n = 0``, and
    ``a*m + b*n = 1`` with ``0 <= a < n`` when ``n > 0`` (``a = 1, b = 0``
    when ``n = 0``).
    """

    m: int
    n: int
    a: int
    b: int

    def __str__(self):
        return f"({self.m},{self.n})"


def make_direction(m: int, n: int) -> Direction:
    """Normalize ``(m, n)`` (sign, gcd) and attach the tau exponents ``(a, b)``."""
    if m == 0 and n == 0:
        raise ValueError("zero direction")
    g = gcd(m, n)
    m, n = m // g, n // g
    if n < 0 or (n == 0 and m < 0):
        m, n = -m, -n
    if n == 0:
        return Direction(1, 0, 1, 0)
    a = pow(m, -1, n) if n > 1 else 0
    b = (1 - a * m) // n
    return Direction(m, n, a, b)


def _is_invariant(p: Poly, d: Direction) -> bool:
    return not (d.n * diff(p, "t") - d.m * diff(p, "x"))


def is_integer_linear_irreducible(p: Poly):
    """Direction ``d`` and ``h`` with ``p = h(m*t + n*x)``, or None.

    ``h`` is returned as an element of the univariate ring ``UZ`` (variable z)
    and reconstructs ``p`` exactly, content included.  Constants are reported
    with direction ``(1, 0)``.

    Examples
    ========

    >>> from telescoper.exact import parse_poly
    >>> from telescoper.shifts import is_integer_linear_irreducible
    >>> d, h = is_integer_linear_irreducible(parse_poly("2*t - 3*x + 5"))
    >>> (d.m, d.n), h
    ((-2, 3), -z + 5)
    """
    p = poly(p)
    if not p:
        return None
    d = _candidate_direction(p)
    if d is not None and _is_invariant(p, d):
        return d, _generator(p, d)
    return None


def _candidate_direction(p: Poly):
    # the top homogeneous part of h(m*t + n*x) is c*(m*t + n*x)^k, so the
    # coefficients of x^k and x^(k-1)*t fix m/n
    if deg_x(p) <= 0:
        return make_direction(1, 0)
    k = max(i + j for i, j in p.monoms())
    tm = dict(p.terms())
    top = tm.get((k, 0), 0)
    if not top:
        return None
    ratio = QQ(tm.get((k - 1, 1), 0)) / (k * QQ(top))
    return make_direction(int(ratio.numerator), int(ratio.denominator))


def _generator(p: Poly, d: Direction):
    # t = a*z, x = b*z turns m*t + n*x into z
    z = UZ.gens[0]
    out = UZ.zero
    for (i, j), c in p.terms():
        term = UZ(c)
        if i:
            term *= (d.b * z) ** i
        if j:
            term *= (d.a * z) ** j
        out += term
    return out


def is_integer_linear(p: Poly) -> bool:
    """True iff every irreducible factor of ``p`` is integer-linear."""
    p = poly(p)
    if p.is_ground:
        return bool(p)
    _, facs = full_factor(p)
    return all(is_integer_linear_irreducible(f) is not None for f, _ in facs)


def tau_apply(p: Poly, d: Direction, ell: int) -> Poly:
    """``tau^ell (p) = sigma_t^(a*ell) sigma_x^(b*ell) (p)``, i.e. ``h(m*t + n*x + ell)``."""
    p = poly(p)
    if not _is_invariant(p, d):
        raise DirectionMismatch(f"polynomial is not a function of {d.m}*t + {d.n}*x")
    return shift_poly(p, d.a * ell, d.b * ell)


@dataclass(frozen=True)
class OrbitExponent:
    """Element of N[tau, 1/tau]: ``coeffs[i]`` is the multiplicity at ``tau^i``."""

    coeffs: tuple = ()

    def __init__(self, coeffs=None):
        items = dict(coeffs or {})
        clean = tuple(sorted((int(i), int(k)) for i, k in items.items() if k))
        if any(k < 0 for _, k in clean):
            raise ValueError("orbit exponents have non-negative coefficients")
        object.__setattr__(self, "coeffs", clean)

    def as_dict(self) -> dict:
        return dict(self.coeffs)

    def __add__(self, other: "OrbitExponent") -> "OrbitExponent":
        acc = self.as_dict()
        for i, k in other.coeffs:
            acc[i] = acc.get(i, 0) + k
        return OrbitExponent(acc)

    def shift(self, j: int) -> "OrbitExponent":
        """Multiplication by ``tau^j``."""
        return OrbitExponent({i + j: k for i, k in self.coeffs})

    def __bool__(self):
        return bool(self.coeffs)

    def apply(self, q: Poly, d: Direction) -> Poly:
        """``q^xi = prod_i tau^i(q)^(k_i)``."""
        out = POLY.one
        for i, k in self.coeffs:
            out *= tau_apply(q, d, i) ** k
        return out

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for i, k in self.coeffs:
            if i == 0:
                parts.append(str(k))
                continue
            mon = "tau" if i == 1 else f"tau^{i}"
            parts.append(mon if k == 1 else f"{k}*{mon}")
        return " + ".join(parts)


def norm(xi: OrbitExponent) -> int:
    """Largest coefficient of ``xi`` (0 for the zero exponent)."""
    return max((k for _, k in xi.coeffs), default=0)


def norm_star(xi: OrbitExponent) -> int:
    """Sum of the coefficients of ``xi``."""
    return sum(k for _, k in xi.coeffs)


@dataclass(frozen=True)
class LinearClass:
    """One tau-class of an integer-linear decomposition."""

    q: Poly
    direction: Direction
    xi: OrbitExponent
    preferred: bool = False

    def expand(self) -> Poly:
        return self.xi.apply(self.q, self.direction)


@dataclass(frozen=True)
class IntegerLinearDecomp:
    """``content * prod(q_i^xi_i) * non_linear_part``."""

    content: object
    classes: tuple
    non_linear_part: Poly

    def expand(self) -> Poly:
        out = POLY(self.content) * self.non_linear_part
        for c in self.classes:
            out *= c.expand()
        return out

    def exponent_of(self, q: Poly, d: Direction):
        """Orbit exponent of this decomposition relative to a given class representative."""
        for c in self.classes:
            if c.direction == d:
                ell = tau_index(c.q, q, d)
                if ell is not None:
                    return c.xi.shift(ell)
        return OrbitExponent()


def tau_index(p: Poly, q: Poly, d: Direction):
    """Integer ``ell`` with ``p = tau^ell(q)`` up to a constant factor, or None."""
    hp = _generator(monic(p), d)
    hq = _generator(monic(q), d)
    if hp.degree() != hq.degree() or hp.degree() <= 0:
        return (0 if monic(p) == monic(q) else None)
    hp, hq = hp.monic(), hq.monic()
    k = hp.degree()
    cp = QQ(dict(hp.terms()).get((k - 1,), 0))
    cq = QQ(dict(hq.terms()).get((k - 1,), 0))
    ell = (cp - cq) / k
    if ell.denominator != 1:
        return None
    ell = int(ell)
    z = UZ.gens[0]
    return ell if hq.compose(z, z + ell) == hp else None


def integer_linear_decompose(q: Poly, preferred=()) -> IntegerLinearDecomp:
    """Group the integer-linear irreducible factors of ``q`` into tau-classes.

    Each class is represented by its member of smallest tau-index (so its
    exponent has minimal power 0) unless a polynomial in ``preferred`` lies
    in the same class, in which case that polynomial is the representative
    and the class is flagged.  Factors that are not integer-linear are
    multiplied into ``non_linear_part``.

    Examples
    ========

    >>> from telescoper.exact import parse_poly, format_poly
    >>> from telescoper.shifts import integer_linear_decompose
    >>> dec = integer_linear_decompose(parse_poly("(x - t)*(x - t - 1)"))
    >>> [(format_poly(c.q), str(c.direction), str(c.xi)) for c in dec.classes]
    [('x - t - 1', '(-1,1)', '1 + tau')]
    """
    q = poly(q)
    if not q:
        raise ValueError("decomposition of zero")
    content, facs = full_factor(q)
    non_linear = POLY.one
    groups: list = []  # [direction, anchor, {index: mult}]
    for f, k in facs:
        det = is_integer_linear_irreducible(f)
        if det is None:
            non_linear *= f ** k
            continue
        d, _ = det
        for g in groups:
            if g[0] == d:
                ell = tau_index(f, g[1], d)
                if ell is not None:
                    g[2][ell] = g[2].get(ell, 0) + k
                    break
        else:
            groups.append([d, f, {0: k}])
    prefs = [monic(poly(p)) for p in preferred]
    classes = []
    for d, anchor, mults in groups:
        rep, shift, flagged = None, 0, False
        for p in prefs:
            if _is_invariant(p, d):
                ell = tau_index(p, anchor, d)
                if ell is not None:
                    rep, shift, flagged = p, ell, True
                    break
        if rep is None:
            shift = min(mults)
            rep = monic(tau_apply(anchor, d, shift))
        xi = OrbitExponent({i - shift: k for i, k in mults.items()})
        # tau^i(anchor) and tau^i(monic anchor) agree up to constants folded into content
        classes.append(LinearClass(rep, d, xi, flagged))
    dec = IntegerLinearDecomp(content, tuple(classes), monic(non_linear))
    expanded = dec.expand()
    if expanded != q:
        # constant factors picked up by tau shifts of monic representatives
        ratio = q.LC / expanded.LC
        dec = IntegerLinearDecomp(content * ratio, dec.classes, dec.non_linear_part)
        if dec.expand() != q:
            raise ArithmeticError("integer-linear decomposition does not reconstruct input")
    return dec


def shift_equivalent_x(p: Poly, q: Poly):
    """Integer ``k`` with ``q = sigma_x^k(p)`` (up to a factor in K), or None.

    For ``p, q`` monic in K[x] of degree ``n``, ``sigma_x^k`` adds ``n*k`` to
    the coefficient of ``x^(n-1)``, which pins down the only candidate ``k``;
    the candidate is then verified by substitution.

    Examples
    ========

    >>> from telescoper.exact import parse_poly
    >>> from telescoper.shifts import shift_equivalent_x
    >>> shift_equivalent_x(parse_poly("x - t"), parse_poly("x - t - 3"))
    -3
    """
    p, q = poly(p), poly(q)
    n = deg_x(p)
    if n != deg_x(q) or n < 1:
        return None
    pk, qk = to_kx(p).monic(), to_kx(q).monic()
    cp = dict(pk.terms()).get((n - 1,), pk.ring.domain.zero)
    cq = dict(qk.terms()).get((n - 1,), qk.ring.domain.zero)
    diff_ = (cq - cp) / n
    if not diff_.denom.is_one or not diff_.numer.is_ground:
        return None
    k = QQ(diff_.numer.LC) if diff_.numer else QQ(0)
    if k.denominator != 1:
        return None
    k = int(k)
    return k if pk.shift(k) == qk else None


def is_shift_free_x(u: Poly) -> bool:
    """No two irreducible K[x]-factors of ``u`` differ by a nonzero x-shift."""
    facs = [f for f, _ in bivar_factor_x(poly(u))]
    for i, f in enumerate(facs):
        for g in facs[i + 1:]:
            if shift_equivalent_x(f, g) is not None:
                return False
    return True


def is_spread_x(u: Poly) -> bool:
    """Every irreducible K[x]-factor of ``u`` has a nonzero-shift partner dividing ``u``."""
    facs = [f for f, _ in bivar_factor_x(poly(u))]
    if not facs:
        return False
    for f in facs:
        if not any(g != f and shift_equivalent_x(f, g) not in (None, 0) for g in facs):
            return False
    return True
