"""Exact arithmetic in Q[t, x], Q(t, x) and K[x] with K = Q(t).

Polynomials are sympy sparse ring elements of ``POLY`` (generators ordered
``x, t`` so that sympy's lex order is the pure lexicographic order with
t < x).  Rational functions are :class:`RatFun` values with a monic
denominator.  Univariate polynomials over K live in ``KX`` and are used by the
reduction engine for partial fractions and modular inverses.

All values are immutable and every function here is pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from math import lcm as ilcm

from sympy import QQ
from sympy.polys.fields import field
from sympy.polys.rings import ring

__all__ = [
    "POLY", "X", "T", "FRAC", "KT", "KX", "UZ",
    "Poly", "RatFun", "ParseError", "FactorizationIncomplete",
    "poly", "terms", "from_terms", "deg_x", "deg_t", "is_constant",
    "monic", "content_x", "primitive_x", "poly_gcd", "poly_lcm",
    "resultant_x", "sylvester_resultant_x", "shift_resultant_x",
    "integer_roots", "dispersion_set", "squarefree_decomp", "univar_factor",
    "bivar_factor_x", "full_factor", "shift_poly", "diff",
    "to_kx", "from_kx", "kt_from_poly", "kt_to_ratfun", "ratfun_to_kt",
    "kx_monic", "kt_shift",
    "parse_poly", "parse_ratfun", "parse_expr", "format_poly", "format_ratfun",
]

FRAC, _FX, _FT = field("x,t", QQ)
POLY = FRAC.ring
X, T = POLY.gens

KT, _TK = field("t", QQ)
KX, _XK = ring("x", KT)
UZ, _Z = ring("z", QQ)

Poly = type(X)


class ParseError(ValueError):
    """Malformed polynomial text; carries 1-based line and column."""

    def __init__(self, message, line=1, column=1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class FactorizationIncomplete(ArithmeticError):
    """Raised when a factorization fails its expand-and-compare check."""


# ---------------------------------------------------------------------------
# basic polynomial helpers

def poly(value) -> Poly:
    """Coerce an int, Fraction-like rational, string or ring element to ``POLY``."""
    if isinstance(value, str):
        return parse_poly(value)
    if isinstance(value, Poly) and value.ring == POLY:
        return value if value.ring is POLY else POLY(dict(value))
    return POLY(value)


def terms(p: Poly) -> dict:
    """Term map ``{(deg_t, deg_x): coeff}`` of ``p`` (zero has no terms)."""
    return {(j, i): c for (i, j), c in p.terms()}


def from_terms(tm: dict) -> Poly:
    """Inverse of :func:`terms`."""
    return POLY({(i, j): QQ(c) for (j, i), c in tm.items() if c})


def deg_x(p: Poly) -> int:
    return p.degree(0) if p else -1


def deg_t(p: Poly) -> int:
    return p.degree(1) if p else -1


def is_constant(p: Poly) -> bool:
    return p.is_ground


def monic(p: Poly) -> Poly:
    """Scale so the pure-lex (t < x) leading coefficient is 1."""
    return p.monic() if p else p


def diff(p: Poly, var: str) -> Poly:
    return p.diff(X if var == "x" else T)


def _coeffs_in(p: Poly, main: int) -> list:
    """Coefficients of ``p`` w.r.t. generator ``main`` as polynomials in the other one."""
    other = 1 - main
    groups: dict = {}
    for monom, c in p.terms():
        k = monom[main]
        exps = [0, 0]
        exps[other] = monom[other]
        groups.setdefault(k, {})[tuple(exps)] = c
    return [POLY(d) for d in groups.values()]


def content_x(p: Poly) -> Poly:
    """Content of ``p`` viewed in Q[t][x]: monic gcd of its x-coefficients."""
    if not p:
        return POLY.zero
    return monic(reduce(lambda a, b: a.gcd(b), _coeffs_in(p, 0)))


def primitive_x(p: Poly) -> Poly:
    """``p`` with its pure-t content removed, normalized monic."""
    if not p:
        return p
    return monic(p.quo(content_x(p)))


def poly_gcd(p: Poly, q: Poly, main_var: str = "x") -> Poly:
    """Gcd of ``p`` and ``q`` as univariate polynomials in ``main_var``.

    The gcd is taken over the fraction field of the other variable, so content
    in the other variable is discarded.  The result is monic.

    Examples
    ========

    >>> from telescoper.exact import poly_gcd, parse_poly, format_poly
    >>> format_poly(poly_gcd(parse_poly("x^2 - t^2"), parse_poly("x - t")))
    'x - t'
    """
    p, q = poly(p), poly(q)
    g = p.gcd(q)
    if not g:
        return g
    main = 0 if main_var == "x" else 1
    cont = monic(reduce(lambda a, b: a.gcd(b), _coeffs_in(g, main)))
    return monic(g.quo(cont))


def poly_lcm(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return POLY.zero
    return monic(p.lcm(q))


def resultant_x(p: Poly, q: Poly) -> Poly:
    """Resultant of ``p`` and ``q`` with respect to x, a polynomial in t.

    The sign is that of the Sylvester determinant (coefficients of ``p``
    first), e.g. ``res(x - 1, x - 2) = -1``.
    """
    p, q = poly(p), poly(q)
    if deg_x(p) <= 0 or deg_x(q) <= 0:
        return sylvester_resultant_x(p, q)
    return POLY({(0, j): c for (j,), c in p.resultant(q).terms()})


def sylvester_resultant_x(p: Poly, q: Poly) -> Poly:
    """Resultant w.r.t. x computed as the determinant of the Sylvester matrix."""
    from sympy.polys.matrices import DomainMatrix

    m, n = deg_x(p), deg_x(q)
    if m < 0 or n < 0:
        return POLY.zero
    if m == 0 and n == 0:
        return POLY.one
    pc = [p.coeff_wrt(X, m - i) for i in range(m + 1)]
    qc = [q.coeff_wrt(X, n - i) for i in range(n + 1)]
    size = m + n
    rows = []
    for i in range(n):
        rows.append([POLY.zero] * i + pc + [POLY.zero] * (size - m - 1 - i))
    for i in range(m):
        rows.append([POLY.zero] * i + qc + [POLY.zero] * (size - n - 1 - i))
    return DomainMatrix(rows, (size, size), POLY.to_domain()).det()


_SHIFT_RING, _SX, _SK, _ST = ring("x,k,t", QQ)


def shift_resultant_x(p: Poly, q: Poly):
    """``res_x(p(x), q(x + k))`` as a dict ``{(deg_k, deg_t): coeff}``."""
    def lift(f):
        return _SHIFT_RING({(i, 0, j): c for (i, j), c in f.terms()})

    qk = lift(q).compose(_SX, _SX + _SK)
    return dict(lift(p).resultant(qk).terms())


def integer_roots(coeff_polys) -> list:
    """Integer common roots of univariate rational polynomials (ring ``UZ``)."""
    g = reduce(lambda a, b: a.gcd(b), coeff_polys, UZ.zero)
    if not g:
        raise ValueError("every integer is a root of the zero polynomial")
    roots = []
    for fac, _ in g.factor_list()[1]:
        if fac.degree() == 1:
            fm = fac.monic()
            r = -QQ(dict(fm.terms()).get((0,), 0))
            if r.denominator == 1:
                roots.append(int(r.numerator))
    return sorted(roots)


def dispersion_set(p: Poly, q: Poly) -> list:
    """Integers k with ``gcd(p, sigma_x^k(q))`` non-constant in K[x].

    Found as the integer roots (in k, identically in t) of
    ``res_x(p(x), q(x + k))``.  Independent of :func:`shift_equivalent_x`'s
    coefficient comparison and used to cross-check it.
    """
    res = shift_resultant_x(poly(p), poly(q))
    if not res:
        raise ValueError("p and q share a factor for every shift")
    by_t: dict = {}
    for (k, j), c in res.items():
        by_t.setdefault(j, {})[(k,)] = c
    return integer_roots([UZ(d) for d in by_t.values()])


def squarefree_decomp(p: Poly, main_var: str = "x") -> list:
    """Square-free decomposition in ``main_var`` as ``[(factor, multiplicity)]``.

    Factors are monic, pairwise coprime and square-free; content in the other
    variable is dropped, so the product reconstructs ``p`` up to content.
    """
    p = poly(p)
    if not p:
        raise ValueError("square-free decomposition of zero")
    main = 0 if main_var == "x" else 1
    out = []
    for fac, k in p.sqf_list()[1]:
        fac = primitive_x(fac) if main == 0 else _primitive_t(fac)
        if fac.degree(main) > 0:
            out.append((fac, k))
    return _merge_by_multiplicity(out)


def _primitive_t(p: Poly) -> Poly:
    cont = monic(reduce(lambda a, b: a.gcd(b), _coeffs_in(p, 1)))
    return monic(p.quo(cont))


def _merge_by_multiplicity(pairs):
    acc: dict = {}
    for f, k in pairs:
        acc[k] = acc[k] * f if k in acc else f
    return [(monic(f), k) for k, f in sorted(acc.items())]


def univar_factor(h) -> list:
    """Monic irreducible factors over Q of a univariate polynomial, with multiplicities."""
    if not h:
        raise ValueError("factorization of zero")
    return [(f.monic(), k) for f, k in h.factor_list()[1]]


def full_factor(p: Poly) -> tuple:
    """Irreducible factorization of ``p`` in Q[t, x]: ``(constant, [(monic factor, k)])``.

    The factor list is verified by expansion.
    """
    p = poly(p)
    if not p:
        raise ValueError("factorization of zero")
    c, facs = p.factor_list()
    out = []
    for f, k in facs:
        lc = f.LC
        c *= lc ** k
        out.append((f.quo_ground(lc), k))
    check = POLY(c)
    for f, k in out:
        check *= f ** k
    if check != p:
        raise FactorizationIncomplete(f"factors of {format_poly(p)} do not re-expand")
    out.sort(key=lambda fk: (fk[0].degree(0), fk[0].degree(1), str(fk[0])))
    return c, out


def bivar_factor_x(p: Poly) -> list:
    """Monic irreducible factors of ``p`` in K[x], K = Q(t), with multiplicities.

    By Gauss's lemma these are the irreducible factors of ``p`` in Q[t, x]
    of positive x-degree.

    Examples
    ========

    >>> from telescoper.exact import bivar_factor_x, parse_poly, format_poly
    >>> [(format_poly(f), k) for f, k in bivar_factor_x(parse_poly("(x+2)^2*(x^2+t)"))]
    [('x + 2', 2), ('x^2 + t', 1)]
    """
    p = poly(p)
    if deg_x(p) < 1:
        return []
    _, facs = full_factor(p)
    return [(f, k) for f, k in facs if f.degree(0) > 0]


def shift_poly(p: Poly, i: int, j: int) -> Poly:
    """``sigma_t^i sigma_x^j (p) = p(t + i, x + j)``."""
    p = poly(p)
    if i == 0 and j == 0 or p.is_ground:
        return p
    subs = []
    if j:
        subs.append((X, X + j))
    if i:
        subs.append((T, T + i))
    return p.compose(subs)


# ---------------------------------------------------------------------------
# conversions between Q[t, x] and K[x]

_KT_RING = KT.ring


def kt_from_poly(p: Poly):
    """A polynomial in t alone, as an element of ``KT``."""
    return KT(_KT_RING({(j,): c for (i, j), c in p.terms()}))


def _kt_num_den(c):
    return c.numer, c.denom


def to_kx(p: Poly):
    """View ``p`` in K[x]."""
    groups: dict = {}
    for (i, j), c in p.terms():
        groups.setdefault(i, {})[(j,)] = c
    return KX({(i,): KT(_KT_RING(d)) for i, d in groups.items()})


def _t_poly(rp) -> Poly:
    return POLY({(0, j): c for (j,), c in rp.terms()})


def from_kx(q) -> tuple:
    """Clear denominators: returns ``(num, den)`` with ``q = num/den``, ``den`` in Q[t] monic."""
    if not q:
        return POLY.zero, POLY.one
    den = _KT_RING.one
    for c in q.values():
        den = den.lcm(c.denom)
    den = den.monic()
    num = POLY.zero
    for (i,), c in q.terms():
        cn = c.numer * den.quo(c.denom)
        num += POLY({(i, j): a for (j,), a in cn.terms()})
    return num, _t_poly(den)


def kx_monic(q):
    return q.monic() if q else q


def kt_shift(c, i: int):
    """``sigma_t^i`` on an element of K."""
    if i == 0:
        return c
    tt = _KT_RING.gens[0]
    return KT.new(c.numer.compose(tt, tt + i), c.denom.compose(tt, tt + i))


def kt_to_ratfun(c) -> "RatFun":
    return RatFun(_t_poly(c.numer), _t_poly(c.denom))


def ratfun_to_kt(r: "RatFun"):
    if deg_x(r.num) > 0 or deg_x(r.den) > 0:
        raise ValueError("rational function depends on x")
    return kt_from_poly(r.num) / kt_from_poly(r.den)


# ---------------------------------------------------------------------------
# rational functions

@dataclass(frozen=True)
class RatFun:
    """Rational function ``num/den`` in Q(t, x) with gcd 1 and monic denominator."""

    num: Poly
    den: Poly

    def __post_init__(self):
        num, den = poly(self.num), poly(self.den)
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            num, den = POLY.zero, POLY.one
        else:
            g = num.gcd(den)
            if not g.is_one:
                num, den = num.quo(g), den.quo(g)
            lc = den.LC
            if lc != 1:
                num, den = num.quo_ground(lc), den.quo_ground(lc)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @classmethod
    def coerce(cls, v) -> "RatFun":
        if isinstance(v, RatFun):
            return v
        if isinstance(v, str):
            return parse_ratfun(v)
        return cls(poly(v), POLY.one)

    def __add__(self, other):
        o = RatFun.coerce(other)
        return RatFun(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFun(-self.num, self.den)

    def __sub__(self, other):
        return self + (-RatFun.coerce(other))

    def __rsub__(self, other):
        return RatFun.coerce(other) - self

    def __mul__(self, other):
        o = RatFun.coerce(other)
        return RatFun(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = RatFun.coerce(other)
        if not o.num:
            raise ZeroDivisionError("division by zero rational function")
        return RatFun(self.num * o.den, self.den * o.num)

    def __pow__(self, k: int):
        if k < 0:
            return RatFun(self.den ** (-k), self.num ** (-k))
        return RatFun(self.num ** k, self.den ** k)

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, other):
        try:
            o = RatFun.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((tuple(sorted(self.num.terms())), tuple(sorted(self.den.terms()))))

    def shift(self, i: int, j: int) -> "RatFun":
        return RatFun(shift_poly(self.num, i, j), shift_poly(self.den, i, j))

    def is_poly(self) -> bool:
        return self.den.is_one

    def evaluate(self, t_val, x_val):
        """Exact value at rational ``(t, x)``; raises ZeroDivisionError at a pole."""
        d = self.den(x_val, t_val)
        if d == 0:
            raise ZeroDivisionError("evaluation at a pole")
        return QQ(self.num(x_val, t_val)) / QQ(d)

    def __str__(self):
        return format_ratfun(self)

    def __repr__(self):
        return f"RatFun({format_ratfun(self)!r})"


# ---------------------------------------------------------------------------
# text grammar

_SYMBOLS = {"x": _FX, "t": _FT}


class _Parser:
    """Recursive-descent parser for the polynomial text grammar.

    expr  := term (('+' | '-') term)*
    term  := unary (('*' | '/') unary)*
    unary := ('+' | '-') unary | power
    power := atom ('^' unary)?
    atom  := INT | 't' | 'x' | '(' expr ')'

    ``**`` is accepted for ``^`` and U+2212 for ``-``.  Division is allowed so
    that serialized rational coefficients re-parse; polynomial fields reject
    results with a non-constant denominator.
    """

    def __init__(self, text, line=1, col0=1):
        self.text = text.replace("−", "-")
        self.pos = 0
        self.line = line
        self.col0 = col0

    def error(self, msg, pos=None):
        pos = self.pos if pos is None else pos
        raise ParseError(msg, self.line, self.col0 + pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip()
        if self.pos >= len(self.text):
            return ""
        if self.text.startswith("**", self.pos):
            return "^"
        return self.text[self.pos]

    def take(self):
        ch = self.peek()
        self.pos += 2 if self.text.startswith("**", self.pos) else 1
        return ch

    def parse(self):
        self.skip()
        if self.pos >= len(self.text):
            self.error("empty expression")
        value = self.expr()
        if self.peek():
            self.error(f"unexpected character {self.peek()!r}")
        return value

    def expr(self):
        value = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.unary()
        while self.peek() in ("*", "/"):
            start = self.pos
            op = self.take()
            rhs = self.unary()
            if op == "*":
                value = value * rhs
            else:
                if not rhs:
                    self.error("division by zero", start)
                value = value / rhs
        return value

    def unary(self):
        ch = self.peek()
        if ch == "-":
            self.take()
            return -self.unary()
        if ch == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == "^":
            self.take()
            self.skip()
            start = self.pos
            exp = self.unary()
            if not exp.numer.is_ground or not exp.denom.is_one:
                self.error("exponent must be a non-negative integer", start)
            k = QQ(exp.numer.LC) if exp.numer else QQ(0)
            if k.denominator != 1 or k < 0:
                self.error("exponent must be a non-negative integer", start)
            return base ** int(k)
        return base

    def atom(self):
        ch = self.peek()
        start = self.pos
        if ch == "(":
            self.take()
            value = self.expr()
            if self.peek() != ")":
                self.error("expected ')'")
            self.take()
            return value
        if ch.isdigit():
            end = start
            while end < len(self.text) and self.text[end].isdigit():
                end += 1
            self.pos = end
            return FRAC(int(self.text[start:end]))
        if ch in _SYMBOLS:
            self.take()
            nxt = self.text[self.pos:self.pos + 1]
            if nxt.isalnum() or nxt == "_":
                self.error("unknown identifier", start)
            return _SYMBOLS[ch]
        if not ch:
            self.error("unexpected end of input")
        self.error(f"unexpected character {ch!r}")


def parse_expr(text: str, line: int = 1, column: int = 1):
    """Parse text into a sympy fraction-field element of Q(x, t)."""
    return _Parser(text, line, column).parse()


def parse_ratfun(text: str, line: int = 1, column: int = 1) -> RatFun:
    """Parse a rational function in t and x."""
    f = parse_expr(text, line, column)
    return RatFun(POLY(dict(f.numer)), POLY(dict(f.denom)))


def parse_poly(text: str, line: int = 1, column: int = 1) -> Poly:
    """Parse a polynomial in t and x; rational constants such as ``1/2`` are allowed.

    Examples
    ========

    >>> from telescoper.exact import parse_poly, format_poly
    >>> format_poly(parse_poly("(x - t)^2"))
    'x^2 - 2*t*x + t^2'
    """
    f = parse_expr(text, line, column)
    if not f.denom.is_ground:
        raise ParseError("expected a polynomial, got a rational function", line, column)
    return POLY(dict(f.numer)).quo_ground(f.denom.LC)


def _format_coeff(c) -> str:
    c = QQ(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def format_poly(p: Poly) -> str:
    """Expanded form, terms in decreasing pure-lex order (t < x)."""
    p = poly(p)
    if not p:
        return "0"
    out = []
    for (i, j), c in sorted(p.terms(), reverse=True):
        neg = c < 0
        c = -c if neg else c
        factors = []
        if j:
            factors.append("t" if j == 1 else f"t^{j}")
        if i:
            factors.append("x" if i == 1 else f"x^{i}")
        if not factors:
            body = _format_coeff(c)
        elif c == 1:
            body = "*".join(factors)
        else:
            body = "*".join([_format_coeff(c)] + factors)
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append(("- " if neg else "+ ") + body)
    return " ".join(out)


def format_ratfun(r: RatFun) -> str:
    if r.den.is_one:
        return format_poly(r.num)
    return f"({format_poly(r.num)})/({format_poly(r.den)})"


def lcm_of_denominators(values) -> int:
    """Least common multiple of the denominators of a sequence of rationals."""
    return reduce(ilcm, (QQ(v).denominator for v in values), 1)
