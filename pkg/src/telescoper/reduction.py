"""Additive reduction of module elements modulo the image of ``Delta_x = S_x - 1``.

Every element ``f`` is rewritten as

    f = Delta_x(g) + (1/d) P W + (1/e) R W

where the poles of ``(1/d) P`` sit on one fixed representative per x-shift
orbit and ``deg_x P < deg_x d``.  The polynomial part ``R`` is then reduced
modulo the image of the K-linear map

    phi(b) = sigma_x(b) M - e b,        b in K[x]^r,

since ``(1/e) phi(b) W = Delta_x(b W)``.  Its normal form is canonical, so
``f`` is summable exactly when ``P = 0`` and the normal form of ``R`` is 0.

Internally all arithmetic happens in K[x], K = Q(t).
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass
from functools import reduce
from math import factorial

from sympy import QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.rings import ring

from .exact import (
    KT, KX, POLY, UZ, Poly, RatFun, bivar_factor_x, deg_x, from_kx, integer_roots,
    kt_from_poly, to_kx,
)
from .module import (
    ModuleElement, ShiftSystem, delta_x, normalize_element, zero_element,
)

__all__ = [
    "UnsuitableSystem", "OrbitTerm", "ReductionResult", "FullDecomposition", "NVData",
    "orbit_partial_fractions", "shift_reduce_term", "ap_reduce", "remainder_form",
    "build_NV", "full_decompose", "is_summable", "normal_form", "degree_bound",
    "kvec_to_element", "element_to_kvec",
]


class UnsuitableSystem(ArithmeticError):
    """A gcd condition needed to move a pole onto its orbit representative fails."""


_KD = KT.to_domain()
_KZERO = KX.zero
_KONE = KX.one


# ---------------------------------------------------------------------------
# vectors over K(x) with a common denominator

@dataclass(frozen=True)
class KVec:
    """``num / den`` with ``num`` a tuple of K[x] elements and ``den`` monic in K[x]."""

    num: tuple
    den: object

    @staticmethod
    def zero(r):
        return KVec((_KZERO,) * r, _KONE)

    def is_zero(self):
        return not any(self.num)

    def __add__(self, other):
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        g = _kx_gcd([self.den, other.den])
        cs, co = _kx_quo(other.den, g), _kx_quo(self.den, g)
        num = tuple(a * cs + b * co for a, b in zip(self.num, other.num))
        return _kvec_normalize(num, self.den * cs)

    def __neg__(self):
        return KVec(tuple(-a for a in self.num), self.den)

    def __sub__(self, other):
        return self + (-other)


def _kx_gcd(polys):
    """Monic gcd in K[x], computed on cleared numerators in Q[t, x].

    Factors in t alone are units of K[x], so the gcd of the numerators
    agrees with the K[x] gcd up to a unit; this avoids gcds with
    rational-function coefficients.
    """
    g = POLY.zero
    for p in polys:
        if p:
            g = g.gcd(from_kx(p)[0])
            if deg_x(g) == 0:
                return _KONE
    if not g:
        return _KZERO
    return to_kx(g).monic()


def _kx_quo(p, g):
    """Exact quotient ``p / g`` in K[x], divided in Q[t, x]."""
    if g.degree() <= 0:
        return p * (1 / g.LC) if g != _KONE else p
    pn, pd = from_kx(p)
    gn, gd = from_kx(g)
    q = pn.exquo(gn)
    return to_kx(q) * (kt_from_poly(gd) / kt_from_poly(pd))


def _kvec_normalize(num, den):
    if not any(num):
        return KVec.zero(len(num))
    g = _kx_gcd(list(num) + [den])
    if g.degree() > 0:
        num = tuple(_kx_quo(a, g) if a else a for a in num)
        den = _kx_quo(den, g)
    lc = den.LC
    if lc != 1:
        inv = 1 / lc
        num = tuple(a * inv for a in num)
        den = den * inv
    return KVec(num, den)


def element_to_kvec(f: ModuleElement) -> KVec:
    return _kvec_normalize(tuple(to_kx(a) for a in f.a), to_kx(f.u))


def kvec_to_element(v: KVec, system: ShiftSystem) -> ModuleElement:
    if v.is_zero():
        return zero_element(system)
    parts = [from_kx(a) for a in v.num]
    dnum, dden = from_kx(v.den)
    L = reduce(lambda a, b: a.lcm(b), [t for _, t in parts] + [dden], POLY.one)
    a = [n * L.quo(t) for n, t in parts]
    return normalize_element(a, dnum * L.quo(dden), system)


# ---------------------------------------------------------------------------
# per-system data in K[x]

class _SystemData:
    def __init__(self, S: ShiftSystem):
        self.r = S.r
        self.e = to_kx(S.e)
        self.M = tuple(tuple(to_kx(c) for c in row) for row in S.M)
        self.e_inv = to_kx(S.e_inv)
        self.M_inv = tuple(tuple(to_kx(c) for c in row) for row in S.M_inv)
        self.reps = [to_kx(p).monic() for p in S.orbit_reps]
        self.rep_polys = list(S.orbit_reps)
        self.nv = None

    def vec_mat(self, a, M):
        r = self.r
        return tuple(sum((a[i] * M[i][j] for i in range(r)), _KZERO) for j in range(r))

    def phi(self, b):
        """``sigma_x(b) M - e b``."""
        sb = tuple(c.shift(1) for c in b)
        return tuple(v - self.e * c for v, c in zip(self.vec_mat(sb, self.M), b))


_CACHE: "weakref.WeakKeyDictionary[ShiftSystem, _SystemData]" = weakref.WeakKeyDictionary()


def _data(S: ShiftSystem) -> _SystemData:
    d = _CACHE.get(S)
    if d is None:
        d = _CACHE[S] = _SystemData(S)
    return d


# ---------------------------------------------------------------------------
# orbit-grouped partial fractions

def _canonical_rep(p):
    """Orbit representative of a monic ``p`` in K[x]: normalize the x^(n-1) coefficient.

    ``sigma_x^k`` adds ``n*k`` to that coefficient ``N/D`` (``D`` monic), which
    moves the coefficient of ``t^deg(D)`` in ``N / lc(D)`` by ``n*k``; the
    representative has it in ``[0, n)``.
    """
    n = p.degree()
    c = dict(p.terms()).get((n - 1,), KT.zero)
    num, den = c.numer, c.denom
    lead = QQ(dict(num.terms()).get((den.degree(),), 0)) / QQ(den.LC) if num else QQ(0)
    k = -int((lead / n).__floor__())
    return p.shift(k) if k else p


@dataclass(frozen=True)
class OrbitTerm:
    """``numer / sigma_x^shift(rep)^mult`` with ``deg numer < mult * deg rep``."""

    rep: object
    shift: int
    mult: int
    numer: tuple

    @property
    def denominator(self):
        return self.rep.shift(self.shift) ** self.mult


class _Orbits:
    """Registry of orbit representatives: system ones first, then canonical ones."""

    def __init__(self, data: _SystemData):
        self.reps = list(data.reps)

    def locate(self, p):
        """``(rep, k)`` with ``p = sigma_x^k(rep)``."""
        for q in self.reps:
            k = _kx_shift_index(q, p)
            if k is not None:
                return q, k
        q = _canonical_rep(p)
        self.reps.append(q)
        return q, _kx_shift_index(q, p)


def _kx_shift_index(q, p):
    n = q.degree()
    if n != p.degree():
        return None
    cq = dict(q.terms()).get((n - 1,), KT.zero)
    cp = dict(p.terms()).get((n - 1,), KT.zero)
    diff = (cp - cq) / n
    if not diff.denom.is_one or diff.numer.degree() > 0:
        return None
    k = QQ(diff.numer.LC) if diff.numer else QQ(0)
    if k.denominator != 1:
        return None
    k = int(k)
    return k if q.shift(k) == p else None


def _kx_factor(U):
    """Monic irreducible factors of ``U`` in K[x] with multiplicities."""
    num, _ = from_kx(U)
    return [(to_kx(f).monic(), k) for f, k in bivar_factor_x(num)]


def _split(A, U, orbits: _Orbits):
    """Polynomial part and orbit terms of ``A / U``."""
    r = len(A)
    poly_part = []
    rem = []
    for a in A:
        q, s = a.div(U)
        poly_part.append(q)
        rem.append(s)
    terms = []
    if U.degree() > 0 and any(rem):
        pieces = []
        for p, m in _kx_factor(U):
            rep, k = orbits.locate(p)
            pieces.append((rep, k, m, p ** m))
        for rep, k, m, D in pieces:
            cof = U.quo(D)
            s, _, g = cof.gcdex(D)
            if g != _KONE:
                raise ArithmeticError("partial fraction pieces are not coprime")
            num = tuple((c * s).rem(D) for c in rem)
            if any(num):
                terms.append(OrbitTerm(rep, k, m, num))
    return tuple(poly_part) if any(poly_part) else (_KZERO,) * r, terms


def orbit_partial_fractions(f: ModuleElement):
    """Partial fractions of ``f`` in x over K grouped by x-shift orbit.

    Returns
    -------
    (tuple, list of OrbitTerm)
        The polynomial part (a vector over K[x]) and the proper terms.
        Their sum reconstructs ``f``.
    """
    data = _data(f.system)
    v = element_to_kvec(f)
    return _split(v.num, v.den, _Orbits(data))


# ---------------------------------------------------------------------------
# moving poles onto orbit representatives

class _Reducer:
    """Mutable work state of one reduction: pieces, e-bucket and certificate."""

    def __init__(self, data: _SystemData):
        self.data = data
        self.r = data.r
        self.pieces = {}  # (id of rep, shift) -> [rep, mult, numer]
        self.ebucket = (_KZERO,) * data.r
        self.cert = KVec.zero(data.r)

    def add_ebucket(self, vec):
        self.ebucket = tuple(a + b for a, b in zip(self.ebucket, vec))

    def add_piece(self, rep, k, m, num):
        if not any(num):
            return
        key = (id(rep), k)
        old = self.pieces.get(key)
        if old is None:
            self.pieces[key] = [rep, m, num]
            return
        q = rep.shift(k)
        _, m0, num0 = old
        mm = max(m, m0)
        num = tuple(a * q ** (mm - m) + b * q ** (mm - m0) for a, b in zip(num, num0))
        self.pieces[key] = [rep, mm, num]

    def step(self, key):
        rep, m, A = self.pieces.pop(key)
        k = key[1]
        if k > 0:
            self._forward(rep, k, m, A)
        else:
            self._backward(rep, k, m, A)

    def _forward(self, rep, k, m, A):
        d = self.data
        Q = rep.shift(k) ** m
        s, _, g = d.e_inv.gcdex(Q)
        if g != _KONE:
            raise UnsuitableSystem("inverse denominator meets a shifted orbit representative")
        S = tuple((v * s).rem(Q) for v in d.vec_mat(A, d.M_inv))
        c = tuple(v.shift(-1) for v in S)
        lower = rep.shift(k - 1) ** m
        self.cert = self.cert + _kvec_normalize(c, lower)
        SM = d.vec_mat(S, d.M)
        Z = []
        for a, v in zip(A, SM):
            q, rr = (a * d.e - v).div(Q)
            if rr:
                raise ArithmeticError("shift step left a remainder")
            Z.append(q)
        self.add_ebucket(tuple(Z))
        self.add_piece(rep, k - 1, m, c)

    def _backward(self, rep, k, m, A):
        d = self.data
        Q = rep.shift(k) ** m
        self.cert = self.cert + _kvec_normalize(tuple(-a for a in A), Q)
        N = d.vec_mat(tuple(a.shift(1) for a in A), d.M)
        qn = rep.shift(k + 1)
        ke, E2 = 0, d.e
        while E2.degree() > 0:
            qq, rr = E2.div(qn)
            if rr:
                break
            ke, E2 = ke + 1, qq
        if ke and k + 1 != 0:
            raise UnsuitableSystem("e meets a shifted orbit representative")
        D1 = qn ** (m + ke)
        s, _, g = E2.gcdex(D1)
        if g != _KONE:
            raise ArithmeticError("partial fraction pieces are not coprime")
        C1 = tuple((v * s).rem(D1) for v in N)
        fac = qn ** ke
        Y = []
        for v, c in zip(N, C1):
            q, rr = (v - c * E2).div(D1)
            if rr:
                raise ArithmeticError("shift step left a remainder")
            Y.append(q * fac)
        self.add_ebucket(tuple(Y))
        self.add_piece(rep, k + 1, m + ke, C1)

    def run(self):
        while True:
            moving = [key for key in self.pieces if key[1] != 0]
            if not moving:
                return
            self.step(max(moving, key=lambda kk: abs(kk[1])))


def _reduce_terms(data, poly_part, terms):
    red = _Reducer(data)
    red.add_ebucket(tuple(p * data.e for p in poly_part))
    for t in terms:
        red.add_piece(t.rep, t.shift, t.mult, t.numer)
    red.run()
    return red


def shift_reduce_term(term: OrbitTerm, system: ShiftSystem):
    """Move one orbit term onto its representative.

    Returns
    -------
    (ModuleElement, ModuleElement)
        Certificate ``g`` and residual ``h`` with ``term = Delta_x(g) + h``; the
        residual's denominator divides ``rep^m' * e`` for some ``m'``.
    """
    data = _data(system)
    red = _reduce_terms(data, (_KZERO,) * data.r, [term])
    h = _residual(red)
    return kvec_to_element(red.cert, system), kvec_to_element(h, system)


def _residual(red: _Reducer) -> KVec:
    h = _kvec_normalize(red.ebucket, red.data.e)
    for rep, m, num in red.pieces.values():
        h = h + _kvec_normalize(num, rep ** m)
    return h


def _run(f: ModuleElement) -> _Reducer:
    data = _data(f.system)
    v = element_to_kvec(f)
    poly_part, terms = _split(v.num, v.den, _Orbits(data))
    return _reduce_terms(data, poly_part, terms)


def ap_reduce(f: ModuleElement):
    """``f = Delta_x(g) + h`` with ``h`` having a shift-free denominator.

    The poles of ``h`` outside ``e`` sit on orbit representatives, one per orbit.

    Returns
    -------
    (ModuleElement, ModuleElement)
        The certificate ``g`` and the residual ``h``.
    """
    red = _run(f)
    return kvec_to_element(red.cert, f.system), kvec_to_element(_residual(red), f.system)


# ---------------------------------------------------------------------------
# remainder form

@dataclass(frozen=True)
class ReductionResult:
    """``f = Delta_x(certificate) + (1/d) P W + (1/e) R W``.

    ``d`` is monic in K[x], ``P`` and ``R`` are vectors over K[x] with
    ``deg P < deg d``.
    """

    system: ShiftSystem
    certificate: KVec
    d: object
    P: tuple
    R: tuple

    @property
    def certificate_g(self) -> ModuleElement:
        return kvec_to_element(self.certificate, self.system)

    @property
    def d_poly(self) -> Poly:
        return from_kx(self.d)[0] if self.d.degree() > 0 else POLY.one

    def residual(self) -> ModuleElement:
        e = _data(self.system).e
        h = _kvec_normalize(self.P, self.d) + _kvec_normalize(self.R, e)
        return kvec_to_element(h, self.system)


def _multiplicity(q, e):
    k = 0
    while e.degree() >= q.degree():
        qq, rr = e.div(q)
        if rr:
            break
        k, e = k + 1, qq
    return k


def _remainder_from(red: _Reducer, system) -> ReductionResult:
    data = red.data
    e = data.e
    parts = []
    for rep, m, num in red.pieces.values():
        ke = _multiplicity(rep, e)
        if ke >= m:
            co = e.quo(rep ** m)
            red.add_ebucket(tuple(a * co for a in num))
            continue
        if ke:
            qd = rep ** (m - ke)
            co = e.quo(rep ** ke)
            hi, lo = [], []
            for a in num:
                q, rr = a.div(qd)
                hi.append(q * co)
                lo.append(rr)
            red.add_ebucket(tuple(hi))
            num = tuple(lo)
        if any(num):
            parts.append(_kvec_normalize(num, rep ** m))
    pv = reduce(lambda a, b: a + b, parts, KVec.zero(data.r))
    return ReductionResult(system, red.cert, pv.den, pv.num, red.ebucket)


def remainder_form(f: ModuleElement) -> ReductionResult:
    """Split the reduced residual into a proper part ``(1/d) P`` and ``(1/e) R``.

    Examples
    ========

    >>> from telescoper.module import build_system, element
    >>> from telescoper.reduction import remainder_form
    >>> S = build_system(1, 1, [[1]], 1, [[1]])
    >>> res = remainder_form(element(S, ["1/(x*(x+1))"]))
    >>> any(res.P), res.d.degree()
    (False, 0)
    """
    return _remainder_from(_run(f), f.system)


# ---------------------------------------------------------------------------
# degree bounds for polynomial preimages

_NT, _N, _TT = ring("n,t", QQ)
_NT_DOMAIN = _NT.to_domain()


def _kt_to_nt(c):
    """A polynomial element of K (polynomial in t) as an element of Q[n, t]."""
    if not c.denom.is_one:
        raise ValueError("expected a polynomial in t")
    return _NT({(0, j): v for (j,), v in c.numer.terms()})


def _binom_poly(i):
    """``binom(n, i)`` as a polynomial in n."""
    out = _NT.one
    for s in range(i):
        out *= (_N - s)
    return out.quo_ground(QQ(factorial(i)))


class _Blocks:
    """Coefficient blocks ``L_j(n) = sum_i binom(n, i) M_{m-j+i} - e_{m-j} I``.

    For ``b = sum_k beta_k x^k`` the coefficient of ``x^(k+m-j)`` in
    ``phi(b)`` collects ``beta_k L_j(k)``.
    """

    def __init__(self, data: _SystemData):
        self.r = data.r
        self.m = max(
            [data.e.degree()] + [c.degree() for row in data.M for c in row if c]
        )
        self.Mc = {}
        for i, row in enumerate(data.M):
            for j, c in enumerate(row):
                for (k,), v in c.terms():
                    self.Mc.setdefault(k, [[_NT.zero] * self.r for _ in range(self.r)])
                    self.Mc[k][i][j] = _kt_to_nt(v)
        self.ec = {k: _kt_to_nt(v) for (k,), v in data.e.terms()}
        self._cache = {}

    def L(self, j):
        if j in self._cache:
            return self._cache[j]
        r, m = self.r, self.m
        out = [[_NT.zero] * r for _ in range(r)]
        for i in range(j + 1):
            blk = self.Mc.get(m - j + i)
            if blk is None:
                continue
            b = _binom_poly(i)
            for a in range(r):
                for c in range(r):
                    if blk[a][c]:
                        out[a][c] += b * blk[a][c]
        ev = self.ec.get(m - j)
        if ev:
            for a in range(r):
                out[a][a] -= ev
        self._cache[j] = out
        return out


def _subs_n(p, s):
    return p.compose(_N, _N + s) if s else p


class _Family:
    """One equation family of the elimination: ``vec(j)`` is a vector of Q[n, t].

    ``kind`` is ``"col"`` (constraints on a preimage; block ``L_j(n + j)``,
    column ``c``) or ``"row"`` (leading terms of images; block ``L_j(n)``,
    row ``c``).
    """

    def __init__(self, blocks, kind, c=None, combo=None, h=0):
        self.blocks = blocks
        self.kind = kind
        self.c = c
        self.combo = combo  # (lambda vector, child families)
        self.h = h
        self._memo = {}

    def vec(self, j):
        if j in self._memo:
            return self._memo[j]
        r = self.blocks.r
        if self.combo is None:
            L = self.blocks.L(j)
            if self.kind == "col":
                out = [_subs_n(L[a][self.c], j) for a in range(r)]
            else:
                out = list(L[self.c])
        else:
            lam, kids = self.combo
            s = -1 if self.kind == "col" else 1
            out = [_NT.zero] * r
            for l_c, kid in zip(lam, kids):
                if not l_c:
                    continue
                kv = kid.vec(j + 1)
                ls = _subs_n(l_c, s)
                for a in range(r):
                    if kv[a]:
                        out[a] += ls * _subs_n(kv[a], s)
        self._memo[j] = out
        return out


def _nt_matrix(fams):
    r = len(fams)
    cols = [f.vec(0) for f in fams]
    rows = [[cols[c][a] for c in range(r)] for a in range(r)]
    return DomainMatrix(rows, (r, r), _NT_DOMAIN)


def _eg(blocks, kind, max_steps=None):
    """Eliminate until the leading matrix is nonsingular.

    Returns ``(h_max, largest non-negative integer root of its determinant or -1)``.
    """
    r = blocks.r
    fams = [_Family(blocks, kind, c=c) for c in range(r)]
    limit = max_steps or 8 * r * (blocks.m + 2) + 20
    for _ in range(limit):
        mat = _nt_matrix(fams)
        det = mat.det()
        if det:
            by_t = {}
            for (i, j), v in det.terms():
                by_t.setdefault(j, {})[(i,)] = v
            roots = integer_roots([UZ(dct) for dct in by_t.values()])
            kmax = max([k for k in roots if k >= 0], default=-1)
            return max(f.h for f in fams), kmax
        ns = mat.to_field().nullspace()
        vec = ns.to_list()[0]
        den = reduce(lambda a, b: a.lcm(b), (v.denom for v in vec), _NT.one)
        lam = [v.numer * den.quo(v.denom) for v in vec]
        active = [c for c in range(r) if lam[c]]
        cstar = max(active, key=lambda c: fams[c].h)
        new = _Family(
            blocks, kind, combo=(lam, list(fams)), h=max(fams[c].h for c in active) + 1
        )
        fams[cstar] = new
    raise RuntimeError("degree elimination did not terminate")


def degree_bound(system: ShiftSystem, D: int) -> int:
    """Upper bound on ``deg b`` for every ``b`` in K[x]^r with ``deg phi(b) <= D``.

    Returns -1 when only ``b = 0`` qualifies.
    """
    nv = _nv_engine(system)
    return nv.bound(D)


# ---------------------------------------------------------------------------
# image echelon and normal forms

class _NVEngine:
    def __init__(self, data: _SystemData):
        self.data = data
        self.blocks = _Blocks(data)
        self.m = self.blocks.m
        self.h_col, self.k_col = _eg(self.blocks, "col")
        _, self.k_row = _eg(self.blocks, "row")
        self.N = None
        self.rows = None  # list of (pivot index, row vector, transform vector)
        self.window = max(self.m - 1, self.k_row + self.m)

    def bound(self, D):
        if D < 0:
            return -1
        return max(D - self.m + self.h_col, self.k_col, -1)

    def _columns(self, N):
        top = N + self.m
        r = self.data.r
        return [(deg, i) for deg in range(top, -1, -1) for i in range(r)]

    def ensure(self, N):
        if self.N is not None and self.N >= N:
            return
        N = max(N, 0)
        r = self.data.r
        cols = self._columns(N)
        index = {c: k for k, c in enumerate(cols)}
        gens = []
        for j in range(N + 1):
            for i in range(r):
                b = [_KZERO] * r
                b[i] = KX.gens[0] ** j
                img = self.data.phi(tuple(b))
                row = [KT.zero] * len(cols)
                for comp, poly_ in enumerate(img):
                    for (deg,), c in poly_.terms():
                        row[index[(deg, comp)]] = c
                gens.append(row)
        ng = len(gens)
        aug = [row + [KT.one if k == g else KT.zero for k in range(ng)]
               for g, row in enumerate(gens)]
        mat = DomainMatrix(aug, (ng, len(cols) + ng), _KD)
        red, pivots = mat.rref()
        red = red.to_list()
        rows = []
        for ridx, p in enumerate(pivots):
            if p >= len(cols):
                break
            rows.append((p, red[ridx][:len(cols)], red[ridx][len(cols):]))
        self.N, self.cols, self.index, self.rows = N, cols, index, rows
        self.pivot_set = {p for p, _, _ in rows}

    def normal_form(self, R):
        """``(NF, b)`` with ``R = phi(b) + NF``; NF is supported on non-pivot monomials."""
        r = self.data.r
        D = max((c.degree() for c in R if c), default=-1)
        if D < 0:
            return (_KZERO,) * r, (_KZERO,) * r
        self.ensure(self.bound(max(D, self.window)))
        v = [KT.zero] * len(self.cols)
        for comp, poly_ in enumerate(R):
            for (deg,), c in poly_.terms():
                v[self.index[(deg, comp)]] = c
        coef = [KT.zero] * (r * (self.N + 1))
        for p, row, tr in self.rows:
            a = v[p]
            if not a:
                continue
            for k, x in enumerate(row):
                if x:
                    v[k] -= a * x
            for k, x in enumerate(tr):
                if x:
                    coef[k] += a * x
        nf = [dict() for _ in range(r)]
        for k, c in enumerate(v):
            if c:
                deg, comp = self.cols[k]
                nf[comp][(deg,)] = c
        b = [dict() for _ in range(r)]
        for k, c in enumerate(coef):
            if c:
                j, i = divmod(k, r)
                b[i][(j,)] = c
        return tuple(KX(d) for d in nf), tuple(KX(d) for d in b)

    def basis(self):
        """Non-pivot monomials ``(component, degree)`` of the image: a basis of the cokernel."""
        self.ensure(self.bound(self.window))
        return [
            (i, deg) for deg, i in reversed(self.cols)
            if deg <= self.window and self.index[(deg, i)] not in self.pivot_set
        ]


def _nv_engine(system: ShiftSystem) -> _NVEngine:
    data = _data(system)
    if data.nv is None:
        data.nv = _NVEngine(data)
    return data.nv


def normal_form(system: ShiftSystem, R):
    """Canonical representative of ``R`` (vector over K[x]) modulo the image of ``phi``.

    Returns ``(NF, b)`` with ``R = phi(b) + NF``.
    """
    return _nv_engine(system).normal_form(tuple(R))


@dataclass(frozen=True)
class NVData:
    """Reduction data at infinity.

    ``a`` and ``B`` give ``Delta_x V = (1/a) B V`` for ``V = diag(x^tau) W``;
    ``mu`` and ``delta`` bound the exponent window; ``basis`` lists the
    monomials ``x^k`` in component ``i`` (W-coordinates) that span a
    complement of the image of ``Delta_x`` on polynomial vectors.
    """

    a: RatFun
    B: tuple
    mu: int
    delta: int
    basis: tuple
    degree_shift: int
    eliminations: int
    window: int

    @property
    def dim(self) -> int:
        return len(self.basis)


def _v_data(system: ShiftSystem):
    r = system.r
    tau = system.tau
    X = POLY.gens[0]

    def xp(k, shift):
        base = X + shift
        return RatFun(base ** k, POLY.one) if k >= 0 else RatFun(POLY.one, base ** (-k))

    ent = [[RatFun(system.M[i][j], system.e) * xp(tau[i], 1) * xp(-tau[j], 0)
            - (1 if i == j else 0) for j in range(r)] for i in range(r)]
    a = reduce(lambda p, q: p.lcm(q), (c.den for row in ent for c in row), system.e)
    a = a.monic()
    B = tuple(tuple((c * a).num for c in row) for row in ent)
    return a, B


def build_NV(system: ShiftSystem) -> NVData:
    """Image echelon and cokernel basis of ``Delta_x`` on polynomial multiples of the basis."""
    eng = _nv_engine(system)
    a, B = _v_data(system)
    mu = min([-t for t in system.tau] + [0])
    delta = max([deg_x(a)] + [deg_x(c) for row in B for c in row if c]) - 1
    return NVData(RatFun(a, POLY.one), B, mu, delta, tuple(eng.basis()),
                  eng.h_col - eng.m, eng.h_col, eng.window)


@dataclass(frozen=True)
class FullDecomposition:
    """``f = Delta_x(g) + (1/d) P W + (1/a) Q V``.

    ``Q`` is given as rational functions in x whose denominators are powers
    of x (Laurent polynomials); ``R_nf`` is the same part in W-coordinates
    over the denominator ``e``.
    """

    system: ShiftSystem
    certificate: KVec
    d: object
    P: tuple
    R_nf: tuple
    a: Poly
    Q: tuple
    NV_basis: tuple

    @property
    def certificate_g(self) -> ModuleElement:
        return kvec_to_element(self.certificate, self.system)

    def is_zero_remainder(self) -> bool:
        return not any(self.P) and not any(self.R_nf)


def _kx_to_ratfun(p):
    num, den = from_kx(p)
    return RatFun(num, den)


def full_decompose(f: ModuleElement) -> FullDecomposition:
    """Remainder form followed by reduction of ``R`` to its normal form."""
    S = f.system
    rf = remainder_form(f)
    nf, b = normal_form(S, rf.R)
    cert = rf.certificate + _kvec_normalize(b, _KONE)
    a, _ = _v_data(S)
    X = POLY.gens[0]
    scale = RatFun(a, S.e)
    Q = []
    for i, c in enumerate(nf):
        tpow = S.tau[i]
        xq = RatFun(X ** (-tpow), POLY.one) if tpow <= 0 else RatFun(POLY.one, X ** tpow)
        Q.append(_kx_to_ratfun(c) * scale * xq)
    return FullDecomposition(
        S, cert, rf.d, rf.P, nf, a, tuple(Q), tuple(_nv_engine(S).basis()),
    )


def is_summable(f: ModuleElement):
    """Certificate ``g`` with ``f = Delta_x(g)``, verified exactly, or None.

    Examples
    ========

    >>> from telescoper.module import build_system, element
    >>> from telescoper.reduction import is_summable
    >>> S = build_system(1, 1, [[1]], 1, [[1]])
    >>> is_summable(element(S, ["1/(x*(x+1))"]))
    ModuleElement([-1] / (x))
    >>> is_summable(element(S, ["1/x"])) is None
    True
    """
    fd = full_decompose(f)
    if not fd.is_zero_remainder():
        return None
    g = fd.certificate_g
    if delta_x(g) != f:
        raise ArithmeticError("summability certificate failed verification")
    return g
