"""Modules over the shift Ore algebra presented by shift matrices.

A :class:`ShiftSystem` fixes a basis ``W`` of an ``r``-dimensional module
with

    S_x W = (1/e) M W,        S_t W = (1/e_t) M_t W,

so that ``S_x (b W) = sigma_x(b) (1/e) M W`` for a row vector ``b`` of rational
functions.  Elements are :class:`ModuleElement` values ``a W / u`` with
polynomial numerators and a monic common denominator.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property, reduce

from sympy.polys.matrices import DomainMatrix

from .exact import (
    POLY, Poly, RatFun, bivar_factor_x, deg_x, monic, poly, shift_poly,
    format_poly,
)
from .shifts import is_integer_linear, shift_equivalent_x

__all__ = [
    "ShiftSystem", "ModuleElement", "SuitabilityReport",
    "SingularMatrix", "ContentNotCoprime", "DimensionMismatch", "ZeroDenominator",
    "build_system", "normalize_element", "element", "zero_element",
    "apply_Sx", "apply_Sx_inv", "apply_St", "delta_x",
    "check_compatibility", "check_suitable_properties",
    "matrix_det", "matrix_adjugate",
]


class SingularMatrix(ArithmeticError):
    """A shift matrix is not invertible over Q(t, x)."""


class ContentNotCoprime(UserWarning):
    """A shift matrix shared a common factor with its denominator and was reduced."""


class DimensionMismatch(ValueError):
    """Matrix or vector sizes disagree with the declared dimension."""


class ZeroDenominator(ZeroDivisionError):
    """An element was given with denominator 0."""


_DOMAIN = POLY.to_domain()


def _dm(M):
    return DomainMatrix([list(row) for row in M], (len(M), len(M)), _DOMAIN)


def matrix_det(M) -> Poly:
    return _dm(M).det()


def matrix_adjugate(M):
    return tuple(tuple(row) for row in _dm(M).adjugate().to_list())


def _shift_matrix(M, i, j):
    return tuple(tuple(shift_poly(c, i, j) for c in row) for row in M)


def _vec_mat(a, M):
    r = len(a)
    return tuple(sum((a[i] * M[i][j] for i in range(r)), POLY.zero) for j in range(r))


def _mat_mul(A, B):
    r = len(A)
    return tuple(
        tuple(sum((A[i][k] * B[k][j] for k in range(r)), POLY.zero) for j in range(r))
        for i in range(r)
    )


def _normalize_pair(den, M, what):
    """Divide ``den`` and ``M`` by their common content; make ``den`` monic."""
    g = reduce(lambda x, y: x.gcd(y), (c for row in M for c in row), den)
    if not g.is_ground:
        warnings.warn(
            f"{what}: entries share the factor {format_poly(monic(g))} with the denominator; reduced",
            ContentNotCoprime, stacklevel=3,
        )
        den = den.quo(g)
        M = tuple(tuple(c.quo(g) for c in row) for row in M)
    lc = den.LC
    if lc != 1:
        den = den.quo_ground(lc)
        M = tuple(tuple(c.quo_ground(lc) for c in row) for row in M)
    return den, M


@dataclass(frozen=True, eq=False)
class ShiftSystem:
    """Presentation of a module by its x- and t-shift matrices.

    Attributes
    ----------
    r : int
        Dimension of the module.
    e, M : Poly, tuple of tuples of Poly
        ``S_x W = (1/e) M W``.
    e_t, M_t : Poly, tuple of tuples of Poly
        ``S_t W = (1/e_t) M_t W``.
    e_inv, M_inv : Poly, tuple of tuples of Poly
        ``W = (1/e_inv) M_inv S_x W``, i.e. ``(1/e_inv) M_inv = ((1/e) M)^-1``.
    orbit_reps : tuple of Poly
        Monic irreducible polynomials of K[x], one per x-shift orbit that the
        reduction must treat specially.
    tau : tuple of int
        Normalization exponents at infinity (``V = diag(x^tau) W``).
    """

    r: int
    e: Poly
    M: tuple
    e_t: Poly
    M_t: tuple
    e_inv: Poly
    M_inv: tuple
    det_M: Poly
    det_M_t: Poly
    orbit_reps: tuple
    tau: tuple

    def __repr__(self):
        return f"ShiftSystem(r={self.r}, e={format_poly(self.e)!r}, e_t={format_poly(self.e_t)!r})"

    @cached_property
    def is_trivial(self) -> bool:
        ident = all(
            (self.M[i][j] == (self.e if i == j else POLY.zero))
            for i in range(self.r) for j in range(self.r)
        )
        return ident and self.e.is_one


def build_system(r, e, M, e_t, M_t, orbit_reps=None, tau=None) -> ShiftSystem:
    """Validate shift-matrix data and derive the inverse x-shift.

    Parameters
    ----------
    r : int
        Dimension.
    e, M, e_t, M_t
        Polynomials (or polynomial text) with ``S_x W = (1/e) M W`` and
        ``S_t W = (1/e_t) M_t W``.
    orbit_reps : sequence, optional
        Orbit representatives.  Defaults to the irreducible K[x]-factors of
        ``e * det(M)``; factors of ``e * det(M)`` whose x-orbit is not covered
        by a supplied representative are added with a warning.
    tau : sequence of int, optional
        Normalization exponents at infinity, default all zero.

    Raises
    ------
    DimensionMismatch
        If a matrix is not ``r x r``.
    SingularMatrix
        If ``det(M)`` or ``det(M_t)`` vanishes, or a denominator is zero.

    Examples
    ========

    >>> from telescoper.module import build_system
    >>> S = build_system(1, "(1+x)^3", [["(t-x)^3"]], "(1+t-x)^3", [["(1+t)^3"]])
    >>> from telescoper.exact import format_poly
    >>> sorted(format_poly(p) for p in S.orbit_reps)
    ['x + 1', 'x - t']
    """
    r = int(r)
    if r < 1:
        raise DimensionMismatch("dimension must be positive")
    mats = []
    for name, mat in (("M", M), ("M_t", M_t)):
        if len(mat) != r or any(len(row) != r for row in mat):
            raise DimensionMismatch(f"{name} must be {r}x{r}")
        mats.append(tuple(tuple(poly(c) for c in row) for row in mat))
    M, M_t = mats
    e, e_t = poly(e), poly(e_t)
    if not e or not e_t:
        raise SingularMatrix("shift denominators must be nonzero")
    e, M = _normalize_pair(e, M, "M")
    e_t, M_t = _normalize_pair(e_t, M_t, "M_t")
    det_M, det_Mt = matrix_det(M), matrix_det(M_t)
    if not det_M:
        raise SingularMatrix("det(M) = 0")
    if not det_Mt:
        raise SingularMatrix("det(M_t) = 0")
    adj = matrix_adjugate(M)
    num = tuple(tuple(e * c for c in row) for row in adj)
    e_inv, M_inv = _normalize_pair_quiet(det_M, num)

    default = [f for f, _ in bivar_factor_x(e * det_M)]
    if orbit_reps is None:
        reps = default
    else:
        reps = []
        for p in orbit_reps:
            p = monic(poly(p))
            if deg_x(p) < 1:
                raise ValueError("orbit representatives must involve x")
            if not any(shift_equivalent_x(q, p) is not None for q in reps):
                reps.append(p)
        for f in default:
            if not any(shift_equivalent_x(q, f) is not None for q in reps):
                warnings.warn(
                    f"orbit of {format_poly(f)} has no representative; using the factor itself",
                    stacklevel=2,
                )
                reps.append(f)
    if tau is None:
        tau = (0,) * r
    tau = tuple(int(v) for v in tau)
    if len(tau) != r:
        raise DimensionMismatch(f"tau must have {r} entries")
    return ShiftSystem(r, e, M, e_t, M_t, e_inv, M_inv, det_M, det_Mt, tuple(reps), tau)


def _normalize_pair_quiet(den, M):
    g = reduce(lambda x, y: x.gcd(y), (c for row in M for c in row), den)
    den, M = den.quo(g), tuple(tuple(c.quo(g) for c in row) for row in M)
    lc = den.LC
    return den.quo_ground(lc), tuple(tuple(c.quo_ground(lc) for c in row) for row in M)


@dataclass(frozen=True, eq=False)
class ModuleElement:
    """``f = (a_1 W_1 + ... + a_r W_r) / u`` with ``gcd(a, u) = 1`` and ``u`` monic."""

    system: ShiftSystem
    a: tuple
    u: Poly

    def __eq__(self, other):
        if not isinstance(other, ModuleElement):
            return NotImplemented
        return self.system is other.system and self.a == other.a and self.u == other.u

    def __hash__(self):
        return hash((id(self.system), tuple(str(c) for c in self.a), str(self.u)))

    def __bool__(self):
        return any(self.a)

    def is_zero(self) -> bool:
        return not any(self.a)

    def coefficients(self) -> list:
        """The rational coefficients ``a_i / u`` of the basis vectors."""
        return [RatFun(c, self.u) for c in self.a]

    def __add__(self, other):
        if not isinstance(other, ModuleElement):
            return NotImplemented
        _check_same(self, other)
        g = self.u.gcd(other.u)
        cs, co = other.u.quo(g), self.u.quo(g)
        a = tuple(x * cs + y * co for x, y in zip(self.a, other.a))
        return normalize_element(a, self.u * cs, self.system)

    def __neg__(self):
        return ModuleElement(self.system, tuple(-c for c in self.a), self.u)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "ModuleElement":
        """Multiply by a rational function ``c`` (RatFun, Poly, int or text)."""
        c = RatFun.coerce(c)
        return normalize_element(tuple(x * c.num for x in self.a), self.u * c.den, self.system)

    def __rmul__(self, c):
        return self.scale(c)

    def __repr__(self):
        nums = ", ".join(format_poly(c) for c in self.a)
        return f"ModuleElement([{nums}] / ({format_poly(self.u)}))"


def _check_same(f, g):
    if f.system is not g.system:
        raise ValueError("elements belong to different systems")


def normalize_element(a, u, system: ShiftSystem) -> ModuleElement:
    """Build ``a W / u`` with the gcd divided out and ``u`` monic.

    Raises
    ------
    ZeroDenominator
        If ``u`` is zero.
    DimensionMismatch
        If ``a`` does not have ``system.r`` entries.
    """
    a = tuple(poly(c) for c in a)
    u = poly(u)
    if len(a) != system.r:
        raise DimensionMismatch(f"expected {system.r} coefficients, got {len(a)}")
    if not u:
        raise ZeroDenominator("element denominator is zero")
    if not any(a):
        return ModuleElement(system, tuple(POLY.zero for _ in a), POLY.one)
    g = reduce(lambda x, y: x.gcd(y), a, u)
    if not g.is_one:
        a = tuple(c.quo(g) for c in a)
        u = u.quo(g)
    lc = u.LC
    if lc != 1:
        a = tuple(c.quo_ground(lc) for c in a)
        u = u.quo_ground(lc)
    return ModuleElement(system, a, u)


def element(system: ShiftSystem, coeffs, den=1) -> ModuleElement:
    """Convenience constructor; ``coeffs`` may be text, polynomials or :class:`RatFun`."""
    rats = [RatFun.coerce(c) for c in coeffs]
    d = reduce(lambda x, y: x.lcm(y), (c.den for c in rats), POLY.one)
    a = [c.num * d.quo(c.den) for c in rats]
    return normalize_element(a, d * poly(den), system)


def zero_element(system: ShiftSystem) -> ModuleElement:
    return ModuleElement(system, tuple(POLY.zero for _ in range(system.r)), POLY.one)


def apply_Sx(f: ModuleElement) -> ModuleElement:
    """``S_x f``: shift the coefficients in x and multiply by ``(1/e) M``."""
    S = f.system
    a = _vec_mat(tuple(shift_poly(c, 0, 1) for c in f.a), S.M)
    return normalize_element(a, shift_poly(f.u, 0, 1) * S.e, S)


def apply_Sx_inv(f: ModuleElement) -> ModuleElement:
    """``S_x^-1 f``, using ``sigma_x^-1((1/e_inv) M_inv)``."""
    S = f.system
    a = _vec_mat(tuple(shift_poly(c, 0, -1) for c in f.a), _shift_matrix(S.M_inv, 0, -1))
    return normalize_element(a, shift_poly(f.u, 0, -1) * shift_poly(S.e_inv, 0, -1), S)


def apply_St(f: ModuleElement) -> ModuleElement:
    """``S_t f``: shift the coefficients in t and multiply by ``(1/e_t) M_t``."""
    S = f.system
    a = _vec_mat(tuple(shift_poly(c, 1, 0) for c in f.a), S.M_t)
    return normalize_element(a, shift_poly(f.u, 1, 0) * S.e_t, S)


def delta_x(f: ModuleElement) -> ModuleElement:
    """``(S_x - 1) f``."""
    return apply_Sx(f) - f


def check_compatibility(system: ShiftSystem):
    """Whether ``sigma_t((1/e)M) (1/e_t)M_t = sigma_x((1/e_t)M_t) (1/e)M``.

    Returns
    -------
    (bool, tuple or None)
        The verdict and, on failure, the first offending entry ``(i, j)``.
    """
    S = system
    lhs = _mat_mul(_shift_matrix(S.M, 1, 0), S.M_t)
    rhs = _mat_mul(_shift_matrix(S.M_t, 0, 1), S.M)
    cl = shift_poly(S.e_t, 0, 1) * S.e
    cr = shift_poly(S.e, 1, 0) * S.e_t
    for i in range(S.r):
        for j in range(S.r):
            if lhs[i][j] * cl != rhs[i][j] * cr:
                return False, (i, j)
    return True, None


@dataclass(frozen=True)
class SuitabilityReport:
    """Checkable consequences of a suitable basis.

    ``e_shift_free`` and ``det_M_shift_free``: no two irreducible factors
    differ by a nonzero x-shift.  ``cross_gcd``: ``gcd(det M, sigma_x^i(e)) = 1``
    for every ``i != 0``.  ``integer_linear``: ``e``, ``det M``, ``e_t`` and
    ``det M_t`` are all integer-linear (individual verdicts in ``details``).
    """

    e_shift_free: bool
    det_M_shift_free: bool
    cross_gcd: bool
    integer_linear: bool
    details: tuple

    @property
    def all_ok(self) -> bool:
        return self.e_shift_free and self.det_M_shift_free and self.cross_gcd and self.integer_linear

    def as_dict(self) -> dict:
        return {
            "e_shift_free": self.e_shift_free,
            "det_M_shift_free": self.det_M_shift_free,
            "cross_gcd": self.cross_gcd,
            "integer_linear": self.integer_linear,
            **{f"integer_linear[{k}]": v for k, v in self.details},
        }


def _shift_free(p: Poly) -> bool:
    facs = [f for f, _ in bivar_factor_x(p)]
    return not any(
        shift_equivalent_x(f, g) is not None
        for i, f in enumerate(facs) for g in facs[i + 1:]
    )


def check_suitable_properties(system: ShiftSystem) -> SuitabilityReport:
    S = system
    e_facs = [f for f, _ in bivar_factor_x(S.e)]
    d_facs = [f for f, _ in bivar_factor_x(S.det_M)]
    cross = not any(
        shift_equivalent_x(q, p) not in (None, 0) for q in e_facs for p in d_facs
    )
    details = tuple(
        (name, is_integer_linear(p))
        for name, p in (("e", S.e), ("det_M", S.det_M), ("e_t", S.e_t), ("det_M_t", S.det_M_t))
    )
    return SuitabilityReport(
        _shift_free(S.e), _shift_free(S.det_M), cross, all(v for _, v in details), details,
    )
