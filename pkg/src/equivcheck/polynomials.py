"""Exact multivariate polynomials and constant-coefficient differential operators.

Terms are kept as ``{exponent tuple: Fraction}`` with no zero coefficients.
Iteration and printing use graded lexicographic order (higher total degree
first, then lexicographically larger exponents first).
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from math import factorial, prod
from typing import Iterable, Mapping, Sequence

from .errors import DimensionMismatch, InvalidExponents
from .exact_linalg import RationalMatrix, Subspace, kernel, to_fraction, to_vector
from .groups import PermGroup, inverse


def grlex_key(exps: tuple) -> tuple:
    return (-sum(exps), tuple(-e for e in exps))


class MultiPoly:
    __slots__ = ("num_vars", "terms")

    def __init__(self, num_vars: int, terms: Mapping | Iterable = ()):
        self.num_vars = num_vars
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict = {}
        for exps, c in items:
            exps = tuple(int(e) for e in exps)
            if len(exps) != num_vars:
                raise DimensionMismatch(f"exponent vector {exps} has length != {num_vars}")
            if any(e < 0 for e in exps):
                raise InvalidExponents(f"negative exponent in {exps}")
            acc[exps] = acc.get(exps, Fraction(0)) + to_fraction(c)
        self.terms = {e: c for e, c in acc.items() if c != 0}

    @classmethod
    def _raw(cls, num_vars: int, terms: dict) -> "MultiPoly":
        p = cls.__new__(cls)
        p.num_vars = num_vars
        p.terms = terms
        return p

    # constructors
    @classmethod
    def constant(cls, num_vars: int, c=1) -> "MultiPoly":
        c = to_fraction(c)
        return cls._raw(num_vars, {(0,) * num_vars: c} if c else {})

    @classmethod
    def variable(cls, num_vars: int, i: int) -> "MultiPoly":
        e = [0] * num_vars
        e[i] = 1
        return cls._raw(num_vars, {tuple(e): Fraction(1)})

    @classmethod
    def linear_form(cls, coeffs: Sequence) -> "MultiPoly":
        n = len(coeffs)
        terms = {}
        for i, c in enumerate(to_vector(coeffs)):
            if c:
                e = [0] * n
                e[i] = 1
                terms[tuple(e)] = c
        return cls._raw(n, terms)

    @classmethod
    def monomial(cls, exps: Sequence[int], c=1) -> "MultiPoly":
        return cls(len(exps), [(tuple(exps), c)])

    # basic structure
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def coefficient(self, exps: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(exps), Fraction(0))

    def homogeneous_component(self, d: int) -> "MultiPoly":
        return MultiPoly._raw(self.num_vars, {e: c for e, c in self.terms.items() if sum(e) == d})

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]))

    # arithmetic
    def _check(self, other: "MultiPoly") -> None:
        if self.num_vars != other.num_vars:
            raise DimensionMismatch(f"{self.num_vars} vs {other.num_vars} variables")

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        return MultiPoly.constant(self.num_vars, other)

    def __add__(self, other) -> "MultiPoly":
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return MultiPoly._raw(self.num_vars, out)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly._raw(self.num_vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "MultiPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "MultiPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            c = to_fraction(other)
            if not c:
                return MultiPoly._raw(self.num_vars, {})
            return MultiPoly._raw(self.num_vars, {e: c * v for e, v in self.terms.items()})
        self._check(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly._raw(self.num_vars, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, c) -> "MultiPoly":
        return self * (1 / to_fraction(c))

    def __pow__(self, k: int) -> "MultiPoly":
        if k < 0:
            raise ValueError("negative power")
        result = MultiPoly.constant(self.num_vars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, MultiPoly):
            return self.num_vars == other.num_vars and self.terms == other.terms
        try:
            return self == MultiPoly.constant(self.num_vars, other)
        except TypeError:
            return NotImplemented

    def __hash__(self) -> int:
        return hash((self.num_vars, frozenset(self.terms.items())))

    # evaluation and substitution
    def __call__(self, point: Sequence):
        if len(point) != self.num_vars:
            raise DimensionMismatch("point has the wrong number of coordinates")
        total = 0
        for e, c in self.terms.items():
            total += c * prod(x ** k for x, k in zip(point, e) if k)
        return total

    def permute_variables(self, g: Sequence[int]) -> "MultiPoly":
        """``f(g^{-1} x)``: variable ``x_i`` is renamed ``x_{g(i)}``."""
        n = self.num_vars
        out = {}
        for e, c in self.terms.items():
            ne = [0] * n
            for i, k in enumerate(e):
                ne[g[i]] = k
            out[tuple(ne)] = c
        return MultiPoly._raw(n, out)

    def derivative(self, i: int) -> "MultiPoly":
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                ne = e[:i] + (k - 1,) + e[i + 1:]
                out[ne] = c * k
        return MultiPoly._raw(self.num_vars, out)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(f"x{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k)
            cs = str(c)
            if not mono:
                parts.append(cs)
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"MultiPoly({self.num_vars}, {self})"

    def to_json(self) -> list:
        return [[_fmt(c), list(e)] for e, c in self.sorted_terms()]


def _fmt(c: Fraction):
    return c.numerator if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def from_json(num_vars: int, terms: Sequence) -> MultiPoly:
    """Parse ``[[coefficient, [exponents...]], ...]``."""
    return MultiPoly(num_vars, [(tuple(e), to_fraction(c)) for c, e in terms])


def power_of_sum(n: int, d: int) -> MultiPoly:
    """``(x_1 + ... + x_n)^d``."""
    return MultiPoly.linear_form([1] * n) ** d


def product_monomial(n: int) -> MultiPoly:
    """``x_1 x_2 ... x_n``."""
    return MultiPoly.monomial([1] * n)


def directional_derivative(f: MultiPoly, c: Sequence) -> MultiPoly:
    """``D_c f = sum_i c_i df/dx_i``."""
    c = to_vector(c)
    if len(c) != f.num_vars:
        raise DimensionMismatch(f"direction of length {len(c)} for {f.num_vars} variables")
    out: dict = {}
    for e, coef in f.terms.items():
        for i, ci in enumerate(c):
            k = e[i]
            if ci and k:
                ne = e[:i] + (k - 1,) + e[i + 1:]
                out[ne] = out.get(ne, 0) + coef * ci * k
    return MultiPoly._raw(f.num_vars, {e: v for e, v in out.items() if v})


def _falling(k: int, j: int) -> int:
    r = 1
    for t in range(j):
        r *= k - t
    return r


def apply_operator(P: MultiPoly, f: MultiPoly) -> MultiPoly:
    """``P(d_1, ..., d_n) f``."""
    if P.num_vars != f.num_vars:
        raise DimensionMismatch(f"{P.num_vars} vs {f.num_vars} variables")
    out: dict = {}
    for a, p in P.terms.items():
        for b, c in f.terms.items():
            if all(bi >= ai for ai, bi in zip(a, b)):
                w = prod(_falling(bi, ai) for ai, bi in zip(a, b) if ai)
                e = tuple(bi - ai for ai, bi in zip(a, b))
                out[e] = out.get(e, 0) + p * c * w
    return MultiPoly._raw(f.num_vars, {e: v for e, v in out.items() if v})


def apolar_pairing(P: MultiPoly, f: MultiPoly) -> Fraction:
    """Constant term of ``P(d) f`` restricted to matching monomials: ``sum p_a f_a a!``."""
    total = Fraction(0)
    small, big = (P, f) if len(P.terms) <= len(f.terms) else (f, P)
    for e, c in small.terms.items():
        d = big.terms.get(e)
        if d:
            total += c * d * prod(factorial(k) for k in e if k > 1)
    return total


def is_invariant(f: MultiPoly, G: PermGroup) -> bool:
    if G.base_size != f.num_vars:
        raise DimensionMismatch("group and polynomial act on different numbers of variables")
    return all(f.permute_variables(g) == f for g in G.generators)


def reynolds(f: MultiPoly, G: PermGroup) -> MultiPoly:
    """Group average ``(1/|G|) sum_g f(g x)``."""
    if G.base_size != f.num_vars:
        raise DimensionMismatch("group and polynomial act on different numbers of variables")
    acc: dict = {}
    for g in G.elements:
        for e, c in f.permute_variables(inverse(g)).terms.items():
            acc[e] = acc.get(e, 0) + c
    k = Fraction(1, G.order)
    return MultiPoly._raw(f.num_vars, {e: v * k for e, v in acc.items() if v})


def symmetrized_monomial(a: Sequence[int], ell: int | None = None) -> MultiPoly:
    """``sum_{sigma in S_ell} x_{sigma(1)}^{a_1} ... x_{sigma(ell)}^{a_ell}``."""
    a = [int(x) for x in a]
    if ell is None:
        ell = len(a)
    if len(a) != ell:
        raise InvalidExponents(f"need {ell} exponents, got {len(a)}")
    if any(x < 0 for x in a) or any(x >= y for x, y in zip(a, a[1:])):
        raise InvalidExponents("exponents must be nonnegative and strictly increasing")
    acc: dict = {}
    for sigma in permutations(range(ell)):
        e = [0] * ell
        for k, s in enumerate(sigma):
            e[s] = a[k]
        acc[tuple(e)] = acc.get(tuple(e), 0) + 1
    return MultiPoly(ell, acc)


def orbit_sum(exps: Sequence[int], G: PermGroup) -> MultiPoly:
    """Sum of the distinct monomials in the ``G``-orbit of ``x^exps``."""
    base = MultiPoly.monomial(exps)
    seen = {base.permute_variables(g).sorted_terms()[0][0] for g in G.elements}
    return MultiPoly(len(exps), {e: 1 for e in seen})


@lru_cache(maxsize=None)
def monomials(n: int, d: int) -> tuple:
    """Exponent vectors of degree ``d`` in ``n`` variables, in grlex order."""
    if n == 0:
        return ((),) if d == 0 else ()
    out = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            out.append(prefix + (remaining,))
            return
        for k in range(remaining, -1, -1):
            rec(prefix + (k,), remaining - k, slots - 1)

    rec((), d, n)
    return tuple(out)


def _substitution_matrix(L: Subspace, d: int) -> RationalMatrix:
    """Linear map from degree-``d`` coefficients to coefficients of ``P(B^T t)``.

    ``B`` is the basis of ``L``; the kernel is the degree-``d`` slice of the
    vanishing ideal of ``L``.
    """
    n, k = L.ambient_dim, L.dim
    cols = monomials(n, d)
    row_index = {e: r for r, e in enumerate(monomials(k, d))}
    forms = [MultiPoly.linear_form(col) for col in L.basis.T.rows]  # x_i as a form in t
    powers: dict = {}

    def power(i, e):
        key = (i, e)
        if key not in powers:
            powers[key] = forms[i] ** e if e else MultiPoly.constant(k, 1)
        return powers[key]

    columns = []
    for e in cols:
        poly = MultiPoly.constant(k, 1)
        for i, ei in enumerate(e):
            if ei:
                poly = poly * power(i, ei)
        col = [Fraction(0)] * len(row_index)
        for te, c in poly.terms.items():
            col[row_index[te]] = c
        columns.append(col)
    return RationalMatrix._trusted(tuple(zip(*columns)), len(cols))


def _coeffs_to_poly(n: int, d: int, v: Sequence) -> MultiPoly:
    return MultiPoly._raw(n, {e: c for e, c in zip(monomials(n, d), v) if c})


def poly_to_coeffs(f: MultiPoly, d: int) -> tuple:
    """Coefficients of the degree-``d`` component of ``f`` in grlex monomial order."""
    return tuple(f.terms.get(e, Fraction(0)) for e in monomials(f.num_vars, d))


def vanishing_ideal_space(L: Subspace, d: int) -> Subspace:
    """Degree-``d`` forms vanishing on ``L``, as a subspace of coefficient space."""
    if d < 1:
        raise ValueError("degree must be >= 1")
    n = L.ambient_dim
    if L.dim == n:
        return Subspace.zero(len(monomials(n, d)))
    if L.dim == 0:
        return Subspace.full(len(monomials(n, d)))
    return kernel(_substitution_matrix(L, d))


def vanishing_ideal_graded(L: Subspace, d: int) -> list[MultiPoly]:
    n = L.ambient_dim
    return [_coeffs_to_poly(n, d, v) for v in vanishing_ideal_space(L, d).vectors()]


@lru_cache(maxsize=256)
def _annihilator_space(spaces: tuple, d: int) -> Subspace:
    n = spaces[0].ambient_dim
    # the zero subspace imposes no condition on forms of positive degree
    distinct = [L for L in dict.fromkeys(spaces) if L.dim > 0]
    if not distinct:
        return Subspace.full(len(monomials(n, d)))
    if any(L.dim == n for L in distinct):
        return Subspace.zero(len(monomials(n, d)))
    # I(L_1 u ... u L_k)_d = intersection of the I(L_i)_d = kernel of the stacked substitutions
    mats = [_substitution_matrix(L, d) for L in distinct]
    rows = tuple(r for M in mats for r in M.rows)
    return kernel(RationalMatrix._trusted(rows, len(monomials(n, d))))


def annihilator_space(family: Sequence[Subspace], d: int) -> Subspace:
    """Degree-``d`` slice of the ideal of the union, in coefficient coordinates."""
    if d < 1:
        raise ValueError("degree must be >= 1")
    family = tuple(family)
    if not family:
        raise ValueError("empty family")
    n = family[0].ambient_dim
    if any(L.ambient_dim != n for L in family):
        raise DimensionMismatch("subspaces live in different ambient spaces")
    return _annihilator_space(family, d)


def annihilator_graded(family: Sequence[Subspace], d: int) -> list[MultiPoly]:
    family = tuple(family)
    space = annihilator_space(family, d)
    n = family[0].ambient_dim
    return [_coeffs_to_poly(n, d, v) for v in space.vectors()]


def coefficient_space_poly(n: int, d: int, v: Sequence) -> MultiPoly:
    """Inverse of :func:`poly_to_coeffs` for homogeneous forms."""
    return _coeffs_to_poly(n, d, to_vector(v))
