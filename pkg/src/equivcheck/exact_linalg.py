"""Exact rational linear algebra over ``fractions.Fraction``.

Subspaces are stored by the nonzero rows of their reduced row echelon form,
which is canonical, so two subspaces are equal iff their bases are equal.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DimensionMismatch, NoSolution


def to_fraction(v) -> Fraction:
    """Convert ints, Fractions and ``"p/q"`` strings. Floats are rejected."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, bool):
        return Fraction(int(v))
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v.strip())
    if hasattr(v, "numerator") and hasattr(v, "denominator") and not isinstance(v, float):
        return Fraction(int(v.numerator), int(v.denominator))
    if hasattr(v, "__index__"):
        return Fraction(v.__index__())
    raise TypeError(f"cannot convert {v!r} to an exact rational")


def to_vector(v: Iterable) -> tuple:
    return tuple(to_fraction(x) for x in v)


class RationalMatrix:
    """Immutable dense matrix of Fractions, stored row-major."""

    __slots__ = ("rows", "ncols", "_hash")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        rows = tuple(to_vector(r) for r in rows)
        if ncols is None:
            if not rows:
                raise ValueError("ncols is required for a matrix with no rows")
            ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise DimensionMismatch("ragged rows")
        self.rows = rows
        self.ncols = ncols
        self._hash = None

    @classmethod
    def _trusted(cls, rows: tuple, ncols: int) -> "RationalMatrix":
        m = cls.__new__(cls)
        m.rows = rows
        m.ncols = ncols
        m._hash = None
        return m

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "RationalMatrix":
        z = Fraction(0)
        return cls._trusted(tuple((z,) * ncols for _ in range(nrows)), ncols)

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        one, z = Fraction(1), Fraction(0)
        return cls._trusted(tuple(tuple(one if i == j else z for j in range(n)) for i in range(n)), n)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple:
        return (self.nrows, self.ncols)

    def __getitem__(self, idx):
        i, j = idx
        return self.rows[i][j]

    def row(self, i: int) -> tuple:
        return self.rows[i]

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self.rows)

    @property
    def T(self) -> "RationalMatrix":
        if not self.rows:
            return RationalMatrix._trusted(tuple(() for _ in range(self.ncols)), 0)
        return RationalMatrix._trusted(tuple(zip(*self.rows)), self.nrows)

    def __matmul__(self, other):
        if isinstance(other, RationalMatrix):
            if self.ncols != other.nrows:
                raise DimensionMismatch(f"{self.shape} @ {other.shape}")
            cols = other.T.rows
            return RationalMatrix._trusted(
                tuple(tuple(_dot(r, c) for c in cols) for r in self.rows), other.ncols)
        v = to_vector(other)
        if len(v) != self.ncols:
            raise DimensionMismatch(f"{self.shape} @ vector of length {len(v)}")
        return tuple(_dot(r, v) for r in self.rows)

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} + {other.shape}")
        return RationalMatrix._trusted(
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)), self.ncols)

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        return self + other.scale(-1)

    def scale(self, c) -> "RationalMatrix":
        c = to_fraction(c)
        return RationalMatrix._trusted(tuple(tuple(c * a for a in r) for r in self.rows), self.ncols)

    def flatten(self) -> tuple:
        return tuple(a for r in self.rows for a in r)

    def is_zero(self) -> bool:
        return all(a == 0 for r in self.rows for a in r)

    def to_list(self) -> list:
        return [[_fmt(a) for a in r] for r in self.rows]

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.ncols == other.ncols and self.rows == other.rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ncols, self.rows))
        return self._hash

    def __repr__(self) -> str:
        return f"RationalMatrix({self.to_list()})"


def _dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    s = Fraction(0)
    for x, y in zip(a, b):
        if x and y:
            s += x * y
    return s


def _fmt(a: Fraction):
    return a.numerator if a.denominator == 1 else f"{a.numerator}/{a.denominator}"


def vstack(mats: Sequence[RationalMatrix], ncols: int | None = None) -> RationalMatrix:
    if ncols is None:
        ncols = mats[0].ncols
    if any(m.ncols != ncols for m in mats):
        raise DimensionMismatch("vstack of matrices with different column counts")
    return RationalMatrix._trusted(tuple(r for m in mats for r in m.rows), ncols)


def _rref_rows(rows: Iterable[Sequence[Fraction]], ncols: int) -> tuple[list, list]:
    """Nonzero RREF rows and their pivot columns."""
    work = [list(r) for r in rows if any(r)]
    pivots: list = []
    r = 0
    for c in range(ncols):
        if r == len(work):
            break
        p = next((i for i in range(r, len(work)) if work[i][c] != 0), None)
        if p is None:
            continue
        work[r], work[p] = work[p], work[r]
        pr = work[r]
        inv = 1 / pr[c]
        if inv != 1:
            for j in range(c, ncols):
                if pr[j]:
                    pr[j] *= inv
        nz = [j for j in range(c, ncols) if pr[j]]
        for i in range(len(work)):
            if i != r:
                f = work[i][c]
                if f:
                    wi = work[i]
                    for j in nz:
                        wi[j] -= f * pr[j]
        pivots.append(c)
        r += 1
    return work[:r], pivots


def rref(M: RationalMatrix) -> RationalMatrix:
    rows, _ = _rref_rows(M.rows, M.ncols)
    z = (Fraction(0),) * M.ncols
    padded = [tuple(r) for r in rows] + [z] * (M.nrows - len(rows))
    return RationalMatrix._trusted(tuple(padded), M.ncols)


def rank(M: RationalMatrix) -> int:
    return len(_rref_rows(M.rows, M.ncols)[1])


class Subspace:
    """A subspace of Q^n, held as its canonical RREF basis (one vector per row)."""

    __slots__ = ("ambient_dim", "basis", "pivots")

    def __init__(self, ambient_dim: int, basis: RationalMatrix, pivots: tuple):
        self.ambient_dim = ambient_dim
        self.basis = basis
        self.pivots = pivots

    @classmethod
    def span(cls, vectors: Iterable[Iterable], ambient_dim: int) -> "Subspace":
        vecs = [to_vector(v) for v in vectors]
        if any(len(v) != ambient_dim for v in vecs):
            raise DimensionMismatch("vector length differs from the ambient dimension")
        rows, piv = _rref_rows(vecs, ambient_dim)
        return cls(ambient_dim, RationalMatrix._trusted(tuple(tuple(r) for r in rows), ambient_dim),
                   tuple(piv))

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls.span([], ambient_dim)

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls.span(RationalMatrix.identity(ambient_dim).rows, ambient_dim)

    @property
    def dim(self) -> int:
        return self.basis.nrows

    def vectors(self) -> tuple:
        return self.basis.rows

    def contains(self, v: Iterable) -> bool:
        v = list(to_vector(v))
        if len(v) != self.ambient_dim:
            raise DimensionMismatch("vector length differs from the ambient dimension")
        for row, p in zip(self.basis.rows, self.pivots):
            f = v[p]
            if f:
                for j in range(p, self.ambient_dim):
                    if row[j]:
                        v[j] -= f * row[j]
        return not any(v)

    def issubspace(self, other: "Subspace") -> bool:
        return all(other.contains(v) for v in self.basis.rows)

    def __add__(self, other: "Subspace") -> "Subspace":
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch("subspaces live in different ambient spaces")
        return Subspace.span(self.basis.rows + other.basis.rows, self.ambient_dim)

    def orthogonal_complement(self) -> "Subspace":
        return kernel(self.basis) if self.dim else Subspace.full(self.ambient_dim)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.basis == other.basis

    def __hash__(self) -> int:
        return hash((self.ambient_dim, self.basis))

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim}, basis={self.basis.to_list()})"


def kernel(M: RationalMatrix) -> Subspace:
    """Null space ``{v : M v = 0}``."""
    n = M.ncols
    rows, piv = _rref_rows(M.rows, n)
    pivset = set(piv)
    vecs = []
    for free in range(n):
        if free in pivset:
            continue
        v = [Fraction(0)] * n
        v[free] = Fraction(1)
        for row, p in zip(rows, piv):
            if row[free]:
                v[p] = -row[free]
        vecs.append(v)
    return Subspace.span(vecs, n)


def subspace_intersection(A: Subspace, B: Subspace) -> Subspace:
    if A.ambient_dim != B.ambient_dim:
        raise DimensionMismatch("subspaces live in different ambient spaces")
    n = A.ambient_dim
    if A.dim == 0 or B.dim == 0:
        return Subspace.zero(n)
    if A.dim == n:
        return B
    if B.dim == n:
        return A
    # A ∩ B = (A^perp + B^perp)^perp
    constraints = A.orthogonal_complement().basis.rows + B.orthogonal_complement().basis.rows
    return kernel(RationalMatrix._trusted(constraints, n))


def solve_least_norm(M: RationalMatrix, b: Sequence) -> tuple:
    """The minimum Euclidean norm solution of ``M x = b``, exactly.

    The solution lies in the row space of ``M``: ``x = R^T y`` with ``R`` the
    RREF basis of the row space, and ``(M R^T) y = b`` has a unique solution
    whenever the system is consistent.
    """
    b = to_vector(b)
    if len(b) != M.nrows:
        raise DimensionMismatch(f"rhs length {len(b)} != {M.nrows} rows")
    n = M.ncols
    R_rows, _ = _rref_rows(M.rows, n)
    r = len(R_rows)
    if r == 0:
        if any(b):
            raise NoSolution("inconsistent system")
        return (Fraction(0),) * n
    R = RationalMatrix._trusted(tuple(tuple(x) for x in R_rows), n)
    A = M @ R.T  # nrows x r, full column rank
    aug = [list(row) + [bi] for row, bi in zip(A.rows, b)]
    rows, piv = _rref_rows(aug, r + 1)
    if piv and piv[-1] == r:
        raise NoSolution("inconsistent system")
    y = [Fraction(0)] * r
    for row, p in zip(rows, piv):
        y[p] = row[r]
    return tuple(_dot(col, y) for col in R.T.rows)
