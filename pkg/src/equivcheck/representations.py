"""Permutation representations and equivariant layer spaces.

A layer space is the affine family ``x -> sum_t w_t phi^t(x) + sum_j y_j 1_{X_j}``
where the ``phi^t`` are equivariant linear maps and ``1_{X_j}`` are the
indicator vectors of the target orbits.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from . import groups
from .errors import DimensionMismatch, GroupMismatch, InvalidAction, NotEquivariant, OutOfRange
from .exact_linalg import RationalMatrix, Subspace, kernel, rank, to_vector
from .groups import PermGroup

_ZERO, _ONE = Fraction(0), Fraction(1)


@dataclass(frozen=True, eq=False)
class GSet:
    """A finite set ``range(size)`` with a ``group`` action.

    ``images[g]`` is the permutation of the points induced by the group element ``g``.
    """

    size: int
    group: PermGroup
    images: dict = field(repr=False)

    def act(self, g, x: int) -> int:
        return self.images[tuple(g)][x]

    @classmethod
    def from_generator_images(cls, group: PermGroup, size: int, gen_images: dict) -> "GSet":
        """Extend generator images to a homomorphism, failing on any inconsistency."""
        e = group.identity
        ident = tuple(range(size))
        gens = {}
        for g in group.generators:
            img = gen_images[g]
            try:
                gens[g] = groups.as_perm(img, size)
            except Exception as exc:
                raise InvalidAction(str(exc)) from exc
        images = {e: ident}
        queue = deque([e])
        while queue:
            h = queue.popleft()
            ih = images[h]
            for g, ig in gens.items():
                gh = groups.compose(g, h)
                img = groups.compose(ig, ih)
                prev = images.get(gh)
                if prev is None:
                    images[gh] = img
                    queue.append(gh)
                elif prev != img:
                    raise InvalidAction("generator images do not define a group action")
        if len(images) != group.order:
            raise InvalidAction("generators do not reach every group element")
        return cls(size, group, images)

    def orbits(self) -> list[list[int]]:
        return groups.orbits(self.group, self.size, self.act)


def natural_gset(G: PermGroup) -> GSet:
    return GSet(G.base_size, G, {g: g for g in G.elements})


def trivial_gset(G: PermGroup, size: int = 1) -> GSet:
    ident = tuple(range(size))
    return GSet(size, G, {g: ident for g in G.elements})


def coset_gset(G: PermGroup, H: PermGroup) -> GSet:
    """The G-set ``G/H`` of left cosets."""
    space = groups.left_cosets(G, H)
    return GSet(len(space), G, {g: space.permutation_of(g) for g in G.elements})


def regular_gset(G: PermGroup) -> GSet:
    return coset_gset(G, groups.trivial_group(G.base_size))


def _same_group(X: GSet, Y: GSet) -> None:
    if X.group is not Y.group and X.group != Y.group:
        raise GroupMismatch("G-sets carry different groups")


def product_gset(X: GSet, Y: GSet) -> GSet:
    """``X x Y`` with the diagonal action; point ``(x, y)`` has index ``x*|Y| + y``."""
    _same_group(X, Y)
    ny = Y.size
    images = {}
    for g in X.group.elements:
        gx, gy = X.images[g], Y.images[g]
        images[g] = tuple(gx[x] * ny + gy[y] for x in range(X.size) for y in range(ny))
    return GSet(X.size * ny, X.group, images)


def disjoint_union_gset(X: GSet, Y: GSet) -> GSet:
    _same_group(X, Y)
    nx = X.size
    images = {g: X.images[g] + tuple(nx + y for y in Y.images[g]) for g in X.group.elements}
    return GSet(nx + Y.size, X.group, images)


@dataclass(frozen=True, eq=False)
class PermRep:
    """The permutation representation ``R^X`` with ``g(e_x) = e_{gx}``."""

    gset: GSet

    @property
    def dim(self) -> int:
        return self.gset.size

    @property
    def group(self) -> PermGroup:
        return self.gset.group

    def matrix(self, g) -> RationalMatrix:
        img = self.gset.images[tuple(g)]
        n = self.dim
        rows = [[_ZERO] * n for _ in range(n)]
        for x, gx in enumerate(img):
            rows[gx][x] = _ONE
        return RationalMatrix._trusted(tuple(map(tuple, rows)), n)

    def act(self, g, v: Sequence) -> list:
        return groups.act_on_vector(self.gset.images[tuple(g)], v)


def perm_rep(gset: GSet) -> PermRep:
    G = gset.group
    for g in G.generators:
        if sorted(gset.images[g]) != list(range(gset.size)):
            raise InvalidAction("generator does not permute the points")
    return PermRep(gset)


def natural_rep(G: PermGroup) -> PermRep:
    return PermRep(natural_gset(G))


def trivial_rep(G: PermGroup, dim: int = 1) -> PermRep:
    return PermRep(trivial_gset(G, dim))


def coset_rep(G: PermGroup, H: PermGroup) -> PermRep:
    return PermRep(coset_gset(G, H))


def regular_rep(G: PermGroup) -> PermRep:
    return PermRep(regular_gset(G))


def direct_sum(V: PermRep, W: PermRep) -> PermRep:
    return PermRep(disjoint_union_gset(V.gset, W.gset))


def tensor_product(V: PermRep, W: PermRep) -> PermRep:
    return PermRep(product_gset(V.gset, W.gset))


def tensor_and_sum(V: PermRep, W: PermRep) -> tuple[PermRep, PermRep]:
    """``(V + W, V x W)`` as permutation representations."""
    return direct_sum(V, W), tensor_product(V, W)


def _check_pair(V: PermRep, W: PermRep) -> None:
    _same_group(V.gset, W.gset)


def equivariant_hom_basis(V: PermRep, W: PermRep) -> list[RationalMatrix]:
    """0/1 indicator matrices of the orbits of G on ``Y x X``.

    Orbits are ordered by their minimal ``(row, col)`` pair.
    """
    _check_pair(V, W)
    nx, ny = V.dim, W.dim
    if nx == 0 or ny == 0:
        return []
    gens = [(W.gset.images[g], V.gset.images[g]) for g in V.group.generators]
    label = [-1] * (nx * ny)
    n_orbits = 0
    for start in range(nx * ny):
        if label[start] >= 0:
            continue
        label[start] = n_orbits
        stack = [start]
        while stack:
            p = stack.pop()
            y, x = divmod(p, nx)
            for gy, gx in gens:
                q = gy[y] * nx + gx[x]
                if label[q] < 0:
                    label[q] = n_orbits
                    stack.append(q)
        n_orbits += 1
    basis = []
    for k in range(n_orbits):
        basis.append(RationalMatrix._trusted(
            tuple(tuple(_ONE if label[y * nx + x] == k else _ZERO for x in range(nx)) for y in range(ny)),
            nx))
    return basis


def hom_dimension(V: PermRep, W: PermRep) -> int:
    return len(equivariant_hom_basis(V, W))


def orbit_indicators(W: PermRep) -> list[tuple]:
    out = []
    for orb in W.gset.orbits():
        members = set(orb)
        out.append(tuple(_ONE if x in members else _ZERO for x in range(W.dim)))
    return out


def fixed_point_space(W: PermRep) -> Subspace:
    return Subspace.span(orbit_indicators(W), W.dim)


def verify_equivariance(M: RationalMatrix, V: PermRep, W: PermRep) -> bool:
    """True iff ``P_W(g) M = M P_V(g)`` for every generator ``g``."""
    _check_pair(V, W)
    if M.shape != (W.dim, V.dim):
        raise DimensionMismatch(f"matrix shape {M.shape} != {(W.dim, V.dim)}")
    for g in V.group.generators:
        gy, gx = W.gset.images[g], V.gset.images[g]
        for y in range(W.dim):
            row, grow = M.rows[y], M.rows[gy[y]]
            for x in range(V.dim):
                if grow[gx[x]] != row[x]:
                    return False
    return True


@dataclass(frozen=True, eq=False)
class LayerSpace:
    source: PermRep
    target: PermRep
    linear_basis: tuple
    bias_orbits: tuple
    name: str = "layer"

    @classmethod
    def custom(cls, V: PermRep, W: PermRep, matrices: Sequence, name: str = "custom") -> "LayerSpace":
        """Validate user matrices as equivariant and independent; never repair them."""
        _check_pair(V, W)
        mats = [m if isinstance(m, RationalMatrix) else RationalMatrix(m, V.dim) for m in matrices]
        for k, m in enumerate(mats):
            if not verify_equivariance(m, V, W):
                raise NotEquivariant(f"matrix {k} is not G-equivariant")
        if mats and rank(RationalMatrix([m.flatten() for m in mats])) != len(mats):
            raise ValueError("linear basis matrices are linearly dependent")
        return cls(V, W, tuple(mats), tuple(orbit_indicators(W)), name)

    @property
    def m(self) -> int:
        return len(self.linear_basis)

    def with_basis_change(self, T: Sequence[Sequence]) -> "LayerSpace":
        """New basis ``psi^s = sum_t T[s][t] phi^t`` for an invertible ``T``."""
        T = T if isinstance(T, RationalMatrix) else RationalMatrix(T, self.m)
        if T.shape != (self.m, self.m) or rank(T) != self.m:
            raise ValueError("basis change must be an invertible m x m matrix")
        new = []
        for coeffs in T.rows:
            acc = RationalMatrix.zeros(self.target.dim, self.source.dim)
            for c, phi in zip(coeffs, self.linear_basis):
                if c:
                    acc = acc + phi.scale(c)
            new.append(acc)
        return LayerSpace(self.source, self.target, tuple(new), self.bias_orbits, self.name)

    def linear_span(self) -> Subspace:
        n = self.source.dim * self.target.dim
        return Subspace.span([m.flatten() for m in self.linear_basis], n)


def layer_full(V: PermRep, W: PermRep, name: str = "full") -> LayerSpace:
    _check_pair(V, W)
    return LayerSpace(V, W, tuple(equivariant_hom_basis(V, W)), tuple(orbit_indicators(W)), name)


def circulant_unit(n: int, i: int) -> RationalMatrix:
    """``A(e_i)`` for 1-based ``i``: the shift by ``i - 1``, so ``A(e_2) e_1 = e_2``."""
    return RationalMatrix._trusted(
        tuple(tuple(_ONE if (r - c) % n == i - 1 else _ZERO for c in range(n)) for r in range(n)), n)


def layer_conv(n: int, k: int) -> LayerSpace:
    """Width-``k`` circular convolutions ``sum_{i<=k} w_i A(e_i) v + y 1``."""
    if not 1 <= k <= n:
        raise OutOfRange(f"filter width {k} outside 1..{n}")
    V = natural_rep(groups.cyclic_group(n))
    basis = tuple(circulant_unit(n, i) for i in range(1, k + 1))
    return LayerSpace(V, V, basis, tuple(orbit_indicators(V)), f"conv{k}")


def layer_pointnet(n: int) -> LayerSpace:
    """``Aff_{S_n}(R^n, R^n)`` in the basis ``{id, 11^T}`` (just ``{id}`` when n = 1)."""
    V = natural_rep(groups.symmetric_group(n))
    basis = [RationalMatrix.identity(n)]
    if n > 1:
        basis.append(RationalMatrix._trusted(tuple((_ONE,) * n for _ in range(n)), n))
    return LayerSpace(V, V, tuple(basis), tuple(orbit_indicators(V)), "pointnet")


def layer_invariant(V: PermRep) -> LayerSpace:
    return layer_full(V, trivial_rep(V.group), name="invariant")


def layer_regular(G: PermGroup, V: PermRep | None = None) -> LayerSpace:
    """``Aff_G(V, R^G)``, the regular hidden representation."""
    V = V or natural_rep(G)
    return layer_full(V, regular_rep(G), name="regular")


@dataclass(frozen=True, eq=False)
class BasisMapFamily:
    """Per-output-coordinate maps ``phi_i: x -> (phi^1_i(x), ..., phi^m_i(x))``."""

    maps: tuple
    m: int
    source_dim: int
    group: PermGroup | None = None
    name: str = "family"

    @property
    def ell(self) -> int:
        return len(self.maps)

    def __len__(self) -> int:
        return len(self.maps)

    def evaluate(self, i: int, x: Sequence) -> tuple:
        return self.maps[i] @ to_vector(x)

    @cached_property
    def row_spaces(self) -> tuple:
        """``L(phi_i)``: the span of the rows of each map."""
        return tuple(Subspace.span(M.rows, self.source_dim) for M in self.maps)

    @cached_property
    def kernels(self) -> tuple:
        """``{c : phi_i c = 0}``, the directions annihilated by each map."""
        return tuple(kernel(M) for M in self.maps)


def basis_maps(L: LayerSpace) -> BasisMapFamily:
    ell, n = L.target.dim, L.source.dim
    maps = tuple(
        RationalMatrix._trusted(tuple(phi.rows[i] for phi in L.linear_basis), n) for i in range(ell))
    return BasisMapFamily(maps, L.m, n, L.source.group, L.name)


def family_from_maps(maps: Sequence, source_dim: int, group: PermGroup | None = None,
                     name: str = "custom") -> BasisMapFamily:
    mats = tuple(m if isinstance(m, RationalMatrix) else RationalMatrix(m, source_dim) for m in maps)
    if not mats:
        raise ValueError("a family needs at least one map")
    m = mats[0].nrows
    if any(M.shape != (m, source_dim) for M in mats):
        raise DimensionMismatch("all maps must share the shape m x source_dim")
    return BasisMapFamily(mats, m, source_dim, group, name)


def reconstruct_linear_basis(F: BasisMapFamily) -> tuple:
    """Re-stack ``phi^t`` from the rows of the ``phi_i``."""
    return tuple(
        RationalMatrix._trusted(tuple(M.rows[t] for M in F.maps), F.source_dim) for t in range(F.m))


def c1_family(n: int) -> BasisMapFamily:
    return basis_maps(layer_conv(n, 1))


def pointnet_family(n: int) -> BasisMapFamily:
    return basis_maps(layer_pointnet(n))


def regular_family(n: int) -> BasisMapFamily:
    return basis_maps(layer_regular(groups.symmetric_group(n)))
