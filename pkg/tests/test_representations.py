import itertools

import pytest

from equivcheck import groups, representations as reps
from equivcheck.errors import InvalidAction, NotEquivariant
from equivcheck.exact_linalg import RationalMatrix, Subspace


def _commutes_with_all(M, V, W):
    """Oracle: check P_W(g) M = M P_V(g) over every group element, not just generators."""
    return all(W.matrix(g) @ M == M @ V.matrix(g) for g in V.group.elements)


def test_perm_rep_examples():
    S4 = groups.symmetric_group(4)
    assert reps.natural_rep(S4).dim == 4
    e = groups.trivial_group(3)
    V = reps.natural_rep(e)
    assert V.dim == 3 and V.matrix(e.identity) == RationalMatrix.identity(3)
    Z3 = groups.cyclic_group(3)
    P = reps.natural_rep(Z3).matrix(Z3.generators[0])
    assert list(P.column(0)) == [0, 1, 0]


def test_matrices_form_a_representation():
    G = groups.symmetric_group(3)
    V = reps.regular_rep(G)
    for g, h in itertools.product(G.elements, repeat=2):
        assert V.matrix(groups.compose(g, h)) == V.matrix(g) @ V.matrix(h)


def test_tensor_and_sum():
    G = groups.symmetric_group(3)
    X = reps.natural_rep(G)
    F = reps.trivial_rep(G, 4)
    total, prod = reps.tensor_and_sum(X, F)
    assert (total.dim, prod.dim) == (7, 12)
    empty = reps.trivial_rep(G, 0)
    assert reps.direct_sum(X, empty).dim == X.dim
    R = reps.regular_rep(G)
    assert reps.tensor_product(X, R).dim == X.dim * R.dim


def test_hom_basis_examples():
    for n in (3, 4, 5):
        S = groups.symmetric_group(n)
        V = reps.natural_rep(S)
        basis = reps.equivariant_hom_basis(V, V)
        assert len(basis) == 2
        ident, ones = RationalMatrix.identity(n), RationalMatrix([[1] * n] * n)
        assert set(basis) == {ident, ones - ident}
    for n in (3, 4, 6):
        Z = groups.cyclic_group(n)
        V = reps.natural_rep(Z)
        basis = reps.equivariant_hom_basis(V, V)
        assert len(basis) == n
        assert set(basis) == {reps.circulant_unit(n, i) for i in range(1, n + 1)}
    e = groups.trivial_group(3)
    assert reps.hom_dimension(reps.natural_rep(e), reps.trivial_rep(e, 2)) == 6


def test_hom_basis_matrices_are_equivariant(small_groups):
    for G in small_groups.values():
        for H in groups.all_subgroups(G)[::5]:
            V, W = reps.natural_rep(G), reps.coset_rep(G, H)
            for M in reps.equivariant_hom_basis(V, W):
                assert reps.verify_equivariance(M, V, W)
                assert _commutes_with_all(M, V, W)


def test_hom_dimension_equals_double_cosets(small_groups):
    for G in small_groups.values():
        subs = groups.all_subgroups(G)
        for H, K in itertools.product(subs, repeat=2):
            d = reps.hom_dimension(reps.coset_rep(G, K), reps.coset_rep(G, H))
            assert d == groups.double_cosets(H, G, K).count


def test_fixed_point_space():
    S = groups.symmetric_group(4)
    assert reps.fixed_point_space(reps.natural_rep(S)) == Subspace.span([[1, 1, 1, 1]], 4)
    assert reps.fixed_point_space(reps.natural_rep(groups.trivial_group(3))).dim == 3
    swap = groups.symmetric_group(2)
    assert reps.fixed_point_space(reps.natural_rep(swap)) == Subspace.span([[1, 1]], 2)


def test_layer_full_counts():
    for n in (2, 3, 4):
        S = groups.symmetric_group(n)
        V = reps.natural_rep(S)
        L = reps.layer_full(V, V)
        assert (L.m, len(L.bias_orbits)) == (2, 1)
        L = reps.layer_full(V, reps.trivial_rep(S))
        assert (L.m, len(L.bias_orbits)) == (1, 1)
        Z = groups.cyclic_group(n)
        L = reps.layer_full(reps.natural_rep(Z), reps.trivial_rep(Z))
        assert (L.m, len(L.bias_orbits)) == (1, 1)


def test_layer_conv():
    for n in (3, 5):
        full = reps.layer_full(reps.natural_rep(groups.cyclic_group(n)),
                               reps.natural_rep(groups.cyclic_group(n)))
        assert reps.layer_conv(n, n).linear_span() == full.linear_span()
        assert reps.layer_conv(n, 1).linear_basis == (RationalMatrix.identity(n),)
    A2 = reps.circulant_unit(4, 2)
    assert list(A2 @ (1, 0, 0, 0)) == [0, 1, 0, 0]


def test_layer_pointnet():
    L = reps.layer_pointnet(4)
    assert L.m == 2 and len(L.bias_orbits) == 1
    assert reps.layer_pointnet(1).m == 1
    full = reps.layer_full(L.source, L.target)
    assert L.linear_span() == full.linear_span()


def test_basis_maps_examples():
    F = reps.pointnet_family(3)
    assert F.maps[0] == RationalMatrix([[1, 0, 0], [1, 1, 1]])
    C = reps.c1_family(4)
    assert [M.to_list() for M in C.maps] == [[[1 if k == a else 0 for k in range(4)]] for a in range(4)]
    S = groups.symmetric_group(3)
    inv = reps.basis_maps(reps.layer_invariant(reps.natural_rep(S)))
    assert inv.ell == 1 and inv.maps[0] == RationalMatrix([[1, 1, 1]])


@pytest.mark.parametrize("make", [lambda: reps.layer_pointnet(4), lambda: reps.layer_conv(5, 3),
                                  lambda: reps.layer_regular(groups.symmetric_group(3))])
def test_basis_maps_reconstruct_layer(make):
    L = make()
    F = reps.basis_maps(L)
    assert reps.reconstruct_linear_basis(F) == L.linear_basis


def test_family_evaluate_is_equivariant():
    F = reps.regular_family(3)
    G = F.group
    x = (3, -1, 7)
    outputs = [F.evaluate(i, x) for i in range(F.ell)]
    for g in G.generators:
        gx = groups.act_on_vector(g, list(x))
        assert sorted(F.evaluate(i, gx) for i in range(F.ell)) == sorted(outputs)


def test_verify_equivariance_examples():
    S = groups.symmetric_group(3)
    V = reps.natural_rep(S)
    assert reps.verify_equivariance(RationalMatrix.identity(3), V, V)
    assert reps.verify_equivariance(RationalMatrix([[1] * 3] * 3), V, V)
    E12 = RationalMatrix([[0, 1, 0], [0, 0, 0], [0, 0, 0]])
    assert not reps.verify_equivariance(E12, V, V)
    assert not _commutes_with_all(E12, V, V)


def test_custom_layer_validation():
    S = groups.symmetric_group(3)
    V = reps.natural_rep(S)
    with pytest.raises(NotEquivariant):
        reps.LayerSpace.custom(V, V, [[[0, 1, 0], [0, 0, 0], [0, 0, 0]]])
    with pytest.raises(ValueError):
        reps.LayerSpace.custom(V, V, [[[1, 0, 0], [0, 1, 0], [0, 0, 1]],
                                      [[2, 0, 0], [0, 2, 0], [0, 0, 2]]])
    L = reps.LayerSpace.custom(V, V, [[[1, 0, 0], [0, 1, 0], [0, 0, 1]]])
    assert L.m == 1


def test_basis_change():
    L = reps.layer_full(reps.natural_rep(groups.symmetric_group(3)),
                        reps.natural_rep(groups.symmetric_group(3)))
    L2 = L.with_basis_change([[1, 0], [1, 1]])
    assert L2.linear_span() == L.linear_span()
    with pytest.raises(ValueError):
        L.with_basis_change([[1, 1], [1, 1]])


def test_inconsistent_action_rejected():
    Z3 = groups.cyclic_group(3)
    with pytest.raises(InvalidAction):
        # a 3-cycle cannot act as a transposition
        reps.GSet.from_generator_images(Z3, 2, {Z3.generators[0]: (1, 0)})
