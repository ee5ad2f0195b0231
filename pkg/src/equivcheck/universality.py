"""Deciding and certifying what a shallow invariant architecture can approximate.

A family of basis maps ``phi_1, ..., phi_l`` determines the class of
continuous invariant functions approximated by the corresponding shallow
networks.  For polynomial targets membership is decided exactly by testing
every degree-graded slice of the vanishing ideal of
``L(phi_1) u ... u L(phi_l)`` as a differential operator.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from math import prod
from typing import Sequence

from . import groups
from .errors import (DimensionMismatch, EnumerationCapExceeded, InvalidParameters,
                     KernelMembershipViolated, NotInvariant)
from .exact_linalg import RationalMatrix, Subspace, kernel, rank, subspace_intersection, to_vector
from .groups import PermGroup
from .polynomials import (MultiPoly, annihilator_space, apolar_pairing, apply_operator,
                          coefficient_space_poly, directional_derivative, is_invariant,
                          monomials, orbit_sum, poly_to_coeffs, symmetrized_monomial)
from .representations import (BasisMapFamily, coset_rep, equivariant_hom_basis, hom_dimension,
                              verify_equivariance)

log = logging.getLogger(__name__)

DEFAULT_TUPLE_CAP = 10 ** 7


class Status(str, enum.Enum):
    MEMBER = "Member"
    NON_MEMBER = "NonMember"
    FAILS_BY_SUFFICIENT_TEST = "FailsBySufficientTest"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class UniversalityVerdict:
    status: Status
    witness: dict | None = None
    details: str = ""
    degrees_checked: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"status": self.status.value, "witness": _jsonable(self.witness),
                "details": self.details, "degrees_checked": list(self.degrees_checked)}


def _jsonable(obj):
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    if isinstance(obj, Fraction):
        return obj.numerator if obj.denominator == 1 else f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, MultiPoly):
        return {"polynomial": str(obj), "terms": obj.to_json()}
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return str(obj)


@dataclass(frozen=True)
class SeparationPair:
    x: tuple
    y: tuple
    equivalent: bool
    multisets: tuple


def _check_family_input(f: MultiPoly, F: BasisMapFamily) -> None:
    if f.num_vars != F.source_dim:
        raise DimensionMismatch(f"target has {f.num_vars} variables, family acts on {F.source_dim}")
    if F.group is not None and not is_invariant(f, F.group):
        raise NotInvariant("target is not invariant under the family's group")


def separation_equivalent(x: Sequence, y: Sequence, F: BasisMapFamily) -> SeparationPair:
    x, y = to_vector(x), to_vector(y)
    if len(x) != F.source_dim or len(y) != F.source_dim:
        raise DimensionMismatch("input length differs from the family's source dimension")
    mx = tuple(sorted(M @ x for M in F.maps))
    my = tuple(sorted(M @ y for M in F.maps))
    return SeparationPair(x, y, mx == my, (mx, my))


def orbit_equivalent(x: Sequence, y: Sequence, G: PermGroup) -> bool:
    x, y = list(to_vector(x)), list(to_vector(y))
    if len(x) != G.base_size or len(y) != G.base_size:
        raise DimensionMismatch("input length differs from the group's base size")
    return any(groups.act_on_vector(g, x) == y for g in G.elements)


def decide_polynomial_in_class(f: MultiPoly, F: BasisMapFamily) -> UniversalityVerdict:
    """Exact membership of an invariant polynomial in the family's class.

    For a homogeneous ideal, ``P(d) f = 0`` for all ``P`` in the ideal iff
    every homogeneous component ``f_d`` is apolar to the degree-``d`` slice,
    so one pairing per basis element and degree is enough.
    """
    _check_family_input(f, F)
    spaces = F.row_spaces
    checked = []
    for d in range(1, f.degree + 1):
        checked.append(d)
        fd = f.homogeneous_component(d)
        if fd.is_zero():
            continue
        ideal = annihilator_space(spaces, d)
        for v in ideal.vectors():
            P = coefficient_space_poly(f.num_vars, d, v)
            if apolar_pairing(P, fd) != 0:
                value = apply_operator(P, f)
                assert not value.is_zero()
                return UniversalityVerdict(
                    Status.NON_MEMBER, {"operator": P, "value": value},
                    f"degree-{d} annihilating polynomial does not kill the target", checked)
    return UniversalityVerdict(Status.MEMBER, None,
                               "every annihilating operator kills the target", checked)


def _kernel_bases(F: BasisMapFamily) -> list[tuple]:
    return [K.vectors() for K in F.kernels]


def directional_failure_test(f: MultiPoly, F: BasisMapFamily,
                             cap: int = DEFAULT_TUPLE_CAP) -> UniversalityVerdict:
    """Search kernel-basis tuples ``(c_1, ..., c_l)`` with ``D_{c_1}...D_{c_l} f != 0``."""
    _check_family_input(f, F)
    bases = _kernel_bases(F)
    ell = F.ell
    if any(not b for b in bases):
        return UniversalityVerdict(Status.INCONCLUSIVE, None, "some kernel is trivial")
    if f.degree < ell:
        return UniversalityVerdict(Status.INCONCLUSIVE, None,
                                   f"target degree {f.degree} is below the operator order {ell}")
    total = prod(len(b) for b in bases)
    if total > cap:
        raise EnumerationCapExceeded(f"{total} kernel tuples exceed the cap {cap}")
    # depth-first, pruning on zero partial derivatives
    order = sorted(range(ell), key=lambda i: len(bases[i]))
    chosen: list = [None] * ell

    def search(depth: int, g: MultiPoly):
        if depth == ell:
            return g
        i = order[depth]
        for c in bases[i]:
            h = directional_derivative(g, c)
            if h.is_zero():
                continue
            chosen[i] = c
            found = search(depth + 1, h)
            if found is not None:
                return found
        return None

    value = search(0, f)
    if value is None:
        return UniversalityVerdict(Status.INCONCLUSIVE, None,
                                   f"all {total} kernel-basis tuples annihilate the target")
    return UniversalityVerdict(
        Status.FAILS_BY_SUFFICIENT_TEST,
        {"directions": [list(c) for c in chosen], "value": value},
        "a product of kernel directional derivatives does not vanish")


def directional_product(f: MultiPoly, directions: Sequence[Sequence]) -> MultiPoly:
    for c in directions:
        f = directional_derivative(f, c)
    return f


def operator_from_directions(directions: Sequence[Sequence]) -> MultiPoly:
    """``(c_1^T x) ... (c_l^T x)``, whose operator is ``D_{c_1} ... D_{c_l}``."""
    out = MultiPoly.constant(len(directions[0]), 1)
    for c in directions:
        out = out * MultiPoly.linear_form(c)
    return out


# symmetrized-monomial certificate


def _check_certificate_params(ell: int, s: Sequence[int], a: Sequence[int]) -> None:
    if len(s) != ell or len(a) != ell:
        raise InvalidParameters(f"s and a must both have length {ell}")
    if any(not 0 <= si <= ell for si in s) or sum(s) != ell:
        raise InvalidParameters("s must take values in 0..l and sum to l")
    if a[0] <= ell:
        raise InvalidParameters("a_1 must exceed l")
    # gap condition for consecutive exponents; there is no a_{l+1}
    if any(a[i] + ell >= a[i + 1] for i in range(ell - 1)):
        raise InvalidParameters("consecutive exponents must differ by more than l")


def _selection_matrix(F: BasisMapFamily) -> list[int]:
    """``alpha_i`` with first row of ``phi_i`` equal to ``e_{alpha_i}^T``."""
    alphas = []
    for M in F.maps:
        row = M.rows[0]
        nz = [j for j, v in enumerate(row) if v]
        if len(nz) != 1 or row[nz[0]] != 1:
            raise InvalidParameters("first row of every basis map must be a standard unit vector")
        alphas.append(nz[0])
    return alphas


def monomial_derivative_coefficient(a: Sequence[int], s: Sequence[int],
                                    directions: Sequence[Sequence]) -> Fraction:
    """Coefficient of ``y^(a - s)`` in ``D_{d_1} ... D_{d_l}`` of the symmetrized monomial.

    ``directions`` live in the ``l`` coordinates ``y``; no side conditions are checked.
    """
    ell = len(a)
    G = symmetrized_monomial(a, ell)
    out = directional_product(G, directions)
    target = tuple(ai - si for ai, si in zip(a, s))
    if any(t < 0 for t in target):
        return Fraction(0)
    return out.coefficient(target)


def _falling(x, k: int):
    r = 1
    for j in range(k):
        r = r * (x - j)
    return r


def _assignment_sum(s: Sequence[int], directions: Sequence[Sequence]):
    """``sum over sigma in S_l`` of the block products of direction components."""
    ell = len(s)
    blocks = [j for j, sj in enumerate(s) for _ in range(sj)]
    total = 0
    for sigma in permutations(range(ell)):
        term = 1
        for pos, j in enumerate(blocks):
            term = term * directions[sigma[pos]][j]
            if term == 0:
                break
        total = total + term
    return total


def closed_form_coefficient(a: Sequence, s: Sequence[int], directions: Sequence[Sequence]):
    """Closed form of the same coefficient with falling factorials.

    Works for symbolic exponents (anything supporting ``-`` and ``*``).
    """
    weight = 1
    for ai, si in zip(a, s):
        weight = weight * _falling(ai, si)
    denom = prod(_factorial(si) for si in s)
    total = weight * _assignment_sum(s, directions)
    if isinstance(total, (int, Fraction)):
        return total * Fraction(1, denom)
    return total / denom


def factorial_ratio_coefficient(a: Sequence[int], s: Sequence[int],
                                directions: Sequence[Sequence]) -> Fraction:
    """The same sum weighted by ``prod a_i!/s_i!`` over the nonzero ``s_i``."""
    weight = Fraction(1)
    for ai, si in zip(a, s):
        if si:
            weight *= Fraction(_factorial(ai), _factorial(si))
    return weight * _assignment_sum(s, directions)


def _factorial(k: int) -> int:
    return prod(range(2, k + 1))


@dataclass
class MonomialCertificate:
    value: Fraction
    closed_form: Fraction
    factorial_ratio_form: Fraction
    y_directions: list
    s: tuple
    a: tuple

    @property
    def certifies_failure(self) -> bool:
        return self.value != 0

    def to_dict(self) -> dict:
        return _jsonable({"value": self.value, "closed_form": self.closed_form,
                          "factorial_ratio_form": self.factorial_ratio_form,
                          "closed_form_agrees": self.value == self.closed_form,
                          "factorial_ratio_agrees": self.value == self.factorial_ratio_form,
                          "certifies_failure": self.certifies_failure,
                          "s": list(self.s), "a": list(self.a)})


def monomial_certificate(F: BasisMapFamily, s: Sequence[int], a: Sequence[int],
                         c: Sequence[Sequence]) -> MonomialCertificate:
    ell = F.ell
    s, a = tuple(int(v) for v in s), tuple(int(v) for v in a)
    _check_certificate_params(ell, s, a)
    if len(c) != ell:
        raise InvalidParameters(f"need {ell} direction vectors")
    c = [to_vector(v) for v in c]
    for i, (M, ci) in enumerate(zip(F.maps, c)):
        if len(ci) != F.source_dim:
            raise DimensionMismatch(f"direction {i} has the wrong length")
        if any(M @ ci):
            raise KernelMembershipViolated(f"direction {i} is not annihilated by basis map {i}")
    alphas = _selection_matrix(F)
    y_dirs = [tuple(ci[al] for al in alphas) for ci in c]
    value = monomial_derivative_coefficient(a, s, y_dirs)
    closed = Fraction(closed_form_coefficient(a, s, y_dirs))
    ratio = factorial_ratio_coefficient(a, s, y_dirs)
    if closed != value:
        log.warning("closed-form coefficient %s disagrees with symbolic value %s", closed, value)
    return MonomialCertificate(value, closed, ratio, [list(d) for d in y_dirs], s, a)


def symmetrized_monomial_certificate(F: BasisMapFamily, s: Sequence[int], a: Sequence[int],
                                     c: Sequence[Sequence]) -> Fraction:
    """Nonzero result certifies that the class is not separation-constrained universal."""
    return monomial_certificate(F, s, a, c).value


# normal-subgroup certificate


@dataclass
class ComponentCheck:
    K_order: int
    KH_order: int
    hom_dim: int
    double_cosets: int
    hom_dim_merged: int
    double_cosets_merged: int
    immersion_equivariant: bool
    immersion_injective: bool
    pullback_rank: int

    @property
    def ok(self) -> bool:
        return (self.hom_dim == self.double_cosets == self.double_cosets_merged
                == self.hom_dim_merged == self.pullback_rank
                and self.immersion_equivariant and self.immersion_injective)


@dataclass
class NormalCertificate:
    granted: bool
    group_order: int
    subgroup_order: int
    hidden_dim: int | None = None
    quotient_order: int | None = None
    components: list = field(default_factory=list)
    failed_check: str | None = None

    def to_dict(self) -> dict:
        return {"granted": self.granted, "group_order": self.group_order,
                "subgroup_order": self.subgroup_order, "hidden_dim": self.hidden_dim,
                "quotient_order": self.quotient_order, "failed_check": self.failed_check,
                "components": [dict(vars(c), ok=c.ok) for c in self.components]}


def coset_immersion(G: PermGroup, K: PermGroup, KH: PermGroup) -> RationalMatrix:
    """``R^{G/KH} -> R^{G/K}``: ``e_{gKH}`` goes to the sum of the ``e_{g'K}`` inside it."""
    small, big = groups.left_cosets(G, K), groups.left_cosets(G, KH)
    rows = [[Fraction(0)] * len(big) for _ in range(len(small))]
    for i, rep in enumerate(small.representatives):
        rows[i][big.coset_index(rep)] = Fraction(1)
    return RationalMatrix(rows, len(big))


def point_stabilizers(G: PermGroup) -> list[PermGroup]:
    """Stabilizers of orbit representatives: the natural action as a sum of coset spaces."""
    reps = [orb[0] for orb in groups.orbits(G, G.base_size, lambda g, x: g[x])]
    return [groups.stabilizer(G, p) for p in reps]


def normal_subgroup_certificate(G: PermGroup, H: PermGroup,
                                components: Sequence[PermGroup] | None = None) -> NormalCertificate:
    """Certify that hidden representation ``R^{G/H}`` gives separation-constrained universality.

    ``components`` are the subgroups ``K_i`` with input ``R^{G/K_1} + ... + R^{G/K_d}``;
    by default the natural action split into its orbits.
    """
    groups.validate_subgroup(H, G)
    cert = NormalCertificate(False, G.order, H.order)
    if not groups.is_normal(H, G):
        cert.failed_check = "normality"
        return cert
    Q = groups.quotient_group(G, H)
    cert.quotient_order = Q.order
    hidden = coset_rep(G, H)
    cert.hidden_dim = hidden.dim
    if components is None:
        components = point_stabilizers(G)
    for K in components:
        groups.validate_subgroup(K, G)
        KH = groups.join(G, K, H)
        V_K, V_KH = coset_rep(G, K), coset_rep(G, KH)
        iota = coset_immersion(G, K, KH)
        hom = equivariant_hom_basis(V_K, hidden)
        pulled = [(M @ iota).flatten() for M in hom]
        check = ComponentCheck(
            K_order=K.order, KH_order=KH.order,
            hom_dim=len(hom),
            double_cosets=groups.double_cosets(H, G, K).count,
            hom_dim_merged=hom_dimension(V_KH, hidden),
            double_cosets_merged=groups.double_cosets(H, G, KH).count,
            immersion_equivariant=verify_equivariance(iota, V_KH, V_K),
            immersion_injective=rank(iota) == V_KH.dim,
            pullback_rank=rank(RationalMatrix(pulled, V_KH.dim * hidden.dim)) if pulled else 0,
        )
        cert.components.append(check)
        if not check.ok:
            cert.failed_check = f"component K of order {K.order}"
            return cert
    cert.granted = True
    return cert


# class comparison


def invariant_forms(G: PermGroup | None, n: int, d: int) -> Subspace:
    """Degree-``d`` ``G``-invariant forms in monomial coordinates."""
    if G is None:
        return Subspace.full(len(monomials(n, d)))
    seen: set = set()
    vecs = []
    for e in monomials(n, d):
        if e in seen:
            continue
        O = orbit_sum(e, G)
        seen.update(O.terms)
        vecs.append(poly_to_coeffs(O, d))
    return Subspace.span(vecs, len(monomials(n, d)))


def class_forms(F: BasisMapFamily, d: int) -> Subspace:
    """Degree-``d`` invariant forms in the class: invariant and apolar to the ideal slice."""
    n = F.source_dim
    mons = monomials(n, d)
    inv = invariant_forms(F.group, n, d)
    ideal = annihilator_space(F.row_spaces, d)
    if ideal.dim == 0:
        return inv
    weights = [prod(_factorial(k) for k in e) for e in mons]
    apolar = kernel(RationalMatrix([[p * w for p, w in zip(v, weights)] for v in ideal.vectors()],
                                   len(mons)))
    return subspace_intersection(inv, apolar)


@dataclass
class ClassComparison:
    relation: str  # "equal", "first_in_second", "second_in_first", "incomparable"
    per_degree: list
    witness_second_not_first: MultiPoly | None = None
    witness_first_not_second: MultiPoly | None = None

    @property
    def strict(self) -> bool:
        return self.relation in ("first_in_second", "second_in_first")

    def to_dict(self) -> dict:
        return _jsonable({"relation": self.relation, "per_degree": self.per_degree,
                          "witness_second_not_first": self.witness_second_not_first,
                          "witness_first_not_second": self.witness_first_not_second})


def _first_outside(A: Subspace, B: Subspace) -> tuple | None:
    return next((v for v in A.vectors() if not B.contains(v)), None)


def compare_classes(F1: BasisMapFamily, F2: BasisMapFamily, degree_cap: int) -> ClassComparison:
    """Compare the polynomial parts (degree <= cap) of two classes.

    Witnesses are taken at the lowest degree where the classes differ.
    """
    if F1.source_dim != F2.source_dim:
        raise DimensionMismatch("families act on different source dimensions")
    n = F1.source_dim
    per_degree = []
    w21 = w12 = None
    for d in range(1, degree_cap + 1):
        A1, A2 = class_forms(F1, d), class_forms(F2, d)
        out21 = _first_outside(A2, A1)
        out12 = _first_outside(A1, A2)
        per_degree.append({"degree": d, "dim_first": A1.dim, "dim_second": A2.dim,
                           "first_in_second": out12 is None, "second_in_first": out21 is None})
        if out21 is not None and w21 is None:
            w21 = coefficient_space_poly(n, d, out21)
        if out12 is not None and w12 is None:
            w12 = coefficient_space_poly(n, d, out12)
    if w12 is None and w21 is None:
        relation = "equal"
    elif w12 is None:
        relation = "first_in_second"
    elif w21 is None:
        relation = "second_in_first"
    else:
        relation = "incomparable"
    return ClassComparison(relation, per_degree, w21, w12)


def verify_verdict(verdict: UniversalityVerdict, f: MultiPoly) -> bool:
    """Re-apply a NonMember or sufficient-test witness and confirm it is nonzero."""
    w = verdict.witness
    if verdict.status is Status.NON_MEMBER:
        return not apply_operator(w["operator"], f).is_zero()
    if verdict.status is Status.FAILS_BY_SUFFICIENT_TEST:
        return not directional_product(f, w["directions"]).is_zero()
    return w is None

