"""Finite permutation groups, materialized by full element enumeration.

A permutation of ``{0, ..., n-1}`` is a tuple ``p`` with ``p[i]`` the image
of ``i``.  Products compose right to left: ``compose(p, q)[i] == p[q[i]]``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from math import factorial
from typing import Callable, Iterable, NamedTuple, Sequence

from .errors import CapExceeded, InvalidAction, InvalidPermutation, NotASubgroup, NotNormal

Perm = tuple  # tuple[int, ...]

DEFAULT_ORDER_CAP = 10080
SYMMETRIC_DEGREE_CAP = 8


def as_perm(images: Iterable[int], n: int | None = None) -> Perm:
    """Validate ``images`` as a bijection of ``range(n)`` and return it as a tuple."""
    p = tuple(int(i) for i in images)
    if n is not None and len(p) != n:
        raise InvalidPermutation(f"expected {n} images, got {len(p)}")
    if sorted(p) != list(range(len(p))):
        raise InvalidPermutation(f"{list(p)} is not a permutation of range({len(p)})")
    return p


def identity(n: int) -> Perm:
    return tuple(range(n))


def compose(p: Perm, q: Perm) -> Perm:
    return tuple(p[i] for i in q)


def inverse(p: Perm) -> Perm:
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def cycle(n: int, *points: int) -> Perm:
    """The cycle ``(points[0] points[1] ...)`` on ``n`` points."""
    img = list(range(n))
    for a, b in zip(points, points[1:] + points[:1]):
        img[a] = b
    return as_perm(img, n)


def act_on_vector(g: Perm, x: Sequence):
    """Permute coordinates so that ``g(e_i) = e_{g(i)}``: ``(g.x)[g[i]] = x[i]``."""
    out = [None] * len(g)
    for i, gi in enumerate(g):
        out[gi] = x[i]
    return out


@dataclass(frozen=True, eq=False)
class PermGroup:
    base_size: int
    generators: tuple
    elements: tuple
    _index: dict = field(repr=False, compare=False)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def identity(self) -> Perm:
        return identity(self.base_size)

    def __contains__(self, g) -> bool:
        return tuple(g) in self._index

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def index(self, g: Perm) -> int:
        return self._index[tuple(g)]

    def element_set(self) -> frozenset:
        return frozenset(self.elements)

    def is_abelian(self) -> bool:
        gens = self.generators
        return all(compose(a, b) == compose(b, a) for a in gens for b in gens)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PermGroup):
            return NotImplemented
        return self.base_size == other.base_size and self.element_set() == other.element_set()

    def __hash__(self) -> int:
        return hash((self.base_size, self.element_set()))

    def __repr__(self) -> str:
        return f"PermGroup(base_size={self.base_size}, order={self.order})"


def group_closure(generators: Sequence[Sequence[int]], order_cap: int = DEFAULT_ORDER_CAP,
                  base_size: int | None = None) -> PermGroup:
    """Breadth-first closure of ``generators``.

    ``base_size`` is required when ``generators`` is empty.
    """
    if order_cap < 1:
        raise ValueError("order_cap must be >= 1")
    gens = [as_perm(g) for g in generators]
    if base_size is None:
        if not gens:
            raise ValueError("base_size is required for an empty generator list")
        base_size = len(gens[0])
    if any(len(g) != base_size for g in gens):
        raise InvalidPermutation("generators act on different base sets")
    e = identity(base_size)
    gens = [g for g in dict.fromkeys(gens) if g != e]
    seen = {e: 0}
    elements = [e]
    queue = deque([e])
    while queue:
        h = queue.popleft()
        for g in gens:
            gh = compose(g, h)
            if gh not in seen:
                if len(elements) >= order_cap:
                    raise CapExceeded(f"group order exceeds cap {order_cap}")
                seen[gh] = len(elements)
                elements.append(gh)
                queue.append(gh)
    return PermGroup(base_size, tuple(gens), tuple(elements), seen)


def symmetric_group(n: int, cap: int = SYMMETRIC_DEGREE_CAP) -> PermGroup:
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > cap:
        raise CapExceeded(f"S_{n} exceeds the degree cap {cap}")
    gens = []
    if n >= 2:
        gens.append(cycle(n, 0, 1))
    if n >= 3:
        gens.append(cycle(n, *range(n)))
    return group_closure(gens, order_cap=max(factorial(n), DEFAULT_ORDER_CAP), base_size=n)


def alternating_group(n: int, cap: int = SYMMETRIC_DEGREE_CAP) -> PermGroup:
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > cap:
        raise CapExceeded(f"A_{n} exceeds the degree cap {cap}")
    gens = [cycle(n, 0, 1, k) for k in range(2, n)]
    return group_closure(gens, order_cap=max(factorial(n), DEFAULT_ORDER_CAP), base_size=n)


def cyclic_group(n: int) -> PermGroup:
    if n < 1:
        raise ValueError("n must be >= 1")
    shift = tuple((i + 1) % n for i in range(n))
    return group_closure([shift], order_cap=max(n, 1), base_size=n)


def trivial_group(n: int) -> PermGroup:
    return group_closure([], base_size=n)


def subgroup(G: PermGroup, generators: Sequence[Sequence[int]]) -> PermGroup:
    """The subgroup of ``G`` generated by ``generators``."""
    H = group_closure(generators, order_cap=G.order, base_size=G.base_size)
    _check_subset(H, G)
    return H


def _check_subset(H: PermGroup, G: PermGroup) -> None:
    if H.base_size != G.base_size:
        raise NotASubgroup("subgroup acts on a different base set")
    if not all(h in G for h in H.elements):
        raise NotASubgroup("subgroup contains elements outside the parent group")


def validate_subgroup(H: PermGroup, G: PermGroup) -> None:
    """Re-check that ``H`` is a subgroup of ``G``: containment and closure."""
    _check_subset(H, G)
    if H.identity not in H:
        raise NotASubgroup("subgroup misses the identity")
    elems = H.elements
    gens = H.generators or elems
    for h in elems:
        if inverse(h) not in H:
            raise NotASubgroup("subgroup is not closed under inverses")
        for g in gens:
            if compose(g, h) not in H:
                raise NotASubgroup("subgroup is not closed under composition")


def is_closed(G: PermGroup) -> bool:
    """Exhaustive closure check over all pairs of enumerated elements."""
    return all(compose(a, b) in G for a in G.elements for b in G.elements)


def is_normal(H: PermGroup, G: PermGroup) -> bool:
    validate_subgroup(H, G)
    for g in G.generators:
        g_inv = inverse(g)
        for h in H.elements:
            if compose(compose(g, h), g_inv) not in H:
                return False
    return True


def join(G: PermGroup, *subgroups: PermGroup) -> PermGroup:
    """Smallest subgroup of ``G`` containing all ``subgroups``."""
    gens = [g for S in subgroups for g in (S.generators or ())]
    return subgroup(G, gens)


def stabilizer(G: PermGroup, point: int) -> PermGroup:
    return group_closure([g for g in G.elements if g[point] == point],
                         order_cap=G.order, base_size=G.base_size)


@dataclass(frozen=True, eq=False)
class CosetSpace:
    """Left cosets ``gH`` with the left-translation action of the parent group."""

    parent: PermGroup
    subgroup: PermGroup
    cosets: tuple  # tuple of frozensets of elements
    representatives: tuple
    _coset_of: dict = field(repr=False)

    def __len__(self) -> int:
        return len(self.cosets)

    def coset_index(self, g: Perm) -> int:
        return self._coset_of[tuple(g)]

    def act(self, g: Perm, i: int) -> int:
        return self._coset_of[compose(g, self.representatives[i])]

    def permutation_of(self, g: Perm) -> Perm:
        """The permutation of coset indices induced by ``g``."""
        return tuple(self.act(g, i) for i in range(len(self.cosets)))


def left_cosets(G: PermGroup, H: PermGroup) -> CosetSpace:
    validate_subgroup(H, G)
    coset_of: dict = {}
    cosets, reps = [], []
    for g in G.elements:
        if g in coset_of:
            continue
        c = frozenset(compose(g, h) for h in H.elements)
        for x in c:
            coset_of[x] = len(cosets)
        cosets.append(c)
        reps.append(g)
    return CosetSpace(G, H, tuple(cosets), tuple(reps), coset_of)


def right_coset_count(G: PermGroup, K: PermGroup) -> int:
    validate_subgroup(K, G)
    return G.order // K.order


def quotient_group(G: PermGroup, H: PermGroup) -> PermGroup:
    """``G/H`` realized as the permutation group induced on the left cosets."""
    if not is_normal(H, G):
        raise NotNormal("subgroup is not normal")
    space = left_cosets(G, H)
    k = len(space)
    gens = [space.permutation_of(g) for g in G.generators]
    Q = group_closure(gens, order_cap=k, base_size=k)
    if Q.order != G.order // H.order:
        raise NotNormal("coset action does not realize the quotient")
    return Q


class DoubleCosets(NamedTuple):
    count: int
    representatives: tuple


def double_cosets(H: PermGroup, G: PermGroup, K: PermGroup) -> DoubleCosets:
    """Distinct sets ``HgK`` with one representative each (first in ``G``'s order)."""
    validate_subgroup(H, G)
    validate_subgroup(K, G)
    covered: set = set()
    reps = []
    for g in G.elements:
        if g in covered:
            continue
        reps.append(g)
        for h in H.elements:
            hg = compose(h, g)
            covered.update(compose(hg, k) for k in K.elements)
    return DoubleCosets(len(reps), tuple(reps))


def orbits(G: PermGroup, set_size: int, action: Callable[[Perm, int], int]) -> list[list[int]]:
    """Orbits of ``G`` on ``range(set_size)``, sorted by their minimal point.

    The action laws are spot-checked on the generators; a failure raises
    ``InvalidAction``.
    """
    e = G.identity
    if any(action(e, x) != x for x in range(set_size)):
        raise InvalidAction("identity does not act trivially")
    gens = list(G.generators)
    for g in gens:
        img = [action(g, x) for x in range(set_size)]
        if sorted(img) != list(range(set_size)):
            raise InvalidAction("a generator does not act bijectively")
    for g in gens:
        for h in gens:
            gh = compose(g, h)
            for x in range(set_size):
                if action(gh, x) != action(g, action(h, x)):
                    raise InvalidAction("action is not compatible with composition")
    seen = [False] * set_size
    result = []
    for start in range(set_size):
        if seen[start]:
            continue
        orbit = [start]
        seen[start] = True
        stack = [start]
        while stack:
            x = stack.pop()
            for g in gens:
                y = action(g, x)
                if not seen[y]:
                    seen[y] = True
                    orbit.append(y)
                    stack.append(y)
        result.append(sorted(orbit))
    return result


def cyclic_subgroups(G: PermGroup) -> list[PermGroup]:
    found: dict = {}
    for g in G.elements:
        C = group_closure([g], order_cap=G.order, base_size=G.base_size)
        found.setdefault(C.element_set(), C)
    return list(found.values())


def all_subgroups(G: PermGroup) -> list[PermGroup]:
    """Every subgroup of ``G``, as joins of cyclic subgroups; sorted by order."""
    cyclic = cyclic_subgroups(G)
    found: dict = {C.element_set(): C for C in cyclic}
    frontier = list(found.values())
    while frontier:
        new = []
        for S in frontier:
            for C in cyclic:
                if C.element_set() <= S.element_set():
                    continue
                J = join(G, S, C)
                key = J.element_set()
                if key not in found:
                    found[key] = J
                    new.append(J)
        frontier = new
    return sorted(found.values(), key=lambda S: (S.order, sorted(S.elements)))

