import itertools
from fractions import Fraction

import pytest

from equivcheck import groups


def brute_group(gens, n):
    """Closure by repeated multiplication over all of S_n (independent of BFS)."""
    elems = {tuple(range(n))}
    gens = [tuple(g) for g in gens]
    while True:
        new = {tuple(a[b[i]] for i in range(n)) for a in elems for b in gens} | elems
        if new == elems:
            return elems
        elems = new


def brute_is_normal(H, G):
    n = G.base_size
    Hs = H.element_set()
    for g in G.elements:
        ginv = tuple(sorted(range(n), key=lambda i: g[i]))
        for h in Hs:
            conj = tuple(g[h[ginv[i]]] for i in range(n))
            if conj not in Hs:
                return False
    return True


def brute_subgroups(G):
    """All subgroups as element sets, from closures of element pairs (enough for S3, S4, Z6)."""
    n = G.base_size
    found = set()
    for a, b in itertools.combinations_with_replacement(G.elements, 2):
        found.add(frozenset(brute_group([a, b], n)))
    # S4 has subgroups needing more generators only among those of order 8 and 4 (Klein),
    # all of which are 2-generated; pairs suffice.
    return found


@pytest.fixture(scope="session")
def small_groups():
    return {"S3": groups.symmetric_group(3), "S4": groups.symmetric_group(4),
            "Z6": groups.cyclic_group(6)}


def frac(x):
    return Fraction(x)
