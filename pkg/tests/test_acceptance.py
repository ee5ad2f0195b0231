"""Acceptance gate: one PASS/FAIL line per criterion, printed even under output capture."""
import itertools
import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest
import sympy

from equivcheck import approximator as ap, groups, universality as uni
from equivcheck.polynomials import (
    MultiPoly, directional_derivative, orbit_sum, power_of_sum, product_monomial,
)
from equivcheck.representations import (
    basis_maps, c1_family, coset_rep, hom_dimension, layer_conv, pointnet_family, regular_family,
)
from equivcheck.universality import Status

from conftest import brute_is_normal


@pytest.fixture
def report(capsys):
    def emit(number, ok, text):
        with capsys.disabled():
            print(f"\nACCEPTANCE {number}: {'PASS' if ok else 'FAIL'} - {text}")
        return ok
    return emit


def _unit(n, i):
    return [1 if k == i else 0 for k in range(n)]


def _listed_directions(n):
    e = lambda i: _unit(n, i - 1)
    sub = lambda u, v: [a - b for a, b in zip(u, v)]
    return [sub(e(j + 1), e(n)) for j in range(1, n - 1)] + [sub(e(n), e(2)), sub(e(1), e(2))]


def test_criterion_1_exact_reproductions(report):
    start = time.perf_counter()
    failures = []
    for n in range(2, 7):
        f = power_of_sum(n, n)
        for i in range(n):
            f = directional_derivative(f, _unit(n, i))
        if f != MultiPoly.constant(n, math.factorial(n)):
            failures.append(f"partials of (sum x)^{n}")
    for n in (4, 5, 6):
        f = product_monomial(n)
        for c in _listed_directions(n):
            f = directional_derivative(f, c)
        if f != MultiPoly.constant(n, 2):
            failures.append(f"listed directions n={n}")
    dirs = [[0, 1, -1], [-1, 0, 1], [1, -1, 0]]
    a1, a2, a3 = sympy.symbols("a1 a2 a3", positive=True, integer=True)
    symbolic = uni.closed_form_coefficient((a1, a2, a3), (2, 1, 0), dirs)
    if sympy.simplify(symbolic + a1 * (a1 - 1) * a2) != 0:
        failures.append("symbolic n=3 certificate")
    value = uni.symmetrized_monomial_certificate(pointnet_family(3), (2, 1, 0), (4, 8, 12), dirs)
    if value != -96:
        failures.append(f"n=3 certificate value {value}")
    elapsed = time.perf_counter() - start
    if elapsed >= 5:
        failures.append(f"runtime {elapsed:.2f}s")
    ok = report(1, not failures, f"exact reproductions in {elapsed:.2f}s"
                + (f"; failed: {failures}" if failures else ""))
    assert ok


def _strict(F_small, F_big, cap):
    cmp = uni.compare_classes(F_small, F_big, cap)
    w = cmp.witness_second_not_first
    if cmp.relation != "first_in_second" or w is None:
        return False, cmp.relation, None
    # re-verify the witness independently with the membership decision
    sound = (uni.decide_polynomial_in_class(w, F_small).status is Status.NON_MEMBER
             and uni.decide_polynomial_in_class(w, F_big).status is Status.MEMBER)
    return sound, cmp.relation, str(w)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_criterion_2_verdicts(report, n):
    C, P, R = c1_family(n), pointnet_family(n), regular_family(n)
    got = {
        "(sum x)^n in C1": uni.decide_polynomial_in_class(power_of_sum(n, n), C).status,
        "(sum x)^n in PointNet": uni.decide_polynomial_in_class(power_of_sum(n, n), P).status,
        "x1...xn in PointNet": uni.decide_polynomial_in_class(product_monomial(n), P).status,
    }
    want = {"(sum x)^n in C1": Status.NON_MEMBER, "(sum x)^n in PointNet": Status.MEMBER,
            "x1...xn in PointNet": Status.NON_MEMBER}
    wrong = [f"{k}: got {got[k].value}, expected {want[k].value}" for k in want if got[k] != want[k]]
    ok1, rel1, w1 = _strict(C, P, n)
    ok2, rel2, w2 = _strict(P, R, 6 if n == 3 else n)
    if not ok1:
        wrong.append(f"C1 vs PointNet: {rel1}")
    if not ok2:
        wrong.append(f"PointNet vs regular: {rel2}")
    ok = report(2, not wrong, f"n={n} verdicts and strict inclusions (witnesses {w1} | {w2})"
                + (f"; mismatches: {wrong}" if wrong else ""))
    assert ok


def _random_pairs(n, rng, count):
    pairs = []
    for k in range(count):
        x = [Fraction(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(n)]
        mode = k % 4
        if mode == 0:
            y = x[:]
            rng.shuffle(y)
        elif mode == 1:  # near miss: permuted copy with one entry nudged
            y = x[:]
            rng.shuffle(y)
            y[rng.randrange(n)] += Fraction(1, 7)
        elif mode == 2:  # same coordinate sum, different multiset in general
            y = x[:]
            i, j = rng.sample(range(n), 2)
            y[i] += 1
            y[j] -= 1
        else:
            y = [Fraction(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(n)]
        pairs.append((x, y))
    return pairs


def _fixtures(n):
    base = list(range(1, n + 1))
    out = [(base, list(p)) for p in itertools.permutations(base)]
    out += [([0] * n, [0] * (n - 1) + [1]), ([1] * n, [1] * n), (base, base[:-1] + [base[-1] + 1])]
    return out


def test_criterion_3_separation_consistency(report):
    rng = random.Random(2024)
    checked = disagreements = 0
    for n in (2, 3, 4, 5):
        S = groups.symmetric_group(n)
        fams = [c1_family(n), pointnet_family(n), regular_family(n)]
        pairs = _random_pairs(n, rng, 250) + _fixtures(n)
        for x, y in pairs:
            orbit = uni.orbit_equivalent(x, y, S)
            for F in fams:
                checked += 1
                if uni.separation_equivalent(x, y, F).equivalent != orbit:
                    disagreements += 1
    ok = report(3, disagreements == 0,
                f"{checked} family/pair checks, {disagreements} disagreements with orbit equality")
    assert ok


def test_criterion_4_dimension_identity(report):
    checked = mismatches = 0
    for G in (groups.symmetric_group(3), groups.symmetric_group(4), groups.cyclic_group(6)):
        subs = groups.all_subgroups(G)
        reps = {H: coset_rep(G, H) for H in subs}
        for H, K in itertools.product(subs, repeat=2):
            checked += 1
            if hom_dimension(reps[K], reps[H]) != groups.double_cosets(H, G, K).count:
                mismatches += 1
    ok = report(4, mismatches == 0, f"{checked} subgroup pairs of S3, S4, Z6, {mismatches} mismatches")
    assert ok


def _random_instance(rng):
    n = rng.randint(2, 4)
    kind = rng.choice(["c1", "pointnet", "conv2", "regular"])
    if kind == "c1":
        F = c1_family(n)
    elif kind == "pointnet":
        F = pointnet_family(n)
    elif kind == "conv2":
        F = basis_maps(layer_conv(n, 2))
    else:
        F = regular_family(min(n, 3))
        n = F.source_dim
    f = MultiPoly(n, {})
    while f.degree < 1:
        for _ in range(rng.randint(1, 3)):
            e = [0] * n
            for _ in range(rng.randint(1, 5)):
                e[rng.randrange(n)] += 1
            f = f + orbit_sum(e, F.group) * Fraction(rng.randint(-4, 4), rng.randint(1, 3))
    return F, f


def test_criterion_5_soundness_coupling(report):
    rng = random.Random(77)
    fired = violations = 0
    for _ in range(200):
        F, f = _random_instance(rng)
        if uni.directional_failure_test(f, F).status is Status.FAILS_BY_SUFFICIENT_TEST:
            fired += 1
            if uni.decide_polynomial_in_class(f, F).status is not Status.NON_MEMBER:
                violations += 1
    ok = report(5, violations == 0 and fired > 0,
                f"200 instances, sufficient test fired {fired} times, {violations} violations")
    assert ok


def test_criterion_6_empirical_gap(report):
    locked = ap.load_gap_thresholds()
    start = time.perf_counter()
    target = power_of_sum(3, 3)
    grid = ap.heldout_grid(3, (-1.0, 1.0))

    def median(F, h):
        cfg = lambda s: ap.FitConfig(width=h, sample_count=max(2000, 10 * h), seed=s,
                                     activation="sigmoid", inner_scale=3.0)
        return float(np.median([ap.fit(target, F, cfg(s), grid=grid).rms_error for s in range(11)]))

    pn = median(pointnet_family(3), 64)
    c_small, c_big = median(c1_family(3), 8), median(c1_family(3), 512)
    elapsed = time.perf_counter() - start
    ok = (pn < locked["pointnet_success_rms"]
          and c_big >= locked["c1_min_final_over_initial"] * c_small and elapsed < 60)
    ok = report(6, ok, f"PointNet h=64 median rms {pn:.2e} (< {locked['pointnet_success_rms']}); "
                f"C1 h=512/h=8 = {c_big:.4f}/{c_small:.4f} = {c_big / c_small:.3f} "
                f"(>= {locked['c1_min_final_over_initial']}); {elapsed:.1f}s")
    assert ok


def test_criterion_7_feature_identity(report):
    configs = [(pointnet_family(3), "relu", 16), (pointnet_family(4), "sigmoid", 32),
               (c1_family(3), "tanh", 8), (c1_family(5), "softplus", 64),
               (regular_family(3), "relu", 24), (regular_family(3), "sigmoid", 12),
               (basis_maps(layer_conv(4, 2)), "tanh", 40), (pointnet_family(5), "relu", 100),
               (c1_family(4), "sigmoid", 1), (pointnet_family(3), "softplus", 256)]
    identical = 0
    for seed, (F, act, h) in enumerate(configs):
        cfg = ap.FitConfig(width=h, sample_count=max(500, 10 * h), seed=seed, activation=act)
        X = ap.training_points(F.source_dim, cfg)
        A = ap.network_features(F, cfg, X)
        B = ap.ridge_superposition_features(F, cfg, X)
        identical += A.shape == B.shape and A.tobytes() == B.tobytes()
    ok = report(7, identical == len(configs), f"{identical}/{len(configs)} configs bitwise identical")
    assert ok


def test_criterion_8_normal_certificates(report):
    problems = []
    Z6 = groups.cyclic_group(6)
    if not all(uni.normal_subgroup_certificate(Z6, H).granted for H in groups.all_subgroups(Z6)):
        problems.append("Z6 subgroup refused")
    S4 = groups.symmetric_group(4)
    if not uni.normal_subgroup_certificate(S4, groups.alternating_group(4)).granted:
        problems.append("(S4, A4) refused")
    S3 = groups.symmetric_group(3)
    if uni.normal_subgroup_certificate(S3, groups.subgroup(S3, [groups.cycle(3, 0, 1)])).granted:
        problems.append("(S3, <(01)>) granted")
    double_transposition = groups.subgroup(S4, [(1, 0, 3, 2)])
    if uni.normal_subgroup_certificate(S4, double_transposition).granted:
        problems.append("(S4, <(01)(23)>) granted")
    total = 0
    for G in (S3, S4, Z6):
        for H in groups.all_subgroups(G):
            total += 1
            if uni.normal_subgroup_certificate(G, H).granted != brute_is_normal(H, G):
                problems.append(f"granted != normal for a subgroup of order {H.order}")
    ok = report(8, not problems, f"{total} subgroups checked against brute-force normality"
                + (f"; problems: {problems}" if problems else ""))
    assert ok
