"""One test per acceptance criterion; each prints a single PASS/FAIL line."""

from __future__ import annotations

import random
import time
from fractions import Fraction

from conftest import constants_at

from cxmut.complexspace import (all_chain_points, all_points1, complex_setting, morphism_setting,
                                random_chain_point, random_type1, random_type2, scalar_type1)
from cxmut.constants import constant_relations_check, paper_constants
from cxmut.exactlin import QQ, fp
from cxmut.mutation import (mutate_chain_left, mutate_chain_right, mutate_point_1to2,
                            mutate_point_2to1, mutate_space_1to2, mutate_space_2to1,
                            normalize_type1, normalize_type2, orbit_equal)
from cxmut.scenarios import (complex_example_stats, complex_region, complex_stats_from_context,
                             factored_morphism, lam2_to_rho, morphism_example_stats, morphism_region,
                             p2_complex_point, p2_complex_polarization, pathological_point,
                             quotient_model_p2)
from cxmut.sheafctx import projective_context
from cxmut.stability import (Polarization, agree_across_primes, complex_polarization,
                             indirect_chain_polarization, is_semistable_G, is_semistable_red,
                             morphism_polarization, normalize_polarization, pol_direct_morphism,
                             pol_first_mutation, pol_indirect_morphism, pol_second_mutation,
                             revalidate_witness, singular_values, stabilizer_dimension)

F = Fraction


def test_criterion_1_point_round_trip(report):
    t0 = time.time()
    total = good = 0
    for p in (2, 3):
        K = fp(p)
        rng = random.Random(p)
        for th in (scalar_type1(K), random_type1(K, (2, 1, 1, 1, 1, 1, 1), rng)):
            nt, norm = normalize_type1(th)
            tp = mutate_space_1to2(th)
            back = mutate_space_2to1(tp)
            assert back == nt
            for x in all_points1(th):
                y, c1 = mutate_point_1to2(th, x, space2=tp)
                x2, c2 = mutate_point_2to1(tp, y, space1=back)
                total += 1
                good += bool(c1.ok() and c2.ok() and orbit_equal(nt, norm.apply(nt, x), x2))
    dt = time.time() - t0
    ok = total > 0 and good == total and dt < 60
    report(1, ok, f"{good}/{total} points return to their orbit over F2 and F3 in {dt:.1f}s")
    assert ok


def test_criterion_2_space_round_trip(report):
    rng = random.Random(5)
    good = 0
    for _ in range(50):
        K = fp(rng.choice([2, 3, 5]))
        z1, z3, h, t, m = (rng.randint(1, 2) for _ in range(5))
        th = random_type1(K, (z1, rng.randint(0, z1 * h), z3, rng.randint(0, h * z3), h, t, m), rng)
        a = mutate_space_2to1(mutate_space_1to2(th)) == normalize_type1(th)[0]
        z1, y2, z3, t = (rng.randint(1, 2) for _ in range(4))
        dims = (z1, y2, rng.randint(0, y2 * z3), z3, t, rng.randint(0, z1 * y2), y2 + rng.randint(0, 2))
        tp = random_type2(K, dims, rng)
        b = mutate_space_1to2(mutate_space_2to1(tp)) == normalize_type2(tp)
        good += a and b
    report(2, good == 50, f"{good}/50 random spaces round-trip exactly (compared in echelon-normalized bases)")
    assert good == 50


def test_criterion_3_paper_constants(report):
    t0 = time.time()
    res = constants_at(1)
    paper = paper_constants(2)
    rows = []
    for name, r in res.items():
        rows.append((name, r.value, paper[name], r.mode, r.p))
    bad = [f"{n}={v} (paper {pv})" for n, v, pv, mode, p in rows if v != pv]
    all_exact = all(mode == "exact" and p == 101 for *_, mode, p in rows)
    dt = time.time() - t0
    ok = not bad and all_exact and dt < 300
    detail = ", ".join(f"{n}={v}" for n, v, *_ in rows)
    if bad:
        detail += "; mismatches: " + ", ".join(bad)
    report(3, ok, f"{detail}; exact at p=101 in {dt:.0f}s")
    assert ok, bad


def test_criterion_4_constant_relations(report):
    results = {1: constants_at(1), 2: constants_at(2)}
    same_prime = {1: constants_at(1, p=3), 2: constants_at(2)}
    rels = constant_relations_check(results) + constant_relations_check(same_prime)
    bad = [r for r in rels if not r["ok"]]
    exact = all(r["status"] == "proved" for r in rels if r["ok"])
    ok = bool(rels) and not bad and exact
    report(4, ok, f"{len(rels) - len(bad)}/{len(rels)} relations hold on exact-mode pairs")
    assert ok, bad


def _criterion_5_parts():
    out = {}
    # (i) complex threshold on P^n, lambda1 = 1
    part = []
    for n in range(2, 7):
        stats = complex_stats_from_context(n)
        assert stats == complex_example_stats(n)
        for mu1 in (F(1, 3), F(1), F(5, 2)):
            r = complex_region(stats, paper_constants(n), mu1)
            part.append(not r.empty and r.lo == (n + 1) * mu1 + F(n * (n + 1), 2) and not r.lo_closed)
    out["i"] = all(part)
    # (ii) the two-summand morphism at n = 2: m1 = 2, m2 = 1, n1 = 3; constants at the right arguments
    k1, k2 = constants_at(1), constants_at(2)
    consts = {"c0": k1["c0"].value, "c0p": k2["c0p"].value, "c1_534": k2["c1_534"].value,
              "c2_534": k2["c2_534"].value}
    st = morphism_example_stats(2, 2, 1, 3)
    d = morphism_region(st, consts, "direct")
    ind = morphism_region(st, consts, "indirect (equivalence)")
    out["ii"] = (lam2_to_rho(d.lo, 2, 1) == 3 and not d.lo_closed and d.hi == 1
                 and lam2_to_rho(ind.lo, 2, 1) == 2 + F(2, 2))
    # (iii) chamber walls of O(-2) + O(-1) -> O (x) C^(n+2)
    out["iii"] = all(singular_values("ex2", n)["values"] == [F(k, n + 2 - k) for k in range(1, n + 2)]
                     for n in range(2, 7))
    # (iv) O(-2) + O(-1) -> O (x) C^n1, direct route
    part = []
    for n in range(2, 7):
        for n1 in (2, n + 1, n + 3):
            r = morphism_region(morphism_example_stats(n, 1, 1, n1), paper_constants(n), "direct")
            part.append(r.lo == F(n + 1, n + 2) and not r.lo_closed)
    out["iv"] = all(part)
    return out


def test_criterion_5_thresholds(report):
    parts = _criterion_5_parts()
    ok = all(parts.values())
    report(5, ok, ", ".join(f"({k}) {'ok' if v else 'MISMATCH'}" for k, v in parts.items()))
    assert ok, parts


def test_criterion_6_stability_oracle(report):
    t0 = time.time()
    pol = p2_complex_polarization(1)
    agree = agree_across_primes([lambda: p2_complex_point(fp(5)), lambda: p2_complex_point(fp(7))], pol)
    sound = all(revalidate_witness(p2_complex_point(fp(q)), pol, is_semistable_G(p2_complex_point(fp(q)), pol))
                for q in (5, 7))
    zero = is_semistable_G(p2_complex_point(fp(5), zero=True), pol).verdict == "unstable"
    fam = []
    for k in (1, 2):
        x = factored_morphism(fp(2), k)
        alpha = F(k, 3)
        for num in range(1, 12):
            l2 = F(num, 12)
            v = is_semistable_G(x, morphism_polarization(1 - l2, l2, F(1, 3)))
            fam.append((v.verdict == "unstable") == (l2 > alpha))
    dt = time.time() - t0
    ok = agree.verdict == "stable" and sound and zero and all(fam) and dt < 600
    report(6, ok, f"explicit point {agree.verdict} mod 5 and 7, zero point unstable={zero}, "
                  f"factored family {sum(fam)}/{len(fam)} verdicts match lam2 > alpha_k, {dt:.0f}s")
    assert ok


def _prop_instances(p, count, rng):
    """Yield (mutation, source semistable, mutated semistable) on random desk instances over F_p."""
    K = fp(p)
    ctx = projective_context(2, [-2, -1, 0, 1], K)

    def rq():
        return F(rng.randint(1, 9), rng.randint(1, 4))
    for _ in range(count):
        l1, m1, m2, n1 = 1, rng.choice([1, 2]), 1, 1
        sp = complex_setting(ctx, "O(-2)", "O(-1)", "O(0)", "O(1)", l1, m1, m2, n1)
        x = random_chain_point(sp, rng, density=rng.choice([0.5, 0.8, 1.0]))
        lam1, mu1 = rq(), rq() * rng.choice([1, -1])
        # half of the draws sit past the second-mutation wall, where stable points exist
        mu2 = 3 * mu1 + 3 * lam1 + rq() if rng.random() < 0.5 else rq() * rng.choice([1, 2, 4])
        nu1 = -(lam1 * l1 + mu1 * m1 + mu2 * m2) / n1
        pol = complex_polarization(lam1, mu1, mu2, nu1)
        src = is_semistable_G(x, pol).semistable
        y, _ = mutate_chain_left(x, 1, "H1")
        yield "first", src, is_semistable_G(y, Polarization(pol_first_mutation(pol.weights, 3).values)).semistable
        z, _ = mutate_chain_left(y, 0, "K1")
        yield "second", src, is_semistable_G(z, Polarization(pol_second_mutation(pol.weights, 3, 3).values)).semistable

        m1, m2, n1 = 1, 1, rng.choice([1, 2])
        sp = morphism_setting(ctx, "O(-2)", "O(-1)", "O(0)", m1, m2, n1)
        x = random_chain_point(sp, rng, density=rng.choice([0.5, 1.0]))
        lam1, lam2, mu1 = normalize_polarization((rq(), rq()), m1, m2, n1)
        src = is_semistable_G(x, morphism_polarization(lam1, lam2, mu1)).semistable
        d, _ = mutate_chain_left(x, 0, "H1")
        yield "direct", src, is_semistable_G(d, Polarization(pol_direct_morphism((lam1, lam2, mu1), 3).values)).semistable
        r, _ = mutate_chain_right(x, 0, "G1")
        ip = indirect_chain_polarization(pol_indirect_morphism((lam1, lam2), 3, m1, m2, n1))
        yield "indirect", src, is_semistable_G(r, ip).semistable


def test_criterion_7_mutation_direction(report):
    rng = random.Random(7)
    tally = {}
    bad = 0
    for p, count in ((2, 40), (3, 12)):
        for prop, src, mut in _prop_instances(p, count, rng):
            t = tally.setdefault(prop, [0, 0])
            t[0] += 1
            t[1] += mut
            bad += mut and not src
    n = sum(t[0] for t in tally.values())
    ok = n >= 200 and bad == 0
    summary = ", ".join(f"{k} mutation: {v[1]} of {v[0]} mutated points semistable" for k, v in sorted(tally.items()))
    report(7, ok, f"{n} instances, {bad} counterexamples ({summary})")
    assert ok


def test_criterion_8_pathological_stabilizer(report):
    x = pathological_point(fp(5), n=2, p=2)
    dim = stabilizer_dimension(x)
    l2 = F(1, 4)
    v = is_semistable_G(x, morphism_polarization(1 - l2, l2, F(1, 4)))
    ok = dim >= 2 and v.verdict == "stable"
    report(8, ok, f"stabilizer dimension {dim}, G-verdict at lam2 = 1/4 over F5: {v.verdict}")
    assert ok


def test_criterion_9_pruned_vs_naive(report):
    t0 = time.time()
    K = fp(2)
    settings = []
    p1 = projective_context(1, [-2, -1, 0, 1], K)
    p2 = projective_context(2, [-2, -1, 0], K)
    for dims in ((1, 1, 1), (1, 1, 2), (2, 1, 1), (1, 2, 1), (2, 2, 1)):
        settings.append(morphism_setting(p1, "O(-1)", "O(0)", "O(1)", *dims))
    settings.append(morphism_setting(p2, "O(-2)", "O(-1)", "O(0)", 1, 1, 1))
    settings.append(complex_setting(p1, "O(-2)", "O(-1)", "O(0)", "O(1)", 1, 1, 1, 1))
    total = agree = 0
    for sp in settings:
        dims = [sp.mult(f) for f in sp.factors()]
        if len(dims) == 3:
            m1, m2, n1 = dims
            pols = [morphism_polarization((1 - l2 * m2) / m1, l2, F(1, n1))
                    for l2 in (F(1, 4), F(1, 3), F(1, 2), F(2, 3)) if 1 - l2 * m2 > 0]
        else:
            pols = [complex_polarization(1, a, b, -(1 + a + b)) for a, b in ((1, 1), (-1, 3), (2, -1), (1, 5))]
        for x in all_chain_points(sp):
            for pol in pols:
                a = is_semistable_red(x, pol)
                b = is_semistable_red(x, pol, method="naive")
                total += 1
                agree += a.verdict == b.verdict
    dt = time.time() - t0
    ok = total > 0 and agree == total and dt < 300
    report(9, ok, f"{agree}/{total} verdicts agree over all F2 points of {len(settings)} spaces in {dt:.0f}s")
    assert ok


def test_criterion_10_quotient_model(report):
    outs = [quotient_model_p2(K) for K in (QQ, fp(7))]
    ok = all(o["rank_coker"] == 5 and o["dim_X"] == 6 and o["injective_everywhere"] for o in outs)
    o = outs[0]
    hp = o["dim_H'"]
    report(10, ok, f"dim E = {o['dim_E']}, dim H' = {hp}, rank coker = {o['rank_coker']}, "
                   f"dim X = {o['dim_X']} (over Q and at every point of P^2(F7))")
    assert ok
