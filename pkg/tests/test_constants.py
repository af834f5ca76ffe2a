from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

import pytest

from cxmut.constants import (ConstantResult, admissible, c_constant, constant_relations_check,
                             named_constants, paper_constants, revalidate)
from cxmut.exactlin import QQ, Bilinear, BudgetExceeded, SubspaceBasis, fp


# ---------------------------------------------------------------- brute-force oracle
# Subspaces as explicit sets of vectors; dimensions from cardinalities.  Shares no code with
# the package beyond the tensor container.

def _span(vectors, p, n):
    out = {(0,) * n}
    for v in vectors:
        out = {tuple((a + c * b) % p for a, b in zip(w, v)) for w in out for c in range(p)}
    return frozenset(out)


def _dim(S, p):
    return round(math.log(len(S), p))


def oracle_constant(tau: Bilinear, k: int) -> Fraction:
    p = tau.field.p
    n = tau.db * k
    m = tau.dc * k
    vecs = list(itertools.product(range(p), repeat=n))
    subspaces = {_span(vs, p, n) for r in range(1, n + 1) for vs in itertools.combinations(vecs, r)}
    hyperplanes = {_span(vs, p, k) for vs in itertools.combinations(itertools.product(range(p), repeat=k), k - 1)}
    hyperplanes = {H for H in hyperplanes if _dim(H, p) == k - 1}
    best = Fraction(0)
    for K in subspaces:
        d = _dim(K, p)
        if d in (0, n):
            continue
        if any(all(tuple(v[b * k:(b + 1) * k]) in H for v in K for b in range(tau.db)) for H in hyperplanes):
            continue
        img = []
        for v in K:
            for a in range(tau.da):
                out = [0] * m
                for b in range(tau.db):
                    for s in range(k):
                        for q in range(tau.dc):
                            out[q * k + s] += v[b * k + s] * int(tau.data[a][b][q])
                img.append(tuple(c % p for c in out))
        r = Fraction(m - _dim(_span(img, p, m), p), n - d)
        best = max(best, r)
    return best


def random_tensor(F, da, db, dc, rng):
    return Bilinear.from_function(F, da, db, dc, lambda a, b: [F(rng.randrange(F.p)) for _ in range(dc)])


@pytest.mark.parametrize("p,da,db,dc,k", [(2, 2, 2, 2, 1), (2, 1, 3, 2, 1), (3, 2, 2, 1, 1),
                                          (2, 2, 2, 1, 2), (2, 1, 2, 2, 2)])
def test_exact_matches_oracle(p, da, db, dc, k):
    rng = random.Random(p * 100 + da * 10 + db + k)
    F = fp(p)
    for _ in range(4):
        tau = random_tensor(F, da, db, dc, rng)
        res = c_constant(tau, k, mode="exact")
        assert res.value == oracle_constant(tau, k)
        assert revalidate(tau, res)


def test_zero_tensor_gives_one():
    F = fp(3)
    tau = Bilinear.zeros(F, 1, 2, 1)
    assert c_constant(tau, 1, mode="exact").value == 1
    assert c_constant(Bilinear.zeros(F, 2, 2, 2), 1, mode="exact").value == 2


def test_no_admissible_subspace_gives_zero():
    F = fp(2)
    tau = Bilinear.zeros(F, 1, 1, 1)
    res = c_constant(tau, 1, mode="exact")
    assert res.value == 0 and res.witness is None and revalidate(tau, res)


def test_sample_is_a_lower_bound():
    rng = random.Random(1)
    F = fp(3)
    for _ in range(5):
        tau = random_tensor(F, 2, 3, 2, rng)
        exact = c_constant(tau, 1, mode="exact")
        low = c_constant(tau, 1, mode="sample", samples=5, seed=rng.randrange(100))
        assert low.mode == "lower-bound" and low.value <= exact.value


def test_invariant_under_basis_change_of_A():
    rng = random.Random(2)
    F = fp(3)
    tau = random_tensor(F, 2, 2, 2, rng)
    # replace the A-slices by (T0 + T1, T1)
    t2 = Bilinear.from_function(F, 2, 2, 2, lambda a, b: [
        (tau.data[0][b][q] + tau.data[1][b][q]) if a == 0 else tau.data[1][b][q] for q in range(2)])
    assert c_constant(tau, 1, mode="exact").value == c_constant(t2, 1, mode="exact").value


def test_admissible_side_condition():
    F = fp(2)
    # k = 2, B of dim 1: K = span(e1) lies in B (x) span(e1), not admissible
    assert not admissible(SubspaceBasis.span(F, 2, [(1, 0)]), 1, 2)
    assert admissible(SubspaceBasis.span(F, 4, [(1, 0, 0, 0), (0, 0, 0, 1)]), 2, 2)


def test_budget_and_field_errors():
    with pytest.raises(BudgetExceeded):
        c_constant(Bilinear.zeros(fp(5), 1, 6, 1), 1, mode="exact", budget=10)
    with pytest.raises(ValueError):
        c_constant(Bilinear.zeros(QQ, 1, 1, 1), 1)


def test_p1_constants_small():
    res = named_constants(1, 1, which=("c1", "c2", "c"))
    assert all(r.mode == "exact" for r in res.values())
    assert res["c"].value <= res["c1"].value * res["c2"].value


def test_relations_status():
    def mk(nm, v, mode="exact"):
        return ConstantResult(nm, 1, Fraction(v), mode, None, 2)
    rel = constant_relations_check({1: {"c": mk("c", 0), "c1": mk("c1", 0), "c2": mk("c2", "1/2")},
                                    2: {"c1": mk("c1", "1/5", "lower-bound")}})
    st = {r["relation"]: r["status"] for r in rel}
    assert st["c(1) <= c1(1) c2(1)"] == "proved"
    assert st["c1(2) >= c1(1)"] == "not falsified"
    bad = constant_relations_check({1: {"c": mk("c", 1), "c1": mk("c1", 0), "c2": mk("c2", 1)}})
    assert bad[0]["status"] == "violated"


def test_printed_values_table():
    pc = paper_constants(2)
    assert pc["c2"] == Fraction(1, 2) and pc["c0p"] == Fraction(3, 2) and pc["c2_534"] == 1
