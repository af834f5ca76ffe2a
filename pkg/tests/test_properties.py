from __future__ import annotations

import random
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from cxmut.complexspace import (act1, complex_setting, invariant1, is_point, morphism_setting, mul1,
                                random_chain_point, random_group1, random_point1, random_type1)
from cxmut.exactlin import QQ, ExactMatrix, SubspaceBasis, fp, kernel_basis, rank, solve_linear
from cxmut.mutation import mutate_chain_left
from cxmut.sheafctx import projective_context
from cxmut.stability import (Polarization, complex_polarization, is_semistable_red, morphism_polarization,
                             normalize_polarization, pol_first_mutation, revalidate_witness)

FAST = settings(max_examples=40, deadline=None)
SLOW = settings(max_examples=15, deadline=None)

primes = st.sampled_from([2, 3, 5, 7])
seeds = st.integers(0, 10**6)
pos = st.fractions(min_value=Fraction(1, 10), max_value=10, max_denominator=12)


@st.composite
def matrices(draw):
    p = draw(primes)
    r, c = draw(st.integers(1, 4)), draw(st.integers(1, 4))
    rows = draw(st.lists(st.lists(st.integers(0, p - 1), min_size=c, max_size=c), min_size=r, max_size=r))
    return ExactMatrix.from_rows(fp(p), rows)


@FAST
@given(matrices())
def test_rank_nullity(A):
    assert rank(A) + kernel_basis(A).dim == A.ncols


@FAST
@given(matrices(), seeds)
def test_solve_consistent_systems(A, seed):
    rng = random.Random(seed)
    F = A.field
    x = F.vec(rng.randrange(F.p) for _ in range(A.ncols))
    b = F.vec(sum(a * c for a, c in zip(row, x)) for row in A.entries)
    y = solve_linear(A, b)
    assert y is not None
    assert F.vec(sum(a * c for a, c in zip(row, y)) for row in A.entries) == b


@FAST
@given(primes, seeds)
def test_group_action_axiom(p, seed):
    rng = random.Random(seed)
    th = random_type1(fp(p), (2, 1, 1, 1, 2, 1, 1), rng)
    x = random_point1(th, rng)
    g, h = random_group1(th, rng), random_group1(th, rng)
    assert act1(th, mul1(th, g, h), x) == act1(th, g, act1(th, h, x))
    assert is_point(th, act1(th, g, x))[0]


@FAST
@given(primes, seeds)
def test_invariant_scales_with_reductive_part(p, seed):
    rng = random.Random(seed)
    F = fp(p)
    th = random_type1(F, (1, 1, 2, 1, 2, 1, 2), rng)
    x = random_point1(th, rng)
    g = random_group1(th, rng)
    # g0, gm and the unipotent part cancel; only the two end scalings survive
    assert invariant1(th, act1(th, g, x)) == tuple(F(g.gl * g.gr * c) for c in invariant1(th, x))


def _small_morphism(seed):
    rng = random.Random(seed)
    ctx = projective_context(1, [-1, 0, 1], fp(2))
    sp = morphism_setting(ctx, "O(-1)", "O(0)", "O(1)", 1, rng.choice([1, 2]), 2)
    return sp, random_chain_point(sp, rng, density=rng.choice([0.5, 1.0]))


@FAST
@given(seeds, pos, pos, st.integers(1, 9))
def test_verdict_invariant_under_scaling(seed, a, b, c):
    sp, x = _small_morphism(seed)
    m2 = sp.terms[0][1][1]
    pol = morphism_polarization(*normalize_polarization((a, b), 1, m2, 2))
    assert is_semistable_red(x, pol).verdict == is_semistable_red(x, pol.scaled(c)).verdict


@FAST
@given(seeds, pos, pos)
def test_witness_soundness(seed, a, b):
    sp, x = _small_morphism(seed)
    m2 = sp.terms[0][1][1]
    pol = morphism_polarization(*normalize_polarization((a, b), 1, m2, 2))
    v = is_semistable_red(x, pol)
    if v.witness is not None:
        assert revalidate_witness(x, pol, v)


@SLOW
@given(seeds, pos, pos, pos)
def test_first_mutation_weights_telescope(seed, lam1, mu1, mu2):
    rng = random.Random(seed)
    ctx = projective_context(2, [-2, -1, 0, 1], fp(3))
    m1 = rng.choice([1, 2])
    sp = complex_setting(ctx, "O(-2)", "O(-1)", "O(0)", "O(1)", 1, m1, 1, 1)
    x = random_chain_point(sp, rng)
    nu1 = -(lam1 + mu1 * m1 + mu2)
    assert complex_polarization(lam1, mu1, mu2, nu1).check(sp, nonzero=False) == []
    y, _ = mutate_chain_left(x, 1, "H1")
    tp = Polarization(pol_first_mutation((lam1, mu1, mu2, nu1), 3).values)
    assert tp.check(y.space, nonzero=False) == []


@FAST
@given(st.lists(st.fractions(max_denominator=50), min_size=1, max_size=6))
def test_polarization_json_round_trip(ws):
    p = Polarization(tuple(ws))
    assert Polarization.from_json(p.to_json()) == p


@FAST
@given(primes, st.integers(1, 4), seeds)
def test_subspace_json_round_trip(p, n, seed):
    rng = random.Random(seed)
    F = fp(p)
    vecs = [[rng.randrange(p) for _ in range(n)] for _ in range(rng.randint(0, n))]
    S = SubspaceBasis.span(F, n, vecs)
    assert SubspaceBasis.from_json(F, S.to_json()) == S


@FAST
@given(st.fractions(max_denominator=100))
def test_field_json_round_trip(q):
    assert QQ.from_json(QQ.to_json(q)) == q
