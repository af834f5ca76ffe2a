from __future__ import annotations

import dataclasses
import random

import pytest

from cxmut.complexspace import (GroupElement1, SpaceError, Type1Space, Type2Point, Type2Space, act1,
                                act2, all_chain_points, all_points1, blocks_from_forms, build_chain,
                                build_type1, build_type2, chain_residuals, complex_setting,
                                dual_chain, enumerate_group1, group1_order, identity1, invariant1,
                                is_point, morphism_setting, mul1, random_chain_point, random_group1,
                                random_group2, random_point1, random_type1, random_type2, scalar_type1,
                                type1_point)
from cxmut.exactlin import QQ, Bilinear, BudgetExceeded, ExactMatrix, fp
from cxmut.mutation import mutate_point_1to2, mutate_space_1to2
from cxmut.scenarios import p2_complex_point
from cxmut.sheafctx import projective_context


def test_scalar_space_valid():
    th = scalar_type1(QQ)
    assert (th.z1, th.z2, th.z3, th.z4, th.h, th.t, th.m) == (1,) * 7


def test_sigma_zero_rejected():
    one = Bilinear(QQ, 1, 1, 1, (((1,),),))
    zero = Bilinear.zeros(QQ, 1, 1, 1)
    with pytest.raises(SpaceError) as e:
        build_type1(QQ, (1, 1, 1, 1, 1, 1, 1), zero, one, one, zero)
    assert "surjective" in str(e.value)


def test_type2_scalar_and_lambda_zero():
    F = QQ
    tp = build_type2(F, (1, 1, 0, 1, 1, 0, 2), Bilinear.zeros(F, 0, 1, 1), Bilinear.zeros(F, 0, 0, 1),
                     Bilinear.zeros(F, 1, 1, 0), Bilinear(F, 1, 1, 1, (((1,),),)))
    assert tp.n == 2
    with pytest.raises(SpaceError):
        build_type2(F, (1, 1, 1, 1, 1, 0, 2), Bilinear.zeros(F, 0, 1, 1), Bilinear.zeros(F, 0, 1, 1),
                    Bilinear.zeros(F, 1, 1, 1), Bilinear(F, 1, 1, 1, (((1,),),)))


def test_is_point_scalar():
    th = scalar_type1(QQ)
    assert is_point(th, type1_point(th, [[1]], [1], [[1]], [-1])) == (True, (0,))
    ok, res = is_point(th, type1_point(th, [[1]], [1], [[1]], [1]))
    assert not ok and res == (2,)


def test_group_action_identity_and_composition():
    rng = random.Random(1)
    for p in (2, 3, 5):
        F = fp(p)
        th = random_type1(F, (2, 1, 2, 1, 1, 1, 2), rng)
        for _ in range(10):
            x = random_point1(th, rng)
            assert act1(th, identity1(th), x) == x
            g, h = random_group1(th, rng), random_group1(th, rng)
            gx = act1(th, g, act1(th, h, x))
            assert gx == act1(th, mul1(th, g, h), x)
            assert is_point(th, gx)[0]


def test_scalar_unipotent_by_hand():
    th = scalar_type1(QQ)
    x = type1_point(th, [[1]], [1], [[1]], [-1])
    g = GroupElement1(1, 1, 1, ExactMatrix.identity(QQ, 1), ExactMatrix.from_rows(QQ, [[1]]))
    y = act1(th, g, x)
    assert y.z2 == (2,) and is_point(th, y)[0]


def test_invariant_map_constant_on_g1_orbits():
    rng = random.Random(2)
    F = fp(7)
    th = random_type1(F, (2, 2, 2, 1, 2, 2, 2), rng)
    for _ in range(10):
        vals = [F.random(rng) for _ in range(4 + 2 + 4 + 1)]
        x = type1_point(th, [vals[0:2], vals[2:4]], vals[4:6], [vals[6:8], vals[8:10]], vals[10:])
        g = dataclasses.replace(random_group1(th, rng), gl=F.one, gr=F.one)
        assert invariant1(th, act1(th, g, x)) == invariant1(th, x)


def test_exhaustive_action_preserves_points_f2():
    th = scalar_type1(fp(2))
    pts = list(all_points1(th))
    keys = {x.key() for x in pts}
    for g in enumerate_group1(th):
        for x in pts:
            assert act1(th, g, x).key() in keys
    assert group1_order(th) == 2


def test_group_budget():
    th = random_type1(fp(5), (1, 1, 1, 1, 1, 1, 3), random.Random(0))
    with pytest.raises(BudgetExceeded):
        next(enumerate_group1(th, budget=10))


def test_act2_preserves_points():
    rng = random.Random(4)
    for p in (2, 3):
        F = fp(p)
        th = random_type1(F, (1, 1, 1, 1, 1, 1, 1), rng)
        tp = mutate_space_1to2(th)
        for x in all_points1(th):
            y, _ = mutate_point_1to2(th, x, space2=tp)
            for _ in range(3):
                assert is_point(tp, act2(tp, random_group2(tp, rng), y))[0]
    tp = random_type2(fp(3), (2, 1, 1, 1, 1, 1, 2), rng)
    zero = Type2Point(ExactMatrix.zeros(tp.field, 2, 2), ExactMatrix.zeros(tp.field, 1, 2),
                      ExactMatrix.zeros(tp.field, 1, 2))
    assert act2(tp, random_group2(tp, rng), zero) == zero


def test_space_json_round_trip():
    th = random_type1(fp(3), (2, 1, 1, 1, 1, 1, 1), random.Random(9))
    assert Type1Space.from_json(th.to_json()) == th
    tp = mutate_space_1to2(th)
    assert Type2Space.from_json(tp.to_json()) == tp


# ---------------------------------------------------------------- chains

def test_single_morphism_has_no_chain_condition():
    ctx = projective_context(2, [-2, -1, 0], fp(3))
    sp = morphism_setting(ctx, "O(-2)", "O(-1)", "O(0)", 1, 1, 4)
    x = random_chain_point(sp, random.Random(0))
    assert chain_residuals(x) == {}


def test_p2_syzygy_point_accepted_and_bad_rejected():
    x = p2_complex_point(QQ)
    assert chain_residuals(x) == {}
    ctx = projective_context(2, [-2, -1, 0, 1], QQ)
    sp = complex_setting(ctx, "O(-2)", "O(-1)", "O(0)", "O(1)", 1, 3, 1, 1)
    forms = {(0, 0, 1): [["z1^2"]], (1, 1, 0): [["z1"]]}
    with pytest.raises(SpaceError):
        build_chain(sp, blocks_from_forms(sp, forms, 3))
    y = build_chain(sp, blocks_from_forms(sp, forms, 3), check=False)
    assert set(chain_residuals(y)) == {(0, 0, 0)}


def test_morphism_setting_stats():
    for n in (1, 2, 3):
        ctx = projective_context(n, [-2, -1, 0])
        sp = morphism_setting(ctx, "O(-2)", "O(-1)", "O(0)", 1, 1, 4)
        assert sp.stats.a == n + 1
    ctx = projective_context(2, [-2, -1, 0])
    s = morphism_setting(ctx, "O(-2)", "O(-1)", "O(0)", 1, 1, 4).stats
    assert (s.a, s.h11, s.h12, s.a_prime) == (3, 6, 3, 3)


def test_morphism_setting_rejects_wrong_order():
    ctx = projective_context(2, [-2, -1, 0])
    with pytest.raises(SpaceError):
        morphism_setting(ctx, "O(-1)", "O(-2)", "O(0)", 1, 1, 1)


def test_all_chain_points_counts():
    ctx = projective_context(1, [-1, 0, 1], fp(2))
    sp = morphism_setting(ctx, "O(-1)", "O(0)", "O(1)", 1, 1, 1)
    assert len(list(all_chain_points(sp))) == 2 ** 5
    sp = complex_setting(projective_context(1, [-2, -1, 0, 1], fp(2)), "O(-2)", "O(-1)", "O(0)", "O(1)",
                         1, 1, 1, 1)
    pts = list(all_chain_points(sp))
    assert 0 < len(pts) < 2 ** 10 and all(chain_residuals(x) == {} for x in pts)


def test_dual_chain_involution():
    x = p2_complex_point(fp(5))
    assert dual_chain(dual_chain(x)).blocks == x.blocks
