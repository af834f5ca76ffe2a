from __future__ import annotations

import dataclasses
from math import comb

import pytest

from cxmut.exactlin import QQ, Bilinear, fp
from cxmut.sheafctx import (CompositionContext, complex_stats, form, kernel_object, monomials,
                            morphism_stats, parse_form, projective_context, validate_context)


def test_projective_dims():
    ctx = projective_context(2, [-2, -1, 0, 1])
    assert ctx.dim("O(-2)", "O(-1)") == 3
    assert ctx.dim("O(-2)", "O(0)") == 6
    assert ctx.dim("O(-1)", "O(-2)") == 0
    for n in (1, 2, 3):
        c = projective_context(n, [-1, 0, 2])
        assert all(c.dim(x, x) == 1 for x in c.objects)
        assert c.dim("O(-1)", "O(2)") == comb(3 + n, n)


def test_projective_validates():
    ctx = projective_context(2, [-2, -1, 0, 1], fp(5))
    assert validate_context(ctx).ok


def test_morphism_setting_vanishing_passes():
    ctx = projective_context(2, [-2, -1, 0]).declare_vanishing(
        [("O(-1)", "O(-2)"), ("O(0)", "O(-2)"), ("O(0)", "O(-1)")])
    assert validate_context(ctx).ok


def test_non_associative_tensor_detected():
    ctx = projective_context(1, [-1, 0, 1, 2], fp(3))
    key = ("O(-1)", "O(0)", "O(1)")
    t = ctx.comp[key]
    bad = Bilinear(t.field, t.da, t.db, t.dc, tuple(tuple(t.field.vec(2 * c for c in v) for v in row)
                                                    for row in t.data))
    broken = dataclasses.replace(ctx, comp={**ctx.comp, key: bad})
    rep = validate_context(broken)
    assert not rep.ok
    assert any("O(-1)" in v for v in rep.violations)


def test_kernel_object_dims():
    for n in (2, 3, 4):
        ctx = kernel_object(projective_context(n, [-2, -1, 0], fp(101)), "O(-1)", "O(0)", "H1")
        assert ctx.dim("O(-2)", "H1") == n * (n + 1) // 2
        assert validate_context(ctx, only_with="H1").ok
    ctx = kernel_object(projective_context(2, [-2, -1, 0], fp(7)), "O(-1)", "O(0)", "H1")
    assert ctx.dim("O(-2)", "H1") == 3


def test_kernel_of_direct_mutation_dual_identification():
    # H1 = ker(O(-2) (x) Hom(O(-2),O(-1)) -> O(-1)); Hom(H1, O(-2)) is dual to Hom(O(-2), O(-1))
    ctx = kernel_object(projective_context(2, [-2, -1, 0], fp(5)), "O(-2)", "O(-1)", "H1")
    assert ctx.dim("H1", "O(-2)") == ctx.dim("O(-2)", "O(-1)") == 3


def test_stats():
    ctx = projective_context(2, [-2, -1, 0])
    s = morphism_stats(ctx, "O(-2)", "O(-1)", "O(0)")
    assert (s.a, s.h11, s.h12, s.a_prime) == (3, 6, 3, 3)
    ctx = kernel_object(projective_context(2, [-2, -1, 0, 1], fp(101)), "O(-1)", "O(0)", "H1")
    assert complex_stats(ctx, "O(-2)", "O(-1)", "O(0)", "H1").b == 3


def test_context_json_round_trip():
    ctx = kernel_object(projective_context(1, [-1, 0, 1], fp(3)), "O(-1)", "O(0)", "H1")
    assert CompositionContext.from_json(ctx.to_json()) == ctx


def test_forms():
    assert parse_form("z2^2-z1*z3", 3) == {(0, 2, 0): 1, (1, 0, 1): -1}
    ctx = projective_context(2, [-2, 0], QQ)
    v = form(ctx, "O(-2)", "O(0)", parse_form("z1^2+3*z2*z3", 3))
    assert sum(1 for c in v if c) == 2 and 3 in v
    with pytest.raises(ValueError):
        parse_form("z4", 3)
    assert len(monomials(3, 2)) == 6
