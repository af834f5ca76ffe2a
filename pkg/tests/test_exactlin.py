from __future__ import annotations

import random
from fractions import Fraction

import pytest

from cxmut.exactlin import (QQ, BudgetExceeded, ExactMatrix, FieldSpec, SubspaceBasis,
                            enumerate_subspaces, fp, gaussian_binomial, gl_order, image_basis,
                            kernel_basis, rank, sample_subspaces, solve_linear)


def M(F, rows, ncols=None):
    return ExactMatrix.from_rows(F, rows, ncols)


def test_field_parse_and_reduce():
    assert FieldSpec.parse("q") == QQ
    F = FieldSpec.parse("fp:5")
    assert F.p == 5 and F(7) == 2 and F(Fraction(1, 2)) == 3
    with pytest.raises(ValueError):
        fp(4)
    with pytest.raises(ValueError):
        F(Fraction(1, 5))


def test_rank_examples():
    assert rank(ExactMatrix.identity(QQ, 2)) == 2
    assert rank(ExactMatrix.zeros(QQ, 3, 4)) == 0
    assert rank(M(QQ, [[1, 2], [2, 4]])) == 1


def test_kernel_examples():
    assert kernel_basis(M(QQ, [[1, 0]])) == SubspaceBasis.span(QQ, 2, [(0, 1)])
    assert kernel_basis(M(QQ, [[1, 2], [3, 4]])).dim == 0
    F2 = fp(2)
    ker = kernel_basis(M(F2, [[1, 1, 1]]))
    brute = [v for v in __import__("itertools").product(range(2), repeat=3) if sum(v) % 2 == 0]
    assert ker.dim == 2 and ker.contains((1, 1, 0))
    assert all(ker.contains(v) for v in brute)


def test_image_examples():
    assert image_basis(ExactMatrix.identity(QQ, 3)).dim == 3
    assert image_basis(ExactMatrix.zeros(QQ, 2, 2)).dim == 0
    assert image_basis(M(QQ, [[1], [2]])) == SubspaceBasis.span(QQ, 2, [(1, 2)])


def test_solve_examples():
    assert solve_linear(ExactMatrix.identity(QQ, 2), (3, 5)) == (3, 5)
    assert solve_linear(M(QQ, [[1, 1]]), (4,)) == (4, 0)
    assert solve_linear(M(QQ, [[0]]), (1,)) is None


@pytest.mark.parametrize("n,d,p,count", [(2, 1, 2, 3), (3, 2, 2, 7), (4, 2, 3, 130), (5, 0, 3, 1)])
def test_enumerate_counts(n, d, p, count):
    subs = list(enumerate_subspaces(n, d, fp(p)))
    assert len(subs) == count == gaussian_binomial(n, d, p)
    assert len({tuple(s.vectors) for s in subs}) == count


def test_enumerate_budget():
    with pytest.raises(BudgetExceeded) as e:
        list(enumerate_subspaces(6, 3, fp(5), budget=100))
    assert e.value.count == gaussian_binomial(6, 3, 5)


def test_sample_determinism_and_coverage():
    F = fp(2)
    a = list(sample_subspaces(3, 1, F, 100, seed=11))
    b = list(sample_subspaces(3, 1, F, 100, seed=11))
    assert a == b and len(a) <= 7
    assert list(sample_subspaces(2, 2, fp(3), 20, seed=1)) == [SubspaceBasis.full(fp(3), 2)]
    planes = set(tuple(s.vectors) for s in sample_subspaces(4, 2, fp(3), 10**4, seed=3))
    assert planes == set(tuple(s.vectors) for s in enumerate_subspaces(4, 2, fp(3)))


def test_gl_order():
    assert gl_order(2, 2) == 6 and gl_order(1, 3) == 2


def test_rational_canonical_form():
    A = M(QQ, [[2, 4], [Fraction(1, 3), Fraction(2, 3)]])
    assert image_basis(A.T).vectors == [(1, 2)]
    assert all(isinstance(c, Fraction) and c.denominator > 0 for r in A.entries for c in r)


def test_random_rank_nullity_q():
    rng = random.Random(0)
    for _ in range(20):
        r, c = rng.randint(1, 4), rng.randint(1, 4)
        A = M(QQ, [[Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(c)] for _ in range(r)])
        assert rank(A) + kernel_basis(A).dim == c
