"""Exact linear algebra over Q and prime fields.

Vectors are tuples of field elements. Matrices act on column vectors for
rank/kernel/image/solve, matching the usual conventions.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

DEFAULT_ENUM_BUDGET = 10**6


class BudgetExceeded(RuntimeError):
    def __init__(self, count: int, budget: int, what: str = "enumeration"):
        super().__init__(f"{what} needs {count} items, budget is {budget}")
        self.count = count
        self.budget = budget


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    kind: str  # "q" or "fp"
    p: int = 0

    def __post_init__(self):
        if self.kind == "fp":
            if not (2 <= self.p <= 2**31 and _is_prime(self.p)):
                raise ValueError(f"characteristic must be a prime in [2, 2^31], got {self.p}")
        elif self.kind == "q":
            if self.p != 0:
                raise ValueError("the rational field has no characteristic parameter")
        else:
            raise ValueError(f"unknown field kind {self.kind!r}")

    @property
    def is_finite(self) -> bool:
        return self.kind == "fp"

    @property
    def zero(self):
        return 0 if self.kind == "fp" else Fraction(0)

    @property
    def one(self):
        return 1 if self.kind == "fp" else Fraction(1)

    def __call__(self, x):
        if self.kind == "fp":
            if isinstance(x, Fraction):
                return x.numerator * pow(x.denominator, -1, self.p) % self.p
            if isinstance(x, str):
                return self(Fraction(x))
            return int(x) % self.p
        return Fraction(x)

    def vec(self, xs: Iterable) -> tuple:
        return tuple(self(x) for x in xs)

    def inv(self, x):
        if self.kind == "fp":
            if x % self.p == 0:
                raise ZeroDivisionError("inverse of zero")
            return pow(x, -1, self.p)
        return 1 / x

    def elements(self) -> range:
        if self.kind != "fp":
            raise ValueError("only prime fields are enumerable")
        return range(self.p)

    def units(self) -> range:
        return range(1, self.p)

    def random(self, rng: random.Random, lo: int = -3, hi: int = 3):
        if self.kind == "fp":
            return rng.randrange(self.p)
        return Fraction(rng.randint(lo, hi))

    def to_json(self, x):
        if self.kind == "fp":
            return int(x)
        x = Fraction(x)
        return f"{x.numerator}/{x.denominator}"

    def from_json(self, v):
        return self(Fraction(v) if isinstance(v, str) else v)

    def label(self) -> str:
        return "q" if self.kind == "q" else f"fp:{self.p}"

    @staticmethod
    def parse(text: str) -> "FieldSpec":
        text = text.strip().lower()
        if text in ("q", "qq", "rationals"):
            return QQ
        if text.startswith("fp:"):
            return FieldSpec("fp", int(text[3:]))
        raise ValueError(f"cannot parse field {text!r}")


QQ = FieldSpec("q")


def fp(p: int) -> FieldSpec:
    return FieldSpec("fp", p)


# raw row-list kernels; every public routine funnels through these

def _rref_rows(rows: Sequence[Sequence], ncols: int, F: FieldSpec):
    m = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    nrows = len(m)
    if F.kind == "fp":
        p = F.p
        for c in range(ncols):
            if r == nrows:
                break
            piv = next((i for i in range(r, nrows) if m[i][c] % p), None)
            if piv is None:
                continue
            m[r], m[piv] = m[piv], m[r]
            inv = pow(m[r][c], -1, p)
            row = [(x * inv) % p for x in m[r]]
            m[r] = row
            for i in range(nrows):
                if i != r:
                    f = m[i][c] % p
                    if f:
                        m[i] = [(a - f * b) % p for a, b in zip(m[i], row)]
            pivots.append(c)
            r += 1
        return [tuple(x % p for x in row) for row in m[:r]], pivots
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / Fraction(m[r][c])
        row = [Fraction(x) * inv for x in m[r]]
        m[r] = row
        for i in range(nrows):
            if i != r:
                f = m[i][c]
                if f != 0:
                    m[i] = [a - f * b for a, b in zip(m[i], row)]
        pivots.append(c)
        r += 1
    return [tuple(Fraction(x) for x in row) for row in m[:r]], pivots


def row_space_rows(rows, ncols, F):
    return _rref_rows(rows, ncols, F)[0]


def rank_rows(rows, ncols, F) -> int:
    return len(_rref_rows(rows, ncols, F)[1])


def null_space_rows(rows, ncols, F) -> list[tuple]:
    """Canonical (RREF) basis of {x : rows . x = 0}."""
    R, pivots = _rref_rows(rows, ncols, F)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for fcol in free:
        v = [F.zero] * ncols
        v[fcol] = F.one
        for row, pc in zip(R, pivots):
            v[pc] = F(-row[fcol])
        basis.append(tuple(v))
    return _rref_rows(basis, ncols, F)[0]


def annihilator_rows(rows, ncols, F) -> list[tuple]:
    return null_space_rows(rows, ncols, F)


def solve_rows(rows, ncols, b, F):
    """One solution x of rows . x = b, free variables zeroed; None if inconsistent."""
    aug = [list(r) + [bi] for r, bi in zip(rows, b)]
    R, pivots = _rref_rows(aug, ncols + 1, F)
    if ncols in pivots:
        return None
    x = [F.zero] * ncols
    for row, pc in zip(R, pivots):
        x[pc] = row[ncols]
    return tuple(x)


def mat_mul(a, b, F):
    """a (r x s) times b (s x t) as row lists."""
    if not a:
        return []
    t = len(b[0]) if b else 0
    cols = list(zip(*b)) if b else [() for _ in range(t)]
    if F.kind == "fp":
        p = F.p
        return [tuple(sum(x * y for x, y in zip(row, col)) % p for col in cols) for row in a]
    return [tuple(sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in cols) for row in a]


def vec_mat(v, m, F):
    return mat_mul([v], m, F)[0] if m else ()


def vec_add(u, v, F):
    if F.kind == "fp":
        return tuple((a + b) % F.p for a, b in zip(u, v))
    return tuple(a + b for a, b in zip(u, v))


def vec_scale(c, v, F):
    if F.kind == "fp":
        return tuple(c * a % F.p for a in v)
    return tuple(c * a for a in v)


def vec_is_zero(v) -> bool:
    return all(x == 0 for x in v)


def inverse_rows(rows, F):
    n = len(rows)
    aug = [list(r) + [F.one if i == j else F.zero for j in range(n)] for i, r in enumerate(rows)]
    R, pivots = _rref_rows(aug, 2 * n, F)
    if pivots[:n] != list(range(n)) or len(R) < n:
        raise ZeroDivisionError("matrix is singular")
    return [tuple(r[n:]) for r in R]


@dataclass(frozen=True)
class ExactMatrix:
    field: FieldSpec
    nrows: int
    ncols: int
    entries: tuple  # tuple of row tuples

    def __post_init__(self):
        if len(self.entries) != self.nrows or any(len(r) != self.ncols for r in self.entries):
            raise ValueError("entry count does not match the declared shape")

    @staticmethod
    def from_rows(field: FieldSpec, rows: Sequence[Sequence], ncols: int | None = None) -> "ExactMatrix":
        rows = [field.vec(r) for r in rows]
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        return ExactMatrix(field, len(rows), ncols, tuple(rows))

    @staticmethod
    def zeros(field, r, c) -> "ExactMatrix":
        return ExactMatrix(field, r, c, tuple(tuple(field.zero for _ in range(c)) for _ in range(r)))

    @staticmethod
    def identity(field, n) -> "ExactMatrix":
        return ExactMatrix(field, n, n, tuple(tuple(field.one if i == j else field.zero
                                                    for j in range(n)) for i in range(n)))

    @property
    def rows(self) -> list[tuple]:
        return list(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    @property
    def T(self) -> "ExactMatrix":
        return ExactMatrix(self.field, self.ncols, self.nrows,
                           tuple(zip(*self.entries)) if self.nrows else
                           tuple(() for _ in range(self.ncols)))

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch in product")
        rows = mat_mul(self.entries, other.entries, self.field) if self.nrows else []
        if other.ncols == 0:
            rows = [() for _ in range(self.nrows)]
        return ExactMatrix(self.field, self.nrows, other.ncols, tuple(rows))

    def __add__(self, other):
        return ExactMatrix(self.field, self.nrows, self.ncols,
                           tuple(vec_add(a, b, self.field) for a, b in zip(self.entries, other.entries)))

    def __neg__(self):
        return self.scale(self.field(-1))

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return ExactMatrix(self.field, self.nrows, self.ncols,
                           tuple(vec_scale(c, r, self.field) for r in self.entries))

    def apply(self, x: Sequence) -> tuple:
        """m . x for a column vector x."""
        return tuple(vec_mat(x, self.T.entries, self.field)) if self.nrows else ()

    def is_zero(self) -> bool:
        return all(vec_is_zero(r) for r in self.entries)

    def to_json(self):
        return [[self.field.to_json(x) for x in r] for r in self.entries]

    @staticmethod
    def from_json(field, data, ncols: int | None = None):
        return ExactMatrix.from_rows(field, [[field.from_json(x) for x in r] for r in data], ncols)


@dataclass(frozen=True)
class SubspaceBasis:
    ambient_dim: int
    basis: ExactMatrix  # RREF rows

    @staticmethod
    def span(field: FieldSpec, ambient_dim: int, vectors: Iterable[Sequence]) -> "SubspaceBasis":
        rows = row_space_rows([field.vec(v) for v in vectors], ambient_dim, field)
        return SubspaceBasis(ambient_dim, ExactMatrix(field, len(rows), ambient_dim, tuple(rows)))

    @staticmethod
    def zero(field, n):
        return SubspaceBasis(n, ExactMatrix(field, 0, n, ()))

    @staticmethod
    def full(field, n):
        return SubspaceBasis(n, ExactMatrix.identity(field, n))

    @property
    def field(self) -> FieldSpec:
        return self.basis.field

    @property
    def dim(self) -> int:
        return self.basis.nrows

    @property
    def vectors(self) -> list[tuple]:
        return list(self.basis.entries)

    def pivots(self) -> list[int]:
        return [next(j for j, x in enumerate(r) if x != 0) for r in self.basis.entries]

    def reduce(self, v: Sequence) -> tuple:
        """Normal form of v modulo the subspace (zero at the pivot columns)."""
        F = self.field
        v = list(F.vec(v))
        for row, pc in zip(self.basis.entries, self.pivots()):
            c = v[pc]
            if c != 0:
                v = [F(a - c * b) for a, b in zip(v, row)]
        return tuple(v)

    def contains(self, v: Sequence) -> bool:
        return vec_is_zero(self.reduce(v))

    def contains_space(self, other: "SubspaceBasis") -> bool:
        return all(self.contains(v) for v in other.vectors)

    def __add__(self, other: "SubspaceBasis") -> "SubspaceBasis":
        return SubspaceBasis.span(self.field, self.ambient_dim, self.vectors + other.vectors)

    def intersect(self, other: "SubspaceBasis") -> "SubspaceBasis":
        F = self.field
        n = self.ambient_dim
        # annihilator of the intersection is the sum of annihilators
        ann = annihilator_rows(self.vectors, n, F) + annihilator_rows(other.vectors, n, F)
        return SubspaceBasis.span(F, n, null_space_rows(ann, n, F))

    def image(self, m_rows: Sequence[Sequence], target_dim: int) -> "SubspaceBasis":
        """Image under v -> v . m (row convention)."""
        F = self.field
        imgs = mat_mul(self.vectors, m_rows, F) if self.dim else []
        return SubspaceBasis.span(F, target_dim, imgs)

    def to_json(self):
        return {"ambient_dim": self.ambient_dim, "basis": self.basis.to_json()}

    @staticmethod
    def from_json(field, data):
        return SubspaceBasis.span(field, data["ambient_dim"],
                                  [[field.from_json(x) for x in r] for r in data["basis"]])


def rank(m: ExactMatrix) -> int:
    return rank_rows(m.entries, m.ncols, m.field)


def rref(m: ExactMatrix) -> tuple[ExactMatrix, list[int]]:
    R, piv = _rref_rows(m.entries, m.ncols, m.field)
    return ExactMatrix(m.field, len(R), m.ncols, tuple(R)), piv


def kernel_basis(m: ExactMatrix) -> SubspaceBasis:
    rows = null_space_rows(m.entries, m.ncols, m.field)
    return SubspaceBasis(m.ncols, ExactMatrix(m.field, len(rows), m.ncols, tuple(rows)))


def image_basis(m: ExactMatrix) -> SubspaceBasis:
    return SubspaceBasis.span(m.field, m.nrows, m.T.entries)


def solve_linear(a: ExactMatrix, b: Sequence):
    if len(b) != a.nrows:
        raise ValueError("right-hand side has the wrong length")
    return solve_rows(a.entries, a.ncols, a.field.vec(b), a.field)


def inverse(m: ExactMatrix) -> ExactMatrix:
    rows = inverse_rows(m.entries, m.field)
    return ExactMatrix(m.field, m.nrows, m.ncols, tuple(rows))


def gaussian_binomial(n: int, d: int, q: int) -> int:
    if d < 0 or d > n:
        return 0
    num = den = 1
    for i in range(d):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def gl_order(m: int, q: int) -> int:
    out = 1
    for i in range(m):
        out *= q**m - q**i
    return out


def _rref_patterns(n: int, d: int, F: FieldSpec) -> Iterator[list[tuple]]:
    p = F.p
    for pivots in itertools.combinations(range(n), d):
        pset = set(pivots)
        slots = [(i, j) for i, pc in enumerate(pivots) for j in range(pc + 1, n) if j not in pset]
        for vals in itertools.product(range(p), repeat=len(slots)):
            rows = [[0] * n for _ in range(d)]
            for i, pc in enumerate(pivots):
                rows[i][pc] = 1
            for (i, j), v in zip(slots, vals):
                rows[i][j] = v
            yield [tuple(r) for r in rows]


def enumerate_subspaces(ambient_dim: int, dim: int, field: FieldSpec,
                        budget: int = DEFAULT_ENUM_BUDGET) -> Iterator[SubspaceBasis]:
    if not field.is_finite:
        raise ValueError("subspace enumeration needs a prime field")
    count = gaussian_binomial(ambient_dim, dim, field.p)
    if count > budget:
        raise BudgetExceeded(count, budget, "subspace enumeration")
    for rows in _rref_patterns(ambient_dim, dim, field):
        yield SubspaceBasis(ambient_dim, ExactMatrix(field, dim, ambient_dim, tuple(rows)))


def enumerate_all_subspaces(ambient_dim, field, budget=DEFAULT_ENUM_BUDGET) -> Iterator[SubspaceBasis]:
    total = sum(gaussian_binomial(ambient_dim, d, field.p) for d in range(ambient_dim + 1))
    if total > budget:
        raise BudgetExceeded(total, budget, "subspace enumeration")
    for d in range(ambient_dim + 1):
        yield from enumerate_subspaces(ambient_dim, d, field, budget)


def enumerate_superspaces(base: SubspaceBasis, budget=DEFAULT_ENUM_BUDGET) -> Iterator[SubspaceBasis]:
    """All subspaces W with base <= W, via subspaces of the pivot complement."""
    F = base.field
    n = base.ambient_dim
    piv = set(base.pivots())
    free = [j for j in range(n) if j not in piv]
    for sub in enumerate_all_subspaces(len(free), F, budget):
        lifted = []
        for r in sub.vectors:
            v = [0] * n
            for j, x in zip(free, r):
                v[j] = x
            lifted.append(tuple(v))
        yield SubspaceBasis.span(F, n, base.vectors + lifted)


def sample_subspaces(ambient_dim: int, dim: int, field: FieldSpec, count: int,
                     seed: int) -> Iterator[SubspaceBasis]:
    if not field.is_finite:
        raise ValueError("subspace sampling needs a prime field")
    rng = random.Random(seed)
    seen = set()
    for _ in range(count):
        rows = [[rng.randrange(field.p) for _ in range(ambient_dim)] for _ in range(dim)]
        s = SubspaceBasis.span(field, ambient_dim, rows)
        if s.dim != dim or s.basis.entries in seen:
            continue
        seen.add(s.basis.entries)
        yield s


def enumerate_gl(m: int, field: FieldSpec, budget=DEFAULT_ENUM_BUDGET) -> Iterator[list[tuple]]:
    """All invertible m x m matrices over a prime field, as row lists."""
    count = gl_order(m, field.p)
    if count > budget:
        raise BudgetExceeded(count, budget, "GL enumeration")
    p = field.p
    for vals in itertools.product(range(p), repeat=m * m):
        rows = [tuple(vals[i * m:(i + 1) * m]) for i in range(m)]
        if rank_rows(rows, m, field) == m:
            yield rows


def random_matrix(field, r, c, rng, lo=-3, hi=3) -> list[tuple]:
    return [tuple(field.random(rng, lo, hi) for _ in range(c)) for _ in range(r)]


def random_invertible(field, n, rng) -> list[tuple]:
    while True:
        m = random_matrix(field, n, n, rng)
        if rank_rows(m, n, field) == n:
            return m


@dataclass(frozen=True)
class Bilinear:
    """Bilinear map A x B -> C stored as data[i][j] = image of e_i (x) e_j."""

    field: FieldSpec
    da: int
    db: int
    dc: int
    data: tuple

    @staticmethod
    def zeros(field, da, db, dc) -> "Bilinear":
        z = tuple(field.zero for _ in range(dc))
        return Bilinear(field, da, db, dc, tuple(tuple(z for _ in range(db)) for _ in range(da)))

    @staticmethod
    def from_function(field, da, db, dc, fn) -> "Bilinear":
        return Bilinear(field, da, db, dc,
                        tuple(tuple(field.vec(fn(i, j)) for j in range(db)) for i in range(da)))

    @staticmethod
    def from_matrix(field, da, db, dc, rows) -> "Bilinear":
        """Inverse of `matrix`: row i*db + j holds the image of e_i (x) e_j."""
        return Bilinear(field, da, db, dc,
                        tuple(tuple(field.vec(rows[i * db + j]) for j in range(db)) for i in range(da)))

    def matrix(self) -> list[tuple]:
        return [self.data[i][j] for i in range(self.da) for j in range(self.db)]

    def apply(self, u: Sequence, v: Sequence) -> tuple:
        F = self.field
        out = [F.zero] * self.dc
        for i, ui in enumerate(u):
            if ui == 0:
                continue
            for j, vj in enumerate(v):
                if vj == 0:
                    continue
                c = ui * vj
                for k, t in enumerate(self.data[i][j]):
                    if t != 0:
                        out[k] += c * t
        return F.vec(out)

    def apply_tensor(self, w: Sequence) -> tuple:
        """Apply to a flattened element of A (x) B (index i*db + j)."""
        F = self.field
        out = [F.zero] * self.dc
        for idx, c in enumerate(w):
            if c == 0:
                continue
            row = self.data[idx // self.db][idx % self.db]
            for k, t in enumerate(row):
                if t != 0:
                    out[k] += c * t
        return F.vec(out)

    def swap(self) -> "Bilinear":
        return Bilinear(self.field, self.db, self.da, self.dc,
                        tuple(tuple(self.data[i][j] for i in range(self.da)) for j in range(self.db)))

    def to_json(self):
        F = self.field
        return {"dims": [self.da, self.db, self.dc],
                "entries": [[i, j, k, F.to_json(x)] for i in range(self.da) for j in range(self.db)
                            for k, x in enumerate(self.data[i][j]) if x != 0]}

    @staticmethod
    def from_json(field, d) -> "Bilinear":
        da, db, dc = d["dims"]
        arr = [[[field.zero] * dc for _ in range(db)] for _ in range(da)]
        for i, j, k, x in d["entries"]:
            arr[i][j][k] = field.from_json(x)
        return Bilinear(field, da, db, dc, tuple(tuple(tuple(c) for c in r) for r in arr))
