"""Abstract spaces of complexes, chain spaces, and their group actions.

Conventions
- A tensor in A (x) B is an ExactMatrix of shape (dim A, dim B).
- Bilinear maps A (x) B -> C are exactlin.Bilinear; flattened A (x) B index is i*dim B + j.
- Type-1 points: phi1 (z1 x m), z2 (vector), phi3 (z3 x m), z4 (vector).
- Type-2 points: psi1 (z1 x n), psi2 (y x n), psi3 (z3 x n).
- Chain blocks: for summands (i,j) -> (i+1,j2), a tuple with one multiplicity matrix
  (m_src x m_tgt) per Hom basis element; multiplicity vectors are rows, v -> v . A.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .exactlin import (Bilinear, BudgetExceeded, ExactMatrix, FieldSpec, enumerate_gl, gl_order,
                       inverse_rows, mat_mul, null_space_rows, random_invertible, rank_rows,
                       vec_add, vec_is_zero)
from .sheafctx import CompositionContext, ContextStats, complex_stats, form, morphism_stats, parse_form


class SpaceError(ValueError):
    def __init__(self, violations):
        super().__init__("; ".join(violations))
        self.violations = list(violations)


def _m(F, rows, ncols):
    return ExactMatrix.from_rows(F, rows, ncols)


def _zero_vec(F, n):
    return tuple(F.zero for _ in range(n))


def _flat(mat: ExactMatrix) -> tuple:
    return tuple(x for r in mat.entries for x in r)


def _contract(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    """<a, b> over the shared second index: a (p x n), b (q x n) -> (p x q)."""
    return a @ b.T


# ---------------------------------------------------------------- type 1

@dataclass(frozen=True)
class Type1Space:
    field: FieldSpec
    z1: int
    z2: int
    z3: int
    z4: int
    h: int
    t: int
    m: int
    sigma: Bilinear  # Z1 x H -> Z2
    sigma_p: Bilinear  # H x Z4 -> Z3
    tau: Bilinear  # Z1 x Z3 -> T
    tau_p: Bilinear  # Z2 x Z4 -> T

    def z4_embedding(self) -> list[tuple]:
        """Rows: images of the Z4 basis in H* (x) Z3 (index j*z3 + c)."""
        return [tuple(self.sigma_p.data[j][l][c] for j in range(self.h) for c in range(self.z3))
                for l in range(self.z4)]

    def covector(self, z4) -> ExactMatrix:
        """z4 viewed in Z3 (x) H*: a (z3 x h) matrix."""
        F = self.field
        rows = []
        for c in range(self.z3):
            rows.append(tuple(F(sum(z4[l] * self.sigma_p.data[j][l][c] for l in range(self.z4)))
                              for j in range(self.h)))
        return _m(F, rows, self.h)

    def to_json(self):
        return {"type": 1, "field": self.field.label(),
                "dims": [self.z1, self.z2, self.z3, self.z4, self.h, self.t, self.m],
                "sigma": self.sigma.to_json(), "sigma_p": self.sigma_p.to_json(),
                "tau": self.tau.to_json(), "tau_p": self.tau_p.to_json()}

    @staticmethod
    def from_json(d) -> "Type1Space":
        F = FieldSpec.parse(d["field"])
        z1, z2, z3, z4, h, t, m = d["dims"]
        return build_type1(F, (z1, z2, z3, z4, h, t, m), Bilinear.from_json(F, d["sigma"]),
                           Bilinear.from_json(F, d["sigma_p"]), Bilinear.from_json(F, d["tau"]),
                           Bilinear.from_json(F, d["tau_p"]))


def build_type1(field, dims, sigma, sigma_p, tau, tau_p) -> Type1Space:
    z1, z2, z3, z4, h, t, m = dims
    bad = []
    shapes = {"sigma": (sigma, (z1, h, z2)), "sigma_p": (sigma_p, (h, z4, z3)),
              "tau": (tau, (z1, z3, t)), "tau_p": (tau_p, (z2, z4, t))}
    for name, (b, want) in shapes.items():
        if (b.da, b.db, b.dc) != want:
            bad.append(f"{name} has shape {(b.da, b.db, b.dc)}, expected {want}")
    if bad:
        raise SpaceError(bad)
    sp = Type1Space(field, z1, z2, z3, z4, h, t, m, sigma, sigma_p, tau, tau_p)
    if rank_rows(sigma.matrix(), z2, field) != z2:
        # a vector of Z2 missed by the image
        ann = null_space_rows(sigma.matrix(), z2, field)
        bad.append(f"sigma is not surjective; image misses a vector pairing nontrivially with {ann[0]}")
    emb = sp.z4_embedding()
    if rank_rows(emb, h * z3, field) != z4:
        ker = null_space_rows(list(zip(*emb)) if emb else [], z4, field)
        bad.append(f"sigma_p does not embed Z4 into H* x Z3; kernel vector {ker[0] if ker else ()}")
    for i, j, l in itertools.product(range(z1), range(h), range(z4)):
        lhs = tau_p.apply(sigma.data[i][j], _unit(field, z4, l))
        rhs = tau.apply(_unit(field, z1, i), sigma_p.data[j][l])
        if lhs != rhs:
            bad.append(f"diagram (D) fails on basis (z1={i}, h={j}, z4={l})")
            break
    if bad:
        raise SpaceError(bad)
    return sp


def _unit(F, n, i):
    return tuple(F.one if k == i else F.zero for k in range(n))


@dataclass(frozen=True)
class Type1Point:
    phi1: ExactMatrix  # z1 x m
    z2: tuple
    phi3: ExactMatrix  # z3 x m
    z4: tuple

    def key(self):
        return (self.phi1.entries, self.z2, self.phi3.entries, self.z4)

    def to_json(self):
        F = self.phi1.field
        return {"phi1": self.phi1.to_json(), "z2": [F.to_json(x) for x in self.z2],
                "phi3": self.phi3.to_json(), "z4": [F.to_json(x) for x in self.z4]}

    @staticmethod
    def from_json(space, d):
        F = space.field
        return Type1Point(ExactMatrix.from_json(F, d["phi1"], space.m), F.vec(F.from_json(x) for x in d["z2"]),
                          ExactMatrix.from_json(F, d["phi3"], space.m), F.vec(F.from_json(x) for x in d["z4"]))


def type1_point(space: Type1Space, phi1, z2, phi3, z4) -> Type1Point:
    F = space.field
    return Type1Point(_m(F, phi1, space.m), F.vec(z2), _m(F, phi3, space.m), F.vec(z4))


def invariant1(space: Type1Space, x: Type1Point) -> tuple:
    """tau(<phi1, phi3>) + tau'(z2 (x) z4) in T."""
    F = space.field
    a = space.tau.apply_tensor(_flat(_contract(x.phi1, x.phi3)))
    b = space.tau_p.apply(x.z2, x.z4)
    return vec_add(a, b, F)


def _check_shape1(space, x):
    ok = (x.phi1.nrows == space.z1 and x.phi1.ncols == space.m and len(x.z2) == space.z2
          and x.phi3.nrows == space.z3 and x.phi3.ncols == space.m and len(x.z4) == space.z4)
    if not ok:
        raise SpaceError(["point shape does not match the space"])


def is_point(space, x):
    """(True/False, residual) for type-1 or type-2 points."""
    if isinstance(space, Type1Space):
        _check_shape1(space, x)
        res = invariant1(space, x)
        return vec_is_zero(res), res
    _check_shape2(space, x)
    r1 = space.tau.apply_tensor(_flat(_contract(x.psi1, x.psi3)))
    r2 = space.lam.apply_tensor(_flat(_contract(x.psi2, x.psi3)))
    return vec_is_zero(r1) and vec_is_zero(r2), (r1, r2)


@dataclass(frozen=True)
class GroupElement1:
    gl: object  # scalar in G_L = k*
    gr: object  # scalar in G_R = k*
    g0: object  # scalar in G_0 = k*
    gm: ExactMatrix  # m x m invertible
    phi: ExactMatrix  # m x h, the unipotent coordinate in M* (x) H

    def key(self):
        return (self.gl, self.gr, self.g0, self.gm.entries, self.phi.entries)


def identity1(space) -> GroupElement1:
    F = space.field
    return GroupElement1(F.one, F.one, F.one, ExactMatrix.identity(F, space.m),
                         ExactMatrix.zeros(F, space.m, space.h))


def act1(space: Type1Space, g: GroupElement1, x: Type1Point) -> Type1Point:
    F = space.field
    if g.gl == 0 or g.gr == 0 or g.g0 == 0 or rank_rows(g.gm.entries, space.m, F) != space.m:
        raise ValueError("group element has a non-invertible block")
    gm_inv = ExactMatrix(F, space.m, space.m, tuple(inverse_rows(g.gm.entries, F)))
    phi1 = x.phi1 @ g.gm.T
    shift = space.sigma.apply_tensor(_flat(x.phi1 @ g.phi))
    z2 = vec_add(shift, tuple(F(g.g0 * c) for c in x.z2), F)
    g0i = F.inv(g.g0)
    wg = space.covector(x.z4)
    phi3 = (x.phi3 - (wg @ g.phi.T).scale(g0i)) @ gm_inv
    z4 = tuple(F(g0i * c) for c in x.z4)
    return Type1Point(phi1.scale(g.gl), tuple(F(g.gl * c) for c in z2),
                      phi3.scale(g.gr), tuple(F(g.gr * c) for c in z4))


def mul1(space, g: GroupElement1, h: GroupElement1) -> GroupElement1:
    """Product with act1(g*h, x) = act1(g, act1(h, x))."""
    F = space.field
    return GroupElement1(F(g.gl * h.gl), F(g.gr * h.gr), F(g.g0 * h.g0), g.gm @ h.gm,
                         h.gm.T @ g.phi + h.phi.scale(g.g0))


def enumerate_group1(space, budget=10**7):
    F = space.field
    size = group1_order(space)
    if size > budget:
        raise BudgetExceeded(size, budget, "type-1 group enumeration")
    gms = [ExactMatrix(F, space.m, space.m, tuple(r)) for r in enumerate_gl(space.m, F, budget)]
    phis = [ExactMatrix(F, space.m, space.h, tuple(tuple(vals[a * space.h:(a + 1) * space.h])
                                                    for a in range(space.m)))
            for vals in itertools.product(range(F.p), repeat=space.m * space.h)]
    for gl, gr, g0 in itertools.product(F.units(), repeat=3):
        for gm in gms:
            for phi in phis:
                yield GroupElement1(gl, gr, g0, gm, phi)


def group1_order(space) -> int:
    p = space.field.p
    return (p - 1) ** 3 * gl_order(space.m, p) * p ** (space.m * space.h)


def random_group1(space, rng) -> GroupElement1:
    F = space.field

    def unit():
        while True:
            c = F.random(rng)
            if c != 0:
                return c
    return GroupElement1(unit(), unit(), unit(),
                         _m(F, random_invertible(F, space.m, rng), space.m),
                         _m(F, [[F.random(rng) for _ in range(space.h)] for _ in range(space.m)], space.h))


# ---------------------------------------------------------------- type 2

@dataclass(frozen=True)
class Type2Space:
    field: FieldSpec
    z1: int
    y2: int
    t2: int
    z3: int
    t: int
    k: int
    n: int
    nu: Bilinear  # K x Y2 -> Z1
    nu_p: Bilinear  # K x T2 -> T
    lam: Bilinear  # Y2 x Z3 -> T2
    tau: Bilinear  # Z1 x Z3 -> T

    def k_embedding(self) -> list[tuple]:
        """Rows: images of the K basis in Z1 (x) Y2* (index i*y2 + y)."""
        return [tuple(self.nu.data[kk][y][i] for i in range(self.z1) for y in range(self.y2))
                for kk in range(self.k)]

    def to_json(self):
        return {"type": 2, "field": self.field.label(),
                "dims": [self.z1, self.y2, self.t2, self.z3, self.t, self.k, self.n],
                "nu": self.nu.to_json(), "nu_p": self.nu_p.to_json(),
                "lam": self.lam.to_json(), "tau": self.tau.to_json()}

    @staticmethod
    def from_json(d) -> "Type2Space":
        F = FieldSpec.parse(d["field"])
        return build_type2(F, tuple(d["dims"]), Bilinear.from_json(F, d["nu"]),
                           Bilinear.from_json(F, d["nu_p"]), Bilinear.from_json(F, d["lam"]),
                           Bilinear.from_json(F, d["tau"]))


def build_type2(field, dims, nu, nu_p, lam, tau) -> Type2Space:
    z1, y2, t2, z3, t, k, n = dims
    bad = []
    shapes = {"nu": (nu, (k, y2, z1)), "nu_p": (nu_p, (k, t2, t)),
              "lam": (lam, (y2, z3, t2)), "tau": (tau, (z1, z3, t))}
    for name, (b, want) in shapes.items():
        if (b.da, b.db, b.dc) != want:
            bad.append(f"{name} has shape {(b.da, b.db, b.dc)}, expected {want}")
    if bad:
        raise SpaceError(bad)
    sp = Type2Space(field, z1, y2, t2, z3, t, k, n, nu, nu_p, lam, tau)
    emb = sp.k_embedding()
    if rank_rows(emb, z1 * y2, field) != k:
        bad.append("nu does not embed K into Z1 x Y2*")
    if rank_rows(lam.matrix(), t2, field) != t2:
        bad.append("lambda is not surjective")
    for kk, y, c in itertools.product(range(k), range(y2), range(z3)):
        lhs = tau.apply(nu.data[kk][y], _unit(field, z3, c))
        rhs = nu_p.apply(_unit(field, k, kk), lam.data[y][c])
        if lhs != rhs:
            bad.append(f"diagram (D') fails on basis (k={kk}, y2={y}, z3={c})")
            break
    if bad:
        raise SpaceError(bad)
    return sp


@dataclass(frozen=True)
class Type2Point:
    psi1: ExactMatrix  # z1 x n
    psi2: ExactMatrix  # y2 x n
    psi3: ExactMatrix  # z3 x n

    def key(self):
        return (self.psi1.entries, self.psi2.entries, self.psi3.entries)

    def to_json(self):
        return {"psi1": self.psi1.to_json(), "psi2": self.psi2.to_json(), "psi3": self.psi3.to_json()}

    @staticmethod
    def from_json(space, d):
        F = space.field
        return Type2Point(ExactMatrix.from_json(F, d["psi1"], space.n),
                          ExactMatrix.from_json(F, d["psi2"], space.n),
                          ExactMatrix.from_json(F, d["psi3"], space.n))


def _check_shape2(space, x):
    ok = (x.psi1.nrows == space.z1 and x.psi2.nrows == space.y2 and x.psi3.nrows == space.z3
          and x.psi1.ncols == x.psi2.ncols == x.psi3.ncols == space.n)
    if not ok:
        raise SpaceError(["point shape does not match the space"])


@dataclass(frozen=True)
class GroupElement2:
    gn: ExactMatrix  # n x n invertible
    gl: object
    g0: object
    k: tuple  # vector in K
    gr: object


def act2(space: Type2Space, g: GroupElement2, x: Type2Point) -> Type2Point:
    F = space.field
    if g.gl == 0 or g.g0 == 0 or g.gr == 0 or rank_rows(g.gn.entries, space.n, F) != space.n:
        raise ValueError("group element has a non-invertible block")
    gn_inv = ExactMatrix(F, space.n, space.n, tuple(inverse_rows(g.gn.entries, F)))
    psi1 = x.psi1 @ g.gn.T
    psi2 = x.psi2 @ g.gn.T
    # nu(k (x) y2) for each N-column
    cols = []
    for a in range(space.n):
        y = tuple(psi2.entries[r][a] for r in range(space.y2))
        cols.append(space.nu.apply(g.k, y))
    shift = _m(F, [tuple(cols[a][i] for a in range(space.n)) for i in range(space.z1)], space.n) \
        if space.z1 else psi1
    new1 = psi1.scale(g.gl) + shift if space.z1 else psi1
    new2 = psi2.scale(g.g0)
    new3 = (x.psi3 @ gn_inv).scale(g.gr)
    return Type2Point(new1, new2, new3)


def enumerate_group2(space, budget=10**7):
    F = space.field
    p = F.p
    size = (p - 1) ** 3 * gl_order(space.n, p) * p ** space.k
    if size > budget:
        raise BudgetExceeded(size, budget, "type-2 group enumeration")
    gns = [ExactMatrix(F, space.n, space.n, tuple(r)) for r in enumerate_gl(space.n, F, budget)]
    for gl, g0, gr in itertools.product(F.units(), repeat=3):
        for gn in gns:
            for k in itertools.product(range(p), repeat=space.k):
                yield GroupElement2(gn, gl, g0, tuple(k), gr)


def random_group2(space, rng) -> GroupElement2:
    F = space.field

    def unit():
        while True:
            c = F.random(rng)
            if c != 0:
                return c
    return GroupElement2(_m(F, random_invertible(F, space.n, rng), space.n), unit(), unit(),
                         tuple(F.random(rng) for _ in range(space.k)), unit())


# ---------------------------------------------------------------- random valid type-1 spaces

def random_type1(field, dims, rng, tries=200) -> Type1Space:
    """A random valid type-1 space: random sigma, sigma', then tau' forced by (D) with random tau
    chosen so that (D) is solvable (tau' is solved for, tau is random on a complement)."""
    z1, z2, z3, z4, h, t, m = dims
    for _ in range(tries):
        sig = Bilinear.from_function(field, z1, h, z2, lambda i, j: [field.random(rng) for _ in range(z2)])
        sgp = Bilinear.from_function(field, h, z4, z3, lambda i, j: [field.random(rng) for _ in range(z3)])
        if rank_rows(sig.matrix(), z2, field) != z2:
            continue
        tmp = Type1Space(field, z1, z2, z3, z4, h, t, m, sig, sgp,
                         Bilinear.zeros(field, z1, z3, t), Bilinear.zeros(field, z2, z4, t))
        if rank_rows(tmp.z4_embedding(), h * z3, field) != z4:
            continue
        tau, tau_p = _solve_taus(field, dims, sig, sgp, rng)
        return build_type1(field, dims, sig, sgp, tau, tau_p)
    raise RuntimeError("could not draw a valid type-1 space")


def _solve_taus(field, dims, sig, sgp, rng):
    """Random (tau, tau') with tau'(sigma(a,b), l) = tau(a, sigma'(b, l)) for all basis triples.

    Unknowns: tau entries (z1*z3) and tau' entries (z2*z4), per T-coordinate.
    """
    z1, z2, z3, z4, h, t, m = dims
    nun = z1 * z3 + z2 * z4
    eqs = []
    for i, j, l in itertools.product(range(z1), range(h), range(z4)):
        row = [field.zero] * nun
        for r, c in enumerate(sig.data[i][j]):
            row[z1 * z3 + r * z4 + l] += c
        for c, v in enumerate(sgp.data[j][l]):
            row[i * z3 + c] -= v
        eqs.append(field.vec(row))
    sol = null_space_rows(eqs, nun, field)  # may be {0}: tau = tau' = 0 is still valid
    cols = []
    for _ in range(t):
        v = [field.zero] * nun
        for s in sol:
            c = field.random(rng)
            v = [field(a + c * b) for a, b in zip(v, s)]
        cols.append(v)
    tau = Bilinear.from_function(field, z1, z3, t, lambda i, c: [cols[k][i * z3 + c] for k in range(t)])
    tau_p = Bilinear.from_function(field, z2, z4, t,
                                   lambda r, l: [cols[k][z1 * z3 + r * z4 + l] for k in range(t)])
    return tau, tau_p


def random_type2(field, dims, rng, tries=200) -> Type2Space:
    """A random valid type-2 space: random nu, lambda, then (tau, nu') from the solutions of (D')."""
    z1, y2, t2, z3, t, k, n = dims
    for _ in range(tries):
        nu = Bilinear.from_function(field, k, y2, z1, lambda a, b: [field.random(rng) for _ in range(z1)])
        lam = Bilinear.from_function(field, y2, z3, t2, lambda a, b: [field.random(rng) for _ in range(t2)])
        tmp = Type2Space(field, z1, y2, t2, z3, t, k, n, nu, Bilinear.zeros(field, k, t2, t), lam,
                         Bilinear.zeros(field, z1, z3, t))
        if rank_rows(tmp.k_embedding(), z1 * y2, field) != k or rank_rows(lam.matrix(), t2, field) != t2:
            continue
        # unknowns: tau (z1*z3) then nu' (k*t2), per T-coordinate
        nun = z1 * z3 + k * t2
        eqs = []
        for kk, y, c in itertools.product(range(k), range(y2), range(z3)):
            row = [field.zero] * nun
            for i, v in enumerate(nu.data[kk][y]):
                row[i * z3 + c] += v
            for r, v in enumerate(lam.data[y][c]):
                row[z1 * z3 + kk * t2 + r] -= v
            eqs.append(field.vec(row))
        sol = null_space_rows(eqs, nun, field)
        cols = []
        for _ in range(t):
            v = [field.zero] * nun
            for s_ in sol:
                c = field.random(rng)
                v = [field(a + c * b) for a, b in zip(v, s_)]
            cols.append(v)
        tau = Bilinear.from_function(field, z1, z3, t, lambda i, c: [cols[q][i * z3 + c] for q in range(t)])
        nu_p = Bilinear.from_function(field, k, t2, t,
                                      lambda kk, r: [cols[q][z1 * z3 + kk * t2 + r] for q in range(t)])
        return build_type2(field, dims, nu, nu_p, lam, tau)
    raise RuntimeError("could not draw a valid type-2 space")


def scalar_type1(field) -> Type1Space:
    one = Bilinear(field, 1, 1, 1, (((field.one,),),))
    return build_type1(field, (1, 1, 1, 1, 1, 1, 1), one, one, one, one)


def all_points1(space: Type1Space):
    """Every point of Q_C over a prime field (brute force)."""
    F = space.field
    n = space.z1 * space.m + space.z2 + space.z3 * space.m + space.z4
    for vals in itertools.product(range(F.p), repeat=n):
        it = iter(vals)
        phi1 = [tuple(next(it) for _ in range(space.m)) for _ in range(space.z1)]
        z2 = tuple(next(it) for _ in range(space.z2))
        phi3 = [tuple(next(it) for _ in range(space.m)) for _ in range(space.z3)]
        z4 = tuple(next(it) for _ in range(space.z4))
        x = type1_point(space, phi1, z2, phi3, z4)
        if is_point(space, x)[0]:
            yield x


def random_point1(space: Type1Space, rng, tries=500):
    """A random point: random phi1, z2, then (phi3, z4) from the linear solution space."""
    F = space.field
    for _ in range(tries):
        phi1 = [[F.random(rng) for _ in range(space.m)] for _ in range(space.z1)]
        z2 = [F.random(rng) for _ in range(space.z2)]
        nun = space.z3 * space.m + space.z4
        rows = []
        for k in range(space.t):
            row = []
            for c in range(space.z3):
                for a in range(space.m):
                    row.append(F(sum(phi1[i][a] * space.tau.data[i][c][k] for i in range(space.z1))))
            for l in range(space.z4):
                row.append(F(sum(z2[r] * space.tau_p.data[r][l][k] for r in range(space.z2))))
            rows.append(tuple(row))
        sol = null_space_rows(rows, nun, F)
        v = [F.zero] * nun
        for s in sol:
            c = F.random(rng)
            v = [F(a + c * b) for a, b in zip(v, s)]
        phi3 = [v[c * space.m:(c + 1) * space.m] for c in range(space.z3)]
        z4 = v[space.z3 * space.m:]
        x = type1_point(space, phi1, z2, phi3, z4)
        if is_point(space, x)[0]:
            return x
    raise RuntimeError("no point found")


# ---------------------------------------------------------------- chains

@dataclass(frozen=True)
class ChainSpace:
    ctx: CompositionContext
    terms: tuple  # terms[i] = tuple of (object, multiplicity)
    stats: ContextStats | None = None
    label: str = "chain"

    @property
    def p(self) -> int:
        return len(self.terms) - 1

    def factors(self) -> list[tuple]:
        return [(i, j) for i, term in enumerate(self.terms) for j in range(len(term))]

    def mult(self, f) -> int:
        return self.terms[f[0]][f[1]][1]

    def obj(self, f):
        return self.terms[f[0]][f[1]][0]

    def arrows(self) -> list[tuple]:
        """(i, j, j2) for consecutive summands with nonzero Hom."""
        out = []
        for i in range(self.p):
            for j, (x, _) in enumerate(self.terms[i]):
                for j2, (y, _) in enumerate(self.terms[i + 1]):
                    if self.ctx.dim(x, y):
                        out.append((i, j, j2))
        return out

    def unipotent_slots(self) -> list[tuple]:
        """(i, j, j2) with j < j2 inside term i and Hom(E_j, E_j2) nonzero."""
        out = []
        for i, term in enumerate(self.terms):
            for j, j2 in itertools.combinations(range(len(term)), 2):
                if self.ctx.dim(term[j][0], term[j2][0]):
                    out.append((i, j, j2))
        return out

    def unipotent_dim(self) -> int:
        return sum(self.ctx.dim(self.terms[i][j][0], self.terms[i][j2][0])
                   * self.terms[i][j][1] * self.terms[i][j2][1] for i, j, j2 in self.unipotent_slots())

    def group_dim(self) -> int:
        return self.unipotent_dim() + sum(m * m for term in self.terms for _, m in term)

    def check_hypotheses(self) -> list[str]:
        bad = []
        ctx = self.ctx
        if self.p > 8 or sum(m for term in self.terms for _, m in term) > 64:
            bad.append("chain exceeds desk scale (p <= 8, total multiplicity <= 64)")
        flat = [(i, j, x) for i, term in enumerate(self.terms) for j, (x, _) in enumerate(term)]
        for (i, j, x), (i2, j2, y) in itertools.product(flat, repeat=2):
            if (i > i2 or (i == i2 and j > j2)) and ctx.dim(x, y):
                bad.append(f"Hom({x},{y}) must vanish (summand ({i},{j}) to ({i2},{j2}))")
            if i == i2 and j == j2 and ctx.dim(x, x) != 1:
                bad.append(f"{x} is not simple")
        return bad

    def to_json(self):
        return {"terms": [[[x, m] for x, m in term] for term in self.terms], "label": self.label}


@dataclass(frozen=True)
class ChainPoint:
    space: ChainSpace
    blocks: dict  # (i, j, j2) -> tuple over Hom basis of row-tuples (m_src x m_tgt)

    def block(self, i, j, j2):
        sp = self.space
        b = self.blocks.get((i, j, j2))
        if b is not None:
            return b
        x, m1 = sp.terms[i][j]
        y, m2 = sp.terms[i + 1][j2]
        return _zero_block(sp.ctx.field, sp.ctx.dim(x, y), m1, m2)

    def key(self):
        return tuple(sorted((k, v) for k, v in self.blocks.items()))

    def to_json(self):
        F = self.space.ctx.field
        return {"space": self.space.to_json(),
                "blocks": [{"at": list(k), "mats": [[[F.to_json(x) for x in r] for r in mat] for mat in v]}
                           for k, v in sorted(self.blocks.items())]}


def _zero_block(F, nh, m1, m2):
    z = tuple(tuple(F.zero for _ in range(m2)) for _ in range(m1))
    return tuple(z for _ in range(nh))


def compose_blocks(ctx, x, y, z, a, b, m_x, m_z):
    """Block for x -> y then y -> z; a over Hom(x,y), b over Hom(y,z)."""
    F = ctx.field
    nq = ctx.dim(x, z)
    out = [[[F.zero] * m_z for _ in range(m_x)] for _ in range(nq)]
    if nq == 0:
        return _zero_block(F, 0, m_x, m_z)
    t = ctx.tensor(x, y, z)
    for hh, ah in enumerate(a):
        if all(vec_is_zero(r) for r in ah):
            continue
        for kk, bk in enumerate(b):
            coeffs = t.data[hh][kk]
            if vec_is_zero(coeffs) or all(vec_is_zero(r) for r in bk):
                continue
            prod = mat_mul(ah, bk, F)
            for q, c in enumerate(coeffs):
                if c != 0:
                    for r in range(m_x):
                        row = out[q][r]
                        for s in range(m_z):
                            row[s] += c * prod[r][s]
    return tuple(tuple(F.vec(r) for r in mat) for mat in out)


def add_blocks(F, a, b):
    return tuple(tuple(vec_add(r1, r2, F) for r1, r2 in zip(m1, m2)) for m1, m2 in zip(a, b))


def chain_residuals(x: ChainPoint) -> dict:
    """Nonzero blocks of f_{i+1} o f_i, keyed by (i, j, j3)."""
    sp = x.space
    ctx = sp.ctx
    F = ctx.field
    out = {}
    for i in range(sp.p - 1):
        for j, (a, ma) in enumerate(sp.terms[i]):
            for j3, (c, mc) in enumerate(sp.terms[i + 2]):
                acc = _zero_block(F, ctx.dim(a, c), ma, mc)
                for j2, (b, _) in enumerate(sp.terms[i + 1]):
                    if ctx.dim(a, b) and ctx.dim(b, c):
                        acc = add_blocks(F, acc, compose_blocks(ctx, a, b, c, x.block(i, j, j2),
                                                                x.block(i + 1, j2, j3), ma, mc))
                if any(not vec_is_zero(r) for mat in acc for r in mat):
                    out[(i, j, j3)] = acc
    return out


def build_chain(space: ChainSpace, blocks: dict, check=True) -> ChainPoint:
    ctx = space.ctx
    F = ctx.field
    clean = {}
    for (i, j, j2), mats in blocks.items():
        x, m1 = space.terms[i][j]
        y, m2 = space.terms[i + 1][j2]
        if len(mats) != ctx.dim(x, y):
            raise SpaceError([f"block {(i, j, j2)} has {len(mats)} Hom coefficients, expected {ctx.dim(x, y)}"])
        mats = tuple(tuple(F.vec(r) for r in mat) for mat in mats)
        if any(len(mat) != m1 or any(len(r) != m2 for r in mat) for mat in mats):
            raise SpaceError([f"block {(i, j, j2)} has the wrong multiplicity shape"])
        if mats:
            clean[(i, j, j2)] = mats
    pt = ChainPoint(space, clean)
    if check:
        bad = space.check_hypotheses()
        if bad:
            raise SpaceError(bad)
        res = chain_residuals(pt)
        if res:
            raise SpaceError([f"chain condition fails at {k}: {v}" for k, v in res.items()])
    return pt


def morphism_setting(ctx, e1, e2, f1, m1, m2, n1) -> ChainSpace:
    bad = []
    for x, y in ((e2, e1), (f1, e1), (f1, e2)):
        if ctx.dim(x, y):
            bad.append(f"Hom({x},{y}) must vanish")
    for x in (e1, e2, f1):
        if ctx.dim(x, x) != 1:
            bad.append(f"{x} must be simple")
    if bad:
        raise SpaceError(bad)
    return ChainSpace(ctx, (((e1, m1), (e2, m2)), ((f1, n1),)), morphism_stats(ctx, e1, e2, f1),
                      "morphism")


def complex_setting(ctx, e1, f1, f2, g1, l1, m1, m2, n1, h1=None) -> ChainSpace:
    """E1 (x) L1 -> (F1 (x) M1) + (F2 (x) M2) -> G1 (x) N1."""
    sp = ChainSpace(ctx, (((e1, l1),), ((f1, m1), (f2, m2)), ((g1, n1),)),
                    complex_stats(ctx, e1, f1, f2, h1) if h1 else None, "complex")
    bad = sp.check_hypotheses()
    if bad:
        raise SpaceError(bad)
    return sp


def block_coordinates(space: ChainSpace, i: int) -> list[tuple]:
    """Flat coordinate labels (j, j2, h, a, b) of the map from term i to term i+1."""
    ctx = space.ctx
    out = []
    for j, (x, mx) in enumerate(space.terms[i]):
        for j2, (y, my) in enumerate(space.terms[i + 1]):
            for h in range(ctx.dim(x, y)):
                for a in range(mx):
                    for b in range(my):
                        out.append((j, j2, h, a, b))
    return out


def blocks_from_flat(space, i, labels, vec):
    ctx = space.ctx
    F = ctx.field
    arr = {}
    for (j, j2, h, a, b), c in zip(labels, vec):
        if (i, j, j2) not in arr:
            x, mx = space.terms[i][j]
            y, my = space.terms[i + 1][j2]
            arr[(i, j, j2)] = [[[F.zero] * my for _ in range(mx)] for _ in range(ctx.dim(x, y))]
        arr[(i, j, j2)][h][a][b] = c
    return {k: tuple(tuple(tuple(r) for r in mat) for mat in v) for k, v in arr.items()}


def random_chain_point(space: ChainSpace, rng, density=1.0) -> ChainPoint:
    """Random point: each map drawn from the solution space of the chain condition."""
    ctx = space.ctx
    F = ctx.field
    blocks = {}
    for i in range(space.p):
        labels = block_coordinates(space, i)
        if i == 0:
            vec = [F.random(rng) if rng.random() < density else F.zero for _ in labels]
        else:
            # linear constraints: f_i o f_{i-1} = 0
            eqs = []
            for idx in range(len(labels)):
                unit = [F.zero] * len(labels)
                unit[idx] = F.one
                trial = dict(blocks)
                trial.update(blocks_from_flat(space, i, labels, unit))
                pt = ChainPoint(space, trial)
                eqs.append(_flat_residual(pt, i - 1))
            rows = list(zip(*eqs)) if eqs and eqs[0] else []
            sol = null_space_rows(rows, len(labels), F)
            vec = [F.zero] * len(labels)
            for s in sol:
                if rng.random() < density:
                    c = F.random(rng)
                    vec = [F(a + c * b) for a, b in zip(vec, s)]
        blocks.update(blocks_from_flat(space, i, labels, vec))
    return build_chain(space, blocks)


def all_chain_points(space: ChainSpace, budget=10**6):
    """Every point of the chain space over a prime field (brute force)."""
    F = space.ctx.field
    labels = [block_coordinates(space, i) for i in range(space.p)]
    n = sum(len(lab) for lab in labels)
    if F.p ** n > budget:
        raise BudgetExceeded(F.p ** n, budget, "chain point enumeration")
    for vals in itertools.product(range(F.p), repeat=n):
        blocks, pos = {}, 0
        for i, lab in enumerate(labels):
            blocks.update(blocks_from_flat(space, i, lab, F.vec(vals[pos:pos + len(lab)])))
            pos += len(lab)
        pt = ChainPoint(space, blocks)
        if not chain_residuals(pt):
            yield pt


def _flat_residual(pt, i):
    sp = pt.space
    ctx = sp.ctx
    F = ctx.field
    out = []
    for j, (a, ma) in enumerate(sp.terms[i]):
        for j3, (c, mc) in enumerate(sp.terms[i + 2]):
            acc = _zero_block(F, ctx.dim(a, c), ma, mc)
            for j2, (b, _) in enumerate(sp.terms[i + 1]):
                if ctx.dim(a, b) and ctx.dim(b, c):
                    acc = add_blocks(F, acc, compose_blocks(ctx, a, b, c, pt.block(i, j, j2),
                                                            pt.block(i + 1, j2, j3), ma, mc))
            out.extend(x for mat in acc for r in mat for x in r)
    return tuple(out)


# chain group: per term, a dict (j, j2) -> block over Hom(E_j, E_j2), j <= j2

def term_identity(space, i):
    ctx = space.ctx
    F = ctx.field
    out = {}
    for j, (x, m) in enumerate(space.terms[i]):
        out[(j, j)] = _diag_block(ctx, x, [[F.one if a == b else F.zero for b in range(m)] for a in range(m)])
    return out


def _diag_block(ctx, x, mat):
    F = ctx.field
    return tuple(tuple(tuple(F(c * v) for v in r) for r in mat) for c in ctx.identity[x])


def _compose_term_maps(space, i_src, i_mid, i_tgt, a, b):
    """Sum-morphisms composed: a (src -> mid) then b (mid -> tgt); keys (j, j2)."""
    ctx = space.ctx
    F = ctx.field
    out = {}
    for (j, j2), blk_a in a.items():
        for (k2, j3), blk_b in b.items():
            if k2 != j2:
                continue
            x, mx = space.terms[i_src][j] if isinstance(i_src, int) else i_src[j]
            y, _ = space.terms[i_mid][j2] if isinstance(i_mid, int) else i_mid[j2]
            z, mz = space.terms[i_tgt][j3] if isinstance(i_tgt, int) else i_tgt[j3]
            if not (ctx.dim(x, y) and ctx.dim(y, z) and ctx.dim(x, z)):
                continue
            c = compose_blocks(ctx, x, y, z, blk_a, blk_b, mx, mz)
            out[(j, j3)] = add_blocks(F, out[(j, j3)], c) if (j, j3) in out else c
    return out


def term_inverse(space, i, g):
    """Inverse of a block lower-triangular term automorphism."""
    ctx = space.ctx
    F = ctx.field
    term = space.terms[i]
    dinv = {}
    for j, (x, m) in enumerate(term):
        blk = g[(j, j)]
        c = next(v for v in ctx.identity[x] if v != 0)
        hidx = next(h for h, v in enumerate(ctx.identity[x]) if v != 0)
        mat = [[F(v * F.inv(c)) for v in r] for r in blk[hidx]]
        dinv[(j, j)] = _diag_block(ctx, x, inverse_rows(mat, F))
    u = {k: v for k, v in g.items() if k[0] != k[1]}
    if not u:
        return dinv
    n_ = _compose_term_maps(space, i, i, i, dinv, u)  # D^-1 then U
    neg = {k: tuple(tuple(tuple(F(-x) for x in r) for r in mat) for mat in v) for k, v in n_.items()}
    total = dict(term_identity(space, i))
    power = dict(term_identity(space, i))
    for _ in range(len(term)):
        power = _compose_term_maps(space, i, i, i, power, neg)
        if not power:
            break
        for k, v in power.items():
            total[k] = add_blocks(F, total[k], v) if k in total else v
    return _compose_term_maps(space, i, i, i, total, dinv)


def act_chain(g: list, x: ChainPoint) -> ChainPoint:
    """f_i -> g_i^{-1} then f_i then g_{i+1}, for g a list of term automorphisms."""
    sp = x.space
    blocks = {}
    for i in range(sp.p):
        fi = {(j, j2): x.block(i, j, j2) for (ii, j, j2) in sp.arrows() if ii == i}
        step = _compose_term_maps(sp, i, i, i + 1, term_inverse(sp, i, g[i]), fi)
        step = _compose_term_maps(sp, i, i + 1, i + 1, step, g[i + 1])
        for (j, j2), blk in step.items():
            blocks[(i, j, j2)] = blk
    return ChainPoint(sp, blocks)


def unipotent_element(space: ChainSpace, coords) -> list:
    """Group element 1 + U with U given by flat coordinates over unipotent_slots()."""
    ctx = space.ctx
    F = ctx.field
    g = [term_identity(space, i) for i in range(len(space.terms))]
    it = iter(coords)
    for i, j, j2 in space.unipotent_slots():
        x, m1 = space.terms[i][j]
        y, m2 = space.terms[i][j2]
        blk = tuple(tuple(tuple(F(next(it)) for _ in range(m2)) for _ in range(m1))
                    for _ in range(ctx.dim(x, y)))
        g[i][(j, j2)] = blk
    return g


def reductive_element(space: ChainSpace, mats: dict) -> list:
    """Group element with diagonal blocks mats[(i, j)] (default identity)."""
    g = [term_identity(space, i) for i in range(len(space.terms))]
    for (i, j), mat in mats.items():
        g[i][(j, j)] = _diag_block(space.ctx, space.terms[i][j][0], mat)
    return g


def dual_chain(x: ChainPoint) -> ChainPoint:
    """The same data read in the opposite context: terms and summands reversed,
    multiplicity spaces dualized (blocks transposed)."""
    sp = x.space
    op = sp.ctx.opposite()
    nt = len(sp.terms)
    terms = tuple(tuple(reversed(sp.terms[nt - 1 - i])) for i in range(nt))
    dsp = ChainSpace(op, terms, sp.stats, sp.label + "-dual")
    blocks = {}
    for (i, j, j2), mats in x.blocks.items():
        ni = nt - 2 - i
        nj = len(sp.terms[i + 1]) - 1 - j2
        nj2 = len(sp.terms[i]) - 1 - j
        blocks[(ni, nj, nj2)] = tuple(tuple(zip(*mat)) if mat else () for mat in mats)
    fixed = {}
    for k, mats in blocks.items():
        i, j, j2 = k
        m1 = terms[i][j][1]
        m2 = terms[i + 1][j2][1]
        fixed[k] = tuple(mat if mat else tuple(() for _ in range(m1)) for mat in mats) if m2 == 0 else mats
    return ChainPoint(dsp, fixed)


def dual_space(sp: ChainSpace) -> ChainSpace:
    nt = len(sp.terms)
    return ChainSpace(sp.ctx.opposite(), tuple(tuple(reversed(sp.terms[nt - 1 - i])) for i in range(nt)),
                      sp.stats, sp.label + "-dual")


def blocks_from_forms(space: ChainSpace, entries: dict, nvars: int) -> dict:
    """entries[(i, j, j2)] = matrix (m_src x m_tgt) of form strings, read on P^(nvars-1)."""
    ctx = space.ctx
    F = ctx.field
    out = {}
    for (i, j, j2), mat in entries.items():
        x, m1 = space.terms[i][j]
        y, m2 = space.terms[i + 1][j2]
        nh = ctx.dim(x, y)
        arr = [[[F.zero] * m2 for _ in range(m1)] for _ in range(nh)]
        for a, row in enumerate(mat):
            for b, s in enumerate(row):
                terms = parse_form(s, nvars) if isinstance(s, str) else s
                terms = {k: v for k, v in terms.items() if v}
                for h, c in enumerate(form(ctx, x, y, terms)):
                    arr[h][a][b] = c
        out[(i, j, j2)] = tuple(tuple(tuple(r) for r in m) for m in arr)
    return out
