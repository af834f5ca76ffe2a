"""Constructive mutations between type-1 and type-2 data, on spaces, points and chains.

N is ordered H + M throughout: the first dim H columns of psi1/psi2/psi3 carry H.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .complexspace import (Bilinear, ChainPoint, ChainSpace, SpaceError, Type1Point, Type1Space,
                           Type2Point, Type2Space, act1, act2, build_chain, build_type1, build_type2,
                           dual_chain, enumerate_group1, enumerate_group2, is_point, _m)
from .exactlin import (BudgetExceeded, _rref_rows, inverse_rows, mat_mul, null_space_rows, rank_rows,
                       solve_rows)
from .sheafctx import kernel_object


@dataclass
class MutationCertificate:
    direction: str
    source: dict
    image: dict
    choices: dict
    residuals: dict
    orbit_evidence: dict = dc_field(default_factory=dict)

    def ok(self) -> bool:
        return all(all(Fraction(str(c)) == 0 for c in v) for v in self.residuals.values())

    def to_json(self):
        return {"direction": self.direction, "source": self.source, "image": self.image,
                "choices": self.choices, "residuals": self.residuals,
                "orbit_evidence": self.orbit_evidence}


def _ext_rref(rows, ncols, F):
    """(R, T) with T invertible and T . rows = rref(rows); rows must have full row rank."""
    n = len(rows)
    aug = [list(r) + [F.one if i == j else F.zero for j in range(n)] for i, r in enumerate(rows)]
    R, piv = _rref_rows(aug, ncols + n, F)
    if len(R) != n or any(p >= ncols for p in piv):
        raise ValueError("rows are not independent")
    return [tuple(r[:ncols]) for r in R], [tuple(r[ncols:]) for r in R]


def _pivots(rows):
    return [next(j for j, c in enumerate(r) if c != 0) for r in rows]


# ---------------------------------------------------------------- D0 on spaces

def mutate_space_1to2(th: Type1Space) -> Type2Space:
    F = th.field
    z1, z2, z3, h, t, m = th.z1, th.z2, th.z3, th.h, th.t, th.m
    st = list(zip(*th.sigma.matrix())) if z2 else []
    kb = null_space_rows(st, z1 * h, F)
    k = len(kb)
    nu = Bilinear.from_function(F, k, h, z1, lambda kk, y: [kb[kk][i * h + y] for i in range(z1)])
    qt = null_space_rows(th.z4_embedding(), h * z3, F)
    t2 = len(qt)
    lam = Bilinear.from_function(F, h, z3, t2, lambda y, c: [qt[r][y * z3 + c] for r in range(t2)])
    piv = _pivots(qt)

    def nup(kk, r):
        j, c = divmod(piv[r], z3)
        out = [F.zero] * t
        for i in range(z1):
            coef = kb[kk][i * h + j]
            if coef != 0:
                for s, v in enumerate(th.tau.data[i][c]):
                    out[s] += coef * v
        return out
    nu_p = Bilinear.from_function(F, k, t2, t, nup)
    return build_type2(F, (z1, h, t2, z3, t, k, h + m), nu, nu_p, lam, th.tau)


def mutate_space_2to1(tp: Type2Space) -> Type1Space:
    F = tp.field
    if tp.n < tp.y2:
        raise SpaceError([f"dim N = {tp.n} is smaller than dim Y2 = {tp.y2}"])
    z1, y2, t2, z3, t, n = tp.z1, tp.y2, tp.t2, tp.z3, tp.t, tp.n
    st = null_space_rows(tp.k_embedding(), z1 * y2, F)
    z2 = len(st)
    sigma = Bilinear.from_function(F, z1, y2, z2, lambda i, j: [st[r][i * y2 + j] for r in range(z2)])
    lt = list(zip(*tp.lam.matrix())) if t2 else []
    z4b = null_space_rows(lt, y2 * z3, F)
    z4 = len(z4b)
    sigma_p = Bilinear.from_function(F, y2, z4, z3, lambda j, l: [z4b[l][j * z3 + c] for c in range(z3)])
    piv = _pivots(st)

    def taup(r, l):
        i, j = divmod(piv[r], y2)
        out = [F.zero] * t
        for c in range(z3):
            coef = z4b[l][j * z3 + c]
            if coef != 0:
                for s, v in enumerate(tp.tau.data[i][c]):
                    out[s] += coef * v
        return out
    tau_p = Bilinear.from_function(F, z2, z4, t, taup)
    return build_type1(F, (z1, z2, z3, z4, y2, t, n - y2), sigma, sigma_p, tp.tau, tau_p)


@dataclass
class Normalization1:
    r_sigma: list  # z2_new = r_sigma . z2 (column convention)
    rz_inv: list  # z4_new = z4 . rz_inv (row convention)

    def apply(self, space_new, x: Type1Point) -> Type1Point:
        F = space_new.field
        z2 = tuple(F(sum(a * b for a, b in zip(row, x.z2))) for row in self.r_sigma)
        z4 = tuple(mat_mul([x.z4], self.rz_inv, F)[0]) if x.z4 else ()
        return Type1Point(x.phi1, z2, x.phi3, z4)


def normalize_type1(th: Type1Space):
    """Change bases of Z2 and Z4 so that sigma and the Z4 embedding are in canonical echelon form."""
    F = th.field
    z1, z2, z3, z4, h, t, m = th.z1, th.z2, th.z3, th.z4, th.h, th.t, th.m
    st = [tuple(r) for r in zip(*th.sigma.matrix())] if z2 else []
    st_new, rs = _ext_rref(st, z1 * h, F) if z2 else ([], [])
    emb = th.z4_embedding()
    emb_new, rz = _ext_rref(emb, h * z3, F) if z4 else ([], [])
    rs_inv = inverse_rows(rs, F) if z2 else []
    sigma = Bilinear.from_function(F, z1, h, z2, lambda i, j: [st_new[r][i * h + j] for r in range(z2)])
    sigma_p = Bilinear.from_function(F, h, z4, z3, lambda j, l: [emb_new[l][j * z3 + c] for c in range(z3)])

    def taup(r2, l2):
        out = [F.zero] * t
        for r in range(z2):
            a = rs_inv[r][r2]
            if a == 0:
                continue
            for l in range(z4):
                b = rz[l2][l]
                if b == 0:
                    continue
                for s, v in enumerate(th.tau_p.data[r][l]):
                    out[s] += a * b * v
        return out
    tau_p = Bilinear.from_function(F, z2, z4, t, taup)
    new = build_type1(F, (z1, z2, z3, z4, h, t, m), sigma, sigma_p, th.tau, tau_p)
    return new, Normalization1(rs, inverse_rows(rz, F) if z4 else [])


def normalize_type2(tp: Type2Space) -> Type2Space:
    F = tp.field
    z1, y2, t2, z3, t, k, n = tp.z1, tp.y2, tp.t2, tp.z3, tp.t, tp.k, tp.n
    kemb = tp.k_embedding()
    kemb_new, rk = _ext_rref(kemb, z1 * y2, F) if k else ([], [])
    lt = [tuple(r) for r in zip(*tp.lam.matrix())] if t2 else []
    lt_new, rl = _ext_rref(lt, y2 * z3, F) if t2 else ([], [])
    rl_inv = inverse_rows(rl, F) if t2 else []
    nu = Bilinear.from_function(F, k, y2, z1, lambda kk, y: [kemb_new[kk][i * y2 + y] for i in range(z1)])
    lam = Bilinear.from_function(F, y2, z3, t2, lambda y, c: [lt_new[r][y * z3 + c] for r in range(t2)])

    def nup(k2, r2):
        out = [F.zero] * t
        for kk in range(k):
            a = rk[k2][kk]
            if a == 0:
                continue
            for r in range(t2):
                b = rl_inv[r][r2]
                if b == 0:
                    continue
                for s, v in enumerate(tp.nu_p.data[kk][r]):
                    out[s] += a * b * v
        return out
    nu_p = Bilinear.from_function(F, k, t2, t, nup)
    return build_type2(F, (z1, y2, t2, z3, t, k, n), nu, nu_p, lam, tp.tau)


def spaces_equal(a, b) -> bool:
    return a == b


# ---------------------------------------------------------------- D0 / D'0 on points

def section(th: Type1Space, z2) -> tuple:
    """psi0 in Z1 (x) H with sigma(psi0) = z2, free variables zeroed."""
    F = th.field
    st = list(zip(*th.sigma.matrix())) if th.z2 else []
    sol = solve_rows(st, th.z1 * th.h, z2, F) if th.z2 else tuple(F.zero for _ in range(th.z1 * th.h))
    if sol is None:
        raise SpaceError(["sigma is not surjective; no section"])
    return sol


def mutate_point_1to2(th: Type1Space, x: Type1Point, psi0=None, space2=None):
    F = th.field
    ok, res = is_point(th, x)
    if not ok:
        raise SpaceError([f"not a point of the type-1 space; residual {res}"])
    tp = space2 or mutate_space_1to2(th)
    h, m, z1, z3 = th.h, th.m, th.z1, th.z3
    if psi0 is None:
        psi0 = section(th, x.z2)
        policy = "zero free variables"
    else:
        psi0 = F.vec(psi0)
        if th.sigma.apply_tensor(psi0) != x.z2:
            raise SpaceError(["supplied section does not map to z2"])
        policy = "caller supplied"
    psi1 = [tuple(psi0[i * h:(i + 1) * h]) + x.phi1.entries[i] for i in range(z1)]
    psi2 = [tuple(F.one if a == j else F.zero for a in range(h + m)) for j in range(h)]
    cov = th.covector(x.z4)
    psi3 = [cov.entries[c] + x.phi3.entries[c] for c in range(z3)]
    y = Type2Point(_m(F, psi1, h + m), _m(F, psi2, h + m), _m(F, psi3, h + m))
    ok2, res2 = is_point(tp, y)
    cert = MutationCertificate(
        "1to2", x.to_json(), y.to_json(),
        {"section": [F.to_json(c) for c in psi0], "policy": policy, "order": "N = H + M"},
        {"source": [F.to_json(c) for c in res], "image_tau": [F.to_json(c) for c in res2[0]],
         "image_lambda": [F.to_json(c) for c in res2[1]]})
    if not ok2:
        raise SpaceError(["mutated point violates the type-2 equations"])
    return y, cert


def in_Q0(tp: Type2Space, y: Type2Point) -> bool:
    return rank_rows(y.psi2.entries, tp.n, tp.field) == tp.y2


def complement_columns(tp: Type2Space, y: Type2Point) -> list[int]:
    piv = set(_rref_rows(y.psi2.entries, tp.n, tp.field)[1])
    return [a for a in range(tp.n) if a not in piv]


def mutate_point_2to1(tp: Type2Space, y: Type2Point, space1=None):
    F = tp.field
    ok, res = is_point(tp, y)
    if not ok:
        raise SpaceError([f"not a point of the type-2 space; residual {res}"])
    if not in_Q0(tp, y):
        raise SpaceError(["not in Q'0: psi2 is not injective"])
    th = space1 or mutate_space_2to1(tp)
    n, y2, z1, z3 = tp.n, tp.y2, tp.z1, tp.z3
    comp = complement_columns(tp, y)
    basis = [tuple(r) for r in y.psi2.entries] + [tuple(F.one if a == c else F.zero for a in range(n))
                                                   for c in comp]
    binv = inverse_rows(basis, F)
    coords = mat_mul(y.psi1.entries, binv, F) if z1 else []
    c_h = [r[:y2] for r in coords]
    c_m = [r[y2:] for r in coords]
    z2 = th.sigma.apply_tensor(tuple(c for r in c_h for c in r))
    phi3 = [tuple(r[c] for c in comp) for r in y.psi3.entries]
    pair = mat_mul(y.psi2.entries, [tuple(r) for r in zip(*y.psi3.entries)], F) if y2 and z3 else []
    flat = tuple(c for r in pair for c in r)
    z4b = [tuple(th.sigma_p.data[j][l][c] for j in range(y2) for c in range(z3)) for l in range(th.z4)]
    if th.z4:
        z4 = solve_rows(list(zip(*z4b)), th.z4, flat, F)
        if z4 is None:
            raise SpaceError(["<psi2, psi3> does not lie in ker(lambda)"])
    else:
        z4 = ()
    x = Type1Point(_m(F, c_m, th.m), z2, _m(F, phi3, th.m), z4)
    ok1, res1 = is_point(th, x)
    cert = MutationCertificate(
        "2to1", y.to_json(), x.to_json(),
        {"complement_columns": comp, "policy": "pivot complement of image(psi2)"},
        {"image": [F.to_json(c) for c in res1]})
    if not ok1:
        raise SpaceError(["recovered point violates the type-1 equation"])
    return x, cert


# ---------------------------------------------------------------- orbit equality

def orbit_equal(space, x, y, mode="exhaustive", budget=10**7):
    """True/False, or None ("unknown") in solve mode."""
    if x.key() == y.key():
        return True
    if mode == "exhaustive":
        return _orbit_exhaustive(space, x, y, budget)
    if mode != "solve":
        raise ValueError(f"unknown mode {mode}")
    if isinstance(space, Type1Space):
        r = _solve_unipotent1(space, x, y)
        if r:
            return True
    if space.field.is_finite:
        try:
            return _orbit_exhaustive(space, x, y, budget)
        except BudgetExceeded:
            return None
    return None


def _orbit_exhaustive(space, x, y, budget):
    if not space.field.is_finite:
        raise ValueError("exhaustive orbit search needs a prime field")
    target = y.key()
    if isinstance(space, Type1Space):
        for g in enumerate_group1(space, budget):
            if act1(space, g, x).key() == target:
                return True
        return False
    for g in enumerate_group2(space, budget):
        if act2(space, g, x).key() == target:
            return True
    return False


def _solve_unipotent1(space, x, y) -> bool:
    """Is y = (unipotent phi) . x for some phi? Linear in phi."""
    F = space.field
    if x.phi1.entries != y.phi1.entries or x.z4 != y.z4:
        return False
    m, h = space.m, space.h
    nun = m * h
    eqs, rhs = [], []
    # z2 equation: sigma(phi1 . phi) = y.z2 - x.z2
    for r in range(space.z2):
        row = [F.zero] * nun
        for a, j in itertools.product(range(m), range(h)):
            row[a * h + j] = F(sum(x.phi1.entries[i][a] * space.sigma.data[i][j][r] for i in range(space.z1)))
        eqs.append(tuple(row))
        rhs.append(F(y.z2[r] - x.z2[r]))
    wg = space.covector(x.z4)
    # phi3 equation: y.phi3 = x.phi3 - wg . phi^T
    for c, a in itertools.product(range(space.z3), range(m)):
        row = [F.zero] * nun
        for j in range(h):
            row[a * h + j] = F(-wg.entries[c][j])
        eqs.append(tuple(row))
        rhs.append(F(y.phi3.entries[c][a] - x.phi3.entries[c][a]))
    return solve_rows(eqs, nun, rhs, F) is not None


# ---------------------------------------------------------------- chains

@dataclass
class Junction:
    """Dictionary data for term i0 of a chain: E -> (Gamma (x) M) + (G0 (x) MG) -> F."""
    i0: int
    e: tuple | None  # (E0, L)
    gamma: tuple  # (Gamma, M)
    g: tuple  # (G0, MG)
    f: tuple | None  # (F0, MF)


def junction(space: ChainSpace, i0: int) -> Junction:
    terms = space.terms
    if len(terms[i0]) != 2:
        raise SpaceError([f"term {i0} must have exactly two summands (Gamma first)"])
    if i0 > 1:
        raise SpaceError(["left mutation is implemented when term i0-1 is the first term"])
    e = terms[i0 - 1] if i0 >= 1 else ()
    f = terms[i0 + 1] if i0 + 1 < len(terms) else ()
    if len(e) > 1 or len(f) > 1:
        raise SpaceError(["flanking terms must have at most one summand"])
    return Junction(i0, e[0] if e else None, terms[i0][0], terms[i0][1], f[0] if f else None)


def junction_type1(x: ChainPoint, i0: int):
    """The type-1 space and point read off the chain at term i0."""
    sp = x.space
    ctx = sp.ctx
    F = ctx.field
    jn = junction(sp, i0)
    gam, mm = jn.gamma
    g0, mg = jn.g
    e0, ll = jn.e if jn.e else (None, 0)
    f0, mf = jn.f if jn.f else (None, 0)
    d = lambda a, b: ctx.dim(a, b) if a is not None and b is not None else 0
    n_eg, n_gg, n_ee = d(e0, gam), d(gam, g0), d(e0, g0)
    n_gf, n_qf, n_ef = d(gam, f0), d(g0, f0), d(e0, f0)
    z1, z2 = n_eg * ll, n_ee * ll * mg
    h = n_gg * mg
    z3, z4 = n_gf * mf, n_qf * mg * mf
    t = n_ef * ll * mf
    zero = lambda n: [F.zero] * n

    def sig(a, b):
        hh, l = divmod(a, ll)
        e, gi = divmod(b, mg)
        out = zero(z2)
        if n_ee:
            for h2, c in enumerate(ctx.tensor(e0, gam, g0).data[hh][e]):
                out[(h2 * ll + l) * mg + gi] = c
        return out

    def sigp(b, w):
        e, gi = divmod(b, mg)
        q, rest = divmod(w, mg * mf)
        g2, fi = divmod(rest, mf)
        out = zero(z3)
        if gi == g2 and n_gf:
            for k, c in enumerate(ctx.tensor(gam, g0, f0).data[e][q]):
                out[k * mf + fi] = c
        return out

    def ta(a, b):
        hh, l = divmod(a, ll)
        k, fi = divmod(b, mf)
        out = zero(t)
        if n_ef:
            for tt, c in enumerate(ctx.tensor(e0, gam, f0).data[hh][k]):
                out[(tt * ll + l) * mf + fi] = c
        return out

    def tap(a, w):
        h2, rest = divmod(a, ll * mg)
        l, gi = divmod(rest, mg)
        q, rest2 = divmod(w, mg * mf)
        g2, fi = divmod(rest2, mf)
        out = zero(t)
        if gi == g2 and n_ef:
            for tt, c in enumerate(ctx.tensor(e0, g0, f0).data[h2][q]):
                out[(tt * ll + l) * mf + fi] = c
        return out

    th = build_type1(F, (z1, z2, z3, z4, h, t, mm),
                     Bilinear.from_function(F, z1, h, z2, sig),
                     Bilinear.from_function(F, h, z4, z3, sigp),
                     Bilinear.from_function(F, z1, z3, t, ta),
                     Bilinear.from_function(F, z2, z4, t, tap))
    phi1 = [[F.zero] * mm for _ in range(z1)]
    zz2 = [F.zero] * z2
    phi3 = [[F.zero] * mm for _ in range(z3)]
    zz4 = [F.zero] * z4
    if jn.e:
        b = x.block(i0 - 1, 0, 0)
        for hh, l, a in itertools.product(range(n_eg), range(ll), range(mm)):
            phi1[hh * ll + l][a] = b[hh][l][a]
        if n_ee:
            b = x.block(i0 - 1, 0, 1)
            for h2, l, gi in itertools.product(range(n_ee), range(ll), range(mg)):
                zz2[(h2 * ll + l) * mg + gi] = b[h2][l][gi]
    if jn.f:
        b = x.block(i0, 0, 0)
        for k, a, fi in itertools.product(range(n_gf), range(mm), range(mf)):
            phi3[k * mf + fi][a] = b[k][a][fi]
        if n_qf:
            b = x.block(i0, 1, 0)
            for q, gi, fi in itertools.product(range(n_qf), range(mg), range(mf)):
                zz4[(q * mg + gi) * mf + fi] = b[q][gi][fi]
    pt = Type1Point(_m(F, phi1, mm), F.vec(zz2), _m(F, phi3, mm), F.vec(zz4))
    return th, pt, jn


def find_kernel(ctx, gamma, g):
    for name, (gam, gg, kind, _) in ctx.kernels.items():
        if kind == "kernel" and gam == gamma and gg == g:
            return name
    return None


def mutate_chain_left(x: ChainPoint, i0: int, kernel_name=None, psi0=None):
    """Replace E -> (Gamma M) + (G0 MG) -> F by E + (K MG) -> Gamma N -> F with N = H + M."""
    sp = x.space
    th, pt, jn = junction_type1(x, i0)
    tp = mutate_space_1to2(th)
    y, cert = mutate_point_1to2(th, pt, psi0=psi0, space2=tp)
    ctx = sp.ctx
    gam, mm = jn.gamma
    g0, mg = jn.g
    kname = find_kernel(ctx, gam, g0)
    if kname is None:
        kname = kernel_name or f"ker({gam}->{g0})"
        ctx = kernel_object(ctx, gam, g0, kname)
    incl = ctx.kernels[kname][3]
    F = ctx.field
    n = tp.n
    d = ctx.dim(gam, g0)
    new_prev = ((jn.e,) if jn.e else ()) + ((kname, mg),)
    terms = list(sp.terms)
    if i0 >= 1:
        terms[i0 - 1] = new_prev
        terms[i0] = ((gam, n),)
        src = i0 - 1
    else:
        terms = [new_prev and ((kname, mg),)] + [((gam, n),)] + terms[1:]
        src = 0
        i0 = 1
    nsp = ChainSpace(ctx, tuple(terms), None, sp.label + "+L")
    blocks = {}
    shift = 0 if jn.i0 >= 1 else 1
    for (i, j, j2), mats in x.blocks.items():
        if i < jn.i0 - 1 or i > jn.i0:
            blocks[(i + shift, j, j2)] = mats
    e_idx = 0
    if jn.e:
        e0, ll = jn.e
        nh = ctx.dim(e0, gam)
        blocks[(src, 0, 0)] = tuple(tuple(tuple(y.psi1.entries[hh * ll + l]) for l in range(ll))
                                    for hh in range(nh))
        e_idx = 1
    nk = ctx.dim(kname, gam)
    kb = []
    for e2 in range(nk):
        mat = []
        for gi in range(mg):
            row = [F.zero] * n
            for k in range(d):
                c = incl[k][e2]
                if c != 0:
                    for a in range(n):
                        row[a] += c * y.psi2.entries[k * mg + gi][a]
            mat.append(F.vec(row))
        kb.append(tuple(mat))
    blocks[(src, e_idx, 0)] = tuple(kb)
    if jn.f:
        f0, mf = jn.f
        nf = ctx.dim(gam, f0)
        blocks[(src + 1, 0, 0)] = tuple(tuple(tuple(y.psi3.entries[k * mf + fi][a] for fi in range(mf))
                                              for a in range(n)) for k in range(nf))
    out = build_chain(nsp, blocks)
    return out, cert


def mutate_chain_right(x: ChainPoint, i0: int, kernel_name=None):
    """Left mutation of the dual chain at the mirrored position, read back."""
    nt = len(x.space.terms)
    d = dual_chain(x)
    md, cert = mutate_chain_left(d, nt - 1 - i0, kernel_name)
    back = dual_chain(md)
    back = ChainPoint(ChainSpace(back.space.ctx, back.space.terms, None, x.space.label + "+R"),
                      back.blocks)
    return build_chain(back.space, back.blocks), cert


def hom_homology(x: ChainPoint, obj) -> list[int]:
    """Homology dimensions of Hom(obj, chain) (postcomposition)."""
    sp = x.space
    ctx = sp.ctx
    F = ctx.field
    sizes = []
    labels = []
    for term in sp.terms:
        lab = [(j, h, a) for j, (e, m) in enumerate(term) for h in range(ctx.dim(obj, e)) for a in range(m)]
        labels.append(lab)
        sizes.append(len(lab))
    maps = []
    for i in range(sp.p):
        rows = []
        for (j, h, a) in labels[i]:
            e, _ = sp.terms[i][j]
            img = {}
            for j2, (e2, m2) in enumerate(sp.terms[i + 1]):
                if not ctx.dim(e, e2):
                    continue
                blk = x.block(i, j, j2)
                for hh, mat in enumerate(blk):
                    comp = ctx.compose(obj, e, e2, ctx.basis(obj, e, h), ctx.basis(e, e2, hh))
                    for q, c in enumerate(comp):
                        if c == 0:
                            continue
                        for b, v in enumerate(mat[a]):
                            if v != 0:
                                img[(j2, q, b)] = img.get((j2, q, b), F.zero) + c * v
            rows.append(F.vec(img.get(lab, F.zero) for lab in labels[i + 1]))
        maps.append(rows)
    ranks = [rank_rows(mp, sizes[i + 1], F) if mp else 0 for i, mp in enumerate(maps)]
    out = []
    for i in range(len(sizes)):
        r_out = ranks[i] if i < len(ranks) else 0
        r_in = ranks[i - 1] if i >= 1 else 0
        out.append(sizes[i] - r_out - r_in)
    return out


def evaluation_surjective(ctx, x, gamma, g) -> bool:
    """Is Hom(x, gamma) (x) Hom(gamma, g) -> Hom(x, g) onto? Then Hom(x, -) is exact on the kernel."""
    F = ctx.field
    n = ctx.dim(x, g)
    if n == 0:
        return True
    rows = []
    for i in range(ctx.dim(x, gamma)):
        for k in range(ctx.dim(gamma, g)):
            rows.append(ctx.compose(x, gamma, g, ctx.basis(x, gamma, i), ctx.basis(gamma, g, k)))
    return rank_rows(rows, n, F) == n


def homology_profile_check(x: ChainPoint, y: ChainPoint, gamma, g, objects=None) -> dict:
    """Compare Hom(X, -) homology of a chain and its mutation for test objects X on which
    Hom(X, -) stays exact on the new kernel; a new end term must carry zero homology."""
    ctx = x.space.ctx
    objs = objects if objects is not None else [o for o in ctx.objects if o in y.space.ctx.objects]
    out = {}
    for o in objs:
        if not evaluation_surjective(ctx, o, gamma, g):
            continue
        a, b = hom_homology(x, o), hom_homology(y, o)
        if len(b) == len(a) + 1:
            ok = (b[0] == 0 and b[1:] == a) or (b[-1] == 0 and b[:-1] == a)
        else:
            ok = a == b
        out[o] = {"source": a, "mutated": b, "ok": ok}
    return out
