"""Finite presentations of sheaf data: Hom bases plus composition tensors.

comp[(X, Y, Z)] is a Bilinear Hom(X,Y) x Hom(Y,Z) -> Hom(X,Z) whose value on
(f, g) is the composite g o f.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field as dc_field
from math import comb

from .exactlin import (QQ, Bilinear, FieldSpec, annihilator_rows, null_space_rows,
                       rank_rows, solve_rows, vec_is_zero)


@dataclass
class CompositionContext:
    field: FieldSpec
    objects: tuple
    dims: dict  # (X, Y) -> int
    comp: dict  # (X, Y, Z) -> Bilinear, only where all three dims are positive
    identity: dict  # X -> coordinate vector of id_X
    simple: frozenset = frozenset()
    vanishing: frozenset = frozenset()
    axioms: tuple = ()
    # name -> (gamma, g, "kernel"|"cokernel", inclusion components in Hom(name, gamma))
    kernels: dict = dc_field(default_factory=dict)

    def dim(self, x, y) -> int:
        return self.dims.get((x, y), 0)

    def tensor(self, x, y, z) -> Bilinear:
        t = self.comp.get((x, y, z))
        if t is None:
            return Bilinear.zeros(self.field, self.dim(x, y), self.dim(y, z), self.dim(x, z))
        return t

    def compose(self, x, y, z, f, g) -> tuple:
        """Coordinates of g o f for f in Hom(x,y), g in Hom(y,z)."""
        if self.dim(x, z) == 0:
            return ()
        return self.tensor(x, y, z).apply(f, g)

    def basis(self, x, y, i) -> tuple:
        n = self.dim(x, y)
        return tuple(self.field.one if j == i else self.field.zero for j in range(n))

    def opposite(self) -> "CompositionContext":
        dims = {(y, x): d for (x, y), d in self.dims.items()}
        comp = {(z, y, x): t.swap() for (x, y, z), t in self.comp.items()}
        kernels = {k: (g, gam, "cokernel" if kind == "kernel" else "kernel", incl)
                   for k, (gam, g, kind, incl) in self.kernels.items()}
        return CompositionContext(self.field, self.objects, dims, comp, dict(self.identity),
                                  self.simple, frozenset((y, x) for x, y in self.vanishing),
                                  self.axioms, kernels)

    def declare_vanishing(self, pairs) -> "CompositionContext":
        return CompositionContext(self.field, self.objects, self.dims, self.comp, self.identity,
                                  self.simple, self.vanishing | frozenset(pairs), self.axioms,
                                  self.kernels)

    def to_json(self):
        F = self.field
        return {
            "field": F.label(),
            "objects": list(self.objects),
            "dims": [[x, y, d] for (x, y), d in sorted(self.dims.items())],
            "identity": {x: [F.to_json(c) for c in v] for x, v in self.identity.items()},
            "comp": [{"triple": list(k), **t.to_json()} for k, t in sorted(self.comp.items())],
            "simple": sorted(self.simple),
            "vanishing": sorted(list(p) for p in self.vanishing),
            "axioms": list(self.axioms),
            "kernels": {k: [v[0], v[1], v[2], [[F.to_json(c) for c in r] for r in v[3]]]
                        for k, v in self.kernels.items()},
        }

    @staticmethod
    def from_json(d) -> "CompositionContext":
        F = FieldSpec.parse(d["field"])
        return CompositionContext(
            F, tuple(d["objects"]),
            {(x, y): n for x, y, n in d["dims"]},
            {tuple(c["triple"]): Bilinear.from_json(F, c) for c in d["comp"]},
            {x: F.vec(F.from_json(c) for c in v) for x, v in d["identity"].items()},
            frozenset(d.get("simple", [])),
            frozenset(tuple(p) for p in d.get("vanishing", [])),
            tuple(d.get("axioms", [])),
            {k: (v[0], v[1], v[2], [list(F.vec(F.from_json(c) for c in r)) for r in v[3]])
             for k, v in d.get("kernels", {}).items()},
        )


@dataclass(frozen=True)
class ContextStats:
    a: int
    b: int | None
    h11: int | None
    h12: int | None
    a_prime: int | None

    def to_json(self):
        return {"a": self.a, "b": self.b, "h11": self.h11, "h12": self.h12, "a_prime": self.a_prime}


def morphism_stats(ctx, e1, e2, f1) -> ContextStats:
    a = ctx.dim(e1, e2)
    h11 = ctx.dim(e1, f1)
    h12 = ctx.dim(e2, f1)
    return ContextStats(a, None, h11, h12, a * h12 - h11)


def complex_stats(ctx, e1, f1, f2, h1) -> ContextStats:
    return ContextStats(ctx.dim(f1, f2), ctx.dim(e1, h1), None, None, None)


def twist_name(d: int) -> str:
    return f"O({d})"


def monomials(nvars: int, degree: int) -> list[tuple]:
    """Exponent tuples of the given degree, lexicographically descending."""
    if degree < 0:
        return []
    out = []
    for combo in itertools.combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for v in combo:
            e[v] += 1
        out.append(tuple(e))
    return sorted(out, reverse=True)


def projective_context(n: int, twists, field: FieldSpec = QQ, derived=()) -> CompositionContext:
    """Twists O(d) on P^n; Hom(O(d),O(e)) = forms of degree e-d; composition = product.

    `derived` lists (name, gamma, g) kernel objects adjoined in order.
    """
    if n < 1:
        raise ValueError("projective dimension must be at least 1")
    twists = sorted(set(twists))
    names = tuple(twist_name(d) for d in twists)
    nv = n + 1
    bases = {}
    dims = {}
    for d, e in itertools.product(twists, twists):
        mons = monomials(nv, e - d)
        bases[(d, e)] = {m: i for i, m in enumerate(mons)}
        dims[(twist_name(d), twist_name(e))] = len(mons)
        assert len(mons) == (comb(e - d + n, n) if e >= d else 0)
    comp = {}
    for d, e, f in itertools.product(twists, twists, twists):
        if not (d <= e <= f):
            continue
        b1, b2, b3 = bases[(d, e)], bases[(e, f)], bases[(d, f)]
        if not (b1 and b2 and b3):
            continue
        data = [[[field.zero] * len(b3) for _ in b2] for _ in b1]
        for m1, i in b1.items():
            for m2, j in b2.items():
                prod = tuple(x + y for x, y in zip(m1, m2))
                data[i][j][b3[prod]] = field.one
        comp[(twist_name(d), twist_name(e), twist_name(f))] = Bilinear(
            field, len(b1), len(b2), len(b3), tuple(tuple(tuple(c) for c in r) for r in data))
    identity = {twist_name(d): (field.one,) for d in twists}
    vanishing = frozenset((twist_name(d), twist_name(e)) for d in twists for e in twists if e < d)
    ctx = CompositionContext(field, names, dims, comp, identity, frozenset(names), vanishing,
                             (f"Ext^1(O(d),O(e)) = 0 on P^{n} for the twists used",))
    for name, gamma, g in derived:
        ctx = kernel_object(ctx, gamma, g, name)
    return ctx


class ContextError(ValueError):
    pass


def kernel_object(ctx: CompositionContext, gamma, g, name, serve=()) -> CompositionContext:
    """Adjoin K = ker(gamma (x) Hom(gamma, g) -> g).

    Hom(X, K) is the kernel of Hom(X,gamma) (x) V -> Hom(X,g) (always exact);
    Hom(K, Y) is the cokernel of Hom(g,Y) -> Hom(gamma,Y) (x) V*, which uses the
    declared vanishing of Ext^1(g, Y). V = Hom(gamma, g).
    """
    F = ctx.field
    if name in ctx.objects:
        raise ContextError(f"object {name} already present")
    d = ctx.dim(gamma, g)
    if d == 0:
        raise ContextError(f"Hom({gamma},{g}) is zero; the evaluation cannot be surjective")
    old = list(ctx.objects)
    for x in serve:
        mu = _mu_rows(ctx, x, gamma, g, d)
        if rank_rows(mu, ctx.dim(x, g), F) != ctx.dim(x, g):
            raise ContextError(f"evaluation Hom({x},{gamma}) x Hom({gamma},{g}) -> Hom({x},{g}) "
                               "is not surjective")

    into = {}  # X -> rows of Hom(X,K) basis inside Hom(X,gamma) (x) V
    for x in old:
        mu = _mu_rows(ctx, x, gamma, g, d)
        n = ctx.dim(x, gamma) * d
        # kernel of w -> w . mu (row convention)
        into[x] = null_space_rows(list(zip(*mu)) if mu and ctx.dim(x, g) else [], n, F) \
            if n else []
        if n and ctx.dim(x, g) == 0:
            into[x] = [tuple(F.one if i == j else F.zero for j in range(n)) for i in range(n)]

    out = {}  # Y -> (annihilator rows, pivots) describing Hom(K,Y) as a quotient
    for y in old:
        n = ctx.dim(gamma, y) * d
        rho = []
        for s in range(ctx.dim(g, y)):
            vec = [F.zero] * n
            for k in range(d):
                img = ctx.compose(gamma, g, y, ctx.basis(gamma, g, k), ctx.basis(g, y, s))
                for j, c in enumerate(img):
                    vec[j * d + k] += c
            rho.append(F.vec(vec))
        ann = annihilator_rows(rho, n, F) if n else []
        piv = [next(j for j, c in enumerate(r) if c != 0) for r in ann]
        out[y] = (ann, piv)

    b = _KernelBuilder(ctx, gamma, g, name, d, into, out)
    dims = dict(ctx.dims)
    for x in old:
        dims[(x, name)] = len(into[x])
        dims[(name, x)] = len(out[x][0])
    # Hom(K,K) from the kernel description, now that Hom(K,gamma), Hom(K,g) exist
    nk = dims[(name, gamma)] * d
    mu_k = []
    for i in range(dims[(name, gamma)]):
        for k in range(d):
            e_i = tuple(F.one if t == i else F.zero for t in range(dims[(name, gamma)]))
            mu_k.append(b.compose(name, gamma, g, e_i, ctx.basis(gamma, g, k)))
    if dims[(name, g)]:
        kk = null_space_rows(list(zip(*mu_k)), nk, F)
    else:
        kk = [tuple(F.one if i == j else F.zero for j in range(nk)) for i in range(nk)]
    into[name] = kk
    dims[(name, name)] = len(kk)
    b.dims = dims
    # identity of K: the inclusion K -> gamma (x) V, componentwise
    idv = [F.zero] * nk
    for k in range(d):
        lift = [F.zero] * (ctx.dim(gamma, gamma) * d)
        for j, c in enumerate(ctx.identity[gamma]):
            lift[j * d + k] = c
        coords = b.project(gamma, lift)
        for i, c in enumerate(coords):
            idv[i * d + k] += c
    idk = b.coords_into(name, F.vec(idv))
    if idk is None:
        raise ContextError(f"inclusion of {name} does not land in its endomorphisms")

    objects = tuple(old) + (name,)
    comp = dict(ctx.comp)
    for x, y, z in itertools.product(objects, repeat=3):
        if name not in (x, y, z):
            continue
        dxy, dyz, dxz = dims.get((x, y), 0), dims.get((y, z), 0), dims.get((x, z), 0)
        if not (dxy and dyz and dxz):
            continue
        data = []
        for i in range(dxy):
            fi = tuple(F.one if t == i else F.zero for t in range(dxy))
            row = []
            for j in range(dyz):
                gj = tuple(F.one if t == j else F.zero for t in range(dyz))
                row.append(F.vec(b.compose(x, y, z, fi, gj)))
            data.append(tuple(row))
        comp[(x, y, z)] = Bilinear(F, dxy, dyz, dxz, tuple(data))
    identity = dict(ctx.identity)
    identity[name] = idk
    simple = ctx.simple | ({name} if dims[(name, name)] == 1 else set())
    kernels = dict(ctx.kernels)
    incl = []
    for k in range(d):
        lift = [F.zero] * (ctx.dim(gamma, gamma) * d)
        for j, c in enumerate(ctx.identity[gamma]):
            lift[j * d + k] = c
        incl.append(list(b.project(gamma, lift)))
    kernels[name] = (gamma, g, "kernel", incl)
    axioms = ctx.axioms + (f"Ext^1({g}, Y) = 0 for every object Y (declared for {name})",)
    new = CompositionContext(F, objects, dims, comp, identity, frozenset(simple), ctx.vanishing,
                             axioms, kernels)
    rep = validate_context(new, only_with=name)
    if not rep.ok:
        raise ContextError(f"kernel object {name} breaks the context: {rep.violations[:3]}")
    return new


def cokernel_object(ctx: CompositionContext, e1, e2, name) -> CompositionContext:
    """Adjoin C = coker(e1 -> e2 (x) Hom(e1, e2)*) through the opposite context."""
    return kernel_object(ctx.opposite(), e2, e1, name).opposite()


def _mu_rows(ctx, x, gamma, g, d):
    """Rows: images of basis(x->gamma) (x) e_k under composition into Hom(x, g)."""
    rows = []
    for i in range(ctx.dim(x, gamma)):
        for k in range(d):
            rows.append(ctx.compose(x, gamma, g, ctx.basis(x, gamma, i), ctx.basis(gamma, g, k)))
    return rows


class _KernelBuilder:
    def __init__(self, ctx, gamma, g, name, d, into, out):
        self.ctx, self.gamma, self.g, self.name, self.d = ctx, gamma, g, name, d
        self.into, self.out = into, out
        self.dims = dict(ctx.dims)
        for x in ctx.objects:
            self.dims[(x, name)] = len(into[x])
            self.dims[(name, x)] = len(out[x][0])

    def dim(self, x, y):
        return self.dims.get((x, y), 0)

    def embed(self, x, coords):
        """Hom(x, K) coordinates -> vector in Hom(x, gamma) (x) V."""
        F = self.ctx.field
        n = self.dim(x, self.gamma) * self.d
        v = [F.zero] * n
        for c, row in zip(coords, self.into[x]):
            if c != 0:
                for j, r in enumerate(row):
                    v[j] += c * r
        return F.vec(v)

    def coords_into(self, x, vec):
        rows = self.into[x]
        if not rows:
            return () if vec_is_zero(vec) else None
        return solve_rows(list(zip(*rows)), len(rows), vec, self.ctx.field)

    def project(self, y, vec):
        """Hom(gamma, y) (x) V* vector -> Hom(K, y) coordinates."""
        F = self.ctx.field
        ann, _ = self.out[y]
        return tuple(F(sum(a * b for a, b in zip(r, vec))) for r in ann)

    def lift(self, y, coords):
        F = self.ctx.field
        ann, piv = self.out[y]
        v = [F.zero] * (self.ctx.dim(self.gamma, y) * self.d)
        for c, pc in zip(coords, piv):
            v[pc] = c
        return F.vec(v)

    def compose(self, a, b, c, f, g):
        ctx, K, gam, d, F = self.ctx, self.name, self.gamma, self.d, self.ctx.field
        if self.dim(a, c) == 0:
            return ()
        if c == K:
            gv = self.embed(b, g)
            nb = self.dim(b, gam)
            res = [F.zero] * (self.dim(a, gam) * d)
            for k in range(d):
                gk = F.vec(gv[i * d + k] for i in range(nb))
                if vec_is_zero(gk) or vec_is_zero(f):
                    continue
                r = self.compose(a, b, gam, f, gk)
                for i, x in enumerate(r):
                    res[i * d + k] += x
            out = self.coords_into(a, F.vec(res))
            if out is None:
                raise ContextError(f"composite {a}->{b}->{K} leaves the kernel")
            return out
        if a == K:
            if b == K:
                fv = self.embed(K, f)
                nk = self.dim(K, gam)
                gl = self.lift(c, g)
                nc = ctx.dim(gam, c)
                res = [F.zero] * self.dim(K, c)
                for k in range(d):
                    fk = F.vec(fv[i * d + k] for i in range(nk))
                    gk = F.vec(gl[j * d + k] for j in range(nc))
                    if vec_is_zero(fk) or vec_is_zero(gk):
                        continue
                    r = self.compose(K, gam, c, fk, gk)
                    res = [x + y for x, y in zip(res, r)]
                return F.vec(res)
            fl = self.lift(b, f)
            nb = ctx.dim(gam, b)
            vec = [F.zero] * (ctx.dim(gam, c) * d)
            for k in range(d):
                fk = F.vec(fl[j * d + k] for j in range(nb))
                if vec_is_zero(fk):
                    continue
                r = ctx.compose(gam, b, c, fk, g)
                for j, x in enumerate(r):
                    vec[j * d + k] += x
            return self.project(c, F.vec(vec))
        if b == K:
            fv = self.embed(a, f)
            na = ctx.dim(a, gam)
            gl = self.lift(c, g)
            nc = ctx.dim(gam, c)
            res = [F.zero] * ctx.dim(a, c)
            for k in range(d):
                fk = F.vec(fv[i * d + k] for i in range(na))
                gk = F.vec(gl[j * d + k] for j in range(nc))
                if vec_is_zero(fk) or vec_is_zero(gk):
                    continue
                r = ctx.compose(a, gam, c, fk, gk)
                res = [x + y for x, y in zip(res, r)]
            return F.vec(res)
        return ctx.compose(a, b, c, f, g)


@dataclass
class ValidationReport:
    ok: bool
    violations: list

    def to_json(self):
        return {"ok": self.ok, "violations": self.violations}


def validate_context(ctx: CompositionContext, only_with=None, evaluations=()) -> ValidationReport:
    """Associativity, identities, simplicity, vanishing, declared evaluation surjectivity."""
    F = ctx.field
    bad = []
    objs = ctx.objects
    for x in objs:
        if x in ctx.simple and ctx.dim(x, x) != 1:
            bad.append(f"{x} declared simple but dim Hom({x},{x}) = {ctx.dim(x, x)}")
    for x, y in ctx.vanishing:
        if ctx.dim(x, y) != 0:
            bad.append(f"Hom({x},{y}) declared zero but has dim {ctx.dim(x, y)}")
    for x, y in itertools.product(objs, repeat=2):
        n = ctx.dim(x, y)
        if n == 0 or (only_with and only_with not in (x, y)):
            continue
        for i in range(n):
            f = ctx.basis(x, y, i)
            if ctx.compose(x, x, y, ctx.identity[x], f) != f:
                bad.append(f"identity of {x} fails on Hom({x},{y})")
                break
            if ctx.compose(x, y, y, f, ctx.identity[y]) != f:
                bad.append(f"identity of {y} fails on Hom({x},{y})")
                break
    for x, y, z, w in itertools.product(objs, repeat=4):
        if only_with and only_with not in (x, y, z, w):
            continue
        if not (ctx.dim(x, y) and ctx.dim(y, z) and ctx.dim(z, w) and ctx.dim(x, w)):
            continue
        if not _associative(ctx, x, y, z, w):
            bad.append(f"associativity fails on ({x},{y},{z},{w})")
    for x, gamma, g in evaluations:
        d = ctx.dim(gamma, g)
        mu = _mu_rows(ctx, x, gamma, g, d)
        if rank_rows(mu, ctx.dim(x, g), F) != ctx.dim(x, g):
            bad.append(f"evaluation into Hom({x},{g}) through {gamma} is not surjective")
    return ValidationReport(not bad, bad)


def _associative(ctx, x, y, z, w) -> bool:
    t_xyz, t_xzw = ctx.tensor(x, y, z), ctx.tensor(x, z, w)
    t_yzw, t_xyw = ctx.tensor(y, z, w), ctx.tensor(x, y, w)
    for i in range(ctx.dim(x, y)):
        f = ctx.basis(x, y, i)
        for j in range(ctx.dim(y, z)):
            g = ctx.basis(y, z, j)
            gf = t_xyz.apply(f, g)
            for k in range(ctx.dim(z, w)):
                h = ctx.basis(z, w, k)
                if t_xzw.apply(gf, h) != t_xyw.apply(f, t_yzw.apply(g, h)):
                    return False
    return True


def form(ctx: CompositionContext, x, y, terms: dict) -> tuple:
    """Coordinates in Hom(O(d),O(e)) of a form given as {exponent tuple: coefficient}."""
    F = ctx.field
    n = ctx.dim(x, y)
    out = [F.zero] * n
    if not terms:
        return tuple(out)
    nv = len(next(iter(terms)))
    deg = sum(next(iter(terms)))
    index = {m: i for i, m in enumerate(monomials(nv, deg))}
    if len(index) != n:
        raise ContextError(f"degree {deg} forms do not match Hom({x},{y})")
    for m, c in terms.items():
        out[index[tuple(m)]] = F(out[index[tuple(m)]] + c)
    return tuple(out)


def parse_form(text: str, nvars: int) -> dict:
    """'z1^2 - 2*z1*z3' -> {exponents: coefficient}; variables z1..z_nvars."""
    text = text.replace(" ", "").replace("-", "+-")
    out = {}
    for mono in filter(None, text.split("+")):
        coef, exps = 1, [0] * nvars
        if mono.startswith("-"):
            coef, mono = -1, mono[1:]
        for fac in mono.split("*"):
            m = re.fullmatch(r"z(\d+)(?:\^(\d+))?", fac)
            if m:
                v = int(m.group(1))
                if not 1 <= v <= nvars:
                    raise ValueError(f"variable z{v} out of range in {text!r}")
                exps[v - 1] += int(m.group(2) or 1)
            else:
                try:
                    coef *= int(fac)
                except ValueError:
                    raise ValueError(f"cannot parse factor {fac!r} in {text!r}") from None
        out[tuple(exps)] = out.get(tuple(exps), 0) + coef
    return out
