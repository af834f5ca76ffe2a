"""Codimension constants c(k) = sup over K in G_k of codim(tau_k(A (x) K)) / codim(K).

tau: A (x) B -> C is a Bilinear; tau_k = tau (x) id on A (x) (B (x) F^k) -> C (x) F^k.
G_k holds the proper subspaces K of B (x) F^k not contained in B (x) V for any proper V of F^k.
Coordinates of B (x) F^k are indexed b * k + s.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .exactlin import (QQ, Bilinear, BudgetExceeded, SubspaceBasis, enumerate_subspaces, fp,
                       gaussian_binomial, inverse_rows, mat_mul, null_space_rows, rank_rows,
                       sample_subspaces)
from .sheafctx import CompositionContext, kernel_object, projective_context

EXACT_PRIMES = (101, 7, 5, 3, 2)


@dataclass
class ConstantResult:
    name: str
    k: int
    value: Fraction
    mode: str  # "exact" | "lower-bound"
    witness: SubspaceBasis | None
    p: int
    log: dict = dc_field(default_factory=dict)

    def to_json(self):
        return {"name": self.name, "k": self.k, "value": str(self.value), "mode": self.mode, "p": self.p,
                "witness": self.witness.to_json() if self.witness is not None else None, **self.log}


def _slices(tau: Bilinear):
    """T[b] as an (A x C) row list."""
    return [[tau.data[a][b] for a in range(tau.da)] for b in range(tau.db)]


def admissible(K: SubspaceBasis, db: int, k: int) -> bool:
    """K proper and not inside B (x) V for a proper V of F^k."""
    F = K.field
    if K.dim == 0 or K.dim == K.ambient_dim:
        return False
    rows = [tuple(v[b * k + s] for s in range(k)) for v in K.vectors for b in range(db)]
    return rank_rows(rows, k, F) == k


def image_dim(tau: Bilinear, K: SubspaceBasis, k: int, slices=None) -> int:
    F = K.field
    T = slices if slices is not None else _slices(tau)
    dc = tau.dc
    rows = []
    for v in K.vectors:
        for a in range(tau.da):
            out = [0] * (dc * k)
            for b in range(tau.db):
                tb = T[b][a]
                for s in range(k):
                    c = v[b * k + s]
                    if c:
                        for q in range(dc):
                            if tb[q]:
                                out[q * k + s] += c * tb[q]
            rows.append(F.vec(out))
    return rank_rows(rows, dc * k, F) if rows else 0


def ratio(tau: Bilinear, K: SubspaceBasis, k: int, slices=None) -> Fraction:
    codim_img = tau.dc * k - image_dim(tau, K, k, slices)
    return Fraction(codim_img, K.ambient_dim - K.dim)


def revalidate(tau: Bilinear, res: ConstantResult) -> bool:
    """Side condition and ratio recomputed from scratch for the stored witness."""
    if res.witness is None:
        return res.value == 0
    return admissible(res.witness, tau.db, res.k) and ratio(tau, res.witness, res.k) == res.value


def enumeration_size(ambient: int, p: int) -> int:
    return sum(gaussian_binomial(ambient, d, p) for d in range(1, ambient))


def choose_prime(ambient: int, budget: int) -> int | None:
    for p in EXACT_PRIMES:
        if (p == 101 and ambient <= 3) or (p < 101 and enumeration_size(ambient, p) <= budget):
            return p
    return None


def c_constant(tau: Bilinear, k: int, mode="auto", budget=200000, samples=400, seed=0,
               name="c") -> ConstantResult:
    """tau over a prime field.  mode: exact (all K), sample (random K, a lower bound) or auto
    (exact when the enumeration fits the budget)."""
    F = tau.field
    if not F.is_finite:
        raise ValueError("constants are computed over a prime field")
    n = tau.db * k
    size = enumeration_size(n, F.p)
    if mode == "auto":
        mode = "exact" if size <= budget else "sample"
    T = _slices(tau)
    best, wit, visited = None, None, 0
    if mode == "exact":
        if size > budget:
            raise BudgetExceeded(size, budget, "constant enumeration")
        gen = (K for d in range(1, n) for K in enumerate_subspaces(n, d, F, budget))
    elif mode == "sample":
        gen = (K for d in range(1, n) for K in sample_subspaces(n, d, F, samples, seed + d))
    else:
        raise ValueError(f"unknown mode {mode}")
    for K in gen:
        if not admissible(K, tau.db, k):
            continue
        visited += 1
        r = ratio(tau, K, k, T)
        if best is None or r > best:
            best, wit = r, K
    log = {"subspaces_visited": visited, "ambient": n, "budget": budget}
    if mode == "sample":
        log.update({"samples_per_dim": samples, "seed": seed})
    return ConstantResult(name, k, best if best is not None else Fraction(0),
                          "exact" if mode == "exact" else "lower-bound", wit, F.p, log)


# ---------------------------------------------------------------- tensors from a context

def dual_contract(ctx: CompositionContext, x, y, z) -> Bilinear:
    """Hom(x,z)* (x) Hom(x,y) -> Hom(y,z)*: (xi, u) -> (v -> xi(v o u))."""
    t = ctx.tensor(x, y, z)
    F = ctx.field
    return Bilinear.from_function(F, ctx.dim(x, z), ctx.dim(x, y), ctx.dim(y, z),
                                  lambda r, u: tuple(t.data[u][v][r] for v in range(ctx.dim(y, z))))


def composition(ctx, x, y, z) -> Bilinear:
    """Hom(y,z) (x) Hom(x,y) -> Hom(x,z)."""
    t = ctx.tensor(x, y, z)
    return Bilinear.from_function(ctx.field, ctx.dim(y, z), ctx.dim(x, y), ctx.dim(x, z),
                                  lambda v, u: t.data[u][v])


def kernel_tau(ctx, e1, h1) -> Bilinear:
    """Hom(E1,F1)* (x) Hom(E1,H1) -> Hom(F1,F2) through the inclusion components of H1."""
    f1, f2, kind, incl = ctx.kernels[h1]
    F = ctx.field
    d = ctx.dim(f1, f2)
    comps = []
    for psi in range(ctx.dim(e1, h1)):
        e = ctx.basis(e1, h1, psi)
        comps.append([ctx.compose(e1, h1, f1, e, incl[kk]) for kk in range(d)])
    return Bilinear.from_function(F, ctx.dim(e1, f1), ctx.dim(e1, h1), d,
                                  lambda r, psi: tuple(comps[psi][kk][r] for kk in range(d)))


def composite_tau(tau: Bilinear, tau_p: Bilinear) -> Bilinear:
    """tau'' = tau o (tau' (x) I): (A' (x) A) (x) B' -> C, index a' * da + a."""
    F = tau.field

    def fn(aa, b):
        ap, a = divmod(aa, tau.da)
        mid = tau_p.data[ap][b]
        out = [F.zero] * tau.dc
        for j, c in enumerate(mid):
            if c:
                for q, v in enumerate(tau.data[a][j]):
                    out[q] = F(out[q] + c * v)
        return tuple(out)
    return Bilinear.from_function(F, tau_p.da * tau.da, tau_p.db, tau.dc, fn)


def splitting_moore_penrose(C, F):
    """S with C . S = I for C of full row rank: S = C^T (C C^T)^-1, computed over Q from the
    integral lift of C (the monomial model has 0/1 entries) and reduced into F."""
    Cq = [tuple(Fraction(c) for c in r) for r in C]
    ct = [tuple(r) for r in zip(*Cq)]
    S = mat_mul(ct, inverse_rows(mat_mul(Cq, ct, QQ), QQ), QQ)
    try:
        return [F.vec(r) for r in S]
    except ValueError:
        raise ValueError(f"the pseudo-inverse has a denominator divisible by {F.p}") from None


def splitting_pivot(C, F):
    """S with C . S = I supported on pivot columns of C."""
    cols, chosen = [], []
    for j in range(len(C[0])):
        trial = cols + [tuple(C[i][j] for i in range(len(C)))]
        if rank_rows(trial, len(C), F) == len(trial):
            cols, chosen = trial, chosen + [j]
        if len(chosen) == len(C):
            break
    sq = [tuple(C[i][j] for j in chosen) for i in range(len(C))]
    inv = inverse_rows(sq, F)
    S = [[F.zero] * len(C) for _ in range(len(C[0]))]
    for t, j in enumerate(chosen):
        S[j] = list(inv[t])
    return [tuple(r) for r in S]


SPLITTINGS = {"moore-penrose": splitting_moore_penrose, "pivot": splitting_pivot}


def sigma_tau(ctx, e1, e2, f1, splitting="moore-penrose") -> Bilinear:
    """Hom(E2,F1)* (x) Hom(E1,E2)* -> Hom(E1,F1)*, a left inverse of the transposed composition."""
    F = ctx.field
    t = ctx.tensor(e1, e2, f1)
    a, h12, h11 = ctx.dim(e1, e2), ctx.dim(e2, f1), ctx.dim(e1, f1)
    # C: Hom(E1,F1)* -> Hom(E1,E2)* (x) Hom(E2,F1)*, columns indexed u * h12 + v
    C = [tuple(t.data[u][v][r] for u in range(a) for v in range(h12)) for r in range(h11)]
    split = SPLITTINGS[splitting] if isinstance(splitting, str) else splitting
    S = split(C, F)
    check = mat_mul(C, S, F)
    if any(check[i][j] != (F.one if i == j else F.zero) for i in range(h11) for j in range(h11)):
        raise ValueError("splitting is not a left inverse of the transposed composition")
    return Bilinear.from_function(F, h12, a, h11, lambda v, u: tuple(S[u * h12 + v]))


def kernel_sigma_tau(ctx, e1, e2, f1) -> Bilinear:
    """Hom(E2,F1)* (x) ker(Hom(E1,E2) (x) Hom(E2,F1) -> Hom(E1,F1)) -> Hom(E1,E2)."""
    F = ctx.field
    t = ctx.tensor(e1, e2, f1)
    a, h12 = ctx.dim(e1, e2), ctx.dim(e2, f1)
    comp_rows = [tuple(t.data[u][v]) for u in range(a) for v in range(h12)]
    ker = null_space_rows(list(zip(*comp_rows)), a * h12, F)

    def fn(v, w):
        return tuple(ker[w][u * h12 + v] for u in range(a))
    return Bilinear.from_function(F, h12, len(ker), a, fn)


def complex_tensors(ctx, e1, f1, f2, g1, h1):
    tau = dual_contract(ctx, f1, f2, g1)
    tau_p = kernel_tau(ctx, e1, h1)
    return {"c1": tau, "c2": tau_p, "c": composite_tau(tau, tau_p)}


def morphism_tensors(ctx, e1, e2, f1, splitting="moore-penrose"):
    return {"c0": dual_contract(ctx, e1, e2, f1), "c0p": sigma_tau(ctx, e1, e2, f1, splitting),
            "c1_534": composition(ctx, e1, e2, f1), "c2_534": kernel_sigma_tau(ctx, e1, e2, f1)}


def projective_tensors(n: int, p: int, splitting="moore-penrose"):
    """Both settings on P^n: complex E1=O(-2), F1=O(-1), F2=O, G1=O(1), H1 = ker(F1 (x) Hom(F1,F2) -> F2);
    morphism E1=O(-2), E2=O(-1), F1=O."""
    ctx = projective_context(n, [-2, -1, 0, 1], fp(p))
    ctx = kernel_object(ctx, "O(-1)", "O(0)", "H1")
    out = complex_tensors(ctx, "O(-2)", "O(-1)", "O(0)", "O(1)", "H1")
    out.update(morphism_tensors(ctx, "O(-2)", "O(-1)", "O(0)", splitting))
    return out


NAMES = ("c1", "c2", "c", "c0", "c0p", "c1_534", "c2_534")

PAPER_VALUES = {
    # k = 1 on P^n
    "c1": lambda n: Fraction(0),
    "c2": lambda n: Fraction(2, n + 2),
    "c": lambda n: Fraction(0),
    "c0": lambda n: Fraction(0),
    "c0p": lambda n: Fraction(n + 1, 2),
    "c1_534": lambda n: Fraction(n + 1, 2),
    "c2_534": lambda n: Fraction(2 * n, n * n + n - 2),
}


def _b_dim(n: int, name: str) -> int:
    # dim Hom(O(-2),O(-1)) = dim Hom(O(-1),O) = dim Hom(O(-2),H1) = dim ker sigma... all equal n+1
    # except the kernel of composition, of dimension n(n+1)/2
    return n * (n + 1) // 2 if name == "c2_534" else n + 1


def named_constants(n=2, k=1, which=NAMES, mode="auto", p=None, budget=200000, samples=400, seed=0,
                    splitting="moore-penrose") -> dict:
    """Constants on P^n.  The prime defaults to 101 when B (x) F^k has dimension <= 3 and to the
    largest small prime whose enumeration fits the budget otherwise."""
    cache = {}
    out = {}
    for name in which:
        if name not in NAMES:
            raise KeyError(f"unknown constant {name}")
        q = p
        if q is None:
            q = choose_prime(_b_dim(n, name) * k, budget) or 101
        if q not in cache:
            cache[q] = projective_tensors(n, q, splitting)
        out[name] = c_constant(cache[q][name], k, mode, budget, samples, seed, name)
    return out


def paper_constants(n: int) -> dict:
    return {name: f(n) for name, f in PAPER_VALUES.items()}


def constant_relations_check(results: dict) -> list[dict]:
    """results[k][name] -> ConstantResult.  Checks c(k) <= c1(k) c2(k) and monotonicity in k
    for c1, c2, c0p.  Lower-bound inputs can only be 'not falsified'."""
    out = []
    for k, rk in sorted(results.items()):
        if all(nm in rk for nm in ("c", "c1", "c2")):
            exact = all(rk[nm].mode == "exact" for nm in ("c", "c1", "c2"))
            ok = rk["c"].value <= rk["c1"].value * rk["c2"].value
            out.append({"relation": f"c({k}) <= c1({k}) c2({k})", "ok": ok,
                        "status": ("proved" if exact else "not falsified") if ok else "violated",
                        "values": [str(rk[nm].value) for nm in ("c", "c1", "c2")]})
    ks = sorted(results)
    for k0, k1 in zip(ks, ks[1:]):
        for nm in ("c1", "c2", "c0p"):
            if nm in results[k0] and nm in results[k1]:
                a, b = results[k0][nm], results[k1][nm]
                ok = b.value >= a.value
                exact = a.mode == b.mode == "exact"
                out.append({"relation": f"{nm}({k1}) >= {nm}({k0})", "ok": ok,
                            "status": ("proved" if exact else "not falsified") if ok else "violated",
                            "values": [str(a.value), str(b.value)], "primes": [a.p, b.p]})
    return out
