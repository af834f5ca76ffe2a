"""King-style (semi-)stability of chain points, for the reductive group and for the full group.

A subspace tuple assigns a subspace S_f of the multiplicity space M_f to every factor f = (i, j).
It is invariant for a point when every Hom-coefficient matrix A of every block (f -> g) maps
S_f into S_g (row convention v -> v . A).  Weights are signed: the King sum is
sum_f w_f dim S_f, and the point is semi-stable when the sum is <= 0 on every invariant tuple
other than the zero tuple and the full tuple (stable: < 0).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .complexspace import (ChainPoint, ChainSpace, _compose_term_maps, _diag_block, act_chain,
                           unipotent_element)
from .exactlin import (BudgetExceeded, FieldSpec, SubspaceBasis, enumerate_all_subspaces,
                       enumerate_superspaces, null_space_rows, rank_rows, solve_rows, vec_is_zero)

STABLE = "stable"
STRICTLY_SEMISTABLE = "strictly-semi-stable"
UNSTABLE = "unstable"
_RANK = {STABLE: 0, STRICTLY_SEMISTABLE: 1, UNSTABLE: 2}


# ---------------------------------------------------------------- polarizations

@dataclass(frozen=True)
class Polarization:
    """Signed weights aligned with ChainSpace.factors()."""
    weights: tuple
    labels: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(Fraction(w) for w in self.weights))

    def total(self, dims) -> Fraction:
        return sum((w * d for w, d in zip(self.weights, dims)), Fraction(0))

    def value(self, tup_dims) -> Fraction:
        return self.total(tup_dims)

    def scaled(self, c) -> "Polarization":
        return Polarization(tuple(w * Fraction(c) for w in self.weights), self.labels)

    def check(self, space: ChainSpace, nonzero=True) -> list[str]:
        bad = []
        facs = space.factors()
        if len(self.weights) != len(facs):
            bad.append(f"{len(self.weights)} weights for {len(facs)} factors")
            return bad
        s = self.total([space.mult(f) for f in facs])
        if s != 0:
            bad.append(f"weights do not sum to zero against the multiplicities (sum {s})")
        if nonzero and any(w == 0 for w in self.weights):
            bad.append("a weight is zero")
        return bad

    def to_json(self):
        return {"weights": [str(w) for w in self.weights], "labels": list(self.labels)}

    @staticmethod
    def from_json(d) -> "Polarization":
        return Polarization(tuple(Fraction(w) for w in d["weights"]), tuple(d.get("labels", ())))


def complex_polarization(lam1, mu1, mu2, nu1) -> Polarization:
    """E1 (x) L1 -> (F1 (x) M1) + (F2 (x) M2) -> G1 (x) N1 with weights on L1, M1, M2, N1."""
    return Polarization((lam1, mu1, mu2, nu1), ("lambda1", "mu1", "mu2", "nu1"))


def morphism_polarization(lam1, lam2, mu1) -> Polarization:
    """(E1 (x) M1) + (E2 (x) M2) -> F1 (x) N1; the target weight enters with a minus sign."""
    return Polarization((lam1, lam2, -Fraction(mu1)), ("lambda1", "lambda2", "-mu1"))


def normalize_polarization(pol, m1, m2, n1):
    """(lam1, lam2, mu1) scaled so that lam1 m1 + lam2 m2 = 1; mu1 becomes 1/n1."""
    lam1, lam2 = Fraction(pol[0]), Fraction(pol[1])
    if lam1 <= 0 or lam2 <= 0 or (len(pol) > 2 and pol[2] is not None and Fraction(pol[2]) <= 0):
        raise ValueError("normalization needs lambda1, lambda2, mu1 > 0")
    s = 1 / (lam1 * m1 + lam2 * m2)
    return (lam1 * s, lam2 * s, Fraction(1, n1))


def polarization_from_rho(rho, m1, m2, n1):
    """The normalized (lam1, lam2, 1/n1) with lam2 / lam1 = rho."""
    rho = Fraction(rho)
    lam1 = 1 / (m1 + rho * m2)
    return (lam1, rho * lam1, Fraction(1, n1))


@dataclass
class TransformedPolarization:
    values: tuple
    flags: list = dc_field(default_factory=list)


def pol_first_mutation(pol, a) -> TransformedPolarization:
    lam1, mu1, mu2, nu1 = (Fraction(x) for x in pol)
    out = (lam1, mu2 - a * mu1, mu1, nu1)
    flags = [] if out[1] > 0 else ["alpha2 <= 0: stable points need mu2 > a mu1"]
    return TransformedPolarization(out, flags)


def pol_second_mutation(pol, a, b) -> TransformedPolarization:
    lam1, mu1, mu2, nu1 = (Fraction(x) for x in pol)
    out = (mu2 - a * mu1 - b * lam1, lam1, mu1, nu1)
    flags = [] if out[0] > 0 else ["delta <= 0: stable points need mu2 > a mu1 + b lam1"]
    return TransformedPolarization(out, flags)


def pol_direct_morphism(pol, a) -> TransformedPolarization:
    lam1, lam2, mu1 = (Fraction(x) for x in pol)
    out = (lam2 - a * lam1, lam1, -mu1)
    flags = [] if out[0] > 0 else ["alpha <= 0: the direct construction needs lam2 / lam1 > a"]
    return TransformedPolarization(out, flags)


def pol_indirect_morphism(pol, a, m1, m2, n1) -> TransformedPolarization:
    """(1/dim Q1, nu2, nu1) for the indirect mutation; dim Q1 = a m1 + m2."""
    lam1, lam2 = Fraction(pol[0]), Fraction(pol[1])
    q1 = a * m1 + m2
    if lam2 == 0 or q1 == 0:
        raise ZeroDivisionError("indirect mutation needs lam2 != 0 and dim Q1 > 0")
    nu1 = Fraction(1, 1) / (q1 * n1 * lam2)
    nu2 = (a * lam2 - lam1) / (q1 * lam2)
    flags = []
    if nu2 == 0:
        flags.append("degenerate: a lam2 = lam1 gives nu2 = 0")
    if a * lam2 - lam1 <= 0:
        flags.append("a lam2 - lam1 <= 0: no stable points after the indirect mutation")
    return TransformedPolarization((Fraction(1, q1), nu2, nu1), flags)


def indirect_chain_polarization(tp: TransformedPolarization) -> Polarization:
    """Chain weights for E2 (x) Q1 -> (G1 (x) M1) + (F1 (x) N1)."""
    q, nu2, nu1 = tp.values
    return Polarization((q, -nu2, -nu1), ("1/dimQ1", "-nu2", "-nu1"))


# ---------------------------------------------------------------- tuples and verdicts

@dataclass(frozen=True)
class SubspaceTuple:
    spaces: tuple  # SubspaceBasis per factor

    def dims(self):
        return tuple(s.dim for s in self.spaces)

    def is_trivial(self) -> bool:
        return all(s.dim == 0 for s in self.spaces) or all(s.dim == s.ambient_dim for s in self.spaces)

    def to_json(self):
        return [s.to_json() for s in self.spaces]


@dataclass
class StabilityVerdict:
    level: str  # "reductive" | "full-group"
    verdict: str
    witness: SubspaceTuple | None = None
    weight: Fraction | None = None
    unipotent_witness: tuple | None = None
    primes: tuple = ()
    stats: dict = dc_field(default_factory=dict)

    @property
    def semistable(self) -> bool:
        return self.verdict != UNSTABLE

    @property
    def stable(self) -> bool:
        return self.verdict == STABLE

    def holds(self, strict: bool) -> bool:
        return self.stable if strict else self.semistable

    def to_json(self):
        out = {"level": self.level, "verdict": self.verdict, "primes": list(self.primes)}
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
            out["weight"] = str(self.weight)
        if self.unipotent_witness is not None:
            out["unipotent_witness"] = [str(c) for c in self.unipotent_witness]
        out.update({k: v for k, v in self.stats.items()})
        return out


def _arrow_mats(x: ChainPoint):
    """(src factor index, tgt factor index, list of matrices) per nonzero block."""
    sp = x.space
    idx = {f: n for n, f in enumerate(sp.factors())}
    out = []
    for (i, j, j2) in sp.arrows():
        mats = [m for m in x.block(i, j, j2) if any(not vec_is_zero(r) for r in m)]
        if mats:
            out.append((idx[(i, j)], idx[(i + 1, j2)], mats))
    return out


def is_invariant(x: ChainPoint, tup: SubspaceTuple) -> bool:
    F = x.space.ctx.field
    for s, t, mats in _arrow_mats(x):
        src, tgt = tup.spaces[s], tup.spaces[t]
        for v in src.vectors:
            for m in mats:
                img = tuple(F(sum(v[a] * m[a][b] for a in range(len(v)))) for b in range(len(m[0])))
                if not tgt.contains(img):
                    return False
    return True


def _images(F, v_rows, mats, ncols):
    out = []
    for v in v_rows:
        for m in mats:
            out.append(tuple(F(sum(v[a] * m[a][b] for a in range(len(v)))) for b in range(ncols)))
    return out


def _classify(best):
    if best is None:
        return STABLE
    return UNSTABLE if best > 0 else STRICTLY_SEMISTABLE


def _check_field(F: FieldSpec):
    if not F.is_finite:
        raise ValueError("subspace enumeration needs a prime field; reduce the point first")


def invariant_tuples(x: ChainPoint, budget=10**6):
    """Every invariant tuple exactly once: sources free, others range over superspaces of the
    span of incoming images (factors are visited in chain order, so arrows point forward)."""
    sp = x.space
    F = sp.ctx.field
    _check_field(F)
    facs = sp.factors()
    incoming = {n: [] for n in range(len(facs))}
    for s, t, mats in _arrow_mats(x):
        incoming[t].append((s, mats))
    count = [0]

    def rec(n, chosen):
        if n == len(facs):
            count[0] += 1
            if count[0] > budget:
                raise BudgetExceeded(count[0], budget, "invariant tuple search")
            yield SubspaceTuple(tuple(chosen))
            return
        dim = sp.mult(facs[n])
        imgs = []
        for s, mats in incoming[n]:
            imgs.extend(_images(F, chosen[s].vectors, mats, dim))
        base = SubspaceBasis.span(F, dim, imgs)
        for sub in enumerate_superspaces(base, budget):
            chosen.append(sub)
            yield from rec(n + 1, chosen)
            chosen.pop()

    yield from rec(0, [])


def all_tuples(space: ChainSpace, budget=10**6):
    F = space.ctx.field
    _check_field(F)
    per = [list(enumerate_all_subspaces(space.mult(f), F, budget)) for f in space.factors()]
    total = 1
    for p in per:
        total *= len(p)
    if total > budget:
        raise BudgetExceeded(total, budget, "subspace tuple product")
    for combo in itertools.product(*per):
        yield SubspaceTuple(tuple(combo))


def _search(tuples, pol: Polarization, x=None, check_invariance=False, level="reductive"):
    best, wit, seen = None, None, 0
    for tup in tuples:
        if tup.is_trivial():
            continue
        if check_invariance and not is_invariant(x, tup):
            continue
        seen += 1
        w = pol.value(tup.dims())
        if w >= 0 and (best is None or w > best):
            best, wit = w, tup
            if w > 0:
                break
    return StabilityVerdict(level, _classify(best), wit, best, stats={"tuples_examined": seen})


def is_semistable_red(x: ChainPoint, pol: Polarization, strict=False, method="pruned",
                      budget=10**6) -> StabilityVerdict:
    """King verdict for the reductive group.  `strict` only affects `holds`; the verdict is
    always three-valued.  method: pruned (invariant tuples only) or naive (full product)."""
    bad = pol.check(x.space, nonzero=False)
    if bad:
        raise ValueError("; ".join(bad))
    if method == "pruned":
        v = _search(invariant_tuples(x, budget), pol)
    elif method == "naive":
        v = _search(all_tuples(x.space, budget), pol, x, check_invariance=True)
    else:
        raise ValueError(f"unknown method {method}")
    v.primes = (x.space.ctx.field.p,)
    return v


def revalidate_witness(x: ChainPoint, pol: Polarization, v: StabilityVerdict) -> bool:
    """Independent re-check of a verdict's witness: invariance for (h . x) and the claimed weight."""
    if v.witness is None:
        return v.verdict == STABLE
    y = x if v.unipotent_witness is None else act_chain(unipotent_element(x.space, v.unipotent_witness), x)
    if v.witness.is_trivial() or not is_invariant(y, v.witness):
        return False
    w = pol.value(v.witness.dims())
    if w != v.weight:
        return False
    return (w > 0) if v.verdict == UNSTABLE else (w == 0)


# ---------------------------------------------------------------- full group

def h_elements(space: ChainSpace, budget=10**7):
    F = space.ctx.field
    _check_field(F)
    d = space.unipotent_dim()
    if F.p ** d > budget:
        raise BudgetExceeded(F.p ** d, budget, "unipotent orbit enumeration")
    yield from itertools.product(range(F.p), repeat=d)


def action_is_affine(space: ChainSpace) -> bool:
    """h . x is affine in the unipotent coordinate when a single term carries unipotent slots
    and no two of them compose inside it."""
    slots = space.unipotent_slots()
    if len({i for i, _, _ in slots}) > 1:
        return False
    pairs = {(j, j2) for _, j, j2 in slots}
    return not any((j2, j3) in pairs for (_, j2) in pairs for (_, j3) in pairs)


def _flat_blocks(x: ChainPoint, arrows):
    out = []
    for (i, j, j2) in arrows:
        for m in x.block(i, j, j2):
            for r in m:
                out.extend(r)
    return out


def _affine_model(x: ChainPoint):
    """base and directions L_r with blocks(h(c) . x) = base + sum c_r L_r."""
    sp = x.space
    F = sp.ctx.field
    arrows = sp.arrows()
    d = sp.unipotent_dim()
    base = _flat_blocks(x, arrows)
    dirs = []
    for r in range(d):
        e = [0] * d
        e[r] = 1
        y = act_chain(unipotent_element(sp, e), x)
        dirs.append([F(a - b) for a, b in zip(_flat_blocks(y, arrows), base)])
    return arrows, base, dirs


def _tuple_equations(x, arrows, base, dirs, tup: SubspaceTuple):
    """Linear conditions on c for tup to be invariant under h(c) . x."""
    sp = x.space
    F = sp.ctx.field
    idx = {f: n for n, f in enumerate(sp.factors())}
    d = len(dirs)
    eqs, rhs = [], []
    pos = 0
    for (i, j, j2) in arrows:
        src, tgt = tup.spaces[idx[(i, j)]], tup.spaces[idx[(i + 1, j2)]]
        m1, m2 = sp.terms[i][j][1], sp.terms[i + 1][j2][1]
        nh = sp.ctx.dim(sp.terms[i][j][0], sp.terms[i + 1][j2][0])
        ann = null_space_rows(tgt.vectors, m2, F) if tgt.dim < m2 else []
        for h in range(nh):
            off = pos + h * m1 * m2
            if src.dim and ann:
                for v in src.vectors:
                    for a_row in ann:
                        # a_row . (v . A)^T with A = base + sum c_r L_r
                        def pair(vec):
                            acc = 0
                            for a in range(m1):
                                if v[a] == 0:
                                    continue
                                for b in range(m2):
                                    if a_row[b]:
                                        acc += v[a] * vec[off + a * m2 + b] * a_row[b]
                            return F(acc)
                        eqs.append(tuple(pair(L) for L in dirs))
                        rhs.append(F(-pair(base)))
        pos += nh * m1 * m2
    return eqs, rhs, d


def is_semistable_G(x: ChainPoint, pol: Polarization, strict=False, method="auto",
                    budget=10**7) -> StabilityVerdict:
    """Every point of the unipotent orbit H . x must be reductively (semi-)stable.

    method: 'enumerate' walks H(F_p) and runs the pruned search on each translate (the oracle);
    'affine' swaps the quantifiers and, for every subspace tuple of nonnegative weight, solves
    the linear system in the unipotent coordinate; 'auto' picks by cost.
    """
    sp = x.space
    F = sp.ctx.field
    _check_field(F)
    bad = pol.check(sp, nonzero=False)
    if bad:
        raise ValueError("; ".join(bad))
    d = sp.unipotent_dim()
    if d == 0:
        v = is_semistable_red(x, pol, strict)
        v.level = "full-group"
        return v
    if method == "auto":
        method = "enumerate" if F.p ** d <= 256 or not action_is_affine(sp) else "affine"
    if method == "enumerate":
        worst = None
        for c in h_elements(sp, budget):
            y = act_chain(unipotent_element(sp, c), x) if any(c) else x
            v = is_semistable_red(y, pol, strict)
            if worst is None or _RANK[v.verdict] > _RANK[worst.verdict]:
                worst = v
                worst.unipotent_witness = tuple(c) if v.witness is not None else None
                if v.verdict == UNSTABLE:
                    break
        worst.level = "full-group"
        worst.stats["method"] = "enumerate"
        return worst
    if method != "affine":
        raise ValueError(f"unknown method {method}")
    if not action_is_affine(sp):
        raise ValueError("the unipotent action is not affine here; use method='enumerate'")
    arrows, base, dirs = _affine_model(x)
    cands = []
    for tup in all_tuples(sp, budget):
        if tup.is_trivial():
            continue
        w = pol.value(tup.dims())
        if w >= 0:
            cands.append((-w, tup))
    cands.sort(key=lambda t: t[0])
    seen = 0
    for negw, tup in cands:
        seen += 1
        eqs, rhs, nd = _tuple_equations(x, arrows, base, dirs, tup)
        sol = solve_rows(eqs, nd, rhs, F) if eqs else tuple(F.zero for _ in range(nd))
        if sol is not None:
            v = StabilityVerdict("full-group", _classify(-negw), tup, -negw, tuple(sol), (F.p,),
                                 {"method": "affine", "tuples_examined": seen})
            return v
    return StabilityVerdict("full-group", STABLE, primes=(F.p,),
                            stats={"method": "affine", "tuples_examined": seen})


def agree_across_primes(builders, pol, level="G", strict=False) -> StabilityVerdict:
    """Run the check on the same point built over several primes; verdicts must agree."""
    verdicts = []
    for build in builders:
        x = build()
        v = is_semistable_G(x, pol, strict) if level == "G" else is_semistable_red(x, pol, strict)
        verdicts.append(v)
    kinds = {v.verdict for v in verdicts}
    primes = tuple(v.primes[0] for v in verdicts)
    if len(kinds) != 1:
        return StabilityVerdict(verdicts[0].level, "disagreement", primes=primes,
                                stats={"per_prime": {v.primes[0]: v.verdict for v in verdicts}})
    out = verdicts[0]
    out.primes = primes
    return out


# ---------------------------------------------------------------- stabilizer

def stabilizer_dimension(x: ChainPoint) -> int:
    """Dimension of the Lie-algebra stabilizer: kernel of X -> (-X_i f_i + f_i X_{i+1})_i over
    the full group's Lie algebra (diagonal End(M) blocks plus the unipotent slots)."""
    sp = x.space
    ctx = sp.ctx
    F = ctx.field
    arrows = sp.arrows()
    gens = []
    for i, term in enumerate(sp.terms):
        for j, (obj, m) in enumerate(term):
            for a, b in itertools.product(range(m), range(m)):
                mat = [[F.one if (r, c) == (a, b) else F.zero for c in range(m)] for r in range(m)]
                gens.append({i: {(j, j): _diag_block(ctx, obj, mat)}})
    d = sp.unipotent_dim()
    for r in range(d):
        e = [0] * d
        e[r] = 1
        g = unipotent_element(sp, e)
        gen = {}
        for i in range(len(sp.terms)):
            u = {k: v for k, v in g[i].items() if k[0] != k[1]}
            if u and any(any(any(c for c in row) for row in mat) for blk in u.values() for mat in blk):
                gen[i] = u
        gens.append(gen)
    columns = []
    for gen in gens:
        delta = {}
        for i in range(sp.p):
            fi = {(j, j2): x.block(i, j, j2) for (ii, j, j2) in arrows if ii == i}
            if i in gen:
                t = _compose_term_maps(sp, i, i, i + 1, gen[i], fi)
                for k, v in t.items():
                    delta[(i,) + k] = _sub(F, delta.get((i,) + k), v)
            if i + 1 in gen:
                t = _compose_term_maps(sp, i, i + 1, i + 1, fi, gen[i + 1])
                for k, v in t.items():
                    delta[(i,) + k] = _add(F, delta.get((i,) + k), v)
        vec = []
        for (i, j, j2) in arrows:
            blk = delta.get((i, j, j2))
            if blk is None:
                blk = x.block(i, j, j2)
                vec.extend(F.zero for m in blk for r in m for _ in r)
            else:
                vec.extend(c for m in blk for r in m for c in r)
        columns.append(F.vec(vec))
    if not columns:
        return 0
    return len(columns) - rank_rows(columns, len(columns[0]), F)


def _add(F, a, b):
    if a is None:
        return b
    return tuple(tuple(tuple(F(p + q) for p, q in zip(r1, r2)) for r1, r2 in zip(m1, m2)) for m1, m2 in zip(a, b))


def _sub(F, a, b):
    nb = tuple(tuple(tuple(F(-q) for q in r) for r in m) for m in b)
    return _add(F, a, nb)


# ---------------------------------------------------------------- singular values, certificates

def singular_values_rho(n: int) -> list[Fraction]:
    """Walls rho_k = k / (n + 2 - k), 1 <= k <= n + 1, for O(-2) + O(-1) -> O (x) C^{n+2}."""
    return sorted(Fraction(k, n + 2 - k) for k in range(1, n + 2))


def singular_values_alpha(n: int, n1: int) -> list[Fraction]:
    """Walls alpha_k = k / n1, 1 <= k <= min(n, n1 - 1)."""
    return [Fraction(k, n1) for k in range(1, min(n, n1 - 1) + 1)]


def singular_values(setting: str, n: int, n1: int | None = None) -> dict:
    if setting == "ex2":
        vals = singular_values_rho(n)
        var = "rho"
    elif setting == "ex3":
        vals = singular_values_alpha(n, n1)
        var = "lambda2"
    else:
        raise ValueError(f"unknown setting {setting}")
    cuts = [Fraction(0)] + vals + [None]
    chambers = [(cuts[i], cuts[i + 1]) for i in range(len(cuts) - 1)]
    return {"variable": var, "values": vals, "chambers": chambers}


@dataclass
class Inequality:
    name: str
    lhs: Fraction
    rhs: Fraction
    op: str  # ">" or ">=" or "<"

    @property
    def ok(self) -> bool:
        if self.op == ">":
            return self.lhs > self.rhs
        if self.op == ">=":
            return self.lhs >= self.rhs
        if self.op == "<":
            return self.lhs < self.rhs
        raise ValueError(self.op)

    @property
    def slack(self) -> Fraction:
        return (self.rhs - self.lhs) if self.op == "<" else (self.lhs - self.rhs)

    def to_json(self):
        return {"name": self.name, "lhs": str(self.lhs), "op": self.op, "rhs": str(self.rhs),
                "ok": self.ok, "slack": str(self.slack)}


@dataclass
class Certificate:
    setting: str
    results: dict  # construction -> list[Inequality]
    notes: list = dc_field(default_factory=list)

    def certified(self, name) -> bool:
        return all(q.ok for q in self.results[name])

    def certifying(self) -> list[str]:
        return [k for k in self.results if self.certified(k)]

    def to_json(self):
        return {"setting": self.setting,
                "results": {k: {"certified": self.certified(k), "inequalities": [q.to_json() for q in v]}
                            for k, v in self.results.items()},
                "certifying": self.certifying(), "notes": self.notes}


REQUIRED = {
    "complex": ("c1", "c2", "c"),
    "morphism": ("c0", "c0p", "c1_534", "c2_534"),
}


def existence_certificate(setting: str, stats: dict, pol, constants: dict) -> Certificate:
    """Exact evaluation of the existence inequalities.

    complex: stats a, b, l1, m1, m2, n1 and pol (lam1, mu1, mu2, nu1); constants c1, c2, c at m2.
    morphism: stats a, h11, h12, m1, m2, n1 and pol (lam1, lam2) normalized; constants
    c0 at m2, c0p at m1, c1_534 at m1, c2_534 at m1.
    """
    F_ = Fraction
    missing = [c for c in REQUIRED[setting] if c not in constants]
    if missing:
        raise KeyError(f"missing constants: {', '.join(missing)}")
    k = {name: F_(v) for name, v in constants.items()}
    if setting == "complex":
        lam1, mu1, mu2, nu1 = (F_(v) for v in pol)
        a, b = stats["a"], stats["b"]
        m1, m2, n1 = stats["m1"], stats["m2"], stats["n1"]
        res = {}
        res["standing"] = [Inequality("lam1 > 0", lam1, F_(0), ">"),
                           Inequality("nu1 < 0", nu1, F_(0), "<"),
                           Inequality("mu1 m1 + nu1 n1 < 0", mu1 * m1 + nu1 * n1, F_(0), "<"),
                           Inequality("mu2 m2 + nu1 n1 < 0", mu2 * m2 + nu1 * n1, F_(0), "<")]
        thm = [Inequality("mu2 - a nu1 c1(m2) > 0", mu2 - a * nu1 * k["c1"], F_(0), ">"),
               Inequality("mu2 - a mu1 - b lam1 > 0", mu2 - a * mu1 - b * lam1, F_(0), ">")]
        notes = ["second condition read with c(m2) for the malformed constant subscript"]
        if mu1 < 0 and lam1 + nu1 * k["c"] + mu1 * k["c2"] < 0:
            thm.append(Inequality("mu2 - a mu1 + b nu1 c(m2) + b mu1 c2(m2) >= 0",
                                  mu2 - a * mu1 + b * nu1 * k["c"] + b * mu1 * k["c2"], F_(0), ">="))
        res["projective (two mutations)"] = res["standing"] + thm
        if k["c2"] > 0:
            res["equivalence after two mutations"] = [
                Inequality("mu2 >= (b - a/c2(m2)) lam1 - a c1(m2) nu1", mu2,
                           (b - a / k["c2"]) * lam1 - a * k["c1"] * nu1, ">=")]
        return Certificate(setting, res, notes)
    if setting == "morphism":
        lam1, lam2 = F_(pol[0]), F_(pol[1])
        a, h11, h12 = stats["a"], stats["h11"], stats["h12"]
        m1, m2, n1 = stats["m1"], stats["m2"], stats["n1"]
        ap = a * h12 - h11
        res = {}
        standing = [Inequality("lam1 > 0", lam1, F_(0), ">"), Inequality("lam2 > 0", lam2, F_(0), ">")]
        res["direct"] = standing + [
                         Inequality("lam2 - a lam1 > 0 (lam2/lam1 > a)", lam2 - a * lam1, F_(0), ">"),
                         Inequality("lam2 > a c0(m2)/n1", lam2, a * k["c0"] / n1, ">")]
        res["indirect (equivalence)"] = standing + [Inequality("lam2 >= c0'(m1)/n1", lam2, k["c0p"] / n1, ">=")]
        res["indirect (same quotient)"] = res["indirect (equivalence)"] + [
            Inequality("lam2 > 1/(m2+1)", lam2, F_(1, m2 + 1), ">")]
        res["case 2 (dual mutation)"] = standing + [
            Inequality("lam1 < h11/n1", lam1, F_(h11, n1), "<"),
            Inequality("lam2 < h12/n1", lam2, F_(h12, n1), "<"),
            Inequality("a lam2 - lam1 > a'/n1", a * lam2 - lam1, F_(ap, n1), ">"),
            Inequality("h11 - lam1 n1 >= c1(m1) a", h11 - lam1 * n1, k["c1_534"] * a, ">=")]
        # the Max condition is split in its two affine halves
        res["case 3 (indirect then direct)"] = res["indirect (same quotient)"] + [
            Inequality("a lam2 - lam1 > a' c2(m1) lam2", a * lam2 - lam1, ap * k["c2_534"] * lam2, ">"),
            Inequality("a lam2 - lam1 > a'/n1", a * lam2 - lam1, F_(ap, n1), ">")]
        return Certificate(setting, res, [f"a' = a h12 - h11 = {ap}"])
    raise ValueError(f"unknown setting {setting}")


def certified_projective(cert: Certificate) -> list[str]:
    if cert.setting == "complex":
        return [k for k in ("projective (two mutations)",) if cert.certified(k)]
    return [k for k in ("direct", "case 2 (dual mutation)", "case 3 (indirect then direct)")
            if cert.certified(k)]


@dataclass
class Region:
    """Certified set of a parameter t inside (lo, hi): an interval with open or closed ends."""
    lo: Fraction | None
    lo_closed: bool
    hi: Fraction | None
    hi_closed: bool
    empty: bool = False

    def contains(self, t) -> bool:
        if self.empty:
            return False
        if self.lo is not None and (t < self.lo or (t == self.lo and not self.lo_closed)):
            return False
        if self.hi is not None and (t > self.hi or (t == self.hi and not self.hi_closed)):
            return False
        return True

    def to_json(self):
        if self.empty:
            return {"empty": True}
        return {"lo": None if self.lo is None else str(self.lo), "lo_closed": self.lo_closed,
                "hi": None if self.hi is None else str(self.hi), "hi_closed": self.hi_closed}


def certified_region(cert_at, construction: str, lo, hi) -> Region:
    """Exact set of t in the open interval (lo, hi) where `construction` certifies, for a family
    t -> Certificate whose inequality slacks are affine in t (checked at a third point)."""
    lo, hi = Fraction(lo), Fraction(hi)
    ts = [lo + (hi - lo) * Fraction(i, 4) for i in (1, 2, 3)]
    certs = [cert_at(t).results[construction] for t in ts]
    names = [tuple(q.name for q in c) for c in certs]
    if len(set(names)) != 1:
        raise ValueError("the inequality list changes with the parameter; split the range")
    region = Region(lo, False, hi, False)
    for q0, q1, q2 in zip(*certs):
        slope = (q1.slack - q0.slack) / (ts[1] - ts[0])
        if q0.slack + slope * (ts[2] - ts[0]) != q2.slack:
            raise ValueError(f"slack of {q0.name} is not affine in the parameter")
        closed = q0.op == ">="
        if slope == 0:
            if not (q0.slack > 0 or (closed and q0.slack == 0)):
                return Region(None, False, None, False, True)
            continue
        root = ts[0] - q0.slack / slope
        if slope > 0:
            if root > region.lo or (root == region.lo and not closed):
                region.lo, region.lo_closed = root, closed
        else:
            if root < region.hi or (root == region.hi and not closed):
                region.hi, region.hi_closed = root, closed
    if region.lo > region.hi or (region.lo == region.hi and not (region.lo_closed and region.hi_closed)):
        return Region(None, False, None, False, True)
    return region
