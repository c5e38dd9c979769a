"""Functors, pre-natural transformations, the functor category, Yoneda,
homotopy equivalences and their constructive inverses, and Hofer-type
distance certificates.

Conventions:
  * A functor F is stored through its multilinear components
    f : BarWord(source) -> hom vector (target); f on the empty word at an
    object is the obstruction F_0 (positive valuation required).
  * F-hat is the cohomomorphism extension (no signs, empty blocks = F_0).
  * A pre-natural transformation T: F => G of degree d has components
    t : BarWord -> hom(F(a), G(b)) with deg t(w) = deg'(w) + d, and
        T-hat(w) = sum (-1)^{(d+1) deg'w1} F-hat(w1) (x) t(w2) (x) G-hat(w3).
  * delta T = d-hat o T-hat + (-1)^{d+1} T-hat o d-hat (hom component),
    m_1 = -delta, and for k >= 2 the structure operation on transformations
    is the alternating sandwich formula with sign
        *_a = sum_j (d_j + 1)(deg' x^(1) + ... + deg' x^(2j-1)).
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

from .novikov import GapMonoid, Scalar, frac, rational_solve
from .graded import (Gen, Word, word, shifted_degree, shifted_degree_slice,
                     epsilon, op_reverse, coderivation_apply, cohom_apply,
                     vadd, vclean, vmul_coeff, vneg, vscale, vtrunc, viszero)
from .ainf_core import AinfCategory, Report, opposite
from .mc import RightModule


def _as_callable(obmap):
    if callable(obmap):
        return obmap
    return lambda obj: obmap[obj]


def _flip(g: Gen) -> Gen:
    return Gen(g.name, g.deg, g.tgt, g.src)


# ---------------------------------------------------------------------------
# Functors
# ---------------------------------------------------------------------------

class AinfFunctor:
    """A filtered functor given by its multilinear components."""

    def __init__(self, source: AinfCategory, target: AinfCategory, obmap,
                 components, name: str = ""):
        self.source = source
        self.target = target
        self.ob = _as_callable(obmap)
        self.name = name
        if isinstance(components, dict):
            self._comp_dict = components

            def fn(w: Word):
                return components.get((w.src, w.gens), {})
            self._comp_fn = fn
        else:
            self._comp_dict = None
            self._comp_fn = components
        self._cache: Dict[Tuple, Dict] = {}
        self._f0val_cache = None

    def f(self, w: Word) -> Dict:
        key = (w.src, w.gens)
        if key not in self._cache:
            self._cache[key] = vtrunc(self._comp_fn(w) or {}, self.target.cut)
        return self._cache[key]

    def f0_valuation(self):
        """Minimal valuation of any obstruction component (None if strict)."""
        if self._f0val_cache is None:
            best = None
            for obj in self.source.objects:
                for g, c in self.f(word(obj)).items():
                    val = c.valuation()
                    if val is None:
                        continue
                    if val <= 0:
                        raise ValueError("F_0 must have positive valuation")
                    best = val if best is None else min(best, val)
            self._f0val_cache = (best,)
        return self._f0val_cache[0]

    def is_strict(self) -> bool:
        return self.f0_valuation() is None

    def fhat(self, w: Word, E=None) -> Dict[Word, object]:
        E = self.target.cut if E is None else frac(E)
        return cohom_apply(self.f, self.ob, w, E,
                           f0_valuation=self.f0_valuation())


def identity_functor(C: AinfCategory) -> AinfFunctor:
    one = Scalar.one(C.cut)
    table = {(g.src, (g,)): {g: one} for g in C.gens}
    return AinfFunctor(C, C, lambda o: o, table, name="ID")


def functor_residual(F: AinfFunctor, w: Word, E) -> Dict:
    """Chain-map defect: m_target(F-hat(w)) - F(d-hat(w))."""
    E = frac(E)
    out: Dict = {}
    for v, c in F.fhat(w, E).items():
        out = vadd(out, vmul_coeff(F.target.m(v), c.truncate(E)))
    for u, c in coderivation_apply(F.source.m, w, E).items():
        out = vadd(out, vneg(vmul_coeff(F.f(u), c.truncate(E))))
    return vtrunc(out, E)


def check_functor(F: AinfFunctor, E=None, word_bound: int = 3) -> Report:
    E = F.target.cut if E is None else frac(E)
    rep = Report()
    try:
        F.f0_valuation()
    except ValueError as exc:
        rep.add("functor-f0", None, None, str(exc))
        return rep
    for w in F.source.words(word_bound):
        r = functor_residual(F, w, E)
        if not viszero(r):
            rep.add("functor", w, r)
    # degree: deg F_k(w) = deg'(w) - 1  (operator degree 0 on shifted words);
    # the obstruction F_0 sits in degree 1, matching bounding cochains
    for w in F.source.words(word_bound):
        expected = shifted_degree(w) - 1 if w.gens else 1
        for g, c in F.f(w).items():
            bad = ((g.deg != expected) if F.source.grading == "Z"
                   else ((g.deg - expected) % 2 != 0))
            if bad:
                rep.add("functor-degree", w, None,
                        f"component {g.name} deg {g.deg}, expected {expected}")
    return rep


def compose(F2: AinfFunctor, F1: AinfFunctor, name: str = "") -> AinfFunctor:
    """The composition F2 o F1 via the coalgebra-map composition."""
    if F2.source is not F1.target and F2.source.objects != F1.target.objects:
        raise ValueError("functors are not composable")

    def comp(w: Word) -> Dict:
        out: Dict = {}
        for v, c in F1.fhat(w).items():
            out = vadd(out, vmul_coeff(F2.f(v), c))
        return out

    return AinfFunctor(F1.source, F2.target,
                       lambda o: F2.ob(F1.ob(o)), comp,
                       name=name or f"({F2.name}o{F1.name})")


def opposite_functor(F: AinfFunctor, source_op: Optional[AinfCategory] = None,
                     target_op: Optional[AinfCategory] = None) -> AinfFunctor:
    """F^op_k(x) = (-1)^{eps(x)} F_k(x reversed), between the opposites."""
    source_op = source_op or opposite(F.source)
    target_op = target_op or opposite(F.target)

    def comp(w: Word) -> Dict:
        orig = tuple(_flip(g) for g in reversed(w.gens))
        ow = Word(orig[0].src if orig else w.src, orig)
        sgn = -1 if epsilon(orig) % 2 else 1
        v = F.f(ow)
        return {_flip(g): (c if sgn == 1 else -c) for g, c in v.items()}

    return AinfFunctor(source_op, target_op, F.ob, comp,
                       name=f"{F.name}^op")


# ---------------------------------------------------------------------------
# Pre-natural transformations and the functor category
# ---------------------------------------------------------------------------

class PreNatTrans:
    """A pre-natural transformation between functors with common (co)domain."""

    def __init__(self, src_functor: AinfFunctor, tgt_functor: AinfFunctor,
                 degree: int, components, name: str = ""):
        self.F = src_functor
        self.G = tgt_functor
        self.degree = degree
        self.name = name
        self.C1 = src_functor.source
        self.C2 = src_functor.target
        if isinstance(components, dict):
            self._comp_dict = components

            def fn(w: Word):
                return components.get((w.src, w.gens), {})
            self._comp_fn = fn
        else:
            self._comp_dict = None
            self._comp_fn = components
        self._cache: Dict[Tuple, Dict] = {}

    def t(self, w: Word) -> Dict:
        key = (w.src, w.gens)
        if key not in self._cache:
            v = self._comp_fn(w) or {}
            if not w.gens and w.src != w.tgt:
                v = {}
            self._cache[key] = vtrunc(v, self.C2.cut)
        return self._cache[key]

    def that(self, w: Word, E=None) -> Dict[Word, object]:
        """The unique coalgebra bicomodule extension of the components."""
        E = self.C2.cut if E is None else frac(E)
        objs = w.objects()
        n = len(w.gens)
        d1 = (self.degree + 1) % 2
        out: Dict[Word, object] = {}
        for i in range(n + 1):
            sgn = -1 if (d1 * shifted_degree_slice(w.gens[:i])) % 2 else 1
            left = self.F.fhat(Word(w.src, w.gens[:i]), E)
            if not left:
                continue
            for j in range(i, n + 1):
                mid = self.t(Word(objs[i], w.gens[i:j]))
                if not mid:
                    continue
                right = self.G.fhat(Word(objs[j], w.gens[j:]), E)
                if not right:
                    continue
                for u1, c1 in left.items():
                    for g, cm in mid.items():
                        for u3, c3 in right.items():
                            coeff = (c1 * cm * c3).truncate(E)
                            if sgn == -1:
                                coeff = -coeff
                            if coeff.is_zero():
                                continue
                            nw = Word(u1.src, u1.gens + (g,) + u3.gens)
                            cur = out.get(nw)
                            s = coeff if cur is None else cur + coeff
                            if s.is_zero():
                                out.pop(nw, None)
                            else:
                                out[nw] = s
        return out

    def map_components(self, fn, degree=None, name: str = "") -> "PreNatTrans":
        return PreNatTrans(self.F, self.G,
                           self.degree if degree is None else degree,
                           lambda w: fn(self.t(w)), name=name)


def trans_add(A: PreNatTrans, B: PreNatTrans, name: str = "") -> PreNatTrans:
    if A.degree != B.degree:
        raise ValueError("cannot add transformations of different degree")
    return PreNatTrans(A.F, A.G, A.degree,
                       lambda w: vadd(A.t(w), B.t(w)), name=name)


def trans_neg(A: PreNatTrans, name: str = "") -> PreNatTrans:
    return A.map_components(vneg, name=name or f"-{A.name}")


def trans_scale(A: PreNatTrans, q, name: str = "") -> PreNatTrans:
    return A.map_components(lambda v: vscale(v, q), name=name)


def trans_zero(F: AinfFunctor, G: AinfFunctor, degree: int) -> PreNatTrans:
    return PreNatTrans(F, G, degree, lambda w: {}, name="0")


def trans_equal(A: PreNatTrans, B: PreNatTrans, word_bound: int = 3) -> bool:
    for w in A.C1.words(word_bound):
        if A.t(w) != B.t(w):
            return False
    return True


def trans_iszero(A: PreNatTrans, word_bound: int = 3) -> bool:
    return all(viszero(A.t(w)) for w in A.C1.words(word_bound))


def id_trans(F: AinfFunctor) -> PreNatTrans:
    """The identity transformation: 0-component -e at every object."""
    C2 = F.target

    def comp(w: Word):
        if w.gens:
            return {}
        e = C2.units[F.ob(w.src)]
        return {e: -Scalar.one(C2.cut)}

    return PreNatTrans(F, F, 0, comp, name=f"Id^{F.name}")


def nat_delta(T: PreNatTrans, E=None) -> PreNatTrans:
    """delta T: hom part of d-hat o T-hat + (-1)^{deg T} T-hat o d-hat."""
    E = T.C2.cut if E is None else frac(E)
    sgn = -1 if T.degree % 2 else 1

    def comp(w: Word):
        out: Dict = {}
        for v, c in T.that(w, E).items():
            out = vadd(out, vmul_coeff(T.C2.m(v), c.truncate(E)))
        for u, c in coderivation_apply(T.C1.m, w, E).items():
            coeff = c.truncate(E)
            if sgn == -1:
                coeff = -coeff
            out = vadd(out, vmul_coeff(T.t(u), coeff))
        return vtrunc(out, E)

    return PreNatTrans(T.F, T.G, T.degree + 1, comp, name=f"d({T.name})")


def _compositions(n: int, parts: int):
    """All ways to write 0..n as `parts` ordered non-negative block lengths."""
    if parts == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, parts - 1):
            yield (first,) + rest


def functor_cat_m(Ts: List[PreNatTrans], E=None) -> PreNatTrans:
    """The structure operation of the functor category on a composable chain."""
    if not Ts:
        raise ValueError("functor_cat_m needs at least one transformation")
    k = len(Ts)
    for a, b in zip(Ts, Ts[1:]):
        if a.G is not b.F:
            raise ValueError("transformations are not composable")
    if k == 1:
        d = nat_delta(Ts[0], E)
        return trans_neg(d, name=f"m1({Ts[0].name})")
    C2 = Ts[0].C2
    E = C2.cut if E is None else frac(E)
    functors = [Ts[0].F] + [T.G for T in Ts]
    degree = sum(T.degree for T in Ts) + 2 - k
    dshift = [(T.degree + 1) % 2 for T in Ts]

    def comp(w: Word):
        objs = w.objects()
        n = len(w.gens)
        out: Dict = {}
        for comp_lens in _compositions(n, 2 * k + 1):
            # prefix shifted degrees of x^(1) .. x^(2j-1) for each j
            starts = [0]
            for L in comp_lens:
                starts.append(starts[-1] + L)
            star = 0
            for j in range(1, k + 1):
                pre = shifted_degree_slice(w.gens[:starts[2 * j - 1]])
                star += dshift[j - 1] * pre
            sgn = -1 if star % 2 else 1
            # assemble the sandwich factors left to right
            factors = [[((), Scalar.one(E))]]

            def extend(states, items):
                nxt = []
                for letters, coeff in states:
                    for add_letters, c in items:
                        t = (coeff * c).truncate(E)
                        if not t.is_zero():
                            nxt.append((letters + add_letters, t))
                return nxt

            states = [((), Scalar.one(E))]
            dead = False
            for slot in range(2 * k + 1):
                a, b = starts[slot], starts[slot + 1]
                block = Word(objs[a], w.gens[a:b])
                if slot % 2 == 0:
                    Fj = functors[slot // 2]
                    items = [(u.gens, c) for u, c in Fj.fhat(block, E).items()]
                else:
                    Tj = Ts[(slot - 1) // 2]
                    items = [((g,), c) for g, c in Tj.t(block).items()]
                states = extend(states, items)
                if not states:
                    dead = True
                    break
            if dead:
                continue
            for letters, coeff in states:
                src = functors[0].ob(w.src)
                v = C2.m(Word(src, letters))
                if not v:
                    continue
                c = coeff if sgn == 1 else -coeff
                out = vadd(out, vmul_coeff(v, c))
        return vtrunc(vneg(out), E)

    return PreNatTrans(functors[0], functors[-1], degree, comp,
                       name=f"m{k}({','.join(T.name for T in Ts)})")


def functor_cat_residual(Ts: List[PreNatTrans], E=None) -> PreNatTrans:
    """The A-infinity relation of the functor category on a composable chain."""
    k = len(Ts)
    C2 = Ts[0].C2
    E = C2.cut if E is None else frac(E)
    total = trans_zero(Ts[0].F, Ts[-1].G,
                       sum(T.degree for T in Ts) + 3 - k)
    for i in range(k):
        pre = sum(T.degree + 1 for T in Ts[:i])
        sgn = -1 if pre % 2 else 1
        for j in range(i + 1, k + 1):
            inner = functor_cat_m(Ts[i:j], E)
            term = functor_cat_m(Ts[:i] + [inner] + Ts[j:], E)
            if sgn == -1:
                term = trans_neg(term)
            total = trans_add(total, term)
    return total


def check_functor_cat(Ts: List[PreNatTrans], E=None, word_bound: int = 2) -> Report:
    rep = Report()
    res = functor_cat_residual(Ts, E)
    for w in Ts[0].C1.words(word_bound):
        v = res.t(w)
        if not viszero(v):
            rep.add("functor-cat", w, v)
    return rep


# ---------------------------------------------------------------------------
# Yoneda
# ---------------------------------------------------------------------------

def yoneda(C: AinfCategory, c, Cop: Optional[AinfCategory] = None) -> RightModule:
    """The Yoneda module of c: hom(-, c) as a right module over C^op.

    The action is n(y; x) = (-1)^{eps(x) + deg y * deg' x} m(x reversed, y);
    the total sign is fixed by the right-module relation over C^op and makes
    the opposite unit act by (-1)^{deg y}.
    """
    if not viszero(C.m(word(c))):
        raise ValueError("yoneda requires a strict category")
    Cop = Cop or opposite(C)
    carrier = tuple(g for g in C.gens if g.tgt == c)

    def nops(ygen: Gen, opgens):
        opgens = tuple(opgens)
        orig = tuple(_flip(g) for g in reversed(opgens))
        if orig and orig[-1].tgt != ygen.src:
            return {}
        sgn_exp = epsilon(orig) + ygen.deg * shifted_degree_slice(orig)
        src = orig[0].src if orig else ygen.src
        v = C.m(Word(src, orig + (ygen,)))
        if sgn_exp % 2:
            v = vneg(v)
        return v

    return RightModule(Cop, carrier, nops)


# ---------------------------------------------------------------------------
# Homotopy equivalences
# ---------------------------------------------------------------------------

def _flatten_exponents(C: AinfCategory, E, low=0):
    exps = [lam for lam in C.monoid.elements_below(E)]
    if low < 0:
        extra = sorted({lam + frac(low) for lam in exps if lam + frac(low) < E})
        exps = sorted(set(exps) | set(extra))
    return [lam for lam in exps if lam >= frac(low)]


def image_m1_solve(C: AinfCategory, target: Dict, src, tgt, E=None,
                   low=0) -> Optional[Dict]:
    """Find u in hom(src,tgt) with m_1(u) = target, or None.

    The scalars are flattened over monoid exponents in [low, E) and the
    resulting rational linear system is solved exactly.
    """
    E = C.cut if E is None else frac(E)
    gens = C.hom(src, tgt)
    exps = _flatten_exponents(C, E, low)
    cols = [(g, lam) for g in gens for lam in exps]
    rows_index: Dict[Tuple, int] = {}
    rows: List[List[Fraction]] = []
    rhs: List[Fraction] = []

    def row_of(key):
        if key not in rows_index:
            rows_index[key] = len(rows)
            rows.append([Fraction(0)] * len(cols))
            rhs.append(Fraction(0))
        return rows_index[key]

    for ci, (g, lam) in enumerate(cols):
        mg = C.m(word(g.src, (g,)))
        for h, coeff in mg.items():
            for mu, q in coeff.terms:
                tot = lam + mu
                if tot >= E:
                    continue
                rows[row_of((h, tot))][ci] += q
    for h, coeff in target.items():
        for mu, q in coeff.terms:
            if mu >= E:
                continue
            rhs[row_of((h, mu))] = q
    # pad rows created after earlier columns were scanned
    for r in rows:
        while len(r) < len(cols):
            r.append(Fraction(0))
    sol = rational_solve(rows, rhs)
    if sol is None:
        return None
    out: Dict = {}
    for (g, lam), q in zip(cols, sol):
        if q != 0:
            out[g] = out.get(g, Scalar.zero(E)) + Scalar.monomial(lam, q, E)
    return vclean(out)


def check_homotopy_equiv(C: AinfCategory, x: Dict, y: Dict, u: Optional[Dict] = None,
                         v: Optional[Dict] = None, E=None) -> Report:
    """Verify that x (with homotopy inverse y) is a homotopy equivalence.

    x and y are hom vectors between two objects; u, v are optional primitives
    for m_2(y,x) - e and m_2(x,y) - e'.  When omitted, membership in the
    image of m_1 is decided by an exact linear solve.
    """
    E = C.cut if E is None else frac(E)
    rep = Report()
    xs = list(x)
    ys = list(y)
    if not xs or not ys:
        rep.add("he-empty", None)
        return rep
    c, cp = xs[0].src, xs[0].tgt
    if ys[0].src != cp or ys[0].tgt != c:
        rep.add("he-objects", None, None, "y must run opposite to x")
        return rep
    m1x = C.m_on_vectors([x], src=c, E=E)
    m1y = C.m_on_vectors([y], src=cp, E=E)
    if not viszero(m1x):
        rep.add("he-closed-x", None, m1x)
    if not viszero(m1y):
        rep.add("he-closed-y", None, m1y)
    yx = C.m_on_vectors([y, x], src=cp, E=E)
    lhs1 = vadd(yx, vneg(C.unit_vector(cp)))
    xy = C.m_on_vectors([x, y], src=c, E=E)
    lhs2 = vadd(xy, vneg(C.unit_vector(c)))
    for lhs, prim, which, s, t in ((lhs1, u, "yx", cp, cp),
                                   (lhs2, v, "xy", c, c)):
        if prim is not None:
            got = C.m_on_vectors([prim], src=s, E=E)
            if got != lhs:
                rep.add(f"he-primitive-{which}", None, vadd(got, vneg(lhs)))
        else:
            if image_m1_solve(C, lhs, s, t, E) is None:
                rep.add(f"he-image-{which}", None, lhs,
                        "defect is not in the image of m_1")
    return rep


# ---------------------------------------------------------------------------
# Constructive inversion of natural transformations
# ---------------------------------------------------------------------------

def _trans_slots(X_F: AinfFunctor, X_G: AinfFunctor, degree, C1, C2, E,
                 word_bound):
    """Enumerate the unknown component slots of a transformation."""
    slots = []
    exps = [lam for lam in C1.monoid.join(C2.monoid).elements_below(E)]
    for w in C1.words(word_bound):
        if not w.gens and w.src != w.tgt:
            continue
        a, b = w.src, w.tgt
        for g in C2.hom(X_F.ob(a), X_G.ob(b)):
            want = shifted_degree(w) + degree
            ok = (g.deg == want) if C2.grading == "Z" else ((g.deg - want) % 2 == 0)
            if not ok:
                continue
            for lam in exps:
                slots.append((w, g, lam))
    return slots


def _delta_trans(F, G, degree, slot, E):
    w0, g0, lam = slot
    mono = Scalar.monomial(lam, 1, E)

    def comp(w: Word):
        if (w.src, w.gens) == (w0.src, w0.gens):
            return {g0: mono}
        return {}

    return PreNatTrans(F, G, degree, comp)


def invert_nat_trans(T: PreNatTrans, E=None, word_bound: int = 2):
    """Construct (S, H, V) with m_1 S = 0, m_2(S,T) - Id = m_1 H,
    m_2(T,S) - Id = m_1 V, by one exact linear solve over the budget words.

    The output identities are re-verified on the budget; failure to solve
    signals that T is not invertible on this budget.
    """
    C1, C2 = T.C1, T.C2
    E = C2.cut if E is None else frac(E)
    F, G = T.F, T.G
    specs = [("S", G, F, 0), ("H", G, G, -1), ("V", F, F, -1)]
    slots: Dict[str, list] = {}
    offsets: Dict[str, int] = {}
    ncols = 0
    for nm, A, B, d in specs:
        slots[nm] = _trans_slots(A, B, d, C1, C2, E, word_bound)
        offsets[nm] = ncols
        ncols += len(slots[nm])

    idG = id_trans(G)
    idF = id_trans(F)
    zS = trans_zero(G, F, 0)
    zH = trans_zero(G, G, -1)
    zV = trans_zero(F, F, -1)

    def identities(S, H, V):
        # each is a transformation that must vanish
        eq1 = functor_cat_m([S], E)                     # m_1 S
        eq2 = trans_add(trans_add(functor_cat_m([S, T], E), trans_neg(idG)),
                        trans_neg(functor_cat_m([H], E)))
        eq3 = trans_add(trans_add(functor_cat_m([T, S], E), trans_neg(idF)),
                        trans_neg(functor_cat_m([V], E)))
        return [eq1, eq2, eq3]

    def collect(trans_list):
        # flatten the three identity transformations on budget words
        vals = []
        for ti, tr in enumerate(trans_list):
            for w in C1.words(word_bound):
                vals.append(((ti, w.src, w.gens), tr.t(w)))
        return vals

    base = collect(identities(zS, zH, zV))
    rows_index: Dict[Tuple, int] = {}
    rows: List[List[Fraction]] = []
    rhs: List[Fraction] = []

    def row_of(key):
        if key not in rows_index:
            rows_index[key] = len(rows)
            rows.append([Fraction(0)] * ncols)
            rhs.append(Fraction(0))
        return rows_index[key]

    for key, vec in base:
        for g, coeff in vec.items():
            for mu, q in coeff.terms:
                if mu < E:
                    rhs[row_of(key + (g, mu))] = -q

    for nm, A, B, d in specs:
        for si, slot in enumerate(slots[nm]):
            dS = _delta_trans(A, B, d, slot, E)
            args = {"S": zS, "H": zH, "V": zV}
            args[nm] = dS
            vals = collect(identities(args["S"], args["H"], args["V"]))
            col = offsets[nm] + si
            for (key, vec), (bkey, bvec) in zip(vals, base):
                diff = vadd(vec, vneg(bvec))
                for g, coeff in diff.items():
                    for mu, q in coeff.terms:
                        if mu < E:
                            ri = row_of(key + (g, mu))
                            while len(rows[ri]) < ncols:
                                rows[ri].append(Fraction(0))
                            rows[ri][col] += q
    for r in rows:
        while len(r) < ncols:
            r.append(Fraction(0))
    sol = rational_solve(rows, rhs)
    if sol is None:
        raise ValueError("no homotopy inverse on this budget: "
                         "the chain-level data is inconsistent")

    def build(nm, A, B, d):
        table: Dict[Tuple, Dict] = {}
        for si, (w, g, lam) in enumerate(slots[nm]):
            q = sol[offsets[nm] + si]
            if q == 0:
                continue
            key = (w.src, w.gens)
            entry = table.setdefault(key, {})
            entry[g] = entry.get(g, Scalar.zero(E)) + Scalar.monomial(lam, q, E)
        table = {k: vclean(v) for k, v in table.items()}
        return PreNatTrans(A, B, d, table, name=nm)

    S = build("S", G, F, 0)
    H = build("H", G, G, -1)
    V = build("V", F, F, -1)
    # re-verify
    for tr in identities(S, H, V):
        for w in C1.words(word_bound):
            if not viszero(tr.t(w)):
                raise ValueError("inversion output failed re-verification")
    return S, H, V


# ---------------------------------------------------------------------------
# Lambda extension and Hofer-type distance certificates
# ---------------------------------------------------------------------------

def lambda_category(C: AinfCategory, window=0) -> AinfCategory:
    """The Lambda-linear extension: same data, exponent window [-W, cut).

    Operations are unchanged; the window is advisory and is consulted by the
    witness verifiers below.
    """
    if not all(viszero(C.m(word(obj))) for obj in C.objects):
        raise ValueError("lambda_category requires a strict category")
    out = C.with_ops(C._ops_dict if C._ops_dict is not None else C._ops_fn)
    out.window = frac(window)
    return out


class HoferWitness:
    """Certificate data for the distance between objects c1 and c2."""

    def __init__(self, c1, c2, x12: Dict, x21: Dict, y1: Dict, y2: Dict,
                 eps1, eps2, eps):
        self.c1 = c1
        self.c2 = c2
        self.x12 = x12          # hom(c1, c2) over Lambda
        self.x21 = x21          # hom(c2, c1)
        self.y1 = y1            # hom(c1, c1)
        self.y2 = y2            # hom(c2, c2)
        self.eps1 = frac(eps1)  # T^{eps1} x21 lands in Lambda_0
        self.eps2 = frac(eps2)  # T^{eps2} x12 lands in Lambda_0
        self.eps = frac(eps)    # T^{eps} y_i land in Lambda_0

    @property
    def bound(self):
        return self.eps1 + self.eps2


def _min_valuation(v: Dict):
    best = None
    for c in v.values():
        val = c.valuation()
        if val is None:
            continue
        best = val if best is None else min(best, val)
    return best


def hofer_verify(C: AinfCategory, w: HoferWitness, E=None):
    """Verify a distance witness; returns the certified bound eps1 + eps2."""
    E = C.cut if E is None else frac(E)
    rep = Report()
    m1x12 = C.m_on_vectors([w.x12], src=w.c1, E=E)
    m1x21 = C.m_on_vectors([w.x21], src=w.c2, E=E)
    if not viszero(m1x12):
        rep.add("hofer-closed", "x12", m1x12)
    if not viszero(m1x21):
        rep.add("hofer-closed", "x21", m1x21)
    lhs1 = C.m_on_vectors([w.x12, w.x21], src=w.c1, E=E)
    want1 = vadd(C.unit_vector(w.c1), C.m_on_vectors([w.y1], src=w.c1, E=E))
    if lhs1 != want1:
        rep.add("hofer-identity", "c1", vadd(lhs1, vneg(want1)))
    lhs2 = C.m_on_vectors([w.x21, w.x12], src=w.c2, E=E)
    want2 = vadd(C.unit_vector(w.c2), C.m_on_vectors([w.y2], src=w.c2, E=E))
    if lhs2 != want2:
        rep.add("hofer-identity", "c2", vadd(lhs2, vneg(want2)))
    for name, vec, shift in (("x21", w.x21, w.eps1), ("x12", w.x12, w.eps2),
                             ("y1", w.y1, w.eps), ("y2", w.y2, w.eps)):
        val = _min_valuation(vec)
        if val is not None and val + shift < 0:
            rep.add("hofer-valuation", name, None,
                    f"T^{shift} {name} does not land in Lambda_0")
    window = getattr(C, "window", None)
    if window is not None:
        for vec in (w.x12, w.x21, w.y1, w.y2):
            val = _min_valuation(vec)
            if val is not None and val < -window:
                rep.add("hofer-window", None, None,
                        "witness exponents fall below the declared window")
    if not rep.ok:
        raise ValueError(f"invalid Hofer witness: {rep}")
    return w.bound


def hofer_compose(C: AinfCategory, w12: HoferWitness, w23: HoferWitness,
                  E=None) -> HoferWitness:
    """Chain two witnesses: the composed bound is sub-additive.

    The candidate morphisms are the m_2-compositions; the primitives are
    recovered by an exact linear solve and the result is re-verified.
    """
    if w12.c2 != w23.c1:
        raise ValueError("witnesses are not chainable")
    E = C.cut if E is None else frac(E)
    x13 = C.m_on_vectors([w12.x12, w23.x12], src=w12.c1, E=E)
    x31 = C.m_on_vectors([w23.x21, w12.x21], src=w23.c2, E=E)
    low = -(getattr(C, "window", 0) or 0)
    lhs1 = vadd(C.m_on_vectors([x13, x31], src=w12.c1, E=E),
                vneg(C.unit_vector(w12.c1)))
    lhs3 = vadd(C.m_on_vectors([x31, x13], src=w23.c2, E=E),
                vneg(C.unit_vector(w23.c2)))
    y1 = image_m1_solve(C, lhs1, w12.c1, w12.c1, E, low=low)
    y3 = image_m1_solve(C, lhs3, w23.c2, w23.c2, E, low=low)
    if y1 is None or y3 is None:
        raise ValueError("composed witness has no primitive on this budget")
    eps_y = Fraction(0)
    for yv in (y1, y3):
        val = _min_valuation(yv)
        if val is not None and val < 0:
            eps_y = max(eps_y, -val)
    out = HoferWitness(w12.c1, w23.c2, x13, x31, y1, y3,
                       w12.eps1 + w23.eps1, w12.eps2 + w23.eps2, eps_y)
    hofer_verify(C, out, E)
    return out


def hofer_push(Fbi, w: HoferWitness, c2, E=None) -> HoferWitness:
    """Push a witness through a strict unital bi-functor in its first slot.

    `Fbi` must provide `target`, `ob(c1, c2)` and `push_hom(vec, c2)`
    (the linear component F_{1,1}(-, e_{c2})).  The result is re-verified.
    """
    tgt = Fbi.target
    E = tgt.cut if E is None else frac(E)
    out = HoferWitness(Fbi.ob(w.c1, c2), Fbi.ob(w.c2, c2),
                       Fbi.push_hom(w.x12, c2), Fbi.push_hom(w.x21, c2),
                       Fbi.push_hom(w.y1, c2), Fbi.push_hom(w.y2, c2),
                       w.eps1, w.eps2, w.eps)
    hofer_verify(tgt, out, E)
    return out
