"""Bi-modules and tri-modules over filtered A-infinity categories.

This module provides:
  * BiModule: left C1 / right C2 modules with the defining relation
        0 = sum (-1)^{deg'x_{1:i}} n(x_{1:i}, n(x_{i:}, z, y_{1:j}), y_{j:})
          + n(dhat x, z, y) + (-1)^{deg'x + deg'z} n(x, z, dhat y),
    canonical bimodules, relative and adjoint-relative Yoneda bimodules,
    and the translation to operator-valued (chain-complex) bi-functors.
  * Bi-module homomorphisms with composition and the chain-map checker.
  * Bi-functors C1 x C2 -> C3 with the interleaving Koszul sign, currying /
    factor swapping, and strictification by bounding cochains.
  * TriModule: two left categories and one right category, the induced
    right modules obtained by feeding bounding cochains into the left
    slots, and the correspondence solvers built on cyclic elements.
  * The derived tensor product and derived hom of bimodules with their
    explicit unit maps and chain homotopies.
  * The bi-Yoneda functor, the tensor tri-module of a pair of DG
    categories, and the homotopy operators relating it to the diagonal
    bimodule.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Callable, Dict, List, NamedTuple, Optional, Tuple

from .novikov import GapMonoid, Scalar, frac
from .graded import (Gen, Word, word, shifted_degree, shifted_degree_slice,
                     epsilon, koszul_sign, letter_cloud, coderivation_apply,
                     vadd, vclean, vmul_coeff, vneg, vscale, vsign, vtrunc,
                     viszero)
from .ainf_core import AinfCategory, Report, from_dg
from .mc import RightModule, check_mc, check_cyclic, solve_cyclic
from .functors import AinfFunctor, compose as compose_functors


def _flip(g: Gen) -> Gen:
    return Gen(g.name, g.deg, g.tgt, g.src)


def _default_pair(z):
    return (z.src, z.tgt)


def _obinv(F: AinfFunctor) -> Dict:
    inv: Dict = {}
    for obj in F.source.objects:
        img = F.ob(obj)
        if img in inv and inv[img] != obj:
            raise ValueError("functor must be injective on objects here")
        inv[img] = obj
    return inv


# ---------------------------------------------------------------------------
# Bi-modules
# ---------------------------------------------------------------------------

class BiModule:
    """A left C1 / right C2 filtered module with finite carrier basis.

    `carrier` is a flat tuple of basis elements; each element has a `deg`
    attribute and `pair(z)` recovers its object pair (c1, c2).  `nops` maps
    (left word, element, right word) to a carrier vector; left words end at
    c1, right words start at c2, and the output sits at (left.src, right.tgt).
    """

    def __init__(self, left: AinfCategory, right: AinfCategory, carrier,
                 nops, cut=None, pair=None):
        self.left = left
        self.right = right
        self.carrier = tuple(carrier)
        self.cut = frac(cut if cut is not None else
                        min(left.cut, right.cut))
        self.pair = pair or _default_pair
        self._nops = nops
        self._cache: Dict[Tuple, Dict] = {}

    def carrier_at(self, c1, c2):
        return tuple(z for z in self.carrier if self.pair(z) == (c1, c2))

    def n(self, xw: Word, z, yw: Word) -> Dict:
        key = (xw.src, xw.gens, z, yw.src, yw.gens)
        if key not in self._cache:
            v = self._nops(xw, z, yw) or {}
            self._cache[key] = vtrunc(v, self.cut)
        return self._cache[key]

    def n_vec(self, xw: Word, zvec: Dict, yw: Word, E=None) -> Dict:
        E = self.cut if E is None else frac(E)
        out: Dict = {}
        for z, c in zvec.items():
            out = vadd(out, vmul_coeff(self.n(xw, z, yw), c.truncate(E)))
        return vtrunc(out, E)


def bimodule_residual(M: BiModule, xw: Word, z, yw: Word, E=None) -> Dict:
    """The defining bi-module relation evaluated on (x; z; y)."""
    E = M.cut if E is None else frac(E)
    xg, yg = xw.gens, yw.gens
    xobjs = xw.objects()
    yobjs = yw.objects()
    out: Dict = {}
    for i in range(len(xg) + 1):
        sgn = -1 if shifted_degree_slice(xg[:i]) % 2 else 1
        for j in range(len(yg) + 1):
            inner = M.n(Word(xobjs[i], xg[i:]), z, Word(yw.src, yg[:j]))
            if not inner:
                continue
            v = M.n_vec(Word(xw.src, xg[:i]), inner, Word(yobjs[j], yg[j:]), E)
            out = vadd(out, vsign(v, sgn))
    for u, c in coderivation_apply(M.left.m, xw, E).items():
        out = vadd(out, vmul_coeff(M.n(u, z, yw), c))
    sgn = -1 if (shifted_degree_slice(xg) + z.deg + 1) % 2 else 1
    for u, c in coderivation_apply(M.right.m, yw, E).items():
        cc = c if sgn == 1 else -c
        out = vadd(out, vmul_coeff(M.n(xw, z, u), cc))
    return vtrunc(out, E)


def _is_z_graded(M: BiModule) -> bool:
    return M.left.grading == "Z" and M.right.grading == "Z"


def check_bimodule(M: BiModule, E=None, word_bound: int = 2) -> Report:
    """Verify the bi-module relation and degrees on all budget words."""
    E = M.cut if E is None else frac(E)
    rep = Report()
    exact = _is_z_graded(M)
    for z in M.carrier:
        c1, c2 = M.pair(z)
        for xw in M.left.words(word_bound, tgt=c1):
            for yw in M.right.words(word_bound, src=c2):
                r = bimodule_residual(M, xw, z, yw, E)
                if not viszero(r):
                    rep.add("bimodule", (xw, z, yw), r)
                expected = (z.deg + sum(g.deg for g in xw.gens)
                            + sum(g.deg for g in yw.gens)
                            + 1 - len(xw.gens) - len(yw.gens))
                for w, c in M.n(xw, z, yw).items():
                    bad = (w.deg != expected) if exact else \
                        ((w.deg - expected) % 2 != 0)
                    if bad:
                        rep.add("bimodule-degree", (xw, z, yw), None,
                                f"output deg {w.deg}, expected {expected}")
    return rep


def canonical_bimodule(C: AinfCategory) -> BiModule:
    """A category as a bi-module over itself: n(x; z; y) = m(x, z, y)."""

    def nops(xw: Word, z, yw: Word):
        gens = xw.gens + (z,) + yw.gens
        w = Word(xw.src, gens)
        if not w.is_composable():
            return {}
        return C.m(w)

    return BiModule(C, C, C.gens, nops)


def relative_yoneda(F: AinfFunctor) -> BiModule:
    """The bi-module with carrier C2(F(c1), c2) and n(x; z; y) = m(Fhat x, z, y)."""
    C1, C2 = F.source, F.target
    inv = _obinv(F)

    def pair(z):
        return (inv[z.src], z.tgt)

    def nops(xw: Word, z, yw: Word):
        out: Dict = {}
        for u, c in F.fhat(xw).items():
            gens = u.gens + (z,) + yw.gens
            w = Word(u.src, gens)
            if not w.is_composable():
                continue
            out = vadd(out, vmul_coeff(C2.m(w), c))
        return out

    carrier = tuple(g for g in C2.gens if g.src in inv)
    return BiModule(C1, C2, carrier, nops, pair=pair)


def adjoint_relative_yoneda(F: AinfFunctor) -> BiModule:
    """The bi-module with carrier C2(c2, F(c1)) and n(x; z; y) = m(x, z, Fhat y).

    The left category is the target of F, the right category its source.
    """
    C1, C2 = F.source, F.target
    inv = _obinv(F)

    def pair(z):
        return (z.src, inv[z.tgt])

    def nops(xw: Word, z, yw: Word):
        out: Dict = {}
        for u, c in F.fhat(yw).items():
            gens = xw.gens + (z,) + u.gens
            w = Word(xw.src, gens)
            if not w.is_composable():
                continue
            out = vadd(out, vmul_coeff(C2.m(w), c))
        return out

    carrier = tuple(g for g in C2.gens if g.tgt in inv)
    return BiModule(C2, C1, carrier, nops, pair=pair)


# ---------------------------------------------------------------------------
# Operator-valued (chain-complex) bi-functors <-> bi-module tables
# ---------------------------------------------------------------------------

def _op_word(xw: Word) -> Tuple[int, Word]:
    """Reverse a left word into the opposite category with its sign."""
    sgn = -1 if epsilon(xw.gens) % 2 else 1
    rev = tuple(_flip(g) for g in reversed(xw.gens))
    return sgn, Word(rev[0].src if rev else xw.tgt, rev)


def bimodule_from_chain_bifunctor(left: AinfCategory, right: AinfCategory,
                                  carrier, d, comps, cut=None,
                                  pair=None) -> BiModule:
    """Build the n-table of the bi-module encoded by an operator bi-functor.

    `d` is the underlying differential on the carrier (element -> vector) and
    `comps(opword, yword)` returns the operator component on a pair of bar
    words (the first in the opposite of the left category), as a dict
    element -> vector or a callable.  The translation is
        n_{0,0}(z) = (-1)^{deg z} d z + F_{0,0}(z),
        n(x; z; y) = (-1)^{eps(x) + deg'z deg'y} F(OP(x); y)(z) otherwise.
    """

    def apply_comp(op, z):
        if op is None:
            return {}
        if callable(op):
            return op(z) or {}
        return op.get(z, {})

    def nops(xw: Word, z, yw: Word):
        if not xw.gens and not yw.gens:
            dz = vsign(d(z) or {}, -1 if z.deg % 2 else 1)
            return vadd(dz, apply_comp(comps(Word(xw.src, ()), yw), z))
        sgn, opw = _op_word(xw)
        exp = (z.deg + 1) * shifted_degree_slice(yw.gens)
        if exp % 2:
            sgn = -sgn
        return vsign(apply_comp(comps(opw, yw), z), sgn)

    return BiModule(left, right, carrier, nops, cut=cut, pair=pair)


def chain_bifunctor_from_bimodule(M: BiModule, d) -> Callable:
    """Recover the operator components from a bi-module and a differential.

    Returns `comps(opword, yword)` as in `bimodule_from_chain_bifunctor`;
    the round trip through either translation is the identity.
    """

    def comps(opw: Word, yw: Word):
        rev = tuple(_flip(g) for g in reversed(opw.gens))
        xw = Word(rev[0].src if rev else opw.tgt, rev)

        def op(z):
            if not opw.gens and not yw.gens:
                dz = vsign(d(z) or {}, -1 if z.deg % 2 else 1)
                return vadd(M.n(Word(M.pair(z)[0], ()), z, yw), vneg(dz))
            sgn = -1 if epsilon(rev) % 2 else 1
            exp = (z.deg + 1) * shifted_degree_slice(yw.gens)
            if exp % 2:
                sgn = -sgn
            return vsign(M.n(xw, z, yw), sgn)

        return op

    return comps


# ---------------------------------------------------------------------------
# Bi-module homomorphisms
# ---------------------------------------------------------------------------

class BiModuleMap:
    """A homomorphism of bi-modules over fixed left/right categories.

    Components map (left word, element, right word) to a vector in the
    target carrier; `degree` is the operator degree (0 for strict chain
    maps).
    """

    def __init__(self, source: BiModule, target: BiModule, degree: int,
                 comps, name: str = ""):
        self.source = source
        self.target = target
        self.degree = degree
        self.name = name
        self._comps = comps
        self._cache: Dict[Tuple, Dict] = {}

    def f(self, xw: Word, z, yw: Word) -> Dict:
        key = (xw.src, xw.gens, z, yw.src, yw.gens)
        if key not in self._cache:
            v = self._comps(xw, z, yw) or {}
            self._cache[key] = vtrunc(v, self.target.cut)
        return self._cache[key]

    def f_vec(self, xw: Word, zvec: Dict, yw: Word, E=None) -> Dict:
        E = self.target.cut if E is None else frac(E)
        out: Dict = {}
        for z, c in zvec.items():
            out = vadd(out, vmul_coeff(self.f(xw, z, yw), c.truncate(E)))
        return vtrunc(out, E)


def identity_bimodule_map(M: BiModule) -> BiModuleMap:
    def comps(xw, z, yw):
        if xw.gens or yw.gens:
            return {}
        return {z: Scalar.one(M.cut)}
    return BiModuleMap(M, M, 0, comps, name="id")


def bimodule_map_residual(f: BiModuleMap, xw: Word, z, yw: Word, E=None) -> Dict:
    """Chain-map defect of a bi-module homomorphism on a budget word.

    The relation is n' o fhat = (-1)^{deg f} f o dhat, where fhat is the
    bicomodule extension with prefix sign (-1)^{deg f deg'x_pre} and
    dhat is the bar differential of the source bi-module.
    """
    E = f.target.cut if E is None else frac(E)
    M, N = f.source, f.target
    xg, yg = xw.gens, yw.gens
    xobjs, yobjs = xw.objects(), yw.objects()
    out: Dict = {}
    dshift = f.degree % 2
    for i in range(len(xg) + 1):
        sgn = -1 if (dshift * shifted_degree_slice(xg[:i])) % 2 else 1
        for j in range(len(yg) + 1):
            mid = f.f(Word(xobjs[i], xg[i:]), z, Word(yw.src, yg[:j]))
            if not mid:
                continue
            v = N.n_vec(Word(xw.src, xg[:i]), mid, Word(yobjs[j], yg[j:]), E)
            out = vadd(out, vsign(v, sgn))
    # minus (-1)^{deg f} f applied to the bar differential of (x, z, y)
    back = -1 if f.degree % 2 else 1
    for i in range(len(xg) + 1):
        sgn = -back if shifted_degree_slice(xg[:i]) % 2 else back
        for j in range(len(yg) + 1):
            inner = M.n(Word(xobjs[i], xg[i:]), z, Word(yw.src, yg[:j]))
            if not inner:
                continue
            v = f.f_vec(Word(xw.src, xg[:i]), inner, Word(yobjs[j], yg[j:]), E)
            out = vadd(out, vneg(vsign(v, sgn)))
    for u, c in coderivation_apply(M.left.m, xw, E).items():
        cc = c if back == 1 else -c
        out = vadd(out, vneg(vmul_coeff(f.f(u, z, yw), cc)))
    sgn = -back if (shifted_degree_slice(xg) + z.deg + 1) % 2 else back
    for u, c in coderivation_apply(M.right.m, yw, E).items():
        cc = c if sgn == 1 else -c
        out = vadd(out, vneg(vmul_coeff(f.f(xw, z, u), cc)))
    return vtrunc(out, E)


def check_bimodule_map(f: BiModuleMap, E=None, word_bound: int = 2) -> Report:
    E = f.target.cut if E is None else frac(E)
    rep = Report()
    for z in f.source.carrier:
        c1, c2 = f.source.pair(z)
        for xw in f.source.left.words(word_bound, tgt=c1):
            for yw in f.source.right.words(word_bound, src=c2):
                r = bimodule_map_residual(f, xw, z, yw, E)
                if not viszero(r):
                    rep.add("bimodule-map", (xw, z, yw), r)
    return rep


def compose_bimodule_maps(f: BiModuleMap, g: BiModuleMap,
                          name: str = "") -> BiModuleMap:
    """(f o g)(x; z; y) with prefix sign (-1)^{deg g deg'x_pre}."""
    if g.target is not f.source:
        raise ValueError("bi-module maps are not composable")
    dshift = g.degree % 2

    def comps(xw: Word, z, yw: Word):
        xg, yg = xw.gens, yw.gens
        xobjs, yobjs = xw.objects(), yw.objects()
        out: Dict = {}
        for i in range(len(xg) + 1):
            sgn = -1 if (dshift * shifted_degree_slice(xg[:i])) % 2 else 1
            for j in range(len(yg) + 1):
                mid = g.f(Word(xobjs[i], xg[i:]), z, Word(yw.src, yg[:j]))
                if not mid:
                    continue
                v = f.f_vec(Word(xw.src, xg[:i]), mid,
                            Word(yobjs[j], yg[j:]))
                out = vadd(out, vsign(v, sgn))
        return out

    return BiModuleMap(g.source, f.target, f.degree + g.degree, comps,
                       name=name or f"({f.name}o{g.name})")


# ---------------------------------------------------------------------------
# Bi-functors
# ---------------------------------------------------------------------------

def _compositions(n: int, parts: int):
    """All ways to write n as `parts` ordered non-negative block lengths."""
    if parts == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, parts - 1):
            yield (first,) + rest


class BiFunctor:
    """A filtered functor C1 x C2 -> C3 given by a component table.

    `components` maps a pair of bar words (xw in C1, yw in C2) to a hom
    vector in C3 from ob(xw.src, yw.src) to ob(xw.tgt, yw.tgt); it may be a
    callable (xw, yw) -> vector or a dict keyed by
    ((xw.src, xw.gens), (yw.src, yw.gens)).  The (0,0) components play the
    role of curvature terms and must have positive valuation.
    """

    def __init__(self, source1: AinfCategory, source2: AinfCategory,
                 target: AinfCategory, obmap, components, name: str = ""):
        self.source1 = source1
        self.source2 = source2
        self.target = target
        self.name = name
        self.ob = obmap if callable(obmap) else (lambda c1, c2: obmap[(c1, c2)])
        if isinstance(components, dict):
            self._comp_fn = lambda xw, yw: components.get(
                ((xw.src, xw.gens), (yw.src, yw.gens)), {})
        else:
            self._comp_fn = components
        self._cache: Dict[Tuple, Dict] = {}

    def f(self, xw: Word, yw: Word) -> Dict:
        key = (xw.src, xw.gens, yw.src, yw.gens)
        if key not in self._cache:
            v = self._comp_fn(xw, yw) or {}
            self._cache[key] = vtrunc(v, self.target.cut)
        return self._cache[key]

    def f00_valuation(self):
        """Minimal valuation of the (0,0) components; None if they vanish."""
        best = None
        for c1 in self.source1.objects:
            for c2 in self.source2.objects:
                for c in self.f(Word(c1, ()), Word(c2, ())).values():
                    val = c.valuation()
                    if val is None:
                        continue
                    if best is None or val < best:
                        best = val
        return best

    def is_strict(self) -> bool:
        return self.f00_valuation() is None


def bifunctor_bar(F: BiFunctor, xw: Word, yw: Word, E=None) -> Dict:
    """The bar-level extension of F on a pair of words.

    Returns a dict (target bar Word) -> coefficient: the sum over splittings
    of both words into p aligned blocks, each block contributing one output
    letter through a component of F, with the interleaving Koszul sign
    (-1)^{sum_{i<j} deg'y_i deg'x_j}.  Empty block pairs insert the (0,0)
    components; their positive valuation bounds how many can appear.
    """
    E = F.target.cut if E is None else frac(E)
    xg, yg = xw.gens, yw.gens
    xobjs, yobjs = xw.objects(), yw.objects()
    v0 = F.f00_valuation()
    max_empty = 0 if v0 is None else int(E / v0) + 1
    out: Dict[Word, object] = {}
    for p in range(1, len(xg) + len(yg) + max_empty + 1):
        for xlens in _compositions(len(xg), p):
            for ylens in _compositions(len(yg), p):
                empties = sum(1 for a, b in zip(xlens, ylens)
                              if a == 0 and b == 0)
                if empties > max_empty:
                    continue
                xs = [0]
                for L in xlens:
                    xs.append(xs[-1] + L)
                ys = [0]
                for L in ylens:
                    ys.append(ys[-1] + L)
                exp = 0
                for i in range(p):
                    sy = shifted_degree_slice(yg[ys[i]:ys[i + 1]])
                    for j in range(i + 1, p):
                        exp += sy * shifted_degree_slice(xg[xs[j]:xs[j + 1]])
                sgn = -1 if exp % 2 else 1
                states = [((), Scalar.one(E))]
                for i in range(p):
                    bx = Word(xobjs[xs[i]], xg[xs[i]:xs[i + 1]])
                    by = Word(yobjs[ys[i]], yg[ys[i]:ys[i + 1]])
                    comp = F.f(bx, by)
                    nxt = []
                    for gens, coeff in states:
                        for g, c in comp.items():
                            t = (coeff * c).truncate(E)
                            if not t.is_zero():
                                nxt.append((gens + (g,), t))
                    states = nxt
                    if not states:
                        break
                for gens, coeff in states:
                    w = Word(F.ob(xw.src, yw.src), gens)
                    if not w.is_composable():
                        continue
                    c = coeff if sgn == 1 else -coeff
                    prev = out.get(w)
                    c = c if prev is None else prev + c
                    if c.is_zero():
                        out.pop(w, None)
                    else:
                        out[w] = c
    return out


def bifunctor_residual(F: BiFunctor, xw: Word, yw: Word, E=None) -> Dict:
    """Defect of the bi-functor relation m o Fhat = F o (dhat x id + id x dhat)."""
    E = F.target.cut if E is None else frac(E)
    out: Dict = {}
    for w, c in bifunctor_bar(F, xw, yw, E).items():
        out = vadd(out, vmul_coeff(F.target.m(w), c.truncate(E)))
    if not xw.gens and not yw.gens:
        out = vadd(out, F.target.m(Word(F.ob(xw.src, yw.src), ())))
    for u, c in coderivation_apply(F.source1.m, xw, E).items():
        out = vadd(out, vneg(vmul_coeff(F.f(u, yw), c.truncate(E))))
    sgn = -1 if shifted_degree_slice(xw.gens) % 2 else 1
    for u, c in coderivation_apply(F.source2.m, yw, E).items():
        cc = c.truncate(E)
        out = vadd(out, vneg(vmul_coeff(F.f(xw, u), cc if sgn == 1 else -cc)))
    return vtrunc(out, E)


def check_bifunctor(F: BiFunctor, E=None, word_bound: int = 2) -> Report:
    """Verify the bi-functor relation, degrees, and curvature valuation."""
    E = F.target.cut if E is None else frac(E)
    rep = Report()
    exact = (F.source1.grading == "Z" and F.source2.grading == "Z"
             and F.target.grading == "Z")
    v0 = F.f00_valuation()
    if v0 is not None and v0 <= 0:
        rep.add("bifunctor-valuation", None, None,
                "the (0,0) components must have positive valuation")
    for xw in F.source1.words(word_bound):
        for yw in F.source2.words(word_bound):
            r = bifunctor_residual(F, xw, yw, E)
            if not viszero(r):
                rep.add("bifunctor", (xw, yw), r)
            if not xw.gens and not yw.gens:
                expected = 1  # curvature-like components
            else:
                expected = (shifted_degree_slice(xw.gens)
                            + shifted_degree_slice(yw.gens) - 1)
            for g in F.f(xw, yw):
                bad = (g.deg != expected) if exact else \
                    ((g.deg - expected) % 2 != 0)
                if bad:
                    rep.add("bifunctor-degree", (xw, yw), None,
                            f"output deg {g.deg}, expected {expected}")
    return rep


def extend_to_bifunctor(F: AinfFunctor, other: AinfCategory) -> BiFunctor:
    """View a functor C1 -> C3 as a bi-functor C1 x C2 -> C3.

    Components with a nonempty second word vanish; the second category must
    be strict for the relation to survive the extension.
    """
    if not all(viszero(other.m(word(obj))) for obj in other.objects):
        raise ValueError("the second category must be strict")

    def comps(xw: Word, yw: Word):
        if yw.gens:
            return {}
        return F.f(xw)

    return BiFunctor(F.source, other, F.target,
                     lambda c1, c2: F.ob(c1), comps,
                     name=f"{F.name}[x]")


def swap_bifunctor(F: BiFunctor, name: str = "") -> BiFunctor:
    """Exchange the two source factors with sign (-1)^{deg'x deg'y}."""

    def comps(yw: Word, xw: Word):
        exp = shifted_degree_slice(xw.gens) * shifted_degree_slice(yw.gens)
        return vsign(F.f(xw, yw), -1 if exp % 2 else 1)

    return BiFunctor(F.source2, F.source1, F.target,
                     lambda c2, c1: F.ob(c1, c2), comps,
                     name=name or f"sw({F.name})")


class CurriedBiFunctor:
    """A bi-functor reshaped as a functor into the functor category.

    `obfun(c1)` is the functor C2 -> C3 obtained by freezing the first slot
    at c1 (its components are the (0,k2) entries of the table); `t(xw)` for a
    nonempty word is the pre-natural transformation obfun(xw.src) ->
    obfun(xw.tgt) of degree deg'x - 1 whose components are the remaining
    entries.
    """

    def __init__(self, source1: AinfCategory, source2: AinfCategory,
                 target: AinfCategory, obfun, tfun, name: str = ""):
        self.source1 = source1
        self.source2 = source2
        self.target = target
        self.name = name
        self._obfun = obfun
        self._tfun = tfun
        self._obcache: Dict = {}

    def ob(self, c1) -> AinfFunctor:
        if c1 not in self._obcache:
            self._obcache[c1] = self._obfun(c1)
        return self._obcache[c1]

    def t(self, xw: Word) -> "PreNatTrans":
        from .functors import PreNatTrans
        comp = self._tfun(xw)
        return PreNatTrans(self.ob(xw.src), self.ob(xw.tgt),
                           shifted_degree_slice(xw.gens) - 1, comp)


def curry_bifunctor(F: BiFunctor, name: str = "") -> CurriedBiFunctor:
    def obfun(c1):
        return AinfFunctor(F.source2, F.target,
                           lambda c2: F.ob(c1, c2),
                           lambda yw: F.f(Word(c1, ()), yw),
                           name=f"{F.name}({c1},-)")

    def tfun(xw: Word):
        return lambda yw: F.f(xw, yw)

    return CurriedBiFunctor(F.source1, F.source2, F.target, obfun, tfun,
                            name=name or f"curry({F.name})")


def uncurry_bifunctor(G: CurriedBiFunctor, name: str = "") -> BiFunctor:
    def comps(xw: Word, yw: Word):
        if not xw.gens:
            return G.ob(xw.src).f(yw)
        return G.t(xw).t(yw)

    def obmap(c1, c2):
        return G.ob(c1).ob(c2)

    return BiFunctor(G.source1, G.source2, G.target, obmap, comps,
                     name=name or f"uncurry({G.name})")


def _insertion_states(w: Word, clouds, cut):
    """Decorate a word by cloud insertions in every gap; (gens, coeff) list."""
    objs = w.objects()
    states = [((), Scalar.one(cut))]
    for i in range(len(w.gens) + 1):
        grown = []
        for letters, coeff in states:
            for ins, c in clouds.get(objs[i], [((), Scalar.one(cut))]):
                t = (coeff * c).truncate(cut)
                if not t.is_zero():
                    grown.append((letters + ins, t))
        if i < len(w.gens):
            states = [(letters + (w.gens[i],), coeff)
                      for letters, coeff in grown]
        else:
            states = grown
    return states


def strictify_bifunctor(F: BiFunctor, b1: Dict, b2: Dict,
                        max_insert: Optional[int] = None):
    """Strictify a bi-functor by bounding cochains on the two sources.

    Returns (Fs, b3): Fs is the strict bi-functor between the deformed
    categories whose components sum F over all insertions of b1-letters into
    the first word and b2-letters into the second, with the (0,0) part set to
    zero; b3 collects exactly those (0,0) sums and is the bounding cochain of
    the target by which the deformation is taken.  Both b's must solve
    Maurer-Cartan in their categories.
    """
    from .ainf_core import deform

    C1, C2, C3 = F.source1, F.source2, F.target
    for C, b, tag in ((C1, b1, "b1"), (C2, b2, "b2")):
        rep = check_mc(C, b)
        if not rep.ok:
            raise ValueError(f"{tag} does not solve Maurer-Cartan: {rep}")
    cut = C3.cut
    clouds1 = {obj: letter_cloud(b1.get(obj, {}), cut, max_insert)
               for obj in C1.objects}
    clouds2 = {obj: letter_cloud(b2.get(obj, {}), cut, max_insert)
               for obj in C2.objects}

    b3: Dict = {}
    for c1 in C1.objects:
        for c2 in C2.objects:
            acc: Dict = {}
            for xg, cx in clouds1[c1]:
                for yg, cy in clouds2[c2]:
                    v = F.f(Word(c1, xg), Word(c2, yg))
                    if v:
                        acc = vadd(acc, vmul_coeff(v, (cx * cy).truncate(cut)))
            acc = vtrunc(acc, cut)
            if acc:
                prev = b3.get(F.ob(c1, c2), {})
                b3[F.ob(c1, c2)] = vadd(prev, acc)

    def comps(xw: Word, yw: Word):
        if not xw.gens and not yw.gens:
            return {}
        out: Dict = {}
        for xg, cx in _insertion_states(xw, clouds1, cut):
            for yg, cy in _insertion_states(yw, clouds2, cut):
                v = F.f(Word(xw.src, xg), Word(yw.src, yg))
                if v:
                    out = vadd(out, vmul_coeff(v, (cx * cy).truncate(cut)))
        return vtrunc(out, cut)

    D1 = deform(C1, b1, max_insert) if b1 else C1
    D2 = deform(C2, b2, max_insert) if b2 else C2
    D3 = deform(C3, b3, max_insert) if b3 else C3
    Fs = BiFunctor(D1, D2, D3, F.ob, comps, name=f"strict({F.name})")
    return Fs, b3


# ---------------------------------------------------------------------------
# Tensor product of DG categories (used as a testing ground for the sign
# calculus: shuffle tri-modules, product inclusions, bi-Yoneda comparisons)
# ---------------------------------------------------------------------------

def _dg_data(C: AinfCategory, word_bound: int = 3):
    """Extract (d, compose) from a strict DG category; raise otherwise."""
    for obj in C.objects:
        if not viszero(C.m(word(obj))):
            raise ValueError("category is curved, not DG")
    for w in C.words(word_bound):
        if len(w.gens) >= 3 and not viszero(C.m(w)):
            raise ValueError("category has higher products, not DG")

    def d(g: Gen):
        return C.m(Word(g.src, (g,)))

    def compose(g: Gen, h: Gen):
        # g o h from m2 via m2(h, g) = (-1)^{deg h (deg g + 1)} g o h
        v = C.m(Word(h.src, (h, g)))
        return vsign(v, -1 if (h.deg * (g.deg + 1)) % 2 else 1)

    return d, compose


def dg_product(A: AinfCategory, B: AinfCategory):
    """The tensor product of two strict DG categories.

    Objects are pairs, hom generators are pairs with the usual conventions
    deg(a x b) = deg a + deg b, d(a x b) = da x b + (-1)^{deg a} a x db and
    (g x h) o (g' x h') = (-1)^{deg h deg g'} (g o g') x (h o h').  Returns
    (product category, pairing dict (ga, gb) -> product generator).
    """
    dA, compA = _dg_data(A)
    dB, compB = _dg_data(B)
    pairgen: Dict[Tuple[Gen, Gen], Gen] = {}
    gens = []
    for ga in A.gens:
        for gb in B.gens:
            pg = Gen(f"({ga.name},{gb.name})", ga.deg + gb.deg,
                     (ga.src, gb.src), (ga.tgt, gb.tgt))
            pairgen[(ga, gb)] = pg
            gens.append(pg)
    byname = {g.name: (ga, gb) for (ga, gb), g in pairgen.items()}
    objects = [(a, b) for a in A.objects for b in B.objects]
    units = {(a, b): pairgen[(A.units[a], B.units[b])]
             for a in A.objects for b in B.objects}
    cut = min(A.cut, B.cut)

    def to_vec(va: Dict, vb: Dict, sgn: int = 1) -> Dict:
        out: Dict = {}
        for ga, ca in va.items():
            for gb, cb in vb.items():
                c = (ca * cb).truncate(cut)
                if sgn == -1:
                    c = -c
                if not c.is_zero():
                    out[pairgen[(ga, gb)]] = c
        return out

    def differential(pg: Gen):
        ga, gb = byname[pg.name]
        one_a = {ga: Scalar.one(cut)}
        one_b = {gb: Scalar.one(cut)}
        out = to_vec(dA(ga), one_b)
        return vadd(out, to_vec(one_a, dB(gb),
                                -1 if ga.deg % 2 else 1))

    def compose(pg: Gen, ph: Gen):
        ga, gb = byname[pg.name]
        ha, hb = byname[ph.name]
        sgn = -1 if (gb.deg * ha.deg) % 2 else 1
        return to_vec(compA(ga, ha), compB(gb, hb), sgn)

    grading = "Z" if A.grading == "Z" and B.grading == "Z" else "Z2"
    C = from_dg(objects, gens, differential, compose,
                A.monoid.join(B.monoid), cut, units, grading)
    return C, pairgen


def product_inclusion(A: AinfCategory, B: AinfCategory):
    """The strict bi-functor A x B -> A (x) B with components a x e, e x b.

    Returns (bi-functor, product category, pairing dict).
    """
    P, pairgen = dg_product(A, B)
    cut = P.cut

    def comps(xw: Word, yw: Word):
        if len(xw.gens) == 1 and not yw.gens:
            return {pairgen[(xw.gens[0], B.units[yw.src])]: Scalar.one(cut)}
        if not xw.gens and len(yw.gens) == 1:
            return {pairgen[(A.units[xw.src], yw.gens[0])]: Scalar.one(cut)}
        return {}

    F = BiFunctor(A, B, P, lambda a, b: (a, b), comps, name="incl")
    return F, P, pairgen


# ---------------------------------------------------------------------------
# Tri-modules: two left categories and one right category.  Slot order is
# (left1 word; left2 word; carrier element; right word).
# ---------------------------------------------------------------------------

def _default_triple(z):
    return (z.src[0], z.src[1], z.tgt)


class TriModule:
    """A module with two commuting left actions and one right action.

    `triple(z)` returns the object triple (c_a, c_b, c_r): left1 words end at
    c_a, left2 words end at c_b, right words start at c_r.  `nops` maps
    (xa word, xb word, element, y word) to a carrier vector.
    """

    def __init__(self, left1: AinfCategory, left2: AinfCategory,
                 right: AinfCategory, carrier, nops, cut=None, triple=None):
        self.left1 = left1
        self.left2 = left2
        self.right = right
        self.carrier = tuple(carrier)
        self.cut = frac(cut if cut is not None else
                        min(left1.cut, left2.cut, right.cut))
        self.triple = triple or _default_triple
        self._nops = nops
        self._cache: Dict[Tuple, Dict] = {}

    def n(self, xaw: Word, xbw: Word, z, yw: Word) -> Dict:
        key = (xaw.src, xaw.gens, xbw.src, xbw.gens, z, yw.src, yw.gens)
        if key not in self._cache:
            v = self._nops(xaw, xbw, z, yw) or {}
            self._cache[key] = vtrunc(v, self.cut)
        return self._cache[key]

    def n_vec(self, xaw: Word, xbw: Word, zvec: Dict, yw: Word,
              E=None) -> Dict:
        E = self.cut if E is None else frac(E)
        out: Dict = {}
        for z, c in zvec.items():
            out = vadd(out, vmul_coeff(self.n(xaw, xbw, z, yw),
                                       c.truncate(E)))
        return vtrunc(out, E)


def trimodule_residual(D: TriModule, xaw: Word, xbw: Word, z, yw: Word,
                       E=None) -> Dict:
    """The tri-module relation on (xa; xb; z; y).

    0 = sum (-1)^{deg'xa_pre + deg'xb_pre (1 + deg'xa_suf)}
            n(xa_pre; xb_pre; n(xa_suf; xb_suf; z; y_pre); y_suf)
      + n(dhat xa; xb; z; y) + (-1)^{deg'xa} n(xa; dhat xb; z; y)
      + (-1)^{deg'xa + deg'xb + deg z + 1} n(xa; xb; z; dhat y).
    """
    E = D.cut if E is None else frac(E)
    ag, bg, yg = xaw.gens, xbw.gens, yw.gens
    aobjs, bobjs, yobjs = xaw.objects(), xbw.objects(), yw.objects()
    out: Dict = {}
    for i in range(len(ag) + 1):
        suf_a = shifted_degree_slice(ag[i:])
        for j in range(len(bg) + 1):
            exp = (shifted_degree_slice(ag[:i])
                   + shifted_degree_slice(bg[:j]) * (1 + suf_a))
            sgn = -1 if exp % 2 else 1
            for k in range(len(yg) + 1):
                inner = D.n(Word(aobjs[i], ag[i:]), Word(bobjs[j], bg[j:]),
                            z, Word(yw.src, yg[:k]))
                if not inner:
                    continue
                v = D.n_vec(Word(xaw.src, ag[:i]), Word(xbw.src, bg[:j]),
                            inner, Word(yobjs[k], yg[k:]), E)
                out = vadd(out, vsign(v, sgn))
    for u, c in coderivation_apply(D.left1.m, xaw, E).items():
        out = vadd(out, vmul_coeff(D.n(u, xbw, z, yw), c))
    sgn = -1 if shifted_degree_slice(ag) % 2 else 1
    for u, c in coderivation_apply(D.left2.m, xbw, E).items():
        cc = c if sgn == 1 else -c
        out = vadd(out, vmul_coeff(D.n(xaw, u, z, yw), cc))
    exp = shifted_degree_slice(ag) + shifted_degree_slice(bg) + z.deg + 1
    sgn = -1 if exp % 2 else 1
    for u, c in coderivation_apply(D.right.m, yw, E).items():
        cc = c if sgn == 1 else -c
        out = vadd(out, vmul_coeff(D.n(xaw, xbw, z, u), cc))
    return vtrunc(out, E)


def check_trimodule(D: TriModule, E=None, word_bound: int = 1,
                    left_bound: Optional[int] = None) -> Report:
    """Verify the tri-module relation and degrees on all budget words."""
    E = D.cut if E is None else frac(E)
    lb = word_bound if left_bound is None else left_bound
    rep = Report()
    exact = (D.left1.grading == "Z" and D.left2.grading == "Z"
             and D.right.grading == "Z")
    for z in D.carrier:
        ca, cb, cr = D.triple(z)
        for xaw in D.left1.words(lb, tgt=ca):
            for xbw in D.left2.words(lb, tgt=cb):
                for yw in D.right.words(word_bound, src=cr):
                    r = trimodule_residual(D, xaw, xbw, z, yw, E)
                    if not viszero(r):
                        rep.add("trimodule", (xaw, xbw, z, yw), r)
                    expected = (z.deg + sum(g.deg for g in xaw.gens)
                                + sum(g.deg for g in xbw.gens)
                                + sum(g.deg for g in yw.gens) + 1
                                - len(xaw.gens) - len(xbw.gens)
                                - len(yw.gens))
                    for w in D.n(xaw, xbw, z, yw):
                        bad = (w.deg != expected) if exact else \
                            ((w.deg - expected) % 2 != 0)
                        if bad:
                            rep.add("trimodule-degree", (xaw, xbw, z, yw),
                                    None,
                                    f"output deg {w.deg}, expected {expected}")
    return rep


def swap_left_trimodule(D: TriModule, name: str = "") -> TriModule:
    """Exchange the two left slots with sign (-1)^{deg'xa deg'xb}."""

    def nops(xbw: Word, xaw: Word, z, yw: Word):
        exp = (shifted_degree_slice(xaw.gens)
               * shifted_degree_slice(xbw.gens))
        return vsign(D.n(xaw, xbw, z, yw), -1 if exp % 2 else 1)

    def triple(z):
        ca, cb, cr = D.triple(z)
        return (cb, ca, cr)

    return TriModule(D.left2, D.left1, D.right, D.carrier, nops,
                     cut=D.cut, triple=triple)


def shuffle_trimodule(A: AinfCategory, B: AinfCategory):
    """The tensor product of two strict DG categories as a tri-module.

    The carrier is the product category P = A (x) B acting on itself on the
    right; the two left actions interleave a-letters (as a x e) and
    b-letters (as e x b) over all shuffles with Koszul signs.  Returns
    (tri-module, product category, pairing dict).
    """
    P, pairgen = dg_product(A, B)

    def triple(z):
        return (z.src[0], z.src[1], z.tgt)

    def nops(xaw: Word, xbw: Word, z, yw: Word):
        ag, bg = xaw.gens, xbw.gens
        aobjs, bobjs = xaw.objects(), xbw.objects()
        if (aobjs[-1], bobjs[-1]) != z.src or yw.src != z.tgt:
            return {}
        na, nb = len(ag), len(bg)
        sdeg = [g.deg + 1 for g in ag] + [g.deg + 1 for g in bg]
        out: Dict = {}
        for positions in itertools.combinations(range(na + nb), na):
            # positions of the a-letters in the shuffled word
            perm = [0] * (na + nb)
            ia = ib = 0
            for slot in range(na + nb):
                if slot in positions:
                    perm[slot] = ia
                    ia += 1
                else:
                    perm[slot] = na + ib
                    ib += 1
            sgn = koszul_sign(sdeg, perm)
            letters = []
            pa = pb = 0
            for slot in range(na + nb):
                if slot in positions:
                    letters.append(pairgen[(ag[pa], B.units[bobjs[pb]])])
                    pa += 1
                else:
                    letters.append(pairgen[(A.units[aobjs[pa]], bg[pb])])
                    pb += 1
            w = Word((xaw.src, xbw.src), tuple(letters) + (z,) + yw.gens)
            if not w.is_composable():
                continue
            out = vadd(out, vsign(P.m(w), sgn))
        return out

    D = TriModule(A, B, P, P.gens, nops, triple=triple)
    return D, P, pairgen


def concat_trimodule(C: AinfCategory) -> TriModule:
    """Concatenation of all four slots through m.

    This satisfies the tri-module relation only when the two left words can
    never interact through nonzero products across their boundary (e.g. all
    non-unit products vanish); it serves as a solver oracle, not as a
    general construction.
    """

    def triple(z):
        return (z.src, z.src, z.tgt)

    def nops(xaw: Word, xbw: Word, z, yw: Word):
        gens = xaw.gens + xbw.gens + (z,) + yw.gens
        w = Word(xaw.src if xaw.gens else xbw.src, gens)
        if not w.is_composable():
            return {}
        return C.m(w)

    return TriModule(C, C, C, C.gens, nops, triple=triple)


# ---------------------------------------------------------------------------
# Correspondence solvers: feed bounding cochains into the left slots, then
# solve the cyclic-element equation in the induced right module.
# ---------------------------------------------------------------------------

def induced_right_module(D: TriModule, b1: Dict, b12: Dict,
                         max_insert: Optional[int] = None) -> RightModule:
    """The right module n(z; y) = sum n(b1 words; b12 words; z; y).

    The bounding letters have even shifted degree, so no signs appear.
    """
    cut = D.cut
    clouds1 = {obj: letter_cloud(b1.get(obj, {}), cut, max_insert)
               for obj in D.left1.objects}
    clouds2 = {obj: letter_cloud(b12.get(obj, {}), cut, max_insert)
               for obj in D.left2.objects}

    def nops(z, ygens):
        ca, cb, cr = D.triple(z)
        yw = Word(cr, tuple(ygens))
        out: Dict = {}
        for ag, cx in clouds1[ca]:
            for bg, cy in clouds2[cb]:
                v = D.n(Word(ca, ag), Word(cb, bg), z, yw)
                if v:
                    out = vadd(out, vmul_coeff(v, (cx * cy).truncate(cut)))
        return vtrunc(out, cut)

    return RightModule(D.right, D.carrier, nops, cut=cut)


def _transform_solve(D: TriModule, one: Dict, bL1: Dict, bL2: Dict, E=None,
                     max_insert: Optional[int] = None,
                     check_words: int = 2) -> Dict:
    for C, b, tag in ((D.left1, bL1, "first"), (D.left2, bL2, "second")):
        rep = check_mc(C, b)
        if not rep.ok:
            raise ValueError(
                f"the {tag} bounding cochain fails Maurer-Cartan: {rep}")
    M = induced_right_module(D, bL1, bL2, max_insert)
    rep = check_cyclic(M, one)
    if not rep.ok:
        raise ValueError(f"the element is not cyclic: {rep}")
    return solve_cyclic(M, one, E)


def geometric_transform(D: TriModule, one: Dict, b1: Dict, b12: Dict,
                        E=None, max_insert: Optional[int] = None) -> Dict:
    """Push a bounding cochain through a correspondence tri-module.

    Feeds b1 (first left slot) and b12 (second left slot) into D, then
    solves for the unique right-side bounding cochain b2 annihilating the
    cyclic element.  The solver re-verifies Maurer-Cartan for its output.
    """
    return _transform_solve(D, one, b1, b12, E, max_insert)


def compose_correspondence(D: TriModule, one: Dict, b12: Dict, b23: Dict,
                           E=None, max_insert: Optional[int] = None) -> Dict:
    """Compose two correspondences: same equation with index roles shifted."""
    return _transform_solve(D, one, b12, b23, E, max_insert)


# ---------------------------------------------------------------------------
# Derived tensor product of bi-modules
# ---------------------------------------------------------------------------

class TBasis(NamedTuple):
    """Basis element u (x) v_1 ... v_k (x) w of a derived tensor carrier."""
    u: object
    vgens: Tuple
    w: object
    deg: int


def t_basis(u, vgens, w) -> TBasis:
    # middle bar letters contribute deg - 1 so that the structure operations
    # are homogeneous of degree 1 - a - b (same parity as deg + 1)
    vgens = tuple(vgens)
    return TBasis(u, vgens, w,
                  u.deg + sum(g.deg - 1 for g in vgens) + w.deg)


def _require_strict(C: AinfCategory, role: str):
    for obj in C.objects:
        if not viszero(C.m(word(obj))):
            raise ValueError(
                f"the {role} category must be strict: curvature would "
                "lengthen the middle bar words past any finite budget")


def derived_tensor(D12: BiModule, D23: BiModule,
                   word_bound: int = 2) -> BiModule:
    """The derived tensor product over the common middle category.

    The carrier consists of u (x) v (x) w with u in D12, w in D23 and v a
    bar word of the middle category of length at most `word_bound`; the
    operations never lengthen v, so the truncated carrier is an honest
    sub-bi-module and all answers are exact.  The middle category must be
    strict.
    """
    C2 = D12.right
    if C2 is not D23.left:
        raise ValueError("middle categories do not match")
    _require_strict(C2, "middle")

    carrier = []
    for u in D12.carrier:
        c2 = D12.pair(u)[1]
        for vw in C2.words(word_bound, src=c2):
            for w in D23.carrier:
                if D23.pair(w)[0] == vw.tgt:
                    carrier.append(t_basis(u, vw.gens, w))

    def pair(t):
        return (D12.pair(t.u)[0], D23.pair(t.w)[1])

    def nops(xw: Word, t, yw: Word):
        u, vg, w = t.u, t.vgens, t.w
        c2 = D12.pair(u)[1]
        vobjs = Word(c2, vg).objects()
        out: Dict = {}
        if not yw.gens:
            # left action through D12, consuming a prefix of v
            for a in range(len(vg) + 1):
                mid = D12.n(xw, u, Word(c2, vg[:a]))
                for u2, c in mid.items():
                    t2 = t_basis(u2, vg[a:], w)
                    out = vadd(out, {t2: c})
        if not xw.gens:
            # right action through D23, consuming a suffix of v
            for a in range(len(vg) + 1):
                exp = u.deg + 1 + sum(g.deg + 1 for g in vg[:a])
                mid = D23.n(Word(vobjs[a], vg[a:]), w, yw)
                for w2, c in mid.items():
                    t2 = t_basis(u, vg[:a], w2)
                    out = vadd(out, {t2: c if exp % 2 == 0 else -c})
        if not xw.gens and not yw.gens:
            # middle bar differential
            for vw2, c in coderivation_apply(C2.m, Word(c2, vg),
                                             D12.cut).items():
                t2 = t_basis(u, vw2.gens, w)
                cc = c if (u.deg + 1) % 2 == 0 else -c
                out = vadd(out, {t2: cc})
        return out

    return BiModule(D12.left, D23.right, carrier, nops, pair=pair)


def tensor_bimodule_maps(f12: BiModuleMap, f23: BiModuleMap,
                         word_bound: int = 2, name: str = "",
                         source: Optional[BiModule] = None,
                         target: Optional[BiModule] = None) -> BiModuleMap:
    """f12 (x) f23 between derived tensor products.

    The component on x (x) (u (x) v (x) w) (x) y splits v into three chunks:
    the first joins f12's right word, the last joins f23's left word, and
    f23 crosses everything to its left with the Koszul sign
    (-1)^{deg f23 (deg'x + deg u + deg'vA + deg'vB)}.

    `source` / `target` may be supplied to reuse previously built derived
    tensor products (so that the results stay composable).
    """
    S = source or derived_tensor(f12.source, f23.source, word_bound)
    T = target or derived_tensor(f12.target, f23.target, word_bound)
    C2 = f12.source.right
    back = f23.degree % 2

    def comps(xw: Word, t, yw: Word):
        u, vg, w = t.u, t.vgens, t.w
        c2 = f12.source.pair(u)[1]
        vobjs = Word(c2, vg).objects()
        out: Dict = {}
        for a in range(len(vg) + 1):
            left = f12.f(xw, u, Word(c2, vg[:a]))
            if not left:
                continue
            for b in range(a, len(vg) + 1):
                exp = back * (shifted_degree_slice(xw.gens) + u.deg
                              + sum(g.deg + 1 for g in vg[:b]))
                right = f23.f(Word(vobjs[b], vg[b:]), w, yw)
                if not right:
                    continue
                for u2, cu in left.items():
                    for w2, cw in right.items():
                        t2 = t_basis(u2, vg[a:b], w2)
                        c = cu * cw
                        out = vadd(out, {t2: c if exp % 2 == 0 else -c})
        return out

    return BiModuleMap(S, T, f12.degree + f23.degree, comps,
                       name=name or f"({f12.name}(x){f23.name})")


def bimodule_map_delta(f: BiModuleMap, E=None,
                       name: str = "") -> BiModuleMap:
    """The hom-complex differential n' o fhat - (-1)^{deg f} f o dhat."""

    def comps(xw: Word, z, yw: Word):
        return bimodule_map_residual(f, xw, z, yw, E)

    return BiModuleMap(f.source, f.target, f.degree + 1, comps,
                       name=name or f"d({f.name})")


def tensor_unit_maps(F12: AinfFunctor, F23: AinfFunctor,
                     word_bound: int = 2):
    """Comparison maps for the derived tensor of two relative Yoneda modules.

    For strict functors F12: C1 -> C2 and F23: C2 -> C3 the relative Yoneda
    bimodule of the composite is homotopy equivalent to the derived tensor
    RYon(F12) (x)_{C2} RYon(F23).  Returns the triple (I, J, H) of bi-module
    maps realising the equivalence:

      * I: RYon(F23 o F12) -> tensor, degree 0, right components vanish;
        I(x; z) = e (x) Fhat12(x) (x) z.
      * J: tensor -> RYon(F23 o F12), degree 0, only the (0,0) component;
        J(u (x) v (x) w) = m(Fhat23(u . v), w).
      * H: tensor -> tensor, degree -1, only the (0,0) component;
        H(u (x) v (x) w) = e (x) (u . v) (x) w.

    The certificate identities (see check_tensor_units):
      * J o I = id holds exactly on the truncated carrier, at every
        component of the bi-comodule composition;
      * for each object pair the (0,0) components form a deformation
        retract of complexes: n00 H + H n00 = id - I00 J00, and I00, J00
        are chain maps for n00.  H lengthens the middle word by one, so
        the homotopy identity holds on carrier elements whose middle word
        is shorter than `word_bound`.
    """
    for F, role in ((F12, "first"), (F23, "second")):
        if not F.is_strict():
            raise ValueError(f"the {role} functor must be strict")
    C2, C3 = F12.target, F23.target
    D1 = relative_yoneda(compose_functors(F23, F12))
    D2 = derived_tensor(relative_yoneda(F12), relative_yoneda(F23),
                        word_bound)
    one = Scalar.one(C3.cut)

    def icomp(xw: Word, z, yw: Word):
        if yw.gens:
            return {}
        if not xw.gens:
            u = C2.units[F12.ob(D1.pair(z)[0])]
            return {t_basis(u, (), z): one}
        out: Dict = {}
        for vw, c in F12.fhat(xw).items():
            if len(vw.gens) > word_bound:
                continue
            out = vadd(out, {t_basis(C2.units[vw.src], vw.gens, z): c})
        return out

    def jcomp(xw: Word, t, yw: Word):
        if xw.gens or yw.gens:
            return {}
        u, vg, w = t.u, t.vgens, t.w
        out: Dict = {}
        for vw, c in F23.fhat(Word(u.src, (u,) + vg)).items():
            full = Word(vw.src, vw.gens + (w,))
            if not full.is_composable():
                continue
            out = vadd(out, vmul_coeff(C3.m(full), c))
        return out

    def hcomp(xw: Word, t, yw: Word):
        if xw.gens or yw.gens:
            return {}
        u, vg, w = t.u, t.vgens, t.w
        if len(vg) + 1 > word_bound:
            return {}
        return {t_basis(C2.units[u.src], (u,) + vg, w): one}

    I = BiModuleMap(D1, D2, 0, icomp, name="I")
    J = BiModuleMap(D2, D1, 0, jcomp, name="J")
    H = BiModuleMap(D2, D2, -1, hcomp, name="H")
    return I, J, H


def _n00(D: BiModule, z):
    c1, c2 = D.pair(z)
    return D.n(Word(c1, ()), z, Word(c2, ()))


def _f00(f: BiModuleMap, z):
    c1, c2 = f.source.pair(z)
    return f.f(Word(c1, ()), z, Word(c2, ()))


def _f00_vec(f: BiModuleMap, vec: Dict) -> Dict:
    out: Dict = {}
    for z, c in vec.items():
        out = vadd(out, vmul_coeff(_f00(f, z), c))
    return out


def composition_bifunctor_objects(F12: AinfFunctor, F23: AinfFunctor,
                                  word_bound: int = 2):
    """Object-level composition of two functors with its tensor certificate.

    Returns (F13, (I, J, H)) where F13 = F23 o F12 and the triple exhibits
    the relative Yoneda bi-module of F13 as a deformation retract of the
    derived tensor of the two relative Yoneda bi-modules.
    """
    F13 = compose_functors(F23, F12)
    return F13, tensor_unit_maps(F12, F23, word_bound)


def check_tensor_units(I: BiModuleMap, J: BiModuleMap, H: BiModuleMap,
                       word_bound: int = 2) -> Report:
    """Verify the certificate identities for a tensor_unit_maps triple.

    Checks, on every budget word of the truncated carriers:
      * J o I = id as bi-module maps (all components);
      * I00 and J00 are chain maps for the (0,0) differentials;
      * n00 H00 + H00 n00 = id - I00 J00 on carrier elements whose middle
        word has room to grow by one letter.
    """
    rep = Report()
    D1, D2 = I.source, I.target
    one = Scalar.one(D1.right.cut)
    JI = compose_bimodule_maps(J, I)
    ident = identity_bimodule_map(D1)
    for z in D1.carrier:
        c1, c3 = D1.pair(z)
        for xw in D1.left.words(word_bound, tgt=c1):
            for yw in D1.right.words(word_bound, src=c3):
                got = JI.f(xw, z, yw)
                want = ident.f(xw, z, yw)
                if got != want:
                    rep.add("tensor-units-JI", (xw, z, yw),
                            vadd(got, vneg(want)))
    for z in D1.carrier:
        r = _f00_vec(I, _n00(D1, z))
        for t, c in _f00(I, z).items():
            r = vadd(r, vneg(vmul_coeff(_n00(D2, t), c)))
        if not viszero(r):
            rep.add("tensor-units-I-chain", z, r)
    for t in D2.carrier:
        r = _f00_vec(J, _n00(D2, t))
        for z, c in _f00(J, t).items():
            r = vadd(r, vneg(vmul_coeff(_n00(D1, z), c)))
        if not viszero(r):
            rep.add("tensor-units-J-chain", t, r)
    bound = max(len(t.vgens) for t in D2.carrier) if D2.carrier else 0
    for t in D2.carrier:
        if len(t.vgens) >= bound:
            continue
        lhs = _f00_vec(H, _n00(D2, t))
        for t2, c in _f00(H, t).items():
            lhs = vadd(lhs, vmul_coeff(_n00(D2, t2), c))
        rhs = vadd({t: one}, vneg(_f00_vec(I, _f00(J, t))))
        r = vadd(lhs, vneg(rhs))
        if not viszero(r):
            rep.add("tensor-units-homotopy", t, r)
    return rep


# ---------------------------------------------------------------------------
# Derived hom
# ---------------------------------------------------------------------------

class EBasis(NamedTuple):
    """Elementary functional v (x) z_1 ... z_k |-> d in a hom carrier."""
    v: object
    zgens: Tuple
    d: object
    deg: int


def e_basis(v, zgens, d) -> EBasis:
    # a functional's degree is output minus input; the input bar letters
    # contribute deg - 1, dual to the derived-tensor convention, so that
    # the structure operations are homogeneous of degree 1 - a - b
    zgens = tuple(zgens)
    return EBasis(v, zgens, d, d.deg - v.deg - sum(g.deg - 1 for g in zgens))


def derived_hom(D12: BiModule, D32: BiModule,
                word_bound: int = 2) -> BiModule:
    """The hom of bi-modules over the common right category.

    For D12 a left C1 / right C2 and D32 a left C3 / right C2 bi-module
    this is the left C3 / right C1 bi-module of functionals
    D12|_{c2}(c1) (x) B_k C2[1](c2, c2') -> D32|_{c2'}(c3).  The carrier
    consists of the elementary functionals with input bar word of length
    at most `word_bound`.  All operations lengthen the input word, so the
    truncated carrier is an honest quotient bi-module and every answer is
    exact; a functional whose input word already exceeds the budget cannot
    be acted on and raises instead.  The common right category must be
    strict.

    The operations transpose the three blocks of structure terms:
      * left C1 words act through D12 on the (v, prefix) input, with the
        sign (-1)^{deg' f + deg' x};
      * right C3 words act through D32 on the output, consuming a suffix
        of the input word, sign-free;
      * the (0, 0) differential combines both of those with empty words
        (the output part sign-free, the input part with (-1)^{deg' f})
        plus the transposed bar differential of the input word with the
        sign (-1)^{deg f + deg v}.
    """
    C2 = D12.right
    if C2 is not D32.right:
        raise ValueError("right categories do not match")
    _require_strict(C2, "common right")
    C3 = D32.left

    carrier = []
    for v in D12.carrier:
        c2 = D12.pair(v)[1]
        for zw in C2.words(word_bound, src=c2):
            for d in D32.carrier:
                if D32.pair(d)[1] == zw.tgt:
                    carrier.append(e_basis(v, zw.gens, d))

    def pair(f):
        return (D32.pair(f.d)[0], D12.pair(f.v)[0])

    def nops(hw: Word, f, xw: Word):
        if len(f.zgens) > word_bound:
            raise ValueError(
                "word budget exceeded: this functional needs word_bound"
                f" >= {len(f.zgens)} (got {word_bound})")
        if hw.gens and xw.gens:
            return {}
        v, zg, d = f.v, f.zgens, f.d
        c1, c2 = D12.pair(v)
        room = word_bound - len(zg)
        out: Dict = {}

        def input_term(xword: Word, exp: int):
            # D12 acting on (v2, prefix), transposed onto the input slot
            o: Dict = {}
            for v2 in D12.carrier:
                a, b = D12.pair(v2)
                if a != xword.tgt:
                    continue
                for p in C2.words(room, src=b):
                    if p.tgt != c2:
                        continue
                    coeff = D12.n(xword, v2, p).get(v)
                    if coeff:
                        f2 = e_basis(v2, p.gens + zg, d)
                        o = vadd(o, {f2: coeff if exp % 2 == 0 else -coeff})
            return o

        def output_term(hword: Word, exp: int):
            # D32 acting on the output, consuming an input suffix
            o: Dict = {}
            for s in C2.words(room, src=D32.pair(d)[1]):
                for d2, c in D32.n(hword, d, s).items():
                    f2 = e_basis(v, zg + s.gens, d2)
                    o = vadd(o, {f2: c if exp % 2 == 0 else -c})
            return o

        if xw.gens:
            out = input_term(xw, 1 + f.deg + shifted_degree_slice(xw.gens))
        elif hw.gens:
            out = output_term(hw, 0)
        else:
            out = vadd(output_term(Word(D32.pair(d)[0], ()), 0),
                       input_term(Word(c1, ()), 1 + f.deg))
            if zg:
                # transposed bar differential of the input word
                exp = f.deg + v.deg
                for zp in C2.words(word_bound, src=c2):
                    cod = coderivation_apply(C2.m, zp, D12.cut)
                    coeff = cod.get(Word(c2, zg))
                    if coeff:
                        f2 = e_basis(v, zp.gens, d)
                        out = vadd(out,
                                   {f2: coeff if exp % 2 == 0 else -coeff})
        return out

    return BiModule(C3, D12.left, carrier, nops, pair=pair)


def hom_unit_maps(F12: AinfFunctor, F23: AinfFunctor,
                  word_bound: int = 2):
    """Comparison maps for the derived hom of two Yoneda-type bi-modules.

    For strict functors F12: C1 -> C2 and F23: C2 -> C3 the adjoint
    relative Yoneda bi-module of the composite is homotopy equivalent to
    derived_hom(RYon(F12), RYon*(F23)).  Returns the triple (I, J, H):

      * I: RYon*(F23 o F12) -> hom, degree 0, with the sign (-1)^{deg u};
        I(x; u; y)(v; z) = m(x . u . Fhat23(Fhat12(y)) . Fhat23(v . z)).
      * J: hom -> RYon*(F23 o F12), degree 0, only the (0,0) component;
        J picks the value at (e; ()), sign-free.
      * H: hom -> hom, degree -1, only the (0,0) component;
        H(f)(v; z) = (-1)^{deg f} f(e; v . z).

    The certificate identities (see check_hom_units) mirror the tensor
    case: J o I = id exactly at every component, and per object pair the
    (0,0) components form a deformation retract of complexes.
    """
    for F, role in ((F12, "first"), (F23, "second")):
        if not F.is_strict():
            raise ValueError(f"the {role} functor must be strict")
    C2, C3 = F12.target, F23.target
    D12 = relative_yoneda(F12)
    D32 = adjoint_relative_yoneda(F23)
    DH = derived_hom(D12, D32, word_bound)
    D1 = adjoint_relative_yoneda(compose_functors(F23, F12))
    one = Scalar.one(C3.cut)

    def icomp(hw: Word, u, yw: Word):
        if hw.gens and yw.gens:
            return {}
        # bar word x . u . Fhat23(Fhat12(y)) . Fhat23(v . z) fed to m
        tails: Dict = {}
        if yw.gens:
            for mw, cm in F12.fhat(yw).items():
                for vw2, c2 in F23.fhat(mw).items():
                    tails = vadd(tails, {vw2: cm * c2})
        else:
            tails = {Word(F23.ob(F12.ob(yw.src)), ()): one}
        out: Dict = {}
        for v in D12.carrier:
            if v.src != F12.ob(yw.tgt):
                continue
            for zw in C2.words(word_bound, src=v.tgt):
                for vw, c in F23.fhat(Word(v.src, (v,) + zw.gens)).items():
                    for tail, ct in tails.items():
                        full = Word(hw.src,
                                    hw.gens + (u,) + tail.gens + vw.gens)
                        if not full.is_composable():
                            continue
                        for d, cm in C3.m(full).items():
                            f2 = e_basis(v, zw.gens, d)
                            cc = c * ct * cm
                            out = vadd(out,
                                       {f2: cc if u.deg % 2 == 0 else -cc})
        return out

    def jcomp(hw: Word, f, yw: Word):
        if hw.gens or yw.gens:
            return {}
        c1 = DH.pair(f)[1]
        if f.v == C2.units[F12.ob(c1)] and not f.zgens:
            return {f.d: one}
        return {}

    def hcomp(hw: Word, f, yw: Word):
        if hw.gens or yw.gens:
            return {}
        c1 = DH.pair(f)[1]
        if f.v == C2.units[F12.ob(c1)] and f.zgens:
            f2 = e_basis(f.zgens[0], f.zgens[1:], f.d)
            return {f2: one if f.deg % 2 == 0 else -one}
        return {}

    I = BiModuleMap(D1, DH, 0, icomp, name="I")
    J = BiModuleMap(DH, D1, 0, jcomp, name="J")
    H = BiModuleMap(DH, DH, -1, hcomp, name="H")
    return I, J, H


def check_hom_units(I: BiModuleMap, J: BiModuleMap, H: BiModuleMap,
                    word_bound: int = 2) -> Report:
    """Verify the certificate identities for a hom_unit_maps triple.

    Checks, on every budget word of the truncated carriers:
      * J o I = id as bi-module maps (all components);
      * I00 and J00 are chain maps for the (0,0) differentials;
      * n00 H00 + H00 n00 = id - I00 J00 on carrier functionals whose
        input word has room to shrink (H shortens the input word by one,
        the differential lengthens it).
    """
    rep = Report()
    D1, DH = I.source, I.target
    one = Scalar.one(D1.right.cut)
    JI = compose_bimodule_maps(J, I)
    ident = identity_bimodule_map(D1)
    for u in D1.carrier:
        c3, c1 = D1.pair(u)
        for hw in D1.left.words(word_bound, tgt=c3):
            for yw in D1.right.words(word_bound, src=c1):
                got = JI.f(hw, u, yw)
                want = ident.f(hw, u, yw)
                if got != want:
                    rep.add("hom-units-JI", (hw, u, yw),
                            vadd(got, vneg(want)))
    for u in D1.carrier:
        r = _f00_vec(I, _n00(D1, u))
        for f, c in _f00(I, u).items():
            r = vadd(r, vneg(vmul_coeff(_n00(DH, f), c)))
        if not viszero(r):
            rep.add("hom-units-I-chain", u, r)
    bound = max(len(f.zgens) for f in DH.carrier) if DH.carrier else 0
    for f in DH.carrier:
        r = _f00_vec(J, _n00(DH, f))
        for u, c in _f00(J, f).items():
            r = vadd(r, vneg(vmul_coeff(_n00(D1, u), c)))
        if not viszero(r):
            rep.add("hom-units-J-chain", f, r)
        if len(f.zgens) >= bound:
            continue
        lhs = _f00_vec(H, _n00(DH, f))
        for f2, c in _f00(H, f).items():
            lhs = vadd(lhs, vmul_coeff(_n00(DH, f2), c))
        rhs = vadd({f: one}, vneg(_f00_vec(I, _f00(J, f))))
        r = vadd(lhs, vneg(rhs))
        if not viszero(r):
            rep.add("hom-units-homotopy", f, r)
    return rep
