"""Shared example structures: the three standard fixtures and random families.

FIX-1: one object, hom basis {e}, unital m_2, curvature m_0(1) = T e  (Z/2).
FIX-2: one object, basis e (deg 0) / x (deg 1) / y (deg 2), unital m_2,
       m_2(x,x) = -y, curvature m_0(1) = T y, monoid <1/2, 1>.
       b = T^{1/2} x is a bounding cochain.
FIX-3: the ring Q[t]/(t^2) with t in degree 0, imported as a DG category.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .novikov import GapMonoid, Scalar, frac
from .graded import Gen, Word, word
from .ainf_core import AinfCategory, from_dg


def unital_m2_table(obj, e, gens, cut, extra=None):
    """Table with the unit relations for m_2 plus optional extra entries."""
    one = Scalar.one(cut)
    table = dict(extra or {})
    for g in gens:
        if g == e:
            continue
        table[(obj, (e, g))] = {g: one}
        table[(obj, (g, e))] = {g: one if g.deg % 2 == 0 else -one}
    table[(obj, (e, e))] = {e: one}
    return table


def fix1(cut=3):
    obj = "o"
    e = Gen("e", 0, obj, obj)
    cut = frac(cut)
    table = unital_m2_table(obj, e, [e], cut)
    table[(obj, ())] = {e: Scalar.monomial(1, 1, cut)}
    return AinfCategory([obj], [e], table, GapMonoid([1]), cut,
                        units={obj: e}, grading="Z2")


def fix2(cut=3):
    obj = "o"
    e = Gen("e", 0, obj, obj)
    x = Gen("x", 1, obj, obj)
    y = Gen("y", 2, obj, obj)
    cut = frac(cut)
    one = Scalar.one(cut)
    table = unital_m2_table(obj, e, [e, x, y], cut)
    table[(obj, (x, x))] = {y: -one}
    table[(obj, ())] = {y: Scalar.monomial(1, 1, cut)}
    return AinfCategory([obj], [e, x, y], table, GapMonoid(["1/2", 1]), cut,
                        units={obj: e}, grading="Z")


def fix2_strict(cut=3):
    """The strict cousin of FIX-2: same products, no curvature.

    Useful as a deterministic base for twisted modules, where strictness of
    the base algebra is required.
    """
    obj = "o"
    e = Gen("e", 0, obj, obj)
    x = Gen("x", 1, obj, obj)
    y = Gen("y", 2, obj, obj)
    cut = frac(cut)
    one = Scalar.one(cut)
    table = unital_m2_table(obj, e, [e, x, y], cut)
    table[(obj, (x, x))] = {y: -one}
    return AinfCategory([obj], [e, x, y], table, GapMonoid(["1/2", 1]), cut,
                        units={obj: e}, grading="Z")


def fix2_bounding(C=None):
    """The bounding cochain b = T^{1/2} x of FIX-2."""
    C = C or fix2()
    x = next(g for g in C.gens if g.name == "x")
    return {"o": {x: Scalar.monomial(Fraction(1, 2), 1, C.cut)}}


def fix3(cut=3):
    """Q[t]/(t^2), t of degree 0, zero differential, as a DG import."""
    obj = "o"
    e = Gen("e", 0, obj, obj)
    t = Gen("t", 0, obj, obj)
    cut = frac(cut)
    one = Scalar.one(cut)

    def diff(g):
        return {}

    def compose(g, h):  # g o h in the commutative ring Q[t]/(t^2)
        if g == e:
            return {h: one}
        if h == e:
            return {g: one}
        return {}  # t*t = 0

    return from_dg([obj], [e, t], diff, compose, GapMonoid([1]), cut,
                   units={obj: e}, grading="Z")


def group_ring_z2(cut=3):
    """Q[Z/2] as a one-object DG category: basis e, g with g*g = e."""
    obj = "o"
    e = Gen("e", 0, obj, obj)
    g = Gen("g", 0, obj, obj)
    cut = frac(cut)
    one = Scalar.one(cut)

    def diff(a):
        return {}

    def compose(a, b):
        if a == e:
            return {b: one}
        if b == e:
            return {a: one}
        return {e: one}  # g o g = e

    return from_dg([obj], [e, g], diff, compose, GapMonoid([1]), cut,
                   units={obj: e}, grading="Z")


def random_strict_unital(rng: random.Random, n_extra=2, n_monoid=2, cut=2,
                         grading="Z2"):
    """A random strict unital one-object algebra (Z/2-graded).

    Generated as the deformation-friendly family: unit relations exactly, and
    random higher products built from a random DG algebra structure
    (associative by construction) so check_ainf passes.
    """
    obj = "o"
    e = Gen("e", 0, obj, obj)
    extras = []
    for i in range(n_extra):
        # always keep at least one odd generator so bounding cochains exist
        deg = 1 if i == 0 else rng.choice([0, 1])
        extras.append(Gen(f"g{i}", deg, obj, obj))
    gens = [e] + extras
    gen_list = [1, Fraction(1, 2), Fraction(2, 3), Fraction(3, 2)]
    monoid = GapMonoid(rng.sample(gen_list, k=n_monoid))
    cut = frac(cut)
    one = Scalar.one(cut)

    # Random strictly-associative product on the non-unit part: make the
    # product of two non-unit generators a random multiple of a fixed
    # "top" generator that multiplies to zero with everything non-unit.
    # (x*y)*z = 0 = x*(y*z) then holds automatically.
    top = extras[-1]

    def compose(a, b):  # a o b
        if a == e:
            return {b: one}
        if b == e:
            return {a: one}
        if a == top or b == top:
            return {}
        if (a.deg + b.deg - top.deg) % 2:
            return {}  # keep the Z/2 degree discipline
        q = rng.choice([0, 1, -1, 2])
        if q == 0:
            return {}
        lam = rng.choice(monoid.generators + (Fraction(0),))
        if lam >= cut:
            return {}
        return {top: Scalar.monomial(lam, q, cut)}

    cache = {}

    def compose_cached(a, b):
        key = (a, b)
        if key not in cache:
            cache[key] = compose(a, b)
        return cache[key]

    table = {}
    for a in gens:
        for b in gens:
            # m_2(x, y) = (-1)^{deg x(deg y+1)} y o x
            sgn = -1 if (a.deg * (b.deg + 1)) % 2 else 1
            w = compose_cached(b, a)
            entry = {k: (c if sgn == 1 else -c) for k, c in w.items()}
            if entry:
                table[(obj, (a, b))] = entry
    C = AinfCategory([obj], gens, table, monoid, cut, units={obj: e},
                     grading=grading)
    return C


def _stable_coeff(rng, key):
    return rng.choice([0, 1, -1, 2])


def random_bounding(rng: random.Random, C: AinfCategory, levels=2):
    """A random degree-1 (mod 2) positive-valuation assignment for deform."""
    obj = C.objects[0]
    cands = [g for g in C.gens if g.deg % 2 == 1 and g != C.units.get(obj)]
    if not cands:
        return {}
    out = {}
    exps = [lam for lam in C.monoid.elements_below(C.cut) if lam > 0]
    v = {}
    for g in rng.sample(cands, k=min(len(cands), 2)):
        terms = []
        for lam in rng.sample(exps, k=min(len(exps), levels)):
            q = rng.choice([1, -1, 2])
            terms.append((lam, q))
        s = Scalar(terms, C.cut)
        if not s.is_zero():
            v[g] = s
    if v:
        out[obj] = v
    return out
