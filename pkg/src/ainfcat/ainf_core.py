"""Curved filtered A-infinity categories as finite data, with validators.

A category holds a finite object set, graded hom bases per ordered object
pair, a sparse structure-operation table (possibly lazily evaluated), a gap
monoid, an energy cut, and optional unit designations.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Tuple

from .novikov import GapMonoid, Scalar, frac
from .graded import (Gen, Word, word, shifted_degree, shifted_degree_slice,
                     epsilon, vadd, vneg, vscale, vmul_coeff, vtrunc, vclean,
                     viszero, coderivation_apply, table_fn, letter_cloud)


class Violation:
    """A single failed identity, with enough context to locate it."""

    def __init__(self, kind: str, where, residual=None, detail: str = ""):
        self.kind = kind
        self.where = where
        self.residual = residual
        self.detail = detail

    def __repr__(self):
        extra = f" residual={self.residual}" if self.residual else ""
        det = f" ({self.detail})" if self.detail else ""
        return f"<{self.kind} at {self.where}{extra}{det}>"


class Report:
    """Outcome of a validator: a (possibly empty) list of violations."""

    def __init__(self, violations: Optional[List[Violation]] = None):
        self.violations = violations or []

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind, where, residual=None, detail=""):
        self.violations.append(Violation(kind, where, residual, detail))

    def merge(self, other: "Report"):
        self.violations.extend(other.violations)

    def __repr__(self):
        if self.ok:
            return "<Report OK>"
        return f"<Report {len(self.violations)} violations: {self.violations[:4]}...>"


class AinfCategory:
    """Finite-data curved filtered A-infinity category."""

    def __init__(self, objects, gens: Iterable[Gen], ops, monoid: GapMonoid,
                 cut, units: Optional[Dict] = None, grading: str = "Z"):
        self.objects = tuple(objects)
        self.gens = tuple(gens)
        self.monoid = monoid
        self.cut = frac(cut)
        self.units = dict(units or {})
        if grading not in ("Z", "Z2"):
            raise ValueError("grading must be 'Z' or 'Z2'")
        self.grading = grading
        self._hom: Dict[Tuple, List[Gen]] = {}
        for g in self.gens:
            self._hom.setdefault((g.src, g.tgt), []).append(g)
        if isinstance(ops, dict):
            self._ops_dict = ops
            self._ops_fn = table_fn(ops)
        else:
            self._ops_dict = None
            self._ops_fn = ops
        self._cache: Dict[Tuple, Dict] = {}

    # -- structure access ---------------------------------------------------

    def hom(self, src, tgt) -> List[Gen]:
        return self._hom.get((src, tgt), [])

    def unit_of(self, obj) -> Gen:
        if obj not in self.units:
            raise KeyError(f"no unit declared for object {obj!r}")
        return self.units[obj]

    def unit_vector(self, obj) -> Dict:
        return {self.unit_of(obj): Scalar.one(self.cut)}

    def m(self, w: Word) -> Dict:
        """The structure operation applied to a basis bar word."""
        key = (w.src, w.gens)
        if key in self._cache:
            return self._cache[key]
        v = vtrunc(self._ops_fn(w) or {}, self.cut)
        self._cache[key] = v
        return v

    def m_vec(self, ws: Dict[Word, object], E=None) -> Dict:
        """m extended linearly to a bar vector, landing in hom vectors."""
        E = self.cut if E is None else frac(E)
        out: Dict = {}
        for w, c in ws.items():
            out = vadd(out, vmul_coeff(self.m(w), c.truncate(E)))
        return vtrunc(out, E)

    def m_on_vectors(self, factors, src=None, E=None) -> Dict:
        """Apply m_k multilinearly to a list of hom vectors.

        Each factor is a vector {Gen: coeff}; all monomial combinations with
        composable paths contribute.
        """
        E = self.cut if E is None else frac(E)
        out: Dict = {}
        for combo in itertools.product(*[f.items() for f in factors]):
            gens = tuple(g for g, _ in combo)
            w = Word(gens[0].src if gens else src, gens)
            if not w.is_composable():
                continue
            coeff = None
            for _, c in combo:
                coeff = c if coeff is None else coeff * c
            if coeff is None:
                coeff = Scalar.one(E)
            out = vadd(out, vmul_coeff(self.m(w), coeff.truncate(E)))
        return vtrunc(out, E)

    # -- word enumeration ---------------------------------------------------

    def words(self, max_len: int, src=None, tgt=None):
        """All composable basis words with length <= max_len."""
        starts = [src] if src is not None else list(self.objects)
        for s in starts:
            frontier = [word(s)]
            if tgt is None or s == tgt:
                yield word(s)
            for _ in range(max_len):
                nxt = []
                for w in frontier:
                    for g in self.gens:
                        if g.src == w.tgt:
                            nw = Word(w.src, w.gens + (g,))
                            nxt.append(nw)
                            if tgt is None or nw.tgt == tgt:
                                yield nw
                frontier = nxt

    def materialize(self, max_len: int) -> Dict[Tuple, Dict]:
        """Evaluate the (possibly lazy) op table on all words up to max_len."""
        out = {}
        for w in self.words(max_len):
            v = self.m(w)
            if v:
                out[(w.src, w.gens)] = v
        return out

    def with_ops(self, ops, **kw) -> "AinfCategory":
        return AinfCategory(self.objects, self.gens, ops, self.monoid,
                           kw.get("cut", self.cut), self.units, self.grading)


# ---------------------------------------------------------------------------
# Validators
# ---------------------------------------------------------------------------

def ainf_residual(C: AinfCategory, w: Word, E) -> Dict:
    """sum (-1)^{deg'x_1+..+deg'x_i} m(x_1..x_i, m(x_{i+1}..x_{i+k2}), ..x_k)."""
    E = frac(E)
    objs = w.objects()
    n = len(w.gens)
    out: Dict = {}
    for i in range(n + 1):
        sgn = -1 if shifted_degree_slice(w.gens[:i]) % 2 else 1
        for j in range(i, n + 1):
            inner = C.m(Word(objs[i], w.gens[i:j]))
            if not inner:
                continue
            for g, c in inner.items():
                outer = Word(w.src, w.gens[:i] + (g,) + w.gens[j:])
                v = C.m(outer)
                if not v:
                    continue
                coeff = c.truncate(E)
                if sgn == -1:
                    coeff = -coeff
                out = vadd(out, vmul_coeff(v, coeff))
    return vtrunc(out, E)


def check_ainf(C: AinfCategory, E=None, word_bound: int = 3) -> Report:
    """Verify the A-infinity relation on all basis words up to word_bound."""
    E = C.cut if E is None else frac(E)
    rep = Report()
    for w in C.words(word_bound):
        r = ainf_residual(C, w, E)
        if not viszero(r):
            rep.add("ainf", w, r)
    # Output degree: deg m_k(x_1..x_k) = sum deg(x_i) + 2 - k (exact in Z mode,
    # mod 2 in Z/2 mode; the parity agrees with the deg' bookkeeping).
    for w in C.words(word_bound):
        expected = sum(g.deg for g in w.gens) + 2 - len(w.gens)
        for g, c in C.m(w).items():
            bad = (g.deg != expected) if C.grading == "Z" else ((g.deg - expected) % 2 != 0)
            if bad:
                rep.add("degree", w, None,
                        f"output {g.name} has deg {g.deg}, expected {expected}")
    # curvature discipline: m_0 only on the diagonal and positive valuation
    for obj in C.objects:
        m0 = C.m(word(obj))
        for g, c in m0.items():
            if g.src != obj or g.tgt != obj:
                rep.add("curvature-offdiagonal", obj, m0)
            v = c.valuation()
            if v is not None and v <= 0:
                rep.add("curvature-valuation", obj, m0,
                        "m_0 must vanish modulo T^epsilon")
    return rep


def check_unital(C: AinfCategory, word_bound: int = 3) -> Report:
    rep = Report()
    if not C.units:
        rep.add("units-undeclared", None)
        return rep
    for obj, e in C.units.items():
        if e.deg != 0 or e.src != obj or e.tgt != obj:
            rep.add("unit-shape", obj)
        if not viszero(C.m(word(obj, (e,)))):
            rep.add("unit-m1", obj, C.m(word(obj, (e,))))
    for g in C.gens:
        e_l = C.units.get(g.src)
        e_r = C.units.get(g.tgt)
        one = Scalar.one(C.cut)
        if e_l is not None:
            got = C.m(word(g.src, (e_l, g)))
            if got != {g: one}:
                rep.add("unit-left", g, got)
        if e_r is not None:
            got = C.m(word(g.src, (g, e_r)))
            want = {g: one if g.deg % 2 == 0 else -one}
            if got != want:
                rep.add("unit-right", g, got)
    # higher insertions of units vanish
    for w in C.words(word_bound):
        if len(w.gens) == 2:
            continue
        if any(g == C.units.get(g.src) and g.src == g.tgt for g in w.gens):
            if not viszero(C.m(w)):
                rep.add("unit-higher", w, C.m(w))
    return rep


def check_gapped(C: AinfCategory, word_bound: int = 3) -> Report:
    rep = Report()
    strict = True
    for w in C.words(word_bound):
        v = C.m(w)
        if len(w.gens) == 0 and not viszero(v):
            strict = False
        for g, c in v.items():
            for e in c.exponents():
                if e not in C.monoid:
                    rep.add("gap", w, None, f"exponent {e} not in monoid")
    rep.strict = strict
    return rep


# ---------------------------------------------------------------------------
# Constructions
# ---------------------------------------------------------------------------

def r_reduction(C: AinfCategory) -> AinfCategory:
    """Keep only the energy-zero part of every operation."""
    def ops(w: Word):
        v = C.m(w)
        out = {}
        for g, c in v.items():
            c0 = c.coefficient(0)
            if c0 != 0:
                out[g] = Scalar.const(c0, C.cut)
        return out
    return C.with_ops(ops)


def opposite(C: AinfCategory) -> AinfCategory:
    """The opposite category: m^op(x_1..x_k) = (-1)^{eps+1} m(x_k..x_1)."""
    def flip(g: Gen) -> Gen:
        return Gen(g.name, g.deg, g.tgt, g.src)

    op_gens = tuple(flip(g) for g in C.gens)
    op_units = {obj: flip(e) for obj, e in C.units.items()}

    def ops(w: Word):
        orig_gens = tuple(flip(g) for g in reversed(w.gens))
        ow = Word(orig_gens[0].src if orig_gens else w.src, orig_gens)
        v = C.m(ow)
        if not v:
            return {}
        sgn = -1 if (epsilon(orig_gens) + 1) % 2 else 1
        out = {flip(g): (c if sgn == 1 else -c) for g, c in v.items()}
        return out

    if C._ops_dict is not None:
        table = {}
        for (src, gens), v in C._ops_dict.items():
            orig = Word(src, gens)
            rev_gens = tuple(flip(g) for g in reversed(gens))
            sgn = -1 if (epsilon(gens) + 1) % 2 else 1
            key_src = rev_gens[0].src if rev_gens else src
            entry = {flip(g): (c if sgn == 1 else -c) for g, c in v.items()}
            if entry:
                table[(key_src, rev_gens)] = entry
        return AinfCategory(C.objects, op_gens, table, C.monoid, C.cut,
                           op_units, C.grading)
    return AinfCategory(C.objects, op_gens, ops, C.monoid, C.cut,
                       op_units, C.grading)


def from_dg(objects, gens, differential: Callable[[Gen], Dict],
            compose: Callable[[Gen, Gen], Dict], monoid: GapMonoid, cut,
            units=None, grading: str = "Z") -> AinfCategory:
    """Import a DG category: m_1 = d, m_2(x,y) = (-1)^{deg x(deg y+1)} y o x.

    `compose(g, h)` must return the composition g o h (g after h) as a hom
    vector.  All higher operations vanish.  The construction is re-checked.
    """
    table: Dict[Tuple, Dict] = {}
    for g in gens:
        v = vclean(differential(g) or {})
        if v:
            table[(g.src, (g,))] = v
    for x in gens:
        for y in gens:
            if x.tgt != y.src:
                continue
            v = vclean(compose(y, x) or {})  # y o x
            if not v:
                continue
            sgn = -1 if (x.deg * (y.deg + 1)) % 2 else 1
            if sgn == -1:
                v = vneg(v)
            table[(x.src, (x, y))] = v
    C = AinfCategory(objects, gens, table, monoid, cut, units, grading)
    rep = check_ainf(C, word_bound=3)
    if not rep.ok:
        raise ValueError(f"from_dg input is not a DG category: {rep}")
    return C


def deform(C: AinfCategory, b: Dict, max_insert: Optional[int] = None) -> AinfCategory:
    """Deform by a degree-1 positive-valuation assignment object -> hom vector.

    m^b(x_1..x_k) = sum over insertions of b-letters into every gap,
    truncated at the cut.  If b solves Maurer-Cartan everywhere the result is
    strict.
    """
    b = {obj: vclean(v) for obj, v in b.items() if not viszero(vclean(v))}
    minval = None
    for obj, v in b.items():
        for g, c in v.items():
            odd_ok = (g.deg % 2 == 1) if C.grading == "Z2" else (g.deg == 1)
            if not odd_ok:
                raise ValueError("bounding assignments must be degree 1")
            val = c.valuation()
            if val is None:
                continue
            if val <= 0:
                raise ValueError("bounding assignments must have positive valuation")
            minval = val if minval is None else min(minval, val)
    if max_insert is None:
        max_insert = 0 if minval is None else int(C.cut / minval) + 1

    # Precompute, per object, the "cloud" of b-letter insertions with their
    # coefficients (all words in the letters of b[obj], coefficients the
    # products, pruned by the truncation).
    clouds: Dict = {obj: letter_cloud(b.get(obj, {}), C.cut, max_insert)
                    for obj in C.objects}

    def ops(w: Word):
        objs = w.objects()
        n = len(w.gens)
        out: Dict = {}
        states = [((), Scalar.one(C.cut))]
        for i in range(n + 1):
            grown = []
            for letters, coeff in states:
                for ins, c in clouds.get(objs[i], [((), Scalar.one(C.cut))]):
                    t = (coeff * c).truncate(C.cut)
                    if t.is_zero():
                        continue
                    grown.append((letters + ins, t))
            if i < n:
                states = [(letters + (w.gens[i],), coeff) for letters, coeff in grown]
            else:
                states = grown
        for letters, coeff in states:
            v = C.m(Word(w.src, letters))
            if v:
                out = vadd(out, vmul_coeff(v, coeff))
        return vtrunc(out, C.cut)

    return C.with_ops(ops)
