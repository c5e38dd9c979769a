"""Maurer-Cartan checking, right modules, cyclic elements, and the solver.

A right module over a one-object algebra carries operations
    n_k : D (x) C^{(x) k} -> D
satisfying
    0 = sum n(n(y; x_1..x_j); x_{j+1}..x_k)
      + sum (-1)^{deg'y + deg'x_1 + ... + deg'x_p}
            n(y; x_1..x_p, m(x_{p+1}..x_q), x_{q+1}..x_k),
with arity-0 insertions of the curvature included in the second sum.

A cyclic element is a degree-0 carrier vector whose pairing x -> n_1(1; x)
is invertible modulo Lambda_+ and with n_0(1) of positive valuation.  The
solver produces the unique gapped bounding cochain b with
sum_k n_k(1; b,...,b) = 0 modulo the cut, level by level in energy.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Optional, Tuple

from .novikov import Scalar, SingularReduction, frac, rational_inverse
from .graded import (Gen, Word, word, shifted_degree_slice, letter_cloud,
                     vadd, vclean, vmul_coeff, vneg, vtrunc, viszero)
from .ainf_core import AinfCategory, Report, deform


# ---------------------------------------------------------------------------
# Maurer-Cartan
# ---------------------------------------------------------------------------

def _as_object_dict(C: AinfCategory, b) -> Dict:
    """Normalize b to {object: hom vector}; plain vectors are keyed by src."""
    if not b:
        return {}
    first = next(iter(b))
    if isinstance(first, Gen):
        out: Dict = {}
        for g, c in b.items():
            out.setdefault(g.src, {})[g] = c
        return out
    return {obj: dict(v) for obj, v in b.items()}


def mc_residual(C: AinfCategory, b, E=None) -> Dict:
    """sum_k m_k(b,...,b) per object, truncated at E."""
    E = C.cut if E is None else frac(E)
    bd = _as_object_dict(C, b)
    out: Dict = {}
    for obj in C.objects:
        cloud = letter_cloud(bd.get(obj, {}), E)
        acc: Dict = {}
        for letters, coeff in cloud:
            v = C.m(Word(obj, letters))
            if v:
                acc = vadd(acc, vmul_coeff(v, coeff.truncate(E)))
        acc = vtrunc(acc, E)
        if acc:
            out[obj] = acc
    return out


def check_mc(C: AinfCategory, b, E=None) -> Report:
    """Verify that b solves the Maurer-Cartan equation mod T^E."""
    E = C.cut if E is None else frac(E)
    rep = Report()
    bd = _as_object_dict(C, b)
    for obj, v in bd.items():
        for g, c in vclean(v).items():
            deg_ok = (g.deg == 1) if C.grading == "Z" else (g.deg % 2 == 1)
            if not deg_ok:
                rep.add("mc-degree", g, None, "b must be degree 1")
            val = c.valuation()
            if val is not None and val <= 0:
                rep.add("mc-valuation", g, None,
                        "b must have positive valuation")
    if not rep.ok:
        return rep
    for obj, res in mc_residual(C, b, E).items():
        rep.add("mc", obj, res)
    return rep


# ---------------------------------------------------------------------------
# Right modules
# ---------------------------------------------------------------------------

class RightModule:
    """A right filtered module over a one-object algebra.

    `nops` maps (carrier generator, tuple of algebra generators) to a carrier
    vector; it may be a dict keyed by those pairs or a callable.
    """

    def __init__(self, algebra: AinfCategory, carrier, nops, cut=None):
        if len(algebra.objects) != 1:
            raise ValueError("RightModule algebra must have a single object")
        self.algebra = algebra
        self.obj = algebra.objects[0]
        self.carrier = tuple(carrier)
        self.cut = frac(cut if cut is not None else algebra.cut)
        if isinstance(nops, dict):
            self._nops_dict = nops

            def fn(ygen, xgens):
                return nops.get((ygen, tuple(xgens)), {})
            self._nops_fn = fn
        else:
            self._nops_dict = None
            self._nops_fn = nops
        self._cache: Dict[Tuple, Dict] = {}

    def n(self, ygen: Gen, xgens) -> Dict:
        key = (ygen, tuple(xgens))
        if key not in self._cache:
            v = self._nops_fn(ygen, tuple(xgens)) or {}
            self._cache[key] = vtrunc(v, self.cut)
        return self._cache[key]

    def n_vec(self, yvec: Dict, xgens, E=None) -> Dict:
        """n extended linearly over the carrier slot."""
        E = self.cut if E is None else frac(E)
        out: Dict = {}
        for y, c in yvec.items():
            out = vadd(out, vmul_coeff(self.n(y, xgens), c.truncate(E)))
        return vtrunc(out, E)

    def twist_apply(self, yvec: Dict, b, E=None) -> Dict:
        """n_0^b(y) = sum_k n_k(y; b,...,b) for an algebra hom vector b."""
        E = self.cut if E is None else frac(E)
        bv = b if not b or isinstance(next(iter(b)), Gen) else b.get(self.obj, {})
        out: Dict = {}
        for letters, coeff in letter_cloud(bv, E):
            out = vadd(out, vmul_coeff(self.n_vec(yvec, letters, E), coeff))
        return vtrunc(out, E)


def module_residual(M: RightModule, ygen: Gen, xgens, E=None) -> Dict:
    """The defining relation of a right module evaluated on (y; x_1..x_k)."""
    E = M.cut if E is None else frac(E)
    C = M.algebra
    xgens = tuple(xgens)
    k = len(xgens)
    out: Dict = {}
    # n after n: inner block starts at y
    for j in range(k + 1):
        inner = M.n(ygen, xgens[:j])
        for z, c in inner.items():
            out = vadd(out, vmul_coeff(M.n(z, xgens[j:]), c.truncate(E)))
    # m inserted in the algebra slots, sign over everything to its left
    for p in range(k + 1):
        sgn = -1 if (ygen.deg + 1 + shifted_degree_slice(xgens[:p])) % 2 else 1
        for q in range(p, k + 1):
            innm = C.m(Word(M.obj, xgens[p:q]))
            for g, c in innm.items():
                v = M.n(ygen, xgens[:p] + (g,) + xgens[q:])
                if not v:
                    continue
                coeff = c.truncate(E)
                if sgn == -1:
                    coeff = -coeff
                out = vadd(out, vmul_coeff(v, coeff))
    return vtrunc(out, E)


def check_module(M: RightModule, E=None, word_bound: int = 3) -> Report:
    """Verify the right-module relation on all words up to word_bound."""
    E = M.cut if E is None else frac(E)
    rep = Report()
    for y in M.carrier:
        for w in M.algebra.words(word_bound):
            r = module_residual(M, y, w.gens, E)
            if not viszero(r):
                rep.add("module", (y, w), r)
    return rep


# ---------------------------------------------------------------------------
# Cyclic elements and the solver
# ---------------------------------------------------------------------------

def _pairing_reduction(M: RightModule, one: Dict):
    """The rational matrix of x -> n_1(1; x) mod Lambda_+.

    Rows are carrier generators, columns algebra generators.
    """
    cols = list(M.algebra.gens)
    rows = list(M.carrier)
    mat = []
    for y in rows:
        row = []
        for x in cols:
            v = M.n_vec(one, (x,))
            row.append(v.get(y, Scalar.zero(M.cut)).reduction())
        mat.append(row)
    return rows, cols, mat


def check_cyclic(M: RightModule, one: Dict) -> Report:
    """Verify the two conditions for a cyclic element."""
    rep = Report()
    rows, cols, mat = _pairing_reduction(M, one)
    if len(rows) != len(cols):
        rep.add("cyclic-shape", None, None,
                f"carrier rank {len(rows)} != algebra rank {len(cols)}")
        return rep
    try:
        rational_inverse(mat)
    except SingularReduction:
        rep.add("cyclic-pairing", None, None,
                "n_1(1; .) is not invertible modulo Lambda_+")
    n0 = M.n_vec(one, ())
    for g, c in n0.items():
        val = c.valuation()
        if val is not None and val <= 0:
            rep.add("cyclic-n0", g, n0, "n_0(1) must vanish modulo Lambda_+")
    return rep


def solve_cyclic(M: RightModule, one: Dict, E=None) -> Dict:
    """The unique gapped bounding cochain b with sum_k n_k(1; b..b) = 0 mod T^E.

    Solved by the level-by-level recursion: with L0 the ground reduction of
    x -> n_1(1; x), iterate b <- b - L0^{-1} r(b) where
    r(b) = sum_k n_k(1; b,...,b); the valuation of r strictly increases.
    The output is re-verified (Maurer-Cartan and the defining equation).
    """
    E = M.cut if E is None else frac(E)
    rep = check_cyclic(M, one)
    if not rep.ok:
        raise ValueError(f"not a cyclic element: {rep}")
    rows, cols, mat = _pairing_reduction(M, one)
    inv = rational_inverse(mat)
    minpos = M.algebra.monoid.min_positive()
    if minpos is None or minpos <= 0:
        raise ValueError("gap monoid has no positive generator")
    max_iter = int(E / minpos) + 2

    b: Dict = {}
    for _ in range(max_iter):
        r = M.twist_apply(one, b, E)
        if viszero(r):
            break
        # delta_x = sum_y inv[x][y] * r_y;   b <- b - delta
        delta: Dict = {}
        for i, x in enumerate(cols):
            acc = Scalar.zero(E)
            for j, y in enumerate(rows):
                c = r.get(y)
                if c is not None and inv[i][j] != 0:
                    acc = acc + c.scale(inv[i][j])
            if not acc.is_zero():
                delta[x] = acc
        if not delta:
            raise ValueError("solver stalled: residual outside the pairing image")
        b = vtrunc(vadd(b, vneg(delta)), E)
    r = M.twist_apply(one, b, E)
    if not viszero(r):
        raise ValueError(f"solver did not converge; residual {r}")
    for g, c in b.items():
        deg_ok = (g.deg == 1) if M.algebra.grading == "Z" else (g.deg % 2 == 1)
        if not deg_ok:
            raise ValueError(f"solver output has a degree-{g.deg} component {g}")
        val = c.valuation()
        if val is not None and val <= 0:
            raise ValueError("solver output has non-positive valuation")
    mc = check_mc(M.algebra, {M.obj: b}, E)
    if not mc.ok:
        raise ValueError(f"solver output fails Maurer-Cartan: {mc}")
    return b


# ---------------------------------------------------------------------------
# Pushforward and module twisting
# ---------------------------------------------------------------------------

def pushforward(F, b, obj=None, E=None) -> Dict:
    """F_*(b) = sum_k F_k(b,...,b), including the k = 0 obstruction term.

    `F` must provide `source`, `target`, and `f(word) -> target hom vector`
    (the multilinear component on a basis word).
    """
    C = F.source
    E = C.cut if E is None else frac(E)
    bd = _as_object_dict(C, b)
    if obj is None:
        if len(bd) != 1:
            raise ValueError("specify the object when b is empty or spread out")
        obj = next(iter(bd))
    out: Dict = {}
    for letters, coeff in letter_cloud(bd.get(obj, {}), E):
        v = F.f(Word(obj, letters))
        if v:
            out = vadd(out, vmul_coeff(v, coeff.truncate(E)))
    return vtrunc(out, E)


def deform_module(M: RightModule, b, E=None):
    """The twisted differential n_0^b(y) = sum_k n_k(y; b,...,b).

    Requires b to solve Maurer-Cartan; the squared differential is checked
    on the carrier basis.
    """
    E = M.cut if E is None else frac(E)
    mc = check_mc(M.algebra, b, E)
    if not mc.ok:
        raise ValueError(f"b fails Maurer-Cartan: {mc}")

    def nb(yvec: Dict) -> Dict:
        return M.twist_apply(yvec, b, E)

    for y in M.carrier:
        sq = nb(nb({y: Scalar.one(E)}))
        if not viszero(sq):
            raise ValueError(f"twisted differential does not square to zero on {y}")
    return nb


def twisted_module(C: AinfCategory, b) -> Tuple[RightModule, AinfCategory]:
    """The module M_b over deform(C, b): b inserted only to the right of y.

        n_k(y; x_1..x_k) = sum m(y, b^{l_0}, x_1, b^{l_1}, ..., x_k, b^{l_k})

    Returns (module, deformed algebra).  The carrier is the hom basis of C.
    The base algebra must be strict: a nonzero curvature of C would enter its
    defining relation through insertions to the left of the module slot, and
    those have no counterpart in the module operations.
    """
    if len(C.objects) != 1:
        raise ValueError("twisted_module needs a one-object algebra")
    obj = C.objects[0]
    if not viszero(C.m(word(obj))):
        raise ValueError("twisted_module requires a strict base algebra")
    D = deform(C, b)
    bd = _as_object_dict(C, b)
    cloud = letter_cloud(bd.get(obj, {}), C.cut)

    def nops(ygen, xgens):
        out: Dict = {}
        states = [((), Scalar.one(C.cut))]
        for i in range(len(xgens) + 1):
            grown = []
            for letters, coeff in states:
                for ins, c in cloud:
                    t = (coeff * c).truncate(C.cut)
                    if not t.is_zero():
                        grown.append((letters + ins, t))
            if i < len(xgens):
                states = [(letters + (xgens[i],), coeff)
                          for letters, coeff in grown]
            else:
                states = grown
        for letters, coeff in states:
            v = C.m(Word(obj, (ygen,) + letters))
            if v:
                out = vadd(out, vmul_coeff(v, coeff))
        return vtrunc(out, C.cut)

    return RightModule(D, C.gens, nops), D


def self_module(C: AinfCategory) -> RightModule:
    """A strict algebra acting on itself: n_k(y; x) = m_{k+1}(y, x)."""
    if len(C.objects) != 1:
        raise ValueError("self_module needs a one-object algebra")
    obj = C.objects[0]

    def nops(ygen, xgens):
        return C.m(Word(obj, (ygen,) + tuple(xgens)))

    return RightModule(C, C.gens, nops)
