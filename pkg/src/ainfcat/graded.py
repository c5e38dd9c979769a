"""Graded bases, bar words, the Koszul sign engine, and (co)derivation calculus.

Conventions (single source of truth for all signs in this package):
  * deg'(x) = deg(x) + 1; every structure operation has degree +1 for deg'.
  * The coderivation extension of a table m is
        dhat(x_1 ... x_n) = sum_l (-1)^{deg'x_1+...+deg'x_{l-1}}
                            x_1 ... m(x_l ... x_{l+k-1}) ... x_n
    including arity-0 insertions at every position.
  * A cohomomorphism (functor) extension carries no signs:
        Fhat(x_1 ... x_n) = sum over block decompositions of
                            F(block_1) x ... x F(block_m),
    where empty blocks contribute F_0 (positive valuation, so the sum is
    finite modulo the energy cut).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Dict, NamedTuple, Optional, Tuple

from .novikov import Scalar, frac


class Gen(NamedTuple):
    """A basis generator of the hom module from src to tgt."""

    name: str
    deg: int
    src: object
    tgt: object


class Word(NamedTuple):
    """A bar word: consecutive letters; src fixes the object for empty words."""

    src: object
    gens: Tuple[Gen, ...]

    @property
    def tgt(self):
        return self.gens[-1].tgt if self.gens else self.src

    def __len__(self):
        return len(self.gens)

    def objects(self) -> Tuple:
        """The object path c_0, ..., c_k."""
        return (self.src,) + tuple(g.tgt for g in self.gens)

    def is_composable(self) -> bool:
        at = self.src
        for g in self.gens:
            if g.src != at:
                return False
            at = g.tgt
        return True


def word(src, gens=()) -> Word:
    return Word(src, tuple(gens))


def shifted_degree(w: Word) -> int:
    return sum(g.deg + 1 for g in w.gens)


def shifted_degree_slice(gens) -> int:
    return sum(g.deg + 1 for g in gens)


def epsilon(gens) -> int:
    """eps(x) = sum_{i<j} deg'(x_i) deg'(x_j); the OP-reversal sign exponent."""
    total = 0
    degs = [g.deg + 1 for g in gens]
    for i in range(len(degs)):
        for j in range(i + 1, len(degs)):
            total += degs[i] * degs[j]
    return total


def op_reverse(w: Word) -> Tuple[int, Word]:
    """Reverse a bar word, returning ((-1)^eps, reversed word).

    The reversed word's letters keep their generators; it is a word of the
    opposite category (path endpoints swap roles), so no path validation is
    applied here.
    """
    sign = -1 if epsilon(w.gens) % 2 else 1
    rev = Word(w.tgt, tuple(reversed(w.gens)))
    return sign, rev


def comult_splits(w: Word):
    """All k+1 two-sided splittings of a bar word, empty halves included."""
    out = []
    for i in range(len(w.gens) + 1):
        left = Word(w.src, w.gens[:i])
        right = Word(left.tgt, w.gens[i:])
        out.append((left, right))
    return out


def koszul_sign(shifted_degs, permutation) -> int:
    """Sign of permuting graded items: (-1)^(sum over inversions of products).

    `permutation[i]` is the source index of the item landing in slot i.
    """
    if sorted(permutation) != list(range(len(shifted_degs))):
        raise ValueError("not a permutation")
    exp = 0
    for a in range(len(permutation)):
        for b in range(a + 1, len(permutation)):
            if permutation[a] > permutation[b]:
                exp += shifted_degs[permutation[a]] * shifted_degs[permutation[b]]
    return -1 if exp % 2 else 1


# ---------------------------------------------------------------------------
# Vectors: finite maps generator -> coefficient (Scalar or any duck-typed ring
# element).  Missing keys are zero; stored coefficients are nonzero.
# ---------------------------------------------------------------------------

def vclean(v: Dict) -> Dict:
    return {k: c for k, c in v.items() if not c.is_zero()}


def vadd(a: Dict, b: Dict) -> Dict:
    out = dict(a)
    for k, c in b.items():
        if k in out:
            s = out[k] + c
            if s.is_zero():
                del out[k]
            else:
                out[k] = s
        else:
            out[k] = c
    return out


def vneg(a: Dict) -> Dict:
    return {k: -c for k, c in a.items()}


def vscale(a: Dict, q) -> Dict:
    q = frac(q)
    if q == 0:
        return {}
    return {k: c.scale(q) for k, c in a.items()}


def vmul_coeff(a: Dict, s) -> Dict:
    """Multiply every coefficient by the ring element s."""
    if s.is_zero():
        return {}
    return vclean({k: c * s for k, c in a.items()})


def vtrunc(a: Dict, E) -> Dict:
    return vclean({k: c.truncate(E) for k, c in a.items()})


def viszero(a: Dict) -> bool:
    return not a


def vsign(a: Dict, sign: int) -> Dict:
    return a if sign == 1 else vneg(a)


def letter_cloud(v: Dict, cut, max_insert: Optional[int] = None):
    """All words in the letters of the vector v with product coefficients.

    Returns a list of (letters, coeff) pairs including the empty word with
    coefficient 1, pruned by truncation at the cut.  The letters must carry
    positive valuation so that the enumeration terminates.
    """
    cut = frac(cut)
    v = vclean(v)
    if max_insert is None:
        minval = None
        for c in v.values():
            val = c.valuation()
            if val is None:
                continue
            if val <= 0:
                raise ValueError("letter_cloud requires positive valuation")
            minval = val if minval is None else min(minval, val)
        max_insert = 0 if minval is None else int(cut / minval) + 1
    cloud = [((), Scalar.one(cut))]
    frontier = cloud[:]
    for _ in range(max_insert):
        nxt = []
        for letters, coeff in frontier:
            for g, c in v.items():
                t = (coeff * c).truncate(cut)
                if t.is_zero():
                    continue
                nxt.append((letters + (g,), t))
        if not nxt:
            break
        cloud.extend(nxt)
        frontier = nxt
    return cloud


# ---------------------------------------------------------------------------
# Coderivation and cohomomorphism extensions.  Operation tables are callables
# Word -> Vector (missing entries: empty dict).
# ---------------------------------------------------------------------------

def table_fn(table: Dict[Tuple, Dict]) -> Callable[[Word], Dict]:
    def fn(w: Word) -> Dict:
        return table.get((w.src, w.gens), {})
    return fn


def coderivation_apply(m: Callable[[Word], Dict], w: Word, E) -> Dict[Word, object]:
    """Apply the coderivation extension of m to a bar word.

    Returns a bar vector: {Word: coefficient}, truncated at E.
    """
    out: Dict[Word, object] = {}
    objs = w.objects()
    n = len(w.gens)
    for i in range(n + 1):
        sgn = -1 if shifted_degree_slice(w.gens[:i]) % 2 else 1
        for j in range(i, n + 1):
            sub = Word(objs[i], w.gens[i:j])
            if j == i and objs[i] != objs[j]:
                continue
            v = m(sub)
            if not v:
                continue
            for g, c in v.items():
                cc = c.truncate(E)
                if cc.is_zero():
                    continue
                if sgn == -1:
                    cc = -cc
                nw = Word(w.src, w.gens[:i] + (g,) + w.gens[j:])
                if nw in out:
                    s = out[nw] + cc
                    if s.is_zero():
                        del out[nw]
                    else:
                        out[nw] = s
                else:
                    out[nw] = cc
    return out


def bar_vector_apply(m: Callable[[Word], Dict], bv: Dict[Word, object], E) -> Dict[Word, object]:
    """Extend coderivation_apply linearly to a bar vector."""
    out: Dict[Word, object] = {}
    for w, c in bv.items():
        for nw, nc in coderivation_apply(m, w, E).items():
            t = (nc * c).truncate(E)
            if t.is_zero():
                continue
            if nw in out:
                s = out[nw] + t
                if s.is_zero():
                    del out[nw]
                else:
                    out[nw] = s
            else:
                out[nw] = t
    return out


def cohom_apply(component: Callable[[Word], Dict], obmap: Callable[[object], object],
                w: Word, E, max_empty: Optional[int] = None,
                f0_valuation: Optional[Fraction] = None) -> Dict[Word, object]:
    """Apply the cohomomorphism extension of a functor's components to a word.

    `component(word)` gives the hom-valued table entry F_k on a (possibly
    empty) word; empty words query F_0 at that object.  `obmap` sends source
    objects to target objects.  Returns a bar vector over target words.

    Empty blocks (F_0 insertions) are bounded: if f0_valuation (the minimal
    valuation of any nonzero F_0) is None, F_0 is identically zero and no
    empty blocks are inserted; otherwise at most E/f0_valuation insertions
    can survive the truncation.
    """
    E = frac(E)
    if max_empty is None:
        if f0_valuation is None:
            max_empty = 0
        else:
            if f0_valuation <= 0:
                raise ValueError("F_0 must have positive valuation")
            max_empty = int(E / f0_valuation) + 1

    objs = w.objects()
    n = len(w.gens)

    def insert_empties(states, pos):
        # states: list of (letters tuple, coeff); allow up to max_empty F_0
        # blocks at object objs[pos].
        if max_empty == 0:
            return states
        f0 = component(Word(objs[pos], ()))
        if not f0:
            return states
        out = list(states)
        frontier = states
        for _ in range(max_empty):
            nxt = []
            for letters, coeff in frontier:
                for g, c in f0.items():
                    t = (coeff * c).truncate(E)
                    if t.is_zero():
                        continue
                    nxt.append((letters + (g,), t))
            if not nxt:
                break
            out.extend(nxt)
            frontier = nxt
        return out

    # Dynamic programming over the letter index.
    start_coeff = _unit_like_of(component, w, E)
    states = {0: [((), start_coeff)]}
    results = []
    for i in range(n + 1):
        if i not in states:
            continue
        cur = insert_empties(states[i], i)
        if i == n:
            results = cur
            continue
        for j in range(i + 1, n + 1):
            block = Word(objs[i], w.gens[i:j])
            v = component(block)
            if not v:
                continue
            nxt = states.setdefault(j, [])
            for letters, coeff in cur:
                for g, c in v.items():
                    t = (coeff * c).truncate(E)
                    if t.is_zero():
                        continue
                    nxt.append((letters + (g,), t))
    out: Dict[Word, object] = {}
    for letters, coeff in results:
        nw = Word(obmap(w.src), letters)
        if nw in out:
            s = out[nw] + coeff
            if s.is_zero():
                del out[nw]
            else:
                out[nw] = s
        else:
            out[nw] = coeff
    return out


def _unit_like_of(component, w, E):
    """A multiplicative unit compatible with the coefficient ring in use."""
    # Probe any table entry to learn the ring; default to Scalar.
    probe = None
    objs = w.objects()
    n = len(w.gens)
    for i in range(n + 1):
        for j in range(i, n + 1):
            v = component(Word(objs[i], w.gens[i:j]))
            if v:
                probe = next(iter(v.values()))
                break
        if probe is not None:
            break
    if probe is not None and hasattr(probe, "ring_one"):
        return probe.ring_one()
    return Scalar.one(E)
