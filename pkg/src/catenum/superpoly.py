"""Super-commutative polynomials with rational coefficients.

Every tensor in the engine (symmetric outputs, vertex tensors, products of
vertex decorations living on several graph vertices at once) is stored as a
polynomial in graded-commuting generators.  A generator is a tuple

    (copy, kind, basis, upow)

where ``copy`` tags which graph vertex it belongs to (0 for a finished
tensor), ``kind`` is SUSP (an odd bookkeeping symbol, one per vertex),
INPUT (the coordinate dual to basis element ``basis`` times u**upow,
upow >= 1) or OUTPUT (basis element times u**upow, upow <= 0).

A polynomial is a dict {monomial: Fraction}; a monomial is a sorted tuple of
generators in which odd generators occur at most once.  Signs from
reordering are applied eagerly, so equal elements have equal dicts.
"""

from fractions import Fraction
from itertools import product

SUSP, INPUT, OUTPUT = 0, 1, 2
ONE = ()


class SuperAlgebra:
    """Parity bookkeeping for one underlying basis (one mixed complex)."""

    def __init__(self, basis_parity):
        self.basis_parity = tuple(int(p) & 1 for p in basis_parity)

    def parity(self, var):
        kind = var[1]
        if kind == SUSP:
            return 1
        p = self.basis_parity[var[2]]
        return p ^ 1 if kind == INPUT else p

    def mono_parity(self, mono):
        par = self.parity
        s = 0
        for v in mono:
            s ^= par(v)
        return s

    def poly_parity(self, poly):
        """Parity of a homogeneous polynomial (None for zero, ValueError if mixed)."""
        ps = {self.mono_parity(m) for m in poly}
        if len(ps) > 1:
            raise ValueError("polynomial is not parity-homogeneous")
        return ps.pop() if ps else None

    def split_parity(self, poly):
        out = ({}, {})
        for m, c in poly.items():
            out[self.mono_parity(m)][m] = c
        return out

    # -- canonical form ---------------------------------------------
    def canon(self, seq):
        """Sort generators; return (sign, monomial) or (0, None) if it vanishes."""
        seq = list(seq)
        par = self.parity
        odd = [par(v) for v in seq]
        sign = 1
        # insertion sort keeps track of odd/odd transpositions
        for i in range(1, len(seq)):
            j = i
            while j > 0 and seq[j - 1] > seq[j]:
                if odd[j - 1] and odd[j]:
                    sign = -sign
                seq[j - 1], seq[j] = seq[j], seq[j - 1]
                odd[j - 1], odd[j] = odd[j], odd[j - 1]
                j -= 1
        for i in range(1, len(seq)):
            if odd[i] and seq[i] == seq[i - 1]:
                return 0, None
        return sign, tuple(seq)

    def monomial(self, seq, coeff=1):
        s, m = self.canon(seq)
        return {m: Fraction(coeff) * s} if s else {}

    # -- ring operations --------------------------------------------
    def mul(self, p, q):
        out = {}
        for m1, c1 in p.items():
            for m2, c2 in q.items():
                s, m = self.canon(m1 + m2)
                if s:
                    out[m] = out.get(m, 0) + s * c1 * c2
        return clean(out)

    def mul_many(self, polys):
        out = {ONE: Fraction(1)}
        for p in polys:
            out = self.mul(out, p)
        return out

    # -- derivatives --------------------------------------------------
    def deriv(self, poly, var):
        """Left derivative d/d(var)."""
        pv = self.parity(var)
        out = {}
        for m, c in poly.items():
            s = 0
            for i, v in enumerate(m):
                if v == var:
                    sign = -1 if (pv and s) else 1
                    rest = m[:i] + m[i + 1:]
                    out[rest] = out.get(rest, 0) + sign * c
                s ^= self.parity(v)
        return clean(out)

    def derivation(self, poly, image, odd):
        """Apply the derivation sending each generator v to image(v) (a poly or None)."""
        out = {}
        for m, c in poly.items():
            s = 0
            for i, v in enumerate(m):
                img = image(v)
                if img:
                    sign = -1 if (odd and s) else 1
                    left, right = m[:i], m[i + 1:]
                    for mi, ci in img.items():
                        t, mm = self.canon(left + mi + right)
                        if t:
                            out[mm] = out.get(mm, 0) + sign * t * c * ci
                s ^= self.parity(v)
        return clean(out)

    def contract(self, poly, coeff, first=None):
        """Apply sum_{v,w} coeff(v, w) d/dw d/dv (d/dv acts first).

        ``first`` optionally filters the generators v that may be hit first.
        If ``coeff`` has an ``ends`` attribute ((copy, kind), (copy, kind)),
        only generators with those tags are paired.
        """
        out = {}
        par = self.parity
        kcache = {}
        ends = getattr(coeff, "ends", None)
        for m, c in poly.items():
            ps = [par(v) for v in m]
            n = len(m)
            pre = [0] * (n + 1)
            for i in range(n):
                pre[i + 1] = pre[i] ^ ps[i]
            if ends is None:
                left = right = range(n)
            else:
                left = [i for i in range(n) if m[i][:2] == ends[0]]
                if not left:
                    continue
                right = [j for j in range(n) if m[j][:2] == ends[1]]
            for i in left:
                v = m[i]
                if first is not None and not first(v):
                    continue
                s1 = ps[i] and pre[i]
                for j in right:
                    if j == i:
                        continue
                    w = m[j]
                    k = kcache.get((v, w))
                    if k is None:
                        k = kcache[(v, w)] = coeff(v, w)
                    if not k:
                        continue
                    # parity of the generators left of j once v is removed
                    before = pre[j] ^ (ps[i] if i < j else 0)
                    val = k * c
                    if s1 != (ps[j] and before):
                        val = -val
                    rest = m[:i] + m[i + 1:j] + m[j + 1:] if i < j else m[:j] + m[j + 1:i] + m[i + 1:]
                    out[rest] = out.get(rest, 0) + val
        return clean(out)

    # -- substitutions ------------------------------------------------
    def relabel(self, poly, fn):
        """Rename generators by fn (parity preserving) and re-sort."""
        out = {}
        for m, c in poly.items():
            s, mm = self.canon([fn(v) for v in m])
            if s:
                out[mm] = out.get(mm, 0) + s * c
        return clean(out)

    def substitute(self, poly, image):
        """Algebra map sending generator v to image(v) (even, parity preserving)."""
        out = {}
        cache = {}
        for m, c in poly.items():
            factors = []
            for v in m:
                if v not in cache:
                    cache[v] = image(v)
                factors.append(cache[v])
            if any(not f for f in factors):
                continue
            for choice in product(*[list(f.items()) for f in factors]):
                seq = []
                coeff = c
                for mono, k in choice:
                    seq.extend(mono)
                    coeff = coeff * k
                s, mm = self.canon(seq)
                if s:
                    out[mm] = out.get(mm, 0) + s * coeff
        return clean(out)


def clean(p):
    return {m: (c if type(c) is Fraction else Fraction(c)) for m, c in p.items() if c}


def add(p, q, c=1):
    out = dict(p)
    for m, v in q.items():
        out[m] = out.get(m, 0) + c * v
    return clean(out)


def iadd(acc, q, c=1):
    """acc += c * q in place (zeros are left for a final ``clean``)."""
    for m, v in q.items():
        acc[m] = acc.get(m, 0) + c * v
    return acc


def scale(p, c):
    c = Fraction(c)
    return clean({m: c * v for m, v in p.items()})


def degree(mono, kind=None):
    if kind is None:
        return len(mono)
    return sum(1 for v in mono if v[1] == kind)


def filter_poly(poly, pred):
    return {m: c for m, c in poly.items() if pred(m)}


def output_var(basis, upow=0, copy=0):
    return (copy, OUTPUT, basis, upow)


def input_var(basis, upow=1, copy=0):
    return (copy, INPUT, basis, upow)


def susp_var(copy=0):
    return (copy, SUSP, 0, 0)
