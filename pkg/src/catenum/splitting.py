"""Chain-level splittings R = id + R_1 u + ..., their inverses, and the
operators built from them: the homotopy H and its symmetrization, the circle
operators S and F, and the Givental propagator."""

import json
from fractions import Fraction

from .linalg import SparseMatrix, commutator
from .mixed_complex import (OUTPUT, SymTensor, TruncationError, UVector,
                            ValidationReport, _parse_scalar)
from .superpoly import scale


class USeries:
    """id + A_1 u + ... + A_N u^N acting on a fixed complex."""

    def __init__(self, complex_, components):
        self.complex = complex_
        n = complex_.dim
        comps = []
        for i, m in enumerate(components, start=1):
            if m.shape != (n, n):
                raise ValueError(f"component {i} has shape {m.shape}, expected {(n, n)}")
            comps.append(m)
        self.components = tuple(comps)
        self._id = SparseMatrix.identity(n)

    @property
    def truncation(self):
        return len(self.components)

    def __getitem__(self, i):
        if i == 0:
            return self._id
        if i < 0:
            raise IndexError(i)
        if i > self.truncation:
            raise TruncationError(f"order {i} requested, series known to order {self.truncation}")
        return self.components[i - 1]

    def compose(self, other):
        """Series product self(u) * other(u), truncated at the smaller order."""
        n = min(self.truncation, other.truncation)
        comps = []
        for k in range(1, n + 1):
            acc = SparseMatrix.zero(self.complex.dim)
            for i in range(k + 1):
                acc = acc + self[i] @ other[k - i]
            comps.append(acc)
        return type(self)(self.complex, comps)

    def series_inverse(self):
        """The series S with S(u) * self(u) = id, by the triangular recursion."""
        comps = []
        inv = [self._id]
        for k in range(1, self.truncation + 1):
            acc = SparseMatrix.zero(self.complex.dim)
            for j in range(1, k + 1):
                acc = acc - inv[k - j] @ self[j]
            inv.append(acc)
            comps.append(acc)
        return comps

    def __eq__(self, other):
        return isinstance(other, USeries) and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def apply_minus(self, x):
        """Apply the series to a minus-sector vector, keeping powers <= 0."""
        out = {}
        for k, vec in x.terms.items():
            for i in range(0, -k + 1):
                img = self[i].apply(vec)
                acc = out.setdefault(k + i, {})
                for a, v in img.items():
                    acc[a] = acc.get(a, 0) + v
        return UVector(self.complex, "minus", out, x.truncation)


class ChainSplitting(USeries):
    """R = id + R_1 u + ... + R_N u^N."""


class InverseSplitting(USeries):
    """T = id + T_1 u + ... with T R = id."""


def invert_splitting(r):
    return InverseSplitting(r.complex, r.series_inverse())


_CACHE = {}


def _inverse_of(r):
    key = ("T", id(r))
    hit = _CACHE.get(key)
    if hit is None or hit[0] is not r:
        hit = (r, invert_splitting(r))
        _CACHE[key] = hit
    return hit[1]


def _memo(r, tag, args, build):
    key = (tag, id(r), args)
    hit = _CACHE.get(key)
    if hit is None or hit[0] is not r:
        if len(_CACHE) > 20000:
            _CACHE.clear()
        hit = (r, build())
        _CACHE[key] = hit
    return hit[1]


def composite_matrix(i, j, r):
    """sum_{l=0}^{j} R_l T_{i+j+1-l}; shared by H and F."""
    def build():
        if i + j + 1 > r.truncation:
            raise TruncationError(f"H/F component ({i},{j}) needs order {i + j + 1} > {r.truncation}")
        t = _inverse_of(r)
        acc = SparseMatrix.zero(r.complex.dim)
        for l in range(j + 1):
            acc = acc + r[l] @ t[i + j + 1 - l]
        return acc
    return _memo(r, "P", (i, j), build)


def _vec(x):
    return {x: Fraction(1)} if isinstance(x, int) else x


def homotopy_H(i, j, x, y, r):
    """H_{i,j}(u^{-i} x, u^{-j} y) = <(-1)^j sum_l R_l T_{i+j+1-l} x, y>."""
    c = r.complex
    m = composite_matrix(i, j, r)
    return (-1) ** j * c.pair(m.apply(_vec(x)), _vec(y))


def homotopy_H_uv(x, y, r):
    """H extended bilinearly to minus-sector UVectors."""
    total = Fraction(0)
    for k, xv in x.terms.items():
        for l, yv in y.terms.items():
            total += homotopy_H(-k, -l, xv, yv, r)
    return total


def _parity_parts(x):
    c = x.complex
    parts = ({}, {})
    for k, v in x.terms.items():
        for a, val in v.items():
            parts[c.parity[a]].setdefault(k, {})[a] = val
    return [UVector(c, x.sector, p, x.truncation) for p in parts]


def homotopy_H_sym(x, y, r):
    """1/2 (H(x,y) + (-1)^{|x||y|} H(y,x)), extended over parity components."""
    total = Fraction(0)
    for px, xp in enumerate(_parity_parts(x)):
        for py, yp in enumerate(_parity_parts(y)):
            if xp.is_zero() or yp.is_zero():
                continue
            total += Fraction(1, 2) * (homotopy_H_uv(xp, yp, r)
                                       + (-1) ** (px * py) * homotopy_H_uv(yp, xp, r))
    return total


def hsym_basis(a, i, b, j, r):
    """H^sym(e_a u^{-i}, e_b u^{-j})."""
    def build():
        c = r.complex
        s = (-1) ** (c.parity[a] * c.parity[b])
        return Fraction(1, 2) * (homotopy_H(i, j, a, b, r) + s * homotopy_H(j, i, b, a, r))
    return _memo(r, "Hs", (a, i, b, j), build)


def hsym_coeff(r, sign=1):
    """Coefficient function of H^sym on output generators (for contractions)."""
    def coeff(v, w):
        if v[1] != OUTPUT or w[1] != OUTPUT:
            return 0
        return sign * hsym_basis(v[2], -v[3], w[2], -w[3], r)
    return coeff


def delta_H_poly(r, poly, sign=1):
    return scale(r.complex.algebra.contract(poly, hsym_coeff(r, sign)), Fraction(1, 2))


def delta_H(t, r):
    """Second order extension of H^sym to Sym(L_-)."""
    return SymTensor(t.complex, delta_H_poly(r, t.poly))


def operator_S(x):
    """S(alpha) = u B(alpha_0)."""
    c = x.complex
    img = c.delta.apply(x.coefficient(0))
    return UVector(c, "plus", {1: img}, max(1, x.truncation))


def operator_F(x, max_out, r):
    """F(x u^{-i}) = sum_j (sum_l R_l T_{i+j+1-l} x) u^{j+1}, for j+1 <= max_out."""
    c = r.complex
    out = {}
    for k, vec in x.terms.items():
        i = -k
        for j in range(max_out):
            img = composite_matrix(i, j, r).apply(vec)
            acc = out.setdefault(j + 1, {})
            for a, v in img.items():
                acc[a] = acc.get(a, 0) + v
    return UVector(c, "plus", out, max(max_out, 1))


def iota_functional(y, z):
    """iota(y)(z) = -<z, y>_res for y in the minus sector, z in the plus sector."""
    from .mixed_complex import residue_pairing
    return -residue_pairing(z, y)


def givental_matrix(i, j, r):
    """Bilinear form Giv(u^{-i} e_a, u^{-j} e_b) as a matrix (a, b)."""
    def build():
        if i + j + 1 > r.truncation:
            raise TruncationError(f"propagator ({i},{j}) needs order {i + j + 1} > {r.truncation}")
        P = r.complex.pairing
        acc = SparseMatrix.zero(r.complex.dim)
        for l in range(j + 1):
            acc = acc + (r[i + j - l + 1].T @ P @ r[l]).scale((-1) ** (j - l))
        return acc
    return _memo(r, "G", (i, j), build)


def givental_propagator(i, j, x, y, r):
    """sum_{l=0}^{j} (-1)^{j-l} <R_{i+j-l+1} x, R_l y>."""
    m = givental_matrix(i, j, r)
    x, y = _vec(x), _vec(y)
    total = Fraction(0)
    for (a, b), v in m.entries.items():
        if a in x and b in y:
            total += x[a] * y[b] * v
    return total


def givental_coeff(r):
    def coeff(v, w):
        if v[1] != OUTPUT or w[1] != OUTPUT:
            return 0
        return givental_matrix(-v[3], -w[3], r).get(v[2], w[2])
    return coeff


def validate_splitting(r, strict_lagrangian=False, cycle_basis=None):
    """Chain-map relations always; chain-level Lagrangian identity on request.

    ``cycle_basis`` (list of sparse vectors spanning ker b) adds the weaker
    Lagrangian check restricted to those vectors.
    """
    c = r.complex
    rep = ValidationReport()
    for n in range(1, r.truncation + 1):
        bad = sorted(k for k in r[n].entries if c.parity[k[0]] != c.parity[k[1]])
        rep.add(f"R_{n} even", not bad, c._named(bad[0]) if bad else None)
    for n in range(1, r.truncation + 1):
        m = commutator(c.d, r[n]) + c.delta @ r[n - 1]
        rep.add(f"[b,R_{n}]=-B R_{n - 1}", m.is_zero(), None if m.is_zero() else c._named(m.first_nonzero()))
    if strict_lagrangian or cycle_basis is not None:
        mats = [lagrangian_defect(r, n) for n in range(1, r.truncation + 1)]
    if strict_lagrangian:
        for n, m in enumerate(mats, start=1):
            rep.add(f"lagrangian u^{n + 2}", m.is_zero(),
                    None if m.is_zero() else c._named(m.first_nonzero()))
    if cycle_basis is not None:
        for n, m in enumerate(mats, start=1):
            bad = None
            for s, x in enumerate(cycle_basis):
                for t, y in enumerate(cycle_basis):
                    v = sum((x.get(a, 0) * y.get(b, 0) * val for (a, b), val in m.entries.items()), Fraction(0))
                    if v and bad is None:
                        bad = (s, t)
            rep.add(f"lagrangian on cycles u^{n + 2}", bad is None, bad)
    return rep


def lagrangian_defect(r, n):
    """Matrix of sum_{k+l=n} (-1)^k <R_k e_a, R_l e_b> (zero iff order n holds)."""
    P = r.complex.pairing
    acc = SparseMatrix.zero(r.complex.dim)
    for k in range(n + 1):
        acc = acc + (r[k].T @ P @ r[n - k]).scale((-1) ** k)
    return acc


# -- file format -----------------------------------------------------------

def series_to_dict(s):
    return {"order": s.truncation,
            "components": [[[i, j, str(v)] for i, j, v in m.triples()] for m in s.components]}


def series_from_dict(c, data, cls=ChainSplitting):
    comps = []
    for trip in data["components"]:
        comps.append(SparseMatrix.from_triples(c.dim, c.dim, [(int(i), int(j), _parse_scalar(v))
                                                             for i, j, v in trip]))
    if int(data.get("order", len(comps))) != len(comps):
        raise ValueError("order does not match the number of components")
    return cls(c, comps)


def load_splitting(c, path, strict=False):
    with open(path) as fh:
        r = series_from_dict(c, json.load(fh))
    rep = validate_splitting(r, strict_lagrangian=strict)
    if not rep.passed:
        raise ValueError("invalid splitting: " + "; ".join(f.line() for f in rep.failures()))
    return r


def save_series(s, path):
    with open(path, "w") as fh:
        json.dump(series_to_dict(s), fh, indent=1)
        fh.write("\n")
