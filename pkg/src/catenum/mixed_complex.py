"""Finite-dimensional mixed complexes with a pairing, u-graded vectors,
symmetric tensors over the minus complex and the BV operator."""

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .linalg import SparseMatrix
from .superpoly import INPUT, OUTPUT, SuperAlgebra, add, clean, output_var, scale


class StructuralError(ValueError):
    """Input data has the wrong shape (as opposed to failing an identity)."""


class TruncationError(ValueError):
    """A requested u-power lies beyond the available truncation order."""


@dataclass
class CheckResult:
    name: str
    passed: bool
    witness: object = None

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        extra = "" if self.passed or self.witness is None else f" witness={self.witness}"
        return f"{status} {self.name}{extra}"


@dataclass
class ValidationReport:
    checks: list = field(default_factory=list)

    def add(self, name, passed, witness=None):
        self.checks.append(CheckResult(name, bool(passed), witness))

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def __bool__(self):
        return self.passed

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def lines(self):
        return [c.line() for c in self.checks]


class MixedComplex:
    """(L, b, B, pairing) on a named basis.

    ``pairing`` holds <e_i, e_j> at entry (i, j).  ``degree`` is the optional
    integer grading; ``cy_dim`` only matters when it is present.
    """

    def __init__(self, basis, parity, d, delta, pairing, cy_dim=0, degree=None):
        self.basis = list(basis)
        self.parity = tuple(int(p) & 1 for p in parity)
        self.d = d
        self.delta = delta
        self.pairing = pairing
        self.cy_dim = cy_dim
        self.degree = None if degree is None else tuple(int(x) for x in degree)
        n = len(self.basis)
        if len(self.parity) != n:
            raise StructuralError("parity list length differs from basis length")
        if self.degree is not None and len(self.degree) != n:
            raise StructuralError("degree list length differs from basis length")
        for name, m in (("d", d), ("delta", delta), ("pairing", pairing)):
            if m.shape != (n, n):
                raise StructuralError(f"{name} has shape {m.shape}, expected {(n, n)}")
        self.algebra = SuperAlgebra(self.parity)
        self._sign = SparseMatrix(n, n, {(i, i): (-1) ** p for i, p in enumerate(self.parity)})

    @property
    def dim(self):
        return len(self.basis)

    # -- pairing helpers ---------------------------------------------
    def pair(self, x, y):
        """<x, y> for sparse vectors {index: coeff}."""
        total = Fraction(0)
        for (i, j), v in self.pairing.entries.items():
            a = x.get(i)
            if a:
                b = y.get(j)
                if b:
                    total += a * b * v
        return total

    def omega(self, i, j):
        """<B e_i, e_j>."""
        return self.pair(self.delta.column(i), {j: 1})

    def basis_vector(self, i):
        return {i: Fraction(1)}

    def vector_parity(self, x):
        ps = {self.parity[i] for i, v in x.items() if v}
        if len(ps) > 1:
            raise ValueError("vector is not parity-homogeneous")
        return ps.pop() if ps else 0

    def name_of(self, i):
        return self.basis[i]

    def _named(self, ij):
        i, j = ij
        return (self.basis[i], self.basis[j])

    def __repr__(self):
        return f"MixedComplex(dim={self.dim}, basis={self.basis})"


def validate_complex(c):
    """Check every identity a mixed complex with pairing must satisfy."""
    rep = ValidationReport()
    b, B, P, S = c.d, c.delta, c.pairing, c._sign
    n = c.dim

    def ident(name, m):
        rep.add(name, m.is_zero(), None if m.is_zero() else c._named(m.first_nonzero()))

    ident("d^2=0", b @ b)
    ident("delta^2=0", B @ B)
    ident("d*delta+delta*d=0", b @ B + B @ b)
    for name, m in (("d odd", b), ("delta odd", B)):
        bad = sorted(k for k in m.entries if c.parity[k[0]] == c.parity[k[1]])
        rep.add(name, not bad, c._named(bad[0]) if bad else None)
    bad = sorted(k for k in P.entries if c.parity[k[0]] != c.parity[k[1]])
    rep.add("pairing even", not bad, c._named(bad[0]) if bad else None)
    sym = SparseMatrix(n, n, {(i, j): P.get(i, j) - (-1) ** (c.parity[i] * c.parity[j]) * P.get(j, i)
                              for i in range(n) for j in range(n)})
    ident("pairing symmetric", sym)
    # <b e_i, e_j> + (-1)^{|e_i|} <e_i, b e_j> = 0
    ident("pairing chain map", b.T @ P + S @ P @ b)
    # <B e_i, e_j> = (-1)^{|e_i|} <e_i, B e_j>
    ident("delta self-adjoint", B.T @ P - S @ P @ B)
    if c.degree is not None:
        deg = c.degree
        for name, m, shift in (("d degree -1", b, -1), ("delta degree +1", B, 1)):
            # entry (i, j) maps e_j to e_i
            bad = sorted(k for k in m.entries if deg[k[0]] != deg[k[1]] + shift)
            rep.add(name, not bad, c._named(bad[0]) if bad else None)
        bad = sorted(k for k in P.entries if deg[k[0]] + deg[k[1]] != 2 * c.cy_dim)
        rep.add("pairing degree -2d", not bad, c._named(bad[0]) if bad else None)
    return rep


# -- u-graded vectors ------------------------------------------------------

class UVector:
    """Finite sum of (u**power) * vector in the minus, plus or Tate sector."""

    SECTORS = ("minus", "plus", "tate")

    def __init__(self, complex_, sector, terms, truncation):
        if sector not in self.SECTORS:
            raise ValueError(f"unknown sector {sector!r}")
        self.complex = complex_
        self.sector = sector
        self.truncation = truncation
        clean_terms = {}
        for k, vec in terms.items():
            vec = {i: Fraction(v) for i, v in vec.items() if v}
            if not vec:
                continue
            if sector == "minus" and not -truncation <= k <= 0:
                raise ValueError(f"minus sector needs -N <= power <= 0, got {k}")
            if sector == "plus" and not 1 <= k <= truncation:
                raise ValueError(f"plus sector needs 1 <= power <= N, got {k}")
            clean_terms[k] = vec
        self.terms = clean_terms

    def coefficient(self, k):
        return self.terms.get(k, {})

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        terms = {k: dict(v) for k, v in self.terms.items()}
        for k, v in other.terms.items():
            acc = terms.setdefault(k, {})
            for i, x in v.items():
                acc[i] = acc.get(i, 0) + x
        return UVector(self.complex, self.sector, terms, max(self.truncation, other.truncation))

    def scale(self, c):
        return UVector(self.complex, self.sector,
                       {k: {i: c * x for i, x in v.items()} for k, v in self.terms.items()},
                       self.truncation)

    def __eq__(self, other):
        return isinstance(other, UVector) and self.sector == other.sector and self.terms == other.terms

    def differential(self):
        """(b + uB) with the sector's rule: minus drops u^1, plus drops powers > N."""
        c = self.complex
        out = {}
        for k, vec in self.terms.items():
            for power, m in ((k, c.d), (k + 1, c.delta)):
                if self.sector == "minus" and power > 0:
                    continue
                if self.sector == "plus" and power > self.truncation:
                    continue
                img = m.apply(vec)
                acc = out.setdefault(power, {})
                for i, x in img.items():
                    acc[i] = acc.get(i, 0) + x
        return UVector(c, self.sector, out, self.truncation)

    def parity(self):
        ps = {self.complex.parity[i] for v in self.terms.values() for i in v}
        if len(ps) > 1:
            raise ValueError("UVector is not parity-homogeneous")
        return ps.pop() if ps else 0

    def __repr__(self):
        return f"UVector({self.sector}, {self.terms})"


def residue_pairing(x, y):
    """sum over k + l = 1 of (-1)^k <x_k, y_l>."""
    c = x.complex
    total = Fraction(0)
    for k, xv in x.terms.items():
        yv = y.terms.get(1 - k)
        if yv:
            total += (-1) ** (k % 2) * c.pair(xv, yv)
    return total


def hres_pairing(x, y):
    """sum_{k,l} (-1)^k <x_k, y_l> u^{k+l+2}, as {power: coeff}."""
    c = x.complex
    out = {}
    for k, xv in x.terms.items():
        for l, yv in y.terms.items():
            v = (-1) ** (k % 2) * c.pair(xv, yv)
            if v:
                out[k + l + 2] = out.get(k + l + 2, 0) + v
    return {p: v for p, v in out.items() if v}


# -- graded signs ----------------------------------------------------------

class GradedSignContext:
    """Koszul signs for a list of tensor factors.

    With ``shifted`` true, a factor of parity p behaves as having parity p+1.
    """

    def __init__(self, parities, shifted=True):
        self.parities = [int(p) & 1 for p in parities]
        self.shifted = shifted

    def effective(self, i):
        return self.parities[i] ^ (1 if self.shifted else 0)

    def transposition_sign(self, i, j):
        return -1 if self.effective(i) and self.effective(j) else 1

    def permutation_sign(self, perm):
        """Sign of reordering factors into the order given by perm."""
        sign = 1
        eff = [self.effective(i) for i in range(len(self.parities))]
        for a in range(len(perm)):
            for b in range(a + 1, len(perm)):
                if perm[a] > perm[b] and eff[perm[a]] and eff[perm[b]]:
                    sign = -sign
        return sign

    def shift_sign(self):
        """(-1)^{sum_k (n-k)|x_k|} relating shifted and unshifted multilinear maps."""
        n = len(self.parities)
        e = sum((n - k) * p for k, p in enumerate(self.parities, start=1))
        return -1 if e % 2 else 1


# -- symmetric tensors over the minus complex --------------------------------

class SymTensor:
    """Element of Sym(L_-), stored as a polynomial in output generators.

    Keys of ``entries`` are canonical tuples of (basis index, u power <= 0).
    Sign conventions use the plain parity of L_- (an odd factor squares to 0).
    """

    def __init__(self, complex_, poly):
        self.complex = complex_
        for m in poly:
            for v in m:
                if v[0] != 0 or v[1] != OUTPUT:
                    raise ValueError("SymTensor polynomial may only contain copy-0 outputs")
        self.poly = clean(poly)

    @classmethod
    def from_entries(cls, complex_, entries):
        alg = complex_.algebra
        poly = {}
        for key, coeff in entries.items():
            for b, k in key:
                if k > 0:
                    raise ValueError("SymTensor factors need u power <= 0")
            poly = add(poly, alg.monomial([output_var(b, k) for b, k in key], coeff))
        return cls(complex_, poly)

    @classmethod
    def from_vectors(cls, complex_, vectors):
        """Product of UVectors (minus sector) in the given order."""
        alg = complex_.algebra
        out = {(): Fraction(1)}
        for vec in vectors:
            p = {}
            for k, coeffs in vec.terms.items():
                for i, x in coeffs.items():
                    p = add(p, {(output_var(i, k),): x})
            out = alg.mul(out, p)
        return cls(complex_, out)

    @property
    def entries(self):
        return {tuple((v[2], v[3]) for v in m): c for m, c in self.poly.items()}

    def arities(self):
        return sorted({len(m) for m in self.poly})

    @property
    def arity(self):
        a = self.arities()
        if len(a) > 1:
            raise ValueError("tensor mixes arities")
        return a[0] if a else 0

    def parity(self):
        return self.complex.algebra.poly_parity(self.poly) or 0

    def is_zero(self):
        return not self.poly

    def __add__(self, other):
        return SymTensor(self.complex, add(self.poly, other.poly))

    def __sub__(self, other):
        return SymTensor(self.complex, add(self.poly, other.poly, -1))

    def scale(self, c):
        return SymTensor(self.complex, scale(self.poly, c))

    def __mul__(self, other):
        return SymTensor(self.complex, self.complex.algebra.mul(self.poly, other.poly))

    def __eq__(self, other):
        return isinstance(other, SymTensor) and self.poly == other.poly

    def __repr__(self):
        return f"SymTensor({self.entries})"

    def scalar(self):
        return self.poly.get((), Fraction(0))


def omega_coeff(c):
    """Coefficient function of the BV contraction: Omega on u^0 parts only."""
    cache = {}

    def coeff(v, w):
        if v[1] != OUTPUT or w[1] != OUTPUT or v[3] != 0 or w[3] != 0:
            return 0
        key = (v[2], w[2])
        if key not in cache:
            cache[key] = c.omega(*key)
        return cache[key]
    return coeff


def bv_delta_poly(c, poly):
    return scale(c.algebra.contract(poly, omega_coeff(c)), Fraction(1, 2))


def bv_delta(t):
    """The BV operator: second order extension of Delta(xy) = <B x_0, y_0>."""
    return SymTensor(t.complex, bv_delta_poly(t.complex, t.poly))


def bv_bracket(x, y):
    """Delta(xy) - Delta(x) y - (-1)^{|x|} x Delta(y)."""
    c = x.complex
    alg = c.algebra
    total = {}
    for px, part in enumerate(alg.split_parity(x.poly)):
        if not part:
            continue
        xp = SymTensor(c, part)
        term = bv_delta(xp * y).poly
        term = add(term, (bv_delta(xp) * y).poly, -1)
        term = add(term, (xp * bv_delta(y)).poly, -((-1) ** px))
        total = add(total, term)
    return SymTensor(c, total)


# -- file format -----------------------------------------------------------

def _parse_scalar(s):
    return Fraction(str(s))


def _triples(m):
    return [[i, j, str(v)] for i, j, v in m.triples()]


def complex_to_dict(c):
    basis = []
    for i, name in enumerate(c.basis):
        rec = {"name": name, "parity": c.parity[i]}
        if c.degree is not None:
            rec["degree"] = c.degree[i]
        basis.append(rec)
    return {"basis": basis, "cy_dim": c.cy_dim, "d": _triples(c.d),
            "delta": _triples(c.delta), "pairing": _triples(c.pairing)}


def complex_from_dict(data, validate=True):
    try:
        basis = [b["name"] for b in data["basis"]]
        parity = [int(b["parity"]) for b in data["basis"]]
        degs = [b.get("degree") for b in data["basis"]]
    except (KeyError, TypeError) as exc:
        raise StructuralError(f"malformed basis list: {exc}") from exc
    degree = None if all(x is None for x in degs) else degs
    if degree is not None and any(x is None for x in degree):
        raise StructuralError("degrees must be given for all basis elements or none")
    n = len(basis)

    def mat(key):
        try:
            return SparseMatrix.from_triples(n, n, [(int(i), int(j), _parse_scalar(v))
                                                   for i, j, v in data.get(key, [])])
        except (IndexError, ValueError) as exc:
            raise StructuralError(f"bad {key} entries: {exc}") from exc
    c = MixedComplex(basis, parity, mat("d"), mat("delta"), mat("pairing"),
                     cy_dim=int(data.get("cy_dim", 0)), degree=degree)
    if validate:
        rep = validate_complex(c)
        if not rep.passed:
            raise ValueError("invalid mixed complex: " + "; ".join(f.line() for f in rep.failures()))
    return c


def load_complex(path, override=False):
    with open(path) as fh:
        return complex_from_dict(json.load(fh), validate=not override)


def save_complex(c, path):
    with open(path, "w") as fh:
        json.dump(complex_to_dict(c), fh, indent=1)
        fh.write("\n")


# -- differentials acting on polynomials -------------------------------------

def _columns(m):
    cols = {}
    for (i, j), v in m.entries.items():
        cols.setdefault(j, []).append((i, v))
    return cols


def _rows(m):
    rows = {}
    for (i, j), v in m.entries.items():
        rows.setdefault(i, []).append((j, v))
    return rows


def differential_image(c):
    """Images of generators under b + uB.

    Outputs follow L_-: e_a u^{-j} -> b e_a u^{-j} + B e_a u^{-j+1} (the u^1
    overflow dropped).  Input coordinates get minus the transposed action,
    twisted by (-1)^{|e_beta|}; with this choice contracting an output against
    an input through a map M is compatible with D (the commutator with D is
    the contraction through [b+uB, M]).
    """
    bc, Bc = _columns(c.d), _columns(c.delta)
    br, Br = _rows(c.d), _rows(c.delta)
    par = c.parity
    cache = {}

    def image(v):
        hit = cache.get(v)
        if hit is not None:
            return hit
        copy, kind, a, k = v
        out = {}
        if kind == OUTPUT:
            for i, x in bc.get(a, ()):
                key = ((copy, OUTPUT, i, k),)
                out[key] = out.get(key, 0) + x
            if k < 0:
                for i, x in Bc.get(a, ()):
                    key = ((copy, OUTPUT, i, k + 1),)
                    out[key] = out.get(key, 0) + x
        elif kind == INPUT:
            for j, x in br.get(a, ()):
                key = ((copy, INPUT, j, k),)
                out[key] = out.get(key, 0) - (-1) ** par[j] * x
            if k >= 2:
                for j, x in Br.get(a, ()):
                    key = ((copy, INPUT, j, k - 1),)
                    out[key] = out.get(key, 0) - (-1) ** par[j] * x
        out = clean(out)
        cache[v] = out
        return out
    return image


def apply_differential(c, poly):
    """b + uB acting as an odd derivation on outputs and inputs."""
    return c.algebra.derivation(poly, differential_image(c), odd=True)


def hook_image(c):
    """iota on generators: e_a u^{-j} -> (-1)^{j+|e_a|} sum_alpha <e_alpha, e_a> xi_{alpha, j+1}."""
    cols = _columns(c.pairing)
    par = c.parity
    cache = {}

    def image(v):
        if v[1] != OUTPUT:
            return None
        hit = cache.get(v)
        if hit is None:
            copy, _, a, k = v
            j = -k
            sign = (-1) ** (j + par[a])
            hit = clean({((copy, INPUT, alpha, j + 1),): sign * x for alpha, x in cols.get(a, ())})
            cache[v] = hit
        return hit
    return image


def apply_hook(c, poly):
    """The odd derivation iota turning outputs into inputs."""
    return c.algebra.derivation(poly, hook_image(c), odd=True)
