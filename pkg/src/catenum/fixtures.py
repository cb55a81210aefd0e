"""Random and hand-built test inputs: mixed complexes with pairing, chain
splittings, symplectic series and tensors.

Random complexes are direct sums of small blocks, each carrying an even
self-adjoint operator h with [h, [h, b]] = 0.  Setting B = [b, h] then gives
a mixed complex on which R = exp(-u h) is a chain splitting; composing with
exp(sum A_i u^i), [b, A_i] = 0, gives further splittings.  A random
parity-preserving change of basis hides the block structure.
"""

import random
from fractions import Fraction
from itertools import combinations_with_replacement
from math import factorial

from .linalg import SparseMatrix, inverse, nullspace
from .mixed_complex import MixedComplex, SymTensor, UVector, validate_complex
from .splitting import ChainSplitting, USeries
from .superpoly import add, input_var, output_var

# Each block: (parities, b entries {(row, col): v}, h entries, pairing entries, degrees)
# b entry (i, j) means b e_j has coefficient v on e_i.


def _block_hom_even(rng):
    c = rng.choice([1, 2, -1, Fraction(1, 2)])
    return [0], {}, {}, {(0, 0): c}


def _block_hom_pair(parity):
    def make(rng):
        s = -1 if parity else 1
        return [parity, parity], {}, {}, {(0, 1): 1, (1, 0): s}
    return make


def _block_acyclic(rng):
    # z, y = b z, y', z' = b y'; h z' = a z
    a = rng.choice([1, -1, 2, Fraction(1, 2), 3])
    return ([0, 1, 1, 0], {(1, 0): 1, (3, 2): 1}, {(0, 3): a},
            {(0, 3): 1, (3, 0): 1, (1, 2): -1, (2, 1): 1})


def _block_acyclic_flipped(rng):
    # z odd, y = b z even, y' even, z' = b y' odd; h y = a y'
    a = rng.choice([1, -1, 2, Fraction(1, 3)])
    return ([1, 0, 0, 1], {(1, 0): 1, (3, 2): 1}, {(2, 1): a},
            {(0, 3): 1, (3, 0): -1, (1, 2): 1, (2, 1): 1})


def _block_coupled(rng):
    # x, x* even cycles; z, y, y', z' as in the acyclic block; h x = a z, h z' = a x*
    a = rng.choice([1, -1, 2])
    return ([0, 0, 0, 1, 1, 0], {(3, 2): 1, (5, 4): 1}, {(2, 0): a, (1, 5): a},
            {(0, 1): 1, (1, 0): 1, (2, 5): 1, (5, 2): 1, (3, 4): -1, (4, 3): 1})


BLOCKS = {
    "hom_even": (1, _block_hom_even),
    "hom_even_pair": (2, _block_hom_pair(0)),
    "hom_odd_pair": (2, _block_hom_pair(1)),
    "acyclic": (4, _block_acyclic),
    "acyclic_flipped": (4, _block_acyclic_flipped),
    "coupled": (6, _block_coupled),
}


def _assemble(blocks):
    parity, b, h, P = [], {}, {}, {}
    off = 0
    for par, bb, hh, pp in blocks:
        for src, dst in ((bb, b), (hh, h), (pp, P)):
            for (i, j), v in src.items():
                dst[(i + off, j + off)] = v
        parity.extend(par)
        off += len(par)
    n = off
    return parity, SparseMatrix(n, n, b), SparseMatrix(n, n, h), SparseMatrix(n, n, P)


def random_parity_basis_change(rng, parity):
    """Random invertible matrix with small integer entries, preserving parity."""
    n = len(parity)
    while True:
        ent = {}
        for i in range(n):
            for j in range(n):
                if parity[i] == parity[j]:
                    if i == j:
                        ent[(i, j)] = rng.choice([1, 1, -1, 2])
                    elif rng.random() < 0.4:
                        ent[(i, j)] = rng.randint(-2, 2)
        m = SparseMatrix(n, n, ent)
        try:
            return m, inverse(m)
        except ValueError:
            continue


class ComplexWithHomotopy:
    """A random mixed complex together with the h used to build it."""

    def __init__(self, complex_, h):
        self.complex = complex_
        self.h = h


def random_complex(rng, max_dim=6, kinds=None, require_delta=False, scramble=True):
    """Random valid mixed complex (dimension <= max_dim) with its homotopy h."""
    kinds = list(kinds or BLOCKS)
    for _ in range(200):
        chosen, dim = [], 0
        order = kinds[:]
        while True:
            fits = [k for k in order if dim + BLOCKS[k][0] <= max_dim]
            if not fits or (chosen and rng.random() < 0.35):
                break
            k = rng.choice(fits)
            chosen.append(k)
            dim += BLOCKS[k][0]
        if not chosen:
            continue
        blocks = [BLOCKS[k][1](rng) for k in chosen]
        parity, b, h, P = _assemble(blocks)
        if scramble:
            Q, Qi = random_parity_basis_change(rng, parity)
            b, h = Q @ b @ Qi, Q @ h @ Qi
            P = Qi.T @ P @ Qi
        B = b @ h - h @ b
        if require_delta and B.is_zero():
            continue
        names = [f"e{i}" for i in range(len(parity))]
        c = MixedComplex(names, parity, b, B, P)
        rep = validate_complex(c)
        if not rep.passed:
            raise AssertionError("fixture generator produced an invalid complex: "
                                 + "; ".join(rep.lines()))
        return ComplexWithHomotopy(c, h)
    raise RuntimeError("could not build a complex with the requested properties")


def two_dim_fixture():
    """Basis e (even), f (odd); b = 0, B e = f, <e,f> = <f,e> = 1."""
    return MixedComplex(["e", "f"], [0, 1], SparseMatrix.zero(2),
                        SparseMatrix(2, 2, {(1, 0): 1}),
                        SparseMatrix(2, 2, {(0, 1): 1, (1, 0): 1}))


def graded_fixture(d=3):
    """Z-graded complex of Calabi-Yau dimension d (odd): a pair of homology
    classes in degrees 0 and 2d plus an acyclic block carrying B != 0."""
    if d % 2 == 0:
        raise ValueError("this fixture needs odd d")
    names = ["one", "top", "z", "y", "w", "v"]
    degree = [0, 2 * d, d + 1, d, d, d - 1]
    parity = [x % 2 for x in degree]
    b = SparseMatrix(6, 6, {(3, 2): 1, (5, 4): 1})
    h = SparseMatrix(6, 6, {(2, 5): 1})
    B = b @ h - h @ b
    P = SparseMatrix(6, 6, {(0, 1): 1, (1, 0): 1, (2, 5): 1, (5, 2): 1, (3, 4): -1, (4, 3): 1})
    c = MixedComplex(names, parity, b, B, P, cy_dim=d, degree=degree)
    return ComplexWithHomotopy(c, h)


# -- series --------------------------------------------------------------

def series_exp(complex_, gens, order):
    """exp(sum_i gens[i-1] u^i) truncated at u^order, as component list."""
    n = complex_.dim
    zero = SparseMatrix.zero(n)
    X = [zero] + [gens[i - 1] if i <= len(gens) else zero for i in range(1, order + 1)]
    result = [SparseMatrix.identity(n)] + [zero] * order
    power = [SparseMatrix.identity(n)] + [zero] * order
    for m in range(1, order + 1):
        new = [zero] * (order + 1)
        for a in range(order + 1):
            if power[a].is_zero():
                continue
            for k in range(1, order + 1 - a):
                if not X[k].is_zero():
                    new[a + k] = new[a + k] + power[a] @ X[k]
        power = new
        f = Fraction(1, factorial(m))
        result = [r + p.scale(f) for r, p in zip(result, power)]
    return result[1:]


def _solve_generators(c, rng, commute_with_b=True, adjoint_sign=None, degree_shift=None):
    """Random even matrix A with optional constraints:
    [b, A] = 0; <A x, y> = adjoint_sign <x, A y>; A raises degree by degree_shift."""
    n = c.dim
    cells = [(i, j) for i in range(n) for j in range(n) if c.parity[i] == c.parity[j]
             and (degree_shift is None or c.degree[i] == c.degree[j] + degree_shift)]
    if not cells:
        return SparseMatrix.zero(n)
    idx = {cell: t for t, cell in enumerate(cells)}
    rows = []
    b, P = c.d.to_dense(), c.pairing.to_dense()
    if commute_with_b:
        for i in range(n):
            for j in range(n):
                row = [Fraction(0)] * len(cells)
                for k in range(n):
                    if (k, j) in idx and b[i][k]:
                        row[idx[(k, j)]] += b[i][k]
                    if (i, k) in idx and b[k][j]:
                        row[idx[(i, k)]] -= b[k][j]
                if any(row):
                    rows.append(row)
    if adjoint_sign is not None:
        for i in range(n):
            for j in range(n):
                row = [Fraction(0)] * len(cells)
                for k in range(n):
                    if (k, i) in idx and P[k][j]:
                        row[idx[(k, i)]] += P[k][j]
                    if (k, j) in idx and P[i][k]:
                        row[idx[(k, j)]] -= adjoint_sign * P[i][k]
                if any(row):
                    rows.append(row)
    basis = nullspace(rows, len(cells)) if rows else nullspace([], len(cells))
    acc = {}
    for vec in basis:
        coef = rng.choice([0, 0, 1, -1, 2, Fraction(1, 2)])
        if coef:
            for t, v in enumerate(vec):
                if v:
                    acc[cells[t]] = acc.get(cells[t], 0) + coef * v
    return SparseMatrix(n, n, acc)


def random_splitting(rng, cwh, order, lagrangian=True, extra=True):
    """Chain splitting exp(-u h) * exp(sum A_i u^i) of the given order."""
    c = cwh.complex
    graded = c.degree is not None
    base = series_exp(c, [cwh.h.scale(-1)], order)
    if not extra:
        return ChainSplitting(c, base)
    gens = []
    for i in range(1, order + 1):
        sign = None
        if lagrangian:
            sign = 1 if i % 2 else -1
        gens.append(_solve_generators(c, rng, True, sign, 2 * i if graded else None))
    more = series_exp(c, gens, order)
    return ChainSplitting(c, base).compose(ChainSplitting(c, more))


def random_symplectic(rng, c, order, cls=USeries):
    """Random series exp(sum A_i u^i) preserving the residue pairing (b = 0 complexes)."""
    gens = [_solve_generators(c, rng, c.d.is_zero() is False, 1 if i % 2 else -1)
            for i in range(1, order + 1)]
    return cls(c, series_exp(c, gens, order))


# -- vectors and tensors ---------------------------------------------------

def random_vector(rng, c, parity=None, density=0.6):
    vec = {}
    for i in range(c.dim):
        if parity is not None and c.parity[i] != parity:
            continue
        if rng.random() < density:
            v = rng.choice([1, -1, 2, -2, 3, Fraction(1, 2), Fraction(-1, 3)])
            vec[i] = Fraction(v)
    return vec


def random_uvector(rng, c, max_neg, truncation, parity=None):
    terms = {}
    for k in range(0, max_neg + 1):
        v = random_vector(rng, c, parity)
        if v:
            terms[-k] = v
    return UVector(c, "minus", terms, truncation)


def random_output_poly(rng, c, arity, max_neg=1, terms=3, copy=0):
    alg = c.algebra
    poly = {}
    for _ in range(terms):
        seq = [output_var(rng.randrange(c.dim), -rng.randint(0, max_neg), copy) for _ in range(arity)]
        poly = add(poly, alg.monomial(seq, rng.choice([1, -1, 2, Fraction(1, 2), Fraction(-3, 2)])))
    return poly


def random_sym_tensor(rng, c, arity, max_neg=1, terms=3):
    return SymTensor(c, random_output_poly(rng, c, arity, max_neg, terms))


def random_vertex_poly(rng, c, k, l, max_in=2, max_neg=1, terms=3, parity=None):
    """Random polynomial with k input and l output generators."""
    alg = c.algebra
    poly = {}
    tries = 0
    while len(poly) < terms and tries < 60:
        tries += 1
        seq = [input_var(rng.randrange(c.dim), rng.randint(1, max_in)) for _ in range(k)]
        seq += [output_var(rng.randrange(c.dim), -rng.randint(0, max_neg)) for _ in range(l)]
        mono = alg.monomial(seq, rng.choice([1, -1, 2, Fraction(1, 2)]))
        if parity is not None and mono and alg.mono_parity(next(iter(mono))) != parity:
            continue
        poly = add(poly, mono)
    return poly


def make_rng(seed):
    return random.Random(seed)


# -- graded vertex libraries --------------------------------------------------

def vertex_degree(g, k, l, d):
    """Degree of a homogeneous vertex tensor of type (g,k,l) in the coordinate
    degrees of ``feynman.monomial_degree`` (outputs deg a + 2j, inputs 2k - deg a)."""
    return (6 * g - 7 + 3 * k + 2 * l) + d * (2 - 2 * g - 2 * k) + 2 * k


def homogeneous_monomials(c, k, l, degree, max_in=2, max_neg=1):
    """All canonical monomials with k inputs and l outputs of the given degree."""
    alg = c.algebra
    ins = [input_var(a, u) for a in range(c.dim) for u in range(1, max_in + 1)]
    outs = [output_var(a, -j) for a in range(c.dim) for j in range(0, max_neg + 1)]
    wt = {}
    for v in ins:
        wt[v] = 2 * v[3] - c.degree[v[2]]
    for v in outs:
        wt[v] = c.degree[v[2]] - 2 * v[3]
    found = set()
    for si in combinations_with_replacement(ins, k):
        di = sum(wt[v] for v in si)
        for so in combinations_with_replacement(outs, l):
            if di + sum(wt[v] for v in so) != degree:
                continue
            sign, mono = alg.canon(list(si) + list(so))
            if sign:
                found.add(mono)
    return sorted(found)


def random_graded_library(rng, c, lambda_order, max_in=2, max_neg=1, terms=3):
    """Vertex library with every (g,k,l), 2g-2+k+l <= lambda_order + 1, homogeneous
    of the degree forced by the dimension axiom (k >= 1)."""
    from .feynman import VertexLibrary, VertexTensor
    lib = VertexLibrary()
    for g in range(0, lambda_order // 2 + 2):
        for n in range(1, lambda_order + 4):
            if not 0 < 2 * g - 2 + n <= lambda_order + 1:
                continue
            for k in range(1, n + 1):
                l = n - k
                monos = homogeneous_monomials(c, k, l, vertex_degree(g, k, l, c.cy_dim), max_in, max_neg)
                picked = rng.sample(monos, min(terms, len(monos)))
                poly = {m: Fraction(rng.choice([1, -1, 2, Fraction(1, 2), -3])) for m in picked}
                lib[(g, k, l)] = VertexTensor(c, g, k, l, poly)
    return lib


def random_hooked_library(rng, c, lambda_order, max_neg=1, terms=3):
    """Library solving the master equation: only one-input components, each the
    hook of an even symmetric tensor.  Missing keys hold empty tensors."""
    from .feynman import VertexLibrary, VertexTensor, hook
    alg = c.algebra
    lib = VertexLibrary()
    for g in range(0, lambda_order // 2 + 2):
        for n in range(1, lambda_order + 4):
            if not 0 < 2 * g - 2 + n <= lambda_order:
                continue
            even = {}
            for _ in range(20):
                even = alg.split_parity(random_output_poly(rng, c, n, max_neg, terms))[0]
                if even:
                    break
            for k in range(1, n + 1):
                poly = hook(c, even) if k == 1 else {}
                lib[(g, k, n - k)] = VertexTensor(c, g, k, n - k, poly)
    return lib
