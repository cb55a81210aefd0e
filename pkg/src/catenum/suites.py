"""Randomized and exhaustive identity suites shared by the CLI and the tests.

Every suite takes a seed (where random) and returns a ValidationReport with one
check per sample.  Trials are seeded independently, so running them on several
threads gives the same report in the same order.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import graphs as gr
from .feynman import (Graded, _product_input, bracket_hat, compose_k, compute_invariant,
                      differential_in, differential_out, dimension_check, invariant_potential,
                      khat_apply, to_copy)
from .fixtures import (graded_fixture, make_rng, random_complex, random_graded_library,
                       random_hooked_library, random_output_poly, random_splitting,
                       random_symplectic, random_uvector, random_vector, random_vertex_poly)
from .givental import GiventalElement, act_on_splitting, quantized_action
from .linalg import nullspace
from .mixed_complex import UVector, ValidationReport
from .splitting import (ChainSplitting, givental_propagator, homotopy_H_sym, homotopy_H_uv,
                        iota_functional, operator_F, operator_S)
from .superpoly import add

THREADS_ENV = "CATENUM_THREADS"

HOMOLOGY_KINDS = ["hom_even", "hom_even_pair", "hom_odd_pair"]


def thread_count(default=1):
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return default
    n = int(raw)
    if n < 1:
        raise ValueError(f"{THREADS_ENV} must be a positive integer")
    return n


def _trial_rng(seed, t):
    return make_rng(seed * 1000003 + t)


def run_trials(fn, n, threads=None):
    """[fn(0), ..., fn(n-1)] in order, on ``threads`` worker threads."""
    threads = thread_count() if threads is None else threads
    if threads <= 1 or n <= 1:
        return [fn(t) for t in range(n)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(n)))


def _collect(name, results):
    rep = ValidationReport()
    for t, checks in enumerate(results):
        for label, ok, witness in checks:
            rep.add(f"{name}[{t}] {label}", ok, witness)
    return rep


def _cmp(got, want):
    """'ok' when equal, otherwise a short witness."""
    diff = add(got, want, -1)
    if not diff:
        return True, None
    m = min(diff)
    return False, (m, diff[m])


# -- combinatorics -----------------------------------------------------------------------

def comb_suite(max_total=40):
    rep = ValidationReport()
    for total in range(0, max_total + 1):
        for N in range(0, total // 2 + 1):
            M = total - N
            if (M - N) % 2:
                continue
            ok, lhs, rhs = gr.check_binomial_identity(M, N)
            rep.add(f"comb M={M} N={N}", ok, None if ok else (lhs, rhs))
    return rep


def aut_formula_suite(max_half_edges=8):
    rep = ValidationReport()
    for g in gr.all_marked_graphs(max_half_edges):
        brute = gr.aut_order(g, marking=list(range(g.n_vertices)))
        formula = gr.marked_aut_formula(g)
        rep.add(f"aut {g.skeleton()}", brute == formula, None if brute == formula else (brute, formula))
    return rep


# -- splitting calculus ------------------------------------------------------------------

def homotopy_suite(trials=50, max_dim=6, trunc=5, seed=0, threads=None):
    """[b+uB, H] = Omega, [b+uB, F] = S and H(x, y) = iota(y)(F x) on random samples."""
    def one(t):
        rng = _trial_rng(seed, t)
        cw = random_complex(rng, max_dim, require_delta=(t % 2 == 0))
        c = cw.complex
        r = random_splitting(rng, cw, trunc)
        a = random_uvector(rng, c, 1, trunc, parity=rng.randint(0, 1))
        b = random_uvector(rng, c, 1, trunc, parity=rng.randint(0, 1))
        out = []
        lhs = homotopy_H_uv(a.differential(), b, r) + (-1) ** a.parity() * homotopy_H_uv(a, b.differential(), r)
        omega = sum(c.omega(i, j) * x * y for i, x in a.coefficient(0).items()
                    for j, y in b.coefficient(0).items())
        out.append(("[D,H]=Omega", lhs == -omega, None if lhs == -omega else (lhs, -omega)))
        max_out = trunc - 2
        fa = operator_F(a, max_out, r).differential() + operator_F(a.differential(), max_out, r).scale(-1)
        s = operator_S(a)
        out.append(("[D,F]=S", fa.terms == s.terms, None if fa.terms == s.terms else (fa.terms, s.terms)))
        i, j = rng.randint(0, 1), rng.randint(0, 1)
        x = UVector(c, "minus", {-i: random_vector(rng, c)}, trunc)
        y = UVector(c, "minus", {-j: random_vector(rng, c)}, trunc)
        h, f = homotopy_H_uv(x, y, r), iota_functional(y, operator_F(x, i + j + 1, r))
        out.append(("H=iota F", h == f, None if h == f else (h, f)))
        return out
    return _collect("homotopy", run_trials(one, trials, threads))


def propagator_suite(trials=50, max_dim=6, order=4, seed=0, threads=None):
    """Giv(x, y) = -H^sym(R x, R y) for cycles x, y."""
    def one(t):
        rng = _trial_rng(seed, t)
        cw = random_complex(rng, max_dim)
        c = cw.complex
        r = random_splitting(rng, cw, order)
        ker = [{a: v for a, v in enumerate(k) if v} for k in nullspace(c.d.to_dense())]

        def cycle():
            vec = {}
            for k in ker:
                s = rng.choice([0, 1, -1, 2, Fraction(1, 2)])
                for a, v in k.items():
                    vec[a] = vec.get(a, 0) + s * v
            return {a: v for a, v in vec.items() if v}
        x, y = cycle(), cycle()
        i, j = rng.randint(0, 1), rng.randint(0, 1)
        lhs = givental_propagator(i, j, x, y, r)
        X = UVector(c, "minus", {-i: x}, order)
        Y = UVector(c, "minus", {-j: y}, order)
        rhs = -homotopy_H_sym(r.apply_minus(X), r.apply_minus(Y), r)
        return [(f"Giv({i},{j})", lhs == rhs, None if lhs == rhs else (lhs, rhs))]
    return _collect("propagator", run_trials(one, trials, threads))


# -- graph sums --------------------------------------------------------------------------

def kinv_suite(max_m=3, lambda_order=3, trials=4, max_dim=4, seed=0, threads=None):
    """K^-1 o K = id: the m = 1 part returns the input, m >= 2 parts vanish."""
    def one(t):
        rng = _trial_rng(seed, t)
        cw = random_complex(rng, max_dim)
        c = cw.complex
        r = random_splitting(rng, cw, lambda_order)
        out = []
        for m in range(1, max_m + 1):
            ins = [Graded({(0, 1): random_output_poly(rng, c, rng.randint(1, 3), 1, 2)})
                   for _ in range(m)]
            res = compose_k(c, ins, r, lambda_order)
            if m == 1:
                res = res.add(ins[0], -1)
            out.append((f"m={m}", res.is_zero(), None if res.is_zero() else sorted(res)[0]))
        return out
    return _collect("kinv", run_trials(one, trials, threads))


def linf_suite(trials=10, max_dim=4, order=5, seed=0, threads=None):
    """D K-hat_1 = K-hat_1 D and D K-hat_2 - K-hat_2 D = K-hat_1 [ , ] on random tensors."""
    def one(t):
        rng = _trial_rng(seed, t)
        cw = random_complex(rng, max_dim, require_delta=(t % 2 == 0))
        c = cw.complex
        alg = c.algebra
        r = random_splitting(rng, cw, order)

        def tensor():
            k, l = rng.randint(1, 2), rng.randint(0, 2)
            return Graded({(rng.randint(0, 1), 0): random_vertex_poly(rng, c, k, l, terms=2)})
        g1, g2 = tensor(), tensor()
        x = _product_input(c, [g1], suspended=True)
        d1 = differential_out(c, khat_apply(c, r, x, [1], 0)).add(
            khat_apply(c, r, differential_in(c, x, [1]), [1], 0), -1)
        x = _product_input(c, [g1, g2], suspended=True)
        lhs = differential_out(c, khat_apply(c, r, x, [1, 2], 0)).add(
            khat_apply(c, r, differential_in(c, x, [1, 2]), [1, 2], 0), -1)
        br = bracket_hat(c, x, (1, 2), 0).map(lambda p: to_copy(alg, p, 1))
        d2 = lhs.add(khat_apply(c, r, br, [1], 0), -1)
        return [("m=1", d1.is_zero(), None if d1.is_zero() else sorted(d1)[0]),
                ("m=2", d2.is_zero(), None if d2.is_zero() else sorted(d2)[0])]
    return _collect("linf", run_trials(one, trials, threads))


def collapse_suite(lambda_order=4, trials=2, max_dim=3, seed=0, threads=None):
    """B = 0 and R = id: F-hat_{g,n} is the bare (g,1,n-1) vertex tensor."""
    from .feynman import VertexLibrary, VertexTensor
    from .linalg import SparseMatrix

    def one(t):
        rng = _trial_rng(seed, t)
        c = random_complex(rng, max_dim, kinds=HOMOLOGY_KINDS).complex
        r = ChainSplitting(c, [SparseMatrix.zero(c.dim)] * (lambda_order + 1))
        lib = VertexLibrary()
        for g in range(0, lambda_order // 2 + 2):
            for n in range(1, lambda_order + 3):
                if not 0 < 2 * g - 2 + n <= lambda_order:
                    continue
                for k in range(1, n + 1):
                    lib[(g, k, n - k)] = VertexTensor(c, g, k, n - k,
                                                      random_vertex_poly(rng, c, k, n - k, terms=2))
        out = []
        for (g, k, l) in sorted(lib):
            if k != 1:
                continue
            ok, w = _cmp(compute_invariant(g, l + 1, lib, r), lib[(g, 1, l)].poly)
            out.append((f"(g,n)=({g},{l + 1})", ok, w))
        return out
    return _collect("collapse", run_trials(one, trials, threads))


def equivariance_suite(lambda_order=3, order=3, trials=2, max_dim=3, seed=0, threads=None):
    """F^{R g^-1} = quantized_action(F^R, g) on b = B = 0 complexes with
    master-equation vertex data."""
    def one(t):
        rng = _trial_rng(seed, t)
        c = random_complex(rng, max_dim, kinds=HOMOLOGY_KINDS).complex
        r = random_symplectic(rng, c, order, cls=ChainSplitting)
        e = random_symplectic(rng, c, order, cls=GiventalElement)
        lib = random_hooked_library(rng, c, lambda_order)
        moved = invariant_potential(lib, act_on_splitting(e, r), lambda_order)
        acted = quantized_action(invariant_potential(lib, r, lambda_order), e, lambda_order)
        out = []
        for key in sorted(set(moved) | set(acted)):
            ok, w = _cmp(moved.get(key, {}), acted.get(key, {}))
            out.append((f"(g,n)={key}", ok, w))
        return out
    return _collect("equivariance", run_trials(one, trials, threads))


def dimension_suite(lambda_order=3, trials=1, d=3, seed=0, threads=None):
    """Every F_{g,n} on the graded fixture is homogeneous of the expected degree."""
    def one(t):
        rng = _trial_rng(seed, t)
        cw = graded_fixture(d)
        r = random_splitting(rng, cw, lambda_order + 2)
        lib = random_graded_library(rng, cw.complex, lambda_order)
        pot = invariant_potential(lib, r, lambda_order)
        rep = dimension_check(cw.complex, pot)
        nonzero = any(pot.values())
        return ([("nonzero", nonzero, None)]
                + [(ch.name, ch.passed, ch.witness) for ch in rep.checks])
    return _collect("dimension", run_trials(one, trials, threads))
