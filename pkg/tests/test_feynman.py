from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catenum import graphs as gr
from catenum.feynman import (Graded, MissingVertexError, Potential, VertexLibrary, VertexTensor, _product_input,
                             apply_legs, bracket_hat, compose_k, compute_invariant, differential_in,
                             differential_out, dimension_check, evaluate_pd_graph, expected_degree, hook,
                             invariant_potential, k_inverse_m, k_m, khat_apply, load_library,
                             potential_exp_log, save_library, to_copy, unhook)
from catenum.fixtures import (graded_fixture, make_rng, random_complex, random_graded_library,
                              random_output_poly, random_splitting,
                              random_vertex_poly, two_dim_fixture)
from catenum.graphs import IN, OUT, LabeledGraph, PDGraph
from catenum.linalg import SparseMatrix
from catenum.mixed_complex import MixedComplex, StructuralError
from catenum.splitting import ChainSplitting, delta_H_poly, hsym_basis, invert_splitting
from catenum.superpoly import add, input_var, output_var, scale

seeds = st.integers(0, 10 ** 6)


def identity_splitting(c, order=4):
    return ChainSplitting(c, [SparseMatrix.zero(c.dim)] * order)


def no_circle(c):
    return MixedComplex(c.basis, c.parity, c.d, SparseMatrix.zero(c.dim), c.pairing)


def one_tree_edge():
    g = LabeledGraph.from_skeleton([0, 1], [1, 1], [(0, 1)])
    return PDGraph(g, (IN, OUT, None, None), frozenset({(2, 3)}), frozenset({(2, 3)}))


def full_library(rng, c, lam, terms=2):
    lib = VertexLibrary()
    for g in range(0, lam // 2 + 2):
        for n in range(1, lam + 3):
            if 0 < 2 * g - 2 + n <= lam:
                for k in range(1, n + 1):
                    lib[(g, k, n - k)] = VertexTensor(c, g, k, n - k, random_vertex_poly(rng, c, k, n - k, terms=terms))
    return lib


# -- vertex tensors and files ------------------------------------------------------------

def test_vertex_tensor_type_checks():
    c = two_dim_fixture()
    with pytest.raises(StructuralError):
        VertexTensor(c, 0, 1, 1, {(input_var(0), output_var(0)): Fraction(1)})
    with pytest.raises(StructuralError):
        VertexTensor(c, 0, 1, 2, {(input_var(0), output_var(0)): Fraction(1)})


def test_library_round_trip_keeps_empty_keys(tmp_path):
    rng = make_rng(2)
    c = random_complex(rng, 4).complex
    lib = full_library(rng, c, 2)
    lib[(0, 3, 0)] = VertexTensor(c, 0, 3, 0, {})
    path = tmp_path / "lib.jsonl"
    save_library(lib, path)
    back = load_library(c, path)
    assert sorted(back) == sorted(lib)
    assert all(back[k] == lib[k] for k in lib)


# -- single graphs ---------------------------------------------------------------------------

def test_star_graph_returns_decoration():
    rng = make_rng(1)
    c = random_complex(rng, 4).complex
    r = random_splitting(rng, random_complex(make_rng(1), 4), 3)
    beta = random_vertex_poly(rng, c, 1, 2)
    g = LabeledGraph.from_skeleton([0], [3], [])
    pd = PDGraph(g, (IN, OUT, OUT), frozenset(), frozenset())
    assert evaluate_pd_graph(pd, [beta], r) == beta


def test_multi_vertex_graphs_vanish_for_trivial_data():
    rng = make_rng(4)
    c = no_circle(graded_fixture().complex)
    r = identity_splitting(c)
    for cls in gr.enumerate_pd_graphs(1, 1, 1):
        pd = cls.graph
        if pd.n_vertices == 1:
            continue
        decs = []
        for v in range(pd.n_vertices):
            k, l = gr.vertex_io_counts(pd, v)
            decs.append(random_vertex_poly(rng, c, k, l, terms=3))
        assert evaluate_pd_graph(pd, decs, r) == {}


def test_one_tree_edge_hand_composition():
    # vertex 0: xi(a,1) q(b); vertex 1: xi(b,1) q(b'); the edge carries -F_{0,0} = -T_1.
    # Expanding the contraction and the theta bookkeeping by hand gives
    # +(-T_1)_{bb} for b even and -(-T_1)_{bb} for b odd (q(b) passes one odd xi).
    c = two_dim_fixture()
    alg = c.algebra
    r = ChainSplitting(c, [SparseMatrix(2, 2, {(0, 0): 3, (1, 1): 5, (0, 1): 7, (1, 0): 2}), SparseMatrix.zero(2)])
    t1 = invert_splitting(r)[1]
    pd = one_tree_edge()
    for b, sign in ((0, 1), (1, -1)):
        b0 = alg.monomial([input_var(0, 1), output_var(b, 0)])
        b1 = alg.monomial([input_var(b, 1), output_var(b, 0)])
        want = alg.monomial([input_var(0, 1), output_var(b, 0)], sign * -t1.get(b, b))
        assert evaluate_pd_graph(pd, [b0, b1], r) == want


def test_decoration_type_mismatch():
    c = two_dim_fixture()
    alg = c.algebra
    bad = alg.monomial([input_var(0, 1)])
    with pytest.raises(StructuralError):
        evaluate_pd_graph(one_tree_edge(), [bad, bad], identity_splitting(c))


# -- undirected sums ---------------------------------------------------------------------------

def test_k1_loop_terms():
    rng = make_rng(8)
    cw = random_complex(rng, 4)
    c = cw.complex
    r = random_splitting(rng, cw, 4)
    x = random_output_poly(rng, c, 2, 1, 1)
    y = random_output_poly(rng, c, 4, 1, 1)
    out = k_m(c, [Graded({(0, 2): add(x, y)})], r, 6)
    assert out[(0, 2)] == add(x, y)
    assert out[(1, 2)] == add(delta_H_poly(r, x), delta_H_poly(r, y))
    two = delta_H_poly(r, delta_H_poly(r, y))
    assert out.get((2, 2), {}) == scale(two, Fraction(1, 2))
    inv = k_inverse_m(c, [Graded({(0, 2): x})], r, 6)
    assert inv[(1, 2)] == scale(delta_H_poly(r, x), -1)


def test_k1_single_loop_is_hsym_value():
    rng = make_rng(3)
    cw = random_complex(rng, 4)
    c = cw.complex
    r = random_splitting(rng, cw, 4)
    a, b = 0, c.dim - 1
    p = c.algebra.monomial([output_var(a, 0), output_var(b, -1)])
    out = k_m(c, [Graded({(0, 2): p})], r, 4)
    coef = next(iter(p.values()))
    assert out.get((1, 2), {}).get((), 0) == coef * hsym_basis(a, 0, b, 1, r)


@settings(max_examples=8, deadline=None)
@given(seeds)
def test_k_inverse_composition(seed):
    rng = make_rng(seed)
    cw = random_complex(rng, 4)
    c = cw.complex
    r = random_splitting(rng, cw, 3)
    for m in (1, 2, 3):
        ins = [Graded({(0, 1): random_output_poly(rng, c, rng.randint(1, 3), 1, 2)}) for _ in range(m)]
        out = compose_k(c, ins, r, 3)
        if m == 1:
            out = out.add(ins[0], -1)
        assert out.is_zero()


# -- hatted sums ------------------------------------------------------------------------------

@settings(max_examples=6, deadline=None)
@given(seeds)
def test_linf_identities(seed):
    rng = make_rng(seed)
    cw = random_complex(rng, 4, require_delta=True)
    c = cw.complex
    alg = c.algebra
    r = random_splitting(rng, cw, 5)
    g1 = Graded({(0, 0): random_vertex_poly(rng, c, 1, 2, terms=2)})
    g2 = Graded({(0, 0): random_vertex_poly(rng, c, 2, 1, terms=2)})
    x = _product_input(c, [g1], suspended=True)
    assert differential_out(c, khat_apply(c, r, x, [1], 0)) == khat_apply(c, r, differential_in(c, x, [1]), [1], 0)
    x = _product_input(c, [g1, g2], suspended=True)
    lhs = differential_out(c, khat_apply(c, r, x, [1, 2], 0)).add(
        khat_apply(c, r, differential_in(c, x, [1, 2]), [1, 2], 0), -1)
    br = bracket_hat(c, x, (1, 2), 0).map(lambda p: to_copy(alg, p, 1))
    assert lhs.add(khat_apply(c, r, br, [1], 0), -1).is_zero()


def test_khat1_without_loops_is_identity():
    rng = make_rng(5)
    cw = random_complex(rng, 4)
    c = cw.complex
    r = random_splitting(rng, cw, 3)
    g1 = Graded({(0, 0): random_vertex_poly(rng, c, 1, 1, terms=3)})
    x = _product_input(c, [g1], suspended=True)
    out = khat_apply(c, r, x, [1], 0)
    assert {k: v for k, v in out.items() if k[0] == 0} == {k: v for k, v in x.map(
        lambda p: to_copy(c.algebra, p, 0)).items()}


@settings(max_examples=5, deadline=None)
@given(seeds)
def test_hooked_library_gives_k_sum(seed):
    # with vertex data iota(gamma) the invariant is the connected K-sum of gamma
    rng = make_rng(seed)
    cw = random_complex(rng, 4, require_delta=True)
    c = cw.complex
    r = random_splitting(rng, cw, 4)
    lam = 2
    gammas = {}
    lib = VertexLibrary()
    for g in range(2):
        for n in range(1, 5):
            if 0 < 2 * g - 2 + n <= lam:
                gammas[(g, n)] = c.algebra.split_parity(random_output_poly(rng, c, n, 1, 3))[0]
                for k in range(1, n + 1):
                    lib[(g, k, n - k)] = VertexTensor(c, g, k, n - k, hook(c, gammas[(g, n)]) if k == 1 else {})
    x = Graded()
    for (g, n), p in gammas.items():
        x.add_term((g, 2 * g - 2 + n), p)
    total = Graded()
    for m in range(1, lam + 1):
        total = total.add(k_m(c, [x] * m, r, lam).scale(Fraction(1, factorial(m))))
    for (g, n) in gammas:
        want = {mono: v for mono, v in total.get((g, 2 * g - 2 + n), {}).items() if len(mono) == n}
        assert unhook(c, compute_invariant(g, n, lib, r, legs=False)) == want


# -- invariants --------------------------------------------------------------------------------

def test_invariant_03_is_half_the_star():
    rng = make_rng(6)
    cw = random_complex(rng, 4, require_delta=True)
    c = cw.complex
    r = random_splitting(rng, cw, 3)
    lib = full_library(rng, c, 1)
    ledger = []
    total = compute_invariant(0, 3, lib, r, ledger=ledger)
    assert len(ledger) == 1 and ledger[0][1] == Fraction(1, 2)
    assert total == apply_legs(c, lib[(0, 1, 2)].poly, r, invert_splitting(r))


def test_invariant_12_ledger():
    rng = make_rng(7)
    cw = random_complex(rng, 4, require_delta=True)
    c = cw.complex
    r = random_splitting(rng, cw, 4)
    lib = full_library(rng, c, 2)
    ledger = []
    total = compute_invariant(1, 2, lib, r, ledger=ledger, legs=False)
    assert sorted(w for _, w, _ in ledger) == sorted([Fraction(1), Fraction(1)] + [Fraction(1, 2)] * 4)
    acc = {}
    for _, _, term in ledger:
        acc = add(acc, term)
    assert acc == total


@pytest.mark.parametrize("g,n", [(0, 3), (0, 4), (1, 1), (1, 2), (0, 5), (1, 3), (2, 1)])
def test_trivial_collapse(g, n):
    rng = make_rng(g * 10 + n)
    c = random_complex(rng, 3, kinds=["hom_even", "hom_even_pair", "hom_odd_pair"]).complex
    lib = full_library(rng, c, 3)
    assert compute_invariant(g, n, lib, identity_splitting(c)) == lib[(g, 1, n - 1)].poly


def test_missing_vertex_keys_listed():
    rng = make_rng(1)
    c = random_complex(rng, 3).complex
    lib = full_library(rng, c, 1)
    with pytest.raises(MissingVertexError) as info:
        compute_invariant(1, 2, lib, identity_splitting(c))
    assert (1, 1, 1) in info.value.missing


def test_unstable_key_rejected():
    c = two_dim_fixture()
    with pytest.raises(StructuralError):
        compute_invariant(0, 2, VertexLibrary(), identity_splitting(c))


# -- hook and unhook ------------------------------------------------------------------------------

@settings(max_examples=25, deadline=None)
@given(seeds)
def test_unhook_inverts_hook(seed):
    rng = make_rng(seed)
    c = random_complex(rng, 5).complex
    p = random_output_poly(rng, c, 3, 2, 3)
    assert unhook(c, hook(c, p)) == p


def test_unhook_zero_and_one_dim():
    c = MixedComplex(["e"], [0], SparseMatrix.zero(1), SparseMatrix.zero(1), SparseMatrix(1, 1, {(0, 0): 2}))
    assert unhook(c, {}) == {}
    # hook(q) = -<e,e> xi = -2 xi, so unhook(xi q) = (1/2)(1/2)(-1) q q
    p = c.algebra.monomial([input_var(0, 1), output_var(0, 0)])
    assert unhook(c, p) == c.algebra.monomial([output_var(0, 0), output_var(0, 0)], Fraction(-1, 4))


# -- potentials -----------------------------------------------------------------------------------

def test_exp_of_zero_is_one():
    c = graded_fixture().complex
    assert potential_exp_log(c, Potential(), "exp", 3) == Graded({(0, 0): {(): Fraction(1)}})


def test_exp_of_single_term():
    c = graded_fixture().complex
    alg = c.algebra
    f = alg.monomial([output_var(0, 0), output_var(1, 0), output_var(2, -1)], 3)
    p = Potential()
    p[(0, 3)] = f
    e = potential_exp_log(c, p, "exp", 3)
    assert e[(-1, 1)] == f
    assert e[(-2, 2)] == scale(alg.mul(f, f), Fraction(1, 2))
    assert e[(-3, 3)] == scale(alg.mul(alg.mul(f, f), f), Fraction(1, 6))


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_log_exp_round_trip(seed):
    rng = make_rng(seed)
    c = random_complex(rng, 3).complex
    p = Potential()
    for (g, n) in [(0, 3), (1, 1), (1, 2), (0, 4), (2, 1)]:
        q = random_output_poly(rng, c, n, 1, 2)
        if q:
            p[(g, n)] = q
    back = potential_exp_log(c, potential_exp_log(c, p, "exp", 4), "log", 4)
    assert back == {k: v for k, v in p.items() if 2 * k[0] - 2 + k[1] <= 4}


# -- dimension axiom ------------------------------------------------------------------------------

def test_expected_degrees():
    assert expected_degree(0, 3, 3) == 6
    assert expected_degree(1, 1, 0) == 2


def test_dimension_axiom_and_corruption():
    rng = make_rng(3)
    cw = graded_fixture(3)
    c = cw.complex
    r = random_splitting(rng, cw, 4)
    lib = random_graded_library(rng, c, 2)
    pot = invariant_potential(lib, r, 2)
    assert any(pot.values())
    assert dimension_check(c, pot).passed
    bad = Potential(pot)
    bad[(0, 3)] = add(bad.get((0, 3), {}), c.algebra.monomial([output_var(0), output_var(0), output_var(0)]))
    rep = dimension_check(c, bad)
    assert [ch.name for ch in rep.failures()] == ["deg F_0,3 = 6"]


def test_dimension_check_needs_degrees():
    c = two_dim_fixture()
    with pytest.raises(StructuralError):
        dimension_check(c, Potential())


def test_potential_rejects_unstable_keys():
    with pytest.raises(StructuralError):
        Potential()[(0, 2)] = {}
