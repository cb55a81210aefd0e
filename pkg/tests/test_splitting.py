from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catenum.fixtures import (graded_fixture, make_rng, random_complex, random_splitting, random_uvector,
                              random_vector, two_dim_fixture)
from catenum.linalg import SparseMatrix
from catenum.mixed_complex import SymTensor, TruncationError, UVector
from catenum.splitting import (ChainSplitting, delta_H, givental_propagator, homotopy_H, homotopy_H_sym,
                               homotopy_H_uv, invert_splitting, iota_functional, lagrangian_defect,
                               load_splitting, operator_F, operator_S, save_series, validate_splitting)
from catenum.superpoly import output_var

seeds = st.integers(0, 10 ** 6)


def fixture(seed, order=4, dim=5, need_delta=False):
    rng = make_rng(seed)
    cw = random_complex(rng, dim, require_delta=need_delta)
    return rng, cw.complex, random_splitting(rng, cw, order)


def identity_splitting(c, order=3):
    return ChainSplitting(c, [SparseMatrix.zero(c.dim)] * order)


def pair(c, m, x, y):
    return c.pair(m.apply(x), y)


# -- inverse -----------------------------------------------------------------------

def test_inverse_of_identity():
    c = two_dim_fixture()
    t = invert_splitting(identity_splitting(c))
    assert all(m.is_zero() for m in t.components)


def test_inverse_single_term():
    c = graded_fixture().complex
    M = SparseMatrix(c.dim, c.dim, {(0, 1): 2, (2, 0): Fraction(1, 3)})
    r = ChainSplitting(c, [M, SparseMatrix.zero(c.dim), SparseMatrix.zero(c.dim)])
    t = invert_splitting(r)
    assert t[1] == M.scale(-1)
    assert t[2] == M @ M
    assert t[3] == (M @ M @ M).scale(-1)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_inverse_general(seed):
    _, c, r = fixture(seed)
    t = invert_splitting(r)
    assert t[2] == r[1] @ r[1] - r[2]
    for k in range(1, r.truncation + 1):
        acc = SparseMatrix.zero(c.dim)
        for i in range(k + 1):
            acc = acc + t[i] @ r[k - i]
        assert acc.is_zero()
        assert (c.d @ t[k] - t[k] @ c.d) == t[k - 1] @ c.delta


# -- H ---------------------------------------------------------------------------------

@settings(max_examples=20, deadline=None)
@given(seeds)
def test_homotopy_low_components(seed):
    rng, c, r = fixture(seed)
    t = invert_splitting(r)
    x, y = random_vector(rng, c), random_vector(rng, c)
    assert homotopy_H(0, 0, x, y, r) == pair(c, t[1], x, y)
    assert homotopy_H(0, 1, x, y, r) == -pair(c, t[2] + r[1] @ t[1], x, y)


def test_homotopy_vanishes_for_identity():
    c = graded_fixture().complex
    r = identity_splitting(c)
    for i in range(2):
        for j in range(2):
            assert homotopy_H(i, j, {0: 1, 3: 2}, {1: 1, 4: 1}, r) == 0


def test_homotopy_truncation_error():
    _, c, r = fixture(3, order=2)
    with pytest.raises(TruncationError):
        homotopy_H(1, 1, {0: 1}, {0: 1}, r)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_hsym_low_component(seed):
    rng, c, r = fixture(seed)
    t = invert_splitting(r)
    par = rng.randint(0, 1), rng.randint(0, 1)
    x, y = random_vector(rng, c, par[0]), random_vector(rng, c, par[1])
    X, Y = UVector(c, "minus", {0: x}, 4), UVector(c, "minus", {0: y}, 4)
    want = Fraction(1, 2) * (pair(c, t[1], x, y) + (-1) ** (par[0] * par[1]) * pair(c, t[1], y, x))
    assert homotopy_H_sym(X, Y, r) == want
    if x and par[0] == 0:
        assert homotopy_H_sym(X, X, r) == homotopy_H_uv(X, X, r)


def test_delta_h_arity_rules():
    rng, c, r = fixture(11)
    even = [i for i in range(c.dim) if c.parity[i] == 0][:3]
    if len(even) < 3:
        even = (even * 3)[:3]
    xs = [SymTensor(c, {(output_var(i, -k),): Fraction(1)}) for k, i in enumerate(even)]
    vecs = [UVector(c, "minus", {-k: {i: Fraction(1)}}, 4) for k, i in enumerate(even)]
    assert delta_H(xs[0], r).is_zero()
    assert delta_H(xs[0] * xs[1], r).scalar() == homotopy_H_sym(vecs[0], vecs[1], r)
    lhs = delta_H(xs[0] * xs[1] * xs[2], r)
    rhs = (xs[2].scale(homotopy_H_sym(vecs[0], vecs[1], r))
           + xs[1].scale(homotopy_H_sym(vecs[0], vecs[2], r))
           + xs[0].scale(homotopy_H_sym(vecs[1], vecs[2], r)))
    assert lhs == rhs


# -- S and F ---------------------------------------------------------------------------

def test_operator_s():
    c = two_dim_fixture()
    x = UVector(c, "minus", {0: {0: Fraction(2)}, -1: {0: Fraction(5)}}, 3)
    assert operator_S(x).terms == {1: {1: Fraction(2)}}
    assert operator_S(UVector(c, "minus", {-1: {0: Fraction(1)}}, 3)).is_zero()
    g = graded_fixture().complex
    from catenum.mixed_complex import MixedComplex
    g0 = MixedComplex(g.basis, g.parity, g.d, SparseMatrix.zero(g.dim), g.pairing)
    assert operator_S(UVector(g0, "minus", {0: {2: Fraction(1)}}, 3)).is_zero()


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_operator_f_low_component_and_identity(seed):
    rng, c, r = fixture(seed)
    x = random_vector(rng, c)
    fx = operator_F(UVector(c, "minus", {0: x}, 4), 1, r)
    assert fx.coefficient(1) == invert_splitting(r)[1].apply(x)
    fid = operator_F(UVector(c, "minus", {0: x}, 4), 2, identity_splitting(c, 4))
    assert fid.is_zero()


@settings(max_examples=30, deadline=None)
@given(seeds, st.booleans())
def test_homotopy_identities(seed, need_delta):
    rng, c, r = fixture(seed, order=5, dim=6, need_delta=need_delta)
    a = random_uvector(rng, c, 1, 5, parity=rng.randint(0, 1))
    b = random_uvector(rng, c, 1, 5, parity=rng.randint(0, 1))
    lhs = homotopy_H_uv(a.differential(), b, r) + (-1) ** a.parity() * homotopy_H_uv(a, b.differential(), r)
    omega = sum(c.omega(i, j) * x * y for i, x in a.coefficient(0).items() for j, y in b.coefficient(0).items())
    assert lhs == -omega
    fa = operator_F(a, 3, r).differential() + operator_F(a.differential(), 3, r).scale(-1)
    assert fa.terms == operator_S(a).terms
    i, j = rng.randint(0, 1), rng.randint(0, 1)
    x = UVector(c, "minus", {-i: random_vector(rng, c)}, 5)
    y = UVector(c, "minus", {-j: random_vector(rng, c)}, 5)
    assert homotopy_H_uv(x, y, r) == iota_functional(y, operator_F(x, i + j + 1, r))


# -- Givental propagator --------------------------------------------------------------------

@settings(max_examples=20, deadline=None)
@given(seeds)
def test_givental_low_components(seed):
    rng, c, r = fixture(seed)
    x, y = random_vector(rng, c), random_vector(rng, c)
    assert givental_propagator(0, 0, x, y, r) == pair(c, r[1], x, y)
    assert givental_propagator(0, 1, x, y, r) == -pair(c, r[2], x, y) + c.pair(r[1].apply(x), r[1].apply(y))
    rid = identity_splitting(c, 4)
    assert all(givental_propagator(i, j, x, y, rid) == 0 for i in range(2) for j in range(2))


# -- validation -------------------------------------------------------------------------------

def test_validate_identity_without_circle_action():
    c = graded_fixture().complex
    from catenum.mixed_complex import MixedComplex
    c0 = MixedComplex(c.basis, c.parity, c.d, SparseMatrix.zero(c.dim), c.pairing)
    assert validate_splitting(identity_splitting(c0), strict_lagrangian=True).passed


def test_validate_reports_chain_map_failure():
    c = graded_fixture().complex
    rep = validate_splitting(identity_splitting(c))
    assert not rep["[b,R_1]=-B R_0"].passed
    assert rep["[b,R_1]=-B R_0"].witness is not None


def test_no_splitting_exists_on_two_dim_fixture():
    # b = 0 there, so [b, R_1] = 0 can never equal -B != 0
    c = two_dim_fixture()
    rng = make_rng(0)
    for _ in range(5):
        m = SparseMatrix(2, 2, {(0, 0): rng.randint(-3, 3), (1, 1): rng.randint(-3, 3)})
        rep = validate_splitting(ChainSplitting(c, [m]))
        assert not rep["[b,R_1]=-B R_0"].passed


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_random_splittings_validate(seed):
    _, c, r = fixture(seed)
    assert validate_splitting(r, strict_lagrangian=True).passed
    assert all(lagrangian_defect(r, n).is_zero() for n in range(1, r.truncation + 1))


def test_splitting_file_round_trip(tmp_path):
    _, c, r = fixture(4)
    path = tmp_path / "r.json"
    save_series(r, path)
    assert load_splitting(c, path) == r
