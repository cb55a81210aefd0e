import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catenum.fixtures import graded_fixture, make_rng, random_complex, random_output_poly, two_dim_fixture
from catenum.linalg import SparseMatrix
from catenum.mixed_complex import (MixedComplex, StructuralError, SymTensor, UVector, apply_differential,
                                   apply_hook, bv_bracket, bv_delta, complex_from_dict, complex_to_dict,
                                   hres_pairing, load_complex, residue_pairing, save_complex,
                                   validate_complex)
from catenum.superpoly import add, output_var

seeds = st.integers(0, 10 ** 6)


def vec(c, sector, k, x, trunc=3):
    return UVector(c, sector, {k: x}, trunc)


def single(c, i, k=0):
    return SymTensor(c, {(output_var(i, k),): Fraction(1)})


# -- validation --------------------------------------------------------------------

def test_zero_maps_pass():
    c = MixedComplex(["a", "b"], [0, 0], SparseMatrix.zero(2), SparseMatrix.zero(2), SparseMatrix.identity(2))
    assert validate_complex(c).passed


def test_delta_squared_failure_has_witness():
    # delta e0 = e1, delta e1 = e0 on two odd-distance elements squares to the identity
    delta = SparseMatrix(2, 2, {(1, 0): 1, (0, 1): 1})
    c = MixedComplex(["a", "b"], [0, 1], SparseMatrix.zero(2), delta, SparseMatrix.identity(2))
    rep = validate_complex(c)
    assert not rep["delta^2=0"].passed
    assert rep["delta^2=0"].witness is not None


def test_two_dim_fixture_identities():
    # every identity holds; the pairing of an even with an odd vector is odd
    rep = validate_complex(two_dim_fixture())
    assert [ch.name for ch in rep.failures()] == ["pairing even"]
    for name in ("d^2=0", "delta^2=0", "d*delta+delta*d=0", "pairing symmetric", "delta self-adjoint"):
        assert rep[name].passed


def test_shape_mismatch_is_structural():
    with pytest.raises(StructuralError):
        MixedComplex(["a"], [0], SparseMatrix.zero(2), SparseMatrix.zero(1), SparseMatrix.identity(1))


@settings(max_examples=30, deadline=None)
@given(seeds, st.booleans())
def test_random_complexes_are_valid(seed, need_delta):
    c = random_complex(make_rng(seed), 6, require_delta=need_delta).complex
    assert validate_complex(c).passed


def test_graded_fixture_valid():
    cw = graded_fixture(3)
    rep = validate_complex(cw.complex)
    assert rep.passed
    assert "pairing degree -2d" in [ch.name for ch in rep.checks]


# -- pairings ------------------------------------------------------------------------

def test_residue_pairing_examples():
    c = graded_fixture(3).complex
    x, y = {0: Fraction(1)}, {1: Fraction(3)}
    assert residue_pairing(vec(c, "minus", 0, x), vec(c, "plus", 1, y)) == 3
    assert residue_pairing(vec(c, "plus", 1, x), vec(c, "minus", 0, y)) == -3
    assert residue_pairing(vec(c, "minus", 0, x), vec(c, "minus", 0, y)) == 0


def test_hres_pairing_examples():
    c = graded_fixture(3).complex
    x, y = {0: Fraction(1)}, {1: Fraction(3)}
    assert hres_pairing(vec(c, "minus", 0, x), vec(c, "minus", 0, y)) == {2: 3}
    assert hres_pairing(vec(c, "plus", 1, x), vec(c, "minus", 0, y)) == {3: -3}
    assert not hres_pairing(vec(c, "minus", 0, {}), vec(c, "minus", 0, y))


# -- UVector ---------------------------------------------------------------------------

def test_minus_sector_rejects_positive_powers():
    c = two_dim_fixture()
    with pytest.raises((ValueError, StructuralError)):
        UVector(c, "minus", {1: {0: Fraction(1)}}, 3)


def test_minus_differential_drops_overflow():
    c = two_dim_fixture()
    x = vec(c, "minus", 0, {0: Fraction(1)})
    assert x.differential().is_zero()
    y = vec(c, "minus", -1, {0: Fraction(1)})
    assert y.differential().coefficient(0) == {1: 1}


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_differential_squares_to_zero(seed):
    rng = make_rng(seed)
    c = random_complex(rng, 6).complex
    from catenum.fixtures import random_uvector
    x = random_uvector(rng, c, 3, 4)
    assert x.differential().differential().is_zero()


# -- BV operator --------------------------------------------------------------------------

def test_bv_delta_examples():
    c = two_dim_fixture()
    e = single(c, 0)
    # Delta(e e) = <B e, e> = <f, e> = 1
    assert bv_delta(e * e).scalar() == 1
    assert bv_delta(e).is_zero()
    assert bv_delta(single(c, 0, -1) * single(c, 0)).is_zero()


def test_bv_delta_vanishes_without_circle_action():
    c = graded_fixture(3).complex
    c0 = MixedComplex(c.basis, c.parity, c.d, SparseMatrix.zero(c.dim), c.pairing)
    t = SymTensor(c0, random_output_poly(make_rng(1), c0, 3, 0, 4))
    assert bv_delta(t).is_zero()


def test_bv_bracket_examples():
    c = two_dim_fixture()
    e = single(c, 0)
    # both arity one: the bracket is Delta(x y)
    assert bv_bracket(e, e) == bv_delta(e * e)
    # Delta(e^3) = 3 e, Delta(e^2) e = e, e^2 Delta(e) = 0, so {e^2, e} = 2e
    assert bv_bracket(e * e, e) == e.scale(2)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_bv_delta_squares_to_zero(seed):
    rng = make_rng(seed)
    c = random_complex(rng, 4, require_delta=True).complex
    t = SymTensor(c, random_output_poly(rng, c, 4, 0, 5))
    assert bv_delta(bv_delta(t)).is_zero()


# -- hatted differential -------------------------------------------------------------

@settings(max_examples=25, deadline=None)
@given(seeds)
def test_differential_and_hook(seed):
    rng = make_rng(seed)
    c = random_complex(rng, 5).complex
    from catenum.fixtures import random_vertex_poly
    p = random_vertex_poly(rng, c, 2, 2)
    assert not apply_differential(c, apply_differential(c, p))
    q = random_output_poly(rng, c, 3, 1, 3)
    assert not apply_hook(c, apply_hook(c, q))
    # D and iota anticommute
    lhs = add(apply_differential(c, apply_hook(c, q)), apply_hook(c, apply_differential(c, q)))
    assert not lhs


# -- files --------------------------------------------------------------------------------

def test_complex_round_trip(tmp_path):
    c = graded_fixture(3).complex
    path = tmp_path / "c.json"
    save_complex(c, path)
    back = load_complex(path)
    assert complex_to_dict(back) == complex_to_dict(c)


def test_invalid_complex_file_rejected(tmp_path):
    data = complex_to_dict(two_dim_fixture())
    data["delta"].append([0, 1, "1"])
    with pytest.raises(ValueError):
        complex_from_dict(data)
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"basis": [{"name": "a"}]}))
    with pytest.raises(StructuralError):
        load_complex(path)
