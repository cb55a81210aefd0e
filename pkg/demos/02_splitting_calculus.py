"""The homotopies built from a splitting.

Draws a random mixed complex with a splitting R, inverts it, and checks the
homotopy identities exactly on a couple of random vectors.
"""
from catenum.fixtures import make_rng, random_complex, random_splitting, random_uvector, random_vector
from catenum.mixed_complex import UVector, validate_complex
from catenum.splitting import (givental_propagator, homotopy_H_sym, homotopy_H_uv, invert_splitting,
                               iota_functional, operator_F, operator_S, validate_splitting)

rng = make_rng(2024)
cw = random_complex(rng, 5, require_delta=True)
c = cw.complex
print("basis:", c.basis, "parities:", c.parity)
print("complex checks pass:", validate_complex(c).passed)

r = random_splitting(rng, cw, 5)
print("splitting checks pass:", validate_splitting(r, strict_lagrangian=True).passed)
t = invert_splitting(r)
print("first inverse component equals -R_1:", t[1] == r[1].scale(-1))

a = random_uvector(rng, c, 1, 5, parity=0)
b = random_uvector(rng, c, 1, 5, parity=1)
lhs = homotopy_H_uv(a.differential(), b, r) + homotopy_H_uv(a, b.differential(), r)
omega = sum(c.omega(i, j) * x * y for i, x in a.coefficient(0).items() for j, y in b.coefficient(0).items())
print("H is a homotopy to -Omega:", lhs == -omega, lhs)

fa = operator_F(a, 3, r).differential() + operator_F(a.differential(), 3, r).scale(-1)
print("commutator of the differential with F equals S:", fa.terms == operator_S(a).terms)

x = UVector(c, "minus", {0: random_vector(rng, c)}, 5)
y = UVector(c, "minus", {-1: random_vector(rng, c)}, 5)
print("H(x, y) =", homotopy_H_uv(x, y, r), "= iota(y)(F x) =", iota_functional(y, operator_F(x, 2, r)))
print("symmetrized H(x, y) =", homotopy_H_sym(x, y, r))
print("Givental propagator Giv_{0,1}(x, y):", givental_propagator(0, 1, x.coefficient(0), y.coefficient(-1), r))
