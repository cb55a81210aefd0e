"""Computing F_{g,n} from vertex data by the stable graph sum.

Uses a random complex with a vertex library of the hooked form, prints the
contributing-graph ledger for (1,2) and checks the trivial collapse.
"""
from fractions import Fraction

from catenum.feynman import VertexLibrary, VertexTensor, compute_invariant, invariant_potential, unhook
from catenum.fixtures import make_rng, random_complex, random_hooked_library, random_splitting, random_vertex_poly
from catenum.linalg import SparseMatrix
from catenum.splitting import ChainSplitting

rng = make_rng(7)
cw = random_complex(rng, 4, require_delta=True)
c = cw.complex
r = random_splitting(rng, cw, 4)
lib = random_hooked_library(rng, c, 2)

ledger = []
total = compute_invariant(1, 2, lib, r, ledger=ledger)
print(f"(1,2): {len(ledger)} contributing classes")
for pd, weight, term in ledger:
    print(f"   vertices={pd.n_vertices} weight={weight} terms={len(term)}")
print("weights add to", sum((w for _, w, _ in ledger), Fraction(0)))

pot = invariant_potential(lib, r, 2)
for key in sorted(pot):
    print(f"F{key} has {len(pot[key])} monomials")
print("F(1,2) equals unhooked total:", pot.get((1, 2), {}) == unhook(c, total))

# with no circle action and R = id only the single-vertex graph survives
hc = random_complex(rng, 3, kinds=["hom_even", "hom_even_pair", "hom_odd_pair"]).complex
trivial = VertexLibrary()
for g, n in [(0, 3), (1, 1), (0, 4), (1, 2)]:
    for k in range(1, n + 1):
        trivial[(g, k, n - k)] = VertexTensor(hc, g, k, n - k, random_vertex_poly(rng, hc, k, n - k, terms=2))
ident = ChainSplitting(hc, [SparseMatrix.zero(hc.dim)] * 3)
print("collapse at (1,2):", compute_invariant(1, 2, trivial, ident) == trivial[(1, 1, 1)].poly)
