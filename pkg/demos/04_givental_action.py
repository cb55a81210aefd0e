"""Changing the splitting by a symplectic series g versus acting on the potential.

On a complex with vanishing differentials, moving R to R g^-1 changes F the same
way as the quantized action of g, which is a graph sum with Givental's edge.
"""
from catenum.feynman import invariant_potential
from catenum.fixtures import make_rng, random_complex, random_hooked_library, random_symplectic
from catenum.givental import GiventalElement, act_on_splitting, check_symplectic, quantized_action
from catenum.splitting import ChainSplitting

rng = make_rng(11)
c = random_complex(rng, 3, kinds=["hom_even", "hom_even_pair", "hom_odd_pair"]).complex
r = random_symplectic(rng, c, 3, cls=ChainSplitting)
g = random_symplectic(rng, c, 3, cls=GiventalElement)
print("g is symplectic:", check_symplectic(g).passed)

lib = random_hooked_library(rng, c, 2)
before = invariant_potential(lib, r, 2)
moved = invariant_potential(lib, act_on_splitting(g, r), 2)
acted = quantized_action(before, g, 2)
for key in sorted(set(moved) | set(acted)):
    print(f"F{key}: recomputed == acted on: {moved.get(key, {}) == acted.get(key, {})}")
