"""Exact graph-sum invariants of mixed complexes with splittings.

Modules:
    mixed_complex  complexes with a circle action and pairing, the hatted differential
    splitting      splitting series, the homotopies H, S, F and Givental's propagator
    graphs         stable and partially directed graphs, automorphisms, weights
    feynman        the graph sums K_m, K-hat_m and the invariants F_{g,n}
    givental       Givental group elements and the quantized action
    cli            command line front end
"""

__version__ = "0.1.0"
