"""Partially directed stable graphs and their weights.

Enumerates the isomorphism classes of type (g, k, l), prints |Aut|, the number
of compatible directed structures and the weight 1/(|Aut| |PD|), then shows the
closed automorphism formula agreeing with brute force.
"""
from fractions import Fraction

from catenum import graphs as gr

for g, k, l in [(0, 1, 2), (1, 1, 1), (0, 1, 3)]:
    classes = gr.enumerate_pd_graphs(g, k, l)
    total = sum((c.weight.weight for c in classes), Fraction(0))
    print(f"type ({g},{k},{l}): {len(classes)} classes, weight sum {total}")
    for c in classes:
        w = c.weight
        print(f"   vertices={c.graph.n_vertices} |Aut|={w.aut_order} |PD|={w.pd_count} weight={w.weight}")

# d parallel edges between two marked vertices: |Aut| = d! before choosing a tree edge
for d in range(2, 6):
    base = gr.LabeledGraph.from_skeleton([0, 1], [0, 0], [(0, 1)] * d)
    print(f"{d} parallel edges: brute {gr.aut_order(base, marking=[0, 1])}, formula {gr.marked_aut_formula(base)}")

# stable graph counts with unordered leaves
for g, n in [(0, 4), (1, 2), (2, 0)]:
    print(f"stable graphs of type ({g},{n}): {len(gr.enumerate_labeled_graphs(g, n))}")
