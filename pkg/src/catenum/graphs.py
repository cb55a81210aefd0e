"""Genus-labelled graphs with leaves, markings and partially directed
structures: representation, enumeration up to isomorphism, automorphism
groups and the weights attached to partially directed graphs.

A graph is stored on half-edges.  ``vertex_of[h]`` is the vertex carrying
half-edge h and ``partner`` is an involution whose 2-cycles are the edges
and whose fixed points are the leaves.  Loops are two half-edges at the same
vertex paired with each other.
"""

import json
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations, product
from math import comb, factorial


class GraphError(ValueError):
    pass


# -- labelled graphs ---------------------------------------------------------

@dataclass(frozen=True)
class LabeledGraph:
    genera: tuple
    vertex_of: tuple
    partner: tuple

    def __post_init__(self):
        if len(self.vertex_of) != len(self.partner):
            raise GraphError("vertex_of and partner differ in length")
        for h, p in enumerate(self.partner):
            if self.partner[p] != h:
                raise GraphError("partner is not an involution")
        for v in self.vertex_of:
            if not 0 <= v < len(self.genera):
                raise GraphError(f"half-edge on unknown vertex {v}")

    @classmethod
    def from_skeleton(cls, genera, leaves, edges):
        """Build from per-vertex leaf counts and a list of (v, w) edges.

        Half-edges are numbered leaves first (vertex order), then edges in the
        given order, tail side first.
        """
        vertex_of, partner = [], []
        for v, n in enumerate(leaves):
            for _ in range(n):
                partner.append(len(vertex_of))
                vertex_of.append(v)
        for v, w in edges:
            h = len(vertex_of)
            vertex_of += [v, w]
            partner += [h + 1, h]
        return cls(tuple(genera), tuple(vertex_of), tuple(partner))

    @property
    def n_vertices(self):
        return len(self.genera)

    @property
    def n_half_edges(self):
        return len(self.vertex_of)

    def edges(self):
        return [(h, p) for h, p in enumerate(self.partner) if h < p]

    def leaves(self):
        return [h for h, p in enumerate(self.partner) if h == p]

    def half_edges_at(self, v):
        return [h for h, x in enumerate(self.vertex_of) if x == v]

    def valency(self, v):
        return sum(1 for x in self.vertex_of if x == v)

    def is_loop(self, e):
        return self.vertex_of[e[0]] == self.vertex_of[e[1]]

    def is_connected(self):
        n = self.n_vertices
        if n == 0:
            return False
        adj = {v: set() for v in range(n)}
        for a, b in self.edges():
            va, vb = self.vertex_of[a], self.vertex_of[b]
            adj[va].add(vb)
            adj[vb].add(va)
        seen, stack = {0}, [0]
        while stack:
            v = stack.pop()
            for w in adj[v] - seen:
                seen.add(w)
                stack.append(w)
        return len(seen) == n

    def skeleton(self):
        """(leaf counts, loop counts, {(v, w): multiplicity for v < w})."""
        leaves = [0] * self.n_vertices
        loops = [0] * self.n_vertices
        mult = Counter()
        for h in self.leaves():
            leaves[self.vertex_of[h]] += 1
        for a, b in self.edges():
            va, vb = self.vertex_of[a], self.vertex_of[b]
            if va == vb:
                loops[va] += 1
            else:
                mult[(min(va, vb), max(va, vb))] += 1
        return leaves, loops, dict(mult)


def genus(g):
    if not g.is_connected():
        raise GraphError("genus is only defined for connected graphs")
    return sum(g.genera) + len(g.edges()) - g.n_vertices + 1


def is_stable(g):
    return all(2 * g.genera[v] - 2 + g.valency(v) > 0 for v in range(g.n_vertices))


# -- partially directed graphs -------------------------------------------------

IN, OUT = "in", "out"


@dataclass(frozen=True)
class PDGraph:
    """Labelled graph with leaf directions, directed edges and a spanning tree.

    ``directed`` holds (tail half-edge, head half-edge) pairs; ``tree`` is a
    subset of ``directed``.
    """
    base: LabeledGraph
    leaf_dir: tuple          # per half-edge: "in", "out" or None for edge halves
    directed: frozenset
    tree: frozenset

    @property
    def n_vertices(self):
        return self.base.n_vertices

    def kl(self):
        k = sum(1 for d in self.leaf_dir if d == IN)
        l = sum(1 for d in self.leaf_dir if d == OUT)
        return k, l

    def edge_kind(self, e):
        """'tree', 'directed' or 'undirected' for an edge (pair of halves, any order)."""
        a, b = e
        for pair in ((a, b), (b, a)):
            if pair in self.tree:
                return "tree"
            if pair in self.directed:
                return "directed"
        return "undirected"

    def oriented(self, e):
        a, b = e
        if (a, b) in self.directed:
            return (a, b)
        if (b, a) in self.directed:
            return (b, a)
        return None

    def genus(self):
        return genus(self.base)

    def type(self):
        k, l = self.kl()
        return (self.genus(), k, l)


def vertex_io_counts(pd, v):
    """(inputs, outputs) at v: directed halves by orientation, leaves by tag,
    undirected halves count as outputs."""
    k = l = 0
    heads = {b for _, b in pd.directed}
    for h in pd.base.half_edges_at(v):
        d = pd.leaf_dir[h]
        if d == IN or h in heads:
            k += 1
        else:
            l += 1
    return k, l


def vertex_type(pd):
    return tuple(vertex_io_counts(pd, v) for v in range(pd.n_vertices))


def _reachable(n, arcs, src):
    adj = {v: [] for v in range(n)}
    for a, b in arcs:
        adj[a].append(b)
    seen, stack = set(), [src]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def _is_spanning_tree(n, vertex_pairs):
    if len(vertex_pairs) != n - 1:
        return False
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x
    for a, b in vertex_pairs:
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        parent[ra] = rb
    return True


def _acyclic(n, arcs):
    indeg = [0] * n
    adj = {v: [] for v in range(n)}
    for a, b in arcs:
        adj[a].append(b)
        indeg[b] += 1
    queue = [v for v in range(n) if indeg[v] == 0]
    seen = 0
    while queue:
        v = queue.pop()
        seen += 1
        for w in adj[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(w)
    return seen == n


def pd_violations(pd):
    """List of violated conditions (empty for a valid partially directed graph)."""
    g = pd.base
    n = g.n_vertices
    vo = g.vertex_of
    bad = []
    edges = set(g.edges())
    for a, b in pd.directed:
        if (min(a, b), max(a, b)) not in edges:
            bad.append("directed pair is not an edge")
    if not pd.tree <= pd.directed:
        bad.append("tree is not a subset of the directed edges")
    tree_arcs = [(vo[a], vo[b]) for a, b in pd.tree]
    if not _is_spanning_tree(n, tree_arcs):
        bad.append("tree is not a spanning tree")
    for v in range(n):
        if vertex_io_counts(pd, v)[0] < 1:
            bad.append(f"vertex {v} has no incoming half-edge")
    for a, b in sorted(pd.directed):
        va, vb = vo[a], vo[b]
        if va == vb or vb not in _reachable(n, tree_arcs, va):
            bad.append(f"directed edge {(a, b)} has no tree path in its direction")
    for h in g.leaves():
        if pd.leaf_dir[h] not in (IN, OUT):
            bad.append(f"leaf {h} has no direction")
    return bad


def is_valid_pd(pd):
    return not pd_violations(pd)


def enumerate_pd_structures(g, leaf_dir, vertex_type=None):
    """All partially directed structures on (g, leaf_dir), not up to isomorphism.

    Iteration order: edges in ``g.edges()`` order, each tried as undirected,
    then oriented along its stored half-edge order, then reversed; tree
    subsets in lexicographic order of the directed edge list.
    """
    n = g.n_vertices
    vo = g.vertex_of
    leaf_dir = tuple(leaf_dir)
    in_leaves = [0] * n
    for h in g.leaves():
        if leaf_dir[h] == IN:
            in_leaves[vo[h]] += 1
    edges = g.edges()
    options = []
    for a, b in edges:
        if vo[a] == vo[b]:
            options.append([None])
        else:
            options.append([None, (a, b), (b, a)])
    out = []
    for choice in product(*options):
        arcs = [c for c in choice if c is not None]
        if len(arcs) < n - 1:
            continue
        heads = [0] * n
        for _, b in arcs:
            heads[vo[b]] += 1
        if vertex_type is not None:
            if any(in_leaves[v] + heads[v] != vertex_type[v][0] for v in range(n)):
                continue
        elif any(in_leaves[v] + heads[v] < 1 for v in range(n)):
            continue
        varcs = [(vo[a], vo[b]) for a, b in arcs]
        if not _acyclic(n, varcs):
            continue
        directed = frozenset(arcs)
        for tree in combinations(arcs, n - 1):
            tarcs = [(vo[a], vo[b]) for a, b in tree]
            if not _is_spanning_tree(n, tarcs):
                continue
            reach = {v: _reachable(n, tarcs, v) for v in range(n)}
            if all(vb in reach[va] for va, vb in varcs):
                pd = PDGraph(g, leaf_dir, directed, frozenset(tree))
                if vertex_type is not None and tuple(
                        vertex_io_counts(pd, v) for v in range(n)) != tuple(vertex_type):
                    continue
                out.append(pd)
    return out


def pd_count(pd):
    """|PD(G)|: structures on the same graph and leaves with the same vertex type."""
    return len(enumerate_pd_structures(pd.base, pd.leaf_dir, vertex_type(pd)))


# -- automorphisms -------------------------------------------------------------

def _half_colors(g, pd=None, leaf_partition=None):
    colors = []
    for h in range(g.n_half_edges):
        if g.partner[h] == h:
            c = ("leaf", pd.leaf_dir[h] if pd is not None else None,
                 leaf_partition[h] if leaf_partition is not None else None)
        elif pd is None:
            c = ("edge",)
        else:
            e = (min(h, g.partner[h]), max(h, g.partner[h]))
            o = pd.oriented(e)
            if o is None:
                c = ("undirected",)
            else:
                kind = "tree" if o in pd.tree else "directed"
                c = (kind, "tail" if o[0] == h else "head")
        colors.append(c)
    return colors


class _AutSearch:
    def __init__(self, g, vertex_colors, half_colors):
        self.g = g
        self.vcol = vertex_colors
        self.hcol = half_colors
        self.H = g.n_half_edges

    def extend(self, fixed):
        """Find a full automorphism extending the partial map ``fixed`` (dict), or None."""
        g = self.g
        sigma = [None] * self.H
        tau = [None] * g.n_vertices
        used_h = set()
        used_v = set()

        def assign(h, k):
            # returns list of undo records or None on conflict
            if sigma[h] is not None:
                return [] if sigma[h] == k else None
            if k in used_h or self.hcol[h] != self.hcol[k]:
                return None
            v, w = g.vertex_of[h], g.vertex_of[k]
            undo = []
            if tau[v] is None:
                if w in used_v or self.vcol[v] != self.vcol[w]:
                    return None
                tau[v] = w
                used_v.add(w)
                undo.append(("v", v))
            elif tau[v] != w:
                return None
            sigma[h] = k
            used_h.add(k)
            undo.append(("h", h))
            return undo

        def undo_all(records):
            for kind, x in reversed(records):
                if kind == "v":
                    used_v.discard(tau[x])
                    tau[x] = None
                else:
                    used_h.discard(sigma[x])
                    sigma[x] = None

        def assign_pair(h, k):
            r1 = assign(h, k)
            if r1 is None:
                return None
            p, q = g.partner[h], g.partner[k]
            if (p == h) != (q == k):
                undo_all(r1)
                return None
            r2 = assign(p, q)
            if r2 is None:
                undo_all(r1)
                return None
            return r1 + r2

        records = []
        for h, k in fixed.items():
            r = assign_pair(h, k)
            if r is None:
                undo_all(records)
                return None
            records += r

        def rec(h):
            while h < self.H and sigma[h] is not None:
                h += 1
            if h == self.H:
                return True
            v = g.vertex_of[h]
            if tau[v] is not None:
                cands = [k for k in range(self.H) if g.vertex_of[k] == tau[v]]
            else:
                cands = range(self.H)
            for k in cands:
                r = assign_pair(h, k)
                if r is None:
                    continue
                if rec(h + 1):
                    return True
                undo_all(r)
            return False

        if rec(0):
            return tuple(sigma)
        undo_all(records)
        return None

    def group(self):
        """(order, generators) via a stabilizer chain over half-edges."""
        gens = []
        order = 1
        fixed = {}
        for h in range(self.H):
            if h in fixed:
                continue
            orbit = 0
            for k in range(self.H):
                trial = dict(fixed)
                trial[h] = k
                perm = self.extend(trial)
                if perm is not None:
                    orbit += 1
                    if k != h:
                        gens.append(perm)
            order *= orbit
            fixed[h] = h
            fixed[self.g.partner[h]] = self.g.partner[h]
        return order, gens


def automorphism_group(g, marking=None, fixed_leaf_partition=None, pd=None):
    """Order and generators of the automorphism group (half-edge permutations).

    ``marking`` fixes every vertex; ``fixed_leaf_partition`` maps each leaf to a
    class label that must be preserved; ``pd`` adds directions and the tree.
    """
    base = pd.base if pd is not None else g
    if marking is not None:
        vcol = [(base.genera[v], marking.index(v)) for v in range(base.n_vertices)]
    else:
        vcol = [(base.genera[v],) for v in range(base.n_vertices)]
    search = _AutSearch(base, vcol, _half_colors(base, pd, fixed_leaf_partition))
    return search.group()


def aut_order(g, marking=None, fixed_leaf_partition=None, pd=None):
    return automorphism_group(g, marking, fixed_leaf_partition, pd)[0]


def marked_aut_formula(g):
    """prod_v l_v! 2^{c(v)} c(v)! * prod over vertex pairs n(v,w)!  (vertices fixed)."""
    leaves, loops, mult = g.skeleton()
    out = 1
    for v in range(g.n_vertices):
        out *= factorial(leaves[v]) * 2 ** loops[v] * factorial(loops[v])
    for m in mult.values():
        out *= factorial(m)
    return out


def marked_edge_aut(pd_or_skeleton):
    """|Aut| of a marked partially directed graph with leaves held fixed:
    2^c c! per vertex for loops and n! per bundle of equal-type parallel edges."""
    pd = pd_or_skeleton
    g = pd.base
    vo = g.vertex_of
    bundles = Counter()
    for e in g.edges():
        a, b = e
        kind = pd.edge_kind(e)
        if vo[a] == vo[b]:
            bundles[("loop", vo[a])] += 1
        elif kind == "undirected":
            bundles[("u", min(vo[a], vo[b]), max(vo[a], vo[b]))] += 1
        else:
            t, hd = pd.oriented(e)
            bundles[(kind, vo[t], vo[hd])] += 1
    out = 1
    for key, m in bundles.items():
        out *= factorial(m) * (2 ** m if key[0] == "loop" else 1)
    return out


# -- canonical forms -----------------------------------------------------------

def _vertex_data(pd_or_g):
    if isinstance(pd_or_g, PDGraph):
        pd, g = pd_or_g, pd_or_g.base
    else:
        pd, g = None, pd_or_g
    n = g.n_vertices
    vo = g.vertex_of
    inl, outl, loops = [0] * n, [0] * n, [0] * n
    pair = Counter()
    for h in g.leaves():
        if pd is None or pd.leaf_dir[h] != IN:
            outl[vo[h]] += 1
        else:
            inl[vo[h]] += 1
    for e in g.edges():
        a, b = e
        if vo[a] == vo[b]:
            loops[vo[a]] += 1
            continue
        kind = "undirected" if pd is None else pd.edge_kind(e)
        if kind == "undirected":
            pair[("u", frozenset((vo[a], vo[b])))] += 1
        else:
            t, hd = pd.oriented(e)
            pair[(kind, vo[t], vo[hd])] += 1
    return inl, outl, loops, pair


def _encode(perm_inv, genera, inl, outl, loops, pair):
    """Encoding of the graph with vertex v renamed to perm_inv[v]."""
    n = len(genera)
    order = sorted(range(n), key=lambda v: perm_inv[v])
    verts = tuple((genera[v], inl[v], outl[v], loops[v]) for v in order)
    rel = []
    for key, m in pair.items():
        if key[0] == "u":
            a, b = sorted(perm_inv[x] for x in key[1])
            rel.append(("u", a, b, m))
        else:
            rel.append((key[0], perm_inv[key[1]], perm_inv[key[2]], m))
    return (verts, tuple(sorted(rel)))


def canonical_form(x, marked=False):
    """Complete isomorphism invariant of a LabeledGraph or PDGraph.

    Marked graphs keep their vertex order; otherwise the minimum encoding over
    all vertex relabelings that respect a coarse vertex invariant is used.
    """
    g = x.base if isinstance(x, PDGraph) else x
    inl, outl, loops, pair = _vertex_data(x)
    n = g.n_vertices
    genera = g.genera
    if marked:
        return _encode(list(range(n)), genera, inl, outl, loops, pair)
    deg = [g.valency(v) for v in range(n)]
    inv = [(genera[v], inl[v], outl[v], loops[v], deg[v]) for v in range(n)]
    classes = {}
    for v in range(n):
        classes.setdefault(inv[v], []).append(v)
    keys = sorted(classes)
    slots = []
    start = 0
    for k in keys:
        slots.append((classes[k], list(range(start, start + len(classes[k])))))
        start += len(classes[k])
    best = None
    for choice in product(*[permutations(pos) for _, pos in slots]):
        perm_inv = [0] * n
        for (verts, _), pos in zip(slots, choice):
            for v, p in zip(verts, pos):
                perm_inv[v] = p
        enc = _encode(perm_inv, genera, inl, outl, loops, pair)
        if best is None or enc < best:
            best = enc
    return best


def are_isomorphic(x, y, marked=False):
    return canonical_form(x, marked) == canonical_form(y, marked)


# -- enumeration ---------------------------------------------------------------

def _compositions(total, parts):
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _edge_multisets(n_vertices, n_edges):
    pairs = [(v, w) for v in range(n_vertices) for w in range(v, n_vertices)]
    for combo in _multichoose(len(pairs), n_edges):
        yield [pairs[i] for i in combo]


def _multichoose(n, k, start=0):
    if k == 0:
        yield ()
        return
    for i in range(start, n):
        for rest in _multichoose(n, k - 1, i):
            yield (i,) + rest


def _skeleton_graphs(g_total, n_leaves, n_vertices, stable):
    """Connected labelled graphs of genus g_total with n_vertices vertices."""
    for genera in _compositions_bounded(g_total, n_vertices):
        n_edges = g_total - sum(genera) + n_vertices - 1
        if n_edges < n_vertices - 1:
            continue
        for leaves in _compositions(n_leaves, n_vertices):
            for edges in _edge_multisets(n_vertices, n_edges):
                val = list(leaves)
                for v, w in edges:
                    val[v] += 1
                    val[w] += 1
                if stable and any(2 * genera[v] - 2 + val[v] <= 0 for v in range(n_vertices)):
                    continue
                gr = LabeledGraph.from_skeleton(genera, leaves, edges)
                if gr.is_connected():
                    yield gr


def _compositions_bounded(total_max, parts):
    """Tuples of non-negative ints of length parts with sum <= total_max."""
    for s in range(total_max + 1):
        yield from _compositions(s, parts)


def enumerate_labeled_graphs(genus_, leaves, stable_only=True, max_vertices=None):
    """Connected genus-labelled graphs of type (genus_, leaves) up to isomorphism.

    Leaves are unordered.  Stable enumeration uses |V| <= 2g-2+n; otherwise
    ``max_vertices`` is required.
    """
    if stable_only:
        bound = 2 * genus_ - 2 + leaves
        if max_vertices is not None:
            bound = min(bound, max_vertices)
    else:
        if max_vertices is None:
            raise GraphError("unstable enumeration needs max_vertices")
        bound = max_vertices
    seen = {}
    for nv in range(1, bound + 1):
        for gr in _skeleton_graphs(genus_, leaves, nv, stable_only):
            key = canonical_form(gr)
            if key not in seen:
                seen[key] = gr
    return [seen[k] for k in sorted(seen)]


@dataclass(frozen=True)
class GraphWeight:
    aut_order: int
    pd_count: int

    @property
    def weight(self):
        return Fraction(1, self.aut_order * self.pd_count)


@dataclass(frozen=True)
class PDClass:
    graph: PDGraph
    weight: GraphWeight


def _leaf_directions(g, k):
    """Leaf direction tuples with k incoming leaves, one per distribution of
    incoming-leaf counts over vertices."""
    leaves = g.leaves()
    by_vertex = {}
    for h in leaves:
        by_vertex.setdefault(g.vertex_of[h], []).append(h)
    verts = sorted(by_vertex)
    for counts in _compositions(k, len(verts)):
        if any(c > len(by_vertex[v]) for c, v in zip(counts, verts)):
            continue
        dirs = [None] * g.n_half_edges
        for c, v in zip(counts, verts):
            for t, h in enumerate(by_vertex[v]):
                dirs[h] = IN if t < c else OUT
        yield tuple(dirs)


def enumerate_pd_graphs(g, k, l, stable_only=True, max_vertices=None):
    """Isomorphism classes of partially directed graphs of type (g, k, l) with weights."""
    if k < 1:
        raise GraphError("partially directed graphs need k >= 1")
    found = {}
    for base in enumerate_labeled_graphs(g, k + l, stable_only, max_vertices):
        for dirs in _leaf_directions(base, k):
            for pd in enumerate_pd_structures(base, dirs):
                key = canonical_form(pd)
                if key not in found:
                    found[key] = pd
    out = []
    for key in sorted(found):
        pd = found[key]
        out.append(PDClass(pd, GraphWeight(aut_order(None, pd=pd), pd_count(pd))))
    return out


def marked_weight(pd):
    """wt(G, f) with the marking given by the vertex order."""
    marking = list(range(pd.n_vertices))
    return Fraction(1, aut_order(None, marking=marking, pd=pd) * pd_count(pd))


# -- contraction ---------------------------------------------------------------

def contract_tree_edge(pd, e):
    """Delete directed edges parallel to the tree edge e, then contract e."""
    if e not in pd.tree:
        raise GraphError("edge is not in the spanning tree")
    g = pd.base
    vo = g.vertex_of
    t, hd = vo[e[0]], vo[e[1]]
    drop = set()
    for a, b in pd.directed:
        if vo[a] == t and vo[b] == hd:
            drop.update((a, b))
    keep = [h for h in range(g.n_half_edges) if h not in drop]
    new_index = {h: i for i, h in enumerate(keep)}

    def vmap(v):
        v = t if v == hd else v
        return v - (1 if v > hd else 0)
    genera = [gv for v, gv in enumerate(g.genera) if v != hd]
    genera[vmap(t)] = g.genera[t] + g.genera[hd]
    base = LabeledGraph(tuple(genera), tuple(vmap(vo[h]) for h in keep),
                        tuple(new_index[g.partner[h]] for h in keep))
    directed = frozenset((new_index[a], new_index[b]) for a, b in pd.directed if a not in drop)
    tree = frozenset((new_index[a], new_index[b]) for a, b in pd.tree if a not in drop)
    return PDGraph(base, tuple(pd.leaf_dir[h] for h in keep), directed, tree)


def contract_tree(pd):
    while pd.tree:
        pd = contract_tree_edge(pd, min(pd.tree))
    return pd


# -- the combinatorial identity ------------------------------------------------

def check_binomial_identity(M, N):
    """sum_{k+2l+delta=(M+N)/2} 2^k (n; k, l, l+delta) against C(M+N, M)."""
    if (M - N) % 2 or M < N or N < 0:
        raise ValueError("need M >= N >= 0 of the same parity")
    n, delta = (M + N) // 2, (M - N) // 2
    lhs = 0
    for l in range(0, n + 1):
        k = n - 2 * l - delta
        if k < 0:
            break
        lhs += 2 ** k * factorial(n) // (factorial(k) * factorial(l) * factorial(l + delta))
    rhs = comb(M + N, M)
    return lhs == rhs, lhs, rhs


# -- exhaustive marked graphs ---------------------------------------------------

def all_marked_graphs(max_half_edges):
    """Every connected marked graph (vertices labelled 0..m-1, genus 0) with at
    most max_half_edges half-edges, one per marked isomorphism class."""
    out = []
    for m in range(1, max_half_edges // 2 + 2):
        pairs = [(v, w) for v in range(m) for w in range(v, m)]
        for n_edges in range(m - 1, max_half_edges // 2 + 1):
            for combo in _multichoose(len(pairs), n_edges):
                edges = [pairs[i] for i in combo]
                budget = max_half_edges - 2 * n_edges
                for total in range(budget + 1):
                    for leaves in _compositions(total, m):
                        gr = LabeledGraph.from_skeleton([0] * m, leaves, edges)
                        if gr.is_connected():
                            out.append(gr)
    return out


# -- serialization -------------------------------------------------------------

def pd_to_text(pd):
    g = pd.base
    lines = ["pdgraph"]
    for v, gv in enumerate(g.genera):
        lines.append(f"vertex {v} genus={gv}")
    for h, v in enumerate(g.vertex_of):
        lines.append(f"half {h} vertex={v}")
    for e in g.edges():
        o = pd.oriented(e)
        if o is None:
            lines.append(f"edge {e[0]} {e[1]} undirected")
        else:
            tag = "directed tree" if o in pd.tree else "directed"
            lines.append(f"edge {o[0]} {o[1]} {tag}")
    for h in g.leaves():
        lines.append(f"leaf {h} {pd.leaf_dir[h]}")
    return "\n".join(lines) + "\n"


def pd_from_text(text):
    genera, vertex_of, pairs, leaves = {}, {}, [], {}
    directed, tree = set(), set()
    lines = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or lines[0] != ["pdgraph"]:
        raise GraphError("missing pdgraph header")
    for parts in lines[1:]:
        tag = parts[0]
        if tag == "vertex":
            genera[int(parts[1])] = int(parts[2].split("=")[1])
        elif tag == "half":
            vertex_of[int(parts[1])] = int(parts[2].split("=")[1])
        elif tag == "edge":
            a, b = int(parts[1]), int(parts[2])
            pairs.append((a, b))
            if parts[3] == "directed":
                directed.add((a, b))
                if len(parts) > 4 and parts[4] == "tree":
                    tree.add((a, b))
        elif tag == "leaf":
            leaves[int(parts[1])] = parts[2]
        else:
            raise GraphError(f"unknown line {' '.join(parts)!r}")
    n_half = len(vertex_of)
    partner = list(range(n_half))
    for a, b in pairs:
        partner[a], partner[b] = b, a
    base = LabeledGraph(tuple(genera[v] for v in range(len(genera))),
                        tuple(vertex_of[h] for h in range(n_half)), tuple(partner))
    leaf_dir = tuple(leaves.get(h) for h in range(n_half))
    return PDGraph(base, leaf_dir, frozenset(directed), frozenset(tree))


def pd_to_dict(pd):
    g = pd.base
    return {"genera": list(g.genera), "vertex_of": list(g.vertex_of),
            "partner": list(g.partner), "leaf_dir": list(pd.leaf_dir),
            "directed": sorted([list(x) for x in pd.directed]),
            "tree": sorted([list(x) for x in pd.tree])}


def pd_from_dict(d):
    base = LabeledGraph(tuple(d["genera"]), tuple(d["vertex_of"]), tuple(d["partner"]))
    return PDGraph(base, tuple(d["leaf_dir"]), frozenset(tuple(x) for x in d["directed"]),
                   frozenset(tuple(x) for x in d["tree"]))


def pd_to_json(pd):
    return json.dumps(pd_to_dict(pd), sort_keys=True)
