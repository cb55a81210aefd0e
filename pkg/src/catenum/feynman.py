"""Feynman sums over decorated graphs: the trivializing maps K_m, K^-1_m and
their directed analogue, the invariant formula, hooking/unhooking and the
potential exp/log.

Everything runs on copy-tagged super-polynomials (see ``superpoly``).  An
m-vertex graph term starts from a product of m decorations living on copies
1..m.  Edges are second order contraction operators between copies, and at
the end all copies are identified with copy 0.  For the directed maps each
decoration is multiplied by an odd symbol theta_i (the shift of the tensor
into the suspended space), so Koszul signs come out of the polynomial
arithmetic.  Every tree edge removes one theta.

Series in hbar and lambda are ``Graded`` dicts {(hbar power, lambda power): poly}.
"""

import json
from collections import Counter
from fractions import Fraction
from itertools import combinations, product
from math import factorial

from . import graphs as gr
from .mixed_complex import StructuralError
from .splitting import (composite_matrix, givental_matrix, hsym_basis,
                        invert_splitting)
from .superpoly import (INPUT, OUTPUT, SUSP, add, clean, iadd, input_var, output_var,
                        scale, susp_var)


class MissingVertexError(KeyError):
    def __init__(self, missing):
        self.missing = sorted(missing)
        super().__init__("missing vertex tensors for (g,k,l) = "
                         + ", ".join(str(m) for m in self.missing))


# -- graded series ---------------------------------------------------------------

class Graded(dict):
    """{(hbar power, lambda power): polynomial}."""

    def add(self, other, c=1):
        out = Graded(self)
        for key, p in other.items():
            out[key] = add(out.get(key, {}), p, c)
            if not out[key]:
                del out[key]
        return out

    def scale(self, c):
        return Graded({k: scale(p, c) for k, p in self.items() if c})

    def add_term(self, key, poly, c=1):
        acc = clean(iadd(dict(self.get(key, {})), poly, c))
        if acc:
            self[key] = acc
        else:
            self.pop(key, None)

    def truncate(self, lambda_order):
        return Graded({k: p for k, p in self.items() if k[1] <= lambda_order})

    def is_zero(self):
        return not any(self.values())

    def map(self, fn):
        out = Graded()
        for k, p in self.items():
            out.add_term(k, fn(p))
        return out


def graded_mul(alg, a, b, lambda_order=None):
    out = Graded()
    for (h1, l1), p in a.items():
        for (h2, l2), q in b.items():
            if lambda_order is not None and l1 + l2 > lambda_order:
                continue
            out.add_term((h1 + h2, l1 + l2), alg.mul(p, q))
    return out


# -- vertex tensors ----------------------------------------------------------------

def _io_counts(mono):
    k = sum(1 for v in mono if v[1] == INPUT)
    return k, sum(1 for v in mono if v[1] == OUTPUT)


class VertexTensor:
    """A tensor with k inputs (u-power >= 1) and l outputs (u-power <= 0)."""

    def __init__(self, complex_, g, k, l, poly):
        if k < 1 or 2 * g - 2 + k + l <= 0:
            raise StructuralError(f"(g,k,l)=({g},{k},{l}) is not a stable type with k >= 1")
        for m in poly:
            if _io_counts(m) != (k, l) or any(v[0] != 0 or v[1] == SUSP for v in m):
                raise StructuralError(f"monomial {m} does not have type ({k},{l})")
        self.complex = complex_
        self.g, self.k, self.l = g, k, l
        self.poly = clean(poly)

    @property
    def key(self):
        return (self.g, self.k, self.l)

    @classmethod
    def from_entries(cls, complex_, g, k, l, entries):
        """entries: {(inputs ((basis, u),...), outputs ((basis, u),...)): coeff}."""
        alg = complex_.algebra
        poly = {}
        for (ins, outs), coeff in entries.items():
            seq = [input_var(b, u) for b, u in ins] + [output_var(b, u) for b, u in outs]
            poly = add(poly, alg.monomial(seq, coeff))
        return cls(complex_, g, k, l, poly)

    @property
    def entries(self):
        out = {}
        for m, c in self.poly.items():
            ins = tuple((v[2], v[3]) for v in m if v[1] == INPUT)
            outs = tuple((v[2], v[3]) for v in m if v[1] == OUTPUT)
            out[(ins, outs)] = c
        return out

    def __eq__(self, other):
        return isinstance(other, VertexTensor) and self.key == other.key and self.poly == other.poly

    def __repr__(self):
        return f"VertexTensor{self.key}({len(self.poly)} terms)"


class VertexLibrary(dict):
    """(g, k, l) -> VertexTensor."""

    def __setitem__(self, key, value):
        if tuple(key) != value.key:
            raise StructuralError(f"key {key} does not match tensor type {value.key}")
        super().__setitem__(tuple(key), value)

    def add(self, tensor):
        if tensor.key in self:
            old = self[tensor.key]
            tensor = VertexTensor(tensor.complex, *tensor.key, add(old.poly, tensor.poly))
        self[tensor.key] = tensor


def _fmt(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _basis_index(c, b):
    if isinstance(b, int):
        return b
    return c.basis.index(b)


def library_to_records(lib):
    """One record per entry; an empty tensor gets a bare {g, k, l} record so its
    key survives a round trip."""
    out = []
    for key in sorted(lib):
        t = lib[key]
        if not t.poly:
            out.append({"g": t.g, "k": t.k, "l": t.l})
        for (ins, outs), coeff in sorted(t.entries.items()):
            out.append({"g": t.g, "k": t.k, "l": t.l,
                        "input": [list(x) for x in ins], "output": [list(x) for x in outs],
                        "coeff": _fmt(coeff)})
    return out


def save_library(lib, path):
    with open(path, "w") as fh:
        for rec in library_to_records(lib):
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def load_library(c, path):
    """One JSON record per line: {g, k, l, input, output, coeff}; a record
    without coeff declares the key with an empty tensor."""
    grouped = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rec = json.loads(line)
            key = (int(rec["g"]), int(rec["k"]), int(rec["l"]))
            ent = grouped.setdefault(key, {})
            if "coeff" not in rec:
                continue
            ins = tuple((_basis_index(c, b), int(u)) for b, u in rec.get("input", []))
            outs = tuple((_basis_index(c, b), int(u)) for b, u in rec.get("output", []))
            if len(ins) != key[1] or len(outs) != key[2]:
                raise StructuralError(f"line {lineno}: record does not have type {key}")
            ent[(ins, outs)] = ent.get((ins, outs), 0) + Fraction(rec["coeff"])
    lib = VertexLibrary()
    for key, ent in grouped.items():
        lib[key] = VertexTensor.from_entries(c, *key, ent)
    return lib


# -- copy bookkeeping ----------------------------------------------------------------

def to_copy(alg, poly, copy):
    return alg.relabel(poly, lambda v: (copy,) + v[1:])


def merge_copies(alg, poly, copies, target):
    copies = set(copies)
    return alg.relabel(poly, lambda v: (target,) + v[1:] if v[0] in copies else v)


def suspend(alg, poly, copy):
    """theta_copy * poly (poly moved to ``copy``)."""
    return alg.mul({(susp_var(copy),): Fraction(1)}, to_copy(alg, poly, copy))


def desuspend(alg, poly, copy=0):
    """Remove the leading theta (every monomial must contain theta_copy)."""
    out = {}
    th = susp_var(copy)
    for m, c in poly.items():
        if not m or m[0] != th:
            raise StructuralError("monomial without its suspension symbol")
        out[m[1:]] = c
    return out


def _arity_signature(mono, copies):
    counts = {c: [0, 0] for c in copies}
    for v in mono:
        if v[0] in counts and v[1] != SUSP:
            counts[v[0]][0 if v[1] == INPUT else 1] += 1
    return tuple(tuple(counts[c]) for c in copies)


# -- edge coefficient functions -------------------------------------------------------

def hsym_edge(r, i, j, sign=1):
    """H^sym between an output of copy i and an output of copy j."""
    def coeff(v, w):
        if v[0] != i or w[0] != j or v[1] != OUTPUT or w[1] != OUTPUT:
            return 0
        return sign * hsym_basis(v[2], -v[3], w[2], -w[3], r)
    coeff.ends = ((i, OUTPUT), (j, OUTPUT))
    return coeff


def f_edge(r, t, h):
    """Output of copy t fed through -F into an input of copy h.

    The overall minus keeps the directed propagators compatible with the
    input differential (so that D O_F + O_F D = O_S with S below)."""
    def coeff(v, w):
        if v[0] != t or w[0] != h or v[1] != OUTPUT or w[1] != INPUT:
            return 0
        return -composite_matrix(-v[3], w[3] - 1, r).get(w[2], v[2])
    coeff.ends = ((t, OUTPUT), (h, INPUT))
    return coeff


def s_edge(c, t, h):
    """Output of copy t fed through -S, S = uB(-)_0, into an input of copy h."""
    B = c.delta

    def coeff(v, w):
        if v[0] != t or w[0] != h or v[1] != OUTPUT or w[1] != INPUT:
            return 0
        if v[3] != 0 or w[3] != 1:
            return 0
        return -B.get(w[2], v[2])
    coeff.ends = ((t, OUTPUT), (h, INPUT))
    return coeff


def omega_self(c):
    """Omega between two outputs of the same copy (u^0 parts)."""
    def coeff(v, w):
        if v[0] != w[0] or v[1] != OUTPUT or w[1] != OUTPUT or v[3] or w[3]:
            return 0
        return c.omega(v[2], w[2])
    return coeff


def giv_edge(r, i, j):
    def coeff(v, w):
        if v[0] != i or w[0] != j or v[1] != OUTPUT or w[1] != OUTPUT:
            return 0
        return givental_matrix(-v[3], -w[3], r).get(v[2], w[2])
    coeff.ends = ((i, OUTPUT), (j, OUTPUT))
    return coeff


def theta_split(alg, poly, t, h):
    """(d/d theta_t - d/d theta_h) poly."""
    return add(alg.deriv(poly, susp_var(t)), alg.deriv(poly, susp_var(h)), -1)


# -- skeletons -----------------------------------------------------------------------

def oriented_trees(vertices):
    """Every spanning tree on ``vertices`` with every orientation of its edges."""
    vertices = list(vertices)
    m = len(vertices)
    if m == 1:
        return [()]
    pairs = list(combinations(vertices, 2))
    out = []
    for edges in combinations(pairs, m - 1):
        idx = {v: n for n, v in enumerate(vertices)}
        if not gr._is_spanning_tree(m, [(idx[a], idx[b]) for a, b in edges]):
            continue
        for flips in product((False, True), repeat=m - 1):
            out.append(tuple((b, a) if f else (a, b) for (a, b), f in zip(edges, flips)))
    return out


def _reach(vertices, arcs):
    out = {}
    for v in vertices:
        seen, stack = set(), [v]
        while stack:
            x = stack.pop()
            for a, b in arcs:
                if a == x and b not in seen:
                    seen.add(b)
                    stack.append(b)
        out[v] = seen
    return out


def _connected(vertices, pairs):
    vertices = list(vertices)
    if len(vertices) <= 1:
        return True
    adj = {v: set() for v in vertices}
    for a, b in pairs:
        adj[a].add(b)
        adj[b].add(a)
    seen, stack = {vertices[0]}, [vertices[0]]
    while stack:
        x = stack.pop()
        for y in adj[x] - seen:
            seen.add(y)
            stack.append(y)
    return len(seen) == len(vertices)


def _run_slots(alg, poly, slots, budget, state, emit):
    """Enumerate multiplicities for contraction slots within half-edge budgets.

    slots: list of (key, coeff, uses, factor) where uses lists the (copy, 'in'|'out')
    budget consumed per copy of the edge and factor is 1 or 1/2 (loops).
    Applies O^n / n! * factor^n and calls emit(poly, state) with state a
    {key: multiplicity} dict.
    """
    if not slots:
        emit(poly, state)
        return
    (key, coeff, uses, factor), rest = slots[0], slots[1:]
    n = 0
    cur = poly
    budget = dict(budget)
    while True:
        state[key] = n
        _run_slots(alg, cur, rest, budget, state, emit)
        ok = True
        for u in uses:
            budget[u] -= 1
            if budget[u] < 0:
                ok = False
        if not ok:
            break
        n += 1
        cur = scale(alg.contract(cur, coeff), Fraction(factor) / n)
        if not cur:
            break
    state.pop(key, None)


# -- undirected maps K_m and K^-1_m ------------------------------------------------------

def _k_core(c, r, poly, copies, target, sign, edge=None):
    """Sum over connected marked graphs on ``copies`` (no leaves prescribed).

    ``edge(i, j)`` gives the coefficient function of the propagator between
    copies i and j (default: sign * H^sym).  Returns {h1: poly} with the
    copies merged into target.
    """
    if edge is None:
        def edge(i, j):
            return hsym_edge(r, i, j, sign)
    alg = c.algebra
    copies = list(copies)
    out = {}
    groups = {}
    for mono, coef in poly.items():
        groups.setdefault(_arity_signature(mono, copies), {})[mono] = coef
    for sig, part in groups.items():
        budget = {}
        for cp, (_, l) in zip(copies, sig):
            budget[(cp, "out")] = l
        slots = []
        for cp in copies:
            slots.append((("loop", cp), edge(cp, cp), [(cp, "out"), (cp, "out")], Fraction(1, 2)))
        for a, b in combinations(copies, 2):
            slots.append((("u", a, b), edge(a, b), [(a, "out"), (b, "out")], 1))

        def emit(p, state):
            if not p:
                return
            pairs = [(k[1], k[2]) for k, n in state.items() if k[0] == "u" and n]
            if not _connected(copies, pairs):
                return
            e = sum(state.values())
            h1 = e - len(copies) + 1
            merged = merge_copies(alg, p, copies, target)
            iadd(out.setdefault(h1, {}), merged)
        _run_slots(alg, part, slots, budget, {}, emit)
    return {h: clean(p) for h, p in out.items()}


def k_apply(c, r, x, copies, target=0, sign=1, lambda_order=None, edge=None):
    """Apply the undirected map to a Graded multi-copy element."""
    res = Graded()
    for (h, lam), p in x.items():
        if lambda_order is not None and lam > lambda_order:
            continue
        for h1, q in _k_core(c, r, p, copies, target, sign, edge).items():
            res.add_term((h + h1, lam), q)
    return res


def _product_input(c, inputs, suspended=False, lambda_order=None):
    alg = c.algebra
    x = Graded({(0, 0): {(): Fraction(1)}})
    for i, inp in enumerate(inputs, start=1):
        moved = Graded()
        for key, p in inp.items():
            moved.add_term(key, suspend(alg, p, i) if suspended else to_copy(alg, p, i))
        x = graded_mul(alg, x, moved, lambda_order)
    return x


def k_m(c, inputs, r, lambda_order, sign=1):
    """K_m(gamma_1 ... gamma_m) for Graded inputs in Sym(L_-) (copy 0)."""
    if not inputs:
        raise ValueError("k_m needs m >= 1 inputs")
    x = _product_input(c, inputs, lambda_order=lambda_order)
    return k_apply(c, r, x, range(1, len(inputs) + 1), 0, sign, lambda_order)


def k_inverse_m(c, inputs, r, lambda_order):
    return k_m(c, inputs, r, lambda_order, sign=-1)


def set_partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def compose_k(c, inputs, r, lambda_order, outer_sign=-1, inner_sign=1):
    """(K_outer o K_inner)_m on inputs, as a sum over set partitions."""
    m = len(inputs)
    x = _product_input(c, inputs, lambda_order=lambda_order)
    total = Graded()
    base = m + 1
    for part in set_partitions(range(1, m + 1)):
        y = x
        labels = []
        for t, block in enumerate(part):
            lab = base + t
            y = k_apply(c, r, y, block, lab, inner_sign, lambda_order)
            labels.append(lab)
        total = total.add(k_apply(c, r, y, labels, 0, outer_sign, lambda_order))
    return total


# -- directed maps --------------------------------------------------------------------

def _directed_slots(c, r, copies, tree, budget):
    """Contraction slots for non-tree directed, undirected and loop edges."""
    reach = _reach(copies, tree)
    slots = []
    for a in copies:
        for b in sorted(reach[a]):
            slots.append((("d", a, b), s_edge(c, a, b), [(a, "out"), (b, "in")], 1))
    for a, b in combinations(copies, 2):
        slots.append((("u", a, b), hsym_edge(r, a, b), [(a, "out"), (b, "out")], 1))
    for a in copies:
        slots.append((("loop", a), hsym_edge(r, a, a), [(a, "out"), (a, "out")], Fraction(1, 2)))
    return slots


class _PDCounter:
    """Caches |PD(G, f)| for marked skeletons with given leaf counts."""

    def __init__(self):
        self.cache = {}

    def count(self, copies, tree, state, leaves_in, leaves_out):
        key = (tuple(copies), tuple(sorted(tree)), tuple(sorted(state.items())),
               tuple(leaves_in), tuple(leaves_out))
        hit = self.cache.get(key)
        if hit is None:
            pd = skeleton_pd(copies, tree, state, leaves_in, leaves_out)
            hit = gr.pd_count(pd)
            self.cache[key] = hit
        return hit


_PD = _PDCounter()


def skeleton_pd(copies, tree, state, leaves_in, leaves_out, genera=None):
    """PDGraph with vertices in ``copies`` order from a skeleton description."""
    idx = {cp: n for n, cp in enumerate(copies)}
    m = len(copies)
    vertex_of, partner, leaf_dir = [], [], []
    for n in range(m):
        for _ in range(leaves_in[n]):
            partner.append(len(vertex_of))
            vertex_of.append(n)
            leaf_dir.append(gr.IN)
        for _ in range(leaves_out[n]):
            partner.append(len(vertex_of))
            vertex_of.append(n)
            leaf_dir.append(gr.OUT)
    directed, tree_set = set(), set()

    def edge(a, b):
        h = len(vertex_of)
        vertex_of.extend([a, b])
        partner.extend([h + 1, h])
        leaf_dir.extend([None, None])
        return (h, h + 1)
    for a, b in tree:
        e = edge(idx[a], idx[b])
        directed.add(e)
        tree_set.add(e)
    for key, n in sorted(state.items()):
        for _ in range(n):
            if key[0] == "d":
                directed.add(edge(idx[key[1]], idx[key[2]]))
            elif key[0] == "u":
                edge(idx[key[1]], idx[key[2]])
            else:
                edge(idx[key[1]], idx[key[1]])
    genera = tuple(genera) if genera is not None else (0,) * m
    base = gr.LabeledGraph(genera, tuple(vertex_of), tuple(partner))
    return gr.PDGraph(base, tuple(leaf_dir), frozenset(directed), frozenset(tree_set))


def _edge_aut(state):
    out = 1
    for key, n in state.items():
        out *= factorial(n) * (2 ** n if key[0] == "loop" else 1)
    return out


def _khat_core(c, r, poly, copies, target):
    """Weighted sum over marked partially directed graphs on ``copies``.

    ``poly`` carries theta_i for every copy.  Returns {h1: poly} with copies
    merged into ``target`` (one theta_target left).
    """
    alg = c.algebra
    copies = list(copies)
    m = len(copies)
    out = {}
    groups = {}
    for mono, coef in poly.items():
        groups.setdefault(_arity_signature(mono, copies), {})[mono] = coef
    trees = oriented_trees(copies)
    for sig, part in groups.items():
        kl = dict(zip(copies, sig))
        for tree in trees:
            budget = {}
            for cp in copies:
                budget[(cp, "in")], budget[(cp, "out")] = kl[cp]
            for a, b in tree:
                budget[(a, "out")] -= 1
                budget[(b, "in")] -= 1
            if any(v < 0 for v in budget.values()):
                continue
            p = part
            for a, b in tree:
                p = theta_split(alg, alg.contract(p, f_edge(r, a, b)), a, b)
                if not p:
                    break
            if not p:
                continue
            slots = _directed_slots(c, r, copies, tree, budget)

            def emit(q, state, tree=tree):
                if not q:
                    return
                live = {k: n for k, n in state.items() if n}
                heads = Counter(b for a, b in tree)
                tails = Counter(a for a, b in tree)
                halves = Counter()
                for k, n in live.items():
                    if k[0] == "d":
                        heads[k[2]] += n
                        tails[k[1]] += n
                    elif k[0] == "u":
                        halves[k[1]] += n
                        halves[k[2]] += n
                    else:
                        halves[k[1]] += 2 * n
                lin = [kl[cp][0] - heads[cp] for cp in copies]
                lout = [kl[cp][1] - tails[cp] - halves[cp] for cp in copies]
                npd = _PD.count(copies, tree, live, lin, lout)
                e = len(tree) + sum(live.values())
                h1 = e - m + 1
                # the O^n/n! in the slots already supplies the edge automorphisms
                w = Fraction(1, m * npd)
                merged = merge_copies(alg, q, copies, target)
                iadd(out.setdefault(h1, {}), merged, w)
            _run_slots(alg, p, slots, budget, {}, emit)
    return {h: clean(q) for h, q in out.items()}


def khat_apply(c, r, x, copies, target=0, lambda_order=None):
    res = Graded()
    for (h, lam), p in x.items():
        if lambda_order is not None and lam > lambda_order:
            continue
        for h1, q in _khat_core(c, r, p, copies, target).items():
            res.add_term((h + h1, lam), q)
    return res


def khat_m(c, inputs, r, lambda_order):
    """K^_m(gamma_1 ... gamma_m) for Graded vertex-type inputs (copy 0, no theta).

    Returns the Graded result with the suspension removed.
    """
    if not inputs:
        raise ValueError("khat_m needs m >= 1 inputs")
    x = _product_input(c, inputs, suspended=True, lambda_order=lambda_order)
    y = khat_apply(c, r, x, range(1, len(inputs) + 1), 0, lambda_order)
    return y.map(lambda p: desuspend(c.algebra, p))


def bracket_hat(c, x, pair=(1, 2), target=0):
    """The bracket on suspended two-copy elements: d parallel S-edges in either
    direction with weight hbar^(d-1)/d!, one theta removed."""
    alg = c.algebra
    a, b = pair
    res = Graded()
    for (h, lam), p in x.items():
        for t, hd in ((a, b), (b, a)):
            cur = p
            d = 0
            while True:
                d += 1
                cur = scale(alg.contract(cur, s_edge(c, t, hd)), Fraction(1, d))
                if not cur:
                    break
                q = scale(theta_split(alg, cur, t, hd), Fraction(1, 2))
                res.add_term((h + d - 1, lam), merge_copies(alg, q, pair, target))
    return res


def differential_in(c, x, copies):
    """b + uB + iota + hbar Delta on a Graded multi-copy element (Delta within copies)."""
    from .mixed_complex import apply_differential, apply_hook
    alg = c.algebra
    out = Graded()
    for (h, lam), p in x.items():
        out.add_term((h, lam), add(apply_differential(c, p), apply_hook(c, p)))
        out.add_term((h + 1, lam), scale(alg.contract(p, omega_self(c)), Fraction(1, 2)))
    return out


def differential_out(c, x):
    from .mixed_complex import apply_differential, apply_hook
    return x.map(lambda p: add(apply_differential(c, p), apply_hook(c, p)))


# -- single graph evaluation ------------------------------------------------------------

def pd_skeleton(pd):
    """(tree arcs, state) of a PDGraph with vertex n as copy n+1."""
    g = pd.base
    vo = g.vertex_of
    tree = []
    state = Counter()
    for e in g.edges():
        a, b = e
        o = pd.oriented(e)
        if o is not None and o in pd.tree:
            tree.append((vo[o[0]] + 1, vo[o[1]] + 1))
        elif o is not None:
            state[("d", vo[o[0]] + 1, vo[o[1]] + 1)] += 1
        elif vo[a] == vo[b]:
            state[("loop", vo[a] + 1)] += 1
        else:
            x, y = sorted((vo[a] + 1, vo[b] + 1))
            state[("u", x, y)] += 1
    return tree, dict(state)


def evaluate_pd_graph(pd, decorations, r):
    """Contract the decorations (one polynomial per vertex, in vertex order)
    along the graph: tree edges through F, other directed edges through S,
    undirected edges through H^sym.  One contraction per labelled edge, no
    weights; a star graph returns its decoration unchanged."""
    c = r.complex
    alg = c.algebra
    m = pd.n_vertices
    if len(decorations) != m:
        raise StructuralError(f"{m} vertices but {len(decorations)} decorations")
    for v, dec in enumerate(decorations):
        want = gr.vertex_io_counts(pd, v)
        for mono in dec:
            if _io_counts(mono) != want:
                raise StructuralError(f"vertex {v} has type {want}, decoration monomial {mono} does not")
    copies = list(range(1, m + 1))
    x = {(): Fraction(1)}
    for cp, dec in zip(copies, decorations):
        x = alg.mul(x, suspend(alg, dec, cp))
    tree, state = pd_skeleton(pd)
    for a, b in tree:
        x = theta_split(alg, alg.contract(x, f_edge(r, a, b)), a, b)
    for key, n in sorted(state.items()):
        if key[0] == "d":
            coeff = s_edge(c, key[1], key[2])
        elif key[0] == "u":
            coeff = hsym_edge(r, key[1], key[2])
        else:
            coeff = hsym_edge(r, key[1], key[1])
        for _ in range(n):
            x = alg.contract(x, coeff)
    x = scale(x, Fraction(1, m))
    return desuspend(alg, merge_copies(alg, x, copies, 0))


# -- legs, hooking and the invariant -----------------------------------------------------

def apply_legs(c, poly, r_in, t_out):
    """Pre-compose inputs with r_in and post-compose outputs with t_out."""
    alg = c.algebra
    cache = {}

    def image(v):
        if v in cache:
            return cache[v]
        copy, kind, a, k = v
        out = {}
        if kind == INPUT and r_in is not None:
            for i in range(0, k):
                for (alpha, beta), x in r_in[i].entries.items():
                    if alpha == a:
                        key = ((copy, INPUT, beta, k - i),)
                        out[key] = out.get(key, 0) + x
        elif kind == OUTPUT and t_out is not None:
            for i in range(0, -k + 1):
                for (b, aa), x in t_out[i].entries.items():
                    if aa == a:
                        key = ((copy, OUTPUT, b, k + i),)
                        out[key] = out.get(key, 0) + x
        else:
            out = {(v,): Fraction(1)}
        cache[v] = clean(out)
        return cache[v]
    return alg.substitute(poly, image)


def hook(c, poly):
    """The resolution map Sym L_- -> (tensors with inputs) on unsuspended tensors.

    On suspended elements it is iota(theta gamma) = -theta iota(gamma), since
    iota is odd; with that sign graph sums commute with hooking."""
    from .mixed_complex import apply_hook
    return scale(apply_hook(c, poly), -1)


def _pairing_inverse(c):
    from .linalg import inverse
    try:
        return inverse(c.pairing)
    except (ValueError, ZeroDivisionError) as exc:
        raise StructuralError("pairing is degenerate; cannot unhook") from exc


def unhook(c, poly):
    """Inverse of ``hook`` on tensors with exactly one input per monomial."""
    alg = c.algebra
    if not poly:
        return {}
    pinv = _pairing_inverse(c)
    cols = {}
    for (a, alpha), x in pinv.entries.items():
        cols.setdefault(alpha, []).append((a, x))
    out = {}
    for mono, coef in poly.items():
        ins = [v for v in mono if v[1] == INPUT]
        if len(ins) != 1:
            raise StructuralError("unhook needs exactly one input per monomial")
        n = len(mono)
        xi = ins[0]
        rest = alg.deriv({mono: coef}, xi)
        k = xi[3]
        img = {((xi[0], OUTPUT, a, -(k - 1)),): (-1) ** (k + c.parity[a]) * x
               for a, x in cols.get(xi[2], ())}
        iadd(out, alg.mul(img, rest), Fraction(1, n))
    return clean(out)


def _graph_term(pd, lib, r):
    g = pd.base
    decs = []
    for v in range(pd.n_vertices):
        key = (g.genera[v],) + gr.vertex_io_counts(pd, v)
        decs.append(lib[key].poly)
    return evaluate_pd_graph(pd, decs, r)


def required_keys(g, n):
    keys = set()
    for cls in gr.enumerate_pd_graphs(g, 1, n - 1):
        pd = cls.graph
        for v in range(pd.n_vertices):
            keys.add((pd.base.genera[v],) + gr.vertex_io_counts(pd, v))
    return keys


def compute_invariant(g, n, lib, r, ledger=None, legs=True):
    """iota F_{g,n}: weighted sum over stable partially directed graphs of type
    (g, 1, n-1), with R on the incoming leaf and T on the outgoing leaves.

    If ``ledger`` is a list, (graph, coefficient, term) triples are appended.
    """
    if n < 1 or 2 * g - 2 + n <= 0:
        raise StructuralError(f"(g,n)=({g},{n}) is not stable with n >= 1")
    c = r.complex
    classes = gr.enumerate_pd_graphs(g, 1, n - 1)
    missing = set()
    for cls in classes:
        pd = cls.graph
        for v in range(pd.n_vertices):
            key = (pd.base.genera[v],) + gr.vertex_io_counts(pd, v)
            if key not in lib:
                missing.add(key)
    if missing:
        raise MissingVertexError(missing)
    total = {}
    for cls in classes:
        pd = cls.graph
        leaf_fact = 1
        for v in range(pd.n_vertices):
            ins = sum(1 for h in pd.base.half_edges_at(v) if pd.leaf_dir[h] == gr.IN)
            outs = sum(1 for h in pd.base.half_edges_at(v) if pd.leaf_dir[h] == gr.OUT)
            leaf_fact *= factorial(ins) * factorial(outs)
        term = _graph_term(pd, lib, r)
        coef = Fraction(leaf_fact) * cls.weight.weight
        if ledger is not None:
            ledger.append((pd, cls.weight.weight, scale(term, coef)))
        iadd(total, term, coef)
    total = clean(total)
    if legs:
        total = apply_legs(c, total, r, invert_splitting(r))
    return total


def invariant_potential(lib, r, lambda_order, max_n=None):
    """F_{g,n} = unhook(iota F_{g,n}) for every stable (g,n) with 2g-2+n <= lambda_order."""
    c = r.complex
    pot = Potential()
    for g in range(0, lambda_order // 2 + 2):
        for n in range(1, lambda_order - 2 * g + 3):
            if 2 * g - 2 + n <= 0 or 2 * g - 2 + n > lambda_order:
                continue
            if max_n is not None and n > max_n:
                continue
            val = unhook(c, compute_invariant(g, n, lib, r))
            if val:
                pot[(g, n)] = val
    return pot


# -- potentials ------------------------------------------------------------------------

class Potential(dict):
    """(g, n) -> polynomial in copy-0 outputs of arity n (weight hbar^g lambda^(2g-2+n))."""

    def __setitem__(self, key, value):
        g, n = key
        if n < 1 or 2 * g - 2 + n <= 0:
            raise StructuralError(f"(g,n)=({g},{n}) is not a stable key with n >= 1")
        super().__setitem__((g, n), value)

    def to_graded(self):
        """F as a Graded series: F_{g,n} at (hbar^g, lambda^(2g-2+n))."""
        out = Graded()
        for (g, n), p in self.items():
            out.add_term((g, 2 * g - 2 + n), p)
        return out

    @classmethod
    def from_graded(cls, gs):
        pot = cls()
        for (h, lam), p in gs.items():
            by_n = {}
            for m, x in p.items():
                by_n.setdefault(len(m), {})[m] = x
            for n, part in by_n.items():
                g = (lam + 2 - n) // 2
                if 2 * g - 2 + n != lam or g != h:
                    raise StructuralError(f"term at hbar^{h} lambda^{lam} has arity {n}")
                pot[(g, n)] = add(pot.get((g, n), {}), part)
        return pot


def potential_exp_log(c, p, direction, lambda_order):
    """exp(F / hbar) as a Graded series (hbar powers may be negative), or the
    inverse: hbar * log of a series with constant term 1, returned as a Potential."""
    alg = c.algebra
    one = Graded({(0, 0): {(): Fraction(1)}})
    if direction == "exp":
        x = Graded()
        for (h, lam), q in p.to_graded().items():
            x.add_term((h - 1, lam), q)
        total, power = one, one
        for k in range(1, lambda_order + 1):
            power = graded_mul(alg, power, x, lambda_order).scale(Fraction(1, k))
            total = total.add(power)
        return total.truncate(lambda_order)
    if direction == "log":
        x = p.add(one, -1).truncate(lambda_order)
        if any(lam == 0 for (_, lam) in x):
            raise StructuralError("log needs constant term 1 and no other lambda^0 terms")
        total, power = Graded(), one
        for k in range(1, lambda_order + 1):
            power = graded_mul(alg, power, x, lambda_order)
            total = total.add(power, Fraction((-1) ** (k + 1), k))
        shifted = Graded()
        for (h, lam), q in total.items():
            shifted.add_term((h + 1, lam), q)
        return Potential.from_graded(shifted)
    raise ValueError("direction must be 'exp' or 'log'")


# -- dimension check ---------------------------------------------------------------------

def expected_degree(g, n, d):
    return 2 * (g - 1) * (3 - d) + 2 * n


def monomial_degree(c, mono):
    """Homological degree: outputs e_a u^{-j} weigh deg a + 2j; inputs dual to
    e_a u^k weigh 2k - deg a."""
    if c.degree is None:
        raise StructuralError("complex has no degree layer")
    total = 0
    for v in mono:
        if v[1] == OUTPUT:
            total += c.degree[v[2]] - 2 * v[3]
        elif v[1] == INPUT:
            total += 2 * v[3] - c.degree[v[2]]
    return total


def dimension_check(c, p, cy_dim=None):
    """Per (g,n): (expected degree, list of offending (monomial, degree))."""
    from .mixed_complex import ValidationReport
    if c.degree is None:
        raise StructuralError("complex has no degree layer")
    d = c.cy_dim if cy_dim is None else cy_dim
    rep = ValidationReport()
    for (g, n) in sorted(p):
        want = expected_degree(g, n, d)
        bad = [(m, monomial_degree(c, m)) for m in sorted(p[(g, n)])
               if monomial_degree(c, m) != want]
        rep.add(f"deg F_{g},{n} = {want}", not bad, bad[0] if bad else None)
    return rep
