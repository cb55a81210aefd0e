"""Givental group elements g = id + g_1 u + g_2 u^2 + ..., their action on
splittings, and the quantized action on potentials as a stable graph sum.

Everything here lives on a complex with b = 0 (homology level), where a
splitting is just a symplectic series and the action is R -> R g^-1.
"""

import json
from fractions import Fraction
from math import factorial

from .feynman import Graded, Potential, apply_legs, giv_edge, k_apply, _product_input
from .linalg import SparseMatrix
from .mixed_complex import StructuralError, ValidationReport
from .splitting import ChainSplitting, USeries, series_from_dict, series_to_dict


class UnsupportedConfiguration(StructuralError):
    pass


class GiventalElement(USeries):
    """g = id + g_1 u + ... + g_N u^N acting on a space with a pairing."""

    def inverse(self):
        return GiventalElement(self.complex, self.series_inverse())

    def __mul__(self, other):
        """Series product (self * other)(u) = self(u) other(u)."""
        return GiventalElement(self.complex, self.compose(other).components)


def identity_element(c, order):
    return GiventalElement(c, [SparseMatrix.zero(c.dim)] * order)


def symplectic_defect(e, n):
    """Matrix of sum_{k+l=n} (-1)^k <g_k e_a, g_l e_b>; zero iff the u^n part of
    <g x, g y>_res = <x, y>_res holds."""
    P = e.complex.pairing
    acc = SparseMatrix.zero(e.complex.dim)
    for k in range(n + 1):
        acc = acc + (e[k].T @ P @ e[n - k]).scale((-1) ** k)
    return acc


def check_symplectic(e):
    c = e.complex
    rep = ValidationReport()
    for n in range(1, e.truncation + 1):
        m = symplectic_defect(e, n)
        rep.add(f"symplectic u^{n}", m.is_zero(), None if m.is_zero() else c._named(m.first_nonzero()))
    return rep


def act_on_splitting(e, r):
    """g . R = R g^-1 (b = 0 only)."""
    c = r.complex
    if not c.d.is_zero():
        raise UnsupportedConfiguration("the action on splittings is only defined here for b = 0")
    if e.complex is not c and e.complex.dim != c.dim:
        raise StructuralError("element and splitting live on different spaces")
    order = min(e.truncation, r.truncation)
    ginv = e.inverse()
    out = []
    for k in range(1, order + 1):
        acc = SparseMatrix.zero(c.dim)
        for i in range(k + 1):
            acc = acc + r[i] @ ginv[k - i]
        out.append(acc)
    return ChainSplitting(c, out)


def quantized_action(p, e, lambda_order):
    """Connected stable graph sum: vertices F_{g,n} from ``p``, edges the
    Givental propagator of ``e``, outputs decorated by ``e``.

    Returns the transformed Potential, truncated at lambda_order.  The
    relation with act_on_splitting holds for vertex data that solve the
    master equation (for instance a library hooked from a symmetric tensor);
    arbitrary tensors with several inputs do not satisfy it.
    """
    if not p:
        return Potential()
    c = e.complex
    x = p.to_graded().truncate(lambda_order)
    total = Graded()
    for m in range(1, lambda_order + 1):
        prod = _product_input(c, [x] * m, lambda_order=lambda_order)
        if prod.is_zero():
            break
        part = k_apply(c, e, prod, range(1, m + 1), 0, lambda_order=lambda_order,
                       edge=lambda i, j: giv_edge(e, i, j))
        total = total.add(part.scale(Fraction(1, factorial(m))))
    total = total.truncate(lambda_order).map(lambda q: apply_legs(c, q, None, e))
    # graphs with every output contracted have n = 0, which is not part of a potential
    total = total.map(lambda q: {m: v for m, v in q.items() if m})
    return Potential.from_graded(total)


def element_to_dict(e):
    return series_to_dict(e)


def element_from_dict(c, data):
    return series_from_dict(c, data, cls=GiventalElement)


def load_element(c, path, check=True):
    with open(path) as fh:
        e = element_from_dict(c, json.load(fh))
    if check:
        rep = check_symplectic(e)
        if not rep.passed:
            raise ValueError("element is not symplectic: " + "; ".join(f.line() for f in rep.failures()))
    return e
