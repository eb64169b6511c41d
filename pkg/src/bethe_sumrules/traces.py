"""Chebyshev trace differences and the trace side of the sum rules.

``tr(T_k(H_V / sqrt2) - T_k(H_0 / sqrt2))`` only involves closed walks of length
``k`` that touch the support of ``V``, so a plain ball of depth
``support_depth + k`` gives it exactly.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np
import scipy.sparse as sp
from numpy.polynomial import polynomial as P

from .conformal import SQRT2, CosCoeffs, chebyshev_monomial
from .determinant import relevant_subtrees
from .tree import ROOT, Potential, VertexId, ball_size, difference_op, shell_weighted_sum, subtree_view, truncate


class TraceReport(NamedTuple):
    k: int
    subtree_root: VertexId
    value: float
    ball_depth_used: int


def _sparse_adjacency(depth: int) -> sp.csr_matrix:
    n = ball_size(depth)
    child = np.arange(1, n)
    parent = (child - 1) // 2
    rows = np.concatenate([child, parent])
    cols = np.concatenate([parent, child])
    return sp.csr_matrix((np.ones(2 * (n - 1)), (rows, cols)), shape=(n, n))


def cheb_trace_diffs(V: Potential, kmax: int, depth: int | None = None) -> np.ndarray:
    """``t_k = tr(T_k(H_V/sqrt2) - T_k(H_0/sqrt2))`` for ``k = 0..kmax`` on one ball.

    The difference ``T_k(Y_V) - T_k(Y_0)`` is propagated directly; it stays
    supported near ``supp V`` and no large traces are subtracted.
    """
    t = np.zeros(kmax + 1)
    if V.is_zero() or kmax == 0:
        return t
    depth = V.support_depth + kmax if depth is None else depth
    Y0 = _sparse_adjacency(depth) / SQRT2
    dY = sp.diags(V.to_array(depth) / SQRT2, format="csr")
    Y1 = (Y0 + dY).tocsr()
    n = Y0.shape[0]
    T_prev, T_cur = 2.0 * sp.identity(n, format="csr"), Y0
    d_prev, d_cur = sp.csr_matrix((n, n)), dY
    t[1] = d_cur.diagonal().sum()
    for k in range(2, kmax + 1):
        # T_k(Y1) - T_k(Y0) = Y1 d_{k-1} + dY T_{k-1}(Y0) - d_{k-2}
        d_prev, d_cur = d_cur, (Y1 @ d_cur + dY @ T_cur - d_prev).tocsr()
        T_prev, T_cur = T_cur, (Y0 @ T_cur - T_prev).tocsr()
        t[k] = d_cur.diagonal().sum()
    return t


def cheb_trace_diff(V: Potential, x: VertexId, k: int, depth: int | None = None) -> TraceReport:
    if k < 1:
        raise ValueError("k must be a positive integer")
    W = subtree_view(V, x) if x != ROOT else V
    depth = W.support_depth + k if depth is None else depth
    return TraceReport(k, x, float(cheb_trace_diffs(W, k, depth)[k]), depth)


def trace_side(V: Potential, weight: CosCoeffs) -> float:
    """``sum_{n>=1} (c_n / n) t_n``: the trace term of the weighted sum rule."""
    c = weight.c
    if len(c) < 2:
        return 0.0
    t = cheb_trace_diffs(V, len(c) - 1)
    return float(sum(c[n] / n * t[n] for n in range(1, len(c))))


def weight_polynomial(weight: CosCoeffs) -> np.ndarray:
    """Power-basis coefficients of ``h -> sum_n (c_n/n) T_n(h / sqrt2)``."""
    out = np.zeros(1)
    for n in range(1, len(weight.c)):
        if weight.c[n]:
            mono = chebyshev_monomial(n) * SQRT2 ** -np.arange(n + 1)
            out = P.polyadd(out, weight.c[n] / n * mono)
    return out


def trace_side_direct(V: Potential, poly, depth: int | None = None) -> float:
    """``tr(p(H_V) - p(H_0))`` for a power-basis polynomial, from monomial powers.

    Uses ``H_V^j - H_0^j = H_V (H_V^{j-1} - H_0^{j-1}) + V H_0^{j-1}``.
    """
    poly = np.trim_zeros(np.asarray(poly, dtype=float), "b")
    deg = len(poly) - 1
    if V.is_zero() or deg < 1:
        return 0.0
    depth = V.support_depth + deg if depth is None else depth
    H0 = _sparse_adjacency(depth)
    Vd = sp.diags(V.to_array(depth), format="csr")
    H1 = (H0 + Vd).tocsr()
    pow0 = sp.identity(H0.shape[0], format="csr")
    diff = sp.csr_matrix(H0.shape)
    total = 0.0
    for j in range(1, deg + 1):
        diff = (H1 @ diff + Vd @ pow0).tocsr()
        pow0 = (H0 @ pow0).tocsr()
        if poly[j]:
            total += poly[j] * diff.diagonal().sum()
    return float(total)


def k_functional_trace(V: Potential) -> float:
    """``(1/8) tr[(H_V^4 - 24 H_V^2) - (H_0^4 - 24 H_0^2)]``."""
    return trace_side_direct(V, [0.0, 0.0, -24.0 / 8.0, 0.0, 1.0 / 8.0])


class TraceLedger(NamedTuple):
    bracket: float
    bound_terms: tuple[float, float]
    tree_term: float
    subtree_terms: dict


def trace_ledger(V: Potential, N: int, weight: CosCoeffs, direct: bool = False) -> TraceLedger:
    """Trace bracket of the ledger inequality for the truncation ``V(N)``.

    ``bracket = Tr_w(T) - sum_{j=1}^N 2^-j sum_{|x|=j} Tr_w(T_x)``; with
    ``direct=True`` every ``Tr_w`` is evaluated from monomial powers instead of
    the Chebyshev recursion.  ``bound_terms`` are the shell sums of ``V^4``
    (shells 1..N) and ``(delta V)^2`` (shells 2..N).
    """
    VN = truncate(V, N)
    if direct:
        poly = weight_polynomial(weight)

        def tr(W):
            return trace_side_direct(W, poly)
    else:
        def tr(W):
            return trace_side(W, weight)

    tree_term = tr(VN)
    sub = {}
    for x in relevant_subtrees(VN, N):
        sub[x] = tr(subtree_view(VN, x))
    bracket = tree_term
    for x in sorted(sub, key=lambda v: (-v.depth, v.index)):
        bracket -= 2.0 ** -x.depth * sub[x]
    sum_v4 = shell_weighted_sum(VN, lambda a: a ** 4, 1, N)
    sum_dv2 = shell_weighted_sum(difference_op(VN, "delta"), lambda a: a * a, 2, N)
    return TraceLedger(float(bracket), (sum_v4, sum_dv2), float(tree_term), sub)
