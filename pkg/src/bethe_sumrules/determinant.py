"""Perturbation determinants over subtrees and the Jost-solution factorization.

For finite-rank ``V`` the determinant

    L_{T_x}(zeta) = det (H_{V,T_x} - z)(H_{0,T_x} - z)^{-1}

reduces to ``det(I + V_S G0[S, S])`` over the support ``S`` of ``V|_{T_x}``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from . import kernels
from .conformal import SQRT2
from .resolvent import green_ball, jost_vector
from .tree import ROOT, Potential, VertexId, frontier_set, subtree_view


@dataclass(frozen=True)
class DetValue:
    zeta: complex
    value: complex
    subtree_root: VertexId


def det_support(V: Potential, zeta: complex) -> complex:
    """``det(I + V_S G0[S, S])`` with the free Green matrix from :func:`green_ball`."""
    if V.is_zero():
        return 1.0 + 0.0j
    S = np.array([v.linear for v in V.support])
    G0 = green_ball(Potential(), V.support_depth, zeta).entries[np.ix_(S, S)]
    vals = np.array([V[v] for v in V.support])
    return complex(np.linalg.det(np.eye(len(S)) + vals[:, None] * G0))


def det_L(V: Potential, x: VertexId, zeta: complex) -> DetValue:
    """Perturbation determinant of ``H_{V, T_x}`` at one point of the disk."""
    return DetValue(complex(zeta), det_support(subtree_view(V, x), zeta), x)


def L_values(V: Potential, zetas, x: VertexId = ROOT) -> np.ndarray:
    """Vectorized ``L_{T_x}`` through the tree kernel; used on quadrature grids.

    A pivot of the sweep vanishes where some subtree determinant does, and the
    product then reads ``0 * inf``; such points are redone with
    :func:`det_support`.
    """
    W = subtree_view(V, x) if x != ROOT else V
    zetas = np.atleast_1d(np.asarray(zetas, dtype=complex))
    if W.is_zero():
        return np.ones(len(zetas), dtype=complex)
    with np.errstate(all="ignore"):
        L = kernels.schur_sweep(W.to_array(), zetas)[0]
    bad = ~np.isfinite(L)
    for i in np.flatnonzero(bad):
        L[i] = det_support(W, zetas[i])
    return L


def det_L_frontier(V: Potential, y: VertexId, zeta: complex) -> DetValue:
    """Product of ``L_{T_x}`` over the frontier of the path to ``y``."""
    value = 1.0 + 0.0j
    for x in frontier_set(y).frontier:
        value *= det_L(V, x, zeta).value
    return DetValue(complex(zeta), value, y)


def relevant_subtrees(V: Potential, max_depth: int | None = None) -> list[VertexId]:
    """Roots ``x`` (depth >= 1) whose subtree meets ``supp V``."""
    out = set()
    for v in V.values:
        w = v
        while w.depth >= 1:
            if max_depth is None or w.depth <= max_depth:
                out.add(w)
            w = w.parent
    return sorted(out)


@lru_cache(maxsize=4096)
def _kappa0(n: int, zeta: complex) -> complex:
    f = jost_vector(Potential(), zeta, n)
    y = VertexId(n, 1)
    return f[y] / (zeta / SQRT2) ** n


def calibration_kappa0(n: int, zeta: complex) -> complex:
    """Ratio ``f_y / (zeta/sqrt2)^n`` measured for the free operator at ``|y| = n``."""
    return _kappa0(int(n), complex(zeta))


class MainLemmaResult(NamedTuple):
    kappa: complex
    kappa0: complex
    residual: float
    f_y: complex
    ratio: complex


def main_lemma_residual(V: Potential, y: VertexId, zeta: complex,
                        eps: float = 1e-300) -> MainLemmaResult:
    """Compare ``f_y`` with ``(zeta/sqrt2)^n L_frontier / L_T`` times the free constant."""
    zeta = complex(zeta)
    n = y.depth
    f_y = jost_vector(V, zeta, n)[y]
    L_T = det_L(V, ROOT, zeta).value
    R = (zeta / SQRT2) ** n * det_L_frontier(V, y, zeta).value / L_T
    if abs(R) < eps:
        raise ZeroDivisionError(f"vanishing determinant ratio at zeta = {zeta}")
    k0 = calibration_kappa0(n, zeta)
    residual = abs(f_y - k0 * R) / max(abs(f_y), eps)
    return MainLemmaResult(f_y / R, k0, float(residual), f_y, R)
