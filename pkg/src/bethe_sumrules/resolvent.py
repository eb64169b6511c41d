"""Exact resolvents of H_V on the infinite tree, restricted to a finite ball.

The exterior of a depth-``D`` ball consists of two free copies of ``T`` hanging
below every depth-``D`` vertex.  Eliminating them adds the self-energy
``2 * (-zeta / sqrt(2)) = -sqrt(2) zeta`` on the boundary shell, so

    G = (H_B + V_B - z - Lambda(zeta))^{-1}

is the infinite-tree resolvent on the ball, for every ``D >= support_depth``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import linalg

from . import kernels
from .conformal import SQRT2, zeta_to_z
from .tree import Potential, VertexId, ball_size


POLE_RTOL = 1e-13


class PoleError(ArithmeticError):
    """The resolvent does not exist at this spectral parameter."""


@lru_cache(maxsize=32)
def _adjacency(depth: int) -> np.ndarray:
    n = ball_size(depth)
    A = np.zeros((n, n))
    child = np.arange(1, n)
    parent = (child - 1) // 2
    A[child, parent] = A[parent, child] = 1.0
    A.setflags(write=False)
    return A


def adjacency(depth: int) -> np.ndarray:
    """Adjacency matrix of the depth-``depth`` ball (no boundary correction)."""
    return _adjacency(depth).copy()


def ball_operator(V: Potential, depth: int, zeta: complex) -> np.ndarray:
    """``H_B + V_B - z - Lambda`` on the ball, Lambda = -sqrt(2) zeta on the last shell."""
    _check_zeta(zeta)
    z = zeta_to_z(zeta)
    M = _adjacency(depth).astype(complex)
    diag = V.to_array(depth) - z
    diag[2 ** depth - 1:] += SQRT2 * zeta
    M[np.diag_indices_from(M)] = diag
    return M


def _check_zeta(zeta):
    if zeta == 0:
        raise ValueError("zeta = 0 corresponds to z = infinity")
    r = abs(zeta)
    if r > 1.0 + 1e-14:
        raise ValueError(f"|zeta| = {r} outside the closed disk")
    if abs(complex(zeta).imag) <= 1e-14 and abs(r - 1.0) <= 1e-14:
        raise ValueError("zeta = +-1 are band edges")


@dataclass(frozen=True)
class GreenMatrix:
    ball_depth: int
    zeta: complex
    entries: np.ndarray

    def __getitem__(self, xy: tuple[VertexId, VertexId]) -> complex:
        x, y = xy
        return complex(self.entries[x.linear, y.linear])


def green_ball(V: Potential, D: int, zeta: complex) -> GreenMatrix:
    """Infinite-tree resolvent ``(H_V - z)^{-1}`` on the depth-``D`` ball (dense LU)."""
    if D < V.support_depth and any(v.depth > D for v in V.values):
        raise ValueError(f"ball depth {D} smaller than support depth {V.support_depth}")
    zeta = complex(zeta)
    M = ball_operator(V, D, zeta)
    try:
        lu, piv = linalg.lu_factor(M, check_finite=True)
    except (linalg.LinAlgError, ValueError) as exc:
        raise PoleError(f"singular system at zeta = {zeta}") from exc
    piv_abs = np.abs(np.diag(lu))
    if piv_abs.min() <= POLE_RTOL * piv_abs.max():
        raise PoleError(f"singular system at zeta = {zeta}")
    G = linalg.lu_solve((lu, piv), np.eye(len(M)))
    return GreenMatrix(D, zeta, G)


@dataclass(frozen=True)
class MValue:
    M: complex
    im_density: float | None


def m_function(V: Potential, zeta: complex) -> MValue:
    """``M(zeta) = -m_{H_V}(z(zeta)) = -G(0, 0)``; ``im_density`` on the unit circle."""
    zeta = complex(zeta)
    G = green_ball(V, V.support_depth, zeta)
    M = -G.entries[0, 0]
    on_circle = abs(abs(zeta) - 1.0) < 1e-12
    return MValue(complex(M), float(M.imag) if on_circle else None)


def root_green(V: Potential, zetas) -> np.ndarray:
    """Vectorized ``G(0, 0)`` through the tree kernel (no dense solve)."""
    return kernels.schur_sweep(V.to_array(), zetas)[1]


@dataclass(frozen=True)
class JostVector:
    zeta: complex
    values: dict

    def __getitem__(self, y: VertexId) -> complex:
        return self.values[y]

    def relation_residual(self, V: Potential, depth: int | None = None) -> float:
        """Max over interior vertices of ``|(H_V - z) f - e_0|``."""
        depth = max(v.depth for v in self.values) if depth is None else depth
        z = zeta_to_z(self.zeta)
        worst = 0.0
        for x, fx in self.values.items():
            if x.depth >= depth:
                continue
            s = sum(self.values[c] for c in x.children)
            if x.parent is not None:
                s += self.values[x.parent]
            r = s + (V[x] - z) * fx - (1.0 if x.depth == 0 else 0.0)
            worst = max(worst, abs(r))
        return worst


def jost_vector(V: Potential, zeta: complex, D: int) -> JostVector:
    """``f = (H_V - z)^{-1} e_0`` on the depth-``D`` ball."""
    D = max(D, V.support_depth)
    G = green_ball(V, D, zeta)
    row = G.entries[0]
    values = {VertexId.from_linear(i): complex(row[i]) for i in range(len(row))}
    return JostVector(complex(zeta), values)
