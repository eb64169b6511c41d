"""Radial reduction to a half-line Jacobi matrix and the shell structures.

For a radial potential ``V(x) = v_{|x|}`` the vectors
``w_n = 2^{-n/2} sum_{|x|=n} e_x`` span an invariant subspace on which
``H_V / sqrt2`` acts as the Jacobi matrix with diagonal ``v_n / sqrt2`` and
unit off-diagonal.  ``W`` has columns ``w_n``.

Entries ``2^{-n/2}`` are stored exactly as ``a + b sqrt2`` with dyadic ``a, b``
so the intertwining relations can be checked with zero rounding.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import linalg

from .conformal import SQRT2, z_to_zeta
from .resolvent import PoleError, root_green
from .traces import _sparse_adjacency
from .tree import Potential, ball_size, difference_op, shell_weighted_sum


@dataclass(frozen=True)
class RadialProfile:
    v: tuple[float, ...]

    def __post_init__(self):
        v = tuple(float(x) for x in self.v)
        if not v:
            raise ValueError("profile must have at least one entry")
        object.__setattr__(self, "v", v)

    def __len__(self):
        return len(self.v)

    def potential(self) -> Potential:
        return Potential.radial(self.v)


class JacobiReduction(NamedTuple):
    diagonal: np.ndarray
    offdiagonal: np.ndarray
    max_m_residual: float
    m_tree: np.ndarray
    m_jacobi: np.ndarray


def m_jacobi(diagonal, w) -> complex:
    """``((J - w)^{-1})_{00}`` for a finite-rank perturbation of the free half-line.

    Sites past the last diagonal entry are free, so the finite section gets
    the free tail ``m(w) = -zeta`` (``w = zeta + 1/zeta``, ``|zeta| < 1``)
    folded into its last diagonal entry.
    """
    diagonal = np.asarray(diagonal, dtype=float)
    w = complex(w)
    zeta = z_to_zeta(w * SQRT2)  # same disk point as z = sqrt2 w
    n = len(diagonal)
    M = np.diag(diagonal.astype(complex) - w)
    idx = np.arange(n - 1)
    M[idx, idx + 1] = M[idx + 1, idx] = 1.0
    M[-1, -1] += zeta
    rhs = np.zeros(n, dtype=complex)
    rhs[0] = 1.0
    return complex(linalg.solve(M, rhs)[0])


def _check_energy(z: complex) -> complex:
    z = complex(z)
    if z.imag == 0 and abs(z.real) <= 2 * SQRT2:
        raise ValueError(f"test point {z} lies on the band")
    return z


def jacobi_reduce(profile: RadialProfile, test_points) -> JacobiReduction:
    """Compare ``m_{H_V}(z)`` on the tree with ``(1/sqrt2) m_J(z / sqrt2)``."""
    zs = np.array([_check_energy(z) for z in test_points], dtype=complex)
    diag = np.asarray(profile.v) / SQRT2
    off = np.ones(len(diag) - 1)
    m_tree = root_green(profile.potential(), z_to_zeta(zs)) if len(zs) else np.zeros(0, complex)
    with np.errstate(all="ignore"):
        m_j = np.array([m_jacobi(diag, z / SQRT2) / SQRT2 for z in zs], dtype=complex)
    if not (np.all(np.isfinite(m_j)) and np.all(np.abs(m_tree) < 1e12)):
        raise PoleError("a test point sits on an eigenvalue")
    resid = float(np.max(np.abs(m_tree - m_j))) if len(zs) else 0.0
    return JacobiReduction(diag, off, resid, m_tree, m_j)


class Surd:
    """Matrix ``a + b sqrt2`` with dyadic-rational float parts."""

    __array_ufunc__ = None  # make ``ndarray @ Surd`` defer to __rmatmul__

    def __init__(self, a: np.ndarray, b: np.ndarray):
        self.a, self.b = a, b

    def value(self) -> np.ndarray:
        return self.a + SQRT2 * self.b

    def times_sqrt2(self) -> "Surd":
        return Surd(2.0 * self.b, self.a.copy())

    def __matmul__(self, M: np.ndarray) -> "Surd":
        return Surd(self.a @ M, self.b @ M)

    def __rmatmul__(self, M: np.ndarray) -> "Surd":
        return Surd(M @ self.a, M @ self.b)

    def __sub__(self, other: "Surd") -> "Surd":
        return Surd(self.a - other.a, self.b - other.b)

    @property
    def T(self) -> "Surd":
        return Surd(self.a.T, self.b.T)

    def gram(self) -> "Surd":
        """``X^T X`` using ``sqrt2 * sqrt2 = 2``."""
        return Surd(self.a.T @ self.a + 2.0 * self.b.T @ self.b, self.a.T @ self.b + self.b.T @ self.a)

    def max_abs(self) -> float:
        return float(max(np.abs(self.a).max(initial=0.0), np.abs(self.b).max(initial=0.0)))


def isometry_W(D: int) -> Surd:
    n = ball_size(D)
    a, b = np.zeros((n, D + 1)), np.zeros((n, D + 1))
    for k in range(D + 1):
        rows = slice(2 ** k - 1, 2 ** (k + 1) - 1)
        if k % 2 == 0:
            a[rows, k] = 2.0 ** (-k // 2)
        else:
            # 2^{-k/2} = 2^{-(k+1)/2} sqrt2
            b[rows, k] = 2.0 ** (-(k + 1) // 2)
    return Surd(a, b)


def binary_shift(D: int) -> np.ndarray:
    """``S_1 e_x = e_{x1} + e_{x2}`` on the ball, children past depth ``D`` dropped."""
    n = ball_size(D)
    S1 = np.zeros((n, n))
    child = np.arange(1, n)
    S1[child, (child - 1) // 2] = 1.0
    return S1


def half_line_shift(D: int) -> np.ndarray:
    return np.eye(D + 1, k=-1)


@dataclass(frozen=True)
class ShiftStructures:
    depth: int
    W: Surd
    S1: np.ndarray
    S: np.ndarray
    isometry_residual: float
    h0_residual: float
    intertwining_residuals: dict


def shift_structures(D: int) -> ShiftStructures:
    """Build ``W``, ``S_1`` and ``S`` and measure the exact relations on interior rows.

    Interior means rows of depth ``< D`` for relations landing in ``l^2(T)``
    and coordinates ``< D`` for those landing in ``l^2``; the truncated last
    shell is the only place the finite sections differ from the operators.
    """
    if D < 2:
        raise ValueError("D must be at least 2")
    W, S1, S = isometry_W(D), binary_shift(D), half_line_shift(D)
    inner_tree = ball_size(D - 1)
    gram = W.gram()
    iso = max(np.abs(gram.a - np.eye(D + 1)).max(), np.abs(gram.b).max())
    H0 = _sparse_adjacency(D).toarray()
    h0 = float(np.abs(H0 - (S1 + S1.T)).max())

    def tree_rows(X: Surd) -> float:
        return Surd(X.a[:inner_tree], X.b[:inner_tree]).max_abs()

    def line_rows(X: Surd) -> float:
        return Surd(X.a[:D], X.b[:D]).max_abs()

    Wt = W.T
    res = {
        "S1 W - sqrt2 W S": tree_rows((S1 @ W) - (W @ S).times_sqrt2()),
        "W* S1* - sqrt2 S* W*": line_rows((Wt @ S1.T) - (S.T @ Wt).times_sqrt2()),
        "W* S1 - sqrt2 S W*": line_rows((Wt @ S1) - (S @ Wt).times_sqrt2()),
        "S1* W - sqrt2 W S*": tree_rows((S1.T @ W) - (W @ S.T).times_sqrt2()),
    }
    return ShiftStructures(D, W, S1, S, float(iso), h0, res)


def dH_vector(V: Potential, depth: int | None = None) -> np.ndarray:
    """Shell-tiled vector: shell ``2n`` holds ``2^n`` copies of ``2^{-n} V(n, .)``, odd shells zero."""
    d = V.support_depth
    depth = 2 * d if depth is None else depth
    if depth < 2 * d:
        raise ValueError("ball too small for dH")
    out = np.zeros(ball_size(depth))
    for n in range(d + 1):
        lo = 2 ** (2 * n) - 1
        out[lo:lo + 2 ** (2 * n)] = np.tile(V.shell(n), 2 ** n) * 2.0 ** -n
    return out


class ConjectureForm(NamedTuple):
    qform: float
    norm_sq: float
    norm_target: float
    check_A1: float
    ax2m4_form: float
    ax2m4_target: float
    check_Ax2m4: float
    depth_used: int


def _form_value(A, dH: np.ndarray, depth: int) -> float:
    H0 = _sparse_adjacency(depth)
    W = isometry_W(depth).value()
    total = A[0] * float(dH @ dH) if len(A) else 0.0
    if len(A) < 3:
        return total
    u = W.T @ (H0 @ dH)
    K = W.T @ (H0 @ W)
    vec = u.copy()
    for k in range(2, len(A), 2):
        if A[k]:
            total += A[k] * 2.0 ** (-k / 2) * float(u @ vec)
        vec = K @ (K @ vec)
    return total


def conjecture_form(A, V: Potential, D: int | None = None) -> ConjectureForm:
    """``(B(H_0) dH, dH)`` for an even polynomial ``A`` plus the two reference identities.

    For even ``k >= 2`` the ``k``-factor term is
    ``u^T (W* H_0 W)^{k-2} u`` with ``u = W* H_0 dH``.  ``check_A1`` compares
    ``|dH|^2`` with ``sum_{n>=0} 2^-n sum V^2``; ``check_Ax2m4`` compares the
    ``A = x^2 - 4`` form with ``-sum_{n>=1} 2^{-(n+1)} sum (delta V)^2``.
    """
    A = np.trim_zeros(np.asarray(A, dtype=float), "b")
    if np.any(A[1::2] != 0):
        raise ValueError("odd-degree coefficients of A are not supported")
    d = V.support_depth
    need = 2 * d + max(len(A) - 1, 2)
    depth = need if D is None else D
    if depth < need:
        raise ValueError(f"ball depth {depth} too small; need at least {need}")
    dH = dH_vector(V, depth)
    qform = _form_value(A, dH, depth)
    norm_sq = float(dH @ dH)
    norm_target = shell_weighted_sum(V, lambda x: x * x, 0, d)
    ax = _form_value(np.array([-4.0, 0.0, 1.0]), dH, max(depth, 2 * d + 2))
    ax_target = -0.5 * shell_weighted_sum(difference_op(V, "delta"), lambda x: x * x, 1, d + 1)
    return ConjectureForm(qform, norm_sq, norm_target, abs(norm_sq - norm_target),
                          ax, ax_target, abs(ax - ax_target), depth)


def radial_ax2m4_closed_form(profile) -> float:
    """Closed form of the ``A = x^2 - 4`` value for a radial profile.

    With shell sums ``s_{2n} = 2^n v_n`` the vector ``u = W* H_0 dH`` has
    ``u_k = 2^{-k/2}(2 s_{k-1} + s_{k+1})``, which gives
    ``-sum_{n>=0} (v_n - v_{n+1})^2 - 2 v_0^2``.
    """
    v = np.append(np.asarray(profile, dtype=float), 0.0)
    return float(-np.sum(np.diff(v) ** 2) - 2.0 * v[0] ** 2)
