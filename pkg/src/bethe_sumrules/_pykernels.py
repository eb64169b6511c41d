"""Pure numpy implementation of the tree kernels (fallback for ``_ckernels``)."""
import numpy as np

SQRT2 = np.sqrt(2.0)


def _ball_depth(n):
    depth = (n + 1).bit_length() - 2
    if 2 ** (depth + 1) - 1 != n:
        raise ValueError(f"{n} is not a ball size")
    return depth


def schur_sweep(v, zetas):
    """Leaf-to-root elimination of ``H_B + V - z - Lambda`` on a heap-ordered ball.

    Returns ``(L, g0)``: the perturbation determinant ``det(H_V - z)/(H_0 - z)``
    restricted to the ball (exact for the infinite tree) and the root diagonal
    Green function, for each ``zeta``.
    """
    v = np.ascontiguousarray(v, dtype=float)
    zetas = np.atleast_1d(np.asarray(zetas, dtype=complex))
    depth = _ball_depth(len(v))
    z = SQRT2 * (zetas + 1.0 / zetas)
    # free pivots all equal -sqrt(2)/zeta
    scale = (-zetas / SQRT2)[:, None]
    lo = 2 ** depth - 1
    d = v[None, lo:] - (z + (-SQRT2 * zetas))[:, None]
    L = np.prod(d * scale, axis=1)
    for k in range(depth - 1, -1, -1):
        lo = 2 ** k - 1
        d = v[None, lo:2 * lo + 1] - z[:, None] - 1.0 / d[:, 0::2] - 1.0 / d[:, 1::2]
        L = L * np.prod(d * scale, axis=1)
    return L, 1.0 / d[:, 0]
