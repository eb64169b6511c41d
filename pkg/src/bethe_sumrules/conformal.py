"""Uniformization of the resolvent domain, Chebyshev polynomials and weights.

The map ``z = sqrt(2) (zeta + 1/zeta)`` sends the unit disk onto the complement
of the band ``[-2 sqrt(2), 2 sqrt(2)]``.  Weights are even trigonometric
polynomials ``w(theta) = sum_n c_n cos(n theta)`` stored as their coefficient
vector.
"""
from __future__ import annotations

from math import comb

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import integrate

SQRT2 = np.sqrt(2.0)
BAND_EDGE = 2.0 * SQRT2


def zeta_to_z(zeta):
    zeta = np.asarray(zeta, dtype=complex)
    if np.any(zeta == 0):
        raise ValueError("zeta = 0 maps to infinity")
    out = SQRT2 * (zeta + 1.0 / zeta)
    return out if out.ndim else complex(out)


def z_to_zeta(z):
    """Inverse of :func:`zeta_to_z` on the branch with ``|zeta| < 1``."""
    z = np.asarray(z, dtype=complex)
    if np.any((np.abs(z.imag) == 0) & (np.abs(z.real) <= BAND_EDGE)):
        raise ValueError("z lies on the band [-2*sqrt(2), 2*sqrt(2)]")
    root = np.sqrt(z * z - 8.0)
    a = (z - root) / (2.0 * SQRT2)
    b = (z + root) / (2.0 * SQRT2)
    # a * b = 1, so exactly one root is inside the disk
    out = np.where(np.abs(a) < 1.0, a, b)
    return out if out.ndim else complex(out)


def map_zeta_z(p, direction: str = "zeta_to_z"):
    if direction == "zeta_to_z":
        return zeta_to_z(p)
    if direction == "z_to_zeta":
        return z_to_zeta(p)
    raise ValueError(f"unknown direction {direction!r}")


def chebyshev_eval(k: int, y):
    """Normalized Chebyshev polynomial: ``T_k(2 cos t) = 2 cos(k t)``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    y = np.asarray(y, dtype=float)
    prev, cur = np.full_like(y, 2.0), y.copy()
    if k == 0:
        return prev
    for _ in range(k - 1):
        prev, cur = cur, y * cur - prev
    return cur


def chebyshev_monomial(k: int) -> np.ndarray:
    """Power-basis coefficients (ascending) of the normalized ``T_k``."""
    prev, cur = np.array([2.0]), np.array([0.0, 1.0])
    if k == 0:
        return prev
    for _ in range(k - 1):
        prev, cur = cur, P.polysub(P.polymulx(cur), prev)
    return cur


class CosCoeffs:
    """Finite cosine series ``w(theta) = sum_n c[n] cos(n theta)``."""

    def __init__(self, c):
        c = np.atleast_1d(np.asarray(c, dtype=float))
        if c.ndim != 1 or not len(c):
            raise ValueError("cosine coefficients must be a nonempty 1-d sequence")
        self.c = np.trim_zeros(c, "b") if np.any(c) else c[:1]

    def __repr__(self):
        return f"CosCoeffs({self.c.tolist()})"

    def __eq__(self, other):
        return isinstance(other, CosCoeffs) and np.array_equal(self.c, other.c)

    def __add__(self, other):
        n = max(len(self.c), len(other.c))
        return CosCoeffs(np.pad(self.c, (0, n - len(self.c))) + np.pad(other.c, (0, n - len(other.c))))

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        n = np.arange(len(self.c))
        return np.cos(np.multiply.outer(theta, n)) @ self.c

    def min_on_circle(self, nodes: int = 4096) -> float:
        theta = np.linspace(0.0, 2 * np.pi, nodes, endpoint=False)
        return float(self(theta).min())

    def is_nonnegative(self, tol: float = 1e-12) -> bool:
        return self.min_on_circle() >= -tol


def _power_to_cos(poly) -> np.ndarray:
    """Cosine coefficients of ``q(2 cos t)`` from ascending coefficients of ``q``."""
    poly = np.asarray(poly, dtype=float)
    out = np.zeros(len(poly))
    for k, a in enumerate(poly):
        if a == 0:
            continue
        # (e^{it} + e^{-it})^k = sum_j C(k, j) e^{i (k - 2j) t}
        for j in range(k + 1):
            m = abs(k - 2 * j)
            out[m] += a * comb(k, j)
    return out


def sin_power_weight(p: int) -> CosCoeffs:
    """``(2 sin t)**(2p)``; ``p = 2`` gives ``16 sin^4 t = 6 - 8 cos 2t + 2 cos 4t``."""
    if p < 0:
        raise ValueError("p must be nonnegative")
    # 4 sin^2 t = 4 - (2 cos t)^2
    return CosCoeffs(_power_to_cos(P.polypow([4.0, 0.0, -1.0], p)))


def band_poly_weight(A) -> CosCoeffs:
    """Weight ``A(2 cos t) * 4 sin^2 t`` for the polynomial family.

    With ``x = 2 sqrt(2) cos t`` this is ``A(x / sqrt(2)) sqrt(8 - x^2) dx`` up to
    the Jacobian.  Only even polynomials are accepted.
    """
    A = np.trim_zeros(np.asarray(A, dtype=float), "b")
    if np.any(A[1::2] != 0):
        raise ValueError("odd-degree terms of A are not supported")
    return CosCoeffs(_power_to_cos(P.polymul(A, [4.0, 0.0, -1.0])))


def weight_coeffs(spec) -> CosCoeffs:
    """Build a weight from ``{"sin_power": 2p}`` or ``{"poly": [a0, a1, ...]}``."""
    if isinstance(spec, CosCoeffs):
        return spec
    if "sin_power" in spec:
        two_p = int(spec["sin_power"])
        if two_p % 2:
            raise ValueError("sin_power must be even")
        return sin_power_weight(two_p // 2)
    if "poly" in spec:
        return band_poly_weight(spec["poly"])
    if "cos" in spec:
        return CosCoeffs(spec["cos"])
    raise ValueError(f"unrecognised weight spec {spec!r}")


def eigen_term_G(zeta, c) -> float:
    """Eigenvalue-side contribution of a zero at ``zeta`` to the weighted sum rule.

    ``G_w(zeta) = 2 c_0 log(1/|zeta|) + sum_{n>=1} (c_n / n)(zeta^-n - zeta^n)``.
    ``zeta`` is real with ``0 < |zeta| <= 1``; negative zeros keep their sign so
    odd cosine modes are handled correctly.

    With ``t = log(1/|zeta|)`` the sum equals
    ``sum_j 2 t^{2j+1} / (2j+1)! * sum_n c'_n n^{2j}`` (``c'_n = sgn^n c_n``).
    Near the band edge the sinh form cancels to ``O(t^{2p+1})``, so this
    series is used when ``deg * t <= 1``.
    """
    c = c.c if isinstance(c, CosCoeffs) else np.asarray(c, dtype=float)
    zeta = float(zeta)
    if zeta == 0.0 or abs(zeta) > 1.0:
        raise ValueError(f"zeta must satisfy 0 < |zeta| <= 1, got {zeta}")
    t = -np.log(abs(zeta))
    n = np.arange(len(c))
    cs = c * (1.0 if zeta > 0 else -1.0) ** n
    if (len(c) - 1) * t <= 1.0:
        total, fact, n2j = 0.0, 1.0, np.ones(len(c))
        for j in range(40):
            if j:
                fact *= (2 * j) * (2 * j + 1)
                n2j = n2j * n * n
            term = 2.0 * t ** (2 * j + 1) / fact * float(cs @ n2j)
            total += term
            if j > 2 and abs(term) <= 1e-17 * abs(total):
                break
        return float(total)
    total = 2.0 * cs[0] * t
    for k in range(1, len(c)):
        if cs[k]:
            # zeta^-k - zeta^k = sgn^k * 2 sinh(k t)
            total += cs[k] / k * 2.0 * np.sinh(k * t)
    return float(total)


def F_A_eval(x: float, A=(1.0,)) -> float:
    """Eigenvalue penalty ``+-int_{+-2sqrt2}^{x} A(s/sqrt2) sqrt(s^2 - 8) ds``."""
    if abs(x) < BAND_EDGE:
        raise ValueError(f"|x| = {abs(x)} lies inside the band")
    A = np.asarray(A, dtype=float)

    def f(s):
        return P.polyval(s / SQRT2, A) * np.sqrt(max(s * s - 8.0, 0.0))

    lo, hi = (BAND_EDGE, x) if x > 0 else (x, -BAND_EDGE)
    if lo == hi:
        return 0.0
    val, _ = integrate.quad(f, lo, hi, epsabs=1e-14, epsrel=1e-13, limit=200)
    return float(val)
