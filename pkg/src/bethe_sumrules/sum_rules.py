"""Boundary integrals, sum-rule identities and the ledger inequality.

All circle integrals are normalized means ``(1/2pi) int_0^{2pi} ... dtheta``
evaluated with the periodic trapezoid rule on offset nodes
``theta_j = (j + 1/2) 2pi / M`` (never hitting ``theta = 0, pi``), doubling
``M`` until successive values agree.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, NamedTuple

import numpy as np
from scipy import integrate

from . import kernels
from .conformal import BAND_EDGE, CosCoeffs, eigen_term_G
from .determinant import L_values, relevant_subtrees
from .spectrum import EigenLedger, eigen_zeta, subtree_ledgers
from .traces import cheb_trace_diffs, k_functional_trace, trace_ledger, trace_side, trace_side_direct, weight_polynomial
from .tree import ROOT, Potential, VertexId, frontier_set, sphere, subtree_view, truncate

QUAD_TOL = 1e-9
MIN_NODES = 64
MAX_NODES = 2 ** 16


class QuadResult(NamedTuple):
    value: float
    nodes: int
    converged: bool


def offset_nodes(M: int) -> np.ndarray:
    return (np.arange(M) + 0.5) * (2 * np.pi / M)


def periodic_trapezoid(func: Callable[[np.ndarray], np.ndarray], tol: float = QUAD_TOL,
                       min_nodes: int = MIN_NODES, max_nodes: int = MAX_NODES) -> QuadResult:
    """Mean of a ``2pi``-periodic function; doubles nodes until the change is below ``tol``.

    The change is measured relative to ``max(1, |value|)``.
    """
    M, prev = min_nodes, None
    while True:
        val = float(np.mean(func(offset_nodes(M))))
        if prev is not None and abs(val - prev) <= tol * max(1.0, abs(val)):
            return QuadResult(val, M, True)
        if M >= max_nodes:
            return QuadResult(val, M, False)
        prev, M = val, 2 * M


@dataclass(frozen=True)
class SumRuleReport:
    lhs: float
    rhs: float
    residual: float
    weight: CosCoeffs | None
    nodes_used: int
    identity_kind: str
    converged: bool = True
    slack: float | None = None
    extra: dict = field(default_factory=dict)

    @property
    def is_inequality(self) -> bool:
        return self.slack is not None


def _identity_report(lhs, rhs, weight, quad, kind, **extra) -> SumRuleReport:
    return SumRuleReport(float(lhs), float(rhs), abs(lhs - rhs) / (1.0 + abs(lhs)), weight,
                         quad.nodes, kind, quad.converged, None, extra)


def _subtree(V: Potential, x: VertexId) -> Potential:
    return V if x == ROOT else subtree_view(V, x)


def log_det_quadrature(V: Potential, x: VertexId, weight: CosCoeffs, tol: float = QUAD_TOL,
                       max_nodes: int = MAX_NODES) -> QuadResult:
    """``(1/2pi) int log|L_{T_x}(e^{i theta})|^2 w(theta) dtheta``."""
    W = _subtree(V, x)
    if W.is_zero():
        return QuadResult(0.0, 0, True)

    def f(theta):
        L = L_values(W, np.exp(1j * theta))
        return np.log(np.abs(L) ** 2) * weight(theta)

    return periodic_trapezoid(f, tol, max_nodes=max_nodes)


def eigen_side(ledger: EigenLedger, weight: CosCoeffs) -> float:
    return float(sum(e.mult * eigen_term_G(e.zeta, weight) for e in ledger.entries))


def fourier_identity(V: Potential, x: VertexId, n: int, ledger: EigenLedger | None = None,
                     tol: float = QUAD_TOL, max_nodes: int = MAX_NODES) -> SumRuleReport:
    """Single-mode identity for ``cos(n theta)``.

    ``n = 0``: ``(1/4pi) int log|L|^2 = sum_s log 1/|zeta_s|``.
    ``n >= 1``: ``(1/2pi) int log|L|^2 cos(n theta)
    = (1/n) sum_s (zeta_s^-n - zeta_s^n) - (1/n) t_n``.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    W = _subtree(V, x)
    ledger = eigen_zeta(W) if ledger is None else ledger
    weight = CosCoeffs(np.eye(n + 1)[n])
    quad = log_det_quadrature(W, ROOT, weight, tol, max_nodes)
    if n == 0:
        lhs = 0.5 * quad.value
        rhs = sum(e.mult * np.log(1.0 / abs(e.zeta)) for e in ledger.entries)
        t_n = 0.0
    else:
        lhs = quad.value
        t_n = cheb_trace_diffs(W, n)[n]
        rhs = sum(e.mult * (e.zeta ** -n - e.zeta ** n) for e in ledger.entries) / n - t_n / n
    return _identity_report(lhs, rhs, weight, quad, "fourier", n=n, trace=float(t_n))


def combined_identity(V: Potential, x: VertexId, weight: CosCoeffs, ledger: EigenLedger | None = None,
                      tol: float = QUAD_TOL, max_nodes: int = MAX_NODES) -> SumRuleReport:
    """``(1/2pi) int log|L|^2 w = sum_s G_w(zeta_s) - sum_n (c_n/n) t_n``."""
    W = _subtree(V, x)
    ledger = eigen_zeta(W) if ledger is None else ledger
    quad = log_det_quadrature(W, ROOT, weight, tol, max_nodes)
    g_sum = eigen_side(ledger, weight)
    tr = trace_side(W, weight)
    tr_direct = trace_side_direct(W, weight_polynomial(weight))
    return _identity_report(quad.value, g_sum - tr, weight, quad, "combined",
                            eigen_sum=g_sum, trace=tr, trace_direct=tr_direct)


@lru_cache(maxsize=1)
def calibrate_kappa_M() -> float:
    """``Im M(e^{i theta}) / sin(theta)`` for the free operator, measured at theta = pi/2."""
    g0 = kernels.schur_sweep(np.zeros(1), np.array([1j]))[1][0]
    return float(-g0.imag)


def im_m_boundary(V: Potential, theta) -> np.ndarray:
    """``Im M(e^{i theta}) = -Im G(0,0)`` on the unit circle (vectorized)."""
    g0 = kernels.schur_sweep(V.to_array(), np.exp(1j * np.asarray(theta, dtype=float)))[1]
    return -g0.imag


def entropy_density(V: Potential, theta) -> np.ndarray:
    """``Im M(e^{i theta}) / (kappa_M sin theta)``; equal to one for ``V = 0``."""
    theta = np.asarray(theta, dtype=float)
    return im_m_boundary(V, theta) / (calibrate_kappa_M() * np.sin(theta))


class EntropyResult(NamedTuple):
    value: float
    x_value: float
    kappa_M: float
    nodes: int
    converged: bool
    min_density: float


def entropy_integral(V: Potential, weight: CosCoeffs, tol: float = QUAD_TOL,
                     max_nodes: int = MAX_NODES, x_form: bool = True) -> EntropyResult:
    """``(1/2pi) int log(Im M / (kappa_M sin theta)) w(theta) dtheta``.

    The x-form evaluates the same quantity as
    ``(1/pi) int_{-2sqrt2}^{2sqrt2} log rho(x) w(theta(x)) dx / sqrt(8 - x^2)``
    with ``x = 2 sqrt2 cos theta``, by adaptive Gauss-Kronrod quadrature.
    """
    kappa = calibrate_kappa_M()
    seen_min = [np.inf]

    def f(theta):
        rho = entropy_density(V, theta)
        seen_min[0] = min(seen_min[0], float(rho.min()))
        return np.log(np.maximum(rho, 1e-300)) * weight(theta)

    quad = periodic_trapezoid(f, tol, max_nodes=max_nodes)
    x_val = float("nan")
    if x_form:
        def g(x):
            th = np.arccos(np.clip(x / BAND_EDGE, -1.0, 1.0))
            if np.sin(th) < 1e-12:
                return 0.0
            rho = entropy_density(V, np.array([th]))[0]
            return np.log(max(rho, 1e-300)) * weight(th)

        val, _ = integrate.quad(g, -BAND_EDGE, BAND_EDGE, weight="alg", wvar=(-0.5, -0.5),
                                epsabs=1e-13, epsrel=1e-12, limit=400)
        x_val = float(val / np.pi)
    return EntropyResult(quad.value, x_val, kappa, quad.nodes, quad.converged, seen_min[0])


class AGMProfile(NamedTuple):
    theta: np.ndarray
    im_m: np.ndarray
    im_m_formula: np.ndarray
    formula_residual: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    rhs_shells: np.ndarray
    slack: np.ndarray


def agm_profile(V: Potential, N: int, theta) -> AGMProfile:
    """Im M product formula and the AGM lower bound at boundary angles, for ``V(N)``."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if np.any(np.isclose(np.sin(theta), 0.0, atol=1e-14)):
        raise ValueError("theta = 0, pi are band edges")
    VN = truncate(V, N)
    zeta = np.exp(1j * theta)
    kappa = calibrate_kappa_M()
    im_m = im_m_boundary(VN, theta)
    L_T = L_values(VN, zeta)
    L_sub = {x: L_values(VN, zeta, x) for x in relevant_subtrees(VN)}
    one = np.ones_like(zeta)
    frontier_sq = []
    for y in sphere(N):
        prod = one.copy()
        for x in frontier_set(y).frontier:
            prod = prod * L_sub.get(x, one)
        frontier_sq.append(np.abs(prod) ** 2)
    frontier_sq = np.array(frontier_sq)
    abs_LT2 = np.abs(L_T) ** 2
    formula = kappa * np.sin(theta) * frontier_sq.sum(axis=0) / (2 ** N * abs_LT2)
    resid = np.abs(im_m - formula) / np.abs(im_m)
    lhs = np.log(im_m / (kappa * np.sin(theta)))
    rhs = np.log(frontier_sq).mean(axis=0) - np.log(abs_LT2)
    shells = -np.log(abs_LT2)
    for x, L in sorted(L_sub.items()):
        if 1 <= x.depth <= N:
            shells = shells + 2.0 ** -x.depth * np.log(np.abs(L) ** 2)
    return AGMProfile(theta, im_m, formula, resid, lhs, rhs, shells, lhs - rhs)


class AGMPoint(NamedTuple):
    lhs: float
    rhs: float
    slack: float
    formula_residual: float


def agm_pointwise(V: Potential, N: int, theta: float) -> AGMPoint:
    prof = agm_profile(V, N, [theta])
    return AGMPoint(float(prof.lhs[0]), float(prof.rhs[0]), float(prof.slack[0]),
                    float(prof.formula_residual[0]))


def eigen_bracket(V: Potential, N: int, weight: CosCoeffs) -> tuple[float, dict]:
    """``sum_s G_w(tree) - sum_{j=1}^N 2^-j sum_{|x|=j} sum_s G_w(T_x)`` for ``V(N)``."""
    VN = truncate(V, N)
    ledgers = subtree_ledgers(VN, N)
    total = eigen_side(ledgers[ROOT], weight)
    for x in sorted((x for x in ledgers if x != ROOT), key=lambda v: (-v.depth, v.index)):
        total -= 2.0 ** -x.depth * eigen_side(ledgers[x], weight)
    return float(total), ledgers


def ledger_inequality(V: Potential, N: int, weight: CosCoeffs, tol: float = QUAD_TOL,
                      max_nodes: int = MAX_NODES) -> SumRuleReport:
    """Entropy plus eigenvalue bracket versus the trace bracket, for ``V(N)``.

    Reports ``slack = lhs - rhs``, which is nonnegative whenever ``w >= 0``.
    """
    if not weight.is_nonnegative():
        raise ValueError(f"weight {weight} takes negative values")
    VN = truncate(V, N)
    ent = entropy_integral(VN, weight, tol, max_nodes, x_form=False)
    g_bracket, ledgers = eigen_bracket(VN, N, weight)
    tl = trace_ledger(VN, N, weight)
    lhs = ent.value + g_bracket
    rhs = tl.bracket
    return SumRuleReport(lhs, rhs, abs(lhs - rhs) / (1.0 + abs(lhs)), weight, ent.nodes,
                         "ledger_inequality", ent.converged, lhs - rhs,
                         {"entropy": ent.value, "eigen_bracket": g_bracket,
                          "sum_V4": tl.bound_terms[0], "sum_dV2": tl.bound_terms[1],
                          "kappa_M": ent.kappa_M,
                          "ledger_confident": all(l.confident for l in ledgers.values())})


def k_form_check(V: Potential, x: VertexId = ROOT) -> tuple[float, float]:
    """Chebyshev-assembled trace side for ``16 sin^4`` and the direct ``K/8`` trace."""
    from .conformal import sin_power_weight

    W = _subtree(V, x)
    return trace_side(W, sin_power_weight(2)), k_functional_trace(W)
