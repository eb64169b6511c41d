"""Discrete spectrum outside the band from zeros of the perturbation determinant.

Eigenvalues of ``H_{V, T_x}`` outside ``[-2 sqrt2, 2 sqrt2]`` correspond to real
zeros ``zeta_s`` of ``L_{T_x}`` in ``(-1, 0) U (0, 1)`` with ``x_s = z(zeta_s)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import linalg, optimize

from .conformal import BAND_EDGE, SQRT2, F_A_eval
from .determinant import L_values, relevant_subtrees
from .tree import ROOT, Potential, VertexId, ball_size, subtree_view, truncate

GRID_POINTS = 4096
EDGE_GAP = 1e-4
WIND_RADIUS = 1e-4
WIND_NODES = 64


class Eigen(NamedTuple):
    zeta: float
    x: float
    mult: int
    confident: bool = True


@dataclass(frozen=True)
class EigenLedger:
    entries: tuple[Eigen, ...] = ()
    subtree_root: VertexId = ROOT

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def total_multiplicity(self) -> int:
        return sum(e.mult for e in self.entries)

    def energies(self) -> np.ndarray:
        """Eigenvalues repeated by multiplicity, ascending."""
        return np.sort(np.repeat([e.x for e in self.entries], [e.mult for e in self.entries]))

    @property
    def confident(self) -> bool:
        return all(e.confident for e in self.entries)


def _sorted_entries(entries):
    # x^- ascending (most negative first), then x^+ descending
    neg = sorted((e for e in entries if e.x < 0), key=lambda e: e.x)
    pos = sorted((e for e in entries if e.x > 0), key=lambda e: -e.x)
    return tuple(neg + pos)


def winding_number(f, center: complex, radius: float = WIND_RADIUS,
                   nodes: int = WIND_NODES) -> int:
    """Number of zeros of ``f`` inside a circle, from the total change of argument."""
    theta = 2 * np.pi * np.arange(nodes + 1) / nodes
    vals = f(center + radius * np.exp(1j * theta))
    darg = np.angle(vals[1:] / vals[:-1])
    return int(round(darg.sum() / (2 * np.pi)))


def zero_centroid(f, center: complex, radius: float = WIND_RADIUS, nodes: int = WIND_NODES) -> complex:
    """Mean of the zeros of an entire ``f`` inside a circle.

    ``(1/2 pi i) oint zeta f'/f`` divided by the zero count, with ``f'`` from
    the Taylor coefficients read off an FFT of the contour samples.  Unlike a
    minimizer this stays accurate for multiple zeros.
    """
    theta = 2 * np.pi * np.arange(nodes) / nodes
    e = np.exp(1j * theta)
    F = f(center + radius * e)
    B = np.fft.fft(F) / nodes
    k = np.arange(nodes)
    Fp = (np.fft.ifft(k * B) * nodes) / (radius * e)
    w = Fp / F * radius * e
    count = w.mean()
    return complex((((center + radius * e) * w).mean()) / count)


def eigen_zeta(V: Potential, x: VertexId = ROOT, grid_points: int = GRID_POINTS,
               edge_gap: float = EDGE_GAP) -> EigenLedger:
    """Zeros of ``zeta -> L_{T_x}(zeta)`` on the real diameter of the disk."""
    W = subtree_view(V, x) if x != ROOT else V
    if W.is_zero():
        return EigenLedger((), x)

    def f(zs):
        return L_values(W, zs)

    def f_real(t):
        return f(np.array([t]))[0].real

    grid = np.linspace(-1 + edge_gap, 1 - edge_gap, grid_points)
    vals = f(grid).real
    roots = []
    sgn = np.sign(vals)
    for i in np.flatnonzero(sgn == 0):
        roots.append(grid[i])
    for i in np.flatnonzero(sgn[:-1] * sgn[1:] < 0):
        roots.append(optimize.brentq(f_real, grid[i], grid[i + 1], xtol=1e-30, rtol=1e-15))
    # even-order zeros do not change sign; catch them at local minima of |L|
    absv = np.abs(vals)
    is_min = (absv[1:-1] <= absv[:-2]) & (absv[1:-1] <= absv[2:])
    same_sign = (sgn[:-2] == sgn[1:-1]) & (sgn[1:-1] == sgn[2:])
    for i in np.flatnonzero(is_min & same_sign) + 1:
        res = optimize.minimize_scalar(lambda t: abs(f_real(t)), bounds=(grid[i - 1], grid[i + 1]),
                                       method="bounded", options={"xatol": 1e-13})
        t = float(res.x)
        if winding_number(f, t) > 0:
            roots.append(t)
    roots = sorted(r for r in roots if r != 0.0)

    clusters: list[list[float]] = []
    for r in roots:
        if clusters and r - clusters[-1][-1] < 2 * WIND_RADIUS:
            clusters[-1].append(r)
        else:
            clusters.append([r])
    entries = []
    for cl in clusters:
        center = 0.5 * (cl[0] + cl[-1])
        radius = WIND_RADIUS + 0.5 * (cl[-1] - cl[0])
        mult = winding_number(f, center, radius)
        if mult <= 0:
            continue
        confident = abs(center) < 1 - 2 * edge_gap
        if mult == len(cl):
            entries.extend(Eigen(r, SQRT2 * (r + 1 / r), 1, confident) for r in cl)
        else:
            c = zero_centroid(f, center, radius).real
            entries.append(Eigen(c, SQRT2 * (c + 1 / c), mult, confident))
    return EigenLedger(_sorted_entries(entries), x)


def _reduced_truncation(V: Potential, D: int) -> np.ndarray:
    """Outside-band-equivalent form of the depth-``D`` truncation.

    Below the support ball every boundary vertex carries two free finite
    subtrees; only their symmetric sector couples back, as a path with
    hopping sqrt(2).  The discarded sectors are free finite trees whose spectra
    lie inside the band.
    """
    d = V.support_depth
    nb = ball_size(d)
    chain = D - d
    n = nb + 2 ** d * chain
    H = np.zeros((n, n))
    child = np.arange(1, nb)
    H[child, (child - 1) // 2] = H[(child - 1) // 2, child] = 1.0
    H[np.diag_indices(nb)] = V.to_array(d)
    for j, leaf in enumerate(range(2 ** d - 1, nb)):
        prev = leaf
        for s in range(chain):
            cur = nb + j * chain + s
            H[cur, prev] = H[prev, cur] = SQRT2
            prev = cur
    return H


def truncation_matrix(V: Potential, D: int) -> np.ndarray:
    """Plain depth-``D`` truncation of ``H_V`` (dense)."""
    n = ball_size(D)
    H = np.zeros((n, n))
    child = np.arange(1, n)
    H[child, (child - 1) // 2] = H[(child - 1) // 2, child] = 1.0
    H[np.diag_indices(n)] = V.to_array(D)
    return H


DENSE_LIMIT = 11


def eigen_oracle(V: Potential, D: int, margin: float = 0.05, method: str = "auto") -> np.ndarray:
    """Eigenvalues of the depth-``D`` truncation with ``|x| > 2 sqrt2 + margin``.

    ``method="dense"`` diagonalizes the full ``2**(D+1) - 1`` matrix;
    ``"reduced"`` diagonalizes the exact symmetry reduction described in
    :func:`_reduced_truncation`; ``"auto"`` picks dense up to depth 11.
    """
    if D < V.support_depth:
        raise ValueError("truncation depth below support depth")
    if method == "auto":
        method = "dense" if D <= DENSE_LIMIT else "reduced"
    if method == "dense":
        H = truncation_matrix(V, D)
    elif method == "reduced":
        H = _reduced_truncation(V, D)
    else:
        raise ValueError(f"unknown method {method!r}")
    ev = linalg.eigvalsh(H)
    return ev[np.abs(ev) > BAND_EDGE + margin]


def ev_sums(ledger: EigenLedger, mode: str = "power", p: float = 1.5, A=(1.0,), q: float = 5.0) -> float:
    """Eigenvalue sums with multiplicity.

    ``power``: sum |x - (+-2 sqrt2)|^p to the nearest band edge;
    ``F_A``:   sum F^A(x_s);
    ``disk``:  sum (1 - |zeta_s|)^q.
    """
    total = 0.0
    for e in ledger.entries:
        if mode == "power":
            term = (abs(e.x) - BAND_EDGE) ** p
        elif mode == "F_A":
            term = F_A_eval(e.x, A)
        elif mode == "disk":
            term = (1.0 - abs(e.zeta)) ** q
        else:
            raise ValueError(f"unknown mode {mode!r}")
        total += e.mult * term
    return float(total)


def subtree_ledgers(V: Potential, max_depth: int | None = None) -> dict[VertexId, EigenLedger]:
    """Ledgers of the tree and of every subtree ``T_x`` (``|x| >= 1``) meeting the support."""
    out = {ROOT: eigen_zeta(V, ROOT)}
    for x in relevant_subtrees(V, max_depth):
        out[x] = eigen_zeta(V, x)
    return out


class LimitStudy(NamedTuple):
    depths: list[int]
    values: list[float]
    differences: list[float]


def ev_bracket(V: Potential, n: int, p: float) -> float:
    """``EV^p_{V(n),T} - sum_k 2^-k sum_{|x|=k} EV^p_{V(n),T_x}``."""
    Vn = truncate(V, n)
    ledgers = subtree_ledgers(Vn)
    total = ev_sums(ledgers[ROOT], "power", p)
    for x, led in ledgers.items():
        if x != ROOT:
            total -= 2.0 ** -x.depth * ev_sums(led, "power", p)
    return float(total)


def ev_limit_study(V: Potential, p: float, N_list) -> LimitStudy:
    """Truncation sequence of the ``EV^{p+1/2}`` bracket and its increments."""
    depths = list(N_list)
    vals = [ev_bracket(V, n, p + 0.5) for n in depths]
    return LimitStudy(depths, vals, list(np.diff(vals)))
