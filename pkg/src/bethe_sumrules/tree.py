"""Addressing, potentials and difference operators on the rooted binary tree.

Vertices are written ``(n, k)`` with depth ``n`` and position ``1 <= k <= 2**n``.
The root is ``(0, 1)``.  A depth-``D`` ball is stored in heap order, with
linear index ``2**n - 1 + (k - 1)``, so that the children of linear index ``i``
are ``2*i + 1`` and ``2*i + 2`` and every ball is a prefix of the next one.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, NamedTuple

import numpy as np


@dataclass(frozen=True, order=True)
class VertexId:
    depth: int
    index: int

    def __post_init__(self):
        if self.depth < 0 or not 1 <= self.index <= 2 ** self.depth:
            raise ValueError(f"malformed vertex ({self.depth}, {self.index})")

    def __repr__(self):
        return f"({self.depth},{self.index})"

    @property
    def linear(self) -> int:
        return 2 ** self.depth - 1 + (self.index - 1)

    @classmethod
    def from_linear(cls, i: int) -> "VertexId":
        if i < 0:
            raise ValueError(f"negative linear index {i}")
        n = (i + 1).bit_length() - 1
        return cls(n, i - (2 ** n - 1) + 1)

    @property
    def parent(self) -> "VertexId | None":
        if self.depth == 0:
            return None
        return VertexId(self.depth - 1, (self.index + 1) // 2)

    @property
    def children(self) -> tuple["VertexId", "VertexId"]:
        n, k = self.depth + 1, self.index
        return VertexId(n, 2 * k - 1), VertexId(n, 2 * k)

    def compose(self, other: "VertexId") -> "VertexId":
        """Address of ``other`` (given in root coordinates of ``T_self``) in ``T``."""
        d = other.depth
        return VertexId(self.depth + d, (self.index - 1) * 2 ** d + other.index)

    def is_ancestor_of(self, other: "VertexId") -> bool:
        """True when ``other`` lies in the subtree rooted here (inclusive)."""
        d = other.depth - self.depth
        return d >= 0 and (other.index - 1) >> d == self.index - 1

    def relative(self, other: "VertexId") -> "VertexId":
        """Coordinates of descendant ``other`` inside ``T_self``."""
        if not self.is_ancestor_of(other):
            raise ValueError(f"{other!r} is not in the subtree of {self!r}")
        d = other.depth - self.depth
        return VertexId(d, other.index - (self.index - 1) * 2 ** d)

    def path(self) -> list["VertexId"]:
        """Vertices from the root down to this vertex."""
        out = [self]
        while out[-1].depth:
            out.append(out[-1].parent)
        return out[::-1]


ROOT = VertexId(0, 1)


class Neighbors(NamedTuple):
    parent: VertexId | None
    children: tuple[VertexId, VertexId]


def navigate(v: VertexId) -> Neighbors:
    return Neighbors(v.parent, v.children)


def ball_size(depth: int) -> int:
    return 2 ** (depth + 1) - 1


def ball_enumerate(depth: int) -> tuple[list[VertexId], dict[VertexId, int]]:
    """All vertices with ``|x| <= depth`` in linear order, plus the inverse map."""
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    verts = [VertexId(n, k) for n in range(depth + 1) for k in range(1, 2 ** n + 1)]
    return verts, {v: i for i, v in enumerate(verts)}


def sphere(n: int) -> Iterator[VertexId]:
    for k in range(1, 2 ** n + 1):
        yield VertexId(n, k)


class FrontierSet(NamedTuple):
    path: list[VertexId]
    frontier: list[VertexId]


def frontier_set(y: VertexId) -> FrontierSet:
    """Off-path neighbours of the root-to-``y`` path.

    Their subtrees are pairwise disjoint and, together with the path, cover
    the whole tree.  The path vertices themselves are excluded.
    """
    path = y.path()
    on_path = set(path)
    frontier = []
    for w in path:
        for c in w.children:
            if c not in on_path:
                frontier.append(c)
    return FrontierSet(path, frontier)


@dataclass(frozen=True)
class Potential:
    """Finitely supported real potential; unkeyed vertices read as zero.

    Exact zeros are dropped on construction, so two potentials with the same
    nonzero values compare equal regardless of how they were built.
    """

    values: Mapping[VertexId, float] = field(default_factory=dict)
    support_depth: int | None = None

    def __post_init__(self):
        vals = {v: float(x) for v, x in dict(self.values).items() if x != 0.0}
        deepest = max((v.depth for v in vals), default=0)
        sd = deepest if self.support_depth is None else int(self.support_depth)
        if sd < deepest:
            raise ValueError(f"key at depth {deepest} exceeds support_depth {sd}")
        object.__setattr__(self, "values", MappingProxyType(vals))
        object.__setattr__(self, "support_depth", sd)

    def __getitem__(self, v: VertexId) -> float:
        return self.values.get(v, 0.0)

    def __len__(self):
        return len(self.values)

    def __eq__(self, other):
        if not isinstance(other, Potential):
            return NotImplemented
        return dict(self.values) == dict(other.values)

    def __hash__(self):
        return hash(frozenset(self.values.items()))

    @property
    def support(self) -> list[VertexId]:
        return sorted(self.values)

    def is_zero(self) -> bool:
        return not self.values

    def to_array(self, depth: int | None = None) -> np.ndarray:
        """Dense values on the depth-``depth`` ball in linear order."""
        depth = self.support_depth if depth is None else depth
        if depth < self.support_depth and any(v.depth > depth for v in self.values):
            raise ValueError("ball does not contain the support")
        out = np.zeros(ball_size(depth))
        for v, x in self.values.items():
            out[v.linear] = x
        return out

    @classmethod
    def from_array(cls, arr: Iterable[float]) -> "Potential":
        arr = np.asarray(arr, dtype=float)
        depth = (len(arr) + 1).bit_length() - 2
        if ball_size(depth) != len(arr):
            raise ValueError(f"length {len(arr)} is not a ball size 2**(D+1)-1")
        vals = {VertexId.from_linear(i): x for i, x in enumerate(arr)}
        return cls(vals, support_depth=depth)

    @classmethod
    def radial(cls, profile: Iterable[float]) -> "Potential":
        prof = list(profile)
        vals = {v: x for n, x in enumerate(prof) for v in sphere(n)}
        return cls(vals, support_depth=max(len(prof) - 1, 0))

    def shell(self, n: int) -> np.ndarray:
        """Values on the sphere ``|x| = n`` in index order."""
        lo = 2 ** n - 1
        out = np.zeros(2 ** n)
        for v, x in self.values.items():
            if v.depth == n:
                out[v.linear - lo] = x
        return out


def subtree_view(V: Potential, x: VertexId) -> Potential:
    """Restriction of ``V`` to ``T_x``, relabelled to root coordinates."""
    vals = {x.relative(v): val for v, val in V.values.items() if x.is_ancestor_of(v)}
    return Potential(vals, support_depth=max(V.support_depth - x.depth, 0))


def truncate(V: Potential, n: int) -> Potential:
    if n < 0:
        raise ValueError("truncation depth must be nonnegative")
    vals = {v: val for v, val in V.values.items() if v.depth <= n}
    return Potential(vals, support_depth=min(n, V.support_depth))


def difference_op(V: Potential, kind: str = "delta") -> Potential:
    """Binary difference operators.

    ``delta``:       (dV)(n, j) = V(n-1, ceil(j/2)) - V(n, j),        n >= 1
    ``delta_tilde``: (dV)(n, j) = V(n, j) - (V(n+1, 2j-1) + V(n+1, 2j))/2
    """
    if kind == "delta":
        touched = set()
        for v in V.values:
            if v.depth >= 1:
                touched.add(v)
            touched.update(v.children)
        vals = {v: V[v.parent] - V[v] for v in touched}
        return Potential(vals, support_depth=V.support_depth + 1)
    if kind == "delta_tilde":
        touched = set(V.values)
        touched.update(v.parent for v in V.values if v.depth >= 1)
        vals = {}
        for v in touched:
            c1, c2 = v.children
            vals[v] = V[v] - 0.5 * (V[c1] + V[c2])
        return Potential(vals, support_depth=V.support_depth)
    raise ValueError(f"unknown difference kind {kind!r}")


class HypothesisSums(NamedTuple):
    power_sum: float
    delta_sum: float
    delta_start: int


def shell_weighted_sum(V: Potential, fn, start: int, stop: int) -> float:
    """sum_{n=start}^{stop} 2^-n sum_{|x|=n} fn(V(x)), zero values skipped."""
    per_shell: dict[int, list[float]] = {}
    for v, x in V.values.items():
        if start <= v.depth <= stop:
            per_shell.setdefault(v.depth, []).append(fn(x))
    return float(sum(np.ldexp(np.sum(sorted(t)), -n) for n, t in sorted(per_shell.items())))


def hypothesis_sums(V: Potential, p: int, D: int, delta_start: int = 2) -> HypothesisSums:
    """Weighted shell sums of ``V**(2p)`` and ``(delta V)**2`` up to depth ``D``."""
    if p < 1:
        raise ValueError("p must be a positive integer")
    power = shell_weighted_sum(V, lambda x: x ** (2 * p), 1, D)
    dV = difference_op(V, "delta")
    delta = shell_weighted_sum(dV, lambda x: x * x, delta_start, D)
    return HypothesisSums(power, delta, delta_start)


def random_potential(seed: int, depth: int, amplitude: float = 1.0,
                     decay: float = 0.0) -> Potential:
    """Uniform values on ``[-amplitude, amplitude]`` over the depth-``depth`` ball.

    ``decay`` multiplies shell ``n`` by ``(n + 1) ** -decay``.  Values are drawn
    from ``numpy.random.default_rng(seed)`` in linear vertex order.
    """
    rng = np.random.default_rng(seed)
    arr = rng.uniform(-amplitude, amplitude, ball_size(depth))
    if decay:
        depths = np.floor(np.log2(np.arange(1, len(arr) + 1))).astype(int)
        arr = arr * (depths + 1.0) ** (-decay)
    return Potential.from_array(arr)
