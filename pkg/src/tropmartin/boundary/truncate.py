"""Finite ball truncations of rule kernels and longest-path queries on them."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import NegativeCycleError, shortest_path

from ..core import FLOAT_TOL, ZERO, TropicalError, TropicalMatrix
from ..martin import DivergentStar
from .rules import KernelRule, Node

NODE_CAP = 200_000


class BallTooLarge(TropicalError):
    pass


@dataclass(frozen=True, eq=False)
class BallTruncation:
    """Nodes within ``radius`` of the basepoint with the arcs between them.

    For row-finite rules the radius is the graph distance; for the others it
    is the rule's level function.  Nodes are in BFS order with a
    coordinate-lexicographic tie-break inside each layer.
    """

    rule: KernelRule
    radius: int
    nodes: tuple
    index: dict = field(repr=False)
    dist: np.ndarray = field(repr=False)
    weights: sp.csr_matrix = field(repr=False)
    inner_radius: int = 0

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.rule.encode(x) for x in self.nodes)

    @property
    def matrix(self) -> TropicalMatrix:
        return TropicalMatrix(self.labels, _csr=self.weights.copy())

    @property
    def is_integral(self) -> bool:
        d = self.weights.data
        return bool(np.all(d == np.round(d)))

    def default_tol(self) -> float:
        return 0.0 if self.is_integral else FLOAT_TOL

    def within(self, r: int) -> list:
        return [x for x, d in zip(self.nodes, self.dist) if d <= r]


def truncate(rule: KernelRule, radius: int, node_cap: int = NODE_CAP) -> BallTruncation:
    if radius < 1:
        raise TropicalError("radius must be >= 1")
    return _truncate(rule, int(radius), int(node_cap))


@lru_cache(maxsize=64)
def _truncate(rule: KernelRule, radius: int, node_cap: int) -> BallTruncation:
    b = rule.basepoint
    level = {b: 0}
    layers = [[b]]
    frontier = [b]
    use_level = not rule.row_finite
    while frontier:
        nxt = set()
        for x in frontier:
            for y, _ in rule.arcs(x, radius):
                if y in level or y in nxt:
                    continue
                if use_level and rule.distance(y) > radius:
                    continue
                if not use_level and len(layers) > radius:
                    continue
                nxt.add(y)
        if not nxt:
            break
        layer = sorted(nxt)
        for y in layer:
            level[y] = len(layers)
        layers.append(layer)
        frontier = layer
        if len(level) > node_cap:
            raise BallTooLarge(f"ball of radius {radius} exceeds {node_cap} nodes")

    nodes = tuple(x for layer in layers for x in layer)
    index = {x: i for i, x in enumerate(nodes)}
    rows, cols, data = [], [], []
    for i, x in enumerate(nodes):
        for y, w in rule.arcs(x, radius):
            j = index.get(y)
            if j is None:
                continue
            rows.append(i)
            cols.append(j)
            data.append(float(w))
    n = len(nodes)
    # later duplicates win, matching TropicalMatrix.from_arcs
    entries = dict(zip(zip(rows, cols), data))
    if entries:
        (r, c), d = zip(*entries.keys()), list(entries.values())
    else:
        r, c, d = (), (), ()
    W = sp.csr_matrix((np.asarray(d, float), (np.asarray(r, int), np.asarray(c, int))), shape=(n, n))
    if use_level:
        dist = np.array([rule.distance(x) for x in nodes])
    else:
        dist = np.array([level[x] for x in nodes])
    return BallTruncation(rule, radius, nodes, index, dist, W)


def _graph(trunc: BallTruncation, reverse: bool) -> tuple[sp.csr_matrix, bool]:
    """Negated weights without self-loops; flag says all costs are >= 0."""
    W = trunc.weights.tocoo()
    loop = W.row == W.col
    if (W.data[loop] > 0).any():
        i = int(W.row[loop][np.argmax(W.data[loop])])
        raise DivergentStar((trunc.nodes[i], trunc.nodes[i]))
    keep = ~loop
    r, c, d = W.row[keep], W.col[keep], -W.data[keep]
    if reverse:
        r, c = c, r
    G = sp.csr_matrix((d, (r, c)), shape=W.shape)
    return G, bool(np.all(d >= 0))


def star_rows(trunc: BallTruncation, sources: Sequence[Node], reverse: bool = False) -> np.ndarray:
    """``A*_{s,.}`` for each source (``A*_{.,s}`` with ``reverse``), on the truncation."""
    idx = [trunc.index[s] for s in sources]
    if not idx:
        return np.empty((0, trunc.n))
    G, nonneg = _graph(trunc, reverse)
    try:
        D = shortest_path(G, method="D" if nonneg else "J", directed=True, indices=idx)
    except NegativeCycleError as exc:
        raise DivergentStar(("truncation", trunc.radius)) from exc
    out = -np.atleast_2d(D)
    out[np.isneginf(out)] = ZERO
    return out + 0.0  # normalise -0.0


def plus_from(trunc: BallTruncation, node: Node, star_col: np.ndarray) -> float:
    """``A+_{node,t}`` from the column ``A*_{.,t}``: best first arc then any path."""
    best = ZERO
    for y, w in trunc.rule.arcs(node, trunc.radius):
        j = trunc.index.get(y)
        if j is not None:
            best = max(best, w + star_col[j])
    return float(best)
