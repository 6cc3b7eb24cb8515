"""Rule-generated infinite kernels and the fixture catalogue.

A rule maps a node to its finite list of weighted out-arcs.  Nodes are ints
(one-dimensional rules) or tuples of ints; labels are their decimal
renderings, e.g. ``"-3"`` or ``"(2,1)"``.

Two rules here are not row-finite (the triangle hub and the non-tight root
have arcs to infinitely many nodes).  Their ``arcs`` take the truncation
radius and only return arcs to nodes of level at most that radius.
"""
from __future__ import annotations

import json
from collections import deque
from pathlib import Path
from typing import Hashable

from ..core import TropicalError

Node = Hashable


def encode(node: Node) -> str:
    if isinstance(node, tuple):
        return "(" + ",".join(str(int(c)) for c in node) + ")"
    return str(int(node))


def decode(label: str) -> Node:
    label = label.strip()
    if label.startswith("("):
        return tuple(int(c) for c in label.strip("()").split(","))
    return int(label)


class KernelRule:
    """Generator of an infinite kernel: basepoint, arcs and a distance/level.

    ``distance`` is the graph distance (arcs counted) from the basepoint for
    row-finite rules.  For the others it is the coordinate level that defines
    truncation balls.
    """

    name = "rule"
    basepoint: Node = 0
    symmetric = False
    row_finite = True
    max_out_degree: int | None = None

    def contains(self, node: Node) -> bool:
        return True

    def arcs(self, node: Node, radius: int | None = None) -> list[tuple[Node, float]]:
        raise NotImplementedError

    def distance(self, node: Node) -> int:
        return _bfs_distance(self, node)

    def encode(self, node: Node) -> str:
        return encode(node)

    def decode(self, label: str) -> Node:
        node = decode(label)
        if not self.contains(node):
            raise TropicalError(f"{label} is not a node of rule {self.name}")
        return node

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"


def _bfs_distance(rule: KernelRule, target: Node, cap: int = 100_000) -> int:
    seen = {rule.basepoint: 0}
    queue = deque([rule.basepoint])
    while queue:
        x = queue.popleft()
        if x == target:
            return seen[x]
        if len(seen) > cap:
            break
        for y, _ in rule.arcs(x):
            if y not in seen:
                seen[y] = seen[x] + 1
                queue.append(y)
    raise TropicalError(f"{target!r} not reachable from the basepoint within {cap} nodes")


class ShiftedRule(KernelRule):
    """``λ⁻¹A``: every arc weight shifted by ``-lam``."""

    def __init__(self, base: KernelRule, lam: float):
        self.base = base
        self.lam = float(lam)
        self.name = f"{base.name}-shift({lam:g})"
        self.basepoint = base.basepoint
        self.symmetric = base.symmetric
        self.row_finite = base.row_finite
        self.max_out_degree = base.max_out_degree

    def contains(self, node):
        return self.base.contains(node)

    def arcs(self, node, radius=None):
        return [(y, w - self.lam) for y, w in self.base.arcs(node, radius)]

    def distance(self, node):
        return self.base.distance(node)


# --------------------------------------------------------------------------
# fixtures


class ZRule(KernelRule):
    name = "z"
    symmetric = True
    max_out_degree = 2

    def __init__(self, weight: float = -1.0):
        self.weight = weight

    def arcs(self, node, radius=None):
        return [(node + 1, self.weight), (node - 1, self.weight)]

    def distance(self, node):
        return abs(node)


class Z2Rule(KernelRule):
    name = "z2"
    basepoint = (0, 0)
    symmetric = True
    max_out_degree = 4

    def arcs(self, node, radius=None):
        i, j = node
        return [((i + 1, j), -1.0), ((i - 1, j), -1.0), ((i, j + 1), -1.0), ((i, j - 1), -1.0)]

    def distance(self, node):
        return abs(node[0]) + abs(node[1])


class ChainRule(KernelRule):
    """``A_{i,i+1} = 0``, ``A_{i,0} = -1`` on the naturals; optional ``A_{00} = 0``."""

    max_out_degree = 3

    def __init__(self, zero_loop: bool = False):
        self.zero_loop = zero_loop
        self.name = "ex2" if zero_loop else "ex1"

    def contains(self, node):
        return isinstance(node, int) and node >= 0

    def arcs(self, node, radius=None):
        out = [(node + 1, 0.0)]
        if node >= 1:
            out.append((0, -1.0))
        elif self.zero_loop:
            out.append((0, 0.0))
        return out

    def distance(self, node):
        return node


def phi(j: int) -> float:
    return 1.0 / j if j >= 2 else 0.0


class TriangleRule(KernelRule):
    """Half-lattice ``i >= j >= 1`` with a hub at ``(1,1)`` linked to every diagonal point."""

    name = "triangle"
    basepoint = (1, 1)
    symmetric = True
    row_finite = False

    def contains(self, node):
        return isinstance(node, tuple) and len(node) == 2 and node[0] >= node[1] >= 1

    def arcs(self, node, radius=None):
        i, j = node
        out = [((i + 1, j), -1.0)]
        if i - 1 >= j:
            out.append(((i - 1, j), -1.0))
            out.append(((i, j + 1), -2.0))
        if j >= 2:
            out.append(((i, j - 1), -2.0))
        if i == j >= 2:
            out.append(((1, 1), -1.0 / i))
        if node == (1, 1):
            if radius is None:
                raise TropicalError("the triangle hub has infinitely many arcs; pass a radius")
            out.extend(((k, k), -1.0 / k) for k in range(2, radius + 1))
        return out

    def distance(self, node):
        return node[0]


class TripodRule(KernelRule):
    """Two rays ``(i,0)``, ``(i,2)`` joined at every level through ``(i,1)``."""

    name = "tripod"
    basepoint = (0, 1)
    symmetric = True
    max_out_degree = 3

    def contains(self, node):
        return isinstance(node, tuple) and len(node) == 2 and node[0] >= 0 and node[1] in (0, 1, 2)

    def arcs(self, node, radius=None):
        i, j = node
        if j == 1:
            return [((i, 0), -1.0), ((i, 2), -1.0)]
        out = [((i + 1, j), -1.0), ((i, 1), -1.0)]
        if i >= 1:
            out.append(((i - 1, j), -1.0))
        return out

    def distance(self, node):
        i, j = node
        if j == 1:
            return 0 if i == 0 else i + 2
        return i + 1


class HedgehogRule(KernelRule):
    """Spines ``(i, ., k)`` over a doubled bottom row ``(., 0, k)``."""

    name = "hedgehog"
    basepoint = (0, 0, 0)
    symmetric = True
    max_out_degree = 5

    def contains(self, node):
        return (
            isinstance(node, tuple) and len(node) == 3 and node[0] >= 0 and node[1] >= 0 and node[2] in (0, 1)
        )

    def arcs(self, node, radius=None):
        i, j, k = node
        out = [((i, j + 1, k), -1.0)]
        if j >= 1:
            out.append(((i, j - 1, k), -1.0))
            out.append(((i, j, 1 - k), -1.0))
        else:
            out.append(((i, 0, 1 - k), -2.0))
            out.append(((i + 1, 0, k), -1.0))
            if i >= 1:
                out.append(((i - 1, 0, k), -1.0))
        return out

    def distance(self, node):
        return node[0] + node[1] + node[2]


class NonTightRule(KernelRule):
    """Path on the naturals with weight -1 plus free jumps ``0 -> i`` for ``i >= 1``."""

    name = "nontight"
    row_finite = False

    def contains(self, node):
        return isinstance(node, int) and node >= 0

    def arcs(self, node, radius=None):
        if node == 0:
            if radius is None:
                raise TropicalError("node 0 has infinitely many arcs; pass a radius")
            return [(j, 0.0) for j in range(1, radius + 1)]
        return [(node + 1, -1.0), (node - 1, -1.0)]

    def distance(self, node):
        return node


class FileRule(KernelRule):
    """Translation-invariant lattice rule read from JSON.

    Schema::

        {"name": "...", "dim": 2, "basepoint": [0, 0], "symmetric": true,
         "offsets": [{"delta": [1, 0], "weight": -1}, ...],
         "bounds": [[0, null], [null, null]]}

    ``bounds`` is an optional per-coordinate ``[lo, hi]`` box (``null`` = open).
    """

    def __init__(self, spec: dict):
        try:
            self.dim = int(spec["dim"])
            self.offsets = [(tuple(int(c) for c in o["delta"]), float(o["weight"])) for o in spec["offsets"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise TropicalError(f"malformed rule file: {exc}") from exc
        if any(len(d) != self.dim for d, _ in self.offsets):
            raise TropicalError("offset dimension mismatch")
        self.name = spec.get("name", "file")
        self.bounds = spec.get("bounds") or [[None, None]] * self.dim
        base = tuple(int(c) for c in spec.get("basepoint", [0] * self.dim))
        self.basepoint = base[0] if self.dim == 1 else base
        self.symmetric = bool(spec.get("symmetric", False))
        self.max_out_degree = len(self.offsets)
        self._dist_cache: dict = {}

    @classmethod
    def load(cls, path) -> "FileRule":
        return cls(json.loads(Path(path).read_text()))

    def _coords(self, node):
        return (node,) if self.dim == 1 else node

    def _node(self, coords):
        return coords[0] if self.dim == 1 else tuple(coords)

    def contains(self, node):
        c = self._coords(node)
        for x, (lo, hi) in zip(c, self.bounds):
            if (lo is not None and x < lo) or (hi is not None and x > hi):
                return False
        return True

    def arcs(self, node, radius=None):
        c = self._coords(node)
        out = []
        for d, w in self.offsets:
            y = self._node(tuple(a + b for a, b in zip(c, d)))
            if self.contains(y):
                out.append((y, w))
        return out


FIXTURE_RULES = {
    "z": ZRule,
    "z2": Z2Rule,
    "ex1": lambda: ChainRule(False),
    "ex2": lambda: ChainRule(True),
    "triangle": TriangleRule,
    "tripod": TripodRule,
    "hedgehog": HedgehogRule,
    "nontight": NonTightRule,
}


def get_rule(name: str) -> KernelRule:
    if name.startswith("file:"):
        return FileRule.load(name[5:])
    try:
        return FIXTURE_RULES[name]()
    except KeyError:
        raise TropicalError(f"unknown rule {name!r}; choose from {sorted(FIXTURE_RULES)} or file:PATH") from None
