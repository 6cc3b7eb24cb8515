"""Busemann points of polyhedral and Euclidean norms.

A polyhedral norm is ``||x|| = max_i x'_i . x`` over the extreme points of
its dual ball.  Its Busemann points are indexed by a proper face ``J`` of
the dual ball and an offset ``X``:

    w(x) = min_{j in J} x'_j . (x - X) + max_{j in J} x'_j . X
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull

from .core import TropicalError

FACE_TOL = 1e-12


class DegenerateDual(TropicalError):
    pass


class ConfirmationFailed(TropicalError):
    def __init__(self, gap):
        self.gap = gap
        super().__init__(f"closed form and ray evaluation differ by {gap}")


class NotAFace(TropicalError):
    pass


@dataclass(frozen=True, eq=False)
class PolyhedralNorm:
    dual_extremes: np.ndarray
    name: str = "poly"

    def __post_init__(self):
        D = np.atleast_2d(np.asarray(self.dual_extremes, dtype=float))
        object.__setattr__(self, "dual_extremes", D)
        D.setflags(write=False)
        self._validate()

    @property
    def dim(self) -> int:
        return self.dual_extremes.shape[1]

    def __call__(self, x) -> np.ndarray | float:
        x = np.asarray(x, dtype=float)
        out = (x @ self.dual_extremes.T).max(axis=-1)
        return float(out) if out.ndim == 0 else out

    def _validate(self):
        D = self.dual_extremes
        m, n = D.shape
        if len({tuple(np.round(r, 12)) for r in D}) < m:
            raise DegenerateDual("duplicate dual extreme points")
        for r in D:
            if not np.isclose(D, -r, atol=1e-12).all(axis=1).any():
                raise DegenerateDual(f"{r} has no antipode: the norm would not be symmetric")
        for axis in range(n):
            e = np.zeros(n)
            e[axis] = 1.0
            if self(e) <= 0 or self(-e) <= 0:
                raise DegenerateDual(f"||e_{axis}|| = 0: zero is not interior to the dual ball")
        if n in (2, 3) and m > n:
            hull = ConvexHull(D)
            if len(hull.vertices) < m:
                raise DegenerateDual("some listed points are convex combinations of the others")
        elif n == 1 and m != 2:
            raise DegenerateDual("a norm on the line has exactly two dual extremes")

    @classmethod
    def linf(cls, dim: int = 2) -> "PolyhedralNorm":
        return cls(np.vstack([np.eye(dim), -np.eye(dim)]), name="linf")

    @classmethod
    def l1(cls, dim: int = 2) -> "PolyhedralNorm":
        return cls(np.array(list(itertools.product((1.0, -1.0), repeat=dim))), name="l1")

    @classmethod
    def load(cls, path) -> "PolyhedralNorm":
        data = json.loads(Path(path).read_text())
        pts = data["dual_extremes"] if isinstance(data, dict) else data
        return cls(np.array(pts, dtype=float), name=Path(path).stem)


@dataclass(frozen=True, eq=False)
class EuclideanNorm:
    dim: int = 2
    name: str = "l2"

    def __call__(self, x):
        out = np.linalg.norm(np.asarray(x, dtype=float), axis=-1)
        return float(out) if out.ndim == 0 else out


Norm = PolyhedralNorm | EuclideanNorm


def norm_eval(N: Norm, x) -> float:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != N.dim:
        raise TropicalError(f"point of dimension {x.shape[-1]} for a norm on R^{N.dim}")
    return N(x)


def face_from_direction(N: PolyhedralNorm, y) -> tuple[int, ...]:
    y = np.asarray(y, dtype=float)
    if not np.any(y):
        raise TropicalError("direction must be non-zero")
    dots = N.dual_extremes @ y
    top = dots.max()
    return tuple(int(i) for i in np.nonzero(dots >= top - FACE_TOL * max(1.0, abs(top)))[0])


def is_proper_face(N: PolyhedralNorm, J) -> bool:
    """Some ``y`` exposes exactly ``J``: ``x'_j . y`` tied on ``J`` and strictly larger than elsewhere."""
    J = sorted(set(J))
    D = N.dual_extremes
    rest = [i for i in range(len(D)) if i not in J]
    if not J or not rest:
        return False
    n = N.dim
    j0 = J[0]
    # variables (y, s); maximise s subject to x'_i.y + s <= x'_j0.y, ties on J
    A_ub = np.array([np.append(D[i] - D[j0], 1.0) for i in rest])
    A_eq = np.array([np.append(D[j] - D[j0], 0.0) for j in J[1:]]) if len(J) > 1 else None
    res = linprog(
        c=np.append(np.zeros(n), -1.0),
        A_ub=A_ub,
        b_ub=np.zeros(len(rest)),
        A_eq=A_eq,
        b_eq=np.zeros(len(J) - 1) if A_eq is not None else None,
        bounds=[(-1, 1)] * n + [(None, 1)],
    )
    return bool(res.status == 0 and -res.fun > 1e-9)


@dataclass(frozen=True)
class FaceList:
    faces: tuple[tuple[int, ...], ...]
    exact: bool

    def __len__(self):
        return len(self.faces)

    def __iter__(self):
        return iter(self.faces)


def enumerate_faces(N: PolyhedralNorm, samples: int = 20_000, seed: int = 0) -> FaceList:
    """All proper faces of the dual ball as index tuples.

    Exact in dimensions up to 3; above that, faces exposed by random
    directions are collected and the result is flagged approximate.
    """
    D = N.dual_extremes
    m, n = D.shape
    if n == 1:
        return FaceList(tuple((i,) for i in range(m)), True)
    if n == 2:
        order = np.argsort(np.arctan2(D[:, 1], D[:, 0]))
        verts = [(int(i),) for i in order]
        edges = [tuple(sorted((int(order[k]), int(order[(k + 1) % m])))) for k in range(m)]
        return FaceList(tuple(sorted(verts) + sorted(edges)), True)
    if n == 3:
        hull = ConvexHull(D)
        planes: dict[tuple, set] = {}
        for simplex, eq in zip(hull.simplices, hull.equations):
            key = tuple(np.round(eq, 9))
            planes.setdefault(key, set()).update(int(v) for v in simplex)
        facets = sorted({tuple(sorted(f)) for f in planes.values()})
        edges = set()
        for a, b in itertools.combinations(facets, 2):
            common = tuple(sorted(set(a) & set(b)))
            if len(common) == 2:
                edges.add(common)
        verts = [(i,) for i in range(m)]
        return FaceList(tuple(verts + sorted(edges) + facets), True)
    # generic directions only expose vertices, so add the {-1,0,1} lattice directions,
    # which expose the lower-dimensional faces of axis-aligned balls
    rng = np.random.default_rng(seed)
    dirs = [rng.standard_normal((samples, n))]
    if n <= 8:
        lattice = np.array(list(itertools.product((-1.0, 0.0, 1.0), repeat=n)))
        dirs.append(lattice[np.any(lattice != 0, axis=1)])
    found = {face_from_direction(N, y) for y in np.vstack(dirs)}
    found = {f for f in found if len(f) < m}
    return FaceList(tuple(sorted(found, key=lambda f: (len(f), f))), False)


@dataclass(frozen=True, eq=False)
class BusemannPoint:
    """Busemann function of a norm, re-centred so that ``w(0) = 0``.

    Polyhedral case: ``face`` and ``offset``.  Euclidean case: a unit
    ``direction`` with ``w(x) = x . y``.
    """

    norm: Norm
    face: tuple[int, ...] = ()
    offset: np.ndarray = field(default_factory=lambda: np.zeros(0))
    direction: np.ndarray | None = None
    _shift: float = 0.0

    def __post_init__(self):
        if isinstance(self.norm, EuclideanNorm):
            if self.direction is None:
                raise TropicalError("a Euclidean Busemann point needs a direction")
            y = np.asarray(self.direction, dtype=float)
            object.__setattr__(self, "direction", y / np.linalg.norm(y))
            return
        if not self.face:
            raise TropicalError("face must be non-empty")
        if not is_proper_face(self.norm, self.face):
            raise NotAFace(f"{self.face} is not the extreme-point set of a proper face")
        X = np.zeros(self.norm.dim) if len(self.offset) == 0 else np.asarray(self.offset, dtype=float)
        object.__setattr__(self, "offset", X)
        # the closed form already vanishes at 0; re-centre anyway to absorb rounding
        object.__setattr__(self, "_shift", float(self(np.zeros(self.norm.dim))))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.direction is not None:
            out = x @ self.direction
        else:
            Dj = self.norm.dual_extremes[list(self.face)]
            out = ((x - self.offset) @ Dj.T).min(axis=-1) + (Dj @ self.offset).max() - self._shift
        return float(out) if np.ndim(out) == 0 else out


def busemann_eval(b: BusemannPoint, x) -> float:
    return b(x)


def ray_limit(N: Norm, X, y, samples, t_max: float | None = None, tol: float = 1e-6) -> BusemannPoint:
    """Closed-form limit of ``x -> ||X + t y|| - ||X + t y - x||``, confirmed numerically.

    Polyhedral rays reach the limit exactly once ``t`` is large; the Euclidean
    gap decays like ``|x|^2 / 2t``, so there ``t`` defaults to a value making
    that bias a tenth of ``tol``.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if not np.any(y):
        raise TropicalError("direction must be non-zero")
    S = np.atleast_2d(np.asarray(samples, dtype=float))
    if isinstance(N, EuclideanNorm):
        b = BusemannPoint(N, direction=y)
        R = float(np.abs(S - X).max(initial=1.0)) * np.sqrt(N.dim)
        t = t_max or max(1e6, 10 * R * R / tol)
        P = X + t * y
        # ||P|| - ||P - x|| without cancellation
        numeric = (2 * S @ P - (S * S).sum(axis=1)) / (N(P) + N(P - S))
    else:
        b = BusemannPoint(N, face_from_direction(N, y), X)
        P = X + (t_max or 1e6) * y
        numeric = N(P) - N(P - S)
    gap = float(np.abs(numeric - b(S)).max())
    if gap > tol:
        raise ConfirmationFailed(gap)
    return b


def nonexpansive_gap(b: BusemannPoint, pairs_x, pairs_z) -> float:
    """Largest ``|w(x) - w(z)| - ||x - z||`` over the pairs (<= 0 when 1-Lipschitz)."""
    return float((np.abs(b(pairs_x) - b(pairs_z)) - b.norm(pairs_x - pairs_z)).max())


def harmonicity_residual(b: BusemannPoint, grid_points, xs) -> float:
    """``max_x |sup_y (w(y) - ||y - x||) - w(x)|`` with y over the grid."""
    wy = b(grid_points)
    worst = 0.0
    for x in np.atleast_2d(xs):
        best = (wy - b.norm(grid_points - x)).max()
        worst = max(worst, abs(best - b(x)))
    return float(worst)
