"""Hopf-Lax / Lax-Oleinik semigroup on regular grids and its eigenvectors.

``(T^t u)(x) = sup_y  -t L((y - x)/t) + u(y)`` for convex ``L``.  For
``L = ||.||^p / p`` an eigenvector ``T^t u = u + lam t`` is a supremum of
``c + theta w`` over Busemann points ``w`` with ``theta = (q lam)^(1/q)``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .busemann import BusemannPoint, EuclideanNorm, Norm, PolyhedralNorm
from .core import TropicalError


class MarginTooSmall(TropicalError):
    pass


class EmptySupport(TropicalError):
    pass


def conjugate_exponent(p: float) -> float:
    if p <= 1:
        raise TropicalError("p must be > 1")
    return p / (p - 1)


def theta(lam: float, p: float) -> float:
    """Eigen-scaling ``(q lam)^(1/q)`` with ``1/p + 1/q = 1``."""
    if lam <= 0:
        raise TropicalError("lambda must be > 0")
    q = conjugate_exponent(p)
    return (q * lam) ** (1 / q)


# --------------------------------------------------------------------------
# Lagrangians


def _abs_norm(dim: int) -> Norm:
    return PolyhedralNorm.linf(1) if dim == 1 else EuclideanNorm(dim)


@dataclass(frozen=True, eq=False)
class LagrangianSpec:
    """``pnorm``: ``||v||^p / p``; ``norm``: ``||v||``; ``custom``: a convex callable.

    ``norm`` defaults to the absolute value in 1-D and the Euclidean norm
    otherwise.  Custom Lagrangians must be attested convex since the convex
    hull of ``L`` is never computed.
    """

    kind: str
    dim: int = 1
    p: float = 2.0
    norm: Norm | None = None
    func: Callable | None = field(default=None, repr=False)
    convex: bool = False

    def __post_init__(self):
        if self.kind not in ("pnorm", "norm", "custom"):
            raise TropicalError(f"unknown Lagrangian kind {self.kind!r}")
        if self.kind == "pnorm" and self.p <= 1:
            raise TropicalError("p-norm Lagrangians need p > 1")
        if self.kind == "custom" and (self.func is None or not self.convex):
            raise TropicalError("custom Lagrangians need func and convex=True")
        if self.norm is None:
            object.__setattr__(self, "norm", _abs_norm(self.dim))
        if self.norm.dim != self.dim:
            raise TropicalError("norm dimension does not match the Lagrangian")
        if not np.isfinite(self.L0):
            raise TropicalError("L(0) must be finite")

    @classmethod
    def pnorm(cls, p: float, dim: int = 1, norm: Norm | None = None) -> "LagrangianSpec":
        return cls("pnorm", dim=dim, p=p, norm=norm)

    @classmethod
    def normed(cls, dim: int = 1, norm: Norm | None = None) -> "LagrangianSpec":
        return cls("norm", dim=dim, norm=norm)

    def __call__(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if self.kind == "custom":
            flat = v.reshape(-1, self.dim)
            return np.array([self.func(x) for x in flat]).reshape(v.shape[:-1])
        r = np.asarray(self.norm(v))
        return r**self.p / self.p if self.kind == "pnorm" else r

    @property
    def L0(self) -> float:
        return float(self(np.zeros(self.dim)))


def zeta(L: LagrangianSpec, x, depth: int = 40) -> float:
    """One-sided derivative of ``L`` at 0 in direction x (may be ``-inf``)."""
    x = np.asarray(x, dtype=float)
    if not np.any(x):
        return 0.0
    if L.kind == "pnorm":
        return 0.0
    if L.kind == "norm":
        return float(L.norm(x))
    # convexity makes the difference quotient nonincreasing as t -> 0+
    ts = 2.0 ** -np.arange(depth + 1)
    qs = np.array([(L(t * x) - L.L0) / t for t in ts])
    if qs[-1] - qs[-2] < -1.0:
        return float("-inf")
    return float(qs.min())


# --------------------------------------------------------------------------
# grids


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Values on the regular grid ``origin + h * index``; invalid cells are masked."""

    origin: np.ndarray
    h: float
    values: np.ndarray
    valid: np.ndarray

    @property
    def dim(self) -> int:
        return self.values.ndim

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape

    def points(self) -> np.ndarray:
        axes = [self.origin[d] + self.h * np.arange(n) for d, n in enumerate(self.shape)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack(mesh, axis=-1)

    @classmethod
    def from_function(cls, f: Callable, h: float, extent: float, dim: int = 1) -> "GridFunction":
        """Sample f on ``[-extent, extent]^dim``; f takes an ``(..., dim)`` array."""
        n = int(round(2 * extent / h)) + 1
        origin = np.full(dim, -(n - 1) * h / 2)
        g = cls(origin, h, np.zeros((n,) * dim), np.ones((n,) * dim, bool))
        vals = np.asarray(f(g.points()), dtype=float).reshape(g.shape)
        return cls(origin, h, vals, np.ones_like(vals, bool))

    def lipschitz(self) -> float:
        """Sum over axes of the largest finite-difference slope (bounds every l^p dual norm)."""
        total = 0.0
        for ax in range(self.dim):
            d = np.abs(np.diff(np.where(self.valid, self.values, np.nan), axis=ax)) / self.h
            if np.isfinite(d).any():
                total += float(np.nanmax(d))
        return total

    def restrict(self, mask) -> np.ndarray:
        return self.values[self.valid & mask]


def _offsets(r: int, dim: int):
    return itertools.product(range(-r, r + 1), repeat=dim)


def hopf_lax_apply(L: LagrangianSpec, t: float, u: GridFunction, search_radius: float | None = None) -> GridFunction:
    """Grid Hopf-Lax step: max over grid offsets within ``search_radius`` (l-infinity box).

    Cells whose search box leaves the grid are marked invalid.
    """
    if t <= 0:
        raise TropicalError("t must be > 0")
    if u.dim != L.dim:
        raise TropicalError("grid and Lagrangian dimensions differ")
    if search_radius is None:
        search_radius = default_search_radius(L, t, u.lipschitz())
    r = int(math.ceil(search_radius / u.h - 1e-12))
    if any(2 * r + 1 > n for n in u.shape):
        raise MarginTooSmall(f"search radius {search_radius} needs {r} cells of margin; grid is {u.shape}")
    core = tuple(slice(r, n - r) for n in u.shape)
    V = np.where(u.valid, u.values, -np.inf)
    best = np.full(tuple(n - 2 * r for n in u.shape), -np.inf)
    ok = np.ones_like(best, bool)
    for off in _offsets(r, u.dim):
        o = np.asarray(off, float) * u.h
        cost = -t * float(L(o / t))
        sl = tuple(slice(r + k, n - r + k) for k, n in zip(off, u.shape))
        np.maximum(best, cost + V[sl], out=best)
        ok &= u.valid[sl]
    values = np.full(u.shape, -np.inf)
    valid = np.zeros(u.shape, bool)
    values[core] = best
    valid[core] = ok
    if not valid.any():
        raise MarginTooSmall("no cell has a full search box")
    return GridFunction(u.origin, u.h, values, valid)


def default_search_radius(L: LagrangianSpec, t: float, lip: float) -> float:
    """Four times the optimiser magnitude ``lip^(q-1) t`` (p-norm case) or ``4 t`` otherwise."""
    if L.kind == "pnorm":
        q = conjugate_exponent(L.p)
        return 4 * max(lip, 1e-12) ** (q - 1) * t
    return 4 * t


def grid_error_bound(L: LagrangianSpec, t: float, h: float, lip: float, search_radius: float) -> float:
    """``h (Lip(u) + slope of v -> t L(v/t) on the search ball)``."""
    if L.kind == "pnorm":
        slope = (search_radius / t) ** (L.p - 1)
    elif L.kind == "norm":
        slope = 1.0
    else:
        v = np.zeros(L.dim)
        v[0] = search_radius / t
        slope = abs(float(L(v)) - L.L0) * t / search_radius
    return h * (lip + slope)


# --------------------------------------------------------------------------
# eigenvectors


def eigenvector_from_measure(points: Sequence[tuple[BusemannPoint, float]], lam: float, p: float) -> Callable:
    """``x -> max_k (c_k + theta w_k(x))`` over (point, density) pairs."""
    if not points:
        raise EmptySupport("no Busemann points given")
    if any(np.isposinf(c) for _, c in points):
        raise TropicalError("densities must be bounded above")
    th = theta(lam, p)

    def u(x):
        x = np.asarray(x, dtype=float)
        return np.max([c + th * np.asarray(w(x)) for w, c in points], axis=0)

    u.theta = th
    return u


@dataclass(frozen=True)
class EigenReport:
    residual: float
    bound: float
    tol: float
    valid_cells: int
    h: float
    search_radius: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tol + self.bound


def eigen_check(
    u: Callable,
    L: LagrangianSpec,
    lam: float,
    s: float,
    h: float,
    window: float,
    tol: float = 0.0,
    search_radius: float | None = None,
) -> EigenReport:
    """``max |T^s u - u - lam s|`` over the window, against the grid-error bound.

    The grid covers the window plus the search radius.  For p-norm
    Lagrangians the radius defaults to ``4 theta^(q-1) s``.
    """
    if s <= 0:
        raise TropicalError("s must be > 0")
    if search_radius is None:
        if L.kind == "pnorm" and lam > 0:
            q = conjugate_exponent(L.p)
            search_radius = 4 * theta(lam, L.p) ** (q - 1) * s
        else:
            search_radius = 4 * s
    cells = int(math.ceil(search_radius / h))
    extent = window + (cells + 1) * h
    g = GridFunction.from_function(u, h, extent, L.dim)
    Tu = hopf_lax_apply(L, s, g, search_radius)
    inside = np.all(np.abs(g.points()) <= window + 1e-9, axis=-1)
    mask = Tu.valid & inside
    if not mask.any():
        raise MarginTooSmall("window has no valid cells")
    resid = np.abs(Tu.values - g.values - lam * s)[mask]
    lip = g.lipschitz()
    bound = grid_error_bound(L, s, h, lip, search_radius)
    return EigenReport(float(resid.max()), float(bound), tol, int(mask.sum()), h, float(search_radius))


@dataclass(frozen=True)
class CharacterizationReport:
    ok: bool
    worst: float
    witness: tuple | None


def eigen_characterization_check(
    u: Callable, L: LagrangianSpec, h: float, extent: float, tol: float = 1e-9
) -> CharacterizationReport:
    """Check ``-zeta(y - x) + u(y) <= u(x)`` on all pairs of grid points."""
    g = GridFunction.from_function(u, h, extent, L.dim)
    P = g.points().reshape(-1, L.dim)
    U = g.values.reshape(-1)
    worst, witness = -np.inf, None
    for a in range(len(P)):
        diff = P - P[a]
        if L.kind == "pnorm":
            z = np.zeros(len(P))
        elif L.kind == "norm":
            z = np.asarray(L.norm(diff), float)
        else:
            z = np.array([zeta(L, d) for d in diff])
        excess = U - z - U[a]
        b = int(np.argmax(excess))
        if excess[b] > worst:
            worst, witness = float(excess[b]), (tuple(P[a]), tuple(P[b]))
    return CharacterizationReport(worst <= tol, worst, witness if worst > tol else None)


@dataclass(frozen=True)
class AsymptoticsRow:
    displacement: float
    value: float
    predicted: float
    deviation: float
    continuous: float
    k_best: int


def lax_star_asymptotics_check(p: float, s: float, lam: float, displacements: Sequence[float]) -> list[AsymptoticsRow]:
    """``(A_s)+_{xy} = sup_k -k s L(D/(k s)) - k s lam`` against ``-theta D``, for ``L = |.|^p/p``.

    The map ``t -> -t L(D/t) - t lam`` is concave with maximiser
    ``D (q lam)^(-1/p)``, so ``k`` up to ``ceil(t_bar/s) + 2`` suffices.
    """
    if p <= 1 or lam <= 0:
        raise TropicalError("need p > 1 and lambda > 0")
    q = conjugate_exponent(p)
    th = theta(lam, p)
    rows = []
    for D in displacements:
        D = abs(float(D))
        t_bar = D * (q * lam) ** (-1 / p)
        K = int(math.ceil(t_bar / s)) + 2
        k = np.arange(1, K + 1)
        t = k * s
        vals = -t * (D / t) ** p / p - t * lam
        best = int(np.argmax(vals))
        cont = -t_bar * (D / t_bar) ** p / p - t_bar * lam if D > 0 else 0.0
        rows.append(AsymptoticsRow(D, float(vals[best]), -th * D, float(abs(vals[best] + th * D)), float(cont), int(k[best])))
    return rows
