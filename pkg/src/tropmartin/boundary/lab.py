"""Numerical boundary exploration on rule kernels.

Boundary points are approximated by columns ``K_{.j} = A*_{.j} - pi_j`` for
targets ``j`` far from the basepoint, evaluated on a ball truncation that is
large enough to contain the optimal paths.  Targets are either a finite node
sequence or a ray ``k -> node``; rays let later evaluations pick targets as
far out as they need.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..core import ZERO, TropicalError
from ..spectral import max_circuit_mean
from .rules import KernelRule, Node, ShiftedRule
from .truncate import plus_from, star_rows, truncate

log = logging.getLogger(__name__)

PROBE_MARGIN = 3
TRUNC_MARGIN = 5
TAIL = 3

Targets = Sequence[Node] | Callable[[int], Node]


class NotAPath(TropicalError):
    pass


class NotMetric(TropicalError):
    pass


class NotConverged(TropicalError):
    def __init__(self, residual, estimate=None):
        self.residual = residual
        self.estimate = estimate
        super().__init__(f"column values did not settle: Cauchy gap {residual}")


class TruncationArtifact(TropicalError):
    def __init__(self, gap):
        self.gap = gap
        super().__init__(f"window values moved by {gap} when the ball was enlarged")


class InconsistentProbes(TropicalError):
    pass


class EigenCheckFailed(TropicalError):
    def __init__(self, residual, node):
        self.residual = residual
        self.node = node
        super().__init__(f"eigen residual {residual} at node {node!r}")


class BelowSpectralRadius(TropicalError):
    pass


# --------------------------------------------------------------------------
# helpers


def _gap(a: np.ndarray, b: np.ndarray) -> float:
    both = np.isneginf(a) & np.isneginf(b)
    if (np.isneginf(a) != np.isneginf(b)).any():
        return float("inf")
    d = np.abs(a[~both] - b[~both])
    return float(d.max(initial=0.0))


def _ray_targets(rule: KernelRule, fn: Callable[[int], Node], min_dist: int, start: int = 1, cap: int = 100_000):
    k = start
    while rule.distance(fn(k)) < min_dist:
        k += 1
        if k > cap:
            raise TropicalError(f"ray does not reach distance {min_dist}")
    return k, [fn(k + m) for m in range(TAIL)]


def _tol_for(rule: KernelRule, radius: int, tol: float | None) -> float:
    return truncate(rule, radius).default_tol() if tol is None else float(tol)


def _pi(rule: KernelRule, radius: int, nodes) -> np.ndarray:
    tr = truncate(rule, radius)
    row = star_rows(tr, [rule.basepoint])[0]
    return np.array([row[tr.index[x]] for x in nodes])


def _columns(rule: KernelRule, radius: int, nodes, targets, flat: bool = False) -> np.ndarray:
    """``K_{x,t}`` (or ``K♭``) for x in nodes and t in targets on the ball of ``radius``."""
    tr = truncate(rule, radius)
    missing = [t for t in targets if t not in tr.index] + [x for x in nodes if x not in tr.index]
    if missing:
        raise TropicalError(f"{missing[0]!r} lies outside the ball of radius {radius}")
    pi = star_rows(tr, [rule.basepoint])[0]
    cols = star_rows(tr, targets, reverse=True)
    out = np.empty((len(targets), len(nodes)))
    for a, t in enumerate(targets):
        pt = pi[tr.index[t]]
        if pt == ZERO:
            raise TropicalError(f"target {t!r} is not reachable from the basepoint")
        if flat:
            out[a] = [plus_from(tr, x, cols[a]) - pt for x in nodes]
        else:
            out[a] = cols[a][[tr.index[x] for x in nodes]] - pt
    return out


# --------------------------------------------------------------------------
# estimates


@dataclass(frozen=True, eq=False)
class BoundaryEstimate:
    window: tuple
    values: dict
    sequence_tail: tuple
    converged: bool
    residual: float
    tol: float
    window_radius: int
    truncation_radius: int
    rule: KernelRule = field(repr=False)
    ray: Callable[[int], Node] | None = field(default=None, repr=False)
    ray_start: int = 1

    def vector(self, nodes=None) -> np.ndarray:
        nodes = self.window if nodes is None else nodes
        return np.array([self.values[x] for x in nodes])

    def labelled(self) -> dict[str, float]:
        return {self.rule.encode(x): v for x, v in self.values.items()}

    def far_values(self, nodes, flat: bool = False) -> np.ndarray:
        """Evaluate ``w`` (or ``w♭``) at nodes that may lie outside the window.

        With a ray the targets are pushed to at least twice the nodes' distance
        plus a margin; with a finite sequence the stored tail is reused and
        must already be far enough.
        """
        nodes = list(nodes)
        D = max(self.rule.distance(x) for x in nodes)
        if self.ray is not None:
            _, targets = _ray_targets(self.rule, self.ray, 2 * D + 10, start=self.ray_start)
        else:
            targets = list(self.sequence_tail)
        R = D + max(self.rule.distance(t) for t in targets) + TRUNC_MARGIN
        vals = _columns(self.rule, R, nodes, targets, flat=flat)
        gap = max((_gap(vals[a], vals[a + 1]) for a in range(len(vals) - 1)), default=0.0)
        if gap > self.tol:
            raise NotConverged(gap)
        return vals[-1]


def column_limit(
    rule: KernelRule,
    targets: Targets,
    window_radius: int,
    tol: float | None = None,
    truncation_radius: int | None = None,
    *,
    require_escape: bool = True,
    strict: bool = True,
    ray_start: int = 1,
) -> BoundaryEstimate:
    """Estimate ``lim K_{.j_k}`` on the ball of radius ``window_radius``.

    A ray is sampled at the first index whose target lies at distance at least
    ``2 * window_radius + 10``.  The last three targets are evaluated; the
    estimate converged when consecutive evaluations agree within ``tol``.
    """
    ray = None
    if callable(targets):
        ray = targets
        if require_escape:
            _, seq = _ray_targets(rule, ray, 2 * window_radius + 10, start=ray_start)
        else:
            seq = [ray(ray_start + m) for m in range(TAIL)]
    else:
        seq = list(targets)
    if not seq:
        raise TropicalError("empty target sequence")
    for t in seq:
        if not rule.contains(t):
            raise TropicalError(f"target {t!r} is not a node of {rule.name}")
    tail = seq[-TAIL:]
    dists = [rule.distance(t) for t in tail]
    if require_escape and dists[-1] <= window_radius:
        raise TropicalError("targets stay inside the window; pass require_escape=False for fixed targets")

    window = truncate(rule, window_radius).nodes
    R = truncation_radius or window_radius + max(dists) + TRUNC_MARGIN
    if R < max(dists) or R < window_radius:
        raise TropicalError(f"truncation radius {R} does not contain the window and targets")
    tol = _tol_for(rule, R, tol)
    vals = _columns(rule, R, window, tail)
    residual = max((_gap(vals[a], vals[a + 1]) for a in range(len(vals) - 1)), default=0.0)
    probe = _columns(rule, R + PROBE_MARGIN, window, tail[-1:])[0]
    shift = _gap(probe, vals[-1])
    if shift > tol:
        raise TruncationArtifact(shift)
    est = BoundaryEstimate(
        window=tuple(window),
        values={x: float(v) for x, v in zip(window, vals[-1])},
        sequence_tail=tuple(tail),
        converged=residual <= tol,
        residual=residual,
        tol=tol,
        window_radius=window_radius,
        truncation_radius=R,
        rule=rule,
        ray=ray,
        ray_start=ray_start,
    )
    if strict and not est.converged:
        raise NotConverged(residual, est)
    return est


def h_flat_self(
    rule: KernelRule,
    estimate: BoundaryEstimate,
    probe_sequences: Sequence[Sequence[Node]],
    tol: float | None = None,
) -> float:
    """Lower estimate of ``H♭(w, w)``: best tail value of ``pi_i + w♭_i`` along the probes."""
    tol = estimate.tol if tol is None else tol
    if not probe_sequences:
        raise InconsistentProbes("no probe sequences")
    best = ZERO
    finals = []
    for probe in probe_sequences:
        probe = list(probe)
        check = column_limit(
            rule, probe, estimate.window_radius, tol, require_escape=False, strict=False
        )
        if not check.converged or _gap(check.vector(estimate.window), estimate.vector()) > tol:
            raise InconsistentProbes(f"probe ending at {probe[-1]!r} does not converge to the estimate")
        tail = probe[-TAIL:]
        D = max(rule.distance(x) for x in tail)
        pi = _pi(rule, D + TRUNC_MARGIN, tail)
        vals = pi + estimate.far_values(tail, flat=True)
        if _gap(vals[:-1], vals[1:]) > tol:
            log.warning("probe tail values %s have not settled", vals.tolist())
        finals.append(float(vals[-1]))
        best = max(best, float(vals[-1]))
    if max(finals) - min(finals) > tol:
        log.warning("probe sequences disagree: %s", finals)
    return best


# --------------------------------------------------------------------------
# path checks


@dataclass(frozen=True)
class GeodesicReport:
    ok: bool
    slacks: tuple[float, ...]
    first_violation: int | None
    alpha: float

    def __bool__(self) -> bool:
        return self.ok


def _path_weights(rule: KernelRule, path, radius) -> list[float]:
    out = []
    for x, y in zip(path, path[1:]):
        w = dict(rule.arcs(x, radius)).get(y)
        if w is None:
            raise NotAPath(f"{x!r} -> {y!r} is not an arc")
        out.append(float(w))
    return out


def almost_geodesic_check(
    rule: KernelRule,
    path: Sequence[Node],
    alpha: float,
    u: dict | BoundaryEstimate | None = None,
    tol: float | None = None,
) -> GeodesicReport:
    """Check the additive almost-geodesic inequality along every prefix.

    Without ``u`` the left form with ``pi`` from the basepoint is used:
    ``p_k = pi_{i_k} - pi_{i_0} - (A_{i_0 i_1} + ... )``.  With ``u`` the
    right form ``p_k = u_{i_0} - (A_{i_0 i_1} + ... + u_{i_k})``.  The path is
    accepted when every ``p_k <= alpha``.
    """
    path = list(path)
    if alpha < 0:
        raise TropicalError("alpha must be >= 0")
    if len(path) < 2:
        raise NotAPath("a path needs at least two nodes")
    R = max(rule.distance(x) for x in path) + TRUNC_MARGIN
    tol = _tol_for(rule, R, tol)
    cum = np.concatenate([[0.0], np.cumsum(_path_weights(rule, path, R))])
    if u is None:
        pi = _pi(rule, R, path)
        slacks = pi - pi[0] - cum
    else:
        vals = u.values if isinstance(u, BoundaryEstimate) else u
        try:
            uv = np.array([vals[x] for x in path])
        except KeyError as exc:
            raise TropicalError(f"u is not given at {exc.args[0]!r}") from None
        slacks = uv[0] - (cum + uv)
    slacks = slacks[1:]
    bad = np.nonzero(slacks > alpha + tol)[0]
    first = int(bad[0]) + 1 if len(bad) else None
    return GeodesicReport(first is None, tuple(float(s) for s in slacks), first, float(alpha))


@dataclass(frozen=True)
class RieffelReport:
    ok: bool
    worst: float
    worst_pair: tuple[int, int] | None

    def __bool__(self) -> bool:
        return self.ok


def rieffel_check(rule: KernelRule, path: Sequence[Node], epsilon: float, tail_start: int = 0) -> RieffelReport:
    """``|d(g_t, g_s) + d(g_s, g_0) - t| < eps`` for all tail pairs ``s <= t``, with ``d = -A*``."""
    if not rule.symmetric:
        raise NotMetric(f"rule {rule.name} is not flagged symmetric")
    path = list(path)
    _path_weights(rule, path, max(rule.distance(x) for x in path) + TRUNC_MARGIN)
    R = max(rule.distance(x) for x in path) + TRUNC_MARGIN
    tr = truncate(rule, R)
    uniq = list(dict.fromkeys(path))
    rows = star_rows(tr, uniq)
    d = {x: -rows[a] for a, x in enumerate(uniq)}

    def dist(x, y):
        return float(d[x][tr.index[y]])

    g0 = path[0]
    t = [dist(g0, x) for x in path]
    worst, pair = 0.0, None
    for ti in range(tail_start, len(path)):
        for si in range(tail_start, ti + 1):
            v = abs(dist(path[ti], path[si]) + dist(path[si], g0) - t[ti])
            if v > worst:
                worst, pair = v, (si, ti)
    return RieffelReport(worst < epsilon, worst, pair)


# --------------------------------------------------------------------------
# eigenvectors


@dataclass(frozen=True, eq=False)
class EigenvectorEstimate:
    lam: float
    estimate: BoundaryEstimate
    inner: tuple
    residual: float
    rho: float

    @property
    def values(self) -> dict:
        return self.estimate.values


def eigen_residuals(rule: KernelRule, values: dict, lam: float, nodes, radius: int) -> dict:
    """``(Au)_x - lam - u_x`` for x in nodes, using arcs whose heads carry a value."""
    out = {}
    for x in nodes:
        best = ZERO
        for y, w in rule.arcs(x, radius):
            if y in values:
                best = max(best, w + values[y])
        out[x] = best - lam - values[x]
    return out


def inner_window(rule: KernelRule, window, radius: int) -> list:
    """Window nodes whose out-arcs all stay in the window."""
    inside = set(window)
    return [x for x in window if all(y in inside for y, _ in rule.arcs(x, radius))]


def construct_eigenvector(
    rule: KernelRule,
    lam: float,
    window_radius: int,
    ray: Targets,
    tol: float | None = None,
    rho_radius: int | None = None,
) -> EigenvectorEstimate:
    """Right eigenvector ``Au = lam + u`` on a window, as a boundary column of ``A - lam``."""
    if not rule.row_finite:
        raise TropicalError("construct_eigenvector needs a row-finite rule")
    rho_radius = rho_radius or 2 * window_radius + 10
    rho = max_circuit_mean(truncate(rule, rho_radius).matrix)
    shifted = ShiftedRule(rule, lam)
    t = _tol_for(shifted, rho_radius, tol)
    if lam < rho - t:
        raise BelowSpectralRadius(f"lambda = {lam} is below the estimated rho = {rho}")
    est = column_limit(shifted, ray, window_radius, t)
    inner = inner_window(rule, est.window, window_radius)
    res = eigen_residuals(rule, est.values, lam, inner, window_radius)
    worst_node = max(res, key=lambda x: abs(res[x]))
    worst = abs(res[worst_node])
    if worst > t:
        raise EigenCheckFailed(worst, worst_node)
    return EigenvectorEstimate(float(lam), est, tuple(inner), float(worst), float(rho))
