"""Closed-form boundary examples checked against the numerical lab.

Each fixture returns a list of :class:`Assertion`; ``fixture_suite`` runs them
all.  Integer fixtures are compared exactly, the triangle (weights ``-1/i``)
at ``1e-9``.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..core import (
    FLOAT_TOL,
    kleene_plus,
    kleene_star,
    tensor_product,
    tensor_sum,
)
from ..martin import PiSpec, martin_data, minimal_martin_finite
from ..spectral import max_circuit_mean
from .lab import (
    almost_geodesic_check,
    column_limit,
    construct_eigenvector,
    eigen_residuals,
    h_flat_self,
    inner_window,
)
from .rules import (
    ChainRule,
    HedgehogRule,
    NonTightRule,
    TriangleRule,
    TripodRule,
    Z2Rule,
    ZRule,
    phi,
)
from .truncate import star_rows, truncate


@dataclass(frozen=True)
class Assertion:
    name: str
    passed: bool
    witness: str = ""


@dataclass
class FixtureReport:
    assertions: list[Assertion] = field(default_factory=list)
    timing: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    def failures(self) -> list[Assertion]:
        return [a for a in self.assertions if not a.passed]


def _match(name: str, est, formula: Callable, tol: float = 0.0) -> Assertion:
    worst, where = 0.0, None
    for x in est.window:
        d = abs(est.values[x] - formula(x))
        if d > worst:
            worst, where = d, x
    ok = worst <= tol
    return Assertion(name, ok, "" if ok else f"off by {worst} at {where!r}")


def _check(name: str, cond: bool, witness: str = "") -> Assertion:
    return Assertion(name, bool(cond), "" if cond else witness)


def _dominated_max(name, target, parts, tol=0.0) -> Assertion:
    """``target == max_k (c_k + part_k)`` on the common window."""
    worst, where = 0.0, None
    for x in target.window:
        v = max(c + p.values[x] for c, p in parts)
        d = abs(v - target.values[x])
        if d > worst:
            worst, where = d, x
    return Assertion(name, worst <= tol, "" if worst <= tol else f"off by {worst} at {where!r}")


# --------------------------------------------------------------------------


def example_chain(radius: int = 6) -> list[Assertion]:
    rule = ChainRule(False)
    out = []
    tr = truncate(rule, 3)
    out.append(_check("ex1 ball radius 3 is {0,1,2,3}", tr.nodes == (0, 1, 2, 3), str(tr.nodes)))
    # the finite ball has the circuit 0 -> 1 -> ... -> R -> 0 of mean -1/(R+1)
    rhos = [max_circuit_mean(truncate(rule, r).matrix) for r in (radius, 2 * radius, 4 * radius)]
    expect = [-1.0 / (r + 1) for r in (radius, 2 * radius, 4 * radius)]
    out.append(_check("ex1 truncated rho = -1/(R+1) -> 0", np.allclose(rhos, expect, atol=1e-12), str(rhos)))
    plus = kleene_plus(truncate(rule, radius).matrix).dense()
    out.append(_check("ex1 no zero-weight circuit", bool((np.diag(plus) < 0).all()), str(np.diag(plus))))
    est = column_limit(rule, lambda k: k, radius)
    out.append(_match("ex1 boundary xi == 0", est, lambda x: 0.0))
    ev = construct_eigenvector(rule, 0.0, radius, lambda k: k)
    out.append(_check("ex1 xi harmonic on the inner window", ev.residual == 0.0, str(ev.residual)))
    out.append(_check("ex1 H(xi,xi) = 0", h_flat_self(rule, est, [list(range(radius + 4))]) == 0.0))
    geo = almost_geodesic_check(rule, list(range(12)), 0.0)
    out.append(_check("ex1 0,1,2,... is a geodesic", geo.ok, str(geo.slacks)))
    # finite columns are not harmonic at their own index: xi is the only candidate
    md = martin_data(truncate(rule, radius).matrix, PiSpec.basepoint("0"))
    out.append(_check("ex1 no recurrent column", minimal_martin_finite(md) == []))
    return out


def example_chain_loop(radius: int = 6) -> list[Assertion]:
    rule = ChainRule(True)
    out = []
    md = martin_data(truncate(rule, radius).matrix, PiSpec.basepoint("0"))
    out.append(_check("ex2 rho = 0", md.spectral.rho == 0.0, str(md.spectral.rho)))
    out.append(_check("ex2 recurrent = {0}", md.spectral.recurrent == ("0",), str(md.spectral.recurrent)))
    out.append(_check("ex2 truncation part of M^m = {K.0}", minimal_martin_finite(md) == ["0"]))
    k0 = column_limit(rule, [0, 0, 0], radius, require_escape=False)
    out.append(_match("ex2 K.0 closed form", k0, lambda x: 0.0 if x == 0 else -1.0))
    out.append(_check("ex2 H(K.0,K.0) = 0", h_flat_self(rule, k0, [[0, 0, 0]]) == 0.0))
    xi = column_limit(rule, lambda k: k, radius)
    out.append(_match("ex2 boundary xi == 0", xi, lambda x: 0.0))
    out.append(_check("ex2 H(xi,xi) = 0", h_flat_self(rule, xi, [list(range(radius + 4))]) == 0.0))
    # every harmonic vector is max(a + K.0, b + xi)
    u = {x: max(-2.0 + k0.values[x], -5.0 + xi.values[x]) for x in k0.window}
    inner = inner_window(rule, k0.window, radius)
    res = eigen_residuals(rule, u, 0.0, inner, radius)
    out.append(_check("ex2 max(a+K.0, b+xi) harmonic", all(v == 0.0 for v in res.values()), str(res)))
    return out


def example_z(radius: int = 4) -> list[Assertion]:
    rule = ZRule()
    out = []
    tr = truncate(rule, 3)
    out.append(_check("Z ball radius 3 has 7 nodes", sorted(tr.nodes) == list(range(-3, 4))))
    A = truncate(rule, radius + 4).matrix
    out.append(_check("Z rho = -1", max_circuit_mean(A) == -1.0))
    md = martin_data(truncate(rule, 3).matrix, PiSpec.basepoint("0"))
    K = np.array([[abs(j) - abs(i - j) for j in range(-3, 4)] for i in range(-3, 4)], float)
    order = [md.A.index(str(i)) for i in range(-3, 4)]
    out.append(_check("Z K_ij = |j| - |i-j|", np.array_equal(md.K[np.ix_(order, order)], K)))
    plus = column_limit(rule, lambda k: k, radius)
    minus = column_limit(rule, lambda k: -k, radius)
    out.append(_match("Z xi+_i = i", plus, lambda x: float(x)))
    out.append(_match("Z xi-_i = -i", minus, lambda x: float(-x)))
    out.append(_check("Z H(xi+,xi+) = 0", h_flat_self(rule, plus, [list(range(radius + 8))]) == 0.0))
    out.append(_check("Z H(xi-,xi-) = 0", h_flat_self(rule, minus, [[-k for k in range(radius + 8)]]) == 0.0))
    geo = almost_geodesic_check(rule, list(range(11)), 0.0)
    out.append(_check("Z 0..10 geodesic", geo.ok and all(s == 0 for s in geo.slacks)))
    bad = almost_geodesic_check(rule, [0, 1, 0, 1, 2], 1.0)
    out.append(_check("Z backtrack rejected at prefix 2", (not bad.ok) and bad.first_violation == 2))
    return out


def example_z2(radius: int = 3) -> list[Assertion]:
    out = []
    z, z2 = ZRule(), Z2Rule()
    out.append(_check("Z2 ball radius 2 has 13 nodes", truncate(z2, 2).n == 13))
    # box truncation of Z^2 is the tensor sum of two path truncations
    A1 = truncate(z, radius).matrix
    box = tensor_sum(A1, A1)
    lhs = kleene_star(box)
    rhs = tensor_product(kleene_star(A1), kleene_star(A1))
    out.append(_check("Z2 star(A1 (x)+ A2) = A1* (x) A2*", lhs == rhs))
    out.append(_check("Z2 rho = -1", max_circuit_mean(box) == -1.0))
    # product boundary forms: K^1_{jc} = |c| - |j-c| for a fixed coordinate c
    for c in (0, 1, -2):
        est = column_limit(z2, lambda k, c=c: (k, c), radius)
        out.append(_match(f"Z2 ray (k,{c}) -> i + K_(j,{c})", est, lambda x, c=c: x[0] + abs(c) - abs(x[1] - c)))
        est = column_limit(z2, lambda k, c=c: (c, -k), radius)
        out.append(_match(f"Z2 ray ({c},-k) -> K_(i,{c}) - j", est, lambda x, c=c: abs(c) - abs(x[0] - c) - x[1]))
    diag = column_limit(z2, lambda k: (k, k), radius)
    out.append(_match("Z2 ray (k,k) -> i + j", diag, lambda x: float(x[0] + x[1])))
    anti = column_limit(z2, lambda k: (-k, k), radius)
    out.append(_match("Z2 ray (-k,k) -> -i + j", anti, lambda x: float(-x[0] + x[1])))
    stair = [(k // 2 + k % 2, k // 2) for k in range(14)]
    out.append(_check("Z2 staircase geodesic", almost_geodesic_check(z2, stair, 0.0).ok))
    out.append(_check("Z2 H(diag,diag) = 0", h_flat_self(z2, diag, [stair]) == 0.0))
    return out


def triangle_xi(ell: int):
    def f(x):
        i, j = x
        return max(i - ell - 2 * abs(j - ell) + phi(ell), -(i - j) - phi(j))

    return f


def example_triangle(radius: int = 5) -> list[Assertion]:
    rule = TriangleRule()
    out = []
    pi_ok = True
    tr = truncate(rule, 3 * radius + 10)
    pi = star_rows(tr, [rule.basepoint])[0]
    for x in tr.within(radius):
        k, ell = x
        pi_ok &= abs(pi[tr.index[x]] - (-k + ell - phi(ell))) <= FLOAT_TOL
    out.append(_check("triangle pi_(k,l) = -k + l - phi(l)", pi_ok))
    for ell in (1, 2, 3):
        est = column_limit(rule, lambda k, ell=ell: (k, ell), radius, FLOAT_TOL, ray_start=ell)
        out.append(_match(f"triangle xi^{ell} closed form", est, triangle_xi(ell), FLOAT_TOL))
    hub = column_limit(rule, [(1, 1)] * 3, radius, FLOAT_TOL, require_escape=False)
    diag = column_limit(rule, lambda m: (2 * m, m), radius, FLOAT_TOL)
    worst = max(abs(diag.values[x] - hub.values[x]) for x in hub.window)
    out.append(_check("triangle (2m,m) targets -> K.(1,1)", worst <= FLOAT_TOL, f"gap {worst}"))
    out.append(_match("triangle K.(1,1) = -(i-j) - phi(j)", hub, lambda x: -(x[0] - x[1]) - phi(x[1]), FLOAT_TOL))
    return out


def tripod_xi0(x):
    return x[0] - x[1] + 1.0


def tripod_xi2(x):
    return x[0] + x[1] - 1.0


def example_tripod(radius: int = 5) -> list[Assertion]:
    rule = TripodRule()
    out = []
    xi0 = column_limit(rule, lambda k: (k, 0), radius)
    xi2 = column_limit(rule, lambda k: (k, 2), radius)
    xi1 = column_limit(rule, lambda k: (k, 1), radius)
    out.append(_match("tripod xi0 = i - j + 1", xi0, tripod_xi0))
    out.append(_match("tripod xi2 = i + j - 1", xi2, tripod_xi2))
    out.append(_dominated_max("tripod xi1 = xi0 (+) xi2", xi1, [(0.0, xi0), (0.0, xi2)]))
    n = radius + 8
    h0 = h_flat_self(rule, xi0, [[(0, 1)] + [(k, 0) for k in range(n)]])
    h2 = h_flat_self(rule, xi2, [[(0, 1)] + [(k, 2) for k in range(n)]])
    h1 = h_flat_self(rule, xi1, [[(k, 1) for k in range(2, n)]])
    out.append(_check("tripod H(xi0,xi0) = 0 (extremal)", h0 == 0.0, str(h0)))
    out.append(_check("tripod H(xi2,xi2) = 0 (extremal)", h2 == 0.0, str(h2)))
    out.append(_check("tripod H(xi1,xi1) = -2 (not minimal)", h1 == -2.0, str(h1)))
    return out


def hedgehog_forms():
    def xi_00(x):
        i, j, k = x
        return i - j - k - (1 if (j == 0 and k == 1) else 0)

    def xi_01(x):
        i, j, k = x
        return 2 + i - j if k == 1 else 1 + i - j - (1 if j == 0 else 0)

    def xi_inf(kp):
        return lambda x: kp - abs(kp - x[2]) + x[0] - x[1]

    return xi_00, xi_01, xi_inf


def example_hedgehog(radius: int = 4) -> list[Assertion]:
    rule = HedgehogRule()
    out = []
    xi_00, xi_01, xi_inf = hedgehog_forms()
    e00 = column_limit(rule, lambda m: (m, 0, 0), radius)
    e01 = column_limit(rule, lambda m: (m, 0, 1), radius)
    out.append(_match("hedgehog xi^(inf,0,0) closed form", e00, xi_00))
    out.append(_match("hedgehog xi^(inf,0,1) closed form", e01, xi_01))
    for kp, c in ((0, -3.0), (1, -1.0)):
        diag = column_limit(rule, lambda m, kp=kp: (m, m, kp), radius)
        out.append(_match(f"hedgehog xi^(inf,inf,{kp}) closed form", diag, xi_inf(kp)))
        out.append(
            _dominated_max(
                f"hedgehog xi^(inf,inf,{kp}) = xi^(inf,0,0) (+) {c:g} xi^(inf,0,1)",
                diag,
                [(0.0, e00), (c, e01)],
            )
        )
    return out


def example_nontight(radius: int = 6) -> list[Assertion]:
    rule = NonTightRule()
    out = []
    b = column_limit(rule, lambda k: k, radius)
    out.append(_match("nontight b_i = -i", b, lambda x: float(-x)))
    res = eigen_residuals(rule, b.values, 0.0, inner_window(rule, b.window, radius), radius)
    out.append(_check("nontight eigen-check fails at the basepoint", res[0] < 0, str(res[0])))
    others = [v for x, v in res.items() if x != 0]
    out.append(_check("nontight eigen-check holds off the basepoint", all(v == 0 for v in others), str(res)))
    return out


FIXTURES: dict[str, Callable[..., list[Assertion]]] = {
    "ex1": example_chain,
    "ex2": example_chain_loop,
    "z": example_z,
    "z2": example_z2,
    "triangle": example_triangle,
    "tripod": example_tripod,
    "hedgehog": example_hedgehog,
    "nontight": example_nontight,
}


def fixture_suite(names=None) -> FixtureReport:
    report = FixtureReport()
    for name in names or FIXTURES:
        t0 = time.perf_counter()
        try:
            report.assertions.extend(FIXTURES[name]())
        except Exception as exc:  # a crashing fixture is a failed assertion
            report.assertions.append(Assertion(f"{name} ran", False, f"{type(exc).__name__}: {exc}"))
        report.timing[name] = time.perf_counter() - t0
    return report
