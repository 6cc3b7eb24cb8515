"""Slow reference implementations used to cross-check the fast code.

These enumerate walks explicitly in pure Python and share nothing with the
closure or circuit-mean code they check, so they are only usable for tiny
kernels (n <= 6 or so).
"""
from __future__ import annotations

import math
from typing import Iterator

import numpy as np

from .core import TropicalMatrix, kleene_star
from .spectral import max_circuit_mean


def _walk_max(W, length: int):
    """``(A^length)_ij`` by enumerating every walk of that length."""
    n = len(W)
    out = [[-math.inf] * n for _ in range(n)]

    def extend(start, node, steps, acc):
        if steps == 0:
            if acc > out[start][node]:
                out[start][node] = acc
            return
        for nxt in range(n):
            w = W[node][nxt]
            if w != -math.inf:
                extend(start, nxt, steps - 1, acc + w)

    for i in range(n):
        extend(i, i, length, 0.0)
    return out


def star_by_paths(A) -> np.ndarray:
    """``A*`` as the max over walks of length < n, valid when no circuit is positive."""
    W = np.asarray(A.dense() if isinstance(A, TropicalMatrix) else A, dtype=float).tolist()
    n = len(W)
    best = [[0.0 if i == j else -math.inf for j in range(n)] for i in range(n)]
    for k in range(1, n):
        P = _walk_max(W, k)
        for i in range(n):
            for j in range(n):
                best[i][j] = max(best[i][j], P[i][j])
    return np.array(best)


def rho_by_traces(A) -> float:
    """``max_k max_i (A^k)_ii / k`` for ``k = 1..n``."""
    W = np.asarray(A.dense() if isinstance(A, TropicalMatrix) else A, dtype=float).tolist()
    n = len(W)
    best = -math.inf
    for k in range(1, n + 1):
        P = _walk_max(W, k)
        for i in range(n):
            if P[i][i] != -math.inf:
                best = max(best, P[i][i] / k)
    return best


def random_integer_matrix(rng: np.random.Generator, n: int, lo: int = -3, hi: int = 0, density: float = 0.6):
    W = rng.integers(lo, hi + 1, size=(n, n)).astype(float)
    W[rng.random((n, n)) > density] = -np.inf
    return W


def random_core_checks(seed: int = 0, count: int = 50) -> Iterator[tuple[str, bool, object]]:
    """Closure and circuit-mean agreement with the walk oracles on random small kernels."""
    rng = np.random.default_rng(seed)
    star_bad, rho_bad = [], []
    for t in range(count):
        n = int(rng.integers(1, 6))
        W = random_integer_matrix(rng, n)
        A = TropicalMatrix.from_dense(W)
        if not np.array_equal(kleene_star(A).dense(), star_by_paths(W)):
            star_bad.append(t)
        if max_circuit_mean(A) != rho_by_traces(W):
            rho_bad.append(t)
    yield f"kleene_star matches walk oracle ({count} kernels)", not star_bad, star_bad or None
    yield f"max_circuit_mean matches trace oracle ({count} kernels)", not rho_bad, rho_bad or None
