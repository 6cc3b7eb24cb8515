"""Maximal circuit mean, normalised kernel, recurrent nodes and recurrence classes."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.sparse.csgraph import connected_components

from .core import (
    ZERO,
    DivergentClosure,
    TropicalError,
    TropicalMatrix,
    _otimes_arr,
    _plus_closure_array,
    default_tol,
)


class RhoBoundViolation(TropicalError):
    def __init__(self, circuit):
        self.circuit = list(circuit)
        super().__init__(f"positive circuit {self.circuit}: rho(A) > 0, so pi cannot be left super-harmonic")


@dataclass(frozen=True)
class SpectralData:
    rho: float
    normalized: TropicalMatrix
    recurrent: tuple[str, ...]
    classes: tuple[tuple[str, ...], ...]

    def class_of(self, label: str) -> tuple[str, ...] | None:
        for c in self.classes:
            if label in c:
                return c
        return None


def _karp(W: np.ndarray) -> float:
    """Karp's maximum cycle mean on one strongly connected block."""
    m = W.shape[0]
    D = np.full((m + 1, m), ZERO)
    D[0, 0] = 0.0
    for k in range(1, m + 1):
        D[k] = _otimes_arr(D[k - 1][:, None], W).max(axis=0)
    best = ZERO
    for v in range(m):
        if D[m, v] == ZERO:
            continue
        ks = [k for k in range(m) if D[k, v] > ZERO]
        val = min((D[m, v] - D[k, v]) / (m - k) for k in ks)
        best = max(best, val)
    return best


def max_circuit_mean(A: TropicalMatrix) -> float:
    """Largest weight-to-length ratio over the circuits of ``A`` (-inf if acyclic)."""
    W = A.dense()
    if A.n == 0:
        return ZERO
    ncomp, comp = connected_components(A.csr(), directed=True, connection="strong")
    best = ZERO
    for c in range(ncomp):
        idx = np.nonzero(comp == c)[0]
        sub = W[np.ix_(idx, idx)]
        if not (sub > ZERO).any():
            continue
        best = max(best, _karp(sub))
    return float(best)


def _integral_scaling(rho: float, n: int) -> tuple[int, int]:
    frac = Fraction(rho).limit_denominator(max(n, 1))
    return frac.numerator, frac.denominator


def spectral_data(A: TropicalMatrix, tol: float | None = None) -> SpectralData:
    rho = max_circuit_mean(A)
    if rho == ZERO:
        return SpectralData(rho, A, (), ())
    W = A.dense()
    exact = A.is_integral and tol in (None, 0.0)
    if exact:
        # q*A - p is integral when rho = p/q, so recurrence is decided exactly
        p, q = _integral_scaling(rho, A.n)
        scaled = _otimes_arr(W * q, -float(p))
        plus = _plus_closure_array(scaled, 0.0)
        tol = 0.0
    else:
        tol = default_tol(W) if tol is None else tol
        plus = _plus_closure_array(_otimes_arr(W, -rho), tol)
    if (np.diag(plus) > tol).any():
        raise DivergentClosure("normalised closure diverges; circuit mean estimate is inconsistent")
    diag = np.diag(plus)
    rec = [i for i in range(A.n) if abs(diag[i]) <= tol]
    classes: list[list[int]] = []
    for i in rec:
        for c in classes:
            j = c[0]
            if abs(plus[i, j] + plus[j, i]) <= tol:
                c.append(i)
                break
        else:
            classes.append([i])
    lab = A.labels
    return SpectralData(
        rho=rho,
        normalized=A.shifted(-rho),
        recurrent=tuple(lab[i] for i in rec),
        classes=tuple(tuple(lab[i] for i in c) for c in classes),
    )


def positive_circuit(A: TropicalMatrix, tol: float | None = None) -> list[str] | None:
    """A circuit with positive weight, found by max-plus Bellman-Ford, or None."""
    W = A.dense()
    n = A.n
    tol = default_tol(W) if tol is None else tol
    dist = np.zeros(n)
    pred = np.full(n, -1)
    last = -1
    for _ in range(n):
        cand = _otimes_arr(dist[:, None], W)
        best = cand.argmax(axis=0)
        val = cand[best, np.arange(n)]
        upd = val > dist + tol
        if not upd.any():
            return None
        dist[upd] = val[upd]
        pred[upd] = best[upd]
        last = int(np.nonzero(upd)[0][0])
    v = last
    for _ in range(n):
        v = pred[v]
        if v < 0:
            return None
    cycle = [v]
    u = pred[v]
    while u != v:
        cycle.append(u)
        u = pred[u]
    return [A.labels[i] for i in reversed(cycle)]


def check_rho_bound(A: TropicalMatrix, pi) -> bool:
    """Assert ``rho(A) <= 0``, which any full-support left super-harmonic row forces.

    ``pi`` may be a validated ``PiSpec`` or its resolved row; it is only used to
    confirm the premise.  Raises :class:`RhoBoundViolation` with a positive
    circuit as witness.
    """
    row = getattr(pi, "resolved", pi)
    if row is None or not np.all(np.isfinite(np.asarray(getattr(row, "values", row), float))):
        raise TropicalError("check_rho_bound needs a validated, finite pi")
    tol = default_tol(A.dense())
    if max_circuit_mean(A) <= tol:
        return True
    raise RhoBoundViolation(positive_circuit(A) or [])
