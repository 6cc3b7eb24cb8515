"""Martin kernels, minimal Martin space and representing measures for finite kernels.

On a finite node set the Martin space is just the set of columns of ``K``,
every limit is exact, and the minimal Martin space is the set of recurrent
columns (when the maximal circuit mean is 0).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import (
    ZERO,
    TropicalError,
    TropicalMatrix,
    TropicalVector,
    _otimes_arr,
    arrays_close,
    default_tol,
    kleene_plus,
    kleene_star,
)
from .spectral import SpectralData, spectral_data


class NotSuperharmonic(TropicalError):
    def __init__(self, msg, witness=None):
        self.witness = witness
        super().__init__(msg)


class NotFullSupport(TropicalError):
    def __init__(self, node):
        self.node = node
        super().__init__(f"pi is -inf at node {node!r}: the basepoint does not reach it")


class DivergentStar(TropicalError):
    def __init__(self, entry):
        self.entry = entry
        super().__init__(f"closure entry {entry} is +inf (positive circuit)")


class NotHarmonic(TropicalError):
    pass


class NoMinimalSpace(TropicalError):
    pass


class UnboundedDensity(TropicalError):
    pass


class NotNormalized(TropicalError):
    pass


# --------------------------------------------------------------------------
# reference row


@dataclass(frozen=True)
class PiSpec:
    """Left super-harmonic reference row: a basepoint, ``σA*`` or an explicit row."""

    kind: str
    node: str | None = None
    row: TropicalVector | None = None
    resolved: TropicalVector | None = None

    @classmethod
    def basepoint(cls, node) -> "PiSpec":
        return cls("basepoint", node=str(node))

    @classmethod
    def sigma(cls, row: TropicalVector) -> "PiSpec":
        return cls("sigma", row=row)

    @classmethod
    def explicit(cls, row: TropicalVector) -> "PiSpec":
        return cls("explicit", row=row)


def validate_pi(A: TropicalMatrix, spec: PiSpec, star: TropicalMatrix | None = None) -> PiSpec:
    star = kleene_star(A) if star is None else star
    S = star.dense()
    tol = default_tol(A.dense())
    if spec.kind == "basepoint":
        b = star.index(spec.node)
        values = S[b].copy()
    elif spec.kind == "sigma":
        sigma = _aligned(A, spec.row)
        if np.isfinite(sigma).sum() == 0:
            raise TropicalError("sigma must have at least one finite entry")
        values = _otimes_arr(sigma[:, None], S).max(axis=0)
    elif spec.kind == "explicit":
        values = _aligned(A, spec.row).copy()
    else:
        raise TropicalError(f"unknown pi kind {spec.kind!r}")

    if np.isposinf(values).any():
        j = int(np.nonzero(np.isposinf(values))[0][0])
        raise DivergentStar((spec.node, A.labels[j]))
    if np.isneginf(values).any():
        raise NotFullSupport(A.labels[int(np.nonzero(np.isneginf(values))[0][0])])

    W = A.dense()
    lhs = _otimes_arr(values[:, None], W)  # pi_i + A_ij
    excess = lhs - values[None, :]
    if (excess > tol).any():
        i, j = np.unravel_index(int(np.argmax(excess)), excess.shape)
        raise NotSuperharmonic(
            f"pi_i + A_ij > pi_j on arc {A.labels[i]}->{A.labels[j]}", witness=(A.labels[i], A.labels[j])
        )
    return PiSpec(spec.kind, spec.node, spec.row, TropicalVector(A.labels, values))


def _aligned(A: TropicalMatrix, row) -> np.ndarray:
    if isinstance(row, TropicalVector):
        if row.labels == A.labels:
            return row.values
        d = row.as_dict()
        return np.array([d.get(x, ZERO) for x in A.labels])
    arr = np.asarray(row, dtype=float).reshape(-1)
    if len(arr) != A.n:
        raise TropicalError("row length does not match the kernel")
    return arr


# --------------------------------------------------------------------------
# Martin data


@dataclass(frozen=True)
class RepresentingMeasure:
    support: tuple[str, ...]
    density: dict[str, float] = field(hash=False)

    def __post_init__(self):
        if any(np.isposinf(v) for v in self.density.values()):
            raise UnboundedDensity("density must be bounded above")

    def restricted(self, support: Sequence[str]) -> "RepresentingMeasure":
        keep = tuple(s for s in self.support if s in set(support))
        return RepresentingMeasure(keep, {s: self.density[s] for s in keep})


@dataclass(frozen=True, eq=False)
class MartinData:
    A: TropicalMatrix
    pi: PiSpec
    star: TropicalMatrix
    plus: TropicalMatrix
    K: np.ndarray
    Kflat: np.ndarray
    H: np.ndarray
    Hflat: np.ndarray
    spectral: SpectralData
    column_classes: tuple[tuple[str, ...], ...]
    tol: float

    @property
    def labels(self) -> tuple[str, ...]:
        return self.A.labels

    @property
    def pi_values(self) -> np.ndarray:
        return self.pi.resolved.values

    def representative(self, label: str) -> str:
        """Canonical label (smallest) of the column class containing ``label``."""
        for c in self.column_classes:
            if label in c:
                return c[0]
        raise KeyError(label)

    def column(self, label: str) -> TropicalVector:
        return TropicalVector(self.labels, self.K[:, self.A.index(label)])

    def values(self, u) -> np.ndarray:
        return _aligned(self.A, u)


def _column_classes(K: np.ndarray, labels, tol) -> tuple[tuple[str, ...], ...]:
    groups: list[list[int]] = []
    for j in range(K.shape[1]):
        for g in groups:
            if arrays_close(K[:, g[0]], K[:, j], tol):
                g.append(j)
                break
        else:
            groups.append([j])
    classes = [tuple(sorted(labels[j] for j in g)) for g in groups]
    return tuple(sorted(classes))


def martin_data(A: TropicalMatrix, spec: PiSpec) -> MartinData:
    star = kleene_star(A)
    pi = validate_pi(A, spec, star=star)
    plus = kleene_plus(A)
    tol = default_tol(A.dense())
    p = pi.resolved.values
    S, P = star.dense(), plus.dense()
    K = _otimes_arr(S, -p[None, :])
    Kflat = _otimes_arr(P, -p[None, :])
    H = _otimes_arr(p[:, None], K)
    Hflat = _otimes_arr(p[:, None], Kflat)
    for arr in (K, Kflat, H, Hflat):
        arr.setflags(write=False)
    return MartinData(
        A=A,
        pi=pi,
        star=star,
        plus=plus,
        K=K,
        Kflat=Kflat,
        H=H,
        Hflat=Hflat,
        spectral=spectral_data(A),
        column_classes=_column_classes(K, A.labels, tol),
        tol=tol,
    )


def minimal_martin_finite(md: MartinData) -> list[str]:
    """Representatives of the recurrent column classes (empty unless rho(A) = 0)."""
    if abs(md.spectral.rho) > md.tol:
        return []
    reps = []
    for c in md.column_classes:
        idx = [md.A.index(x) for x in c]
        if any(abs(md.Hflat[i, i]) <= md.tol for i in idx):
            reps.append(c[0])
    return reps


# --------------------------------------------------------------------------
# harmonic tests


def _Au(md: MartinData, u: np.ndarray) -> np.ndarray:
    return _otimes_arr(md.A.dense(), u[None, :]).max(axis=1)


def _check_no_posinf(u):
    if np.isposinf(u).any():
        raise TropicalError("vectors must not contain +inf")


def is_superharmonic(md: MartinData, u) -> bool:
    u = md.values(u)
    _check_no_posinf(u)
    return bool(np.all(_Au(md, u) <= _raise(u, md.tol)))


def is_harmonic(md: MartinData, u) -> bool:
    """``Au = u`` entrywise; the all-``-inf`` vector counts as harmonic."""
    u = md.values(u)
    _check_no_posinf(u)
    return arrays_close(_Au(md, u), u, md.tol)


def is_integrable(md: MartinData, u) -> bool:
    u = md.values(u)
    return bool(_otimes_arr(md.pi_values, u).max(initial=ZERO) < np.inf)


def is_zero(u) -> bool:
    vals = u.values if isinstance(u, TropicalVector) else np.asarray(u, float)
    return bool(np.all(np.isneginf(vals)))


def _raise(u, tol):
    return np.where(np.isfinite(u), u + tol, u)


# --------------------------------------------------------------------------
# representation


def mu(md: MartinData, u) -> RepresentingMeasure:
    """Maximal representing density: ``pi_i + u_i`` on the class of ``K_{.i}``."""
    vals = md.values(u)
    if not is_superharmonic(md, vals):
        raise NotSuperharmonic("mu is defined for super-harmonic vectors")
    dens = _otimes_arr(md.pi_values, vals)
    density = {}
    for c in md.column_classes:
        density[c[0]] = float(max(dens[md.A.index(x)] for x in c))
    return RepresentingMeasure(tuple(c[0] for c in md.column_classes), density)


def reconstruct(md: MartinData, nu: RepresentingMeasure) -> TropicalVector:
    """Pointwise supremum of ``nu(w) + w`` over the support."""
    out = np.full(md.A.n, ZERO)
    for rep in nu.support:
        d = nu.density[rep]
        if np.isposinf(d):
            raise UnboundedDensity(f"density at {rep} is +inf")
        np.fmax(out, _otimes_arr(md.K[:, md.A.index(rep)], d), out=out)
    return TropicalVector(md.labels, out)


def decompose_harmonic(md: MartinData, u) -> RepresentingMeasure:
    """Write a harmonic vector as a max-plus combination of recurrent columns."""
    vals = md.values(u)
    if is_zero(vals):
        raise NotHarmonic("the zero vector is excluded")
    if not is_harmonic(md, vals):
        raise NotHarmonic("Au != u")
    reps = minimal_martin_finite(md)
    if not reps:
        raise NoMinimalSpace("non-zero harmonic vector but no recurrent class with rho(A) = 0")
    nu = mu(md, vals).restricted(reps)
    if not arrays_close(reconstruct(md, nu).values, vals, md.tol):
        raise NoMinimalSpace("recurrent columns do not reconstruct u; inconsistent input")
    return nu


@dataclass(frozen=True)
class Extremality:
    extremal: bool
    witness: tuple[TropicalVector, TropicalVector] | None = None

    def __bool__(self) -> bool:
        return self.extremal


def is_extremal(md: MartinData, u) -> Extremality:
    """Decide whether a normalised super-harmonic vector is an extremal generator.

    When it is not, the witness ``(v1, v2)`` satisfies ``u = v1 ⊕ v2`` with
    both terms super-harmonic and different from ``u``.
    """
    vals = md.values(u)
    if not is_superharmonic(md, vals):
        raise NotSuperharmonic("is_extremal needs a super-harmonic vector")
    norm = _otimes_arr(md.pi_values, vals).max(initial=ZERO)
    if not abs(norm) <= md.tol:
        raise NotNormalized(f"pi u = {norm}, expected 0")
    for c in md.column_classes:
        if arrays_close(md.K[:, md.A.index(c[0])], vals, md.tol):
            return Extremality(True)
    nu = mu(md, vals)
    support = [s for s in nu.support if nu.density[s] > ZERO]
    # prune redundant support points so every remaining one is needed
    kept = list(support)
    for s in support:
        trial = [t for t in kept if t != s]
        if trial and arrays_close(_combine(md, nu, trial), vals, md.tol):
            kept = trial
    w0, rest = kept[0], kept[1:]
    v1 = TropicalVector(md.labels, _combine(md, nu, [w0]))
    v2 = TropicalVector(md.labels, _combine(md, nu, rest))
    return Extremality(False, (v1, v2))


def _combine(md: MartinData, nu: RepresentingMeasure, support) -> np.ndarray:
    out = np.full(md.A.n, ZERO)
    for s in support:
        np.fmax(out, _otimes_arr(md.K[:, md.A.index(s)], nu.density[s]), out=out)
    return out


def rebase_column(w, md: MartinData, node: str) -> np.ndarray:
    """Renormalise a Martin-space vector at another basepoint: ``w - w_node``."""
    vals = md.values(w)
    return _otimes_arr(vals, -vals[md.A.index(node)])
