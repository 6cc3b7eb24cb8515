"""Max-plus semiring scalars, vectors, matrices and Kleene closures.

Scalars are plain Python/numpy floats: ``-inf`` is the semiring zero, ``0`` the
unit, and ``+inf`` only ever appears in closure results.  Integer-valued
weights are represented exactly by doubles, which gives the "exact-integer"
mode used by the fixtures: comparisons then run with tolerance 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np
import scipy.sparse as sp

ZERO = -np.inf
ONE = 0.0
FLOAT_TOL = 1e-9
DENSE_FILL = 0.25


class TropicalError(ValueError):
    """Base class for all errors raised by this package."""


class DimensionMismatch(TropicalError):
    pass


class DivergentClosure(TropicalError):
    """A closure that must be finite contains a ``+inf`` entry."""


# --------------------------------------------------------------------------
# scalars


def oplus(a: float, b: float) -> float:
    return max(a, b)


def otimes(a: float, b: float) -> float:
    # -inf stays absorbing even against +inf
    if a == ZERO or b == ZERO:
        return ZERO
    return a + b


def inverse(a: float) -> float:
    if not np.isfinite(a):
        raise TropicalError(f"{a} has no max-plus inverse")
    return -a


def _otimes_arr(a, b):
    """Broadcast ``a + b`` with -inf absorbing over +inf."""
    with np.errstate(invalid="ignore"):
        out = np.add(a, b)
    out[np.isnan(out)] = ZERO
    return out


def is_integral(values) -> bool:
    v = np.asarray(values, dtype=float)
    fin = v[np.isfinite(v)]
    return bool(np.all(fin == np.round(fin)))


def default_tol(*arrays) -> float:
    """0 when every finite entry is an integer, else the float tolerance."""
    return 0.0 if all(is_integral(a) for a in arrays) else FLOAT_TOL


# --------------------------------------------------------------------------
# vectors and matrices


def _check_labels(labels: Sequence[str]) -> tuple[str, ...]:
    labels = tuple(str(x) for x in labels)
    if len(set(labels)) != len(labels):
        raise TropicalError("node labels must be unique")
    return labels


@dataclass(frozen=True, eq=False)
class TropicalVector:
    labels: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        labels = _check_labels(self.labels)
        values = np.array(self.values, dtype=float).reshape(-1)
        if len(values) != len(labels):
            raise DimensionMismatch(f"{len(values)} values for {len(labels)} labels")
        values.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "values", values)

    @classmethod
    def zero(cls, labels: Sequence[str]) -> "TropicalVector":
        return cls(tuple(labels), np.full(len(labels), ZERO))

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, label: str) -> float:
        return float(self.values[self.labels.index(str(label))])

    def __eq__(self, other) -> bool:
        if not isinstance(other, TropicalVector):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((self.labels, self.values.tobytes()))

    def as_dict(self) -> dict[str, float]:
        return {k: float(v) for k, v in zip(self.labels, self.values)}

    def shift(self, alpha: float) -> "TropicalVector":
        """Max-plus scalar multiple ``alpha ⊙ self``."""
        return TropicalVector(self.labels, _otimes_arr(self.values, alpha))

    def allclose(self, other: "TropicalVector", tol: float = FLOAT_TOL) -> bool:
        return self.labels == other.labels and arrays_close(self.values, other.values, tol)

    def __repr__(self) -> str:
        return f"TropicalVector({self.as_dict()})"


def arrays_close(a, b, tol: float = 0.0) -> bool:
    """Entrywise equality of extended-real arrays up to an absolute tolerance."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        return False
    inf_a, inf_b = ~np.isfinite(a), ~np.isfinite(b)
    if not np.array_equal(inf_a, inf_b) or not np.array_equal(a[inf_a], b[inf_b]):
        return False
    return bool(np.all(np.abs(a[~inf_a] - b[~inf_b]) <= tol))


@dataclass(frozen=True, eq=False)
class TropicalMatrix:
    """Square max-plus kernel over an ordered list of node labels.

    Storage is a dense array (absent arcs = -inf) when the arc fill exceeds
    25%, else a CSR matrix whose stored entries are exactly the arcs.
    """

    labels: tuple[str, ...]
    _dense: np.ndarray | None = field(default=None, repr=False)
    _csr: sp.csr_matrix | None = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "labels", _check_labels(self.labels))

    # -- construction
    @classmethod
    def from_dense(cls, values, labels: Sequence[str] | None = None, *, allow_posinf=False):
        arr = np.array(values, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DimensionMismatch(f"matrix must be square, got shape {arr.shape}")
        if np.isnan(arr).any():
            raise TropicalError("NaN entry")
        if not allow_posinf and np.isposinf(arr).any():
            raise TropicalError("+inf entries only arise from closures")
        n = arr.shape[0]
        labels = tuple(str(i) for i in range(n)) if labels is None else tuple(labels)
        if len(labels) != n:
            raise DimensionMismatch(f"{len(labels)} labels for a {n}x{n} matrix")
        nnz = int(np.count_nonzero(arr > ZERO))
        if n and nnz > DENSE_FILL * n * n:
            arr.setflags(write=False)
            return cls(labels, _dense=arr)
        rows, cols = np.nonzero(arr > ZERO)
        csr = sp.csr_matrix((arr[rows, cols], (rows, cols)), shape=(n, n))
        return cls(labels, _csr=csr)

    @classmethod
    def from_arcs(cls, labels: Sequence[str], arcs: Iterable[tuple[str, str, float]]):
        """Build from ``(src, dst, weight)`` triples; later duplicates win."""
        labels = _check_labels(labels)
        index = {x: i for i, x in enumerate(labels)}
        entries: dict[tuple[int, int], float] = {}
        for s, d, w in arcs:
            w = float(w)
            if np.isposinf(w) or np.isnan(w):
                raise TropicalError(f"invalid weight {w} on arc {s}->{d}")
            if w == ZERO:
                continue
            entries[(index[str(s)], index[str(d)])] = w
        n = len(labels)
        if n and len(entries) > DENSE_FILL * n * n:
            arr = np.full((n, n), ZERO)
            for (i, j), w in entries.items():
                arr[i, j] = w
            arr.setflags(write=False)
            return cls(labels, _dense=arr)
        if entries:
            (rows, cols), data = zip(*entries.keys()), list(entries.values())
        else:
            rows, cols, data = (), (), ()
        csr = sp.csr_matrix((np.asarray(data, float), (np.asarray(rows, int), np.asarray(cols, int))), shape=(n, n))
        return cls(labels, _csr=csr)

    @classmethod
    def identity(cls, labels: Sequence[str]):
        n = len(labels)
        arr = np.full((n, n), ZERO)
        np.fill_diagonal(arr, ONE)
        return cls.from_dense(arr, labels)

    # -- access
    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def is_sparse(self) -> bool:
        return self._csr is not None

    def index(self, label) -> int:
        return self.labels.index(str(label))

    def dense(self) -> np.ndarray:
        if self._dense is not None:
            return self._dense.copy()
        arr = np.full((self.n, self.n), ZERO)
        coo = self._csr.tocoo()
        arr[coo.row, coo.col] = coo.data
        return arr

    def csr(self) -> sp.csr_matrix:
        """CSR view whose stored entries are the arcs (explicit zeros included)."""
        if self._csr is not None:
            return self._csr.copy()
        rows, cols = np.nonzero(self._dense > ZERO)
        return sp.csr_matrix((self._dense[rows, cols], (rows, cols)), shape=(self.n, self.n))

    def arcs(self) -> Iterator[tuple[str, str, float]]:
        if self._dense is not None:
            rows, cols = np.nonzero(self._dense > ZERO)
            data = self._dense[rows, cols]
        else:
            coo = self._csr.tocoo()
            order = np.lexsort((coo.col, coo.row))
            rows, cols, data = coo.row[order], coo.col[order], coo.data[order]
        for i, j, w in zip(rows, cols, data):
            yield self.labels[i], self.labels[j], float(w)

    def entry(self, i, j) -> float:
        a, b = self.index(i), self.index(j)
        if self._dense is not None:
            return float(self._dense[a, b])
        row = self._csr.getrow(a)
        hit = np.nonzero(row.indices == b)[0]
        return float(row.data[hit[0]]) if len(hit) else ZERO

    @property
    def is_integral(self) -> bool:
        if self._dense is not None:
            return is_integral(self._dense)
        return is_integral(self._csr.data)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TropicalMatrix):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.dense(), other.dense())

    def __hash__(self):
        return hash((self.labels, self.dense().tobytes()))

    def allclose(self, other: "TropicalMatrix", tol: float = FLOAT_TOL) -> bool:
        return self.labels == other.labels and arrays_close(self.dense(), other.dense(), tol)

    def shifted(self, alpha: float) -> "TropicalMatrix":
        """``alpha ⊙ A``: add ``alpha`` to every arc."""
        return TropicalMatrix.from_dense(_otimes_arr(self.dense(), alpha), self.labels)

    def __repr__(self) -> str:
        kind = "sparse" if self.is_sparse else "dense"
        return f"TropicalMatrix(n={self.n}, {kind}, labels={list(self.labels)[:6]}{'...' if self.n > 6 else ''})"


def _closure_matrix(values, labels) -> TropicalMatrix:
    return TropicalMatrix.from_dense(values, labels, allow_posinf=True)


# --------------------------------------------------------------------------
# products


def _maxplus_product(a: np.ndarray, b: np.ndarray, chunk: int = 64) -> np.ndarray:
    out = np.empty((a.shape[0], b.shape[1]))
    for start in range(0, a.shape[0], chunk):
        block = _otimes_arr(a[start:start + chunk, :, None], b[None, :, :])
        out[start:start + chunk] = block.max(axis=1) if a.shape[1] else ZERO
    return out


def mat_mul(A: TropicalMatrix, B: TropicalMatrix) -> TropicalMatrix:
    if A.labels != B.labels:
        raise DimensionMismatch("mat_mul needs identical label order")
    return _closure_matrix(_maxplus_product(A.dense(), B.dense()), A.labels)


def mat_vec(A: TropicalMatrix, u) -> TropicalVector:
    values = _values_for(A, u)
    if A.n == 0:
        return TropicalVector((), np.empty(0))
    res = _otimes_arr(A.dense(), values[None, :]).max(axis=1)
    return TropicalVector(A.labels, res)


def vec_mat(pi, A: TropicalMatrix) -> TropicalVector:
    """Row vector times matrix, ``(πA)_j = max_i π_i + A_ij``."""
    values = _values_for(A, pi)
    if A.n == 0:
        return TropicalVector((), np.empty(0))
    return TropicalVector(A.labels, _otimes_arr(values[:, None], A.dense()).max(axis=0))


def _values_for(A: TropicalMatrix, u) -> np.ndarray:
    if isinstance(u, TropicalVector):
        if u.labels != A.labels:
            raise DimensionMismatch("vector labels differ from matrix labels")
        return u.values
    values = np.asarray(u, dtype=float).reshape(-1)
    if len(values) != A.n:
        raise DimensionMismatch(f"vector of length {len(values)} for n={A.n}")
    return values


# --------------------------------------------------------------------------
# closures


def _plus_closure_array(W: np.ndarray, tol: float) -> np.ndarray:
    """Floyd-Warshall over (max, +), then +inf wherever a positive circuit is passed."""
    D = W.astype(float).copy()
    n = D.shape[0]
    for k in range(n):
        cand = _otimes_arr(D[:, k, None], D[None, k, :])
        np.fmax(D, cand, out=D)
    positive = np.diag(D) > tol
    if positive.any():
        reach = (D > ZERO) | np.eye(n, dtype=bool)
        through = (reach[:, positive].astype(np.int64) @ reach[positive, :].astype(np.int64)) > 0
        D[through] = np.inf
    return D


def kleene_plus(A: TropicalMatrix, tol: float | None = None) -> TropicalMatrix:
    """``A⁺ = A ⊕ A² ⊕ ...``; entries reached through a positive circuit are +inf."""
    W = A.dense()
    tol = default_tol(W) if tol is None else tol
    return _closure_matrix(_plus_closure_array(W, tol), A.labels)


def kleene_star(A: TropicalMatrix, tol: float | None = None) -> TropicalMatrix:
    """``A* = I ⊕ A ⊕ A² ⊕ ...`` (``+inf`` where paths meet a positive circuit)."""
    W = A.dense()
    tol = default_tol(W) if tol is None else tol
    D = _plus_closure_array(W, tol)
    np.fill_diagonal(D, np.fmax(np.diag(D), ONE))
    return _closure_matrix(D, A.labels)


def star_is_finite(star: TropicalMatrix) -> bool:
    return not np.isposinf(star.dense()).any()


# --------------------------------------------------------------------------
# tensor constructions (product kernels)


def product_labels(labels1: Sequence[str], labels2: Sequence[str]) -> tuple[str, ...]:
    return tuple(f"({a},{b})" for a in labels1 for b in labels2)


def tensor_sum(A1: TropicalMatrix, A2: TropicalMatrix) -> TropicalMatrix:
    """Kernel ``A1⊗I ⊕ I⊗A2`` on the product node set, labels ``"(a,b)"``."""
    n1, n2 = A1.n, A2.n
    W1, W2 = A1.dense(), A2.dense()
    I1 = np.full((n1, n1), ZERO)
    np.fill_diagonal(I1, ONE)
    I2 = np.full((n2, n2), ZERO)
    np.fill_diagonal(I2, ONE)
    out = np.fmax(tensor_product_array(W1, I2), tensor_product_array(I1, W2))
    return TropicalMatrix.from_dense(out, product_labels(A1.labels, A2.labels))


def tensor_product_array(M1: np.ndarray, M2: np.ndarray) -> np.ndarray:
    """Max-plus Kronecker product: ``(M1⊗M2)[(i1,i2),(j1,j2)] = M1[i1,j1] + M2[i2,j2]``."""
    n1, m1 = M1.shape
    n2, m2 = M2.shape
    out = _otimes_arr(M1[:, None, :, None], M2[None, :, None, :])
    return out.reshape(n1 * n2, m1 * m2)


def tensor_product(M1: TropicalMatrix, M2: TropicalMatrix) -> TropicalMatrix:
    return _closure_matrix(
        tensor_product_array(M1.dense(), M2.dense()), product_labels(M1.labels, M2.labels)
    )


def tensor_row(pi1: TropicalVector, pi2: TropicalVector) -> TropicalVector:
    values = _otimes_arr(pi1.values[:, None], pi2.values[None, :]).reshape(-1)
    return TropicalVector(product_labels(pi1.labels, pi2.labels), values)
