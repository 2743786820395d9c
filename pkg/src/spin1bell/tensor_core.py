"""Dense tensors, pairwise contraction and the two factorizations used everywhere.

The engine itself works on plain ``numpy`` arrays for speed; every function
here accepts either a :class:`DenseTensor` or an ``ndarray`` and returns the
same kind it was given.  Real inputs stay real (the Hamiltonians in this
package are real); complex inputs are handled by the same code path.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
import scipy.linalg

#: values closer than this are treated as one multiplet during truncation
DEGENERACY_TOL = 1e-10


@dataclass(frozen=True)
class DenseTensor:
    """Immutable rank-n array with optional leg labels.

    Labels are bookkeeping only; :func:`contract` always takes explicit
    index pairs.
    """

    data: np.ndarray
    labels: tuple[str, ...] | None = field(default=None)

    def __post_init__(self):
        arr = np.array(self.data, copy=True)
        if not np.issubdtype(arr.dtype, np.number):
            raise TypeError(f"tensor entries must be numeric, got {arr.dtype}")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != arr.ndim:
                raise ValueError(f"{len(labels)} labels given for a rank-{arr.ndim} tensor")
            object.__setattr__(self, "labels", labels)

    @classmethod
    def from_entries(cls, dims: Sequence[int], entries, labels=None) -> "DenseTensor":
        """Build from extents and a flat row-major entry sequence."""
        dims = tuple(int(n) for n in dims)
        if any(n <= 0 for n in dims):
            raise ValueError(f"extents must be positive, got {dims}")
        entries = np.asarray(entries)
        if entries.size != int(np.prod(dims)):
            raise ValueError(f"{entries.size} entries do not fill dims {dims}")
        return cls(entries.reshape(dims), labels)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def entries(self) -> np.ndarray:
        return self.data.reshape(-1)

    def reshape(self, dims: Sequence[int], labels=None) -> "DenseTensor":
        return DenseTensor(self.data.reshape(tuple(dims)), labels)

    def conj(self) -> "DenseTensor":
        return DenseTensor(self.data.conj(), self.labels)

    def as_matrix(self, row_legs: int) -> np.ndarray:
        """Group the first ``row_legs`` legs into rows and the rest into columns."""
        rows = int(np.prod(self.dims[:row_legs]))
        return self.data.reshape(rows, -1)


def _unwrap(t):
    if isinstance(t, DenseTensor):
        return t.data, True
    return np.asarray(t), False


def contract(a, b, pairs: Sequence[tuple[int, int]]):
    """Sum over the paired legs of ``a`` and ``b``.

    The free legs of ``a`` come first, then those of ``b``, each in their
    original order.
    """
    A, wrap_a = _unwrap(a)
    B, wrap_b = _unwrap(b)
    legs_a = [int(p[0]) for p in pairs]
    legs_b = [int(p[1]) for p in pairs]
    for la, lb in zip(legs_a, legs_b):
        if not (-A.ndim <= la < A.ndim and -B.ndim <= lb < B.ndim):
            raise ValueError(f"leg pair ({la}, {lb}) out of range for ranks {A.ndim}, {B.ndim}")
        if A.shape[la] != B.shape[lb]:
            raise ValueError(
                f"dimension mismatch on pair ({la}, {lb}): {A.shape[la]} != {B.shape[lb]}"
            )
    out = np.tensordot(A, B, axes=(legs_a, legs_b))
    if wrap_a or wrap_b:
        labels = None
        if isinstance(a, DenseTensor) and isinstance(b, DenseTensor) and a.labels and b.labels:
            na = {la % A.ndim for la in legs_a}
            nb = {lb % B.ndim for lb in legs_b}
            labels = tuple(l for i, l in enumerate(a.labels) if i not in na) + tuple(
                l for i, l in enumerate(b.labels) if i not in nb
            )
        return DenseTensor(out, labels)
    return out


class SVDResult(NamedTuple):
    U: np.ndarray
    S: np.ndarray
    Vh: np.ndarray
    truncation_error: float


def _fix_gauge(U, Vh):
    # largest-magnitude entry of each left vector made real positive
    idx = np.argmax(np.abs(U), axis=0)
    cols = np.arange(U.shape[1])
    piv = U[idx, cols]
    phase = piv / np.abs(piv)
    phase[~np.isfinite(phase)] = 1.0
    U = U * phase.conj()[None, :]
    Vh = Vh * phase[:, None]
    if np.isrealobj(U):
        U, Vh = U.real, Vh.real
    return U, Vh


def _multiplet_safe_cut(S, keep, tol):
    """Move ``keep`` down to the nearest multiplet boundary."""
    if keep >= len(S):
        return keep
    k = keep
    while k > 0 and S[k - 1] - S[k] <= tol:
        k -= 1
    # the leading multiplet alone exceeds the budget: cut it anyway
    return k if k > 0 else keep


def svd_truncate(t, chi_max: int, cutoff: float = 0.0, row_legs: int | None = None,
                 degeneracy_tol: float = DEGENERACY_TOL) -> SVDResult:
    """Truncated SVD ``t ~ U @ diag(S) @ Vh`` with a deterministic gauge.

    Keeps ``min(chi_max, #{S_i >= cutoff})`` singular values but never splits
    a multiplet of values equal within ``degeneracy_tol``.  ``S`` is not
    renormalized.  For tensors of rank > 2 the first ``row_legs`` legs form
    the rows; ``U`` and ``Vh`` are returned as matrices.
    """
    M, _ = _unwrap(t)
    if M.ndim != 2:
        if row_legs is None:
            raise ValueError("row_legs is required for tensors of rank != 2")
        M = M.reshape(int(np.prod(M.shape[:row_legs])), -1)
    if chi_max < 1:
        raise ValueError(f"chi_max must be >= 1, got {chi_max}")
    if not np.all(np.isfinite(M)):
        raise ValueError("svd_truncate: input contains non-finite entries")
    try:
        U, S, Vh = scipy.linalg.svd(M, full_matrices=False, lapack_driver="gesdd")
    except np.linalg.LinAlgError:
        U, S, Vh = scipy.linalg.svd(M, full_matrices=False, lapack_driver="gesvd")
    keep = int(np.count_nonzero(S >= cutoff))
    keep = max(1, min(chi_max, keep))
    keep = _multiplet_safe_cut(S, keep, degeneracy_tol)
    err = float(np.sum(S[keep:] ** 2))
    U, Vh = _fix_gauge(U[:, :keep], Vh[:keep, :])
    return SVDResult(U, S[:keep].copy(), Vh, err)


def eigh_smallest(h, herm_tol: float = 1e-10) -> tuple[float, np.ndarray]:
    """Lowest eigenpair of a dense Hermitian matrix.

    The eigenvector's largest-magnitude component is made real positive.
    """
    H, _ = _unwrap(h)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {H.shape}")
    dev = np.max(np.abs(H - H.conj().T)) if H.size else 0.0
    if dev > herm_tol:
        raise ValueError(f"matrix is not Hermitian (max deviation {dev:.3e})")
    w, v = scipy.linalg.eigh(H, subset_by_index=[0, 0])
    vec = v[:, 0]
    piv = vec[np.argmax(np.abs(vec))]
    vec = vec * (np.abs(piv) / piv)
    if np.isrealobj(H):
        vec = vec.real
    return float(w[0]), vec
