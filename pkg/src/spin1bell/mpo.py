"""Matrix product operators: XXZ chain with single-ion anisotropy, AKLT, and
the two-point Bell operator.

Site tensors have legs ``(wL, p_out, p_in, wR)``.  Hamiltonian MPOs use the
upper-triangular convention: channel 0 means "nothing placed yet" and the
last channel means "all terms completed", so the boundary vectors are the
unit vectors e_0 (left) and e_{w-1} (right).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .spin_algebra import BellOperatorSpec, lowering_operators, spin1_ladder, spin1_sz


@dataclass(frozen=True)
class MPOperator:
    tensors: list
    left: np.ndarray
    right: np.ndarray
    name: str = ""
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        ws = [np.asarray(w) for w in self.tensors]
        for i, w in enumerate(ws):
            if w.ndim != 4:
                raise ValueError(f"MPO tensor {i} must have 4 legs, got shape {w.shape}")
        object.__setattr__(self, "tensors", ws)
        object.__setattr__(self, "left", np.asarray(self.left))
        object.__setattr__(self, "right", np.asarray(self.right))

    @property
    def d(self) -> int:
        return self.tensors[0].shape[1]

    @property
    def bond_dims(self) -> list[int]:
        return [w.shape[3] for w in self.tensors]

    @property
    def left_index(self) -> int:
        """Channel carrying the identity from the left (for unit-vector boundaries)."""
        return int(np.argmax(np.abs(self.left)))

    @property
    def right_index(self) -> int:
        return int(np.argmax(np.abs(self.right)))

    def site(self, i: int) -> np.ndarray:
        return self.tensors[i % len(self.tensors)]

    def densify(self, n_sites: int | None = None) -> np.ndarray:
        """Dense d^N x d^N matrix of the MPO on N sites (tensors repeat periodically).

        Site 0 is the most significant factor of the row index.
        """
        n = len(self.tensors) if n_sites is None else n_sites
        acc = np.tensordot(self.left, self.site(0), axes=(0, 0))  # out in wR
        acc = acc.transpose(2, 0, 1)  # w, rows, cols
        for i in range(1, n):
            W = self.site(i)
            t = np.tensordot(acc, W, axes=(0, 0))  # rows cols out in wR
            t = t.transpose(4, 0, 2, 1, 3)
            sh = t.shape
            acc = t.reshape(sh[0], sh[1] * sh[2], sh[3] * sh[4])
        return np.tensordot(self.right, acc, axes=(0, 0))


def nearest_neighbor_mpo(h_bond: np.ndarray, h_site: np.ndarray | None = None,
                         d: int = 3, tol: float = 1e-12, name: str = "") -> MPOperator:
    """Translation-invariant MPO for sum_j h_{j,j+1} + sum_j h_j.

    The bond term is split by an operator Schmidt decomposition, so the MPO
    bond dimension is 2 + rank.
    """
    h = np.asarray(h_bond).reshape(d, d, d, d)  # out1 out2 in1 in2
    M = h.transpose(0, 2, 1, 3).reshape(d * d, d * d)
    U, S, Vh = np.linalg.svd(M)
    k = int(np.count_nonzero(S > tol * max(S[0], 1.0)))
    left_ops = [(U[:, i] * np.sqrt(S[i])).reshape(d, d) for i in range(k)]
    right_ops = [(Vh[i] * np.sqrt(S[i])).reshape(d, d) for i in range(k)]
    w = k + 2
    dtype = np.result_type(h.dtype, float)
    W = np.zeros((w, d, d, w), dtype=dtype)
    eye = np.eye(d)
    W[0, :, :, 0] = eye
    W[w - 1, :, :, w - 1] = eye
    for i in range(k):
        W[0, :, :, i + 1] = left_ops[i]
        W[i + 1, :, :, w - 1] = right_ops[i]
    if h_site is not None:
        W[0, :, :, w - 1] = h_site
    if np.isrealobj(h_bond) and (h_site is None or np.isrealobj(h_site)):
        W = W.real
    e0, ew = np.zeros(w), np.zeros(w)
    e0[0], ew[-1] = 1.0, 1.0
    return MPOperator([W, W], e0, ew, name=name)


def xxz_d_hamiltonian_mpo(J: float = 1.0, Jz: float = 1.0, D: float = 0.0) -> MPOperator:
    """sum_j J (Sx Sx + Sy Sy + Jz Sz Sz) + D sum_j (Sz)^2 with bond dimension 5.

    Sx Sx + Sy Sy is written as (S+ S- + S- S+)/2 so the MPO stays real.
    """
    sp, sm = spin1_ladder()
    sz = spin1_sz()
    eye = np.eye(3)
    W = np.zeros((5, 3, 3, 5))
    W[0, :, :, 0] = eye
    W[0, :, :, 1] = sp
    W[0, :, :, 2] = sm
    W[0, :, :, 3] = sz
    W[0, :, :, 4] = D * sz @ sz
    W[1, :, :, 4] = 0.5 * J * sm
    W[2, :, :, 4] = 0.5 * J * sp
    W[3, :, :, 4] = J * Jz * sz
    W[4, :, :, 4] = eye
    e0, e4 = np.zeros(5), np.zeros(5)
    e0[0], e4[4] = 1.0, 1.0
    return MPOperator([W, W], e0, e4, name="xxz_d",
                      metadata={"J": J, "Jz": Jz, "D": D})


def heisenberg_bond() -> np.ndarray:
    """S_1 . S_2 as a real 9x9 matrix."""
    sp, sm = spin1_ladder()
    sz = spin1_sz()
    return np.kron(sz, sz) + 0.5 * (np.kron(sp, sm) + np.kron(sm, sp))


def xxz_bond(J: float, Jz: float) -> np.ndarray:
    sp, sm = spin1_ladder()
    sz = spin1_sz()
    return J * (0.5 * (np.kron(sp, sm) + np.kron(sm, sp)) + Jz * np.kron(sz, sz))


def aklt_bond() -> np.ndarray:
    s = heisenberg_bond()
    return s + s @ s / 3.0


def aklt_hamiltonian_mpo() -> MPOperator:
    """sum_j S_j.S_{j+1} + (1/3)(S_j.S_{j+1})^2."""
    return nearest_neighbor_mpo(aklt_bond(), name="aklt")


def bell_two_point_mpo(r: int, spec: BellOperatorSpec | None = None) -> MPOperator:
    """MPO for the Bell operator between sites 0 and r of an (r+1)-site window.

    The left end carries the row (a J, a J+, b J^2, b J^2+) with a = sqrt(2/sqrt 3),
    b = sqrt 2; the right end the matching column (a J+, a J, b J^2+, b J^2);
    a 4x4 identity links the interior sites.
    """
    if r < 1:
        raise ValueError(f"distance must be >= 1, got {r}")
    spec = spec or BellOperatorSpec()
    if spec.d != 3:
        raise ValueError(f"Bell MPO is only supported for d=3 (got d={spec.d})")
    J1, J2 = lowering_operators(3)
    a, b = np.sqrt(spec.coefficients)
    row = [a * J1, a * J1.T, b * J2, b * J2.T]
    col = [a * J1.T, a * J1, b * J2.T, b * J2]
    WL = np.zeros((1, 3, 3, 4))
    WR = np.zeros((4, 3, 3, 1))
    for m in range(4):
        WL[0, :, :, m] = row[m]
        WR[m, :, :, 0] = col[m]
    WI = np.einsum("ab,st->astb", np.eye(4), np.eye(3))
    tensors = [WL] + [WI] * (r - 1) + [WR]
    return MPOperator(tensors, np.ones(1), np.ones(1), name=f"bell_r{r}", metadata={"r": r})
