"""Exact diagonalization of finite spin-1 chains (N <= 12).

Used only as an independent reference for the tensor-network code.  Basis
ordering is site-major with site 0 most significant, and the local order
|+>, |0>, |-> <-> 0, 1, 2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg

from .imps import CanonicalIMPS, canonicalize
from .mpo import aklt_bond, xxz_bond
from .spin_algebra import bell_operator_dense, spin1_ladder, spin1_sz, string_phase

MAX_SITES = 12
DENSE_LIMIT = 729


@dataclass(frozen=True)
class FiniteChainSpec:
    N: int
    boundary: str = "open"
    Jz: float = 1.0
    D: float = 0.0
    J: float = 1.0
    model: str = "xxz"

    def __post_init__(self):
        if not 2 <= self.N <= MAX_SITES:
            raise ValueError(f"N must be in [2, {MAX_SITES}], got {self.N}")
        if self.boundary not in ("open", "periodic"):
            raise ValueError(f"boundary must be 'open' or 'periodic', got {self.boundary!r}")
        if self.model not in ("xxz", "aklt"):
            raise ValueError(f"unknown model {self.model!r}")
        if self.boundary == "periodic" and self.N < 3:
            raise ValueError("periodic chains need N >= 3")

    @property
    def dim(self) -> int:
        return 3**self.N


def _embed(op, site, n):
    """op acting on ``site`` (and following sites if op spans several) of an n-site chain."""
    k = int(round(np.log(op.shape[0]) / np.log(3)))
    left = sp.identity(3**site, format="csr")
    right = sp.identity(3 ** (n - site - k), format="csr")
    return sp.kron(sp.kron(left, sp.csr_matrix(op)), right, format="csr")


def _wrap_bond(bond, n):
    """Two-site operator on sites (n-1, 0) of a ring."""
    terms = []
    b = bond.reshape(3, 3, 3, 3)
    # operator Schmidt split so each factor can be placed separately
    M = b.transpose(0, 2, 1, 3).reshape(9, 9)
    U, S, Vh = np.linalg.svd(M)
    for i in np.nonzero(S > 1e-14)[0]:
        L = (U[:, i] * S[i]).reshape(3, 3)
        R = Vh[i].reshape(3, 3)
        terms.append(_embed(R, 0, n) @ _embed(L, n - 1, n))
    return sum(terms)


def hamiltonian(spec: FiniteChainSpec) -> sp.csr_matrix:
    """Sparse Hamiltonian matrix of the finite chain."""
    n = spec.N
    if spec.model == "aklt":
        bond, onsite = aklt_bond(), None
    else:
        bond = xxz_bond(spec.J, spec.Jz)
        sz = spin1_sz()
        onsite = spec.D * sz @ sz
    H = sp.csr_matrix((3**n, 3**n))
    for j in range(n - 1):
        H = H + _embed(bond, j, n)
    if spec.boundary == "periodic":
        H = H + _wrap_bond(bond, n)
    if onsite is not None and spec.D != 0.0:
        for j in range(n):
            H = H + _embed(onsite, j, n)
    return H.tocsr()


def ed_ground_state(spec: FiniteChainSpec, tol: float = 1e-12) -> tuple[float, np.ndarray]:
    """Lowest eigenpair; dense solve for small spaces, ARPACK Lanczos otherwise."""
    H = hamiltonian(spec)
    if spec.dim <= DENSE_LIMIT:
        w, v = scipy.linalg.eigh(H.toarray(), subset_by_index=[0, 0])
        e, psi = float(w[0]), v[:, 0]
    else:
        v0 = np.ones(spec.dim) / np.sqrt(spec.dim)
        w, v = scipy.sparse.linalg.eigsh(H, k=1, which="SA", v0=v0, tol=tol, ncv=40)
        e, psi = float(w[0]), v[:, 0]
    psi = psi / np.linalg.norm(psi)
    psi = psi * np.sign(psi[np.argmax(np.abs(psi))])
    res = np.linalg.norm(H @ psi - e * psi)
    if res > 1e-9:
        raise RuntimeError(f"ground state residual {res:.2e} above 1e-9")
    return e, psi


def _apply(psi, op, site, n):
    t = psi.reshape((3,) * n)
    t = np.tensordot(op, t, axes=(1, site))
    return np.moveaxis(t, 0, site).reshape(-1)


def expectation_product(psi, ops: dict, n: int) -> complex:
    """<psi| prod_site ops[site] |psi> for single-site operators on distinct sites."""
    phi = psi
    for site, op in ops.items():
        if not 0 <= site < n:
            raise ValueError(f"site {site} outside chain of {n}")
        phi = _apply(phi, op, site, n)
    return complex(np.vdot(psi, phi))


def ed_two_point(psi, n, i, j, op_i, op_j) -> complex:
    if i == j:
        raise ValueError("two-point function needs distinct sites")
    return expectation_product(psi, {i: op_i, j: op_j}, n)


def ed_c1(psi, n, i, j) -> float:
    sp_, sm = spin1_ladder()
    val = 0.5 * (ed_two_point(psi, n, i, j, sp_, sm) + ed_two_point(psi, n, i, j, sm, sp_))
    return float(val.real)


def ed_c2(psi, n, i, j) -> float:
    sp_, sm = spin1_ladder()
    sp2, sm2 = sp_ @ sp_, sm @ sm
    val = 0.5 * (ed_two_point(psi, n, i, j, sp2, sm2) + ed_two_point(psi, n, i, j, sm2, sp2))
    return float(val.real)


def ed_bell(psi, n, i, j) -> float:
    """<B_ij> with the dense 9x9 Bell operator placed on sites i < j."""
    if not 0 <= i < j < n:
        raise ValueError(f"need 0 <= i < j < {n}, got ({i}, {j})")
    B = bell_operator_dense().reshape(3, 3, 3, 3)
    t = psi.reshape((3,) * n)
    bt = np.tensordot(B, t, axes=([2, 3], [i, j]))
    bt = np.moveaxis(bt, [0, 1], [i, j])
    return float(np.vdot(t, bt).real)


def ed_string_order(psi, n, i, j) -> float:
    if not 0 <= i < j < n or j - i < 2:
        raise ValueError(f"string order needs 0 <= i, i+2 <= j < {n}")
    sz = spin1_sz()
    ops = {i: sz, j: sz}
    for l in range(i + 1, j):
        ops[l] = string_phase()
    return float(expectation_product(psi, ops, n).real)


@dataclass(frozen=True)
class EDObservables:
    c1: float
    c2: float
    bell: float
    string_order: float | None


def ed_observables(spec: FiniteChainSpec, psi: np.ndarray, i: int, j: int) -> EDObservables:
    n = spec.N
    so = ed_string_order(psi, n, i, j) if j - i >= 2 else None
    return EDObservables(ed_c1(psi, n, i, j), ed_c2(psi, n, i, j), ed_bell(psi, n, i, j), so)


def aklt_exact_imps() -> CanonicalIMPS:
    """The bond-dimension-2 AKLT state, regauged into canonical form.

    Starts from the valence-bond tensors A^+ = sqrt(2/3) sigma^+,
    A^0 = -sqrt(1/3) sigma^z, A^- = -sqrt(2/3) sigma^-.
    """
    sig_p = np.array([[0.0, 1.0], [0.0, 0.0]])
    sig_z = np.diag([1.0, -1.0])
    A = np.stack([np.sqrt(2 / 3) * sig_p, -np.sqrt(1 / 3) * sig_z,
                  -np.sqrt(2 / 3) * sig_p.T], axis=1)  # (left, s, right)
    lam = np.full(2, 1 / np.sqrt(2))
    return canonicalize(A, lam, A, lam, tol=1e-13)
