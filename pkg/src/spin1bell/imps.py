"""Two-site-unit-cell infinite MPS in Vidal's Gamma-Lambda form.

Layout of one unit cell::

    ... lambda_B | Gamma_A | lambda_A | Gamma_B | lambda_B | Gamma_A ...

``lambda_A`` sits on the bond to the right of site A, ``lambda_B`` on the bond
to the right of site B (equivalently left of the next A).  Gamma tensors carry
legs ``(vL, p, vR)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg
import scipy.sparse.linalg

SCHMIDT_FLOOR = 1e-12
CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class SchmidtSpectrum:
    values: np.ndarray
    bond: str = "A"

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if np.any(v < 0):
            raise ValueError("Schmidt values must be nonnegative")
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class CanonicalIMPS:
    gamma_A: np.ndarray
    gamma_B: np.ndarray
    lambda_A: np.ndarray
    lambda_B: np.ndarray

    def __post_init__(self):
        gA, gB = np.asarray(self.gamma_A), np.asarray(self.gamma_B)
        lA = np.asarray(self.lambda_A, dtype=float)
        lB = np.asarray(self.lambda_B, dtype=float)
        if gA.ndim != 3 or gB.ndim != 3:
            raise ValueError("Gamma tensors must have legs (vL, p, vR)")
        if gA.shape[1] != gB.shape[1]:
            raise ValueError("both sites must share the physical dimension")
        if not (gA.shape[2] == len(lA) == gB.shape[0] and gB.shape[2] == len(lB) == gA.shape[0]):
            raise ValueError(
                f"bond mismatch: Gamma_A {gA.shape}, lambda_A {lA.shape}, "
                f"Gamma_B {gB.shape}, lambda_B {lB.shape}"
            )
        for name, val in (("gamma_A", gA), ("gamma_B", gB), ("lambda_A", lA), ("lambda_B", lB)):
            val = val.copy()
            val.setflags(write=False)
            object.__setattr__(self, name, val)

    @property
    def d(self) -> int:
        return self.gamma_A.shape[1]

    @property
    def chi(self) -> int:
        return max(len(self.lambda_A), len(self.lambda_B))

    def spectrum(self, bond: str = "A") -> SchmidtSpectrum:
        return SchmidtSpectrum(self.lambda_A if bond == "A" else self.lambda_B, bond)

    def right_tensors(self) -> tuple[np.ndarray, np.ndarray]:
        """B_X = Gamma_X lambda_X (right-canonical when the state is canonical)."""
        return (self.gamma_A * self.lambda_A[None, None, :],
                self.gamma_B * self.lambda_B[None, None, :])

    def left_tensors(self) -> tuple[np.ndarray, np.ndarray]:
        """A_X = lambda_left Gamma_X (left-canonical when the state is canonical)."""
        return (self.lambda_B[:, None, None] * self.gamma_A,
                self.lambda_A[:, None, None] * self.gamma_B)

    def shifted(self) -> "CanonicalIMPS":
        """Same state described with B as the first site of the cell."""
        return CanonicalIMPS(self.gamma_B, self.gamma_A, self.lambda_B, self.lambda_A)

    def apply_site_unitary(self, u: np.ndarray) -> "CanonicalIMPS":
        """Apply the same one-site unitary to every site (canonical form is preserved)."""
        gA = np.einsum("ts,asb->atb", u, self.gamma_A)
        gB = np.einsum("ts,asb->atb", u, self.gamma_B)
        return CanonicalIMPS(gA, gB, self.lambda_A, self.lambda_B)


def product_state(d: int, local_vector) -> CanonicalIMPS:
    """Translation-invariant product state with bond dimension 1."""
    v = np.asarray(local_vector)
    if v.shape != (d,):
        raise ValueError(f"local vector must have {d} entries, got shape {v.shape}")
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise ValueError("local vector must be nonzero")
    if abs(nrm - 1.0) > 1e-10:
        raise ValueError(f"local vector must be normalized (norm {nrm})")
    g = v.reshape(1, d, 1)
    one = np.ones(1)
    return CanonicalIMPS(g, g, one, one)


def two_site_product_state(va, vb) -> CanonicalIMPS:
    va = np.asarray(va) / np.linalg.norm(va)
    vb = np.asarray(vb) / np.linalg.norm(vb)
    one = np.ones(1)
    return CanonicalIMPS(va.reshape(1, -1, 1), vb.reshape(1, -1, 1), one, one)


def entanglement_entropy(spectrum) -> float:
    """Von Neumann entropy -sum lambda^2 ln lambda^2 (natural log)."""
    lam = spectrum.values if isinstance(spectrum, SchmidtSpectrum) else np.asarray(spectrum)
    p = lam[lam > 0] ** 2
    return float(-np.sum(p * np.log(p)))


def regularized_inverse(spectrum, floor: float = SCHMIDT_FLOOR) -> np.ndarray:
    """Elementwise 1/lambda where lambda >= floor, 0 elsewhere."""
    if floor <= 0:
        raise ValueError("floor must be positive")
    lam = spectrum.values if isinstance(spectrum, SchmidtSpectrum) else np.asarray(spectrum, float)
    out = np.zeros_like(lam)
    ok = lam >= floor
    out[ok] = 1.0 / lam[ok]
    return out


# kept under the operation's full name as well
apply_gauge_regularized_inverse = regularized_inverse


@dataclass(frozen=True)
class CanonicalReport:
    norm_deviation: float
    right_deviation: float
    left_deviation: float
    tol: float

    @property
    def max_deviation(self) -> float:
        return max(self.norm_deviation, self.right_deviation, self.left_deviation)

    @property
    def ok(self) -> bool:
        return self.max_deviation <= self.tol


def _right_condition(gamma, lam_right):
    # sum_s Gamma_s Lambda^2 Gamma_s^dagger
    B = gamma * lam_right[None, None, :]
    return np.tensordot(B, B.conj(), axes=([1, 2], [1, 2]))


def _left_condition(gamma, lam_left):
    A = lam_left[:, None, None] * gamma
    return np.tensordot(A.conj(), A, axes=([0, 1], [0, 1]))


def check_canonical(state: CanonicalIMPS, tol: float = 1e-8) -> CanonicalReport:
    """Max deviation of the Schmidt normalization and both orthogonality conditions."""
    norm_dev = max(abs(np.sum(state.lambda_A**2) - 1), abs(np.sum(state.lambda_B**2) - 1))
    right = left = 0.0
    for g, lr, ll in ((state.gamma_A, state.lambda_A, state.lambda_B),
                      (state.gamma_B, state.lambda_B, state.lambda_A)):
        r = _right_condition(g, lr)
        l = _left_condition(g, ll)
        right = max(right, np.max(np.abs(r - np.eye(r.shape[0]))))
        left = max(left, np.max(np.abs(l - np.eye(l.shape[0]))))
    return CanonicalReport(float(norm_dev), float(right), float(left), tol)


def _dominant_fixed_point(cell, side, tol=1e-14):
    """Dominant eigenpair of the cell transfer map acting from ``side``.

    ``cell`` has legs (vL, p, vR).  Returns (eigenvalue, Hermitian PSD matrix).
    """
    chi = cell.shape[0]
    conj = cell.conj()

    if side == "right":
        def apply(x):
            X = x.reshape(chi, chi)
            t = np.tensordot(cell, X, axes=(2, 0))  # vL p vR'
            return np.tensordot(t, conj, axes=([1, 2], [1, 2])).reshape(-1)
    else:
        def apply(x):
            X = x.reshape(chi, chi)
            t = np.tensordot(X, cell, axes=(1, 0))  # vL'* p vR
            return np.tensordot(conj, t, axes=([0, 1], [0, 1])).reshape(-1)

    dtype = np.result_type(cell.dtype, float)
    v0 = np.eye(chi, dtype=dtype).reshape(-1)
    if chi * chi <= 64:
        T = np.column_stack([apply(e) for e in np.eye(chi * chi, dtype=dtype)])
        w, v = np.linalg.eig(T)
        k = int(np.argmax(np.abs(w)))
        val, vec = w[k], v[:, k]
    else:
        op = scipy.sparse.linalg.LinearOperator((chi * chi, chi * chi), matvec=apply, dtype=dtype)
        w, v = scipy.sparse.linalg.eigs(op, k=1, which="LM", v0=v0, tol=tol)
        val, vec = w[0], v[:, 0]
    X = vec.reshape(chi, chi)
    X = X / np.trace(X)  # fixes the phase so that X is Hermitian PSD
    X = 0.5 * (X + X.conj().T)
    if np.isrealobj(cell):
        X = X.real
    return float(abs(val)), X


def _sqrt_factor(X, floor):
    """X = F F^dagger restricted to eigenvalues above ``floor``; returns F and a pseudo-inverse."""
    w, U = scipy.linalg.eigh(X)
    keep = w > floor * w.max()
    s = np.sqrt(w[keep])
    F = U[:, keep] * s[None, :]
    Finv = (U[:, keep] / s[None, :]).conj().T
    return F, Finv


def canonicalize(gamma_A, lambda_A, gamma_B, lambda_B, floor: float = SCHMIDT_FLOOR,
                 chi_max: int | None = None, tol: float = 1e-10,
                 max_passes: int = 4) -> CanonicalIMPS:
    """Bring an arbitrary two-site iMPS into canonical Gamma-Lambda form.

    The cell tensor Gamma_A lambda_A Gamma_B lambda_B is rescaled so its transfer
    matrix has unit spectral radius, then regauged with the square roots of the
    dominant left/right fixed points.  Schmidt values below ``floor`` are dropped.

    When a fixed point is rank deficient (transient directions that die out in
    the infinite chain) one pass only projects them away; the pass is then
    repeated until the result is canonical to ``tol``.
    """
    state = _canonical_pass(gamma_A, lambda_A, gamma_B, lambda_B, floor, chi_max)
    for _ in range(max_passes - 1):
        if check_canonical(state, tol).ok:
            return state
        state = _canonical_pass(state.gamma_A, state.lambda_A, state.gamma_B,
                                state.lambda_B, floor, chi_max)
    if check_canonical(state, tol).ok:
        return state
    # Fixed points with eigenvalues near machine precision (tiny Schmidt values)
    # cannot be square-rooted accurately; polish with bond SVD sweeps instead.
    best = state
    for start in (state, (gamma_A, lambda_A, gamma_B, lambda_B)):
        if not isinstance(start, CanonicalIMPS):
            try:
                start = _normalized_start(*start)
            except ValueError:
                continue
        cand = _svd_sweeps(start, floor, chi_max, tol)
        if check_canonical(cand, tol).max_deviation < check_canonical(best, tol).max_deviation:
            best = cand
        if check_canonical(best, tol).ok:
            break
    return best


def _cell_transfer(BA, BB):
    """Right transfer map of the two-site cell on the bond left of site A."""
    chi = BA.shape[0]

    def apply(x):
        X = x.reshape(chi, chi)
        t = np.tensordot(BB, X, axes=(2, 0))
        X = np.tensordot(t, BB.conj(), axes=([1, 2], [1, 2]))
        t = np.tensordot(BA, X, axes=(2, 0))
        return np.tensordot(t, BA.conj(), axes=([1, 2], [1, 2])).reshape(-1)
    return apply


def unit_fixed_points(state: CanonicalIMPS, tol: float = 1e-8, k: int = 6) -> np.ndarray:
    """Fixed points of the cell transfer map with eigenvalue 1, as columns.

    A canonical state always has the identity among them; more than one means
    the tensors are not injective (a cat of symmetry-broken branches, or an
    extra decoupled factor such as entangled edge spins of the growing chain).
    """
    BA, BB = state.right_tensors()
    chi = BA.shape[0]
    n = chi * chi
    apply = _cell_transfer(BA, BB)
    dtype = np.result_type(BA.dtype, float)
    if n <= 144:
        T = np.column_stack([apply(e) for e in np.eye(n, dtype=dtype)])
        # an ordered Schur form gives an orthonormal basis of the (possibly
        # highly degenerate) unit eigenspace; eigenvectors there are ill-conditioned
        _, Z, sdim = scipy.linalg.schur(T.astype(complex), output="complex",
                                        sort=lambda z: abs(z - 1.0) < tol)
        return Z[:, :sdim]
    else:
        op = scipy.sparse.linalg.LinearOperator((n, n), matvec=apply, dtype=dtype)
        v0 = np.eye(chi, dtype=dtype).reshape(-1)
        w, v = scipy.sparse.linalg.eigs(op, k=min(k, n - 2), which="LM", v0=v0, tol=1e-12)
    return v[:, np.abs(w - 1.0) < tol]


def reduce_injective(state: CanonicalIMPS, tol: float = 1e-8, seed: int = 0,
                     site_charges=None, max_rounds: int = 4) -> CanonicalIMPS:
    """Project a non-injective canonical iMPS onto one injective component.

    Transfer-map eigenvalues within ``tol`` of 1 (besides the identity) signal
    a cat of broken-symmetry branches or a decoupled factor such as entangled
    edge spins.  A generic Hermitian element of that fixed-point space is split
    at its largest spectral gap and the heavier side is kept, repeatedly,
    until the cell is injective.  Local expectation values are unchanged when
    the fixed points are exact.  With ``site_charges`` the split respects the
    U(1) charges of the bond when they can be resolved.
    """
    rng = np.random.default_rng(seed)
    for _ in range(max_rounds):
        fixed = unit_fixed_points(state, tol)
        if fixed.shape[1] <= 1:
            return state
        state = _split_once(state, fixed, rng, site_charges)
    return state


# gaps this much smaller than the first cut are noise inside one block
SPLIT_GAP_RATIO = 1e-3


def _split_once(state, fixed, rng, site_charges):
    BA, BB = state.right_tensors()
    chi = BA.shape[0]
    Y = np.zeros((chi, chi), dtype=complex)
    for col in fixed.T:
        X = col.reshape(chi, chi)
        for H in (0.5 * (X + X.conj().T), 0.5j * (X.conj().T - X)):
            Y += rng.standard_normal() * H
    if np.isrealobj(BA):
        # the algebra of a real map is closed under conjugation
        Y = Y.real
    Y = Y - np.trace(Y) / chi * np.eye(chi)
    if site_charges is not None:
        found = bond_charges(state, site_charges)
        if found is not None:
            # drop charge-changing parts so the split keeps the charges definite
            _, Uq, labels = found
            Yq = Uq.conj().T @ Y @ Uq
            Yq = np.where(labels[:, None] == labels[None, :], Yq, 0.0)
            Y = Uq @ Yq @ Uq.conj().T
    Y = 0.5 * (Y + Y.conj().T)
    w, U = scipy.linalg.eigh(Y)
    # an eigenspace of a generic element is a minimal projection; cut at the
    # largest gap until the kept eigenvalues are degenerate on that scale
    keep = np.arange(chi)
    first_gap = None
    while len(keep) > 1:
        gaps = np.diff(w[keep])
        k = int(np.argmax(gaps))
        if first_gap is None:
            first_gap = gaps[k]
        elif gaps[k] < SPLIT_GAP_RATIO * first_gap:
            break
        groups = [keep[:k + 1], keep[k + 1:]]
        weights = [float(np.sum(np.abs(U[:, g].conj().T * state.lambda_B[None, :]) ** 2))
                   for g in groups]
        keep = groups[int(np.argmax(weights))]
    VL = U[:, keep]
    # carry the projector through site B to the bond between A and B
    P = VL @ VL.conj().T
    t = np.tensordot(BB, P, axes=(2, 0))
    Pmid = np.tensordot(t, BB.conj(), axes=([1, 2], [1, 2]))
    wm, Um = scipy.linalg.eigh(0.5 * (Pmid + Pmid.conj().T))
    VM = Um[:, wm > 0.5]
    A = np.einsum("ai,asb,bj->isj", VL.conj(), BA, VM)
    B = np.einsum("ai,asb,bj->isj", VM.conj(), BB, VL)
    return canonicalize(A, np.ones(A.shape[2]), B, np.ones(B.shape[2]))


def integer_labels(values, weights=None, tol: float = 1e-6):
    """Round charges that are integers up to a common offset.

    The offset is taken from the entry with the largest weight.  Returns None
    when the values are not integer spaced to ``tol``.
    """
    q = np.asarray(values, dtype=float)
    ref = int(np.argmax(weights)) if weights is not None else 0
    offset = q[ref] - np.round(q[ref])
    labels = np.round(q - offset)
    if q.size and np.max(np.abs(q - offset - labels)) > tol:
        return None
    return labels.astype(int)


def bond_charges(state: CanonicalIMPS, site_charges, tol: float = 1e-6):
    """Conserved-charge operator of the right half-chain on the bond left of site A.

    For a state symmetric under a U(1) generated by ``sum_i diag(site_charges)``
    the operator Q obeys Q = E_A E_B(Q) + (charge deposited by one cell) - 2m,
    with m the charge per site; it is fixed up to a constant by
    Tr(lambda_B^2 Q) = 0.  Returns (Q, eigenvectors, integer labels), or None
    when the spectrum of Q is not integer spaced (the symmetry is broken).
    """
    q = np.asarray(site_charges, dtype=float)
    BA, BB = state.right_tensors()
    chi = BA.shape[0]
    rho = state.lambda_B**2
    dtype = np.result_type(BA.dtype, float)

    def E(B, X):
        t = np.tensordot(B, X, axes=(2, 0))
        return np.tensordot(t, B.conj(), axes=([1, 2], [1, 2]))

    def deposit(B):
        return np.tensordot(B * q[None, :, None], B.conj(), axes=([1, 2], [1, 2]))

    c = deposit(BA) + E(BA, deposit(BB))
    two_m = float(np.real(np.sum(rho * np.diag(c))))
    rhs = (c - two_m * np.eye(chi)).reshape(-1)

    def apply(x):
        X = x.reshape(chi, chi)
        return (X - E(BA, E(BB, X)) + np.sum(rho * np.diag(X)) * np.eye(chi)).reshape(-1)

    n = chi * chi
    if n <= 900:
        M = np.column_stack([apply(e) for e in np.eye(n, dtype=dtype)])
        x = np.linalg.solve(M, rhs.astype(dtype))
    else:
        op = scipy.sparse.linalg.LinearOperator((n, n), matvec=apply, dtype=dtype)
        x, info = scipy.sparse.linalg.gmres(op, rhs.astype(dtype), rtol=1e-13, atol=0.0,
                                            restart=100, maxiter=200)
        if info != 0:
            return None
    Q = x.reshape(chi, chi)
    Q = 0.5 * (Q + Q.conj().T)
    if np.isrealobj(BA):
        Q = Q.real
    w, U = scipy.linalg.eigh(Q)
    weights = np.sum(np.abs(U) ** 2 * rho[:, None], axis=0)
    labels = integer_labels(w, weights, tol)
    if labels is None:
        return None
    return Q, U, labels


def _normalized_start(gA, lA, gB, lB):
    lA = np.asarray(lA, dtype=float) / np.linalg.norm(lA)
    lB = np.asarray(lB, dtype=float) / np.linalg.norm(lB)
    return CanonicalIMPS(np.asarray(gA), np.asarray(gB), lA, lB)


def _bond_update(gA, gB, lA, lB, floor, chi_max):
    """Re-split lambda_B Gamma_A lambda_A Gamma_B lambda_B by SVD.

    The new Gamma_A has lambda_B Gamma_A left-isometric and Gamma_B lambda_B
    right-isometric to machine precision.
    """
    from .tensor_core import _fix_gauge
    left = lB[:, None, None] * gA * lA[None, None, :]
    theta = np.tensordot(left, gB * lB[None, None, :], axes=(2, 0))
    chiL, d, _, chiR = theta.shape
    U, s, Vh = scipy.linalg.svd(theta.reshape(chiL * d, d * chiR), full_matrices=False)
    keep = s > floor * s[0]
    if chi_max is not None:
        keep[chi_max:] = False
    U, s, Vh = U[:, keep], s[keep], Vh[keep, :]
    U, Vh = _fix_gauge(U, Vh)
    s = s / np.linalg.norm(s)
    inv = regularized_inverse(lB, floor * lB[0])
    new_gA = inv[:, None, None] * U.reshape(chiL, d, -1)
    new_gB = Vh.reshape(-1, d, chiR) * inv[None, None, :]
    return new_gA, new_gB, s


def _svd_sweeps(state, floor, chi_max, tol, max_sweeps: int = 200):
    gA, gB, lA, lB = state.gamma_A, state.gamma_B, state.lambda_A, state.lambda_B
    real = np.isrealobj(gA) and np.isrealobj(gB)
    best, best_dev = state, check_canonical(state, tol).max_deviation
    for _ in range(max_sweeps):
        prev = lA.copy()
        gA, gB, lA = _bond_update(gA, gB, lA, lB, floor, chi_max)
        gB, gA, lB = _bond_update(gB, gA, lB, lA, floor, chi_max)
        if real:
            gA, gB = gA.real, gB.real
        cand = CanonicalIMPS(gA, gB, lA, lB)
        dev = check_canonical(cand, tol).max_deviation
        if dev < best_dev:
            best, best_dev = cand, dev
        if len(prev) == len(lA) and np.max(np.abs(prev - lA)) < 1e-15 and dev <= tol:
            break
    return best


def _canonical_pass(gamma_A, lambda_A, gamma_B, lambda_B, floor, chi_max):
    gA, gB = np.asarray(gamma_A), np.asarray(gamma_B)
    lA, lB = np.asarray(lambda_A), np.asarray(lambda_B)
    d = gA.shape[1]
    cell = np.tensordot(gA * lA[None, None, :], gB * lB[None, None, :], axes=(2, 0))
    chi = cell.shape[0]
    cell = cell.reshape(chi, d * d, chi)
    eta, R = _dominant_fixed_point(cell, "right")
    cell = cell / np.sqrt(eta)
    _, L = _dominant_fixed_point(cell, "left")
    X, Xinv = _sqrt_factor(R, floor**2)  # R = X X^dagger
    F, Finv = _sqrt_factor(L, floor**2)
    Y, Yinv = F.conj().T, Finv.conj().T  # L = Y^dagger Y
    U, lam, Vh = scipy.linalg.svd(Y @ X, full_matrices=False)
    keep = lam > floor * lam[0]
    U, lam, Vh = U[:, keep], lam[keep], Vh[keep, :]
    lam = lam / np.linalg.norm(lam)
    # cell in Gamma form with lam on both ends: Vh X^-1 cell Y^-1 U
    G = np.tensordot(Vh @ Xinv, cell, axes=(1, 0))
    G = np.tensordot(G, Yinv @ U, axes=(2, 0))
    # G is the cell "Gamma" with lam on both ends: psi_cell = lam G lam
    theta = lam[:, None, None] * G * lam[None, None, :]
    n = len(lam)
    theta = theta.reshape(n * d, d * n)
    Ut, s, Vt = scipy.linalg.svd(theta, full_matrices=False)
    keep = s > floor * s[0]
    if chi_max is not None:
        keep[chi_max:] = False
    Ut, s, Vt = Ut[:, keep], s[keep], Vt[keep, :]
    s = s / np.linalg.norm(s)
    inv = regularized_inverse(lam, floor * lam[0])
    new_gA = inv[:, None, None] * Ut.reshape(n, d, -1)
    new_gB = Vt.reshape(-1, d, n) * inv[None, None, :]
    from .tensor_core import _fix_gauge  # deterministic signs on the inner bond
    Uf, Vf = _fix_gauge(new_gA.reshape(n * d, -1), new_gB.reshape(len(s), -1))
    new_gA = Uf.reshape(n, d, -1)
    new_gB = Vf.reshape(-1, d, n)
    if np.isrealobj(gA) and np.isrealobj(gB):
        new_gA, new_gB = new_gA.real, new_gB.real
    return CanonicalIMPS(new_gA, new_gB, s, lam)


def random_imps(chi: int, d: int = 3, rng=None, complex_entries: bool = False) -> CanonicalIMPS:
    """Random injective two-site iMPS, canonicalized."""
    rng = np.random.default_rng(rng)

    def draw(shape):
        x = rng.standard_normal(shape)
        if complex_entries:
            x = x + 1j * rng.standard_normal(shape)
        return x

    gA, gB = draw((chi, d, chi)), draw((chi, d, chi))
    lam = np.ones(chi) / np.sqrt(chi)
    return canonicalize(gA, lam, gB, lam)


def _encode(arr):
    arr = np.asarray(arr)
    out = {"dims": list(arr.shape), "real": arr.real.reshape(-1).tolist()}
    if np.iscomplexobj(arr):
        out["imag"] = arr.imag.reshape(-1).tolist()
    return out


def _decode(obj):
    re = np.array(obj["real"], dtype=float)
    if "imag" in obj:
        re = re + 1j * np.array(obj["imag"], dtype=float)
    return re.reshape(obj["dims"])


def save_checkpoint(state: CanonicalIMPS, path, metadata: dict | None = None) -> None:
    """Write the four tensors as JSON; floats use repr so reading back is bit-exact."""
    doc = {
        "format": "spin1bell-imps",
        "format_version": CHECKPOINT_VERSION,
        "metadata": metadata or {},
        "gamma_A": _encode(state.gamma_A),
        "gamma_B": _encode(state.gamma_B),
        "lambda_A": _encode(state.lambda_A),
        "lambda_B": _encode(state.lambda_B),
    }
    Path(path).write_text(json.dumps(doc))


def load_checkpoint(path) -> tuple[CanonicalIMPS, dict]:
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != "spin1bell-imps":
        raise ValueError(f"{path} is not an iMPS checkpoint")
    if doc.get("format_version") != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {doc.get('format_version')}")
    state = CanonicalIMPS(
        _decode(doc["gamma_A"]), _decode(doc["gamma_B"]),
        _decode(doc["lambda_A"]), _decode(doc["lambda_B"]),
    )
    return state, doc.get("metadata", {})
