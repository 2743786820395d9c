"""Spin-1 matrices, d-level lowering operators, Fourier measurement bases and
the two-site CGLMP/SLK Bell operator.

Basis convention: index 0, 1, 2 <-> S^z = +1, 0, -1.  The lowering operator
J^n therefore moves amplitude to *larger* indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

SQRT2 = np.sqrt(2.0)


def spin1_operators() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (S^x, S^y, S^z) for spin 1 in the S^z eigenbasis."""
    sx = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex) / SQRT2
    sy = np.array([[0, 1, 0], [-1, 0, 1], [0, -1, 0]], dtype=complex) / (SQRT2 * 1j)
    sz = np.diag([1.0, 0.0, -1.0]).astype(complex)
    return sx, sy, sz


def spin1_ladder() -> tuple[np.ndarray, np.ndarray]:
    """Real (S^+, S^-) for spin 1."""
    sp = np.array([[0, 1, 0], [0, 0, 1], [0, 0, 0]], dtype=float) * SQRT2
    return sp, sp.T.copy()


def spin1_sz() -> np.ndarray:
    return np.diag([1.0, 0.0, -1.0])


def string_phase() -> np.ndarray:
    """exp(i pi S^z) = diag(-1, 1, -1)."""
    return np.diag([-1.0, 1.0, -1.0])


def spin_flip() -> np.ndarray:
    """Site unitary exchanging |+> and |->; conjugates S^+ into S^-."""
    return np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]], dtype=float)


def lowering_operators(d: int) -> list[np.ndarray]:
    """[J^1, ..., J^{d-1}], where J^n has ones on the n-th subdiagonal."""
    if d < 2:
        raise ValueError(f"lowering operators need d >= 2, got {d}")
    return [np.eye(d, k=-n) for n in range(1, d)]


def fourier_basis(d: int, phase_shift) -> np.ndarray:
    """Columns are |alpha>_V = d^-1/2 sum_beta omega^{-(alpha+phi) beta} |beta>."""
    phi = float(phase_shift)
    alpha = np.arange(d)[None, :]
    beta = np.arange(d)[:, None]
    # beta = 0 row is 1/sqrt(d): global phase already fixed real positive
    return np.exp(-2j * np.pi * (alpha + phi) * beta / d) / np.sqrt(d)


def fourier_observable(d: int, phase_shift) -> np.ndarray:
    """Unitary V = sum_alpha omega^alpha |alpha>_V <alpha|_V."""
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    basis = fourier_basis(d, phase_shift)
    omega = np.exp(2j * np.pi * np.arange(d) / d)
    return (basis * omega[None, :]) @ basis.conj().T


def _sec(x):
    return 1.0 / np.cos(x)


@dataclass(frozen=True)
class BellOperatorSpec:
    """Measurement settings and weights of the d-outcome Bell correlation."""

    d: int = 3
    phase_shifts: dict = field(
        default_factory=lambda: {
            "A1": Fraction(0),
            "B1": Fraction(1, 2),
            "A2": Fraction(-1, 4),
            "B2": Fraction(1, 4),
        }
    )

    @property
    def coefficients(self) -> np.ndarray:
        """c_n = 2/(d-1) sec(n pi / 2d) for n = 1..d-1."""
        n = np.arange(1, self.d)
        return 2.0 / (self.d - 1) * _sec(n * np.pi / (2 * self.d))

    @property
    def weights(self) -> np.ndarray:
        """Complex f_n = (1/2)/(d-1) omega^{n/4} sec(n pi / 2d)."""
        n = np.arange(1, self.d)
        omega_q = np.exp(2j * np.pi * n / (4 * self.d))
        return 0.5 / (self.d - 1) * omega_q * _sec(n * np.pi / (2 * self.d))

    @property
    def lr_bounds(self) -> tuple[float, float]:
        if self.d != 3:
            raise ValueError(f"local-realistic bounds are only tabulated for d=3, not d={self.d}")
        return (-4.0, 2.0)


def _require_d3(spec: BellOperatorSpec):
    if spec.d != 3:
        raise ValueError(f"Bell operator is only supported for d=3 (got d={spec.d})")


def bell_operator_dense(spec: BellOperatorSpec | None = None) -> np.ndarray:
    """B = sum_n c_n (J^n (x) J^n+ + J^n+ (x) J^n) as a d^2 x d^2 real matrix."""
    spec = spec or BellOperatorSpec()
    _require_d3(spec)
    out = np.zeros((spec.d**2, spec.d**2))
    for c, J in zip(spec.coefficients, lowering_operators(spec.d)):
        out += c * (np.kron(J, J.T) + np.kron(J.T, J))
    return out


def measurement_combination(spec: BellOperatorSpec, n: int, party: int) -> np.ndarray:
    """(A^n + omega^{n/2} B^n) / 2 for party 1 or 2."""
    A = fourier_observable(spec.d, spec.phase_shifts[f"A{party}"])
    B = fourier_observable(spec.d, spec.phase_shifts[f"B{party}"])
    omega_half = np.exp(2j * np.pi * n / (2 * spec.d))
    return 0.5 * (np.linalg.matrix_power(A, n) + omega_half * np.linalg.matrix_power(B, n))


def bell_operator_measurement_form(spec: BellOperatorSpec | None = None) -> np.ndarray:
    """Bell operator assembled directly from the Fourier measurements.

    The trailing "+ c.c." is taken as the Hermitian conjugate of the whole sum.
    """
    spec = spec or BellOperatorSpec()
    _require_d3(spec)
    total = np.zeros((spec.d**2, spec.d**2), dtype=complex)
    for n, f in zip(range(1, spec.d), spec.weights):
        left = 2 * measurement_combination(spec, n, 1)
        right = 2 * measurement_combination(spec, n, 2)
        total += f * np.kron(left, right.conj().T)
    return total + total.conj().T
