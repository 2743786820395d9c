"""Expectation values on a canonical two-site iMPS.

The left operator of every two-point function sits on sublattice A (site 0
of the cell); distance r then lands on A for even r and on B for odd r.
Correlators are propagated with right-canonical tensors B = Gamma lambda,
so the right boundary closes with an identity and the left boundary is the
diagonal lambda_B^2.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .imps import CanonicalIMPS
from .mpo import MPOperator, bell_two_point_mpo
from .spin_algebra import BellOperatorSpec, spin1_ladder, spin1_sz, string_phase

IMAG_TOL = 1e-10
ORDERING_TOL = 1e-8
BOUND_SLACK = 1e-9


class ImaginaryResidueError(ArithmeticError):
    pass


def _site_tensors(state: CanonicalIMPS):
    return state.right_tensors()


def _start(state, op):
    """Left boundary with ``op`` applied on site A: matrix (b*, b)."""
    BA, _ = _site_tensors(state)
    rho = state.lambda_B**2
    x = np.tensordot(op, BA, axes=(1, 1))                   # s* a b
    x = x * rho[None, :, None]
    return np.tensordot(BA.conj(), x, axes=([0, 1], [1, 0]))  # b* b


def _transfer(C, B, op=None):
    x = np.tensordot(C, B, axes=(1, 0))                     # a* s b
    if op is not None:
        x = np.tensordot(x, op, axes=(1, 1)).transpose(0, 2, 1)
    return np.tensordot(B.conj(), x, axes=([0, 1], [0, 1]))  # b* b


def _close(C, B, op):
    x = np.tensordot(C, B, axes=(1, 0))                     # a* s b
    x = np.tensordot(x, op, axes=(1, 1))                    # a* b s*
    return complex(np.tensordot(B.conj(), x, axes=([0, 1, 2], [0, 2, 1])))


def correlation_function(state: CanonicalIMPS, op_left, op_right, distances: Iterable[int],
                         interior=None) -> dict[int, complex]:
    """<O_0 X_1 ... X_{r-1} O'_r> for each r (X = identity unless ``interior`` is given).

    All distances share one left-to-right pass.
    """
    rs = sorted(set(int(r) for r in distances))
    if not rs:
        return {}
    if rs[0] < 1:
        raise ValueError(f"distance must be >= 1, got {rs[0]}")
    Bs = _site_tensors(state)
    out = {}
    C = _start(state, op_left)
    site = 1
    for r in rs:
        while site < r:
            C = _transfer(C, Bs[site % 2], interior)
            site += 1
        out[r] = _close(C, Bs[r % 2], op_right)
    return out


def two_point(state: CanonicalIMPS, op_left, op_right, r: int) -> complex:
    """<O_i O'_{i+r}> with i on sublattice A."""
    if r < 1:
        raise ValueError(f"distance must be >= 1, got {r}")
    return correlation_function(state, op_left, op_right, [r])[r]


def one_point(state: CanonicalIMPS, op, site: int = 0) -> complex:
    Bs = _site_tensors(state)
    lam = state.lambda_B if site % 2 == 0 else state.lambda_A
    B = Bs[site % 2]
    x = np.tensordot(op, B, axes=(1, 1)) * (lam**2)[None, :, None]
    return complex(np.tensordot(B.conj(), x, axes=([0, 1, 2], [1, 0, 2])))


def magnetization(state: CanonicalIMPS) -> tuple[float, float]:
    sz = spin1_sz()
    return one_point(state, sz, 0).real, one_point(state, sz, 1).real


def _real(val, what):
    if abs(val.imag) > IMAG_TOL:
        raise ImaginaryResidueError(f"{what}: imaginary part {val.imag:.3e} exceeds {IMAG_TOL}")
    return float(val.real)


def _symmetrized(state, op, distances, what, check_orderings):
    opd = op.conj().T
    fwd = correlation_function(state, op, opd, distances)
    bwd = correlation_function(state, opd, op, distances)
    out = {}
    for r in fwd:
        if check_orderings and abs(fwd[r] - bwd[r]) > ORDERING_TOL:
            raise ArithmeticError(
                f"{what}(r={r}): orderings disagree by {abs(fwd[r] - bwd[r]):.3e}")
        out[r] = _real(0.5 * (fwd[r] + bwd[r]), f"{what}(r={r})")
    return out


def c1_series(state, distances, check_orderings=False) -> dict[int, float]:
    """Symmetrized <S+_i S-_{i+r}> for several r."""
    sp, _ = spin1_ladder()
    return _symmetrized(state, sp, distances, "C1", check_orderings)


def c2_series(state, distances, check_orderings=False) -> dict[int, float]:
    """Symmetrized <(S+_i)^2 (S-_{i+r})^2> for several r."""
    sp, _ = spin1_ladder()
    return _symmetrized(state, sp @ sp, distances, "C2", check_orderings)


def c1(state: CanonicalIMPS, r: int, check_orderings: bool = False) -> float:
    """First-moment transverse correlation; with ``check_orderings`` the two
    operator orderings must agree to 1e-8 (true for real ground states)."""
    return c1_series(state, [r], check_orderings)[r]


def c2(state: CanonicalIMPS, r: int, check_orderings: bool = False) -> float:
    return c2_series(state, [r], check_orderings)[r]


def mpo_window_expectation(state: CanonicalIMPS, mpo: MPOperator, n_sites: int | None = None,
                           start: int = 0) -> complex:
    """<psi| O |psi> for a finite MPO window placed from site ``start`` onward."""
    n = len(mpo.tensors) if n_sites is None else n_sites
    Bs = _site_tensors(state)
    lam = state.lambda_B if start % 2 == 0 else state.lambda_A
    # env legs: (bra, w, ket)
    env = np.einsum("ab,w->awb", np.diag(lam**2), mpo.left)
    for k in range(n):
        B = Bs[(start + k) % 2]
        W = mpo.site(k)
        x = np.tensordot(env, B, axes=(2, 0))                   # a* w s b
        x = np.tensordot(x, W, axes=([1, 2], [0, 2]))           # a* b s* w'
        env = np.tensordot(B.conj(), x, axes=([0, 1], [0, 2]))  # b* b w'
        env = env.transpose(0, 2, 1)
    val = np.einsum("awa,w->", env, mpo.right)
    return complex(val)


def _bell_mpo_series(state, distances):
    """Bell correlation for several r from one pass carrying the 4-channel MPO leg."""
    rs = sorted(set(int(r) for r in distances))
    mpo_r1 = bell_two_point_mpo(1)
    WL, WR = mpo_r1.tensors[0], mpo_r1.tensors[1]
    Bs = _site_tensors(state)
    BA = Bs[0]
    rho = state.lambda_B**2
    x = np.tensordot(BA * rho[:, None, None], WL[0], axes=(1, 1))  # a b s* m
    C = np.tensordot(BA.conj(), x, axes=([0, 1], [0, 2]))          # b* b m
    out = {}
    site = 1
    for r in rs:
        while site < r:
            B = Bs[site % 2]
            y = np.tensordot(C, B, axes=(1, 0))                     # a* m s b
            C = np.tensordot(B.conj(), y, axes=([0, 1], [0, 2]))   # b* m b
            C = C.transpose(0, 2, 1)
            site += 1
        B = Bs[r % 2]
        y = np.tensordot(C, B, axes=(1, 0))                         # a* m s b
        y = np.tensordot(y, WR[:, :, :, 0], axes=([1, 2], [0, 2]))  # a* b s*
        out[r] = complex(np.tensordot(B.conj(), y, axes=([0, 1, 2], [0, 2, 1])))
    return out


def bell_series(state: CanonicalIMPS, distances, method: str = "mpo") -> dict[int, float]:
    if method == "mpo":
        raw = _bell_mpo_series(state, distances)
        return {r: _real(v, f"Bell(r={r})") for r, v in raw.items()}
    if method == "decomposition":
        C1 = c1_series(state, distances)
        C2 = c2_series(state, distances)
        return {r: 2.0 * (C1[r] / np.sqrt(3.0) + 0.5 * C2[r]) for r in C1}
    raise ValueError(f"unknown method {method!r}")


def bell_correlation(state: CanonicalIMPS, r: int, method: str = "mpo") -> float:
    """CGLMP/SLK correlation <B_{i,i+r}>.

    ``mpo`` contracts the two-point Bell MPO; ``decomposition`` evaluates
    2 (C1/sqrt(3) + C2/2).  The two agree for every state.
    """
    if r < 1:
        raise ValueError(f"distance must be >= 1, got {r}")
    return bell_series(state, [r], method)[r]


def string_order_series(state, distances) -> dict[int, float]:
    rs = list(distances)
    if min(rs) < 2:
        raise ValueError("string order needs r >= 2")
    sz = spin1_sz()
    raw = correlation_function(state, sz, sz, rs, interior=string_phase())
    return {r: _real(v, f"string(r={r})") for r, v in raw.items()}


def string_order(state: CanonicalIMPS, r: int, alpha: str = "z") -> float:
    """<S^z_i exp(i pi sum_{i<l<i+r} S^z_l) S^z_{i+r}>."""
    if alpha != "z":
        raise ValueError("only the z-axis string order is implemented")
    if r < 2:
        raise ValueError(f"string order needs r >= 2, got {r}")
    return string_order_series(state, [r])[r]


def energy_per_site(state: CanonicalIMPS, h: MPOperator) -> float:
    """Energy density of a nearest-neighbour MPO from two windows: (E_4 - E_2) / 2."""
    e4 = mpo_window_expectation(state, h, 4)
    e2 = mpo_window_expectation(state, h, 2)
    return _real((e4 - e2) / 2.0, "energy")


@dataclass(frozen=True)
class BoundCheck:
    value: float
    lower: float
    upper: float

    @property
    def violated(self) -> bool:
        return self.value < self.lower - BOUND_SLACK or self.value > self.upper + BOUND_SLACK

    @property
    def ok(self) -> bool:
        return not self.violated

    @property
    def label(self) -> str:
        if self.value > self.upper + BOUND_SLACK:
            return "violation-upper"
        if self.value < self.lower - BOUND_SLACK:
            return "violation-lower"
        return "ok"


def bound_check(value: float, spec: BellOperatorSpec | None = None) -> BoundCheck:
    lo, hi = (spec or BellOperatorSpec()).lr_bounds
    return BoundCheck(float(value), lo, hi)


@dataclass
class CorrelationSeries:
    kind: str
    distances: list
    values: list
    Jz: float = float("nan")
    D: float = float("nan")
    chi: int = 0
    metadata: dict = field(default_factory=dict)

    KINDS = ("C1", "C2", "Bell", "StringOrder", "SzSz")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown series kind {self.kind!r}")
        if len(self.distances) != len(self.values):
            raise ValueError("distances and values differ in length")

    def rows(self):
        for r, v in zip(self.distances, self.values):
            yield [self.kind, f"{self.Jz:.12g}", f"{self.D:.12g}", str(self.chi), str(r), f"{v:.12g}"]


SERIES_COLUMNS = ["kind", "J_z", "D", "chi", "r", "value"]


def correlation_series(state, kind: str, distances: Sequence[int], **meta) -> CorrelationSeries:
    rs = list(distances)
    if kind == "C1":
        vals = c1_series(state, rs)
    elif kind == "C2":
        vals = c2_series(state, rs)
    elif kind == "Bell":
        vals = bell_series(state, rs)
    elif kind == "StringOrder":
        vals = string_order_series(state, rs)
    elif kind == "SzSz":
        sz = spin1_sz()
        vals = {r: _real(v, "SzSz") for r, v in correlation_function(state, sz, sz, rs).items()}
    else:
        raise ValueError(f"unknown series kind {kind!r}")
    return CorrelationSeries(kind, rs, [vals[r] for r in rs], **meta)


def write_series_csv(path, series: Iterable[CorrelationSeries], metadata: dict | None = None):
    with open(path, "w", newline="") as fh:
        for k, v in (metadata or {}).items():
            fh.write(f"# {k}={v}\n")
        w = csv.writer(fh)
        w.writerow(SERIES_COLUMNS)
        for s in series:
            for row in s.rows():
                w.writerow(row)


def read_series_csv(path) -> list[CorrelationSeries]:
    groups: dict = {}
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.DictReader(lines)
    for row in reader:
        key = (row["kind"], float(row["J_z"]), float(row["D"]), int(row["chi"]))
        g = groups.setdefault(key, ([], []))
        g[0].append(int(row["r"]))
        g[1].append(float(row["value"]))
    return [CorrelationSeries(k[0], rs, vs, Jz=k[1], D=k[2], chi=k[3])
            for k, (rs, vs) in groups.items()]
