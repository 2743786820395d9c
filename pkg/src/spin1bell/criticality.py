"""Parameter sweeps and detection of quantum phase transitions.

A sweep runs iDMRG along one axis of the (J_z, D) plane, warm-starting each
point from its left neighbour, and records the Bell correlation, C1, C2,
entropy and string order.  Transitions are then located from the recorded
series: jumps (first order), zeros of the first derivative (extrema) and
zeros of the second derivative (inflections).  BKT points are located from
the decay exponent of C1 instead, since the Bell series is smooth there.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Sequence

import numpy as np
import scipy.optimize

from .idmrg import DmrgConfig, idmrg_run
from .imps import entanglement_entropy
from .mpo import xxz_d_hamiltonian_mpo
from .observables import bell_series, bound_check, c1_series, c2_series, string_order

PARAMETERS = ("J_z", "D")
RULES = ("discontinuity", "extremum", "inflection")
AUDIT_TOL = 1e-6
JUMP_FACTOR = 10.0
# relative resolution of recorded observables (CSV keeps 12 digits)
DATA_RESOLUTION = 1e-11


@dataclass(frozen=True)
class SweepGrid:
    parameter: str
    values: tuple
    J_z: float = 1.0
    D: float = 0.0
    r_list: tuple = (1,)
    cfg: DmrgConfig = field(default_factory=DmrgConfig)
    audit_every: int = 10
    chunk_size: int | None = None
    string_r: int = 40

    def __post_init__(self):
        if self.parameter not in PARAMETERS:
            raise ValueError(f"parameter must be one of {PARAMETERS}, got {self.parameter!r}")
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise ValueError("grid is empty")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError("grid values must be strictly increasing")
        rs = tuple(int(r) for r in self.r_list)
        if not rs or min(rs) < 1:
            raise ValueError("r_list needs distances >= 1")
        if self.audit_every < 0:
            raise ValueError("audit_every must be >= 0 (0 disables audits)")
        if self.chunk_size is not None and self.chunk_size < 1:
            raise ValueError("chunk_size must be positive")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "r_list", rs)

    def couplings(self, x: float) -> tuple[float, float]:
        """(J_z, D) at grid value x."""
        return (x, self.D) if self.parameter == "J_z" else (self.J_z, x)

    def chunks(self) -> list[list[int]]:
        """Contiguous index ranges that form independent warm-start chains."""
        n = len(self.values)
        size = n if self.chunk_size is None else self.chunk_size
        return [list(range(i, min(i + size, n))) for i in range(0, n, size)]


@dataclass
class ScanPoint:
    parameter_value: float
    J_z: float
    D: float
    chi: int
    converged: bool
    energy_per_site: float
    entropy: float
    bell: dict
    c1: dict
    c2: dict
    string_order: float = math.nan
    identity_residual: float = math.nan
    sweeps: int = 0
    audit: str = ""


@dataclass
class ScanResult:
    parameter: str
    r_list: tuple
    points: list
    metadata: dict = field(default_factory=dict)

    def x(self, only_converged: bool = True) -> np.ndarray:
        return np.array([p.parameter_value for p in self._pts(only_converged)])

    def _pts(self, only_converged):
        return [p for p in self.points if p.converged or not only_converged]

    def series(self, kind: str, r: int | None = None, only_converged: bool = True):
        """(x, y) arrays of one recorded quantity over the converged points."""
        pts = self._pts(only_converged)
        if kind in ("bell", "c1", "c2"):
            if r not in self.r_list:
                raise KeyError(f"r={r} was not recorded (have {self.r_list})")
            y = [getattr(p, kind)[r] for p in pts]
        elif kind in ("energy_per_site", "entropy", "string_order"):
            y = [getattr(p, kind) for p in pts]
        else:
            raise KeyError(f"unknown series {kind!r}")
        return np.array([p.parameter_value for p in pts]), np.array(y, dtype=float)

    def columns(self) -> list[str]:
        cols = ["parameter_name", "parameter_value", "chi", "converged",
                "energy_per_site", "entropy"]
        for r in self.r_list:
            cols += [f"bell_{r}", f"c1_{r}", f"c2_{r}"]
        return cols + ["J_z", "D", "string_order", "identity_residual", "sweeps", "audit"]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            for k, v in self.metadata.items():
                fh.write(f"# {k}={v}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.columns())
            for p in self.points:
                row = [self.parameter, _fmt(p.parameter_value), str(p.chi),
                       str(int(p.converged)), _fmt(p.energy_per_site), _fmt(p.entropy)]
                for r in self.r_list:
                    row += [_fmt(p.bell[r]), _fmt(p.c1[r]), _fmt(p.c2[r])]
                row += [_fmt(p.J_z), _fmt(p.D), _fmt(p.string_order),
                        _fmt(p.identity_residual), str(p.sweeps), p.audit]
                w.writerow(row)

    @classmethod
    def read_csv(cls, path) -> "ScanResult":
        meta, lines = {}, []
        with open(path, newline="") as fh:
            for ln in fh:
                if ln.startswith("#"):
                    k, _, v = ln[1:].strip().partition("=")
                    meta[k.strip()] = v
                else:
                    lines.append(ln)
        reader = csv.DictReader(lines)
        rs = tuple(int(c[5:]) for c in reader.fieldnames if c.startswith("bell_"))
        points, parameter = [], None
        for row in reader:
            parameter = row["parameter_name"]
            points.append(ScanPoint(
                parameter_value=float(row["parameter_value"]),
                J_z=float(row["J_z"]), D=float(row["D"]), chi=int(row["chi"]),
                converged=bool(int(row["converged"])),
                energy_per_site=float(row["energy_per_site"]),
                entropy=float(row["entropy"]),
                bell={r: float(row[f"bell_{r}"]) for r in rs},
                c1={r: float(row[f"c1_{r}"]) for r in rs},
                c2={r: float(row[f"c2_{r}"]) for r in rs},
                string_order=float(row["string_order"]),
                identity_residual=float(row["identity_residual"]),
                sweeps=int(row["sweeps"]), audit=row["audit"]))
        return cls(parameter or meta.get("parameter", ""), rs, points, meta)


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def _measure(res, grid: SweepGrid, x: float) -> ScanPoint:
    jz, d = grid.couplings(x)
    state = res.state
    rs = list(grid.r_list)
    bell = bell_series(state, rs, method="mpo")
    decomposed = bell_series(state, rs, method="decomposition")
    c1 = c1_series(state, rs, check_orderings=res.converged)
    c2 = c2_series(state, rs, check_orderings=res.converged)
    so = string_order(state, grid.string_r) if grid.string_r >= 2 else math.nan
    return ScanPoint(
        parameter_value=x, J_z=jz, D=d, chi=state.chi, converged=res.converged,
        energy_per_site=res.energy_per_site,
        entropy=entanglement_entropy(state.lambda_A),
        bell=bell, c1=c1, c2=c2, string_order=so,
        identity_residual=max(abs(bell[r] - decomposed[r]) for r in rs),
        sweeps=res.sweeps_used)


def _run_chain(grid: SweepGrid, indices: Sequence[int]) -> list[ScanPoint]:
    """One warm-start chain; every audit_every-th grid point is re-run cold."""
    out, prev = [], None
    for i in indices:
        x = grid.values[i]
        h = xxz_d_hamiltonian_mpo(1.0, *grid.couplings(x))
        res = idmrg_run(h, grid.cfg, initial=prev)
        audit = "cold" if prev is None else ""
        if prev is not None and grid.audit_every and (i + 1) % grid.audit_every == 0:
            cold = idmrg_run(h, grid.cfg)
            gap = res.energy_per_site - cold.energy_per_site
            audit = "ok" if abs(gap) <= AUDIT_TOL else f"mismatch:{gap:.3e}"
            # keep the lower-energy branch; the chain continues from it
            if gap > AUDIT_TOL and cold.converged:
                res = cold
        point = _measure(res, grid, x)
        point.audit = audit
        out.append(point)
        prev = res.state if res.converged else None
    return out


def sweep(grid: SweepGrid, workers: int = 1) -> ScanResult:
    """Run iDMRG over the grid.

    Chains are cut by ``grid.chunk_size`` rather than by the worker count, so
    the rows do not depend on how many workers ran them.
    """
    chunks = grid.chunks()
    if workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chain, [grid] * len(chunks), chunks))
    else:
        parts = [_run_chain(grid, c) for c in chunks]
    points = [p for part in parts for p in part]
    cfg = grid.cfg
    meta = {
        "parameter": grid.parameter,
        "J_z": grid.J_z if grid.parameter == "D" else "swept",
        "D": grid.D if grid.parameter == "J_z" else "swept",
        "chi": cfg.chi_max,
        "entropy_rel_tol": cfg.entropy_rel_tol,
        "seed": cfg.seed,
        "chunk_size": grid.chunk_size,
        "audit_every": grid.audit_every,
        "string_r": grid.string_r,
    }
    return ScanResult(grid.parameter, grid.r_list, points, meta)


def bound_violations(result: ScanResult) -> list[tuple[float, int, float]]:
    """(x, r, value) of every recorded Bell value outside the local realistic range."""
    bad = []
    for p in result.points:
        for r, v in p.bell.items():
            if bound_check(v).violated:
                bad.append((p.parameter_value, r, v))
    return bad


# ---------------------------------------------------------------- derivatives

def derivative(x, y, order: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Three-point central differences on a possibly non-uniform grid.

    Returns the interior nodes and the derivative estimates there.
    """
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-d arrays of equal length")
    if len(x) < order + 3:
        raise ValueError(f"need at least {order + 3} points for order {order}, got {len(x)}")
    if np.any(np.diff(x) <= 0):
        raise ValueError("grid must be strictly increasing")
    h1 = x[1:-1] - x[:-2]
    h2 = x[2:] - x[1:-1]
    ym, y0, yp = y[:-2], y[1:-1], y[2:]
    if order == 1:
        d = (-h2 / (h1 * (h1 + h2)) * ym + (h2 - h1) / (h1 * h2) * y0
             + h1 / (h2 * (h1 + h2)) * yp)
    else:
        d = 2.0 * (ym / (h1 * (h1 + h2)) - y0 / (h1 * h2) + yp / (h2 * (h1 + h2)))
    return x[1:-1], d


@dataclass(frozen=True)
class CriticalPoint:
    location: float
    kind: str
    r: int | None
    estimator: str
    uncertainty: float
    strength: float = 0.0

    def record(self) -> dict:
        return asdict(self)


def _zero_crossings(x, f, noise=0.0):
    """Linear-interpolated zeros of f between consecutive nodes.

    Sign changes where both values are within ``noise`` of zero are ignored.
    """
    out = []
    for k in range(len(x) - 1):
        a, b = f[k], f[k + 1]
        if max(abs(a), abs(b)) <= noise:
            continue
        if a == 0.0 and k > 0:
            continue
        if a == 0.0 or a * b < 0:
            t = 0.0 if a == 0.0 else a / (a - b)
            out.append((k, x[k] + t * (x[k + 1] - x[k])))
    return out


def _spacing_at(x, loc):
    k = int(np.clip(np.searchsorted(x, loc) - 1, 0, len(x) - 2))
    return float(x[k + 1] - x[k])


def _jumps(x, y, floor):
    h = np.diff(x)
    dy = np.diff(y)
    slope = np.abs(dy / h)
    found = []
    for k in range(len(dy)):
        nb = [slope[j] for j in (k - 2, k - 1, k + 1, k + 2) if 0 <= j < len(dy)]
        scale = max(float(np.median(nb)) * h[k] if nb else 0.0, floor)
        if abs(dy[k]) > JUMP_FACTOR * scale and all(abs(dy[k]) >= abs(dy[j])
                                                    for j in (k - 1, k + 1) if 0 <= j < len(dy)):
            found.append((k, abs(dy[k]) / scale))
    return found


def find_critical_points(x, y, rules: Sequence[str] = RULES, r: int | None = None,
                         floor: float | None = None) -> list[CriticalPoint]:
    """Locate jumps, extrema and inflections of a series sampled on a grid.

    * discontinuity: an interval whose jump exceeds 10x the secant scale of
      its neighbours (and is the largest locally); reported at the midpoint.
    * extremum: sign change of the first derivative, zero linearly interpolated.
    * inflection: sign change of the second derivative, zero linearly
      interpolated; ``strength`` is |f'| there, so the steepest one is the
      natural candidate for a transition.

    Zeros whose difference stencils touch a detected jump are excluded.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    unknown = set(rules) - set(RULES)
    if unknown:
        raise ValueError(f"unknown rules {sorted(unknown)}")
    if floor is None:
        floor = 1e-8 * max(1.0, float(np.max(np.abs(y)))) if len(y) else 1e-8
    out: list[CriticalPoint] = []
    jumps = _jumps(x, y, floor) if len(x) >= 2 else []
    if "discontinuity" in rules:
        for k, ratio in jumps:
            h = x[k + 1] - x[k]
            out.append(CriticalPoint(0.5 * (x[k] + x[k + 1]), "discontinuity", r,
                                     "jump > 10x neighbouring secant scale, midpoint",
                                     0.5 * h, float(ratio)))
    blocked = {k for k, _ in jumps}
    # rounding noise of difference quotients, 10x the data resolution carried through
    eps = 10 * DATA_RESOLUTION * max(1.0, float(np.max(np.abs(y)))) if len(y) else 0.0
    h_min = float(np.min(np.diff(x))) if len(x) >= 2 else 1.0

    def near_jump(k):
        # stencils at interior nodes k+1 and k+2 span intervals k .. k+2
        return any(k <= j <= k + 2 for j in blocked)

    if "extremum" in rules and len(x) >= 4:
        xi, d1 = derivative(x, y, 1)
        xs, d2 = derivative(x, y, 2) if len(x) >= 5 else (xi, np.zeros_like(xi))
        for k, loc in _zero_crossings(xi, d1, eps / h_min):
            if near_jump(k):
                continue
            curv = np.interp(loc, xs, d2)
            kind = "minimum" if d1[k] < 0 else "maximum"
            out.append(CriticalPoint(float(loc), "extremum", r,
                                     f"{kind}; central first difference, linear zero",
                                     0.5 * _spacing_at(x, loc), float(abs(curv))))
    if "inflection" in rules and len(x) >= 5:
        xi, d2 = derivative(x, y, 2)
        x1, d1 = derivative(x, y, 1)
        for k, loc in _zero_crossings(xi, d2, 4 * eps / h_min**2):
            if near_jump(k):
                continue
            out.append(CriticalPoint(float(loc), "inflection", r,
                                     "central second difference, linear zero",
                                     0.5 * _spacing_at(x, loc),
                                     float(abs(np.interp(loc, x1, d1)))))
    return sorted(out, key=lambda c: c.location)


def strongest(points: Sequence[CriticalPoint], kind: str,
              window: tuple[float, float] | None = None) -> CriticalPoint | None:
    """Highest-strength detection of one kind, optionally inside a window."""
    cands = [p for p in points if p.kind == kind
             and (window is None or window[0] <= p.location <= window[1])]
    return max(cands, key=lambda p: p.strength) if cands else None


# ------------------------------------------------------------ drift with r

@dataclass(frozen=True)
class DriftTable:
    rows: tuple  # (r, location)
    plateau: tuple  # distances in the final plateau
    plateau_average: float
    last: float

    def records(self) -> list[dict]:
        return [{"r": r, "location": loc} for r, loc in self.rows]


def extremum_vs_distance(locations: dict, plateau_tol: float = 0.005) -> DriftTable:
    """Critical-point location against distance, extrapolated by the last plateau.

    The plateau is the longest tail of the r-ordered list whose spread is at
    most ``plateau_tol``; its average is the extrapolated value.
    """
    if len(locations) < 3:
        raise ValueError(f"need at least 3 distances, got {len(locations)}")
    rows = tuple(sorted((int(r), float(v)) for r, v in locations.items()))
    vals = [v for _, v in rows]
    start = len(vals) - 1
    while start > 0 and max(vals[start - 1:]) - min(vals[start - 1:]) <= plateau_tol + 1e-12:
        start -= 1
    tail = rows[start:]
    return DriftTable(rows, tuple(r for r, _ in tail),
                      float(np.mean([v for _, v in tail])), vals[-1])


# ------------------------------------------------------------ power-law fit

@dataclass(frozen=True)
class PowerLawFit:
    a: float
    eta: float
    b: float
    fit_error: float
    converged: bool
    n_points: int
    message: str = ""
    convention: str = "a * r**(-eta) + b"


def _model(r, a, eta, b):
    return a * r ** (-eta) + b


def power_law_fit(r, values, r_range: tuple[int, int] = (11, 81),
                  odd_only: bool = True) -> PowerLawFit:
    """Least-squares fit of a * r^(-eta) + b; eta > 0 means decay.

    Never raises on a failed fit: the result carries converged=False instead.
    """
    r = np.asarray(r, dtype=float)
    v = np.asarray(values, dtype=float)
    mask = (r >= r_range[0]) & (r <= r_range[1])
    if odd_only:
        mask &= (np.round(r).astype(int) % 2 == 1)
    rs, vs = r[mask], v[mask]
    order = np.argsort(rs)
    rs, vs = rs[order], vs[order]
    if len(rs) < 6:
        raise ValueError(f"need at least 6 distances in range, got {len(rs)}")
    p0 = (vs[0] if vs[0] != 0 else 1.0, 0.25, 0.0)
    try:
        popt, _ = scipy.optimize.curve_fit(_model, rs, vs, p0=p0, maxfev=20000)
        resid = vs - _model(rs, *popt)
        ok = bool(np.all(np.isfinite(popt)))
        return PowerLawFit(float(popt[0]), float(popt[1]), float(popt[2]),
                           float(np.sqrt(np.mean(resid**2))), ok, len(rs),
                           "" if ok else "non-finite parameters")
    except (RuntimeError, ValueError, scipy.optimize.OptimizeWarning) as exc:
        return PowerLawFit(math.nan, math.nan, math.nan, math.nan, False, len(rs), str(exc))


def exponent_crossing(x, eta, target: float = 0.25) -> list[float]:
    """Parameter values where eta(x) crosses ``target`` (linear interpolation)."""
    x = np.asarray(x, dtype=float)
    f = np.asarray(eta, dtype=float) - target
    good = np.isfinite(f)
    return [float(loc) for _, loc in _zero_crossings(x[good], f[good])]


def with_config(grid: SweepGrid, **changes) -> SweepGrid:
    """Copy of the grid with DmrgConfig fields replaced."""
    return replace(grid, cfg=replace(grid.cfg, **changes))
