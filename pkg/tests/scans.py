"""Parameter sweeps behind the acceptance suite, cached as CSV.

Each sweep is stored in tests/scan_data/<name>.csv together with a fingerprint
of its grid and iDMRG settings; a cached file is only reused when the
fingerprint matches.  Regenerate everything (hours on one core) with

    python tests/scans.py all
"""

import hashlib
import sys
import time
from pathlib import Path

import numpy as np

from spin1bell.criticality import ScanResult, SweepGrid, sweep
from spin1bell.idmrg import DmrgConfig

DATA = Path(__file__).with_name("scan_data")


def _grid(start, stop, step):
    n = int(round((stop - start) / step)) + 1
    return tuple(round(start + k * step, 10) for k in range(n))


BELL_R = (1, 2, 3, 4, 5, 10, 20)
ODD_TAIL = tuple(range(11, 82, 2))

SCANS = {
    # the three lines of the phase diagram, coarse, for the local-realism bound
    "bound_d0": SweepGrid("J_z", _grid(-2.0, 3.0, 0.25), D=0.0, r_list=BELL_R,
                          cfg=DmrgConfig(chi_max=40), chunk_size=1),
    "bound_jz1": SweepGrid("D", _grid(-1.0, 2.0, 0.25), J_z=1.0, r_list=BELL_R,
                           cfg=DmrgConfig(chi_max=40), chunk_size=1),
    "bound_jzm01": SweepGrid("D", _grid(-3.0, 0.0, 0.25), J_z=-0.1, r_list=BELL_R,
                             cfg=DmrgConfig(chi_max=40), chunk_size=1),
    # ferromagnet to XY1; every point cold, since a warm start from the fully
    # polarised state cannot leave its magnetisation sector
    "first_order": SweepGrid("J_z", _grid(-1.1, -0.9, 0.02), D=0.0, r_list=(1,),
                             cfg=DmrgConfig(chi_max=40), chunk_size=1),
    "haldane_neel": SweepGrid("J_z", _grid(1.0, 1.4, 0.02), D=0.0, r_list=(1,),
                              cfg=DmrgConfig(chi_max=100)),
    "haldane_afm_d": SweepGrid("D", _grid(-0.5, -0.1, 0.02), J_z=1.0, r_list=(1,),
                               cfg=DmrgConfig(chi_max=60)),
    "gaussian": SweepGrid("D", _grid(0.85, 1.02, 0.01), J_z=1.0, r_list=(1, 11, 21, 31, 41),
                          cfg=DmrgConfig(chi_max=100)),
    "xy1_xy2": SweepGrid("D", _grid(-2.6, -1.6, 0.05), J_z=-0.1, r_list=(1,),
                         cfg=DmrgConfig(chi_max=60)),
    "bkt": SweepGrid("J_z", _grid(-0.2, 0.25, 0.05), D=0.0, r_list=ODD_TAIL,
                     cfg=DmrgConfig(chi_max=100)),
}


def fingerprint(grid: SweepGrid) -> str:
    return hashlib.sha256(repr(grid).encode()).hexdigest()[:16]


def path(name: str) -> Path:
    return DATA / f"{name}.csv"


def cached(name: str) -> ScanResult | None:
    p = path(name)
    if not p.exists():
        return None
    res = ScanResult.read_csv(p)
    if res.metadata.get("fingerprint") != fingerprint(SCANS[name]):
        return None
    return res


def load(name: str) -> ScanResult:
    """Cached sweep, computed (and stored) when missing or stale."""
    res = cached(name)
    if res is None:
        grid = SCANS[name]
        t0 = time.time()
        res = sweep(grid)
        res.metadata["scan"] = name
        res.metadata["fingerprint"] = fingerprint(grid)
        res.metadata["seconds"] = f"{time.time() - t0:.0f}"
        DATA.mkdir(exist_ok=True)
        res.write_csv(path(name))
        res = ScanResult.read_csv(path(name))
    return res


def bell(res: ScanResult, r: int):
    x, y = res.series("bell", r)
    return np.asarray(x), np.asarray(y)


if __name__ == "__main__":
    names = list(SCANS) if sys.argv[1:] == ["all"] else sys.argv[1:]
    for name in names:
        t = time.time()
        res = load(name)
        bad = sum(not p.converged for p in res.points)
        print(f"{name}: {len(res.points)} points, {bad} unconverged, {time.time() - t:.0f} s",
              flush=True)
