"""Command-line entry point: ``spin1bell {gs,scan,crit,oracle,aklt-check}``.

Exit codes: 0 success, 2 non-convergence, 3 invalid input.  Numbers are
printed with 12 significant digits; CSV files carry '#'-prefixed metadata.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import fields

import numpy as np

from . import __version__
from .criticality import (RULES, ScanResult, SweepGrid, derivative, find_critical_points,
                          sweep)
from .ed import FiniteChainSpec, aklt_exact_imps, ed_ground_state, ed_observables
from .idmrg import DmrgConfig, idmrg_run
from .imps import check_canonical, entanglement_entropy, save_checkpoint
from .mpo import aklt_hamiltonian_mpo, xxz_d_hamiltonian_mpo
from .observables import bell_correlation, bound_check, c1, c2, energy_per_site, string_order

EXIT_OK, EXIT_UNCONVERGED, EXIT_INVALID = 0, 2, 3

# keys a config file may set, per subcommand (they mirror the long flags)
DMRG_KEYS = {"chi", "seed", "tol", "max_sweeps", "lanczos_tol", "initial_state"}
CONFIG_KEYS = {
    "gs": DMRG_KEYS | {"jz", "d", "checkpoint", "allow_unconverged"},
    "scan": DMRG_KEYS | {"param", "jz", "d", "start", "stop", "step", "values", "r",
                         "string_r", "out", "report", "workers", "chunk_size", "audit_every",
                         "rules"},
    "crit": {"csv", "r", "rules", "report"},
    "oracle": DMRG_KEYS | {"n", "jz", "d", "r", "boundary"},
    "aklt-check": DMRG_KEYS | {"r"},
}
DEFAULTS = {
    "chi": 100, "seed": 0, "tol": 1e-7, "max_sweeps": 2000, "lanczos_tol": 1e-10,
    "initial_state": "random", "jz": 1.0, "d": 0.0, "checkpoint": "checkpoint.json",
    "allow_unconverged": False, "param": "J_z", "start": None, "stop": None, "step": 0.02,
    "values": None, "r": None, "string_r": 40, "out": "scan.csv", "report": None,
    "workers": 1, "chunk_size": None, "audit_every": 10, "rules": None, "csv": None,
    "n": 8, "boundary": "open",
}


class InvalidInput(ValueError):
    pass


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    return str(v)


def _add_dmrg_flags(p):
    p.add_argument("--chi", type=int, help="maximal bond dimension (default 100)")
    p.add_argument("--seed", type=int, help="seed of the random initial state (default 0)")
    p.add_argument("--tol", type=float, help="relative entropy tolerance (default 1e-7)")
    p.add_argument("--max-sweeps", dest="max_sweeps", type=int,
                   help="maximal number of unit-cell insertions")
    p.add_argument("--lanczos-tol", dest="lanczos_tol", type=float)
    p.add_argument("--initial-state", dest="initial_state",
                   choices=["random", "neel_like"])
    p.add_argument("--config", help="JSON file with option values; flags override it")
    p.add_argument("--verbose", action="store_true", help="log every iDMRG step")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spin1bell",
        description="iDMRG for the spin-1 XXZ chain with single-ion anisotropy and "
                    "the d=3 Bell correlation.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gs", help="ground state at one (J_z, D) point")
    p.add_argument("--jz", type=float)
    p.add_argument("--d", type=float)
    p.add_argument("--checkpoint", help="where to write the state (default checkpoint.json)")
    p.add_argument("--allow-unconverged", dest="allow_unconverged", action="store_true",
                   default=None)
    _add_dmrg_flags(p)

    p = sub.add_parser("scan", help="sweep J_z or D and detect transitions")
    p.add_argument("--param", choices=["J_z", "D"])
    p.add_argument("--jz", type=float, help="J_z when sweeping D")
    p.add_argument("--d", type=float, help="D when sweeping J_z")
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--step", type=float)
    p.add_argument("--values", type=float, nargs="+", help="explicit grid")
    p.add_argument("--r", type=int, nargs="+", help="distances to record (default 1 3 5)")
    p.add_argument("--string-r", dest="string_r", type=int)
    p.add_argument("--out", help="CSV output (default scan.csv)")
    p.add_argument("--report", help="critical-point report (JSON); default <out>.crit.json")
    p.add_argument("--workers", type=int)
    p.add_argument("--chunk-size", dest="chunk_size", type=int,
                   help="length of each warm-start chain (fixes the output independently "
                        "of --workers)")
    p.add_argument("--audit-every", dest="audit_every", type=int)
    p.add_argument("--rules", nargs="+", choices=list(RULES))
    _add_dmrg_flags(p)

    p = sub.add_parser("crit", help="re-run transition detection on a scan CSV")
    p.add_argument("--csv")
    p.add_argument("--r", type=int, nargs="+")
    p.add_argument("--rules", nargs="+", choices=list(RULES))
    p.add_argument("--report")
    p.add_argument("--config")

    p = sub.add_parser("oracle", help="exact diagonalization next to iDMRG")
    p.add_argument("--n", type=int, help="chain length, 2..12 (default 8)")
    p.add_argument("--jz", type=float)
    p.add_argument("--d", type=float)
    p.add_argument("--r", type=int, nargs="+")
    p.add_argument("--boundary", choices=["open", "periodic"])
    _add_dmrg_flags(p)

    p = sub.add_parser("aklt-check", help="iDMRG on the AKLT chain against the exact state")
    p.add_argument("--r", type=int, nargs="+", help="string-order distance (default 50)")
    _add_dmrg_flags(p)
    return parser


def resolve(args) -> dict:
    """Merge defaults, the config file, and explicit flags (in that order)."""
    opts = {k: DEFAULTS.get(k) for k in CONFIG_KEYS[args.command]}
    path = getattr(args, "config", None)
    if path:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidInput(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise InvalidInput("config file must hold a JSON object")
        unknown = sorted(set(data) - CONFIG_KEYS[args.command])
        if unknown:
            raise InvalidInput(f"unknown config keys for {args.command}: {', '.join(unknown)}")
        opts.update(data)
    for k in CONFIG_KEYS[args.command]:
        v = getattr(args, k, None)
        if v is not None:
            opts[k] = v
    return opts


def dmrg_config(opts, verbose=False) -> DmrgConfig:
    try:
        return DmrgConfig(chi_max=int(opts["chi"]), entropy_rel_tol=float(opts["tol"]),
                          max_sweeps=int(opts["max_sweeps"]),
                          lanczos_tol=float(opts["lanczos_tol"]), seed=int(opts["seed"]),
                          initial_state=opts["initial_state"], verbose=verbose)
    except (TypeError, ValueError) as exc:
        raise InvalidInput(str(exc)) from exc


def _print_table(rows, out):
    for row in rows:
        print("  ".join(fmt(v) for v in row), file=out)


def cmd_gs(opts, args, out) -> int:
    cfg = dmrg_config(opts, args.verbose)
    jz, d = float(opts["jz"]), float(opts["d"])
    h = xxz_d_hamiltonian_mpo(1.0, jz, d)
    res = idmrg_run(h, cfg)
    st = res.state
    rep = check_canonical(st)
    _print_table([
        ("J_z", jz), ("D", d), ("chi", st.chi), ("converged", res.converged),
        ("sweeps", res.sweeps_used), ("energy_per_site", res.energy_per_site),
        ("entropy", entanglement_entropy(st.lambda_A)),
        ("truncation_error", res.truncation_error),
        ("canonical_deviation", rep.max_deviation),
        ("bell_1", bell_correlation(st, 1)),
    ], out)
    save_checkpoint(st, opts["checkpoint"], metadata={
        "J_z": jz, "D": d, "chi_max": cfg.chi_max, "seed": cfg.seed,
        "energy_per_site": res.energy_per_site, "converged": res.converged,
        "sweeps": res.sweeps_used})
    print(f"checkpoint  {opts['checkpoint']}", file=out)
    if not res.converged and not opts["allow_unconverged"]:
        print("error: iDMRG did not converge", file=sys.stderr)
        return EXIT_UNCONVERGED
    return EXIT_OK


def _scan_grid(opts, cfg) -> SweepGrid:
    if opts["values"]:
        values = [float(v) for v in opts["values"]]
    else:
        start, stop, step = opts["start"], opts["stop"], opts["step"]
        if start is None or stop is None:
            raise InvalidInput("scan needs --start/--stop or --values")
        if step is None or step <= 0 or stop < start:
            raise InvalidInput("need --step > 0 and --stop >= --start")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        # rounding keeps the grid values identical across platforms and runs
        values = [round(start + k * step, 10) for k in range(n)]
    try:
        return SweepGrid(parameter=opts["param"], values=tuple(values),
                         J_z=float(opts["jz"]), D=float(opts["d"]),
                         r_list=tuple(opts["r"] or (1, 3, 5)), cfg=cfg,
                         audit_every=int(opts["audit_every"]),
                         chunk_size=opts["chunk_size"], string_r=int(opts["string_r"]))
    except (TypeError, ValueError) as exc:
        raise InvalidInput(str(exc)) from exc


def detect(result: ScanResult, r_list, rules) -> list[dict]:
    records = []
    for r in r_list:
        x, y = result.series("bell", r)
        for cp in find_critical_points(x, y, rules, r=r):
            records.append(cp.record())
    return records


def write_derivatives(result: ScanResult, path) -> bool:
    x = result.x()
    if len(x) < 5:
        return False
    cols, data = ["parameter_value"], []
    xi = None
    for r in result.r_list:
        _, y = result.series("bell", r)
        xi, d1 = derivative(x, y, 1)
        _, d2 = derivative(x, y, 2)
        cols += [f"dbell_{r}", f"d2bell_{r}"]
        data += [d1, d2]
    with open(path, "w") as fh:
        fh.write(f"# parameter={result.parameter}\n")
        fh.write(",".join(cols) + "\n")
        for k, xv in enumerate(xi):
            fh.write(",".join([fmt(xv)] + [fmt(col[k]) for col in data]) + "\n")
    return True


def cmd_scan(opts, args, out) -> int:
    cfg = dmrg_config(opts, args.verbose)
    grid = _scan_grid(opts, cfg)
    result = sweep(grid, workers=int(opts["workers"]))
    result.metadata["version"] = __version__
    result.write_csv(opts["out"])
    rules = opts["rules"] or list(RULES)
    records = detect(result, grid.r_list, rules)
    report = opts["report"] or f"{opts['out']}.crit.json"
    with open(report, "w") as fh:
        json.dump(records, fh, indent=1)
    deriv = f"{opts['out']}.deriv.csv"
    has_deriv = write_derivatives(result, deriv)
    n_bad = sum(not p.converged for p in result.points)
    print(f"rows  {len(result.points)}", file=out)
    print(f"unconverged  {n_bad}", file=out)
    print(f"bound_violations  {sum(bound_check(v).violated for p in result.points for v in p.bell.values())}",
          file=out)
    print(f"csv  {opts['out']}", file=out)
    if has_deriv:
        print(f"derivatives  {deriv}", file=out)
    print(f"report  {report}", file=out)
    for rec in records:
        print(f"{rec['kind']}  r={rec['r']}  location={fmt(rec['location'])}  "
              f"uncertainty={fmt(rec['uncertainty'])}  strength={fmt(rec['strength'])}", file=out)
    return EXIT_OK


def cmd_crit(opts, args, out) -> int:
    if not opts["csv"]:
        raise InvalidInput("crit needs --csv")
    try:
        result = ScanResult.read_csv(opts["csv"])
    except (OSError, KeyError, ValueError) as exc:
        raise InvalidInput(f"cannot read scan CSV: {exc}") from exc
    r_list = opts["r"] or list(result.r_list)
    missing = [r for r in r_list if r not in result.r_list]
    if missing:
        raise InvalidInput(f"distances {missing} not in {opts['csv']}")
    records = detect(result, r_list, opts["rules"] or list(RULES))
    if opts["report"]:
        with open(opts["report"], "w") as fh:
            json.dump(records, fh, indent=1)
    for rec in records:
        print(f"{rec['kind']}  r={rec['r']}  location={fmt(rec['location'])}  "
              f"uncertainty={fmt(rec['uncertainty'])}  estimator={rec['estimator']}", file=out)
    return EXIT_OK


def cmd_oracle(opts, args, out) -> int:
    try:
        spec = FiniteChainSpec(N=int(opts["n"]), boundary=opts["boundary"],
                               Jz=float(opts["jz"]), D=float(opts["d"]))
    except ValueError as exc:
        raise InvalidInput(str(exc)) from exc
    n = spec.N
    r_list = opts["r"] or [1]
    if max(r_list) >= n or min(r_list) < 1:
        raise InvalidInput(f"distances must lie in [1, {n - 1}]")
    cfg = dmrg_config(opts, args.verbose)
    e0, psi = ed_ground_state(spec)
    h = xxz_d_hamiltonian_mpo(1.0, spec.Jz, spec.D)
    res = idmrg_run(h, cfg)
    st = res.state
    rows = [("quantity", "r", "ed", "idmrg", "abs_diff", "bound"),
            ("ground_energy", "-", e0, "-", "-", "-"),
            ("energy_per_site", "-", e0 / n, res.energy_per_site,
             abs(e0 / n - res.energy_per_site), "-")]
    for r in r_list:
        i = (n - r - 1) // 2
        ed = ed_observables(spec, psi, i, i + r)
        b = bell_correlation(st, r)
        rows.append(("bell", r, ed.bell, b, abs(ed.bell - b),
                     f"{bound_check(ed.bell).label}/{bound_check(b).label}"))
        for name, ev, iv in (("c1", ed.c1, c1(st, r)), ("c2", ed.c2, c2(st, r))):
            rows.append((name, r, ev, iv, abs(ev - iv), "-"))
    _print_table(rows, out)
    if not res.converged and not opts.get("allow_unconverged"):
        print("error: iDMRG did not converge", file=sys.stderr)
        return EXIT_UNCONVERGED
    return EXIT_OK


def cmd_aklt_check(opts, args, out) -> int:
    if opts["chi"] == DEFAULTS["chi"]:
        opts["chi"] = 10
    cfg = dmrg_config(opts, args.verbose)
    r = (opts["r"] or [50])[0]
    h = aklt_hamiltonian_mpo()
    res = idmrg_run(h, cfg)
    st = res.state
    exact = aklt_exact_imps()
    lam = np.sort(st.lambda_A)[::-1]
    ref = exact.lambda_A
    lam_err = (float(np.max(np.abs(lam[:2] - ref))) + float(np.sum(lam[2:] ** 2))
               if len(lam) >= 2 else 1.0)
    checks = [
        ("energy_per_site", res.energy_per_site, -2 / 3, 1e-6),
        ("schmidt_deviation", lam_err, 0.0, 1e-6),
        (f"string_order_{r}", string_order(st, r), string_order(exact, r), 1e-4),
        ("entropy", entanglement_entropy(st.lambda_A), math.log(2), 1e-6),
        ("energy_exact_state", energy_per_site(exact, h), -2 / 3, 1e-12),
    ]
    ok = res.converged
    print("quantity  value  reference  status", file=out)
    for name, val, target, tol in checks:
        good = abs(val - target) <= tol
        ok &= good
        print(f"{name}  {fmt(val)}  {fmt(target)}  {'ok' if good else 'FAIL'}", file=out)
    if not res.converged:
        print("error: iDMRG did not converge", file=sys.stderr)
        return EXIT_UNCONVERGED
    return EXIT_OK if ok else EXIT_UNCONVERGED


COMMANDS = {"gs": cmd_gs, "scan": cmd_scan, "crit": cmd_crit, "oracle": cmd_oracle,
            "aklt-check": cmd_aklt_check}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with code 2
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    if getattr(args, "verbose", False):
        logging.basicConfig(level=logging.INFO, format="%(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](resolve(args), args, out)
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
