"""Command-line workbench: parameter sweeps, the experiment set, CSV
persistence, and reproducibility manifests.

Subcommands: spectrum | critical-line | vqe | chiral | dump-hamiltonian.
Config files are flat `key = value` text; command-line flags override file
values.  Every run writes a manifest that can be fed back via --config to
reproduce stochastic outputs bit-exactly.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .circuits import NoiseCalibration
from .exact import BracketError, critical_coupling, mass_gap_exact, sector_ground_energy
from .lattice import LatticeParams, build_hamiltonian, epsilon_sums
from .mitigation import mitigated_energy
from .pauli import serialize_sum
from .perturbation import pt_report
from .vqe import EvalConfig, EnergyEvaluator, get_ansatz, minimize

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_PARTIAL = 4

DEFAULT_CNOT_DEPOL = 0.01
DEFAULT_P01 = 0.03
DEFAULT_P10 = 0.01


class ConfigError(ValueError):
    pass


def _parse_grid(spec: str) -> list[float]:
    spec = spec.strip()
    try:
        if ":" in spec:
            parts = spec.split(":")
            if len(parts) != 3:
                raise ConfigError(f"grid {spec!r} must be start:stop:step or a comma list")
            start, stop, step = (float(p) for p in parts)
            if step <= 0:
                raise ConfigError("grid step must be positive")
            n = int(round((stop - start) / step))
            return [start + k * step for k in range(n + 1) if start + k * step <= stop + 1e-12]
        return [float(p) for p in spec.split(",") if p.strip()]
    except ValueError as exc:
        raise ConfigError(f"malformed grid {spec!r}: {exc}") from exc


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _read_config(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"malformed config line: {raw!r}")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


_STR_KEYS = ("g2_grid", "m0_grid", "ansatz", "mode", "r_list", "calib", "out", "config")
_INT_KEYS = ("n", "shots", "reps", "seed", "workers")
_FLOAT_KEYS = ("m0", "g2", "xi", "slope", "g2_max")
_BOOL_KEYS = ("ir_cutoff", "full_search", "tied", "dump_eigenvalues")


def _merge_config(args: argparse.Namespace) -> dict:
    cfg: dict = {}
    if getattr(args, "config", None):
        raw = _read_config(args.config)
        for key, value in raw.items():
            if key in _INT_KEYS:
                cfg[key] = int(value)
            elif key in _FLOAT_KEYS:
                cfg[key] = float(value)
            elif key in _BOOL_KEYS:
                cfg[key] = _parse_bool(value)
            elif key in _STR_KEYS:
                cfg[key] = value
            # unknown keys (e.g. manifest metadata) are ignored
    for key, value in vars(args).items():
        if key in ("command", "config"):
            continue
        if value is not None:
            cfg[key] = value
    return cfg


def _write_manifest(outdir: Path, command: str, cfg: dict) -> None:
    lines = [
        f"# manifest for 'thirring {command}' (workbench {__version__})",
        f"# written {time.strftime('%Y-%m-%dT%H:%M:%S')}",
        f"command = {command}",
    ]
    for key in sorted(cfg):
        if key in ("out", "workers"):
            continue
        value = cfg[key]
        if isinstance(value, bool):
            value = "true" if value else "false"
        lines.append(f"{key} = {value}")
    (outdir / f"{command.replace('-', '_')}_manifest.txt").write_text(
        "\n".join(lines) + "\n", encoding="utf-8"
    )


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _require(cfg: dict, key: str, default=None):
    if key in cfg:
        return cfg[key]
    if default is not None:
        return default
    raise ConfigError(f"missing required setting {key!r}")


def _params_from_cfg(cfg: dict, m0: float | None = None, g2: float | None = None) -> LatticeParams:
    return LatticeParams(
        N=int(_require(cfg, "n", 3)),
        m0=float(cfg.get("m0", 10.0) if m0 is None else m0),
        g2=float(cfg.get("g2", 0.0) if g2 is None else g2),
        xi=float(cfg.get("xi", 0.7)),
        ir_cutoff=bool(cfg.get("ir_cutoff", False)),
    )


def _load_calibration(cfg: dict, qubit_count: int) -> NoiseCalibration:
    if cfg.get("calib"):
        calib = NoiseCalibration.from_file(cfg["calib"])
        if calib.qubit_count != qubit_count:
            raise ConfigError("calibration register size mismatch")
        return calib
    return NoiseCalibration.uniform(qubit_count, DEFAULT_P01, DEFAULT_P10, DEFAULT_CNOT_DEPOL)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _spectrum_point(task: tuple) -> tuple:
    cfg, g2 = task
    params = _params_from_cfg(cfg, g2=g2)
    e0 = sector_ground_energy(params, 0)
    e1 = sector_ground_energy(params, 1)
    rep = pt_report(params)
    return (g2, e0, e1, e1 - e0, rep.E0, rep.E1, rep.gap)


def cmd_spectrum(cfg: dict, outdir: Path) -> int:
    grid = _parse_grid(_require(cfg, "g2_grid", "0:22:0.5"))
    _params_from_cfg(cfg, g2=0.0)  # static configuration validated up front
    header = ("g2", "e0_exact", "e1_exact", "gap_exact", "e0_pt", "e1_pt", "gap_pt")
    failures = 0
    tasks = [(cfg, g2) for g2 in grid]
    workers = int(cfg.get("workers", 1))
    results = []
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            futures = [pool.submit(_spectrum_point, task) for task in tasks]
            for task, fut in zip(tasks, futures):
                try:
                    results.append(fut.result())
                except Exception as exc:
                    print(f"spectrum: point g2={task[1]} failed: {exc}", file=sys.stderr)
                    failures += 1
    else:
        for task in tasks:
            try:
                results.append(_spectrum_point(task))
            except Exception as exc:  # keep sweeping; report partial at exit
                print(f"spectrum: point g2={task[1]} failed: {exc}", file=sys.stderr)
                failures += 1
    rows = [tuple(f"{v:.12g}" for v in row) for row in results]
    _write_csv(outdir / "spectrum.csv", header, rows)
    if cfg.get("dump_eigenvalues"):
        if len(grid) != 1:
            raise ConfigError("--dump-eigenvalues needs a single-point g2 grid")
        from .exact import eigenvalue_table

        table = eigenvalue_table(_params_from_cfg(cfg, g2=grid[0]))
        _write_csv(outdir / "eigenvalues.csv", ("index", "energy", "qf_sector"),
                   [(str(i), f"{e:.12g}", str(q)) for i, e, q in table])
    _write_manifest(outdir, "spectrum", cfg)
    return EXIT_PARTIAL if failures else EXIT_OK


def cmd_critical_line(cfg: dict, outdir: Path) -> int:
    grid = _parse_grid(_require(cfg, "m0_grid", "1,2,4,6,8,10"))
    _params_from_cfg(cfg, m0=1.0, g2=0.0)  # static configuration validated up front
    g2_max = float(cfg.get("g2_max", 64.0))
    header = ("m0", "g2_crit_exact", "g2_crit_pt", "g2_crit_asymptotic")
    rows, failures = [], 0
    for m0 in grid:
        try:
            params = _params_from_cfg(cfg, m0=m0, g2=0.0)
            crit = critical_coupling(params, g2_max)
            eps1, _ = epsilon_sums(params)
            pt = 2.0 * params.N * params.m0_effective / eps1
            rows.append(tuple(f"{v:.12g}" for v in (m0, crit, pt, 2.0 * m0)))
        except (BracketError, ValueError) as exc:
            print(f"critical-line: m0={m0} failed: {exc}", file=sys.stderr)
            failures += 1
    _write_csv(outdir / "critical_line.csv", header, rows)
    _write_manifest(outdir, "critical-line", cfg)
    return EXIT_PARTIAL if failures else EXIT_OK


def cmd_vqe(cfg: dict, outdir: Path) -> int:
    grid = _parse_grid(_require(cfg, "g2_grid", "1,5,10,15"))
    ansatz_ids = [a.strip() for a in str(_require(cfg, "ansatz", "GS2")).split(",")]
    mode = str(cfg.get("mode", "exact"))
    shots = int(cfg.get("shots", 8192))
    reps = int(cfg.get("reps", 5))
    r_list = [int(r) for r in str(cfg.get("r_list", "1,3,5,7,9")).split(",")]
    seed = cfg.get("seed")
    if mode != "exact" and seed is None:
        raise ConfigError("stochastic modes need --seed for reproducibility")
    full_search = bool(cfg.get("full_search", False))

    if mode == "shots+noise" and not cfg.get("calib"):
        # placeholder calibration: representative magnitudes, not device data;
        # echoed here so the manifest records the rates in force
        cfg.setdefault("default_noise_p01", DEFAULT_P01)
        cfg.setdefault("default_noise_p10", DEFAULT_P10)
        cfg.setdefault("default_noise_cnot_depol", DEFAULT_CNOT_DEPOL)

    header = ("g2", "ansatz", "mode", "theta_star", "e_raw", "e_ro", "e_zne",
              "e_exact_mode", "stderr")
    per_r_header = ("g2", "ansatz", "r", "rep", "e_raw", "e_ro")
    rows, per_r_rows = [], []
    seed_seq = np.random.SeedSequence(seed if seed is None else int(seed))
    point_seeds = seed_seq.spawn(len(grid) * len(ansatz_ids))
    idx = 0
    for g2 in grid:
        params = _params_from_cfg(cfg, g2=g2)
        h = build_hamiltonian(params)
        for ansatz_id in ansatz_ids:
            point_seed = int(point_seeds[idx].generate_state(1)[0])
            idx += 1
            ansatz = get_ansatz(ansatz_id)
            exact_res = minimize(ansatz, h, EvalConfig("exact"), full_search=full_search)
            if mode == "exact":
                rows.append((f"{g2:.12g}", ansatz_id, mode,
                             f"{exact_res.theta_star:.12g}", "", "",
                             "", f"{exact_res.energy:.12g}", "0"))
                continue
            calib = _load_calibration(cfg, params.qubit_count)
            report = mitigated_energy(ansatz_id, params, calib, r_list, shots, reps,
                                      point_seed)
            rows.append((f"{g2:.12g}", ansatz_id, mode, f"{report.theta_star:.12g}",
                         f"{report.raw:.12g}", f"{report.ro_corrected:.12g}",
                         f"{report.extrapolated:.12g}", f"{exact_res.energy:.12g}",
                         f"{report.stderr:.12g}"))
            for r in r_list:
                for rep_i, e_ro in enumerate(report.per_r_energies[r]):
                    raw = f"{report.per_rep_raw[rep_i]:.12g}" if r == 1 else ""
                    per_r_rows.append((f"{g2:.12g}", ansatz_id, str(r), str(rep_i),
                                       raw, f"{e_ro:.12g}"))
    _write_csv(outdir / "vqe.csv", header, rows)
    if per_r_rows:
        _write_csv(outdir / "vqe_per_r.csv", per_r_header, per_r_rows)
    _write_manifest(outdir, "vqe", cfg)
    return EXIT_OK


def cmd_chiral(cfg: dict, outdir: Path) -> int:
    slope = float(cfg.get("slope", 2.0 / 3.0))
    if slope <= 0.5:
        raise ConfigError(
            f"sampling-line slope {slope} must exceed the critical-line slope 1/2")
    grid = _parse_grid(_require(cfg, "m0_grid", "8,6,4,2,1,0.5,0.2,0.1,0.05"))
    cfg.setdefault("xi", 0.3)
    cfg.setdefault("ir_cutoff", True)
    full_search = bool(cfg.get("full_search", True))
    header = ("m0", "g2", "gap_exact", "gap_pt", "gap_vqe")
    rows = []
    for m0 in grid:
        g2 = m0 / slope
        params = _params_from_cfg(cfg, m0=m0, g2=g2)
        gap_exact = mass_gap_exact(params)
        if gap_exact <= 0.0:
            raise ConfigError(
                f"sampling point m0={m0}, g2={g2:.4g} fell below the critical line")
        gap_pt = pt_report(params).gap
        h = build_hamiltonian(params)
        res_gs = minimize(get_ansatz(str(cfg.get("gs_ansatz", "GS2"))), h,
                          EvalConfig("exact"), full_search=full_search)
        res_es = minimize(get_ansatz(str(cfg.get("es_ansatz", "ES2"))), h,
                          EvalConfig("exact"), full_search=full_search)
        rows.append(tuple(f"{v:.12g}" for v in
                          (m0, g2, gap_exact, gap_pt, res_es.energy - res_gs.energy)))
    _write_csv(outdir / "chiral.csv", header, rows)
    _write_manifest(outdir, "chiral", cfg)
    return EXIT_OK


def cmd_dump_hamiltonian(cfg: dict, outdir: Path) -> int:
    params = _params_from_cfg(cfg)
    text = serialize_sum(build_hamiltonian(params))
    target = outdir / "hamiltonian.txt"
    target.write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    _write_manifest(outdir, "dump-hamiltonian", cfg)
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thirring",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="flat key=value config file (flags override)")
        p.add_argument("--n", type=int, help="site count N (default 3)")
        p.add_argument("--m0", type=float, help="bare mass")
        p.add_argument("--xi", type=float, help="Wilson parameter (default 0.7)")
        p.add_argument("--ir-cutoff", dest="ir_cutoff", action="store_const", const=True,
                       help="add 1/N to the mass everywhere")
        p.add_argument("--out", help="output directory (default .)")
        p.add_argument("--seed", type=int, help="master seed for stochastic modes")

    p = sub.add_parser("spectrum", help="g2 sweep of exact and perturbative energies; "
                       "CSV columns: g2,e0_exact,e1_exact,gap_exact,e0_pt,e1_pt,gap_pt")
    add_common(p)
    p.add_argument("--g2-grid", dest="g2_grid", help="comma list or start:stop:step")
    p.add_argument("--workers", type=int, help="parallel sweep workers")
    p.add_argument("--dump-eigenvalues", dest="dump_eigenvalues", action="store_const",
                   const=True, help="also write eigenvalues.csv (index,energy,qf_sector); "
                   "needs a single-point grid")

    p = sub.add_parser("critical-line", help="critical coupling per bare mass; CSV: "
                       "m0,g2_crit_exact,g2_crit_pt,g2_crit_asymptotic")
    add_common(p)
    p.add_argument("--m0-grid", dest="m0_grid", help="comma list or start:stop:step")
    p.add_argument("--g2-max", dest="g2_max", type=float, help="scan ceiling (default 64)")

    p = sub.add_parser("vqe", help="variational energies with optional noise and "
                       "mitigation; CSV: g2,ansatz,mode,theta_star,e_raw,e_ro,e_zne,"
                       "e_exact_mode,stderr plus per-r rows g2,ansatz,r,rep,e_raw,e_ro")
    add_common(p)
    p.add_argument("--g2", type=float, help="single coupling (alternative to the grid)")
    p.add_argument("--g2-grid", dest="g2_grid")
    p.add_argument("--ansatz", help="comma list from GS2,GS1,ES2,ES1")
    p.add_argument("--mode", choices=("exact", "shots", "shots+noise"))
    p.add_argument("--shots", type=int)
    p.add_argument("--reps", type=int, help="repetitions for error bars (default 5)")
    p.add_argument("--r-list", dest="r_list", help="odd CNOT multiplicities, e.g. 1,3,5,7,9")
    p.add_argument("--calib", help="noise calibration file")
    p.add_argument("--full-search", dest="full_search", action="store_const", const=True,
                   help="full multi-parameter simplex instead of the tie rule")

    p = sub.add_parser("chiral", help="gap along the sampling line m0 = slope*g2; CSV: "
                       "m0,g2,gap_exact,gap_pt,gap_vqe")
    add_common(p)
    p.add_argument("--m0-grid", dest="m0_grid")
    p.add_argument("--slope", type=float, help="sampling-line slope (default 2/3, must exceed 1/2)")

    p = sub.add_parser("dump-hamiltonian", help="write the simplified operator, one "
                       "'coeff letterstring' term per line")
    add_common(p)
    p.add_argument("--g2", type=float)

    return parser


_COMMANDS: dict[str, Callable[[dict, Path], int]] = {
    "spectrum": cmd_spectrum,
    "critical-line": cmd_critical_line,
    "vqe": cmd_vqe,
    "chiral": cmd_chiral,
    "dump-hamiltonian": cmd_dump_hamiltonian,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _merge_config(args)
        outdir = Path(cfg.get("out", "."))
        outdir.mkdir(parents=True, exist_ok=True)
        if "g2" in cfg and "g2_grid" not in cfg and args.command == "vqe":
            cfg["g2_grid"] = str(cfg["g2"])
        return _COMMANDS[args.command](cfg, outdir)
    except (ConfigError, KeyError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, np.linalg.LinAlgError, BracketError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
