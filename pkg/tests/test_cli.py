"""Command-line workbench: CSV schemas, manifests, reproducibility, exit codes."""

import csv
from pathlib import Path

import pytest

from thirring.cli import EXIT_CONFIG, EXIT_OK, main


def read_csv(path: Path) -> tuple[list[str], list[list[str]]]:
    with path.open() as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def test_spectrum_sweep(tmp_path):
    code = main([
        "spectrum", "--n", "3", "--m0", "10", "--xi", "0.7",
        "--g2-grid", "0:2:1", "--out", str(tmp_path),
    ])
    assert code == EXIT_OK
    header, rows = read_csv(tmp_path / "spectrum.csv")
    assert header == ["g2", "e0_exact", "e1_exact", "gap_exact", "e0_pt", "e1_pt", "gap_pt"]
    assert len(rows) == 3
    assert float(rows[0][3]) == pytest.approx(10.0, abs=1e-9)  # free gap = m0
    assert (tmp_path / "spectrum_manifest.txt").exists()


def test_spectrum_workers_match_serial(tmp_path):
    args = ["spectrum", "--n", "3", "--m0", "10", "--xi", "0.7",
            "--g2-grid", "0:2:1"]
    serial = tmp_path / "serial"
    parallel = tmp_path / "parallel"
    assert main(args + ["--out", str(serial)]) == EXIT_OK
    assert main(args + ["--workers", "2", "--out", str(parallel)]) == EXIT_OK
    assert (serial / "spectrum.csv").read_bytes() == (parallel / "spectrum.csv").read_bytes()


def test_spectrum_eigenvalue_dump(tmp_path):
    code = main([
        "spectrum", "--n", "3", "--m0", "10", "--xi", "0.7", "--g2-grid", "2",
        "--dump-eigenvalues", "--out", str(tmp_path),
    ])
    assert code == EXIT_OK
    header, rows = read_csv(tmp_path / "eigenvalues.csv")
    assert header == ["index", "energy", "qf_sector"]
    assert len(rows) == 64
    energies = [float(r[1]) for r in rows]
    assert energies == sorted(energies)
    assert {int(r[2]) for r in rows} == set(range(-3, 4))
    # a grid makes the dump ambiguous
    assert main([
        "spectrum", "--g2-grid", "0:2:1", "--dump-eigenvalues", "--out", str(tmp_path),
    ]) == EXIT_CONFIG


def test_spectrum_empty_grid(tmp_path):
    code = main(["spectrum", "--g2-grid", "", "--out", str(tmp_path)])
    assert code == EXIT_OK
    header, rows = read_csv(tmp_path / "spectrum.csv")
    assert header[0] == "g2" and rows == []


def test_critical_line(tmp_path):
    code = main([
        "critical-line", "--n", "3", "--xi", "0.7", "--m0-grid", "10",
        "--out", str(tmp_path),
    ])
    assert code == EXIT_OK
    header, rows = read_csv(tmp_path / "critical_line.csv")
    assert header == ["m0", "g2_crit_exact", "g2_crit_pt", "g2_crit_asymptotic"]
    m0, crit, pt, asym = (float(v) for v in rows[0])
    assert crit == pytest.approx(20.0, rel=0.05)
    assert pt == pytest.approx(20.04, abs=0.01)
    assert asym == 20.0


def test_vqe_exact_mode(tmp_path):
    code = main([
        "vqe", "--n", "3", "--m0", "10", "--xi", "0.7", "--g2", "5",
        "--ansatz", "GS2", "--mode", "exact", "--out", str(tmp_path),
    ])
    assert code == EXIT_OK
    header, rows = read_csv(tmp_path / "vqe.csv")
    assert rows[0][1] == "GS2"
    assert float(rows[0][7]) == pytest.approx(14.965, abs=1e-3)


def test_vqe_noisy_reproducible_from_manifest(tmp_path):
    args = [
        "vqe", "--n", "3", "--m0", "10", "--xi", "0.7", "--g2", "5",
        "--ansatz", "GS2", "--mode", "shots+noise", "--shots", "512",
        "--reps", "2", "--r-list", "1,3", "--seed", "7",
    ]
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    assert main(args + ["--out", str(out1)]) == EXIT_OK
    manifest = out1 / "vqe_manifest.txt"
    assert manifest.exists()
    assert main(["vqe", "--config", str(manifest), "--out", str(out2)]) == EXIT_OK
    assert (out1 / "vqe.csv").read_bytes() == (out2 / "vqe.csv").read_bytes()
    assert (out1 / "vqe_per_r.csv").read_bytes() == (out2 / "vqe_per_r.csv").read_bytes()
    header, rows = read_csv(out1 / "vqe_per_r.csv")
    assert header == ["g2", "ansatz", "r", "rep", "e_raw", "e_ro"]
    assert {r[2] for r in rows} == {"1", "3"}
    assert {r[3] for r in rows} == {"0", "1"}


def test_vqe_stochastic_needs_seed(tmp_path):
    code = main([
        "vqe", "--g2", "5", "--ansatz", "GS2", "--mode", "shots",
        "--out", str(tmp_path),
    ])
    assert code == EXIT_CONFIG


def test_chiral_slope_guard(tmp_path):
    code = main(["chiral", "--slope", "0.4", "--out", str(tmp_path)])
    assert code == EXIT_CONFIG


def test_malformed_inputs_are_config_errors(tmp_path):
    assert main(["spectrum", "--g2-grid", "abc", "--out", str(tmp_path)]) == EXIT_CONFIG
    assert main(["spectrum", "--g2-grid", "0:10:-1", "--out", str(tmp_path)]) == EXIT_CONFIG
    assert main(["vqe", "--g2", "1", "--ansatz", "BOGUS", "--mode", "exact",
                 "--out", str(tmp_path)]) == EXIT_CONFIG
    assert main(["spectrum", "--xi", "1.5", "--g2-grid", "0",
                 "--out", str(tmp_path)]) == EXIT_CONFIG


def test_chiral_smoke(tmp_path):
    code = main([
        "chiral", "--m0-grid", "4,2", "--out", str(tmp_path),
    ])
    assert code == EXIT_OK
    header, rows = read_csv(tmp_path / "chiral.csv")
    assert header == ["m0", "g2", "gap_exact", "gap_pt", "gap_vqe"]
    gaps = [float(r[2]) for r in rows]
    assert gaps[0] > gaps[1] > 0
    for row in rows:
        assert float(row[4]) == pytest.approx(float(row[2]), rel=0.02)


def test_dump_hamiltonian(tmp_path, capsys):
    code = main([
        "dump-hamiltonian", "--n", "3", "--m0", "10", "--xi", "0.7", "--g2", "1",
        "--out", str(tmp_path),
    ])
    assert code == EXIT_OK
    lines = (tmp_path / "hamiltonian.txt").read_text().strip().splitlines()
    assert len(lines) == 166
    assert capsys.readouterr().out.strip().splitlines() == lines
    value, letters = lines[0].rsplit(" ", 1)
    assert len(letters) == 6 and set(letters) <= set("IXYZ")
    assert value.endswith("i")


def test_config_file_with_cli_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("n = 3\nm0 = 10\nxi = 0.7\ng2_grid = 0:1:1\n")
    out = tmp_path / "out"
    code = main(["spectrum", "--config", str(cfg), "--g2-grid", "0", "--out", str(out)])
    assert code == EXIT_OK
    _, rows = read_csv(out / "spectrum.csv")
    assert len(rows) == 1  # CLI grid overrode the file's two-point grid
