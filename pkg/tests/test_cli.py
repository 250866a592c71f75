import filecmp
import subprocess
import sys

import numpy as np
import pytest

from helmbem.bench import gen_sphere_cube, line_grid, sphere_rigid_planewave, with_evaluation_grid
from helmbem.cli import EXIT_INPUT, EXIT_OK, EXIT_STEPS, main
from helmbem.deck import SourceSpec, make_job, read_deck, write_job
from helmbem.postprocess import read_outputs
from helmbem.run import RunSettings, run_job

FREQS = [60.0, 90.0, 120.0]


def _deck(tmp_path, freqs=FREQS, name="case", **kw):
    pts, conn = line_grid((0, 0, 1.5), (0, 0, 2.5), 3)
    mesh = with_evaluation_grid(gen_sphere_cube(4), pts, conn)
    d = tmp_path / name
    d.mkdir()
    job = make_job(mesh, freqs, sources=[SourceSpec("plane", (0, 0, 1), 1.0)], solver="direct", **kw)
    return d, write_job(job, str(d))


def _step_files(root, n):
    d = root / "be.out" / f"be.{n}"
    return [d / f for f in ("pBoundary", "vBoundary", "pEvalGrid", "vEvalGrid")]


def test_full_run_writes_steps_and_log(tmp_path):
    d, deck = _deck(tmp_path)
    assert main([deck, "-q"]) == EXIT_OK
    assert (d / "NC.out").exists()
    for n in (1, 2, 3):
        assert all(f.exists() for f in _step_files(d, n))
    log = (d / "NC.out").read_text()
    assert "3 of 3 frequency steps solved" in log
    # the boundary pressure is the physical scattered-plus-incident field
    out = read_outputs(d, 2)
    job = read_deck(deck)
    bnd = job.mesh.boundary()
    mid = bnd.midpoints / np.linalg.norm(bnd.midpoints, axis=1)[:, None]
    ref = sphere_rigid_planewave(mid, 2 * np.pi * FREQS[1] / 340.0)
    assert np.max(np.abs(out["pBoundary"][1][:, 0] - ref)) <= 0.1 * np.max(np.abs(ref))


def test_split_ranges_match_full_run(tmp_path):
    d_full, deck_full = _deck(tmp_path, name="full")
    d_split, deck_split = _deck(tmp_path, name="split")
    assert main([deck_full, "-q"]) == EXIT_OK
    assert main([deck_split, "-istart", "1", "-iend", "1", "-q"]) == EXIT_OK
    assert main([deck_split, "-istart", "2", "-iend", "3", "-q"]) == EXIT_OK
    assert (d_split / "NC1-1.out").exists() and (d_split / "NC2-3.out").exists()
    assert not (d_split / "NC.out").exists()
    for n in (1, 2, 3):
        for a, b in zip(_step_files(d_full, n), _step_files(d_split, n)):
            assert filecmp.cmp(a, b, shallow=False), (n, a.name)


def test_threads_give_identical_outputs(tmp_path):
    d1, deck1 = _deck(tmp_path, name="one")
    d2, deck2 = _deck(tmp_path, name="two")
    assert main([deck1, "-q"]) == EXIT_OK
    assert main([deck2, "-q", "--threads", "2"]) == EXIT_OK
    for n in (1, 2, 3):
        for a, b in zip(_step_files(d1, n), _step_files(d2, n)):
            assert filecmp.cmp(a, b, shallow=False)
    assert (d1 / "NC.out").read_text().count("Frequency step") == (d2 / "NC.out").read_text().count("Frequency step")


def test_output_option(tmp_path):
    d, deck = _deck(tmp_path)
    out = tmp_path / "elsewhere"
    assert main([deck, "-q", "-istart", "3", "--output", str(out)]) == EXIT_OK
    assert (out / "NC3-3.out").exists() and all(f.exists() for f in _step_files(out, 3))
    assert not (d / "be.out").exists()


@pytest.mark.parametrize("args", [["-istart", "3", "-iend", "2"], ["-iend", "4"], ["-istart", "0"],
                                  ["--threads", "0"]])
def test_usage_errors_exit_2(tmp_path, args):
    d, deck = _deck(tmp_path)
    assert main([deck, "-q", *args]) == EXIT_STEPS
    assert not (d / "be.out").exists()


def test_unreadable_input_exits_1(tmp_path, capsys):
    assert main([str(tmp_path / "missing.inp")]) == EXIT_INPUT
    bad = tmp_path / "bad.inp"
    bad.write_text("Mesh2HRTF 0.1.0\nnothing useful\n")
    assert main([str(bad)]) == EXIT_INPUT
    assert "error reading" in capsys.readouterr().err


def test_failed_step_exits_2_and_writes_nothing(tmp_path):
    d, deck = _deck(tmp_path, freqs=[0.0, 100.0])
    assert main([deck, "-q"]) == EXIT_STEPS
    assert not (d / "be.out" / "be.1").exists()
    assert all(f.exists() for f in _step_files(d, 2))
    log = (d / "NC.out").read_text()
    assert "Error in step 1" in log and "failed steps: [1]" in log


def test_non_converged_step_is_a_failure(tmp_path):
    d, deck = _deck(tmp_path, freqs=[300.0])
    job = read_deck(deck)
    job = job.__class__(**{**job.__dict__, "solver": "CGS"})
    res = run_job(job, [1], d, RunSettings(solver_tolerance=1e-14, max_iterations=1))
    assert not res[0].ok and "converge" in res[0].error
    assert not (d / "be.out" / "be.1").exists()


def test_estimate_ram_prints_memory(tmp_path, capsys):
    d, deck = _deck(tmp_path, freqs=[1000.0], method="SLFMM")
    assert main([deck, "--estimate_ram"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "GByte" in out and "step 1" in out
    assert not (d / "be.out").exists()


def test_console_module_runs(tmp_path):
    d, deck = _deck(tmp_path, freqs=[80.0])
    r = subprocess.run([sys.executable, "-m", "helmbem.cli", deck, "-q"], capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    assert all(f.exists() for f in _step_files(d, 1))
