import json

import numpy as np
import pytest

from hadamard_dr.cli import EXIT_INVALID, EXIT_NONCONVERGED, EXIT_OK, main
from hadamard_dr.image import read_mimg
from hadamard_dr.solvers import read_trace_csv


def run(args):
    return main([str(a) for a in args])


def test_synth_denoise_eval_export(tmp_path, capsys):
    f, u = tmp_path / "f.mimg", tmp_path / "u.mimg"
    assert run(["synth", "--manifold", "hyperbolic", "--rows", 6, "--noise", 0.2, "--seed", 1, "-o", f]) == EXIT_OK
    capsys.readouterr()
    code = run(["denoise", f, "-o", u, "--alpha", 0.2, "--eta", 0.1, "--eps", 1e-6, "--max-iter", 3000, "--trace", tmp_path / "t.csv"])
    assert code == EXIT_OK
    summary = json.loads(capsys.readouterr().out)
    assert summary["reason"] == "converged"
    tr = read_trace_csv(tmp_path / "t.csv")
    assert tr.iterations == summary["iterations"]
    assert run(["eval", u, "--data", f, "--alpha", 0.2]) == EXIT_OK
    value = float(capsys.readouterr().out)
    assert value == pytest.approx(summary["functional"], rel=1e-9)


def test_nonconvergence_exit_code(tmp_path):
    f = tmp_path / "f.mimg"
    run(["synth", "--manifold", "spd", "--dim", 2, "--rows", 4, "-o", f])
    assert run(["denoise", f, "-o", tmp_path / "u.mimg", "--max-iter", 2, "--eps", 1e-12]) == EXIT_NONCONVERGED
    assert read_mimg(tmp_path / "u.mimg").shape == (4, 4)


def test_inpaint_requires_mask(tmp_path):
    f = tmp_path / "f.mimg"
    run(["synth", "--manifold", "spd", "--dim", 2, "--rows", 6, "-o", f])
    assert run(["inpaint", f, "-o", tmp_path / "u.mimg"]) == EXIT_INVALID
    g = tmp_path / "g.mimg"
    run(["synth", "--manifold", "spd", "--dim", 2, "--rows", 6, "--mask", "border", "--noise", 0.01, "-o", g])
    assert read_mimg(g).mask is not None
    code = run(["inpaint", g, "-o", tmp_path / "u.mimg", "--alpha", 0.1, "--eta", 3, "--lambda", 0.95, "--eps", 1e-4])
    assert code == EXIT_OK


def test_mask_from_file(tmp_path):
    f = tmp_path / "f.mimg"
    run(["synth", "--manifold", "gaussian-fisher", "--rows", 4, "-o", f])
    mask = np.ones((4, 4))
    mask[1:3, 1:3] = 0
    np.save(tmp_path / "m.npy", mask)
    assert run(["inpaint", f, "--mask", tmp_path / "m.npy", "-o", tmp_path / "u.mimg", "--eps", 1e-4]) == EXIT_OK
    assert read_mimg(tmp_path / "u.mimg").mask.sum() == 12


def test_invalid_inputs(tmp_path, capsys):
    assert run(["denoise", tmp_path / "missing.mimg", "-o", tmp_path / "u.mimg"]) == EXIT_INVALID
    f = tmp_path / "f.mimg"
    run(["synth", "--manifold", "hyperbolic", "--rows", 4, "-o", f])
    assert run(["denoise", f, "-o", tmp_path / "u.mimg", "--manifold", "spd"]) == EXIT_INVALID
    assert run(["denoise", f, "-o", tmp_path / "u.mimg", "--eta", -1]) == EXIT_INVALID
    assert run(["denoise", f, "-o", tmp_path / "u.mimg", "--solver", "dr"]) == EXIT_INVALID
    assert run(["export", f, "--channel", "mean", "-o", tmp_path / "x.pgm"]) == EXIT_INVALID
    assert run(["gaussml", "-o", tmp_path / "g.mimg"]) == EXIT_INVALID
    assert "error:" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        run(["denoise", f, "-o", tmp_path / "u.mimg", "--solver", "newton"])


def test_stensor_and_gaussml(tmp_path, capsys):
    img = np.zeros((12, 12))
    img[:, 6:] = 1.0
    np.save(tmp_path / "img.npy", img)
    assert run(["stensor", tmp_path / "img.npy", "--noise", 0.01, "-o", tmp_path / "s.mimg"]) == EXIT_OK
    s = read_mimg(tmp_path / "s.mimg")
    assert s.kind == "spd-det1"
    assert run(["stensor", tmp_path / "img.npy", "-o", tmp_path / "s2.mimg"]) == EXIT_OK
    assert "excluded" in capsys.readouterr().err
    assert run(["gaussml", "--synthetic", 10, "--size", 8, "-o", tmp_path / "g.mimg"]) == EXIT_OK
    assert read_mimg(tmp_path / "g.mimg").kind == "gaussian-fisher"
    assert run(["export", tmp_path / "g.mimg", "--channel", "std", "-o", tmp_path / "g.pgm"]) == EXIT_OK
    assert run(["export", tmp_path / "s.mimg", "--channel", "anisotropy", "-o", tmp_path / "s.pgm"]) == EXIT_OK
    assert (tmp_path / "s.pgm.json").exists()
