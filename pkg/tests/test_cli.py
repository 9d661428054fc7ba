import csv
import io

import pytest

from sagnacsq.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_derive(capsys):
    code, out, _ = run(capsys, "derive")
    assert code == 0
    assert "146.3415 pJ" in out
    assert "166.5" in out


def test_ratio_sweep_csv(capsys, tmp_path):
    path = tmp_path / "r.csv"
    code, _, err = run(capsys, "ratio-sweep", "-o", str(path))
    assert code == 0
    rows = list(csv.DictReader(path.open()))
    assert len(rows) == 200
    best = min(rows, key=lambda r: float(r["variance_lossless"]))
    assert 7.0 <= float(best["coefficient"]) <= 8.2
    assert "optimum coefficient" in err


def test_ratio_sweep_deterministic(capsys):
    _, a, _ = run(capsys, "ratio-sweep", "--steps", "20")
    _, b, _ = run(capsys, "ratio-sweep", "--steps", "20")
    assert a == b


def test_power_sweep_with_kappa(capsys):
    code, out, err = run(capsys, "power-sweep", "--kappa", "0.4", "--points", "11")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 11
    assert float(rows[0]["variance_lossless"]) == pytest.approx(1.0)


def test_transfer_and_plateau(capsys, tmp_path):
    cfg = tmp_path / "fast.cfg"
    cfg.write_text("grid.n = 512\nsolver.n_steps = 100\n")
    env = tmp_path / "env.csv"
    code, out, _ = run(capsys, "-c", str(cfg), "transfer", "--points", "12",
                       "--envelope-out", str(env))
    assert code == 0
    assert out.splitlines()[0] == "p_in_mw,p_out_mw"
    assert env.read_text().startswith("t_ps,re_sqrtW,im_sqrtW,power_W")
    code, out, _ = run(capsys, "-c", str(cfg), "plateau", "--points", "12")
    assert code == 0
    assert out.startswith("classification: ")


@pytest.mark.parametrize("argv", [
    ("bogus",),
    ("ratio-sweep", "--steps", "x"),
    ("ratio-sweep", "--eta-min", "0.4", "--eta-max", "0.2"),
    ("transfer", "--points", "3"),
    ("-c", "/nonexistent/file.cfg", "derive"),
])
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as info:
        code = main(list(argv))
        raise SystemExit(code)
    err = capsys.readouterr().err
    assert info.value.code == 1
    assert err.startswith("error: ")
    assert err.count("\n") == 1


def test_bad_config_value(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("coupler.eta = 0.6\n")
    code, _, err = run(capsys, "-c", str(cfg), "derive")
    assert code == 1
    assert err == "error: line 1: coupler.eta = 0.6 outside [0, 0.5]\n"


def test_power_sweep_calibration_failure(capsys, tmp_path):
    cfg = tmp_path / "lin.cfg"
    cfg.write_text("fiber.gamma_per_w_km = 0\ngrid.n = 512\nsolver.n_steps = 10\n")
    code, _, err = run(capsys, "-c", str(cfg), "power-sweep", "--points", "12")
    assert code == 1
    assert "no plateau" in err


def test_validate_subset(capsys):
    code, out, _ = run(capsys, "validate", "--only", "P1,PS2,S1")
    assert code == 0
    assert "3/3 checks passed" in out
