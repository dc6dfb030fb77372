import numpy as np
import pytest

from shockcop.cli import main

MODEL = "rmm-max:fx=exp:rate=1.0,fy=exp:rate=1.0,g1=exp:rate=1.0,g2=exp:rate=1.0"


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_eval_efgm(capsys):
    code, out, _ = run(capsys, "eval", "efgm:a=1.0", "0.5", "0.5")
    assert code == 0
    assert out.strip() == "0.1875"


def test_eval_frechet_upper_bound(capsys):
    code, out, _ = run(capsys, "eval", "frechet-m", "0.3", "0.4")
    assert code == 0
    assert float(out) == 0.3


def test_eval_survival_of_symmetric_efgm(capsys):
    # the EFGM generator a*t*(1-t) is reflection-symmetric, so the survival
    # copula evaluates identically at the center point
    code, out, _ = run(capsys, "eval", "survival(efgm:a=1.0)", "0.5", "0.5")
    assert code == 0
    assert float(out) == pytest.approx(0.1875, abs=1e-15)


def test_eval_fifteen_significant_digits(capsys):
    code, out, _ = run(capsys, "eval", "efgm:a=0.95", "0.5", "0.5")
    assert code == 0
    assert out.strip() == f"{0.25 - 0.9025 * 0.0625:.15g}"


def test_eval_parse_error_exits_2(capsys):
    code, _, err = run(capsys, "eval", "nonsense:x=1", "0.5", "0.5")
    assert code == 2
    assert "nonsense" in err


def test_grid_writes_lattice(tmp_path, capsys):
    out_path = tmp_path / "g.csv"
    code, _, _ = run(capsys, "grid", "exprmm-ab:alpha=0.1,beta=0.1", "--n", "10", "--out", str(out_path))
    assert code == 0
    lines = out_path.read_text().strip().splitlines()
    assert lines[0].startswith("# shockcop=")
    assert lines[1] == "u,v,C"
    assert len(lines) == 2 + 11 * 11
    # spot-check a row against eval (printed at 15 significant digits)
    u, v, val = (float(t) for t in lines[2 + 5 * 11 + 5].split(","))
    code, out, _ = run(capsys, "eval", "exprmm-ab:alpha=0.1,beta=0.1", str(u), str(v))
    assert float(out) == pytest.approx(val, rel=1e-14)


def test_grid_unwritable_path_exits_1(capsys):
    code, _, err = run(capsys, "grid", "indep", "--n", "2", "--out", "/nonexistent/dir/out.csv")
    assert code == 1
    assert "cannot write" in err


def test_validate_gen_pass(capsys):
    code, out, _ = run(capsys, "validate-gen", "power:alpha=0.5", "--class", "rmm")
    assert code == 0
    assert "passed" in out


def test_validate_gen_fail(capsys):
    code, out, _ = run(capsys, "validate-gen", "twoparam:alpha=0.5,beta=0.3", "--class", "rmm")
    assert code == 1
    assert "failed" in out


def test_check_copula_axioms(capsys):
    code, out, _ = run(capsys, "check", "efgm:a=0.95", "--rectangles", "2000")
    assert code == 0
    assert "pass" in out


def test_check_reports_csv_format(capsys):
    code, out, _ = run(capsys, "check", "indep", "--rectangles", "500", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "check_id,status,magnitude,u,v"


def test_sample_deterministic(tmp_path, capsys):
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (p1, p2):
        code, _, _ = run(capsys, "sample", MODEL, "-n", "200", "--seed", "7", "--out", str(p))
        assert code == 0
    assert p1.read_bytes() == p2.read_bytes()


def test_sample_illegal_configuration_exits_2(capsys):
    bad = "marshall-max:fx=uniform,fy=uniform,g1=uniform,g2=uniform,combiner=min-min"
    code, _, err = run(capsys, "sample", bad, "-n", "10", "--seed", "1")
    assert code == 2
    assert "no supported family" in err


def test_check_empirical_against_analytic(tmp_path, capsys):
    path = tmp_path / "s.csv"
    code, _, _ = run(capsys, "sample", MODEL, "-n", "20000", "--seed", "3", "--out", str(path))
    assert code == 0
    code, out, _ = run(
        capsys,
        "check-empirical",
        "--against", "exprmm-ab:alpha=0.5,beta=0.5",
        "--in", str(path),
        "--eps", "0.02",
    )
    assert code == 0
    assert "pass" in out


def test_check_empirical_detects_wrong_family(tmp_path, capsys):
    path = tmp_path / "s.csv"
    run(capsys, "sample", MODEL, "-n", "20000", "--seed", "3", "--out", str(path))
    code, out, _ = run(
        capsys, "check-empirical", "--against", "frechet-m", "--in", str(path), "--eps", "0.02"
    )
    assert code == 1
    assert "FAIL" in out


def test_reconstruct_efgm_uniform_margins(tmp_path, capsys):
    out_path = tmp_path / "recon.csv"
    code, out, _ = run(
        capsys,
        "reconstruct", "efgm:a=1.0",
        "--fu", "uniform", "--fv", "uniform",
        "--out", str(out_path),
    )
    assert code == 0
    assert "pass" in out
    lines = out_path.read_text().strip().splitlines()
    assert lines[1] == "x,f_x,f_y,g1,g2"
    # spot-check the closed forms F_X = 2x - x^2 and G1 = 1/(2 - x) at a = 1
    row = dict(zip(lines[1].split(","), (float(t) for t in lines[len(lines) // 2].split(","))))
    assert row["f_x"] == pytest.approx(2 * row["x"] - row["x"] ** 2, abs=1e-9)
    assert row["g1"] == pytest.approx(1.0 / (2.0 - row["x"]), abs=1e-9)


def test_reconstruct_degenerate_margins_exit_1(capsys):
    code, out, err = run(
        capsys, "reconstruct", "efgm:a=1.0", "--fu", "pointmass:x=0.0", "--fv", "pointmass:x=0.0"
    )
    assert code == 1
    assert "interior-point" in out + err


def test_reconstruct_smm_reduction(capsys):
    code, out, _ = run(
        capsys,
        "reconstruct", "survival(efgm:a=0.95)",
        "--fu", "uniform", "--fv", "uniform",
        "--tol", "1e-9",
    )
    assert code == 0
    assert "pass" in out


def test_roundtrip_efgm(capsys):
    code, out, _ = run(
        capsys,
        "roundtrip", "efgm:a=1.0",
        "--fu", "uniform", "--fv", "uniform",
        "--resolution", str(1 << 14),
    )
    assert code == 0
    assert "pass" in out


def test_sample_ranks_mode(tmp_path, capsys):
    path = tmp_path / "r.csv"
    code, _, _ = run(capsys, "sample", MODEL, "-n", "100", "--seed", "2", "--ranks", "--out", str(path))
    assert code == 0
    lines = path.read_text().strip().splitlines()
    assert lines[1] == "ru,rv"
    vals = [float(t) for t in lines[2].split(",")]
    assert all(0.0 < v <= 1.0 for v in vals)


def test_usage_error_exits_2(capsys):
    assert main(["frobnicate"]) == 2


def test_version_flag(capsys):
    assert main(["--version"]) == 0
    assert "shockcop" in capsys.readouterr().out
