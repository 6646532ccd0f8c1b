import json
import math

import pytest

from lvlmg.cli import main, parse_angle


def test_parse_angle():
    assert parse_angle("pi/6") == pytest.approx(math.pi / 6)
    assert parse_angle("2pi/15") == pytest.approx(2 * math.pi / 15)
    assert parse_angle("2*pi/3") == pytest.approx(2 * math.pi / 3)
    assert parse_angle("0.25") == 0.25


def test_solve_poisson_report(tmp_path, capsys):
    code = main(["solve", "--problem", "constant-k", "--k", "0", "--n", "64",
                 "--method", "lvl-mg", "--out", str(tmp_path)])
    assert code == 0
    report = json.loads((tmp_path / "constant-k_lvl-mg_report.json").read_text())
    assert list(report) == ["problem", "method", "params", "iterations", "converged",
                            "final_rel_residual", "wall_seconds", "work_units",
                            "residual_history_file"]
    assert report["converged"] and report["iterations"] <= 10
    lines = (tmp_path / report["residual_history_file"]).read_text().splitlines()
    assert len(lines) == report["iterations"] + 2
    # 17 significant digits
    assert len(lines[1].split(",")[1].split("e")[0].replace(".", "")) == 17


def test_dtheta_bound_exit(capsys):
    code = main(["solve", "--problem", "constant-k", "--k", "10", "--n", "32",
                 "--theta-max", "2.5", "--max-levels", "2"])
    assert code == 1
    assert "pi/3" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["solve", "--problem", "nope", "--k", "1", "--n", "16"],
    ["solve", "--problem", "constant-k", "--k", "1", "--n", "16", "--method", "bicgstab"],
    ["solve", "--problem", "constant-k", "--n", "16"],
    ["solve", "--k", "1", "--n", "16"],
    ["sweep", "--problem", "constant-k", "--k", "1", "--n", "16", "--param", "n",
     "--values", ","],
])
def test_config_errors(argv, capsys):
    assert main(argv) == 1


def test_not_converged_exit(capsys):
    assert main(["solve", "--problem", "constant-k", "--k", "40", "--n", "64",
                 "--maxiter", "2"]) == 2


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"problem": "constant-k", "k": 20, "n": 32,
                               "theta-max": "pi/8", "smoother": "gmres:2"}))
    assert main(["solve", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    params = json.loads((tmp_path / "constant-k_lvl-mg_report.json").read_text())["params"]
    assert params["theta_max"] == pytest.approx(math.pi / 8)
    assert params["smoother"] == "gmres:2"
    assert main(["solve", "--config", str(cfg), "--theta-max", "pi/4", "--out", str(tmp_path)]) == 0
    params = json.loads((tmp_path / "constant-k_lvl-mg_report.json").read_text())["params"]
    assert params["theta_max"] == pytest.approx(math.pi / 4)


def test_fgmres_methods(capsys):
    for method in ("mg-fgmres", "mg-fgmres-restarted", "lvl-mg-fgmres"):
        assert main(["solve", "--problem", "constant-k", "--k", "20", "--n", "32",
                     "--method", method]) == 0


def _rows(text):
    return [l.split(",") for l in text.strip().splitlines()]


def test_sweep_order_and_single_point(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--problem", "constant-k", "--k", "20", "--n", "32", "--param",
                 "theta-max", "--values", "pi/4,pi/15,pi/8", "--jobs", "2",
                 "--out", str(out)]) == 0
    rows = _rows(out.read_text())
    assert rows[0] == ["theta-max", "iterations", "work_units", "wall_seconds", "converged"]
    assert [float(r[0]) for r in rows[1:]] == pytest.approx([math.pi / 4, math.pi / 15, math.pi / 8])
    capsys.readouterr()
    main(["sweep", "--problem", "constant-k", "--k", "20", "--n", "32", "--param", "n",
          "--values", "32"])
    single = _rows(capsys.readouterr().out)[1]
    main(["solve", "--problem", "constant-k", "--k", "20", "--n", "32"])
    line = capsys.readouterr().out
    assert f"iterations={single[1]} " in line


def test_determinism(capsys):
    argv = ["sweep", "--problem", "constant-k", "--k", "30", "--n", "32", "--param", "k",
            "--values", "10,30"]
    main(argv)
    first = [r[:3] for r in _rows(capsys.readouterr().out)]
    main(argv)
    assert [r[:3] for r in _rows(capsys.readouterr().out)] == first


def test_spectrum(tmp_path, capsys):
    out = tmp_path / "g.csv"
    assert main(["spectrum", "--n", "32", "--k", "20", "--dim", "2", "--out", str(out)]) == 0
    rows = _rows(out.read_text())
    assert rows[0] == ["l1", "l2", "re_gamma", "im_gamma"] and len(rows) == 1 + 15 ** 2
    assert "max|gamma|=" in capsys.readouterr().out
    assert main(["spectrum", "--n", "32", "--k", "0", "--dtheta", "pi/20"]) == 0
    text = capsys.readouterr().out
    rows = _rows("\n".join(l for l in text.splitlines() if not l.startswith("#")))
    assert all(float(r[1]) == 0 and float(r[2]) == 0 for r in rows[1:])
    assert main(["spectrum", "--n", "12", "--k", "1"]) == 1


def test_spectrum_summary_grows_with_k(capsys):
    means = []
    for k in ("20", "40"):
        main(["spectrum", "--n", "64", "--k", k, "--dim", "2", "--dtheta", "pi/36"])
        summary = capsys.readouterr().out.strip().splitlines()[-1]
        means.append(float(summary.split("mean|gamma|=")[1].split()[0]))
    assert means[1] > means[0]
