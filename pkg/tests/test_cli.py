import csv
import io
import json
import math
import subprocess
import sys

import pytest

from qfi_probe.cli import main, resolve_config


def run_cli(args, capsys):
    code = main(args)
    out, err = capsys.readouterr()
    return code, out, err


def parse(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_curves_columns_and_accuracy(capsys):
    code, out, _ = run_cli(["curves", "--d", "2,3", "--schemes", "O,E,B,E_eta", "--n", "1,2",
                            "--eta", "0.8"], capsys)
    assert code == 0
    rows = parse(out)
    assert list(rows[0]) == ["scheme", "d", "n", "eta", "theta", "j_per_use", "j_numeric", "rel_err"]
    assert all(float(r["rel_err"]) <= 1e-6 for r in rows)
    keys = [(r["scheme"], int(r["d"]), int(r["n"]), r["eta"], float(r["theta"])) for r in rows]
    assert keys == sorted(keys)
    assert {r["scheme"] for r in rows} == {"O", "E", "B", "E_eta"}


def test_curves_ordering_matches_figure(capsys):
    code, out, _ = run_cli(["curves", "--d", "2,3,4,5", "--schemes", "O,E,B", "--n", "1,2"], capsys)
    assert code == 0
    table = {(r["scheme"], r["d"], r["n"], r["theta"]): float(r["j_per_use"]) for r in parse(out)}
    for (scheme, d, n, theta), val in table.items():
        assert table[("E", d, "1", theta)] >= val - 1e-12


def test_curves_empty_scheme_list(capsys):
    code, out, _ = run_cli(["curves", "--schemes", ""], capsys)
    assert code == 0
    assert out == "scheme,d,n,eta,theta,j_per_use,j_numeric,rel_err\n"


def test_thresholds(capsys):
    code, out, _ = run_cli(["thresholds", "--d", "2,3,4,5", "--eta", "0.9,1"], capsys)
    assert code == 0
    rows = parse(out)
    bo = [float(r["theta_star"]) for r in rows if r["kind"] == "B_vs_O"]
    assert bo[0] == pytest.approx(1 / math.sqrt(3), abs=1e-6)
    assert all(b > a for a, b in zip(bo, bo[1:]))
    ones = [float(r["theta_star"]) for r in rows if r["kind"] == "g_eta" and r["eta"] == "1"]
    assert ones == [1.0] * 4


def test_partial_inline(capsys):
    code, out, _ = run_cli(["partial", "--psi", "1,0,0;0.57735026918962573,0.57735026918962573,"
                            "0.57735026918962573", "--theta-step", "0.4"], capsys)
    assert code == 0
    rows = parse(out)
    assert list(rows[0]) == ["psi", "theta", "j_partial", "j_O", "j_E", "j_oracle", "sandwich_ok"]
    for r in rows:
        if r["psi"] == "1;0;0":
            assert float(r["j_partial"]) == pytest.approx(float(r["j_O"]), rel=1e-10)
        else:
            assert float(r["j_partial"]) == pytest.approx(float(r["j_E"]), rel=1e-10)
        assert float(r["j_partial"]) == pytest.approx(float(r["j_oracle"]), rel=1e-6)


def test_partial_sampled_sandwich(capsys):
    code, out, _ = run_cli(["partial", "--d", "3", "--samples", "100", "--seed", "4"], capsys)
    assert code == 0
    rows = parse(out)
    assert len(rows) == 100 * 5
    assert all(r["sandwich_ok"] == "true" for r in rows)


def test_partial_bad_psi(capsys):
    code, _, err = run_cli(["partial", "--psi", "0.5,0.5"], capsys)
    assert code == 2
    assert json.loads(err.strip().splitlines()[-1])["type"] == "NotNormalized"


def test_partial_requires_input(capsys):
    code, _, _ = run_cli(["partial"], capsys)
    assert code == 2


def test_crb_small(capsys):
    code, out, _ = run_cli(["crb", "--schemes", "E", "--d", "2", "--shots", "5000",
                            "--trials", "100", "--seed", "3"], capsys)
    assert code == 0
    rows = parse(out)
    assert len(rows) == 1
    assert float(rows[0]["ratio"]) >= 1 - 3 / math.sqrt(100)


@pytest.mark.parametrize("args", [
    ["curves", "--d", "1"],
    ["curves", "--theta-start", "0.0"],
    ["curves", "--theta-step", "-0.1"],
    ["curves", "--schemes", "Q"],
    ["curves", "--d", "two"],
    ["thresholds", "--eta", "1.5"],
    ["curves", "--unknown-flag"],
    ["curves", "--config", "/nonexistent/file.cfg"],
])
def test_config_errors_exit_2(capsys, args):
    code = None
    try:
        code = main(args)
    except SystemExit as exc:
        code = exc.code
    _, err = capsys.readouterr()
    assert code == 2
    assert json.loads(err.strip().splitlines()[-1])["error"] == "config"


def test_numerical_error_exit_3(capsys, monkeypatch):
    from qfi_probe import cli
    from qfi_probe.errors import NoRootFound

    def boom(d):
        raise NoRootFound("forced")

    monkeypatch.setattr(cli, "threshold_b_vs_o", boom)
    code, _, err = run_cli(["thresholds", "--d", "2"], capsys)
    assert code == 3
    assert json.loads(err)["error"] == "numerical"


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nd = 4,5\ntheta-step=0.2\nseed=9\n")
    rc = resolve_config("curves", {"config": str(cfg), "d": "3", "seed": None})
    assert rc.d == [3]
    assert rc.theta_step == 0.2
    assert rc.seed == 9


def test_seed_env_fallback(monkeypatch):
    monkeypatch.setenv("QFI_PROBE_SEED", "123")
    assert resolve_config("crb", {}).seed == 123
    assert resolve_config("crb", {"seed": 5}).seed == 5


def test_bad_config_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour=blue\n")
    assert main(["curves", "--config", str(cfg)]) == 2


def test_manifest_written(tmp_path):
    out = tmp_path / "t.csv"
    assert main(["thresholds", "--d", "2", "--out", str(out)]) == 0
    man = json.loads((tmp_path / "t.csv.manifest.json").read_text())
    assert man["command"] == "thresholds" and man["config"]["d"] == [2]
    assert "seed" in man and "version" in man


def test_module_entry_point(tmp_path):
    out = tmp_path / "c.csv"
    proc = subprocess.run([sys.executable, "-m", "qfi_probe", "thresholds", "--d", "2",
                           "--out", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0
    assert out.read_text().startswith("kind,d,eta,theta_star\n")


def test_lf_line_endings_and_twelve_digits(tmp_path):
    out = tmp_path / "c.csv"
    main(["curves", "--d", "2", "--schemes", "E", "--theta-start", "0.9", "--theta-stop", "0.9",
          "--out", str(out)])
    raw = out.read_bytes()
    assert b"\r" not in raw
    assert b"8.10810810811" in raw
