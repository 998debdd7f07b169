import json

import pytest

from aperiodic_lab.cli import main
from aperiodic_lab.config import ConfigError, RunConfig, parse_grid
from aperiodic_lab.exact import QNum
from aperiodic_lab.pointset import load_pointset


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("sets")
    paths = {
        "z": ["--set", "lattice", "--d", "1", "--spacing", "1", "--W", "50"],
        "fib": ["--set", "fibonacci-int", "--W", "200"],
        "super": ["--set", "superlattice", "--motif", "0;1/3", "--cell", "1", "--W", "50"],
        "block": ["--set", "block2d", "--symbol", "A", "--W", "64"],
    }
    out = {}
    for name, args in paths.items():
        p = d / f"{name}.json"
        assert main(["generate", *args, "-o", str(p)]) == 0
        out[name] = p
    return out


def test_generate_lattice_count(files):
    assert len(load_pointset(files["z"])) == 101
    assert load_pointset(files["block"]).d == 2


def test_generate_is_byte_identical(tmp_path, files):
    p = tmp_path / "again.json"
    main(["generate", "--set", "fibonacci-int", "--W", "200", "-o", str(p)])
    assert p.read_bytes() == files["fib"].read_bytes()


def test_generate_bad_parameters(tmp_path):
    assert main(["generate", "--set", "block2d", "--symbol", "Q", "--W", "8", "--out", str(tmp_path)]) == 2
    assert main(["generate", "--set", "lattice", "--W", "abc", "--out", str(tmp_path)]) == 2
    assert main(["generate", "--W", "10", "--out", str(tmp_path)]) == 2


def test_analyze_lattice(tmp_path, files):
    assert main(["analyze", str(files["z"]), "--T-grid", "2:12", "--out", str(tmp_path)]) == 0
    rows = (tmp_path / "complexity.csv").read_text().splitlines()[1:]
    assert {r.split(",")[1] for r in rows} == {"1"}
    rep = json.loads((tmp_path / "certificates.json").read_text())
    assert rep["complexity"]["rows"][0]["count"] == 1


def test_analyze_fibonacci_rows_valid(tmp_path, files):
    assert main(["analyze", str(files["fib"]), "--T-grid", "2:50", "--out", str(tmp_path)]) == 0
    rows = (tmp_path / "repetitivity.csv").read_text().splitlines()[1:]
    assert all(r.split(",")[3] == "true" for r in rows)


def test_analyze_is_deterministic_across_threads(tmp_path, files):
    a, b = tmp_path / "a", tmp_path / "b"
    main(["analyze", str(files["block"]), "--T-grid", "4:8:2", "--out", str(a), "--threads", "1"])
    main(["analyze", str(files["block"]), "--T-grid", "4:8:2", "--out", str(b), "--threads", "2"])
    for name in ("complexity.csv", "repetitivity.csv", "certificates.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_analyze_missing_and_corrupt(tmp_path):
    assert main(["analyze", str(tmp_path / "nope.json"), "--out", str(tmp_path)]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("[]")
    assert main(["analyze", str(bad), "--out", str(tmp_path)]) == 2


def test_analyze_rejects_deep_grid(tmp_path, files):
    assert main(["analyze", str(files["fib"]), "--T-grid", "2,150", "--out", str(tmp_path)]) == 2


def test_verify_exit_codes(tmp_path, files, capsys):
    assert main(["verify", str(files["fib"]), "--out", str(tmp_path / "f")]) == 0
    assert json.loads((tmp_path / "f" / "verdicts.json").read_text())["passed"] is True
    assert main(["verify", str(files["z"]), "--T-grid", "2:12", "--out", str(tmp_path / "z")]) == 1
    assert (tmp_path / "z" / "verdicts.json").exists()
    capsys.readouterr()
    assert main(["verify", str(files["super"]), "--T-grid", "2:12", "--out", str(tmp_path / "s")]) == 1
    assert "periodic signature" in capsys.readouterr().out


def test_oracle(tmp_path, files, capsys):
    assert main(["oracle", str(files["fib"]), "--T-grid", "2:12"]) == 0
    assert main(["oracle", str(files["block"]), "--T-grid", "4,8"]) == 0
    capsys.readouterr()
    assert main(["oracle", str(files["fib"]), "--T-grid", "2:12", "--inject-fault"]) == 1
    assert "MISMATCH T=2" in capsys.readouterr().out


def test_oracle_limit(tmp_path):
    p = tmp_path / "big.json"
    main(["generate", "--set", "fibonacci-int", "--W", "300", "-o", str(p)])
    assert main(["oracle", str(p)]) == 2


def test_config_file_and_override(tmp_path, files):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"T_grid": "2:10", "probes": 150, "output_dir": str(tmp_path / "from_cfg")}))
    assert main(["analyze", str(files["fib"]), "--config", str(cfg)]) == 0
    rep = json.loads((tmp_path / "from_cfg" / "certificates.json").read_text())
    assert rep["config"]["probes"] == 150 and len(rep["config"]["T_grid"]) == 9
    assert main(["analyze", str(files["fib"]), "--config", str(cfg), "--T-grid", "2:5",
                 "--out", str(tmp_path / "flag")]) == 0
    rep = json.loads((tmp_path / "flag" / "certificates.json").read_text())
    assert len(rep["config"]["T_grid"]) == 4
    bad = tmp_path / "bad_cfg.json"
    bad.write_text(json.dumps({"nonsense": 1}))
    assert main(["analyze", str(files["fib"]), "--config", str(bad)]) == 2


def test_parse_grid():
    assert parse_grid("2:4") == [QNum(2), QNum(3), QNum(4)]
    assert parse_grid("1/2,3/2") == [QNum(1, 0, 2), QNum(3, 0, 2)]
    assert parse_grid("2:3:1/2") == [QNum(2), QNum(5, 0, 2), QNum(3)]
    with pytest.raises(ConfigError):
        parse_grid("2:3:0")
    with pytest.raises(ConfigError):
        RunConfig(probes=10).validate()


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    assert main(["nonsense"]) == 2
