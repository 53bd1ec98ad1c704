import json
import subprocess
import sys

import numpy as np
import pytest

from quadfeat.cli import main

SMOKE = {
    "schema": 1,
    "kernels": ["gaussian", "arccos0"],
    "methods": ["sr33-butterfly", "g", "rom"],
    "n_values": [1, 2],
    "subset_size": 20,
    "runs": 2,
    "seed": 3,
    "dataset": {"synthetic": "uniform_cube", "N": 30, "d": 5},
}


@pytest.fixture
def d4(tmp_path):
    p = tmp_path / "d4.csv"
    p.write_text("a,b,c,d\n1,2,3,4\n3,4,1,0\n5,6,-1,2\n")
    return p


@pytest.fixture
def d5(tmp_path):
    p = tmp_path / "d5.csv"
    np.savetxt(p, np.random.default_rng(0).standard_normal((6, 5)), delimiter=",")
    return p


def read_features(path):
    lines = path.read_text().splitlines()
    return lines[0], np.loadtxt(lines[1:], delimiter=",", ndmin=2)


class TestMap:
    def test_sr33_dimension(self, d4, tmp_path, capsys):
        out = tmp_path / "f.csv"
        assert main(["map", "--input", str(d4), "--method", "sr33", "--n", "2", "--output", str(out)]) == 0
        header, F = read_features(out)
        assert "D=21" in header and "method=sr33-butterfly" in header and "seed=0" in header
        assert F.shape == (3, 21)
        assert "seed: 0" in capsys.readouterr().out

    def test_sr33_matches_library(self, d4, tmp_path):
        from quadfeat.data import load_dataset
        from quadfeat.kernels import gaussian
        from quadfeat.quadrature import build_feature_map

        out = tmp_path / "f.csv"
        main(["map", "--input", str(d4), "--method", "sr33-haar", "--n", "1", "--seed", "5", "--output", str(out)])
        ref = build_feature_map(gaussian(0.25), 4, 1, 5, "haar").transform(load_dataset(d4).X)
        np.testing.assert_array_equal(read_features(out)[1], ref)

    def test_rom_padding(self, d5, tmp_path):
        out = tmp_path / "f.csv"
        assert main(["map", "--input", str(d5), "--method", "rom", "--dim", "20", "--output", str(out)]) == 0
        header, F = read_features(out)
        assert "padded_dim=8" in header and F.shape == (6, 20)

    def test_deterministic(self, d5, tmp_path):
        paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
        for p in paths:
            main(["map", "--input", str(d5), "--kernel", "arccos1", "--method", "gort", "--dim", "9", "--seed", "4", "--output", str(p)])
        assert paths[0].read_bytes() == paths[1].read_bytes()

    @pytest.mark.parametrize(
        "extra",
        [
            ["--method", "sr33", "--dim", "20"],
            ["--method", "sr33"],
            ["--method", "fastfood", "--n", "1"],
            ["--kernel", "laplace", "--n", "1"],
            ["--kernel", "arccos1:2", "--n", "1"],
        ],
    )
    def test_usage_errors(self, d4, tmp_path, extra):
        assert main(["map", "--input", str(d4), "--output", str(tmp_path / "o.csv"), *extra]) == 2

    def test_unknown_flag(self, d4, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["map", "--input", str(d4), "--output", str(tmp_path / "o"), "--bogus", "1"])
        assert exc.value.code == 2

    def test_runtime_errors(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("1,2\nx,3\n")
        assert main(["map", "--input", str(bad), "--n", "1", "--output", str(tmp_path / "o")]) == 1
        assert main(["map", "--input", str(tmp_path / "missing.csv"), "--n", "1", "--output", str(tmp_path / "o")]) == 1


class TestApproxError:
    def test_smoke(self, tmp_path, capsys):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps(SMOKE))
        out = tmp_path / "out"
        assert main(["approx-error", "--config", str(cfg), "--output-dir", str(out)]) == 0
        assert "seed: 3" in capsys.readouterr().out
        rows = (out / "report.csv").read_text().splitlines()
        assert len(rows) == 1 + 2 * 3 * 2 * 2
        assert json.loads((out / "report.json").read_text())["schema"] == 1
        assert "map_wall_time" in (out / "timings.csv").read_text()

    def test_seed_override(self, tmp_path, capsys):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps(SMOKE))
        assert main(["approx-error", "--config", str(cfg), "--output-dir", str(tmp_path / "o"), "--seed", "9"]) == 0
        assert "seed: 9" in capsys.readouterr().out

    def test_malformed_json(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text("{not json")
        assert main(["approx-error", "--config", str(cfg)]) == 2

    def test_schema_error_named(self, tmp_path, capsys):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps(SMOKE | {"n_values": [0]}))
        assert main(["approx-error", "--config", str(cfg)]) == 2
        assert "n_values" in capsys.readouterr().err

    def test_missing_dataset(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({k: v for k, v in SMOKE.items() if k != "dataset"}))
        assert main(["approx-error", "--config", str(cfg)]) == 2

    def test_cell_failure_exit_1(self, tmp_path):
        # arc-cosine Gram matrix on a dataset with a zero row fails at run time
        (tmp_path / "z.csv").write_text("0,0\n0,0\n1,1\n")
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps(SMOKE | {"kernels": ["arccos0"], "subset_size": 3, "dataset": {"path": "z.csv"}}))
        assert main(["approx-error", "--config", str(cfg), "--output-dir", str(tmp_path / "o")]) == 1


class TestBound:
    def test_beta_86(self, capsys):
        assert main(["bound", "--prop", "3.1-quad", "--d", "86"]) == 0
        out = capsys.readouterr().out
        beta = float(out.split("beta_d: ")[1].split()[0])
        assert 64.65 <= beta <= 64.75
        assert "vacuous: false" in out and "quad_le_rff: true" in out

    def test_spot_value(self, capsys):
        assert main(["bound", "--prop", "3.1-rff", "--d", "8", "--eps", "0.1", "--delta", "0.05", "--l", "10"]) == 0
        assert "D: 112794" in capsys.readouterr().out

    def test_vacuous_krr(self, capsys):
        assert main(["bound", "--prop", "krr", "--d", "4", "--sigma-y", "0"]) == 0
        assert "vacuous: true" in capsys.readouterr().out

    def test_variance(self, capsys):
        assert main(["bound", "--prop", "variance", "--d", "6"]) == 0
        assert "variance_bound: 1\n" in capsys.readouterr().out

    @pytest.mark.parametrize("argv", [["--d", "2", "--prop", "variance"], ["--d", "4", "--prop", "krr", "--delta", "2"]])
    def test_usage(self, argv):
        assert main(["bound", *argv]) == 2

    def test_bad_prop(self):
        with pytest.raises(SystemExit) as exc:
            main(["bound", "--prop", "3.2", "--d", "4"])
        assert exc.value.code == 2


class TestWalltimeSelftest:
    def test_walltime(self, tmp_path, capsys):
        out = tmp_path / "w.json"
        assert main(["walltime", "--method", "g", "--d", "16", "--dim", "64", "--repeats", "3", "--output", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["D"] == 64 and doc["timing"]["median"] > 0

    def test_walltime_usage(self):
        assert main(["walltime", "--d", "16", "--dim", "64"]) == 2

    def test_selftest(self, capsys):
        assert main(["selftest"]) == 0
        out = capsys.readouterr().out
        assert "FAIL" not in out and "6/6 checks passed" in out


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "quadfeat.cli", "bound", "--prop", "variance", "--d", "4", "--n", "2"], capture_output=True, text=True)
    assert proc.returncode == 0 and "variance_bound: 1" in proc.stdout
