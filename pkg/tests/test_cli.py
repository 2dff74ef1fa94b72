import json
import random
from pathlib import Path

import pytest

from fovguard import cli
from fovguard.optimizer import rates_for_resources_rate
from fovguard.resources import DEFAULT_RATES, VideoConfig

GOLDEN = Path(__file__).parent / "data" / "simulate_default_golden.json"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestOptimize:
    def test_default(self, capsys):
        code, out, _ = run(capsys, "optimize")
        doc = json.loads(out)
        assert code == 0 and doc["feasible"] and doc["N_p"] == 33
        assert doc["plan"]["n_obw_samples"] == 8

    def test_full_privacy(self, capsys):
        code, out, _ = run(capsys, "optimize", "--rho-s", "1")
        doc = json.loads(out)
        assert code == 0 and doc["N_p"] == 200 and doc["C_cc"] == 1.0

    def test_infeasible_exit_code(self, capsys):
        code, out, _ = run(capsys, "optimize", "--t-ps", "0.1")
        assert code == cli.EXIT_INFEASIBLE
        assert json.loads(out)["feasible"] is False

    def test_stable_key_order(self, capsys):
        _, out, _ = run(capsys, "optimize")
        keys = list(json.loads(out))
        assert keys == sorted(keys)

    def test_print_config(self, capsys):
        _, _, err = run(capsys, "optimize", "--print-config", "--tau", "0.1")
        assert json.loads(err)["tau"] == 0.1

    def test_physical_rates(self, capsys, tmp_path):
        cfg = {
            "channel": {"B": 1e9, "P_total_dbm": 30, "N_t": 8, "K": 4, "d": 10, "alpha": 2, "sigma2_dbm": -60},
            "compute": {"F_cpt": 8.8e9, "mu_r": 1.0},
            "mc_draws": 1000,
        }
        path = tmp_path / "c.json"
        path.write_text(json.dumps(cfg))
        code, out, _ = run(capsys, "optimize", "--config", str(path))
        doc = json.loads(out)
        assert code == 0 and doc["C_cpt"] == pytest.approx(2.2e9) and doc["C_com"] > 0


class TestConfigErrors:
    @pytest.mark.parametrize(
        "cfg, fragment",
        [
            ({"video": {"px_w": -1}}, "video.px_w"),
            ({"tau": "fast"}, "tau"),
            ({"rho_s": 2}, "rho_s"),
            ({"bogus": 1}, "bogus: unknown key"),
            ({"video": {"n_fov": 200}}, "video.n_fov"),
            ({"rates": None}, "exactly one"),
            ({"channel": {"B": 1}}, "channel/compute"),
            ({"predictor": "lstm"}, "predictor"),
            ({"rho_grid": []}, "rho_grid"),
        ],
    )
    def test_field_messages(self, capsys, tmp_path, cfg, fragment):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(cfg))
        code, _, err = run(capsys, "optimize", "--config", str(path))
        assert code == cli.EXIT_CONFIG
        assert fragment in err

    def test_invalid_json(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{")
        assert run(capsys, "optimize", "--config", str(path))[0] == cli.EXIT_CONFIG

    def test_missing_config_file(self, capsys, tmp_path):
        assert run(capsys, "optimize", "--config", str(tmp_path / "none.json"))[0] == cli.EXIT_IO


class TestSimulate:
    def test_golden(self, capsys):
        code, out, _ = run(capsys, "simulate")
        assert code == 0
        assert out == GOLDEN.read_text()

    def test_full_privacy(self, capsys):
        code, out, _ = run(capsys, "simulate", "--rho-s", "1", "--count", "5")
        assert code == 0 and json.loads(out)["aggregate"]["average_qoe"] == 1.0

    def test_stationary_ample_resources(self, capsys, tmp_path):
        cfg = {"synth": {"yaw_rate_std_deg": 0, "pitch_rate_std_deg": 0, "count": 3}}
        path = tmp_path / "c.json"
        path.write_text(json.dumps(cfg))
        code, out, _ = run(capsys, "simulate", "--config", str(path), "--c-com", "1e12", "--c-cpt", "1e12")
        assert code == 0 and json.loads(out)["aggregate"]["average_qoe"] == 1.0

    def test_from_files_with_tiles(self, capsys, tmp_path):
        assert cli.main(["gen-traces", "--out-dir", str(tmp_path), "--count", "2", "--duration", "10"]) == 0
        out = tmp_path / "r.json"
        code, _, _ = run(capsys, "simulate", "--traces", str(tmp_path), "--with-tiles", "-o", str(out))
        doc = json.loads(out.read_text())
        assert code == 0 and doc["aggregate"]["n_traces"] == 2
        assert doc["aggregate"]["plan"]["n_p"] == 33
        assert len(doc["reports"][0]["records"]) == 8
        assert len(doc["reports"][0]["records"][0]["predicted_set"]) == 33

    def test_insufficient_observation_is_infeasible(self, capsys):
        code, out, _ = run(capsys, "simulate", "--rho-s", "1", "--predictor", "linear_extrapolation", "--count", "2")
        assert code == cli.EXIT_INFEASIBLE and "needs at least 2" in json.loads(out)["reason"]

    def test_missing_traces(self, capsys, tmp_path):
        code, _, err = run(capsys, "simulate", "--traces", str(tmp_path / "nope"))
        assert code == cli.EXIT_IO and "I/O error" in err

    def test_malformed_trace(self, capsys, tmp_path):
        (tmp_path / "v").mkdir()
        (tmp_path / "v" / "u.csv").write_text("t_s,yaw_rad,pitch_rad\n0,abc,0\n")
        assert run(capsys, "simulate", "--traces", str(tmp_path))[0] == cli.EXIT_IO

    def test_precomputed_predictions(self, capsys, tmp_path):
        lines = ["trace_id,segment_index,yaw_rad,pitch_rad"]
        lines += [f"synthetic/user000,{l},0.0,0.0" for l in range(3, 61)]
        pred = tmp_path / "pred.csv"
        pred.write_text("\n".join(lines) + "\n")
        code, out, _ = run(capsys, "simulate", "--count", "1", "--predictions", str(pred))
        assert code == 0 and 0 <= json.loads(out)["aggregate"]["average_qoe"] <= 1


class TestSweep:
    def test_matches_simulate_on_random_cells(self, capsys, tmp_path):
        out = tmp_path / "s.csv"
        assert cli.main(["sweep", "--count", "6", "-o", str(out)]) == 0
        rows = [line.split(",") for line in out.read_text().splitlines()[1:]]
        meta = json.loads(Path(str(out) + ".meta.json").read_text())
        assert meta["n_traces"] == 6
        capsys.readouterr()
        video = VideoConfig()
        for row in random.Random(0).sample(rows, 3):
            rho, rcc = float(row[0]), float(row[1])
            rates = rates_for_resources_rate(video, DEFAULT_RATES, rcc)
            code, sim, _ = run(
                capsys, "simulate", "--count", "6", "--rho-s", str(rho),
                "--c-com", repr(rates.C_com), "--c-cpt", repr(rates.C_cpt),
            )
            agg = json.loads(sim)["aggregate"]
            assert code == 0
            assert repr(agg["average_qoe"]) == row[2]
            assert repr(agg["average_doo"]) == row[3]
            assert repr(agg["cc_capability"]) == row[4]

    def test_custom_grids_stdout(self, capsys):
        code, out, _ = run(capsys, "sweep", "--count", "2", "--rho-grid", "0,1", "--rcc-grid", "2")
        lines = out.splitlines()
        assert code == 0 and len(lines) == 3
        assert lines[2].startswith("1.0,2.0,1.0,")


class TestGenTraces:
    def test_files(self, tmp_path):
        assert cli.main(["gen-traces", "--out-dir", str(tmp_path), "--count", "50"]) == 0
        files = sorted(tmp_path.rglob("*.csv"))
        assert len(files) == 50
        assert all(len(f.read_text().splitlines()) == 301 for f in files)

    def test_zero(self, tmp_path):
        assert cli.main(["gen-traces", "--out-dir", str(tmp_path / "o"), "--count", "0"]) == 0
        assert not (tmp_path / "o").exists()

    def test_reproducible(self, tmp_path):
        for d in ("a", "b"):
            cli.main(["gen-traces", "--out-dir", str(tmp_path / d), "--count", "3", "--seed", "9"])
        for f in (tmp_path / "a").rglob("*.csv"):
            assert f.read_bytes() == (tmp_path / "b" / f.relative_to(tmp_path / "a")).read_bytes()


class TestClassify:
    def test_case_nine(self, capsys):
        code, out, _ = run(capsys, "classify", "--case", "9", "--camouflage", "on")
        row = out.splitlines()[1].split()
        assert code == 0 and row[0] == "9" and row[5] == "protected" and row[7] == "protected"

    def test_explicit_flags(self, capsys):
        code, out, _ = run(capsys, "classify", "--style", "indirect", "--train", "hmd", "--predict", "hmd",
                           "--prediction-upload", "predicted_viewpoints", "--camouflage", "on")
        assert code == 0 and out.splitlines()[1].split()[-1] == "leaked"

    def test_inconsistent_flags(self, capsys):
        code, _, err = run(capsys, "classify", "--style", "direct", "--train", "hmd", "--predict", "mec",
                           "--prediction-upload", "predicted_tiles")
        assert code == cli.EXIT_CONFIG and "uploads" in err

    def test_incomplete_flags(self, capsys):
        assert run(capsys, "classify", "--style", "direct")[0] == cli.EXIT_CONFIG

    def test_bad_case(self, capsys):
        assert run(capsys, "classify", "--case", "13")[0] == cli.EXIT_CONFIG
