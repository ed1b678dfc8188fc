"""End-to-end CLI checks via subprocess."""

import csv
import json
import subprocess
import sys

import numpy as np
import pytest


def run_cli(*args, expect=0):
    proc = subprocess.run(
        [sys.executable, "-m", "collidekit", *args],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == expect, f"exit {proc.returncode}: {proc.stderr}\n{proc.stdout}"
    return proc


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        return list(reader)


class TestHomogenize:
    def test_diagonal_closed_form(self, tmp_path):
        out = tmp_path / "traj.csv"
        proc = run_cli(
            "homogenize",
            "--eta", str(np.pi / 4),
            "--rho", "one",
            "--xi", "zero",
            "--n-steps", "20",
            "--out", str(out),
        )
        rows = read_csv(out)
        assert len(rows) == 21
        for row in rows:
            n = int(row["step"])
            assert abs(float(row["D_sys"]) - np.sqrt(2) * 2.0**-n) < 1e-12
            state = json.loads(row["rho_S"])
            assert abs(state["re"][1][1] - 2.0**-n) < 1e-12
        summary = json.loads(proc.stdout)
        assert summary["observed_max_D_res"] <= summary["delta"]
        assert summary["steps_to_delta"] == 0  # delta > sqrt(2) at eta = pi/4

    def test_fixed_point_trajectory(self, tmp_path):
        out = tmp_path / "traj.csv"
        run_cli(
            "homogenize", "--eta", "0.3", "--rho", "plus", "--xi", "plus",
            "--n-steps", "5", "--out", str(out),
        )
        for row in read_csv(out):
            assert float(row["D_sys"]) < 1e-13
            assert float(row["D_res"]) < 1e-13

    def test_stability_bound_reported(self, tmp_path):
        out = tmp_path / "t.csv"
        proc = run_cli(
            "homogenize", "--eta", "0.4", "--rho", "one", "--xi", '{"bloch": [0, 0, 0.6]}',
            "--n-steps", "40", "--out", str(out),
        )
        summary = json.loads(proc.stdout)
        assert summary["observed_max_D_res"] <= summary["delta"]
        assert summary["steps_to_delta"] is not None

    def test_config_file_and_flag_override(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"eta": 0.1, "rho": "one", "xi": "zero", "n_steps": 3}))
        out = tmp_path / "t.csv"
        run_cli("homogenize", "--config", str(cfg), "--n-steps", "7", "--out", str(out))
        assert len(read_csv(out)) == 8

    def test_missing_parameter_exits_2(self):
        run_cli("homogenize", "--eta", "0.3", expect=2)

    def test_bad_state_exits_2(self):
        run_cli(
            "homogenize", "--eta", "0.3", "--rho", '{"bloch": [2, 0, 0]}',
            "--xi", "zero", "--n-steps", "2", expect=2,
        )


class TestDecohere:
    def test_ctrl_z_plus_reservoir(self, tmp_path):
        out = tmp_path / "traj.csv"
        proc = run_cli(
            "decohere", "--v0", "I", "--v1", "Z", "--rho", "plus", "--xi", "plus",
            "--n-steps", "6", "--out", str(out),
        )
        rows = read_csv(out)
        assert abs(float(rows[0]["offdiag_abs"]) - 0.5) < 1e-15
        assert all(float(r["offdiag_abs"]) < 1e-15 for r in rows[1:])
        summary = json.loads(proc.stdout)
        assert summary["lambda"] == 0.0
        assert summary["lambda_fit"] == 0.0

    def test_diagonal_input_constant(self, tmp_path):
        out = tmp_path / "traj.csv"
        run_cli(
            "decohere", "--v0", "I", "--v1", "Z",
            "--rho", '{"bloch": [0, 0, 0.4]}', "--xi", "random", "--seed", "7",
            "--n-steps", "5", "--out", str(out),
        )
        rows = read_csv(out)
        first = json.loads(rows[0]["rho_S"])
        for row in rows[1:]:
            state = json.loads(row["rho_S"])
            assert np.abs(np.array(state["re"]) - np.array(first["re"])).max() < 1e-12

    def test_fitted_decay_matches_lambda(self, tmp_path):
        out = tmp_path / "traj.csv"
        proc = run_cli(
            "decohere", "--v0", "I", "--v1", "Z", "--rho", "plus",
            "--xi", '{"bloch": [0, 0, 0.5]}', "--n-steps", "12", "--out", str(out),
        )
        summary = json.loads(proc.stdout)
        assert abs(summary["lambda"] - 0.5) < 1e-14
        assert abs(summary["lambda_fit"] - summary["lambda"]) <= 1e-10


class TestEntangle:
    def test_homogenization_first_collision_bell(self, tmp_path):
        out = tmp_path / "tangles.csv"
        proc = run_cli(
            "entangle", "--model", "homogenization",
            "--alpha", "0", "--beta", "1", "--eta", str(np.pi / 4),
            "--n-steps", "4", "--out", str(out),
        )
        rows = read_csv(out)
        row = next(r for r in rows if r["step"] == "1" and r["j"] == "0" and r["k"] == "1")
        assert abs(float(row["tau_jk"]) - 1.0) < 1e-12
        summary = json.loads(proc.stdout)
        assert summary["max_pair_absdiff"] <= 1e-10
        assert summary["max_cut_absdiff"] <= 1e-10
        assert summary["min_ckw_residual"] >= -1e-10

    def test_decoherence_reservoir_separable(self, tmp_path):
        out = tmp_path / "tangles.csv"
        run_cli(
            "entangle", "--model", "decoherence",
            "--alpha", "[0.6, 0]", "--beta", "[0.8, 0]",
            "--v0", "I", "--v1", "X", "--phi-res", "zero",
            "--n-steps", "5", "--out", str(out),
        )
        rows = read_csv(out)
        for row in rows:
            if int(row["j"]) >= 1 and int(row["step"]) >= 2:
                assert float(row["tau_jk"]) <= 1e-12

    def test_capacity_exit_code(self, tmp_path):
        run_cli(
            "entangle", "--model", "homogenization", "--alpha", "0", "--beta", "1",
            "--eta", "0.4", "--n-steps", "25", expect=3,
        )


class TestChannelCommand:
    def test_universal_not(self):
        proc = run_cli("channel", "--model", "universal_not")
        result = json.loads(proc.stdout)
        assert abs(result["det"] + 1 / 27) < 1e-15
        assert result["markovian"] is False
        assert result["completely_positive"] is True

    def test_homogenization_is_markovian(self):
        proc = run_cli("channel", "--model", "homogenization", "--eta", "0.3", "--w", "0.8")
        result = json.loads(proc.stdout)
        assert result["markovian"] is True
        assert result["completely_positive"] is True

    def test_identity_zero_generator(self):
        proc = run_cli("channel", "--ptm", json.dumps(np.eye(4).tolist()))
        result = json.loads(proc.stdout)
        assert result["markovian"] is True
        assert np.abs(np.array(result["generator"]["g"])).max() < 1e-12

    def test_non_tp_input_rejected(self):
        bad = np.eye(4)
        bad[0, 2] = 0.5
        run_cli("channel", "--ptm", json.dumps(bad.tolist()), expect=2)

    def test_kraus_source(self):
        lam = 0.4
        kraus = [
            {"re": (np.sqrt(1 - lam) * np.eye(2)).tolist()},
            {"re": [[np.sqrt(lam), 0], [0, -np.sqrt(lam)]]},
        ]
        proc = run_cli("channel", "--kraus", json.dumps(kraus))
        result = json.loads(proc.stdout)
        assert abs(result["ptm"][1][1] - (1 - 2 * lam)) < 1e-12

    def test_collision_source(self):
        ctrl_z = {"re": np.diag([1.0, 1.0, 1.0, -1.0]).tolist()}
        spec = {"u": ctrl_z, "xi": "plus"}
        proc = run_cli("channel", "--collision", json.dumps(spec))
        result = json.loads(proc.stdout)
        assert np.abs(np.array(result["ptm"]) - np.diag([1.0, 0, 0, 1.0])).max() < 1e-12


class TestGeneratorCommand:
    def test_decoherence_payload(self):
        proc = run_cli("generator", "--model", "decoherence", "--lambda", "0.6", "--phi", "0.4")
        payload = json.loads(proc.stdout)
        assert payload["lindblad_valid"] is True
        assert abs(payload["h"][2] + 0.2) < 1e-12
        assert abs(payload["C_re"][2][2] + np.log(0.6)) < 1e-12
        assert abs(payload["min_eig_C"]) < 1e-12

    def test_singular_channel_exits_4(self):
        run_cli("generator", "--model", "decoherence", "--lambda", "0", expect=4)


class TestIntegrateCommand:
    def test_homogenization_against_closed_form(self):
        proc = run_cli(
            "integrate", "--model", "homogenization", "--eta", "0.4", "--w", "0.7",
            "--rho", "one", "--t-end", "2.0", "--dt", "0.001",
        )
        result = json.loads(proc.stdout)
        assert result["closed_form_error"] <= 1e-8
        assert abs(result["trace"] - 1.0) < 1e-12

    def test_decoherence_against_closed_form(self):
        proc = run_cli(
            "integrate", "--model", "decoherence", "--lambda", "0.7", "--phi", "0.3",
            "--rho", "plus", "--t-end", "1.5", "--dt", "0.001",
        )
        result = json.loads(proc.stdout)
        assert result["closed_form_error"] <= 1e-8


class TestDeterminism:
    @pytest.mark.parametrize(
        "args",
        [
            ("homogenize", "--eta", "0.37", "--rho", "random", "--xi", "random",
             "--seed", "11", "--n-steps", "15"),
            ("entangle", "--model", "homogenization", "--alpha", "[0.6, 0.2]",
             "--beta", "[0.4, 0.6]", "--eta", "0.9", "--n-steps", "5", "--seed", "3"),
        ],
    )
    def test_repeat_runs_byte_identical(self, tmp_path, args):
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        run_cli(*args, "--out", str(out1))
        run_cli(*args, "--out", str(out2))
        assert out1.read_bytes() == out2.read_bytes()
        assert len(out1.read_bytes()) > 0
