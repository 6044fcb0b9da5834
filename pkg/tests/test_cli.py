import csv
import io
import json
import shutil
import subprocess

import pytest

from gtpbounds import cli
from gtpbounds.errors import NumericError


def call(tmp_path, command, config, *extra):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(config))
    out = tmp_path / "out.txt"
    code = cli.main([command, "--config", str(path), "--out", str(out), *extra])
    return code, (out.read_text() if out.exists() else None)


def result(tmp_path, command, config, *extra):
    code, text = call(tmp_path, command, config, *extra)
    assert code == 0
    return json.loads(text)


def strip_stamp(report):
    return {k: v for k, v in report.items() if k != "timestamp"}


class TestCommands:
    def test_omega(self, tmp_path):
        r = result(tmp_path, "omega", {"strategy": {"family": "pauli", "N": 3}})
        assert r["result"]["omega_cardinality"] == 7
        assert r["result"]["omega"] == [[-6], [-4], [-2], [0], [2], [4], [6]]
        assert r["config"]["strategy"]["N"] == 3

    def test_omega_two_coordinates(self, tmp_path):
        r = result(tmp_path, "omega", {"strategy": {"family": "pauli", "N": [2, 1]}})
        assert r["result"]["omega_cardinality"] == 15
        assert r["result"]["K"] == 6.0

    def test_omega_capped(self, tmp_path):
        r = result(tmp_path, "omega", {"strategy": {"family": "pauli", "N": [30, 30]}, "cap": 100})
        assert r["result"]["capped"] is True
        assert r["result"]["omega_cardinality"] == 61 * 61

    def test_bounds(self, tmp_path):
        r = result(tmp_path, "bounds", {"kind": "pauli", "N": 3, "epsilons": [0.2, 0.1]})["result"]
        assert r["n_omega"] == 7
        inv = {(i["epsilon"], i["route"]): i["m_required"] for i in r["sample_size_inversions"]}
        for route in ("rademacher", "covering"):
            assert 3.5 <= inv[(0.1, route)] / inv[(0.2, route)] <= 4.5

    def test_bounds_exponential_flag(self, tmp_path):
        r = result(tmp_path, "bounds", {"kind": "diff_klocal", "N": 10, "kappa": 1})["result"]
        assert "exponential_regime" in r["flags"]

    def test_rademacher(self, tmp_path):
        r = result(tmp_path, "rademacher", {"n_sigma_samples": 500})["result"]
        assert r["sound"] is True
        assert r["mc_mean"] <= r["bound_min"]
        assert r["K"] == 3.0

    def test_cover_check(self, tmp_path):
        r = result(tmp_path, "cover-check", {"n_samples": 200})["result"]
        assert r["radius_within_epsilon"] is True
        assert r["empirical_radius"] <= 0.3

    def test_simulate(self, tmp_path):
        r = result(tmp_path, "simulate", {})["result"]
        assert r["omega_cardinality"] == 7
        assert r["support_within_omega"] and r["sup_within_M_norm"]
        assert r["reconstruction_error"] <= 1e-8
        assert r["max_offgrid_leakage"] <= 1e-9

    def test_simulate_probe(self, tmp_path):
        r = result(tmp_path, "simulate", {"probe": {"n_trials": 5}})["result"]
        assert r["conjecture_probe"]["n_trials"] == 5

    def test_srm(self, tmp_path):
        r = result(tmp_path, "srm", {})["result"]
        assert r["k_opt"] >= 3
        assert len(r["rows"]) == 6

    def test_srm_csv_data(self, tmp_path):
        data = tmp_path / "d.csv"
        data.write_text("x1,y\n" + "".join(f"{0.1 * i},{(-1) ** i * 0.5}\n" for i in range(40)))
        r = result(tmp_path, "srm", {"data": {"csv": str(data)}, "candidates": {"family": "pauli", "k": [1, 2]}})
        assert r["result"]["m"] == 40

    def test_srm_coverage(self, tmp_path):
        cfg = {"candidates": {"family": "pauli", "k": [1, 3]}, "coverage": {"trials": 2, "n_eval": 500},
               "data": {"synth": {"pauli_k": 3, "m": 100, "noise_sigma": 0.1}}}
        cov = result(tmp_path, "srm", cfg)["result"]["coverage"]
        assert cov["trials"] == 2 and cov["fraction_within_bound"] == 1.0

    def test_table1(self, tmp_path):
        r = result(tmp_path, "table1", {})["result"]
        assert r["all_passed"] is True
        assert len(r["families"]) == 4


class TestOutput:
    def test_deterministic_apart_from_timestamp(self, tmp_path):
        a = result(tmp_path, "rademacher", {"n_sigma_samples": 200})
        b = result(tmp_path, "rademacher", {"n_sigma_samples": 200})
        assert strip_stamp(a) == strip_stamp(b)

    def test_seed_override(self, tmp_path):
        a = result(tmp_path, "rademacher", {"n_sigma_samples": 200}, "--seed", "5")
        b = result(tmp_path, "rademacher", {"n_sigma_samples": 200, "seed": 5})
        assert a["config"]["seed"] == 5
        assert strip_stamp(a) == strip_stamp(b)

    def test_csv(self, tmp_path):
        code, text = call(tmp_path, "omega", {"strategy": {"family": "pauli", "N": 2}}, "--format", "csv")
        assert code == 0
        lines = text.splitlines()
        assert lines[0].startswith("# command: omega")
        assert json.loads(lines[2].split(": ", 1)[1])["format"] == "csv"
        rows = list(csv.DictReader(io.StringIO("\n".join(lines[3:]))))
        assert [int(r["w1"]) for r in rows] == [-4, -2, 0, 2, 4]

    def test_infinity_is_standard_json(self, tmp_path):
        code, text = call(tmp_path, "bounds", {"kind": "diff_klocal", "N": 400, "kappa": 2})
        assert code == 0
        assert "Infinity" not in text
        json.loads(text)

    def test_stdout(self, tmp_path, capsys):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"strategy": {"family": "pauli", "N": 1}}))
        assert cli.main(["omega", "--config", str(path)]) == 0
        assert json.loads(capsys.readouterr().out)["result"]["omega_cardinality"] == 3


class TestExitCodes:
    def test_unknown_key(self, tmp_path):
        assert call(tmp_path, "omega", {"strategy": {"family": "pauli", "N": 1}, "bogus": 1})[0] == 2

    def test_missing_required(self, tmp_path):
        assert call(tmp_path, "bounds", {"kind": "pauli"})[0] == 2

    def test_bad_delta(self, tmp_path):
        assert call(tmp_path, "bounds", {"kind": "pauli", "N": 2, "delta": 1.5})[0] == 2

    def test_missing_file(self, tmp_path):
        assert cli.main(["omega", "--config", str(tmp_path / "nope.json")]) == 2

    def test_not_an_object(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text("[1, 2]")
        assert cli.main(["omega", "--config", str(path)]) == 2

    def test_nyquist_violation(self, tmp_path):
        assert call(tmp_path, "simulate", {"grid_sizes": [4]})[0] == 2

    def test_resource_cap(self, tmp_path):
        assert call(tmp_path, "cover-check", {"epsilon": 0.01, "cap": 100})[0] == 3

    def test_numeric(self, tmp_path, monkeypatch):
        def boom(cfg):
            raise NumericError("did not converge")

        monkeypatch.setitem(cli.COMMANDS, "omega", boom)
        assert call(tmp_path, "omega", {"strategy": {"family": "pauli", "N": 1}})[0] == 4

    @pytest.mark.skipif(shutil.which("gtpb") is None, reason="console script not installed")
    def test_console_script(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"strategy": {"family": "pauli", "N": 2}}))
        ok = subprocess.run(["gtpb", "omega", "--config", str(path)], capture_output=True, text=True)
        assert ok.returncode == 0 and json.loads(ok.stdout)["result"]["omega_cardinality"] == 5
        path.write_text("{}")
        bad = subprocess.run(["gtpb", "omega", "--config", str(path)], capture_output=True, text=True)
        assert bad.returncode == 2 and "strategy" in bad.stderr
