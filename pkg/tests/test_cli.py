import csv
import json
import subprocess
import sys

import pytest

from alphaeta.cli import validate_config_dict

GOOD_CONFIG = {
    "M": 64, "S": 40.0, "key_bits": 12, "seed": 1445,
    "osk": True, "kind": "psk", "kappa": 1.0,
}


def run_cli(*argv):
    proc = subprocess.run([sys.executable, "-m", "alphaeta", *argv],
                          capture_output=True, text=True)
    return proc.returncode, proc.stdout, proc.stderr


class TestBounds:
    def test_srm_reference_row(self, tmp_path):
        code, out, _ = run_cli("bounds", "--n", "2047", "--s", "100", "--kind", "srm")
        assert code == 0
        rows = list(csv.DictReader(out.splitlines()))
        assert len(rows) == 1
        assert abs(float(rows[0]["value"]) - 0.975) < 0.02
        assert rows[0]["method"] == "srm_fft"

    def test_vacuum_binary(self):
        code, out, _ = run_cli("bounds", "--n", "2", "--s", "0", "--kind", "srm")
        assert code == 0
        row = next(csv.DictReader(out.splitlines()))
        assert float(row["value"]) == pytest.approx(0.5, abs=1e-7)

    def test_usd_reference_row(self):
        code, out, _ = run_cli("bounds", "--n", "2000", "--s", "10000", "--kind", "usd")
        assert code == 0
        row = next(csv.DictReader(out.splitlines()))
        # the spectral floor clamps to zero at this operating point
        assert float(row["value"]) <= 1e-11

    def test_grid_order_and_threads(self):
        code, out, _ = run_cli("bounds", "--n", "4,8", "--s", "1,2",
                               "--kind", "srm", "--threads", "4")
        assert code == 0
        rows = list(csv.DictReader(out.splitlines()))
        got = [(int(r["n"]), float(r["s"])) for r in rows]
        assert got == [(4, 1.0), (4, 2.0), (8, 1.0), (8, 2.0)]

    def test_json_format(self):
        code, out, _ = run_cli("bounds", "--n", "4", "--s", "1",
                               "--kind", "srm", "--format", "json")
        assert code == 0
        rows = json.loads(out)
        assert rows[0]["method"] == "srm_fft"
        assert rows[0]["optimality_residual"] is not None

    def test_invalid_grid_exits_nonzero(self):
        code, _, err = run_cli("bounds", "--n", "1", "--s", "1", "--kind", "srm")
        assert code == 2
        assert "invalid grid" in err

    def test_seventeen_digit_output(self):
        code, out, _ = run_cli("bounds", "--n", "4", "--s", "1", "--kind", "srm")
        row = next(csv.DictReader(out.splitlines()))
        assert len(row["value"].replace(".", "").replace("-", "").lstrip("0")) >= 16


class TestSimulate:
    def test_requires_seed(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps(GOOD_CONFIG))
        code, _, err = run_cli("simulate", "--config", str(cfg),
                               "--out", str(tmp_path / "o"))
        assert code == 2
        assert "--seed" in err

    def test_schema_violations_use_pointers(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"M": 3, "S": -1, "key_bits": 12, "seed": 9}))
        code, _, err = run_cli("simulate", "--config", str(cfg), "--seed", "5",
                               "--out", str(tmp_path / "o"))
        assert code == 2
        assert "/S:" in err and "/M:" in err

    def test_full_run_and_manifest_rerun(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps(GOOD_CONFIG))
        out1 = tmp_path / "run1"
        code, _, _ = run_cli("simulate", "--config", str(cfg), "--seed", "17",
                             "--bits", "2000", "--plaintext", "random",
                             "--attack", "bob", "ctoa-data", "kpa", "key-entropy",
                             "--out", str(out1))
        assert code == 0
        manifest = json.loads((out1 / "manifest.json").read_text())
        assert manifest["seed"] == 17
        report = json.loads((out1 / "report_ctoa_data.json").read_text())
        assert abs(report["empirical"]["value"] - 0.5) < 0.05
        assert report["bound"]["value"] == pytest.approx(0.5)
        entropy = json.loads((out1 / "report_key_entropy.json").read_text())
        assert 0.0 <= entropy["key_posterior_entropy_bits"] <= 12.0

        # rerun from the manifest: byte-identical report bodies
        out2 = tmp_path / "run2"
        code, _, _ = run_cli("simulate", "--from-manifest", str(out1 / "manifest.json"),
                             "--seed", "17", "--out", str(out2))
        assert code == 0
        for name in ("report_bob.json", "report_ctoa_data.json",
                     "report_kpa_key.json", "report_key_entropy.json"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_zero_plaintext_probe_is_kpa_setup(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({**GOOD_CONFIG, "M": 4, "S": 100.0}))
        out = tmp_path / "probe"
        code, _, _ = run_cli("simulate", "--config", str(cfg), "--seed", "3",
                             "--bits", "3000", "--plaintext", "zeros",
                             "--attack", "kpa", "--out", str(out))
        assert code == 0
        rep = json.loads((out / "report_kpa_key.json").read_text())
        assert rep["attack_kind"] == "kpa_key"
        assert rep["empirical"]["value"] < 0.05  # far-separated states


class TestDesign:
    def test_psk_design(self):
        code, out, _ = run_cli("design", "--target-pe", "0.3", "--s", "100")
        assert code == 0
        row = next(csv.DictReader(out.splitlines()))
        assert int(row["bases"]) == 60
        assert float(row["neighbor_error"]) >= 0.3


class TestValidation:
    def test_valid_config_passes(self):
        assert validate_config_dict(GOOD_CONFIG) == []

    def test_power_of_two_pointer(self):
        problems = validate_config_dict({**GOOD_CONFIG, "M": 12})
        assert any(p.startswith("/M:") for p in problems)

    def test_ask_requires_bounds(self):
        problems = validate_config_dict({**GOOD_CONFIG, "kind": "ask"})
        assert any("ask_S_min" in p for p in problems)

    def test_unknown_field_flagged(self):
        problems = validate_config_dict({**GOOD_CONFIG, "bogus": 1})
        assert problems


class TestReproduceCommand:
    def test_table_and_exit_code(self, tmp_path):
        # the three documented out-of-tolerance reference checks make the
        # command exit nonzero; the table itself must carry every claim
        code, out, _ = run_cli("reproduce", "--out", str(tmp_path),
                               "--format", "json")
        assert code == 1
        rows = json.loads((tmp_path / "reproduce.json").read_text())
        ids = {r["claim"] for r in rows}
        assert {"1a", "1b", "2a", "2b", "2c", "3a", "3b", "4a", "4b",
                "5a", "5b", "6", "7a", "7b", "7c", "8"} == ids
        failing = {r["claim"] for r in rows if not r["passed"]}
        assert failing == {"2a", "2c", "3b"}
        assert "PASS" in out and "FAIL" in out
