import csv
import json
import subprocess
import sys

import pytest

from hamsing.cli import parse_complex, parse_complex_list, parse_path, parse_region, run

from conftest import spec_path

PAINLEVE_INITIAL = "0, 2.5+0.2j, -1.3+1.1j"


def report(tmp_path, *argv, name="out.json"):
    out = tmp_path / name
    code = run([*argv, "--out", str(out)])
    return code, (json.loads(out.read_text()) if out.exists() else None)


class TestParsing:
    def test_complex(self):
        assert parse_complex("1+2j") == 1 + 2j
        assert parse_complex(" -0.5 ") == -0.5
        assert parse_complex_list("0, 1+1j, 2", 3) == [0, 1 + 1j, 2]

    def test_region(self):
        assert parse_region("1,2,3") == (1 + 2j, 3.0)

    def test_path(self):
        path = parse_path("line:1+1j;line:2", 0j)
        assert len(path.segments) == 2 and path.end == 2


class TestExitCodes:
    def test_validate(self, tmp_path):
        code, rep = report(tmp_path, "validate", "--spec", spec_path("generic_2_2.json"))
        assert code == 0
        assert rep["constants"]["R"] == 3 and rep["constants"]["d"] == 3

    def test_bad_index_is_a_domain_error(self, capsys):
        assert run(["validate", "--spec", spec_path("bad_index.json")]) == 1
        assert "IndexOutsideClass" in capsys.readouterr().err

    def test_usage_errors(self, tmp_path, capsys):
        assert run(["validate", "--spec", spec_path("generic_2_2.json"), "--precision", "10"]) == 2
        assert run(["validate", "--spec", str(tmp_path / "missing.json")]) == 2
        assert run(["continue", "--spec", spec_path("generic_2_2.json")]) == 2
        assert run(["validate", "--spec", spec_path("generic_2_2.json"), "--tol", "-1"]) == 2
        assert run(["frobnicate"]) == 2
        assert "not found" in capsys.readouterr().err

    def test_unparsable_spec(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert run(["validate", "--spec", str(bad)]) == 2

    def test_conditions_violated(self):
        assert run(["series", "--spec", spec_path("violating_2_2.json")]) == 1

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "hamsing", "validate", "--spec", spec_path("bad_index.json")],
                              capture_output=True, text=True)
        assert proc.returncode == 1


class TestReports:
    def test_resonance_lists_three_conditions(self, tmp_path):
        code, rep = report(tmp_path, "resonance", "--spec", spec_path("generic_2_2.json"))
        assert code == 0
        assert rep["count"] == 3 and len(rep["conditions"]) == 3
        assert rep["satisfied"]
        text = " ".join(c["expression"] for c in rep["conditions"])
        assert "a[1,1,2]" in text

    def test_resonance_flags_violation(self, tmp_path):
        _, rep = report(tmp_path, "resonance", "--spec", spec_path("violating_2_2.json"))
        assert not rep["satisfied"]

    def test_series(self, tmp_path):
        code, rep = report(tmp_path, "series", "--spec", spec_path("generic_2_2.json"), "--order", "6", "--z0", "0.5")
        assert code == 0
        assert rep["ramification"] == 3 and len(rep["free_parameters"]) == 1
        assert len(rep["numeric"]["coeffs1"]) == len(rep["coeffs1"])

    def test_continue_writes_trace(self, tmp_path):
        trace = tmp_path / "trace.csv"
        code, rep = report(tmp_path, "continue", "--spec", spec_path("autonomous_2_2.json"), "--initial",
                           "1, -0.3333333333333333, 0.3333333333333333", "--to", "0.1", "--csv", str(trace))
        assert code == 0 and rep["status"] == "end"
        assert rep["hamiltonian_drift"] < 1e-10
        with open(trace) as fh:
            rows = list(csv.reader(fh))
        s = [float(r[0]) for r in rows[1:]]
        assert rows[0][:3] == ["s", "re_z", "im_z"]
        assert all(b > a for a, b in zip(s, s[1:]))

    def test_deterministic_modulo_timestamp(self, tmp_path):
        argv = ["hunt", "--spec", spec_path("generic_2_2.json"), "--initial", PAINLEVE_INITIAL, "--rays", "4"]
        _, a = report(tmp_path, *argv, name="a.json")
        _, b = report(tmp_path, *argv, name="b.json")
        assert "timestamp" in a
        a.pop("timestamp")
        b.pop("timestamp")
        assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)

    def test_empty_hunt_gives_header_only_csv(self, tmp_path):
        events = tmp_path / "events.csv"
        code, rep = report(tmp_path, "hunt", "--spec", spec_path("generic_2_2.json"), "--initial", PAINLEVE_INITIAL,
                           "--region", "0,0,0.1", "--csv", str(events))
        assert code == 0 and rep["events"] == []
        assert events.read_text().splitlines() == [
            "re_z_inf,im_z_inf,branch_class,sheets,re_C1,im_C1,fit_residual,closure_defect_1"]

    def test_hunt_csv_row_per_event(self, tmp_path):
        events = tmp_path / "events.csv"
        _, rep = report(tmp_path, "hunt", "--spec", spec_path("generic_2_2.json"), "--initial", PAINLEVE_INITIAL,
                        "--csv", str(events))
        rows = events.read_text().splitlines()[1:]
        assert len(rows) == len(rep["events"]) >= 1
        for row, ev in zip(rows, rep["events"]):
            assert float(row.split(",")[0]) == ev["z_inf"][0]
            assert row.split(",")[3] == "1"

    @pytest.mark.slow
    def test_monodromy_auto_on_square_root_branch(self, tmp_path):
        code, rep = report(tmp_path, "monodromy", "--spec", spec_path("p33.json"), "--z-inf", "auto", "--loops", "3")
        assert code == 0
        assert rep["sheets"] == 2 and rep["precision"] == 30
        assert rep["closure_defects"][0] > 0.1 and rep["closure_defects"][1] < 1e-5


class TestPrecisionEnvironment:
    ARGS = ["monodromy", "--spec", spec_path("generic_2_2.json"), "--initial", PAINLEVE_INITIAL,
            "--z-inf", "0.5055426+0.1029150j", "--loops", "1"]

    def test_env_overrides_flag(self, tmp_path, monkeypatch):
        monkeypatch.setenv("HAMSING_PRECISION", "20")
        code, rep = report(tmp_path, *self.ARGS, "--precision", "25")
        assert code == 0
        assert rep["precision"] == 20 and rep["sheets"] == 1

    def test_bad_env_is_a_usage_error(self, monkeypatch):
        monkeypatch.setenv("HAMSING_PRECISION", "12")
        assert run(self.ARGS) == 2
        monkeypatch.setenv("HAMSING_PRECISION", "many")
        assert run(self.ARGS) == 2
