import json

import numpy as np
import pytest

import crrd
from crrd.cli import emit_csv, main, run_command


def run_cli(args, capsys):
    rc = main(args)
    out = capsys.readouterr()
    return rc, out.out, out.err


class TestScalarRuns:
    def test_hb_cr_closed_form_sweep(self, capsys):
        rc, out, _ = run_cli(["hb-cr", "--model", "gaussian:4,2,3", "--d2", "1",
                              "--sweep", "d1:0.5:4.5:5", "--solver", "closed_form"],
                             capsys)
        assert rc == 0
        lines = out.strip().split("\n")
        assert lines[0] == "sweep_var,value,rate_bits,solver,flag"
        assert len(lines) == 6
        assert lines[1].startswith("d1,0.5,")

    def test_both_solvers_paired_rows(self, capsys):
        rc, out, _ = run_cli(["point-cr", "--model", "binary-erased:0.35",
                              "--d1", "0.1", "--solver", "both", "--step", "0.01"],
                             capsys)
        assert rc == 0
        lines = out.strip().split("\n")
        assert len(lines) == 3
        assert lines[1].split(",")[3] == "closed_form"
        assert lines[2].split(",")[3] == "grid"
        # same point, two solvers, near-identical rates
        assert abs(float(lines[1].split(",")[2]) - float(lines[2].split(",")[2])) < 5e-3

    def test_six_significant_digits(self, capsys):
        rc, out, _ = run_cli(["hb-cr", "--model", "binary-erased:1,0.35",
                              "--d1", "0.1", "--d2", "0.05"], capsys)
        assert rc == 0
        rate = out.strip().split("\n")[1].split(",")[2]
        assert rate == "0.594914"


class TestSpecFileAndOverrides:
    def test_flags_override_file(self, tmp_path, capsys):
        spec = {"model": "gaussian:4,2,3", "d1": 2.0, "d2": 1.0,
                "solver": "closed_form"}
        path = tmp_path / "spec.json"
        path.write_text(json.dumps(spec))
        rc, out, _ = run_cli(["hb-cr", "--spec", str(path)], capsys)
        base_rate = out.strip().split("\n")[1].split(",")[2]
        assert base_rate == "0.657751"
        rc, out, _ = run_cli(["hb-cr", "--spec", str(path), "--d1", "3.0"], capsys)
        assert out.strip().split("\n")[1].split(",")[1] == "3"
        assert out.strip().split("\n")[1].split(",")[2] != base_rate

    def test_custom_model_file(self, tmp_path, capsys):
        src = crrd.build_erased_source(crrd.BinaryErasureSpec(0.5, 0.35))
        doc = {
            "source": json.loads(src.to_json()),
            "metric1": json.loads(crrd.DistortionMetric.hamming(2).to_json()),
            "metric2": json.loads(crrd.DistortionMetric.hamming(2).to_json()),
        }
        path = tmp_path / "model.json"
        path.write_text(json.dumps(doc))
        rc, out, _ = run_cli(["hb-cr", "--model", f"custom:{path}", "--d1", "0.2",
                              "--d2", "0.1", "--solver", "grid", "--step", "0.05"],
                             capsys)
        assert rc == 0
        want = crrd.rhb_cr_binary(crrd.DistortionPair(0.2, 0.1),
                                  crrd.BinaryErasureSpec(0.5, 0.35),
                                  crrd.BinaryMetric.HAMMING).rate
        got = float(out.strip().split("\n")[1].split(",")[2])
        # coarse step: plumbing check, not an accuracy claim
        assert want - 1e-12 <= got <= want + 1e-2


class TestExitCodes:
    def test_spec_error(self, capsys):
        rc, _, err = run_cli(["hb-cr", "--model", "nonsense:1"], capsys)
        assert rc == 2
        assert "error" in err

    def test_infeasible(self, tmp_path, capsys):
        doc = {
            "pair_pmf": {"alphabets": [2, 2], "pmf": [0.25, 0.25, 0.25, 0.25]},
            "metric": {"rows": 2, "cols": 2, "entries": [0.2, 1.0, 1.0, 0.2]},
        }
        path = tmp_path / "pair.json"
        path.write_text(json.dumps(doc))
        rc, _, err = run_cli(["point-cr", "--model", f"custom:{path}",
                              "--d1", "0.1", "--solver", "grid"], capsys)
        assert rc == 3

    def test_guard_exceeded(self, capsys):
        rc, _, err = run_cli(["hb-cr", "--model", "binary-erased:1,0.35",
                              "--d1", "0.1", "--d2", "0.05", "--solver", "grid",
                              "--step", "0.002"], capsys)
        assert rc == 4


class TestDegradedness:
    def test_feasible_verdict_with_kernel(self, capsys):
        rc, out, _ = run_cli(["degradedness", "--model", "binary-erased:0.5,0.35",
                              "--format", "json"], capsys)
        assert rc == 0
        doc = json.loads(out)
        assert doc["rows"][0][4] == "feasible"
        kernel = np.asarray(doc["meta"]["kernel"])
        assert kernel[2, 0] == pytest.approx(0.23076923076923078, abs=1e-9)

    def test_infeasible_verdict(self, tmp_path, capsys):
        src = crrd.build_erased_source(crrd.BinaryErasureSpec(0.5, 0.35))
        swapped = crrd.JointSource(np.transpose(src.mass, (0, 2, 1)))
        doc = {"source": json.loads(swapped.to_json())}
        path = tmp_path / "sw.json"
        path.write_text(json.dumps(doc))
        rc, out, _ = run_cli(["degradedness", "--model", f"custom:{path}",
                              "--format", "json"], capsys)
        assert rc == 0
        parsed = json.loads(out)
        assert parsed["rows"][0][4] == "infeasible"
        assert parsed["meta"]["violation_tv"] > 1e-3


class TestDeterminism:
    def test_byte_identical_csv(self, tmp_path):
        doc1 = run_command("figure", {"id": 6})
        doc2 = run_command("figure", {"id": 6})
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        emit_csv(doc1, str(p1))
        emit_csv(doc2, str(p2))
        assert p1.read_bytes() == p2.read_bytes()
        assert b"\r" not in p1.read_bytes()

    def test_descent_run_reproducible(self, capsys):
        args = ["hb-cr", "--model", "binary-erased:1,0.35", "--d1", "0.1",
                "--d2", "0.05", "--solver", "descent", "--restarts", "3",
                "--seed", "7"]
        _, out1, _ = run_cli(args, capsys)
        _, out2, _ = run_cli(args, capsys)
        assert out1 == out2


class TestRegionsViaCli:
    def test_coop_half_plane(self, capsys):
        rc, out, _ = run_cli(["coop-cr", "--model", "binary-erased:1,0.35",
                              "--d1", "0.1", "--d2", "0.05", "--solver", "grid",
                              "--step", "0.05", "--format", "json"], capsys)
        assert rc == 0
        doc = json.loads(out)
        assert doc["meta"]["chain"] == "x-y2-y1"
        assert doc["meta"]["unbounded"] == ["r2"]
        assert doc["rows"][0][2] == pytest.approx(0.5949139291763825, abs=5e-3)

    def test_cascade_closed_corner(self, capsys):
        rc, out, _ = run_cli(["cascade-cr", "--model", "binary-erased:1,0.35",
                              "--d1", "0.1", "--d2", "0.05"], capsys)
        assert rc == 0
        row = out.strip().split("\n")[1].split(",")
        assert float(row[2]) == pytest.approx(0.5949139291763825, abs=1e-6)
        assert float(row[3]) == pytest.approx(0.2497610650094153, abs=1e-6)

    def test_conr_flags_column(self, capsys):
        rc, out, _ = run_cli(["conr", "--model", "binary-erased:1,0.35",
                              "--d1", "0.1", "--d2", "0.05", "--de1", "0.0",
                              "--de2", "0.0", "--step", "0.05"], capsys)
        assert rc == 0
        row = out.strip().split("\n")[1].split(",")
        # caps (2,2) are below the exactness cardinalities (6, 16)
        assert "caps_reduced" in row[-1]


class TestFigurePresets:
    def test_figure_6_zero_pattern(self):
        doc = run_command("figure", {"id": 6})
        assert doc["columns"][:3] == ["d2", "d1", "rate_bits"]
        for d2, d1, rate, *_ in doc["rows"]:
            if rate == 0.0:
                assert d2 == 5.0 and d1 >= 4.0
            if d2 == 5.0 and d1 >= 4.0:
                assert rate == 0.0

    def test_figure_8_schema_and_rows(self):
        doc = run_command("figure", {"id": 8})
        assert "kaspi" not in ",".join(doc["columns"]).lower()
        assert {r[0] for r in doc["rows"]} == {0.05, 0.3}
        for _, _, cr, nocr, *_ in doc["rows"]:
            assert nocr <= cr + 1e-9

    def test_unknown_figure(self, capsys):
        rc, _, err = run_cli(["figure", "--id", "7"], capsys)
        assert rc == 2
