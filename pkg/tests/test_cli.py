import json
import math

import pytest

from prodsurf.cli import main

PI4 = repr(math.pi / 4)


def run(args):
    return main(args)


class TestCatalogCommand:
    def test_text_listing(self, capsys):
        assert run(["catalog"]) == 0
        out = capsys.readouterr().out
        for sid in ["slice", "vertical_geodesic_cylinder", "circle_cylinder",
                    "cor32_flat_minimal", "perturbed_control"]:
            assert sid in out

    def test_json_listing(self, capsys):
        assert run(["catalog", "--format", "json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert isinstance(doc, list) and len(doc) >= 5
        assert all(e["expected"] for e in doc)

    def test_single_entry(self, capsys):
        assert run(["catalog", "--id", "cor32_flat_minimal"]) == 0
        out = capsys.readouterr().out
        assert "theta" in out and "kappa" in out
        assert "slice" not in out

    def test_unknown_entry(self, capsys):
        assert run(["catalog", "--id", "moebius"]) == 2


class TestVerifyCommand:
    def test_circle_cylinder_passes(self, tmp_path):
        out = tmp_path / "report.json"
        code = run(["verify", "--surface", "circle_cylinder",
                    "--param", "kappa=1", "--param", f"r={PI4}",
                    "--grid", "9x9", "--output", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["surface"]["id"] == "circle_cylinder"
        assert set(doc) == {"surface", "grid", "results", "verdicts", "version"}
        assert doc["verdicts"] == []
        assert all(r["passed"] for r in doc["results"])
        assert all(r["max_abs"] <= r["tolerance"] for r in doc["results"])

    def test_perturbed_control_fails(self, tmp_path):
        out = tmp_path / "report.json"
        code = run(["verify", "--surface", "perturbed_control",
                    "--param", "kappa=1", "--param", f"r={PI4}",
                    "--grid", "9x9", "--output", str(out)])
        assert code == 1
        by_id = {r["identity_id"]: r for r in json.loads(out.read_text())["results"]}
        assert not by_id["pmc"]["passed"]
        assert not by_id["codazzi_pmc"]["passed"]
        assert by_id["ambient_codazzi"]["passed"]
        assert by_id["gauss_equation"]["passed"]

    def test_minimal_surface_switches_suite(self, tmp_path):
        out = tmp_path / "report.json"
        code = run(["verify", "--surface", "slice", "--param", "kappa=-1",
                    "--grid", "7x7", "--output", str(out)])
        assert code == 0
        ids = [r["identity_id"] for r in json.loads(out.read_text())["results"]]
        assert "codazzi_angle" in ids
        assert "codazzi_pmc" not in ids
        assert "curvature_formula" not in ids

    def test_csv_format(self, tmp_path):
        out = tmp_path / "report.csv"
        code = run(["verify", "--surface", "slice", "--param", "kappa=1",
                    "--grid", "7x7", "--format", "csv", "--output", str(out)])
        assert code == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "identity_id,max_abs,mean_abs,argmax_u,argmax_v,tolerance,passed"
        assert len(lines) > 5

    def test_tolerance_override_forces_failure(self, tmp_path):
        out = tmp_path / "report.json"
        code = run(["verify", "--surface", "slice", "--param", "kappa=1",
                    "--grid", "7x7", "--tol", "pmc=1e-40", "--output", str(out)])
        assert code == 1

    def test_deterministic_reports(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for out in (a, b):
            assert run(["verify", "--surface", "circle_cylinder",
                        "--param", "kappa=-1", "--param", "r=0.3",
                        "--grid", "7x7", "--output", str(out)]) == 0
        assert a.read_bytes() == b.read_bytes()

    @pytest.mark.parametrize("args", [
        ["verify", "--surface", "nope", "--param", "kappa=1"],
        ["verify", "--surface", "slice", "--param", "kappa=1", "--grid", "3x3"],
        ["verify", "--surface", "slice", "--param", "kappa=1", "--margin", "0.7"],
        ["verify", "--surface", "slice", "--param", "kappa"],
        ["verify", "--surface", "slice", "--param", "kappa=1", "--tol", "bogus=1"],
        ["verify", "--surface", "circle_cylinder", "--param", "kappa=1",
         "--param", "r=9"],
    ])
    def test_bad_arguments(self, args, capsys):
        assert run(args) == 2

    @pytest.mark.parametrize("surface_args,expected_code", [
        (["--surface", "vertical_geodesic_cylinder", "--param", "kappa=1"], 0),
        (["--surface", "vertical_geodesic_cylinder", "--param", "kappa=-1"], 0),
        (["--surface", "cor32_flat_minimal", "--param", "kappa=1",
          "--param", "theta=0.5"], 0),
        (["--surface", "circle_cylinder", "--param", "kappa=1", "--param", "r=0.6",
          "--param", "pad=2"], 0),
        (["--surface", "circle_cylinder", "--param", "kappa=1", "--param", f"r={PI4}",
          "--param", "warp=0.3"], 0),
        (["--surface", "perturbed_control", "--param", "kappa=-1",
          "--param", "r=0.4"], 1),
    ])
    def test_whole_catalog_exit_codes(self, surface_args, expected_code, tmp_path):
        out = tmp_path / "r.json"
        code = run(["verify", *surface_args, "--grid", "7x7", "--output", str(out)])
        assert code == expected_code

    def test_numerical_failure_exits_three(self, monkeypatch, capsys):
        from prodsurf import identities
        from prodsurf.geometry import DegenerateMetricError

        def boom(*args, **kwargs):
            raise DegenerateMetricError("det g = 0")

        monkeypatch.setattr(identities, "run_suite", boom)
        assert run(["verify", "--surface", "slice", "--param", "kappa=1",
                    "--grid", "7x7"]) == 3


class TestFieldCommand:
    def test_curvature_of_flat_minimal_surface(self, tmp_path):
        out = tmp_path / "field.csv"
        code = run(["field", "--surface", "cor32_flat_minimal",
                    "--param", "kappa=1", "--param", f"theta={math.pi / 4!r}",
                    "--quantity", "K", "--grid", "7x7", "--output", str(out)])
        assert code == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "u,v,value"
        assert len(lines) == 50
        assert all(abs(float(line.split(",")[2])) < 1e-9 for line in lines[1:])

    def test_vertical_angle_on_slice_all_zero(self, tmp_path):
        out = tmp_path / "field.csv"
        assert run(["field", "--surface", "slice", "--param", "kappa=1",
                    "--quantity", "normT", "--grid", "5x5",
                    "--output", str(out)]) == 0
        values = [float(l.split(",")[2]) for l in out.read_text().splitlines()[1:]]
        assert all(abs(v) < 1e-12 for v in values)

    def test_operator_determinant(self, tmp_path):
        out = tmp_path / "field.csv"
        assert run(["field", "--surface", "circle_cylinder",
                    "--param", "kappa=1", "--param", f"r={PI4}",
                    "--quantity", "detS", "--grid", "5x5",
                    "--output", str(out)]) == 0
        values = [float(l.split(",")[2]) for l in out.read_text().splitlines()[1:]]
        assert all(abs(v + 1.0) < 1e-10 for v in values)

    def test_seventeen_digit_format(self, tmp_path):
        out = tmp_path / "field.csv"
        assert run(["field", "--surface", "circle_cylinder",
                    "--param", "kappa=1", "--param", "r=0.6",
                    "--quantity", "detS", "--grid", "5x5",
                    "--output", str(out)]) == 0
        line = out.read_text().splitlines()[1]
        mantissa = line.split(",")[2].lstrip("-").replace(".", "").split("e")[0]
        assert len(mantissa.rstrip("0")) >= 10  # full-precision decimals survive

    def test_operator_norm_needs_tilde_on_minimal(self, tmp_path, capsys):
        args = ["field", "--surface", "cor32_flat_minimal",
                "--param", "kappa=1", "--param", f"theta={math.pi / 3!r}",
                "--quantity", "normS", "--grid", "5x5",
                "--output", str(tmp_path / "f.csv")]
        assert run(args) == 2
        assert run(args + ["--tilde"]) == 0
        values = [float(l.split(",")[2])
                  for l in (tmp_path / "f.csv").read_text().splitlines()[1:]]
        expected = math.sin(math.pi / 3) ** 2 / math.sqrt(2.0)
        assert all(abs(v - expected) < 1e-10 for v in values)

    def test_mu_integrand_rejected_on_minimal(self, tmp_path):
        assert run(["field", "--surface", "cor32_flat_minimal",
                    "--param", "kappa=1", "--param", f"theta={math.pi / 3!r}",
                    "--quantity", "mu_integrand", "--grid", "5x5",
                    "--output", str(tmp_path / "f.csv")]) == 2


class TestHypothesisCommand:
    def test_flatness_checker_consistent(self, tmp_path):
        out = tmp_path / "verdict.json"
        code = run(["hypothesis", "--theorem", "3.1", "--surface", "circle_cylinder",
                    "--param", "kappa=-1", "--param", "r=0.3",
                    "--eps", "1.0", "--grid", "9x9", "--output", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        verdict = doc["verdicts"][0]
        assert verdict["applicable"] is True
        assert verdict["status"] == "consistent"

    def test_angle_checker_consistent(self, tmp_path):
        out = tmp_path / "verdict.json"
        code = run(["hypothesis", "--theorem", "cor", "--surface", "cor32_flat_minimal",
                    "--param", "kappa=1", "--param", "theta=1.0471975511965976",
                    "--eps", "0.5", "--grid", "9x9", "--output", str(out)])
        assert code == 0
        assert json.loads(out.read_text())["verdicts"][0]["status"] == "consistent"

    def test_minimal_surface_rejected_by_flatness_checker(self, capsys):
        assert run(["hypothesis", "--theorem", "3.1", "--surface", "slice",
                    "--param", "kappa=1", "--grid", "7x7"]) == 2

    def test_unknown_theorem_rejected(self, capsys):
        assert run(["hypothesis", "--theorem", "7.7", "--surface", "slice",
                    "--param", "kappa=1"]) == 2
