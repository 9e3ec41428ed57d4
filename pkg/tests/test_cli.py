"""Command dispatch, schemas, exit codes, deterministic output."""

from __future__ import annotations

import json
from fractions import Fraction

import pytest

from ultranorm.cli import main

F = Fraction


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def norm_json(p=2, weights=("1/1", "1/1")):
    dim = len(weights)
    return {
        "field": {"type": "padic", "p": p},
        "basis": [[("1" if i == j else "0") for j in range(dim)]
                  for i in range(dim)],
        "weights": [{"q": w, "n": 0} for w in weights],
    }


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestCommands:
    def test_orthogonalize(self, tmp_path, capsys):
        cfg = write(tmp_path, "c.json", {
            "space": norm_json(),
            "vectors": [["6", "0"], ["2", "1"]],
        })
        code, out, _ = run(capsys, ["orthogonalize", "--config", cfg])
        assert code == 0
        data = json.loads(out)
        assert data["norms"][0] == {"n": 1, "q": "1/1"}

    def test_quotient(self, tmp_path, capsys):
        cfg = write(tmp_path, "c.json", {
            "space": norm_json(weights=("1/1", "1/4")),
            "surjection": [["1", "1"]],
        })
        code, out, _ = run(capsys, ["quotient", "--config", cfg])
        assert code == 0
        data = json.loads(out)
        assert data["quotient"]["weights"] == [{"n": 2, "q": "1/1"}]

    def test_dual(self, tmp_path, capsys):
        cfg = write(tmp_path, "c.json", {"space": norm_json(weights=("1/1", "2/1"))})
        code, out, _ = run(capsys, ["dual", "--config", cfg])
        assert code == 0
        data = json.loads(out)
        assert data["dual"]["weights"] == [{"n": 0, "q": "1/1"},
                                           {"n": 1, "q": "1/1"}]

    def test_lattice_round_trip(self, tmp_path, capsys):
        cfg = write(tmp_path, "c.json", {"space": norm_json(weights=("1/1", "2/1"))})
        code, out, _ = run(capsys, ["lattice", "--config", cfg])
        assert code == 0
        cols = json.loads(out)["columns"]
        cfg2 = write(tmp_path, "c2.json", {
            "field": {"type": "padic", "p": 2},
            "lattice": {"columns": cols},
        })
        code, out, _ = run(capsys, ["lattice", "--config", cfg2])
        assert code == 0
        assert "space" in json.loads(out)

    def test_lambda_trivial_example(self, tmp_path, capsys):
        lat = write(tmp_path, "M.json", {"columns": [["1", "0"], ["0", "1"]]})
        nrm = write(tmp_path, "N.json", {"functionals": [["1", "0"], ["0", "1"]]})
        code, out, _ = run(capsys, ["lambda", "--lattice", lat, "--norm", nrm])
        assert code == 0
        data = json.loads(out)
        assert data["lambda_Q"] == "1/1"
        assert data["lambda_Z"] == "1/1"

    def test_extension_table_semipositive(self, tmp_path, capsys):
        cfg = write(tmp_path, "c.json", {
            "space": norm_json(),
            "subvariety": {"points": [["1", "0"]]},
            "representative": {"degree": 1, "variables": 2,
                               "coeffs": {"1,0": "1"}},
        })
        code, out, _ = run(capsys, ["extension-table", "--config", cfg,
                                    "--max-degree", "4"])
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0].startswith("n,ratio_num")
        for line in lines[1:]:
            fields = line.split(",")
            assert fields[1] == "1" and fields[2] == "1" and fields[3] == "0"

    def test_sigma_sample_all_ones(self, tmp_path, capsys):
        cfg = write(tmp_path, "c.json", {"space": norm_json()})
        pts = write(tmp_path, "p.json", {"points": [["1", "2"], ["3", "5"]]})
        code, out, _ = run(capsys, ["sigma-sample", "--config", cfg,
                                    "--max-degree", "3", "--points", pts])
        assert code == 0
        for line in out.strip().split("\n")[1:]:
            fields = line.split(",")
            assert fields[-3:] == ["1", "1", "0"]

    def test_nakai_csv(self, tmp_path, capsys):
        degrees = {}
        for n in (1, 2):
            r = n + 1
            s = f"1/{2 ** n}"
            degrees[str(n)] = {
                "dim": r,
                "arch_functionals": [[(s if i == j else "0")
                                      for j in range(r)] for i in range(r)],
            }
        cfg = write(tmp_path, "g.json", {"degrees": degrees})
        code, out, _ = run(capsys, ["nakai", "--config", cfg,
                                    "--max-degree", "2"])
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[1].split(",")[:5] == ["1", "1/2", "1/2", "2", "yes"]


class TestErrors:
    def test_malformed_json_exit_2(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        code, _, err = run(capsys, ["dual", "--config", str(path)])
        assert code == 2
        obj = json.loads(err)
        assert obj["error"] == "schema"
        assert "path" in obj

    def test_schema_violation_has_pointer_path(self, tmp_path, capsys):
        cfg = write(tmp_path, "c.json", {"space": {
            "field": {"type": "padic"},
            "basis": [["1"]],
            "weights": [{"q": "1/1", "n": 0}],
        }})
        code, _, err = run(capsys, ["dual", "--config", cfg])
        assert code == 2
        obj = json.loads(err)
        assert obj["error"] == "schema"
        assert obj["path"] == "/space/field"

    def test_unknown_keys_rejected(self, tmp_path, capsys):
        cfg = write(tmp_path, "c.json", {"space": norm_json(),
                                         "bogus": 1})
        code, _, err = run(capsys, ["dual", "--config", cfg])
        assert code == 2

    def test_precondition_failure_exit_3(self, tmp_path, capsys):
        cfg = write(tmp_path, "c.json", {
            "space": norm_json(),
            "surjection": [["0", "0"]],
        })
        code, _, err = run(capsys, ["quotient", "--config", cfg])
        assert code == 3
        obj = json.loads(err)
        assert obj["error"] == "precondition"


class TestDeterminism:
    def test_byte_identical_across_jobs(self, tmp_path, capsys):
        cfg = write(tmp_path, "c.json", {"space": norm_json()})
        outputs = set()
        for jobs in ("1", "4", "8"):
            code, out, _ = run(capsys, ["sigma-sample", "--config", cfg,
                                        "--max-degree", "2",
                                        "--jobs", jobs])
            assert code == 0
            outputs.add(out)
        assert len(outputs) == 1

    def test_seed_controls_generated_points(self, tmp_path, capsys):
        cfg = write(tmp_path, "c.json", {"space": norm_json()})
        _, out_a, _ = run(capsys, ["sigma-sample", "--config", cfg,
                                   "--max-degree", "1", "--seed", "1"])
        _, out_b, _ = run(capsys, ["sigma-sample", "--config", cfg,
                                   "--max-degree", "1", "--seed", "1"])
        _, out_c, _ = run(capsys, ["sigma-sample", "--config", cfg,
                                   "--max-degree", "1", "--seed", "2"])
        assert out_a == out_b
        assert out_a != out_c
