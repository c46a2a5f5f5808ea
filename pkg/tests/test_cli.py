import json

import numpy as np
import pytest

from reluspline import cli, pwl
from reluspline.net2 import TwoLayerNet


def write(path, payload):
    path.write_text(json.dumps(payload))
    return str(path)


@pytest.fixture
def tent_dataset(tmp_path):
    return write(tmp_path / "data.json",
                 {"points": [[0.0, 0.0], [1.0, 1.0], [2.0, 0.0]]})


class TestRepcostCommand:
    def test_absval_report(self, tmp_path, capsys):
        path = write(tmp_path / "f.json", pwl.absval().to_dict())
        assert cli.main(["repcost", path]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["cost"] == 2.0
        assert out["lagrange_case"] == "zero"

    def test_line_report_to_file(self, tmp_path):
        path = write(tmp_path / "f.json", pwl.linear(3.0).to_dict())
        out = tmp_path / "report.json"
        assert cli.main(["repcost", path, "--output", str(out)]) == 0
        assert json.loads(out.read_text())["cost"] == 6.0

    def test_missing_file(self, tmp_path, capsys):
        assert cli.main(["repcost", str(tmp_path / "nope.json")]) == 2

    def test_malformed_file(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        assert cli.main(["repcost", str(path)]) == 2

    def test_invalid_schema(self, tmp_path):
        path = write(tmp_path / "bad.json", {"breakpoints": [1.0, 0.0],
                                             "slopes": [0, 1, 2],
                                             "anchor": [0, 0]})
        assert cli.main(["repcost", path]) == 2


class TestInterpCommand:
    def test_tent(self, tent_dataset, capsys):
        assert cli.main(["interp", tent_dataset]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["cost"] == pytest.approx(2.0)
        assert out["end_slopes"] == [1.0, -1.0]

    def test_grid_oracle_agrees(self, tent_dataset, capsys):
        assert cli.main(["interp", tent_dataset, "--grid-oracle"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["oracle_value"] == pytest.approx(out["cost"], abs=1e-9)

    def test_trace_grid(self, tent_dataset, capsys):
        assert cli.main(["interp", tent_dataset, "--trace-grid", "16"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert len(out["trace"]) == 16

    def test_conflicting_duplicates(self, tmp_path):
        path = write(tmp_path / "bad.json",
                     {"points": [[0.0, 0.0], [0.0, 1.0]]})
        assert cli.main(["interp", path]) == 2


class TestTrain2Command:
    def test_end_to_end(self, tent_dataset, tmp_path, capsys, monkeypatch):
        monkeypatch.chdir(tmp_path)
        rc = cli.main(["train2", tent_dataset, "--k", "8",
                       "--steps", "3000", "--lr", "0.01", "--seed", "1",
                       "--prefix", "run"])
        assert rc == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["steps"] == 3000
        assert summary["net_cost"] >= summary["function_cost"] - 1e-9
        net = TwoLayerNet.from_json((tmp_path / "run_net.json").read_text())
        assert net.k == 8
        trace = (tmp_path / "run_trace.csv").read_text().splitlines()
        assert trace[0] == "step,objective,loss,cost"
        assert len(trace) == 3001
        grid = (tmp_path / "run_grid.csv").read_text().splitlines()
        assert len(grid) == 513

    def test_divergence_exit_code(self, tent_dataset, tmp_path, monkeypatch,
                                  capsys):
        monkeypatch.chdir(tmp_path)
        rc = cli.main(["train2", tent_dataset, "--k", "10",
                       "--steps", "2000", "--lr", "10.0",
                       "--init-scale", "2.0"])
        assert rc == 3


class TestExtractCommand:
    def test_single_unit(self, tmp_path, capsys):
        net = TwoLayerNet([2.0], [-2.0], [1.0], 0.0)
        path = write(tmp_path / "net.json", net.to_dict())
        assert cli.main(["extract", path]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["atoms"] == [[1.0, 2.0]]

    def test_bad_net(self, tmp_path):
        path = write(tmp_path / "net.json", {"w1": [1.0], "b1": [], "w2": [],
                                             "b2": 0})
        assert cli.main(["extract", path]) == 2


class TestDepthCommand:
    def test_random_report(self, capsys):
        assert cli.main(["depth", "--random", "3", "4", "5", "0"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["depth"] == 3
        assert out["bridge_penalty"] <= out["cost_CL"] + 1e-10
        assert out["cost_CL_realigned"] == pytest.approx(
            out["bridge_penalty"], abs=1e-10)

    def test_file_input(self, tmp_path, capsys):
        cli.main(["depth", "--random", "2", "1", "3", "1",
                  "--output", str(tmp_path / "r.json")])
        assert cli.main(["depth", "--random", "2", "1", "3", "1"]) == 0
        out = json.loads(capsys.readouterr().out)
        # depth-2 bridge penalty is the l1 norm of the coefficients
        assert out["bridge_penalty"] == pytest.approx(
            np.abs(out["alpha"]).sum())

    def test_missing_source(self, capsys):
        assert cli.main(["depth"]) == 2


class TestHighdimCommand:
    def test_laplacian_sweep(self, tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        rc = cli.main(["highdim", "--claim", "laplacian", "--d", "2",
                       "--r-sweep", "50,100", "--samples", "20000",
                       "--seed", "3", "--output", str(out)])
        assert rc == 0
        rows = out.read_text().splitlines()
        assert rows[0] == "r,estimate,std_error"
        assert len(rows) == 3
        for row in rows[1:]:
            _, est, se = row.split(",")
            assert abs(float(est) - 2.0) < 0.2

    def test_bump_decay_sweep(self, tmp_path):
        out = tmp_path / "decay.csv"
        rc = cli.main(["highdim", "--claim", "bump-decay", "--d", "3",
                       "--r-sweep", "5,10", "--samples", "40",
                       "--seed", "0", "--output", str(out)])
        assert rc == 0
        rows = out.read_text().splitlines()[1:]
        vals = [float(r.split(",")[1]) for r in rows]
        assert vals[1] < vals[0]


class TestUsageErrors:
    def test_unknown_command(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["frobnicate"])
        assert exc.value.code == 1

    def test_unknown_flag(self, tent_dataset):
        with pytest.raises(SystemExit) as exc:
            cli.main(["interp", tent_dataset, "--bogus"])
        assert exc.value.code == 1

    def test_missing_required(self, tent_dataset):
        with pytest.raises(SystemExit) as exc:
            cli.main(["train2", tent_dataset])
        assert exc.value.code == 1
