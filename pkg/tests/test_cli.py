import json

import pytest

from kktnet.cli import EXIT_CODES, exit_code, run_cli
from kktnet.fileio import Report

from conftest import FIXTURES


def corpus():
    return json.loads((FIXTURES / "cli_corpus.json").read_text())


def run_case(case, out_dir):
    argv = [str(FIXTURES / a) if a.endswith((".csv", ".json")) else a for a in case["argv"]]
    out = out_dir / f"{case['name']}.json"
    return run_cli(argv + ["--out", str(out)]), out


class TestExitCodes:
    def test_symmetric_uniform_satisfied(self, tmp_path, capsys):
        code = run_cli(["check", "--loss", "uniform", "--data", str(FIXTURES / "uniform_symmetric.csv"),
                        "--params", str(FIXTURES / "zero_network_sigmoid.json")])
        assert code == 0
        assert capsys.readouterr().out.startswith("check satisfied")

    def test_asymmetric_l1_violated(self):
        code = run_cli(["check", "--loss", "l1", "--data", str(FIXTURES / "manhattan_asymmetric.csv"),
                        "--params", str(FIXTURES / "zero_network_sigmoid.json")])
        assert code == 2

    def test_missing_dataset_argument(self, capsys):
        assert run_cli(["check", "--params", str(FIXTURES / "zero_network_sigmoid.json")]) == 1
        assert "usage:" in capsys.readouterr().err

    def test_missing_dataset_file(self, tmp_path, capsys):
        code = run_cli(["eval", "--data", str(tmp_path / "nope.csv"),
                        "--params", str(FIXTURES / "zero_network_sigmoid.json")])
        assert code == 1
        assert "usage:" in capsys.readouterr().err

    def test_no_subcommand(self):
        assert run_cli([]) == 1

    def test_degenerate(self, tmp_path):
        data = tmp_path / "exact.csv"
        data.write_text("t1,f\n0,0.5\n1,0.5\n")
        code = run_cli(["check", "--data", str(data), "--params", str(FIXTURES / "zero_network_sigmoid.json")])
        assert code == 3

    def test_bad_params_file(self, tmp_path):
        bad = tmp_path / "p.json"
        bad.write_text('{"architecture": "no_hidden", "activation": "sigmoid", "units": [{"w": [0], "w0": 0, "a": 2}]}')
        assert run_cli(["eval", "--data", str(FIXTURES / "uniform_symmetric.csv"), "--params", str(bad)]) == 1

    def test_bad_grid(self):
        assert run_cli(["oracle", "--grid", "1,2", "--data", str(FIXTURES / "uniform_symmetric.csv")]) == 1

    def test_exit_code_is_function_of_status(self):
        for status, code in EXIT_CODES.items():
            assert exit_code(Report("x", status)) == code


class TestCorpus:
    @pytest.mark.parametrize("case", corpus(), ids=lambda c: c["name"])
    def test_case(self, case, tmp_path):
        code, out = run_case(case, tmp_path)
        report = Report.read(out)
        assert code == exit_code(report)
        if case["exit"] is not None:
            assert code == case["exit"]
        assert report.timings is None

    def test_reports_round_trip(self, tmp_path):
        for case in corpus():
            _, out = run_case(case, tmp_path)
            assert Report.read(out).to_json() == out.read_text()

    def test_check_report_contents(self, tmp_path):
        case = next(c for c in corpus() if c["name"] == "check_uniform_symmetric")
        _, out = run_case(case, tmp_path)
        doc = json.loads(out.read_text())
        assert doc["status"] == "satisfied"
        assert (doc["classification"]["n1"], doc["classification"]["n2"]) == (2, 1)
        assert doc["kkt_residual_norm"] <= 1e-12
        assert dict(map(tuple, doc["certificate"]["lamhat"])) == {0: 0.5, 2: 0.5}

    def test_solve_bisect_writes_params(self, tmp_path):
        target = tmp_path / "fit.json"
        code = run_cli(["solve-bisect", "--data", str(FIXTURES / "bisect_five_points.csv"),
                        "--params-out", str(target)])
        assert code == 0
        assert run_cli(["eval", "--data", str(FIXTURES / "bisect_five_points.csv"), "--params", str(target)]) == 0

    def test_timings_opt_in(self, tmp_path):
        out = tmp_path / "t.json"
        run_cli(["eval", "--timings", "--out", str(out), "--data", str(FIXTURES / "uniform_symmetric.csv"),
                 "--params", str(FIXTURES / "zero_network_sigmoid.json")])
        assert Report.read(out).timings["seconds"] >= 0

    def test_byte_identical_reruns(self, tmp_path):
        first, second = tmp_path / "a", tmp_path / "b"
        first.mkdir()
        second.mkdir()
        for case in corpus():
            run_case(case, first)
            run_case(case, second)
        for path in sorted(first.iterdir()):
            assert path.read_bytes() == (second / path.name).read_bytes()
