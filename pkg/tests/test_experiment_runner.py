import csv
import json

import pytest
from docx import Document

from core_math.errors import ValidationError
from dashboard import run_manager
from experiment_runner.cli import EXIT_IO, EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, main
from experiment_runner.config import (
    ExperimentConfig,
    load_config,
    parse_key_values,
    parse_value,
    save_config,
)
from experiment_runner.records import ReportRecord, append_records, read_records
from experiment_runner.report import create_word_document, csv_text, records_to_rows, write_csv
from experiment_runner.runner import run, run_batch


@pytest.fixture(autouse=True)
def no_seed_override(monkeypatch):
    monkeypatch.delenv("QCOMM_SEED", raising=False)


def _record(command="raz", N=16, rate=0.9):
    return ReportRecord(command, {"N": N, "K": 64}, {"success_rate": rate, "nested": {"a": 1}}, seed=3)


class TestConfig:
    def test_unknown_command(self):
        with pytest.raises(ValidationError):
            ExperimentConfig("teleport")

    def test_seed_range(self):
        with pytest.raises(ValidationError):
            ExperimentConfig("raz", seed=-1)

    def test_parse_value(self):
        assert parse_value("3") == 3
        assert parse_value("0.5") == 0.5
        assert parse_value("[1, 2]") == [1, 2]
        assert parse_value("true") is True
        assert parse_value("extreme") == "extreme"

    def test_key_value_lines(self):
        data = parse_key_values("# comment\ncommand=raz\nN = 16\n\nkind=boundary\n")
        assert data == {"command": "raz", "N": 16, "kind": "boundary"}
        with pytest.raises(ValidationError):
            parse_key_values("no equals sign")

    @pytest.mark.parametrize("fmt", ["json", "kv"])
    def test_round_trip(self, tmp_path, fmt):
        config = ExperimentConfig("lemma-verify", 42, {"check": "skew", "s": [-1.0, 0.0, 1.0], "N": 12},
                                  output="out/results.jsonl")
        path = tmp_path / f"config.{fmt}"
        save_config(config, path, fmt)
        assert load_config(path) == config

    def test_list_parameters(self):
        config = ExperimentConfig("raz-calibrate", params={"Ns": "8,16,32"})
        assert config.get("Ns", [8], int) == [8, 16, 32]
        assert ExperimentConfig("raz-calibrate", params={"Ns": 8}).get("Ns", [4], int) == [8]

    def test_casts_are_validated(self):
        config = ExperimentConfig("raz", params={"N": "abc", "K": 2.5, "trials": 4.0})
        with pytest.raises(ValidationError):
            config.get("N", 16, int)
        with pytest.raises(ValidationError):
            config.get("K", 4096, int)
        assert config.get("trials", 1, int) == 4
        with pytest.raises(ValidationError):
            ExperimentConfig("raz-calibrate", params={"Ns": "8,x"}).get("Ns", [8], int)

    def test_environment_overrides_seed(self):
        config = ExperimentConfig("raz", 1).apply_env({"QCOMM_SEED": "99"})
        assert config.seed == 99
        with pytest.raises(ValidationError):
            ExperimentConfig("raz", 1).apply_env({"QCOMM_SEED": "abc"})


class TestRecords:
    def test_jsonl_round_trip(self, tmp_path):
        path = tmp_path / "r.jsonl"
        append_records([_record(), _record(N=32)], path)
        append_records([_record(N=64)], path)
        loaded = read_records(path)
        assert [r.params["N"] for r in loaded] == [16, 32, 64]
        assert loaded[0] == _record()

    def test_metric_line_ignores_wall_time(self):
        a = _record()
        b = _record()
        b.wall_time = 12.5
        assert a.metric_line() == b.metric_line()
        assert a.to_json_line() != b.to_json_line()


class TestReport:
    def test_rows_flatten_scalars_only(self):
        columns, rows = records_to_rows([_record()])
        assert columns == ["command", "seed", "status", "param.K", "param.N", "metric.success_rate"]
        assert rows[0]["metric.success_rate"] == 0.9

    def test_csv_is_sorted_by_parameters(self, tmp_path):
        path = tmp_path / "out.csv"
        assert write_csv([_record(N=32), _record(N=16)], path) == 2
        with open(path, newline="") as handle:
            rows = list(csv.DictReader(handle))
        assert [row["param.N"] for row in rows] == ["16", "32"]
        assert csv_text([_record()]).splitlines()[0].startswith("command,seed,status")

    def test_word_document(self):
        failed = ReportRecord("raz", {}, {}, 0, status="failed", error="boom")
        buffer = create_word_document([_record(), failed])
        doc = Document(buffer)
        text = "\n".join(p.text for p in doc.paragraphs)
        assert "Communication Cost Lab Report" in text
        assert "success_rate" in text
        assert "FAILED RUNS" in text


class TestRunner:
    def test_run_appends_records(self, tmp_path):
        out = tmp_path / "results.jsonl"
        config = ExperimentConfig("dfs-quantum", 5, {"n": 2, "shots": 2000}, output=str(out))
        records = run(config)
        assert len(records) == 1
        assert records[0].metrics["bits_sent"] == 0
        assert len(read_records(out)) == 1

    def test_same_seed_reproduces_metrics(self):
        config = ExperimentConfig("sqrt-sampler", 9, {"N": 16, "trials": 500})
        first = [r.metric_line() for r in run(config)]
        second = [r.metric_line() for r in run(config)]
        assert first == second

    def test_dqs_epsnet_bits(self):
        records = run(ExperimentConfig("dqs-epsnet", 1, {"n": 1, "eps": 0.2, "instances": 20}))
        metrics = records[0].metrics
        assert metrics["bits_sent"] == 32
        assert metrics["bits_constant"]
        assert metrics["max_l1_error"] <= 0.2

    def test_ddfs_writes_pairs(self, tmp_path):
        pairs = tmp_path / "pairs.csv"
        records = run(ExperimentConfig("ddfs", 2, {"n": 2, "shots": 500, "csv": str(pairs)}))
        assert records[0].metrics["reduction_bits"] == 2
        with open(pairs) as handle:
            assert len(handle.readlines()) == 501

    def test_lemma_verify(self):
        records = run(ExperimentConfig("lemma-verify", 0, {"check": "fact1", "N": 4, "p": 0.5}))
        assert records[0].metrics["holds"]
        assert records[0].metrics["lhs"] == pytest.approx(7 / 16)

    def test_rectangles(self):
        records = run(ExperimentConfig("rectangles", 0, {"N": 3, "protocols": 4, "p": 0.2}))
        assert len(records) == 4
        assert all(r.metrics["difference"] <= 1e-12 for r in records)

    def test_raz_calibrate_planted(self):
        records = run(ExperimentConfig("raz-calibrate", 0, {"Ns": "4", "trials": 5, "plant": True}))
        assert records[0].metrics["K"] == 1

    def test_report_command(self, tmp_path):
        source = tmp_path / "results.jsonl"
        append_records([_record(), _record(N=8)], source)
        docx = tmp_path / "report.docx"
        config = ExperimentConfig("report", params={"input": str(source), "docx": str(docx)})
        assert len(run(config)) == 2
        assert (tmp_path / "results.jsonl.csv").exists()
        assert docx.stat().st_size > 0

    def test_report_needs_input(self):
        with pytest.raises(ValidationError):
            run(ExperimentConfig("report"))

    def test_batch_collects_failures(self):
        results = run_batch([
            ExperimentConfig("lemma-verify", 0, {"check": "contradiction"}),
            ExperimentConfig("lemma-verify", 0, {"check": "missing"}),
        ])
        assert [r["status"] for r in results] == ["success", "failed"]
        assert "missing" in results[1]["error"]


class TestCli:
    def test_success(self, capsys):
        assert main(["lemma-verify", "--check", "fact1", "--N", "4", "--p", "0.5"]) == EXIT_OK
        line = json.loads(capsys.readouterr().out.strip())
        assert line["metrics"]["holds"] is True

    def test_usage_error(self):
        assert main(["teleport"]) == EXIT_USAGE

    def test_validation_error(self):
        assert main(["lemma-verify", "--check", "missing"]) == EXIT_VALIDATION
        assert main(["sqrt-sampler", "--N", "16", "--agree", "40"]) == EXIT_VALIDATION

    @pytest.mark.parametrize("argv", [
        ["dfs-quantum", "--n", "-1"],
        ["dfs-quantum", "--param", "n=abc"],
        ["ddfs", "--shots", "0"],
        ["raz", "--N", "1", "--trials", "1"],
        ["raz-calibrate", "--Ns", "8,x"],
        ["dqs-epsnet", "--eps", "0"],
        ["dqs-epsnet", "--outcomes", "1"],
        ["sqrt-sampler", "--k", "0"],
        ["rectangles", "--protocols", "0"],
        ["lemma-verify", "--check", "fact1", "--param", "N=four"],
    ])
    def test_out_of_domain_parameters(self, argv):
        assert main(argv) == EXIT_VALIDATION

    def test_skew_rectangle_flag(self, capsys):
        assert main(["lemma-verify", "--check", "skew", "--N", "8", "--b", "4", "--rectangles", "20"]) == EXIT_OK
        line = json.loads(capsys.readouterr().out.strip())
        assert line["params"]["rectangles"] == 20

    def test_io_error(self, tmp_path):
        assert main(["report", "--input", str(tmp_path / "absent.jsonl")]) == EXIT_IO

    def test_out_and_param(self, tmp_path):
        out = tmp_path / "r.jsonl"
        code = main(["dfs-quantum", "--seed", "4", "--out", str(out), "--param", "n=1", "--shots", "100"])
        assert code == EXIT_OK
        record = read_records(out)[0]
        assert record.seed == 4
        assert record.params == {"n": 1, "shots": 100}

    def test_config_file(self, tmp_path):
        path = tmp_path / "c.kv"
        path.write_text("command=lemma-verify\nseed=3\ncheck=contradiction\n")
        assert main(["lemma-verify", "--config", str(path)]) == EXIT_OK

    def test_seed_from_environment(self, tmp_path, monkeypatch):
        monkeypatch.setenv("QCOMM_SEED", "17")
        out = tmp_path / "r.jsonl"
        assert main(["lemma-verify", "--check", "contradiction", "--seed", "2", "--out", str(out)]) == EXIT_OK
        assert read_records(out)[0].seed == 17


class TestRunManager:
    def test_store_lifecycle(self):
        state = {}
        run_manager.initialize_run_manager(state)
        first = run_manager.add_run("raz", {"N": 16}, [_record()], state=state)
        second = run_manager.add_run("raz", {"N": 32}, error="boom", state=state)
        assert run_manager.get_run_by_id(first, state)["status"] == "success"
        assert run_manager.get_run_by_id(second, state)["status"] == "failed"
        summary = run_manager.get_run_summary(state)
        assert summary == {"total_runs": 2, "succeeded": 1, "failed": 1, "total_records": 1,
                           "by_command": {"raz": 1}}
        assert len(run_manager.get_combined_records(state)) == 1

        run_manager.discard_run(first, state)
        assert run_manager.get_run_by_id(first, state) is None
        third = run_manager.add_run("ddfs", {}, [], state=state)
        assert third == 2

        run_manager.clear_all_runs(state)
        assert run_manager.get_all_runs(state) == []
