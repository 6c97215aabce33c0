#!/usr/bin/env python3
"""
Tests for the only-believing command line
"""

import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

import only_believing
from bench_harness import CSV_COLUMNS, BenchRow
from checker_errors import ResourceLimitExceeded
from formula_parser import parse_instance
from only_believing import (
    DEFAULT_CONFIG, EXIT_FALSE, EXIT_INPUT_ERROR, EXIT_KO, EXIT_TRUE, build_parser, format_stats,
    load_config, main, read_formula_argument,
)
from tests.conftest import make_document


@pytest.mark.unit
class TestLoadConfig:
    """Test configuration loading"""

    def test_defaults_without_file(self, isolated_config):
        assert load_config() == DEFAULT_CONFIG

    def test_valid_values_override(self, temp_dir):
        path = temp_dir / "config.json"
        path.write_text(json.dumps({"enumeration_cap": 12, "engine": "bdd", "timeout": 5}))
        config = load_config(str(path))
        assert config["enumeration_cap"] == 12
        assert config["engine"] == "bdd"
        assert config["timeout"] == 5

    def test_invalid_and_unknown_keys_ignored(self, temp_dir):
        path = temp_dir / "config.json"
        path.write_text(json.dumps({"enumeration_cap": 99, "engine": "sat", "colour": "blue"}))
        config = load_config(str(path))
        assert config == DEFAULT_CONFIG

    @pytest.mark.parametrize("content", ["{broken", "[1, 2]"])
    def test_unreadable_config(self, temp_dir, content):
        path = temp_dir / "config.json"
        path.write_text(content)
        assert load_config(str(path)) == DEFAULT_CONFIG


@pytest.mark.unit
class TestHelpers:
    """Argument helpers"""

    def test_formula_text(self):
        assert read_formula_argument("K 1 p") == "K 1 p"

    def test_formula_file(self, temp_dir):
        path = temp_dir / "query.txt"
        path.write_text("W 1 ~p\n")
        assert read_formula_argument(str(path)) == "W 1 ~p"

    def test_format_stats(self):
        stats = {"engine": "bdd", "ratoms": 2}
        assert format_stats(stats, "text") == "engine=bdd  ratoms=2"
        assert json.loads(format_stats(stats, "json")) == stats

    def test_subcommand_required(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])


@pytest.mark.integration
class TestCheckCommand:
    """Exit codes of the check subcommand"""

    def test_true(self, isolated_config, model_file, capsys):
        assert main(["check", "--model", model_file(make_document())]) == EXIT_TRUE
        assert "TRUE" in capsys.readouterr().out

    def test_false_with_formula_override(self, isolated_config, model_file, capsys):
        code = main(["check", "--model", model_file(make_document()), "--formula", "K 1 ~p"])
        assert code == EXIT_FALSE
        assert "FALSE" in capsys.readouterr().out

    def test_bdd_engine_and_json_stats(self, isolated_config, model_file, capsys):
        code = main(["check", "--model", model_file(make_document()), "--engine", "bdd", "--stats", "json"])
        assert code == EXIT_TRUE
        stats = json.loads(capsys.readouterr().out.splitlines()[-1])
        assert stats["engine"] == "bdd"
        assert stats["ratoms"] == 2

    def test_node_budget_is_ko(self, isolated_config, committee3_file, capsys):
        code = main(["check", "--model", committee3_file, "--engine", "bdd", "--node-limit", "3"])
        assert code == EXIT_KO
        assert "KO" in capsys.readouterr().out

    def test_enumeration_cap_is_ko(self, isolated_config, committee3_file):
        assert main(["check", "--model", committee3_file, "--engine", "enumerate"]) == EXIT_KO

    def test_resource_error_is_ko(self, isolated_config, model_file, mocker):
        mocker.patch("only_believing.check_instance", side_effect=ResourceLimitExceeded("timeout", "slow"))
        assert main(["check", "--model", model_file(make_document())]) == EXIT_KO

    def test_missing_model(self, isolated_config, temp_dir):
        assert main(["check", "--model", str(temp_dir / "absent.json")]) == EXIT_INPUT_ERROR

    def test_bad_formula(self, isolated_config, model_file, capsys):
        code = main(["check", "--model", model_file(make_document()), "--formula", "p & & q"])
        assert code == EXIT_INPUT_ERROR
        assert "line 1" in capsys.readouterr().err

    def test_invalid_document(self, isolated_config, model_file):
        path = model_file(make_document(query="K 3 p"))
        assert main(["check", "--model", path]) == EXIT_INPUT_ERROR

    def test_not_json(self, isolated_config, temp_dir):
        path = temp_dir / "model.json"
        path.write_text("agents: 1")
        assert main(["check", "--model", str(path)]) == EXIT_INPUT_ERROR

    def test_profile(self, isolated_config, model_file, capsys):
        assert main(["check", "--model", model_file(make_document()), "--profile"]) == EXIT_TRUE
        assert "Profile" in capsys.readouterr().out

    def test_config_engine(self, isolated_config, model_file, capsys):
        config = isolated_config / "cli.json"
        config.write_text(json.dumps({"engine": "bdd"}))
        assert main(["check", "--config", str(config), "--model", model_file(make_document())]) == EXIT_TRUE
        assert "engine=bdd" in capsys.readouterr().out


@pytest.mark.integration
class TestOtherCommands:
    """generate, translate and bench-committee"""

    def test_generate(self, isolated_config, temp_dir):
        target = temp_dir / "c3.json"
        assert main(["generate", "--n", "3", "--variant", "second", "--output", str(target)]) == 0
        inst = parse_instance(target.read_text())
        assert inst.agents == (1, 2, 3)
        assert len(inst.vocab[1]) == 26

    def test_generate_invalid_size(self, isolated_config, temp_dir):
        assert main(["generate", "--n", "2", "--output", str(temp_dir / "c2.json")]) == EXIT_INPUT_ERROR

    def test_translate_to_file(self, isolated_config, model_file, temp_dir):
        target = temp_dir / "out.qdimacs"
        assert main(["translate", "--model", model_file(make_document()), "--output", str(target)]) == 0
        text = target.read_text()
        assert text.startswith("c map ")
        assert "p cnf " in text

    def test_translate_to_stdout(self, isolated_config, model_file, capsys):
        assert main(["translate", "--model", model_file(make_document()), "--formula", "[+1 p] B 1 p"]) == 0
        assert "p cnf" in capsys.readouterr().out

    def test_bench_to_stdout(self, isolated_config, mocker, capsys):
        row = BenchRow(n=3, atom_count=9, ratoms=100, state_exponent=309, verdict="TRUE", wall_ms=1.5, peak_nodes=42)
        bench = mocker.patch("only_believing.run_committee_bench", return_value=[row])
        assert main(["bench-committee", "--min", "3", "--max", "3"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert lines[1] == "3,9,100,309,TRUE,1.5,42"
        assert bench.call_args.args[:3] == ("first", 3, 3)

    def test_bench_bad_range(self, isolated_config):
        assert main(["bench-committee", "--min", "5", "--max", "4"]) == EXIT_INPUT_ERROR

    def test_bench_workers_from_config(self, isolated_config, mocker, temp_dir):
        config = temp_dir / "cli.json"
        config.write_text(json.dumps({"bench_workers": 3}))
        bench = mocker.patch.object(only_believing, "run_committee_bench", return_value=[])
        csv_path = temp_dir / "rows.csv"
        assert main(["--config", str(config), "bench-committee", "--csv", str(csv_path)]) == 0
        assert bench.call_args.args[4] == 3
        assert csv_path.read_text().strip() == ",".join(CSV_COLUMNS)
