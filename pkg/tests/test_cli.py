"""Command-line interface: subcommands, exit codes, output shapes."""

import json

import pytest

from physquiz.cli import (
    EXIT_NON_QUIZZABLE,
    EXIT_NOT_FOUND,
    EXIT_OK,
    EXIT_UPSTREAM,
    EXIT_USAGE,
    main,
)
from physquiz.knowledge import load_snapshot

SPEED_TEXT = (
    'Concerning the concept of "speed": given velocity v = 6 m s^-1 and '
    "duration t = 10 s, calculate the value and unit of the distance s."
)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestGenerate:
    def test_seeded_question(self, capsys):
        code, out, err = run(
            capsys, "generate", "--concept", "speed", "--target", "s", "--seed", "98"
        )
        assert code == EXIT_OK
        assert out.strip() == SPEED_TEXT
        assert err == ""

    def test_runs_are_deterministic(self, capsys):
        first = run(capsys, "generate", "--concept", "speed", "--target", "s", "--seed", "98")
        second = run(capsys, "generate", "--concept", "speed", "--target", "s", "--seed", "98")
        assert first == second

    def test_show_solution(self, capsys):
        code, out, _ = run(
            capsys,
            "generate", "--concept", "speed", "--target", "s", "--seed", "98",
            "--show-solution",
        )
        assert code == EXIT_OK
        assert "Solution: 60 m" in out
        assert "Rearranged formula: s = v * t" in out
        assert "Substituted values: s = 6 m s^-1 * 10 s" in out
        assert "Result: s = 60 m" in out

    def test_json_without_solution(self, capsys):
        code, out, _ = run(
            capsys,
            "generate", "--concept", "speed", "--target", "s", "--seed", "98", "--json",
        )
        assert code == EXIT_OK
        payload = json.loads(out)
        assert payload["concept_qid"] == "Q3711325"
        assert payload["question_text"] == SPEED_TEXT
        assert payload["seed"] == 98
        assert "solution" not in payload
        assert "explanation" not in payload

    def test_json_with_solution(self, capsys):
        code, out, _ = run(
            capsys,
            "generate", "--concept", "speed", "--target", "s", "--seed", "98",
            "--json", "--show-solution",
        )
        payload = json.loads(out)
        assert payload["solution"] == {
            "value": "60",
            "value_text": "60",
            "approximate": False,
            "unit": "m",
        }
        assert [s["label"] for s in payload["explanation"]["steps"]] == [
            "Rearranged formula",
            "Substituted values",
            "Result",
        ]

    def test_range_flag(self, capsys):
        code, out, _ = run(
            capsys,
            "generate", "--concept", "speed", "--target", "s", "--seed", "1",
            "--range", "5", "5",
        )
        assert code == EXIT_OK
        assert "v = 5 m s^-1" in out

    def test_template_file(self, capsys, tmp_path):
        template = tmp_path / "template.txt"
        template.write_text("Find {target_symbol}.\n", "utf-8")
        code, out, _ = run(
            capsys,
            "generate", "--concept", "speed", "--target", "s", "--seed", "98",
            "--template", str(template),
        )
        assert code == EXIT_OK
        assert out.strip() == "Find s."

    def test_unknown_concept_exit_and_message(self, capsys):
        code, out, err = run(capsys, "generate", "--concept", "phlogiston pressure")
        assert code == EXIT_NOT_FOUND
        assert err.strip() == "No Wikidata item with formula found."
        assert out == ""

    def test_non_quizzable_exit(self, capsys):
        code, _, err = run(capsys, "generate", "--concept", "Q2305665", "--seed", "0")
        assert code == EXIT_NON_QUIZZABLE
        assert err.strip() == "not quizzable: NoFunctionalLinkage"

    def test_translation_failure_exit(self, capsys):
        code, _, err = run(capsys, "generate", "--concept", "Q837940", "--seed", "0")
        assert code == EXIT_NON_QUIZZABLE
        assert err.startswith("cannot generate a question:")

    def test_generation_failure_exit(self, capsys):
        code, _, err = run(capsys, "generate", "--concept", "Q161254", "--seed", "0")
        assert code == EXIT_NON_QUIZZABLE
        assert err.startswith("cannot generate a question:")

    def test_bad_range_is_usage_error(self, capsys):
        code, _, err = run(
            capsys, "generate", "--concept", "speed", "--range", "0", "5"
        )
        assert code == EXIT_USAGE
        assert err.startswith("error:")


class TestGrade:
    def test_fraction_answer_against_decimal_solution(self, capsys):
        code, out, _ = run(
            capsys,
            "grade", "--value", "5/2", "--unit", "m",
            "--solution-value", "2.5", "--solution-unit", "m",
        )
        assert code == EXIT_OK
        assert "value: correct" in out
        assert "unit: correct" in out

    def test_wrong_answer_still_exits_zero(self, capsys):
        code, out, _ = run(
            capsys,
            "grade", "--value", "9", "--unit", "kg",
            "--solution-value", "60", "--solution-unit", "m",
        )
        assert code == EXIT_OK
        assert "value: incorrect" in out
        assert "unit: incorrect" in out
        assert "Value incorrect!" in out
        assert "Unit incorrect!" in out

    def test_json_report(self, capsys):
        code, out, _ = run(
            capsys,
            "grade", "--value", "60", "--unit", "m/s",
            "--solution-value", "60", "--solution-unit", "m s^-1", "--json",
        )
        assert code == EXIT_OK
        payload = json.loads(out)
        assert payload == {
            "value_correct": True,
            "unit_correct": True,
            "messages": [],
            "relative_error": 0.0,
        }

    def test_custom_tolerance(self, capsys):
        code, out, _ = run(
            capsys,
            "grade", "--value", "66", "--unit", "m",
            "--solution-value", "60", "--solution-unit", "m", "--tolerance", "1/10",
        )
        assert code == EXIT_OK
        assert "value: correct" in out

    def test_unreadable_solution_value_is_usage_error(self, capsys):
        code, _, err = run(
            capsys,
            "grade", "--value", "60", "--unit", "m",
            "--solution-value", "sixty", "--solution-unit", "m",
        )
        assert code == EXIT_USAGE
        assert err.startswith("error:")

    def test_unreadable_solution_unit_is_usage_error(self, capsys):
        code, _, err = run(
            capsys,
            "grade", "--value", "60", "--unit", "m",
            "--solution-value", "60", "--solution-unit", "furlongs",
        )
        assert code == EXIT_USAGE

    def test_negative_tolerance_is_usage_error(self, capsys):
        code, _, _ = run(
            capsys,
            "grade", "--value", "60", "--unit", "m",
            "--solution-value", "60", "--solution-unit", "m", "--tolerance", "-0.5",
        )
        assert code == EXIT_USAGE


class TestLookup:
    def test_human_output(self, capsys):
        code, out, _ = run(capsys, "lookup", "Q3711325")
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0] == "speed (Q3711325)"
        assert lines[1] == r"  formula: v = \frac{s}{t}"
        assert lines[2] == "  dimension: L T^-1"
        assert "  s: distance [L]" in lines

    def test_json_output(self, capsys):
        code, out, _ = run(capsys, "lookup", "speed", "--json")
        assert code == EXIT_OK
        payload = json.loads(out)
        assert payload["qid"] == "Q3711325"
        assert payload["formula_dimension"] == "L T^-1"

    def test_unknown_exit(self, capsys):
        code, _, err = run(capsys, "lookup", "Q999999999")
        assert code == EXIT_NOT_FOUND
        assert err.strip() == "No Wikidata item with formula found."


class TestSnapshot:
    def test_subset_written_and_loadable(self, capsys, tmp_path):
        out_path = tmp_path / "subset.json"
        code, out, _ = run(
            capsys, "snapshot", "--out", str(out_path), "--concepts", "speed,Q35875"
        )
        assert code == EXIT_OK
        assert f"wrote 2 records to {out_path}" in out
        records = load_snapshot(out_path)
        assert [r.qid for r in records] == ["Q3711325", "Q35875"]

    def test_full_corpus(self, capsys, tmp_path):
        out_path = tmp_path / "full.json"
        code, out, _ = run(capsys, "snapshot", "--out", str(out_path))
        assert code == EXIT_OK
        assert "wrote 20 records" in out

    def test_written_snapshot_usable_as_fixture(self, capsys, tmp_path):
        out_path = tmp_path / "subset.json"
        run(capsys, "snapshot", "--out", str(out_path), "--concepts", "speed")
        code, out, _ = run(
            capsys,
            "generate", "--concept", "speed", "--target", "s", "--seed", "98",
            "--fixture", str(out_path),
        )
        assert code == EXIT_OK
        assert out.strip() == SPEED_TEXT

    def test_unknown_concept_in_filter(self, capsys, tmp_path):
        code, _, err = run(
            capsys,
            "snapshot", "--out", str(tmp_path / "x.json"), "--concepts", "phlogiston",
        )
        assert code == EXIT_NOT_FOUND

    def test_unwritable_path(self, capsys, tmp_path):
        code, _, err = run(
            capsys, "snapshot", "--out", str(tmp_path / "missing" / "x.json")
        )
        assert code == EXIT_UPSTREAM
        assert err.startswith("store error:")


class TestEval:
    def test_table_output(self, capsys):
        code, out, _ = run(capsys, "eval")
        assert code == EXIT_OK
        assert "speed (Q3711325)" in out
        assert "question_and_correction" in out
        assert "translation" in out.splitlines()[0]

    def test_json_report(self, capsys):
        code, out, _ = run(capsys, "eval", "--json")
        assert code == EXIT_OK
        payload = json.loads(out)
        assert len(payload["rows"]) == 20
        assert payload["aggregates"]["rearrangement_ok"] == "75% yes"
        assert payload["buckets"]["question_and_correction"] == 13

    def test_csv_report(self, capsys):
        code, out, _ = run(capsys, "eval", "--csv")
        assert code == EXIT_OK
        header = out.splitlines()[0]
        assert header.startswith("qid,label,identifier_semantics_ok")
        assert len(out.strip().splitlines()) == 21  # header + 20 rows

    def test_out_file(self, capsys, tmp_path):
        out_path = tmp_path / "report.json"
        code, out, _ = run(capsys, "eval", "--json", "--out", str(out_path))
        assert code == EXIT_OK
        assert f"wrote report to {out_path}" in out
        payload = json.loads(out_path.read_text("utf-8"))
        assert payload["buckets"]["none"] == 7

    def test_deterministic_across_runs(self, capsys):
        first = run(capsys, "eval", "--json")
        second = run(capsys, "eval", "--json")
        assert first == second


class TestConfigErrors:
    def test_missing_config_file(self, capsys, tmp_path):
        code, _, err = run(
            capsys,
            "generate", "--concept", "speed", "--config", str(tmp_path / "nope.json"),
        )
        assert code == EXIT_USAGE
        assert err.startswith("error:")

    def test_config_file_supplies_range(self, capsys, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"range_lo": 5, "range_hi": 5}), "utf-8")
        code, out, _ = run(
            capsys,
            "generate", "--concept", "speed", "--target", "s", "--seed", "1",
            "--config", str(config),
        )
        assert code == EXIT_OK
        assert "v = 5 m s^-1" in out
