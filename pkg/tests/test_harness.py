"""Corpus evaluation harness against the checked-in expected stage flags."""

import json

import pytest

from physquiz.harness import (
    STAGE_COLUMNS,
    EvalReport,
    evaluate_corpus,
    evaluate_record,
    format_table,
    report_to_csv,
    report_to_dict,
    report_to_json,
)


@pytest.fixture(scope="module")
def report(store):
    return evaluate_corpus(store.records)


class TestAgainstExpectedFlags:
    def test_rows_match(self, report, expected_stage_flags):
        expected_rows = {row["qid"]: row for row in expected_stage_flags["rows"]}
        assert len(report.rows) == len(expected_rows)
        for row in report.rows:
            expected = expected_rows[row.qid]
            for column in STAGE_COLUMNS:
                assert row.stage(column) == expected[column], (row.qid, column)
            assert row.bucket == expected["bucket"], row.qid

    def test_aggregates_match(self, report, expected_stage_flags):
        assert report.aggregates == expected_stage_flags["aggregates"]

    def test_buckets_match(self, report, expected_stage_flags):
        assert report.buckets == expected_stage_flags["buckets"]


class TestInvariants:
    def test_buckets_partition_the_corpus(self, report):
        assert (
            report.buckets["question_and_correction"]
            + report.buckets["only_question"]
            + report.buckets["none"]
        ) == len(report.rows)
        assert report.buckets["question_or_correction"] == (
            report.buckets["question_and_correction"] + report.buckets["only_question"]
        )

    def test_substitution_requires_translation_and_rearrangement(self, report):
        for row in report.rows:
            if row.substitution_ok:
                assert row.translation_ok and row.rearrangement_ok, row.qid

    def test_explanation_requires_substitution(self, report):
        for row in report.rows:
            if row.explanation_ok:
                assert row.substitution_ok, row.qid

    def test_rearrangement_requires_translation(self, report):
        for row in report.rows:
            if row.rearrangement_ok:
                assert row.translation_ok, row.qid

    def test_failing_rows_carry_reasons(self, report):
        for row in report.rows:
            if not all(row.stage(c) for c in STAGE_COLUMNS):
                assert row.failure_reasons, row.qid

    def test_bucket_none_iff_no_substitution(self, report):
        for row in report.rows:
            assert (row.bucket == "none") == (not row.substitution_ok), row.qid


class TestDeterminism:
    def test_two_runs_identical(self, store, report):
        again = evaluate_corpus(store.records)
        assert report_to_json(again) == report_to_json(report)

    def test_single_record_matches_corpus_row(self, store, report):
        row = evaluate_record(store.lookup("Q3711325"))
        assert row == report.rows[[r.qid for r in report.rows].index("Q3711325")]


class TestFailureReasons:
    def reasons_for(self, report, qid):
        row = next(r for r in report.rows if r.qid == qid)
        return "; ".join(row.failure_reasons)

    def test_acceleration_blames_derivative(self, report):
        assert "ContainsDerivative" in self.reasons_for(report, "Q11376")

    def test_center_of_mass_blames_lhs_shape(self, report):
        assert "NoSingleLhsIdentifier" in self.reasons_for(report, "Q2945123")

    def test_conservation_blames_linkage(self, report):
        assert "NoFunctionalLinkage" in self.reasons_for(report, "Q2305665")

    def test_two_equalities_blame_translation(self, report):
        assert "translation:" in self.reasons_for(report, "Q25358")

    def test_angular_momentum_blames_missing_symbol(self, report):
        reasons = self.reasons_for(report, "Q161254")
        assert "no entry for omega" in reasons

    def test_magnetic_flux_blames_units(self, report):
        reasons = self.reasons_for(report, "Q177831")
        assert "unit_retrieval:" in reasons
        assert "substitution:" in reasons


class TestEmptyCorpus:
    def test_aggregates_are_none(self):
        report = evaluate_corpus([])
        assert report.rows == ()
        assert all(value is None for value in report.aggregates.values())
        assert report.buckets == {
            "question_and_correction": 0,
            "only_question": 0,
            "none": 0,
            "question_or_correction": 0,
        }

    def test_formats_do_not_crash(self):
        report = evaluate_corpus([])
        assert "n/a" in format_table(report)
        assert report_to_csv(report).startswith("qid,label")
        json.loads(report_to_json(report))


class TestSerializations:
    def test_dict_round_trips_through_json(self, report):
        payload = json.loads(report_to_json(report))
        assert payload == report_to_dict(report)
        assert payload["schema_version"] == 1

    def test_csv_row_count_and_flags(self, report):
        lines = report_to_csv(report).strip().splitlines()
        assert len(lines) == 1 + len(report.rows)
        speed_line = next(l for l in lines if l.startswith("Q3711325"))
        assert ",yes,yes,yes,yes,yes,yes," in speed_line

    def test_table_mentions_aggregates_and_buckets(self, report):
        table = format_table(report)
        assert "semantics: 95% yes" in table
        assert "rearrange: 75% yes" in table
        assert "question_and_correction: 13 (65%)" in table
        assert "none: 7 (35%)" in table
