import json
from fractions import Fraction

import pytest

from framepick.errors import DatasetError, ValidationError
from framepick.evaluation import (
    ANSWER_INSTRUCTION,
    CSV_HEADER,
    OVERALL_TAG,
    AccuracyReport,
    AccuracyRow,
    EvalRecord,
    QaItem,
    aggregate,
    build_prompt,
    comparison_tables,
    load_dataset,
    merge_reports,
    parse_answer,
    read_report_csv,
    read_reported_csv,
    write_records,
    write_report,
)


def _item(**overrides) -> QaItem:
    fields = dict(
        item_id="q1",
        video_id="v1",
        question="How many ducks cross the road?",
        options=("one", "two", "three", "four"),
        answer_label="B",
        task_tag="counting",
    )
    fields.update(overrides)
    return QaItem(**fields)


# ---------------------------------------------------------------- dataset


def _write_dataset(tmp_path, lines):
    path = tmp_path / "items.jsonl"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _line(**overrides) -> str:
    doc = dict(
        item_id="q1",
        video_id="v1",
        question="What happens first?",
        options=["walk", "run"],
        answer="A",
        task_tag="ordering",
    )
    doc.update(overrides)
    return json.dumps(doc)


def test_load_dataset_basics(tmp_path):
    path = _write_dataset(
        tmp_path,
        [
            _line(),
            "",  # blank lines are skipped
            _line(item_id="q2", options=["a", "b", "c", "d"], answer="D"),
        ],
    )
    items = load_dataset(path)
    assert [i.item_id for i in items] == ["q1", "q2"]
    assert items[0].labels == "AB"
    assert items[1].labels == "ABCD"
    assert items[1].answer_label == "D"


def test_load_dataset_rejects_answer_outside_labels(tmp_path):
    path = _write_dataset(tmp_path, [_line(options=["a", "b", "c", "d"], answer="E")])
    with pytest.raises(DatasetError, match="outside"):
        load_dataset(path)


def test_load_dataset_rejects_duplicate_item_id(tmp_path):
    path = _write_dataset(tmp_path, [_line(), _line(video_id="v2")])
    with pytest.raises(DatasetError, match="duplicate.*line 1"):
        load_dataset(path)


@pytest.mark.parametrize(
    "line,message",
    [
        ("{not json", "invalid JSON"),
        ('["a"]', "JSON object"),
        (_line(extra=1), "unknown fields"),
        (json.dumps({"item_id": "q"}), "missing field"),
        (_line(options="ab"), "must be list"),
        (_line(options=["a", 2]), "strings"),
        (_line(options=["only"]), "options"),
        (_line(options=["a", "b", "c", "d", "e", "f", "g"]), "options"),
        (_line(item_id=""), "item_id"),
        (_line(answer="x"), "outside"),
    ],
)
def test_load_dataset_line_errors(tmp_path, line, message):
    path = _write_dataset(tmp_path, [line])
    with pytest.raises(DatasetError, match=message):
        load_dataset(path)


def test_load_dataset_empty_and_missing(tmp_path):
    empty = tmp_path / "empty.jsonl"
    empty.write_text("\n\n", encoding="utf-8")
    with pytest.raises(DatasetError, match="no items"):
        load_dataset(empty)
    with pytest.raises(DatasetError, match="cannot read"):
        load_dataset(tmp_path / "absent.jsonl")


# ---------------------------------------------------------------- prompts


def test_prompt_golden():
    assert build_prompt(_item()) == (
        "How many ducks cross the road?\n"
        "A. one\n"
        "B. two\n"
        "C. three\n"
        "D. four\n"
        "Answer with the option's letter only."
    )
    assert ANSWER_INSTRUCTION == "Answer with the option's letter only."


def test_prompt_six_options_runs_to_f():
    item = _item(options=tuple("uvwxyz"), answer_label="F")
    prompt = build_prompt(item)
    assert "F. z" in prompt
    assert prompt.splitlines()[7] == ANSWER_INSTRUCTION


def test_prompt_preserves_option_text_verbatim():
    item = _item(options=("line one\nline two", "plain"), answer_label="A")
    assert "A. line one\nline two\nB. plain\n" in build_prompt(item)


# ---------------------------------------------------------------- adjudication


@pytest.mark.parametrize(
    "raw,n,expected",
    [
        ("B", 4, "B"),
        ("b", 4, "B"),
        (" C.", 4, "C"),
        ("A)", 4, "A"),
        ("The answer is B.", 4, "B"),
        ("answer is d", 4, "D"),
        ("The answer is B7", 4, "B"),  # glued digit defeats rule 1 only
        ("I think (C) is right", 4, "C"),
        ("option D", 4, "D"),
        ("The grade is A+", 4, "A"),
        ("Between A and B, I pick the latter", 4, "A"),  # leftmost wins
        ("A B C", 4, "A"),
        ("The answer is: (b)", 4, "B"),
        ("\nC\n", 4, "C"),
        ("I don't know.", 4, None),
        ("AB", 4, None),  # adjacent letters are not standalone
        ("C", 2, None),  # out of label range
        ("", 4, None),
        ("  42  ", 4, None),
        ("bad", 4, None),
    ],
)
def test_parse_answer_corpus(raw, n, expected):
    assert parse_answer(raw, n) == expected


def test_parse_answer_range_validation():
    with pytest.raises(ValidationError):
        parse_answer("A", 1)
    with pytest.raises(ValidationError):
        parse_answer("A", 7)


# ---------------------------------------------------------------- records


def _record(**overrides) -> EvalRecord:
    fields = dict(
        item_id="q1",
        strategy="maxinfo",
        n_max=96,
        task_tag="counting",
        raw_response="B",
        parsed_label="B",
        correct=True,
        cause=None,
    )
    fields.update(overrides)
    return EvalRecord(**fields)


def test_record_json_line_key_order():
    assert _record().to_json_line() == (
        '{"item_id":"q1","strategy":"maxinfo","n_max":96,"task_tag":"counting",'
        '"raw_response":"B","parsed_label":"B","correct":true,"cause":null}'
    )


def test_record_invariants():
    with pytest.raises(ValidationError, match="unparsed"):
        _record(parsed_label=None, correct=True)
    _record(parsed_label=None, correct=False, raw_response="??")
    with pytest.raises(ValidationError, match="reserved"):
        _record(task_tag=OVERALL_TAG)


def test_write_records_golden(tmp_path):
    records = [_record(), _record(item_id="q2", correct=False, parsed_label="A")]
    out = tmp_path / "records.jsonl"
    write_records(records, out)
    lines = out.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 2
    assert json.loads(lines[1])["parsed_label"] == "A"


# ---------------------------------------------------------------- aggregation


def _three_records():
    return [
        _record(item_id="q1", task_tag="counting", correct=True),
        _record(item_id="q2", task_tag="counting", correct=False, parsed_label="A"),
        _record(item_id="q3", task_tag="ordering", correct=True),
    ]


def test_aggregate_exact_fractions_and_csv_golden():
    report = aggregate(_three_records(), model="m")
    by_tag = {row.task_tag: row for row in report.rows}
    assert by_tag[OVERALL_TAG].accuracy == Fraction(2, 3)
    assert by_tag["counting"].accuracy == Fraction(1, 2)
    assert by_tag["ordering"].accuracy == Fraction(1, 1)
    assert report.to_csv() == (
        "model,strategy,n_max,task_tag,correct,total,accuracy\n"
        "m,maxinfo,96,overall,2,3,0.6667\n"
        "m,maxinfo,96,counting,1,2,0.5000\n"
        "m,maxinfo,96,ordering,1,1,1.0000\n"
    )
    assert CSV_HEADER == (
        "model", "strategy", "n_max", "task_tag", "correct", "total", "accuracy"
    )


def test_aggregate_keeps_cells_separate():
    records = _three_records() + [
        _record(item_id="q9", strategy="uniform_fps", n_max=16, correct=False,
                parsed_label="C"),
    ]
    report = aggregate(records, model="m")
    cells = {(r.strategy, r.n_max) for r in report.rows}
    assert cells == {("maxinfo", 96), ("uniform_fps", 16)}


def test_aggregate_validation():
    with pytest.raises(ValidationError):
        aggregate([], model="m")
    with pytest.raises(ValidationError):
        aggregate(_three_records(), model="")


def test_markdown_golden():
    report = aggregate(_three_records(), model="m")
    assert report.to_markdown() == (
        "| Model | n_max | Task | First | Center | FPS | MaxInfo | CSTA |\n"
        "|---|---|---|---|---|---|---|---|\n"
        "| m | 96 | overall | - | - | - | 0.6667 | - |\n"
        "| m | 96 | counting | - | - | - | 0.5000 | - |\n"
        "| m | 96 | ordering | - | - | - | 1.0000 | - |\n"
    )


def test_report_rows_auto_sorted_overall_first():
    rows = (
        AccuracyRow("m", "maxinfo", 96, "zeta", 1, 2),
        AccuracyRow("m", "maxinfo", 96, OVERALL_TAG, 1, 2),
        AccuracyRow("m", "single_first", 1, OVERALL_TAG, 1, 2),
    )
    report = AccuracyReport(rows)
    assert [(r.strategy, r.task_tag) for r in report.rows] == [
        ("single_first", OVERALL_TAG),
        ("maxinfo", OVERALL_TAG),
        ("maxinfo", "zeta"),
    ]


def test_write_then_read_report_roundtrip(tmp_path):
    report = aggregate(_three_records(), model="m")
    write_report(report, tmp_path)
    loaded = read_report_csv(tmp_path / "report.csv")
    assert loaded.rows == report.rows
    assert (tmp_path / "report.md").read_text(encoding="utf-8") == (
        report.to_markdown()
    )


def test_read_report_csv_rejects_bad_header(tmp_path):
    bad = tmp_path / "report.csv"
    bad.write_text("model,oops\nm,1\n", encoding="utf-8")
    with pytest.raises(ValidationError, match="header"):
        read_report_csv(bad)
    empty = tmp_path / "empty.csv"
    empty.write_text("", encoding="utf-8")
    with pytest.raises(ValidationError, match="empty"):
        read_report_csv(empty)


def test_merge_reports_combines_models():
    a = aggregate(_three_records(), model="m1")
    b = aggregate(_three_records(), model="m2")
    merged = merge_reports([a, b])
    assert {row.model for row in merged.rows} == {"m1", "m2"}
    assert len(merged.rows) == len(a.rows) + len(b.rows)
    with pytest.raises(ValidationError):
        merge_reports([])


# ---------------------------------------------------------------- comparison


def test_read_reported_csv(tmp_path):
    path = tmp_path / "reported.csv"
    path.write_text(
        "model,task_tag,accuracy\nm1,overall,64.9\nm1,counting,58.0\n",
        encoding="utf-8",
    )
    assert read_reported_csv(path) == {
        ("m1", "overall"): 64.9,
        ("m1", "counting"): 58.0,
    }
    path.write_text("model,task,acc\n", encoding="utf-8")
    with pytest.raises(ValidationError, match="header"):
        read_reported_csv(path)
    path.write_text(
        "model,task_tag,accuracy\nm1,overall,64.9\nm1,overall,65.0\n",
        encoding="utf-8",
    )
    with pytest.raises(ValidationError, match="duplicate"):
        read_reported_csv(path)
    path.write_text("model,task_tag,accuracy\nm1,overall,high\n", encoding="utf-8")
    with pytest.raises(ValidationError, match="line 2"):
        read_reported_csv(path)


def test_comparison_tables_golden_with_deltas():
    report = AccuracyReport(
        (AccuracyRow("m1", "maxinfo", 96, OVERALL_TAG, 43, 54),)
    )
    csv_text, md_text = comparison_tables(report, {("m1", OVERALL_TAG): 64.9})
    assert csv_text == (
        "model,strategy,n_max,task_tag,correct,total,"
        "accuracy_pct,reported_pct,delta_pct\n"
        "m1,maxinfo,96,overall,43,54,79.6,64.9,+14.7\n"
    )
    assert md_text == (
        "| Model | n_max | Task | Reported | First | Center | FPS | MaxInfo "
        "| CSTA |\n"
        "|---|---|---|---|---|---|---|---|---|\n"
        "| m1 | 96 | overall | 64.9 | - | - | - | 79.6 (+14.7) | - |\n"
    )


def test_comparison_tables_without_literature_scores():
    report = AccuracyReport(
        (AccuracyRow("m1", "uniform_fps", 16, OVERALL_TAG, 1, 2),)
    )
    csv_text, md_text = comparison_tables(report)
    assert "m1,uniform_fps,16,overall,1,2,50.0,,\n" in csv_text
    assert "| m1 | 16 | overall | - | - | - | 50.0 | - | - |" in md_text


def test_comparison_tables_rejects_unknown_strategy():
    report = AccuracyReport(
        (AccuracyRow("m1", "sideways", 16, OVERALL_TAG, 1, 2),)
    )
    with pytest.raises(ValidationError, match="no table column"):
        comparison_tables(report)


def test_comparison_tables_duplicate_handling():
    row = AccuracyRow("m1", "maxinfo", 96, OVERALL_TAG, 1, 2)
    deduped, _ = comparison_tables(merge_reports([
        AccuracyReport((row,)), AccuracyReport((row,))
    ]))
    assert deduped.count("m1,maxinfo") == 1
    conflicting = AccuracyReport(
        (row, AccuracyRow("m1", "maxinfo", 96, OVERALL_TAG, 2, 2))
    )
    with pytest.raises(ValidationError, match="conflicting"):
        comparison_tables(conflicting)
