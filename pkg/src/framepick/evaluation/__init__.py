"""Frame-accurate video QA evaluation: dataset, adapter wire, scoring."""

from framepick.evaluation.adapter import AdapterClient
from framepick.evaluation.adjudicate import parse_answer
from framepick.evaluation.dataset import OPTION_LABELS, QaItem, load_dataset
from framepick.evaluation.harness import (
    CellResult,
    build_manifests,
    evaluate_cell,
    run_ablation,
    validate_grid,
)
from framepick.evaluation.prompts import ANSWER_INSTRUCTION, build_prompt
from framepick.evaluation.protocol_vectors import run_protocol_vectors
from framepick.evaluation.reporting import (
    CSV_HEADER,
    OVERALL_TAG,
    AccuracyReport,
    AccuracyRow,
    EvalRecord,
    aggregate,
    comparison_tables,
    merge_reports,
    read_report_csv,
    read_reported_csv,
    write_records,
    write_report,
)

__all__ = [
    "ANSWER_INSTRUCTION",
    "AccuracyReport",
    "AccuracyRow",
    "AdapterClient",
    "CSV_HEADER",
    "CellResult",
    "EvalRecord",
    "OPTION_LABELS",
    "OVERALL_TAG",
    "QaItem",
    "aggregate",
    "build_manifests",
    "build_prompt",
    "comparison_tables",
    "evaluate_cell",
    "load_dataset",
    "merge_reports",
    "parse_answer",
    "read_report_csv",
    "read_reported_csv",
    "run_ablation",
    "run_protocol_vectors",
    "validate_grid",
    "write_records",
    "write_report",
]
