"""
Aggregation of results files: plot-ready CSV and a Word summary report
"""

from __future__ import annotations

import csv
import io
import json
import logging
from datetime import datetime
from pathlib import Path

from docx import Document
from docx.shared import Inches, Pt

from experiment_runner.records import ReportRecord

logger = logging.getLogger(__name__)


def _cell(value):
    if isinstance(value, (dict, list)):
        return json.dumps(value, sort_keys=True)
    return value


def records_to_rows(records) -> tuple[list[str], list[dict]]:
    """
    Flatten records into one row each: command, then params, then scalar metrics

    Returns:
        tuple: (column names, rows); columns are sorted within each group
    """
    param_keys, metric_keys = set(), set()
    rows = []
    for record in records:
        metrics = {k: v for k, v in record.metrics.items() if not isinstance(v, (dict, list))}
        param_keys.update(record.params)
        metric_keys.update(metrics)
        rows.append({"command": record.command, "seed": record.seed, "status": record.status,
                     **{f"param.{k}": _cell(v) for k, v in record.params.items()},
                     **{f"metric.{k}": v for k, v in metrics.items()}})
    columns = (["command", "seed", "status"]
               + [f"param.{k}" for k in sorted(param_keys)]
               + [f"metric.{k}" for k in sorted(metric_keys)])
    return columns, rows


def _write_rows(records, handle) -> int:
    columns, rows = records_to_rows(records)
    param_columns = [c for c in columns if c.startswith("param.")]
    rows.sort(key=lambda row: (row["command"], *[str(row.get(c, "")) for c in param_columns]))
    writer = csv.DictWriter(handle, fieldnames=columns)
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return len(rows)


def write_csv(records, path: str | Path) -> int:
    """Write the flattened records, sorted by command and parameters"""
    with open(path, "w", newline="") as handle:
        count = _write_rows(records, handle)
    logger.info("wrote %d rows to %s", count, path)
    return count


def csv_text(records) -> str:
    buffer = io.StringIO()
    _write_rows(records, buffer)
    return buffer.getvalue()


def format_record(record: ReportRecord) -> str:
    params = ", ".join(f"{k}={_cell(v)}" for k, v in sorted(record.params.items()))
    lines = [f"{record.command.upper()}  ({params})  seed={record.seed}  status={record.status}"]
    if record.error:
        lines.append(f"    error: {record.error}")
    for key, value in sorted(record.metrics.items()):
        if isinstance(value, float):
            value = f"{value:.6g}"
        elif isinstance(value, (dict, list)):
            continue
        lines.append(f"    {key:<24} {value}")
    return "\n".join(lines)


def create_word_document(records, title: str = "Communication Cost Lab Report"):
    """
    Create a Word document summarizing run records

    Args:
        records: list of ReportRecord
        title: heading of the first page

    Returns:
        BytesIO: Word document as bytes
    """
    doc = Document()

    for section in doc.sections:
        section.top_margin = Inches(0.5)
        section.bottom_margin = Inches(0.5)
        section.left_margin = Inches(0.75)
        section.right_margin = Inches(0.75)

    doc.add_heading(title, level=1)
    doc.add_paragraph(f"Generated {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}, {len(records)} record(s)")

    # monospaced so the metric columns line up
    for record in records:
        for line in format_record(record).split("\n"):
            p = doc.add_paragraph(line)
            for run in p.runs:
                run.font.name = "Courier New"
                run.font.size = Pt(9)

    failed = [r for r in records if r.status != "success"]
    if failed:
        doc.add_page_break()
        doc.add_heading("FAILED RUNS", level=1)
        for record in failed:
            doc.add_paragraph(f"{record.command}: {record.error}")

    doc_buffer = io.BytesIO()
    doc.save(doc_buffer)
    doc_buffer.seek(0)
    return doc_buffer


def write_word_document(records, path: str | Path) -> None:
    Path(path).write_bytes(create_word_document(records).getvalue())
