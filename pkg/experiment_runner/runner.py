"""
Single-coordinator execution of an experiment config
"""

from __future__ import annotations

import logging
import time

from core_math.errors import ValidationError
from core_math.rng import make_rng
from experiment_runner.commands import COMMAND_TABLE
from experiment_runner.config import ExperimentConfig
from experiment_runner.records import ReportRecord, append_records, read_records
from experiment_runner.report import write_csv, write_word_document

logger = logging.getLogger(__name__)


def run(config: ExperimentConfig) -> list[ReportRecord]:
    """
    Execute one command with a generator seeded from config.seed

    Records are appended to config.output (JSON lines) when it is set. The
    `report` command reads a results file instead and writes CSV (and DOCX).

    Returns:
        list: the records produced
    """
    if config.command == "report":
        return run_report(config)
    if config.command not in COMMAND_TABLE:
        raise ValidationError(f"unknown command {config.command!r}")
    rng = make_rng(config.seed)
    started = time.perf_counter()
    results = COMMAND_TABLE[config.command](config, rng)
    elapsed = time.perf_counter() - started
    records = [ReportRecord(config.command, params, metrics, config.seed, elapsed) for params, metrics in results]
    logger.info("%s: %d record(s) in %.2fs", config.command, len(records), elapsed)
    if config.output:
        append_records(records, config.output)
    return records


def run_report(config: ExperimentConfig) -> list[ReportRecord]:
    source = config.get("input") or config.output
    if not source:
        raise ValidationError("report needs an input results file")
    records = read_records(source)
    csv_path = config.get("csv") or f"{source}.csv"
    write_csv(records, csv_path)
    docx_path = config.get("docx")
    if docx_path:
        write_word_document(records, docx_path)
    return records


def run_batch(configs) -> list[dict]:
    """
    Run several configs, collecting a result dict per config

    Returns:
        list: dicts with 'command', 'status' ('success' or 'failed'), and
        'records' or 'error'
    """
    results = []
    for config in configs:
        try:
            records = run(config)
            results.append({"command": config.command, "status": "success", "records": records})
        except Exception as e:
            logger.error("%s failed: %s", config.command, e)
            results.append({"command": config.command, "status": "failed", "error": str(e)})
    return results
