"""
Session-scoped store of experiment runs for the dashboard
Handles adding, listing, discarding and combining run records
"""

from datetime import datetime

import streamlit as st

from experiment_runner.records import ReportRecord


def _state(state=None):
    return st.session_state if state is None else state


def initialize_run_manager(state=None):
    """Initialize session state for run management"""
    state = _state(state)
    if "runs" not in state:
        state["runs"] = []
    if "next_run_id" not in state:
        state["next_run_id"] = 0


def add_run(command, params, records=None, error=None, state=None):
    """
    Add a finished run to the store

    Args:
        command: experiment command name
        params: parameters the run was configured with
        records: list of ReportRecord produced (None when the run failed)
        error: error message of a failed run

    Returns:
        int: ID of added run
    """
    state = _state(state)
    initialize_run_manager(state)

    run = {
        "id": state["next_run_id"],
        "command": command,
        "params": dict(params),
        "records": list(records or []),
        "status": "failed" if error else "success",
        "error": error,
        "created_at": datetime.now().strftime("%Y-%m-%d %H:%M:%S"),
        "wall_time": sum(r.wall_time for r in records or []) / max(1, len(records or [])),
    }

    state["next_run_id"] += 1
    state["runs"].append(run)
    return run["id"]


def get_run_by_id(run_id, state=None):
    """Get run by ID"""
    state = _state(state)
    initialize_run_manager(state)
    for run in state["runs"]:
        if run["id"] == run_id:
            return run
    return None


def get_all_runs(state=None):
    state = _state(state)
    initialize_run_manager(state)
    return state["runs"]


def discard_run(run_id, state=None):
    """Remove run from store"""
    state = _state(state)
    initialize_run_manager(state)
    state["runs"] = [r for r in state["runs"] if r["id"] != run_id]


def clear_all_runs(state=None):
    state = _state(state)
    state["runs"] = []
    state["next_run_id"] = 0


def get_combined_records(state=None) -> list[ReportRecord]:
    """Records of every successful run, in the order they were added"""
    combined = []
    for run in get_all_runs(state):
        if run["status"] == "success":
            combined.extend(run["records"])
    return combined


def get_run_summary(state=None):
    """Get summary statistics of all runs"""
    runs = get_all_runs(state)
    succeeded = [r for r in runs if r["status"] == "success"]

    by_command = {}
    for run in succeeded:
        by_command[run["command"]] = by_command.get(run["command"], 0) + 1

    return {
        "total_runs": len(runs),
        "succeeded": len(succeeded),
        "failed": len(runs) - len(succeeded),
        "total_records": sum(len(r["records"]) for r in succeeded),
        "by_command": by_command,
    }
