"""
Run records and the JSON-lines results file
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np


def _plain(value):
    """numpy scalars and arrays to JSON-native values"""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


@dataclass
class ReportRecord:
    command: str
    params: dict
    metrics: dict
    seed: int
    wall_time: float = 0.0
    status: str = "success"
    error: str | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return _plain(asdict(self))

    def to_json_line(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def metric_line(self) -> str:
        """The record without its wall time, for reproducibility comparisons"""
        data = self.to_dict()
        data.pop("wall_time")
        return json.dumps(data, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "ReportRecord":
        return cls(**data)


def append_records(records, path: str | Path) -> int:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "a") as handle:
        for record in records:
            handle.write(record.to_json_line() + "\n")
    return len(records)


def read_records(path: str | Path) -> list[ReportRecord]:
    with open(path) as handle:
        return [ReportRecord.from_dict(json.loads(line)) for line in handle if line.strip()]
