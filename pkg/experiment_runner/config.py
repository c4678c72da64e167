"""
Experiment configuration: CLI flags, flat key=value files or JSON files
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

from core_math.errors import ValidationError

logger = logging.getLogger(__name__)

SEED_ENV = "QCOMM_SEED"
DEFAULT_SEED = 0
RESERVED_KEYS = ("command", "seed", "output")

COMMANDS = (
    "dfs-quantum",
    "dqs-epsnet",
    "raz",
    "raz-calibrate",
    "ddfs",
    "sqrt-sampler",
    "lemma-verify",
    "rectangles",
    "report",
)


@dataclass
class ExperimentConfig:
    command: str
    seed: int = DEFAULT_SEED
    params: dict = field(default_factory=dict)
    output: str | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValidationError(f"unknown command {self.command!r}")
        self.seed = int(self.seed)
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must be a 64-bit unsigned integer")

    def get(self, key: str, default=None, cast=None):
        """Parameter lookup; list defaults accept comma-separated strings"""
        value = self.params.get(key, default)
        if value is None or cast is None:
            return value
        try:
            if isinstance(default, list):
                if isinstance(value, str):
                    value = [v for v in value.split(",") if v.strip()]
                elif not isinstance(value, (list, tuple)):
                    value = [value]
                return [cast(v) for v in value]
            if cast is int and isinstance(value, float) and not value.is_integer():
                raise ValueError(f"{value} is not an integer")
            return cast(value)
        except (TypeError, ValueError) as e:
            raise ValidationError(f"parameter {key}={value!r}: {e}") from None

    def to_dict(self) -> dict:
        return {"command": self.command, "seed": self.seed, "output": self.output, "params": dict(self.params)}

    def to_text(self, fmt: str = "json") -> str:
        if fmt == "json":
            return json.dumps(self.to_dict(), indent=2, sort_keys=True)
        lines = [f"command={self.command}", f"seed={self.seed}"]
        if self.output is not None:
            lines.append(f"output={json.dumps(self.output)}")
        lines += [f"{key}={json.dumps(value)}" for key, value in sorted(self.params.items())]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        params = dict(data.get("params", {}))
        params.update({k: v for k, v in data.items() if k not in RESERVED_KEYS + ("params",)})
        if "command" not in data:
            raise ValidationError("config needs a command")
        return cls(data["command"], data.get("seed", DEFAULT_SEED), params, data.get("output"))

    def apply_env(self, environ=None) -> "ExperimentConfig":
        """QCOMM_SEED overrides the configured seed"""
        environ = os.environ if environ is None else environ
        if environ.get(SEED_ENV):
            try:
                self.seed = int(environ[SEED_ENV])
            except ValueError:
                raise ValidationError(f"{SEED_ENV} must be an integer") from None
            logger.info("seed overridden from %s: %d", SEED_ENV, self.seed)
        return self


def parse_value(text: str):
    """JSON scalar or list if it parses, the raw string otherwise"""
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def parse_key_values(text: str) -> dict:
    data = {}
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValidationError(f"line {number}: expected key=value")
        key, value = line.split("=", 1)
        data[key.strip()] = parse_value(value.strip())
    return data


def load_config(path: str | Path) -> ExperimentConfig:
    """
    Read a config file in either form

    A file whose first non-blank character is '{' is JSON; anything else is key=value lines.
    """
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ValidationError(f"invalid JSON config: {e}") from None
    else:
        data = parse_key_values(text)
    return ExperimentConfig.from_dict(data)


def save_config(config: ExperimentConfig, path: str | Path, fmt: str = "json") -> None:
    Path(path).write_text(config.to_text(fmt))
