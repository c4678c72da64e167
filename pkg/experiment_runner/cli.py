"""
Command-line front end
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from core_math.errors import LabError
from experiment_runner.config import COMMANDS, DEFAULT_SEED, ExperimentConfig, load_config, parse_value
from experiment_runner.runner import run

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_IO = 4

# flag name -> (type, help)
COMMAND_FLAGS = {
    "dfs-quantum": {"n": (int, "qubits"), "shots": (int, "samples"), "instance": (str, "JSON instance file")},
    "dqs-epsnet": {"n": (int, "qubits"), "eps": (float, "target accuracy"), "instances": (int, "random instances"),
                   "outcomes": (int, "POVM outcomes (2 = projective)")},
    "raz": {"N": (int, "dimension"), "K": (int, "codebook size"), "trials": (int, "instances per label"),
            "kind": (str, "extreme or boundary")},
    "raz-calibrate": {"Ns": (str, "comma-separated dimensions"), "trials": (int, "instances per label"),
                      "k_cap": (int, "largest K tried")},
    "ddfs": {"n": (int, "qubits"), "shots": (int, "samples"), "instance": (str, "JSON instance file"),
             "csv": (str, "write sampled pairs here")},
    "sqrt-sampler": {"N": (int, "string length"), "k": (int, "queries"), "agree": (int, "agreeing positions"),
                     "trials": (int, "repetitions")},
    "lemma-verify": {"check": (str, "check name"), "N": (int, "length"), "p": (float, "correlation"),
                     "b": (float, "shift parameter"), "s": (str, "skew value(s)"), "delta": (float, "delta"),
                     "rectangles": (int, "random rectangles in the skew sweep")},
    "rectangles": {"N": (int, "cube dimension"), "p": (float, "correlation"), "depth": (int, "tree depth"),
                   "protocols": (int, "random protocols")},
    "report": {"input": (str, "results file"), "csv": (str, "CSV output"), "docx": (str, "Word report output")},
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcomm", description="Communication-cost experiments and checks")
    parser.add_argument("--verbose", "-v", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        cmd = sub.add_parser(command)
        cmd.add_argument("--seed", type=int, default=None)
        cmd.add_argument("--out", default=None, help="append records to this JSON-lines file")
        cmd.add_argument("--config", default=None, help="key=value or JSON config file")
        cmd.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                         help="extra parameter (repeatable)")
        if command == "raz-calibrate":
            cmd.add_argument("--plant", action="store_true", help="plant psi in the codebook")
        for name, (kind, help_text) in COMMAND_FLAGS[command].items():
            cmd.add_argument(f"--{name}", dest=name, type=kind, default=None, help=help_text)
    return parser


def config_from_args(args) -> ExperimentConfig:
    if args.config:
        config = load_config(args.config)
        config.command = args.command
    else:
        config = ExperimentConfig(args.command, DEFAULT_SEED)
    for name in COMMAND_FLAGS[args.command]:
        value = getattr(args, name)
        if value is not None:
            config.params[name] = value
    for item in args.param:
        if "=" not in item:
            raise LabError(f"--param expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        config.params[key] = parse_value(value)
    if getattr(args, "plant", False):
        config.params["plant"] = True
    if args.seed is not None:
        config.seed = args.seed
    if args.out:
        config.output = args.out
    return config.apply_env()


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        records = run(config_from_args(args))
    except LabError as e:
        logger.error("%s", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as e:
        logger.error("%s", e)
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    for record in records:
        print(json.dumps({"command": record.command, "params": record.params, "metrics": record.metrics},
                         sort_keys=True, default=str))
    return EXIT_OK
