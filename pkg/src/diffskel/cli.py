"""Command line interface: ``diffskel <command> [options]``.

Every option may also come from a JSON file given with ``--config``; keys
are option names with or without leading dashes (``"iters"``,
``"--keep-endpoints"``, ``"keep_endpoints"``). Options on the command line
win over the file.

Failures print a single JSON line ``{"error": <kind>, "message": <text>}``
on stderr and exit nonzero: 2 for usage errors, 3 for bad input data, 4
for unsupported requests and 1 for anything else.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .benchmark import ALGORITHMS, run_benchmark, write_corpus, write_csv
from .census import census_report, run_census
from .diff import NoiseParams, learn_skeleton_demo
from .exceptions import ContractError, DomainError, FormatError
from .io import read_volume, write_volume
from .peeler import PeelConfig, skeletonize
from .shapes import KINDS, make_shape
from .topology import betti_numbers
from .validation import check_iterations
from .volume import N_CONFIGS, BinaryVolume

EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_CONTRACT = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected true or false, got {text!r}")


def _iters(text):
    try:
        return check_iterations(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _json_object(text):
    if isinstance(text, dict):
        return text
    try:
        value = json.loads(text)
    except json.JSONDecodeError as exc:
        raise argparse.ArgumentTypeError(f"not valid JSON: {exc.msg}") from None
    if not isinstance(value, dict):
        raise argparse.ArgumentTypeError("expected a JSON object")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--threads", type=int, default=1, help="worker threads (default 1)")
    common.add_argument("--config", type=Path, help="JSON file supplying default option values")
    common.add_argument("--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"])

    parser = _Parser(prog="diffskel", description="Topology-preserving skeletonization tools.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("skeletonize", parents=[common], help="thin a binary volume")
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--output", required=True, type=Path)
    p.add_argument("--detector", choices=["boolean", "euler"], default="boolean")
    p.add_argument("--iters", type=_iters, default="auto", help="outer iterations or 'auto'")
    p.add_argument("--keep-endpoints", type=_bool, default=True, metavar="true|false")
    p.set_defaults(func=cmd_skeletonize)

    p = sub.add_parser("verify", parents=[common], help="print Betti numbers and Euler characteristic")
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--out", type=Path, help="also write the report here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("census", parents=[common], help="classify neighborhood configurations")
    p.add_argument("--mode", choices=["full", "sampled"], default="full")
    p.add_argument("--n", type=int, help="sample size for --mode sampled")
    p.add_argument("--shards", type=int, default=1)
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--stop", type=int, default=N_CONFIGS)
    p.add_argument("--out", required=True, type=Path)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("demo-learn", parents=[common], help="learn an input whose skeleton matches a target")
    p.add_argument("--target", required=True, type=Path)
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=60)
    p.add_argument("--lr", type=float, default=1000.0)
    p.add_argument("--iters", type=_iters, default=1)
    p.add_argument("--detector", choices=["boolean", "euler"], default="boolean")
    p.add_argument("--out", required=True, type=Path, help="CSV loss trace")
    p.add_argument("--volume-out", type=Path, help="write the learned probability volume here")
    p.set_defaults(func=cmd_demo_learn)

    p = sub.add_parser("benchmark", parents=[common], help="score skeletonizers on a corpus")
    p.add_argument("--corpus", required=True, type=Path)
    p.add_argument("--algorithms", nargs="+", choices=ALGORITHMS, default=list(ALGORITHMS))
    p.add_argument("--out", required=True, type=Path)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("make-shape", parents=[common], help="write a synthetic shape or a whole corpus")
    target = p.add_mutually_exclusive_group(required=True)
    target.add_argument("--out", type=Path, help="volume path for a single shape")
    target.add_argument("--corpus", type=Path, help="directory for the standard corpus")
    p.add_argument("--kind", choices=KINDS, default="thick_torus")
    p.add_argument("--params", type=_json_object, default={}, help="JSON object of shape parameters")
    p.add_argument("--blobs", type=int, default=4, help="random blobs in a corpus")
    p.set_defaults(func=cmd_make_shape)
    return parser


# commands --------------------------------------------------------------


def _binary_input(path) -> np.ndarray:
    v = read_volume(path)
    if not isinstance(v, BinaryVolume):
        raise DomainError(f"{path}: expected a binary (u8) volume")
    return np.asarray(v)


def cmd_skeletonize(args) -> dict:
    cfg = PeelConfig(args.detector, args.iters, args.keep_endpoints)
    skel = skeletonize(_binary_input(args.input), cfg)
    write_volume(skel, args.output)
    return {"output": str(args.output), "points": int(skel.sum())}


def cmd_verify(args) -> dict:
    report = betti_numbers(_binary_input(args.input)).to_dict()
    if args.out:
        args.out.write_text(json.dumps(report) + "\n")
    return report


def cmd_census(args) -> dict:
    result = run_census(args.mode, args.n, args.seed, args.start, args.stop, args.shards, args.threads)
    return census_report(result, args.out)


def cmd_demo_learn(args) -> dict:
    params = NoiseParams(args.beta, args.tau, args.seed)
    if args.iters == "auto":
        raise ContractError("demo-learn needs a fixed --iters, not 'auto'")
    result = learn_skeleton_demo(
        _binary_input(args.target), params, args.steps, args.lr, args.iters, args.detector
    )
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["step", "loss"])
        for step, loss in enumerate(result.losses):
            writer.writerow([step, repr(float(loss))])
    if args.volume_out:
        write_volume(result.volume.astype(np.float32), args.volume_out)
    return {"initial_loss": result.losses[0], "final_loss": result.losses[-1], "steps": args.steps}


def cmd_benchmark(args) -> dict:
    rows = run_benchmark(args.corpus, args.algorithms)
    write_csv(rows, args.out)
    return {"rows": len(rows), "out": str(args.out)}


def cmd_make_shape(args) -> dict:
    if args.corpus:
        paths = write_corpus(args.corpus, args.blobs, args.seed)
        return {"corpus": str(args.corpus), "volumes": len(paths)}
    v = make_shape(args.kind, args.params, args.seed)
    write_volume(v, args.out)
    return {"output": str(args.out), "shape": list(v.shape), "points": int(v.sum())}


# plumbing --------------------------------------------------------------


def _config_defaults(parser: argparse.ArgumentParser, argv, command_parser) -> None:
    """Load ``--config`` (if any) into the command's defaults."""
    pre = _Parser(add_help=False)
    pre.add_argument("--config", type=Path)
    known, _ = pre.parse_known_args(argv)
    if known.config is None:
        return
    try:
        values = json.loads(known.config.read_text())
    except FileNotFoundError:
        raise FormatError(f"{known.config}: config file not found") from None
    except json.JSONDecodeError as exc:
        raise FormatError(f"{known.config}: config is not valid JSON ({exc.msg})") from None
    if not isinstance(values, dict):
        raise FormatError(f"{known.config}: config must be a JSON object")
    actions = {a.dest: a for a in command_parser._actions if a.dest not in ("help", "config", "func")}
    defaults = {}
    for key, value in values.items():
        dest = key.lstrip("-").replace("-", "_")
        if dest not in actions:
            raise UsageError(f"unknown option {key!r} in config {known.config}")
        action = actions[dest]
        if isinstance(value, str) and action.type is not None:
            try:
                value = action.type(value)
            except (argparse.ArgumentTypeError, ValueError) as exc:
                raise UsageError(f"config option {key!r}: {exc}") from None
        elif action.type in (_bool, _iters, _json_object):
            value = action.type(value)
        if action.choices is not None:
            items = value if isinstance(value, list) else [value]
            if any(v not in action.choices for v in items):
                raise UsageError(f"config option {key!r}: invalid choice {value!r}")
        defaults[dest] = value
        # a value from the config satisfies a required option
        action.required = False
        action.default = value
    command_parser.set_defaults(**defaults)


def _fail(kind: str, message: str, code: int) -> int:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    return code


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
        command = next((a for a in argv if a in subparsers.choices), None)
        if command is not None:
            _config_defaults(parser, argv, subparsers.choices[command])
        args = parser.parse_args(argv)
        logging.basicConfig(level=args.log_level, format="%(levelname)s %(name)s: %(message)s")
        if args.threads < 1:
            raise UsageError("--threads must be at least 1")
        summary = args.func(args)
    except UsageError as exc:
        return _fail("UsageError", str(exc), EXIT_USAGE)
    except (FormatError, DomainError) as exc:
        return _fail(type(exc).__name__, str(exc), EXIT_DATA)
    except ContractError as exc:
        return _fail("ContractError", str(exc), EXIT_CONTRACT)
    except OSError as exc:
        return _fail("IOError", f"{exc.filename or ''}: {exc.strerror or exc}".strip(": "), 1)
    print(json.dumps(summary))
    return 0


if __name__ == "__main__":
    sys.exit(main())
