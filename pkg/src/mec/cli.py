"""``mec`` command-line front end.

Exit codes: 0 success, 2 input or validation error, 3 computation error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from .core import MERGED_KEY, MecError, MecOptions, MecResult, run_mec
from .evaluators import CalibrationError, RemoteScoreError, calibrate_threshold
from .harness import ExperimentReport, SynthConfig, render_explanation, run_experiment
from .schema import SchemaError, load_situation

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_COMPUTE = 3


class InputError(Exception):
    pass


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def render_result(result: MecResult, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(result.to_dict(), indent=2) + "\n"

    keys = list(result.contributions)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["rank", "action", "expected", *keys])
        for pos, a in enumerate(result.ranking, start=1):
            writer.writerow([pos, a, _fmt(result.expected[a]),
                             *(_fmt(result.contributions[k][a]) for k in keys)])
        return buf.getvalue()

    headers = ["rank", "action", "expected", *keys]
    rows = [[str(pos), a, _fmt(result.expected[a]),
             *(_fmt(result.contributions[k][a]) for k in keys)]
            for pos, a in enumerate(result.ranking, start=1)]
    widths = [max(len(h), *(len(r[i]) for r in rows)) for i, h in enumerate(headers)]
    lines = ["  ".join(h.ljust(w) if i < 2 else h.rjust(w)
                       for i, (h, w) in enumerate(zip(headers, widths)))]
    for r in rows:
        lines.append("  ".join(c.ljust(w) if i < 2 else c.rjust(w)
                               for i, (c, w) in enumerate(zip(r, widths))))
    if result.merged_credence is not None:
        lines.append(f"merged credence ({MERGED_KEY}): {_fmt(result.merged_credence)}")
    lines.append(f"selected: {result.selected}")
    return "\n".join(lines) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _read_situation(path: str):
    if not Path(path).is_file():
        raise InputError(f"{path}: no such file")
    try:
        return load_situation(path)
    except SchemaError as exc:
        where = f"{path}:{exc.line}" if exc.line else path
        raise InputError(f"{where}: {exc.detail}") from None
    except RemoteScoreError:
        raise
    except MecError as exc:
        raise InputError(f"{path}: {exc}") from None


def cmd_run(args) -> int:
    if args.threshold is not None and not 0.0 < args.threshold < 1.0:
        raise InputError(f"--threshold {args.threshold} outside (0, 1)")
    situation = _read_situation(args.input)
    result = run_mec(situation, MecOptions(threshold=args.threshold))
    _emit(render_result(result, args.format), args.out)
    return EXIT_OK


def read_calibration_csv(path: str) -> list[tuple[float, int]]:
    if not Path(path).is_file():
        raise InputError(f"{path}: no such file")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise InputError(f"{path}: empty file")
        if [h.strip() for h in header] != ["score", "label"]:
            raise InputError(f"{path}:1: expected header 'score,label'")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                score, label = float(row[0]), int(row[1])
            except (ValueError, IndexError):
                raise InputError(f"{path}:{lineno}: malformed row {row}") from None
            if label not in (0, 1):
                raise InputError(f"{path}:{lineno}: label must be 0 or 1")
            rows.append((score, label))
    return rows


def cmd_calibrate(args) -> int:
    rows = read_calibration_csv(args.input)
    try:
        threshold = calibrate_threshold(rows)
    except CalibrationError as exc:
        raise InputError(f"{args.input}: {exc}") from None
    _emit(f"{threshold:.6f}\n", args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    try:
        config = SynthConfig(seed=args.seed, trials=args.trials,
                             n_evaluators=args.evaluators,
                             evaluator_accuracy=args.accuracy,
                             n_actions=args.actions)
    except MecError as exc:
        raise InputError(str(exc)) from None
    report: ExperimentReport = run_experiment(config)
    text = report.to_json() + "\n" if args.format == "json" else report.to_table()
    _emit(text, args.out)
    return EXIT_OK


def cmd_explain(args) -> int:
    situation = _read_situation(args.input)
    if args.theory not in situation.score_tables:
        raise InputError(f"unknown theory {args.theory!r}")
    for action in (args.better, args.worse):
        if action not in situation.score_tables[args.theory]:
            raise InputError(f"theory {args.theory!r} does not score action {action!r}")
    vocab = {args.theory: args.phrase} if args.phrase else None
    text = render_explanation(args.better, args.worse, args.theory, vocab,
                              scores=situation.score_tables[args.theory])
    _emit(text + "\n", args.out)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mec", description="Maximize expected choiceworthiness "
                                             "across normative theories.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="aggregate a decision situation file")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--format", choices=["json", "table", "csv"], default="table")
    p.add_argument("--threshold", type=float, default=None,
                   help="ordinalize probability-valued ordinal theories at this cut")
    p.add_argument("--out")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("calibrate", help="fit a classification threshold")
    p.add_argument("-i", "--input", required=True, help="CSV with header score,label")
    p.add_argument("--out")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("simulate", help="synthetic ensemble experiment")
    p.add_argument("--evaluators", type=int, required=True)
    p.add_argument("--accuracy", type=float, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--actions", type=int, default=2)
    p.add_argument("--format", choices=["table", "json"], default="table")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("explain", help="render a comparative explanation")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--better", required=True)
    p.add_argument("--worse", required=True)
    p.add_argument("--theory", required=True)
    p.add_argument("--phrase", help="comparative phrase, e.g. 'higher utility'")
    p.add_argument("--out")
    p.set_defaults(func=cmd_explain)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"mec: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (MecError, ArithmeticError) as exc:
        print(f"mec: computation error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
