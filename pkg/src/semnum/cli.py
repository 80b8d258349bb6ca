"""Command-line front end.

Exit codes: 0 success, 1 parse/validation/usage failure, 2 I/O failure,
3 step budget exhausted.
"""

from __future__ import annotations

import argparse
import sys

from . import dsl
from .classic import ChainSpec, decode, encode
from .engine import DEFAULT_MAX_STEPS, Status, parse_scheduler, run
from .export import to_dot, write_trace
from .model import CAOValidationError
from .topology import classify_entities, classify_sns

EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_BUDGET = 0, 1, 2, 3


class _Exit(Exception):
    def __init__(self, code: int):
        self.code = code


def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        print(f"{path}: cannot read: {exc}", file=sys.stderr)
        raise _Exit(EXIT_IO)
    try:
        return dsl.parse(text)
    except dsl.DSLError as exc:
        for err in exc.errors:
            print(f"{path}:{err}", file=sys.stderr)
        raise _Exit(EXIT_INVALID)


def cmd_check(args) -> int:
    _load(args.path)
    return EXIT_OK


def cmd_run(args) -> int:
    cao = _load(args.path)
    try:
        scheduler = parse_scheduler(args.scheduler)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.max_steps < 1:
        print("error: --max-steps must be at least 1", file=sys.stderr)
        return EXIT_INVALID
    result = run(cao, scheduler, args.max_steps, keep_trace=args.trace is not None)
    if args.trace:
        try:
            write_trace(result, args.trace)
        except OSError as exc:
            print(f"{args.trace}: cannot write: {exc}", file=sys.stderr)
            return EXIT_IO
    if not args.quiet:
        for k in cao.keys:
            print(f"{k}: {result.cardinals[k]}")
        values = ", ".join(map(str, result.final_multicardinal.values))
        print(f"multicardinal: [{values}]")
        print(f"length: {result.length}")
        print(f"status: {result.status.value}")
    return EXIT_BUDGET if result.status is Status.BUDGET_EXHAUSTED else EXIT_OK


def cmd_classify(args) -> int:
    cao = _load(args.path)
    rec = classify_sns(cao)
    print(f"name: {rec.name}")
    for feature, value in rec.features().items():
        shown = f"[{value}]" if rec.DEFAULTS[feature] == value else value
        print(f"{feature}: {shown}")
    if rec.parameters():
        print(f"parameters: {rec.parameters()}")
    print(f"sns: {rec.summary()}")
    print("roles:")
    for k, role in classify_entities(cao).items():
        print(f"  {k}: {role.value}")
    return EXIT_OK


def _int_list(text: str | None) -> list[int] | None:
    if text is None:
        return None
    text = text.strip()
    return [int(x) for x in text.split(",")] if text else []


def cmd_encode(args) -> int:
    try:
        radices = _int_list(args.radices)
        rates = _int_list(args.rates)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.value < 0:
        print("error: --value must be non-negative", file=sys.stderr)
        return EXIT_INVALID
    width = args.width if args.width is not None else len(radices) + 1
    if len(radices) == 1 and width - 1 > 1:
        radices = radices * (width - 1)
    if rates is not None and len(rates) == 1 and width - 1 > 1:
        rates = rates * (width - 1)
    try:
        spec = ChainSpec(width, tuple(radices), None if rates is None else tuple(rates))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    digits = encode(args.value, spec)
    value = decode(digits, spec)
    print(f"digits: {','.join(map(str, digits))}")
    print("order: low-to-high (c0 first)")
    print(f"decode: {value.numerator if value.denominator == 1 else value}")
    return EXIT_OK


def cmd_dot(args) -> int:
    text = to_dot(_load(args.path))
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"{args.out}: cannot write: {exc}", file=sys.stderr)
            return EXIT_IO
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="semnum", description="Semantic numeration toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse and validate a .sns file")
    p.add_argument("path")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("run", help="run a .sns file to its fixpoint")
    p.add_argument("path")
    p.add_argument("--scheduler", default="sync", help="sync, seq or perm:SEED (default sync)")
    p.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    p.add_argument("--trace", metavar="OUT.json", help="write the step trace as JSON")
    p.add_argument("--quiet", action="store_true", help="print nothing; rely on the exit code")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("classify", help="print the classification features and entity roles")
    p.add_argument("path")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("encode", help="encode a number on a chain and decode it back")
    p.add_argument("--value", type=int, required=True)
    p.add_argument("--radices", required=True, help="comma-separated radices, one per operator")
    p.add_argument("--rates", help="comma-separated conversion rates (default all 1)")
    p.add_argument("--width", type=int, help="chain width; a single radix/rate is repeated to fit")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("dot", help="export the wiring as Graphviz DOT")
    p.add_argument("path")
    p.add_argument("--out", metavar="FILE.dot")
    p.set_defaults(func=cmd_dot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Exit as exc:
        return exc.code
    except CAOValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
