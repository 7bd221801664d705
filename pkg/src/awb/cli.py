"""Command-line front end.

Subcommands: ``check`` (evaluate a formula on a model), ``transform``
(build and optionally dump the quotient structure), ``translate`` (rewrite
a formula into the implicit-knowledge fragment), and ``verify`` (run the
randomized conjecture suite).

Exit codes: 0 success (or formula true), 1 formula false, 2 input error,
3 transform precondition violation, 4 conjecture failure.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from typing import Optional, Sequence

from .formula import (
    Aware,
    BoxIBox,
    ParseError,
    atoms_of,
    format_formula,
    parse_ail,
    parse_hms,
    translate,
)
from .harness import TrialConfig, run_suite
from .hms import DEFAULT_VARIANT, VARIANTS, extension, sat_hms, truth_set
from .model import ModelError, load_model, reach_composed, sat_ail, validate
from .transform import (
    DEFAULT_ATOM_CAP,
    TransformInapplicable,
    dump_transform,
    hms_transform,
    transform_summary,
)

EXIT_TRUE = 0
EXIT_FALSE = 1
EXIT_INPUT = 2
EXIT_PRECONDITION = 3
EXIT_CONJECTURE = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="awb",
        description="Model-check awareness logic formulas, build quotient "
        "state-space structures, and verify the translation between them.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="evaluate a formula on a model")
    check.add_argument("model", help="model JSON file")
    check.add_argument("--formula", required=True, help="formula text")
    check.add_argument("--world", help="evaluation world")
    check.add_argument(
        "--lang",
        choices=("ail", "hms"),
        default="ail",
        help="formula language and semantics (default: ail)",
    )
    check.add_argument(
        "--hms-state",
        help="explicit evaluation state 'world@vocab' for --lang hms "
        "(default: the world's class in the formula's vocabulary space)",
    )
    check.add_argument(
        "--variant",
        choices=VARIANTS,
        default=DEFAULT_VARIANT,
        help="implicit-operator variant for --lang hms",
    )
    check.add_argument("-v", "--verbose", action="store_true", help="show the evidence used")

    transform = sub.add_parser("transform", help="build the quotient structure")
    transform.add_argument("model", help="model JSON file")
    transform.add_argument("--dump", metavar="PATH", help="write the JSON dump here")
    transform.add_argument(
        "--atom-cap",
        type=int,
        default=DEFAULT_ATOM_CAP,
        help=f"refuse models with more atoms than this (default {DEFAULT_ATOM_CAP})",
    )

    tr = sub.add_parser("translate", help="rewrite a formula into the implicit fragment")
    tr.add_argument("--formula", required=True, help="formula text")

    verify = sub.add_parser("verify", help="run the randomized conjecture suite")
    verify.add_argument(
        "--seed",
        type=int,
        default=None,
        help="master seed (default: AWB_SEED environment variable, else 42)",
    )
    verify.add_argument("--trials", type=int, default=1000)
    verify.add_argument("--variant", choices=VARIANTS, default=DEFAULT_VARIANT)
    verify.add_argument(
        "--both-variants",
        action="store_true",
        help="also test the other implicit-operator variant and compare them",
    )
    verify.add_argument(
        "--no-a-condition",
        action="store_true",
        help="drop the vocabulary hypothesis from generation and checking",
    )
    verify.add_argument("--format", choices=("text", "json"), default="text")
    verify.add_argument(
        "--timing",
        action="store_true",
        help="include real wall time in JSON output (breaks byte-stability)",
    )
    return parser


def _load(path: str):
    m = load_model(path)
    violations = validate(m)
    if violations:
        raise ModelError("; ".join(violations))
    return m


def _cmd_check(args) -> int:
    m = _load(args.model)
    if args.lang == "ail":
        f = parse_ail(args.formula)
        if args.world is None:
            print("error: --world is required", file=sys.stderr)
            return EXIT_INPUT
        value = sat_ail(m, args.world, f)
        print("true" if value else "false")
        if args.verbose:
            if isinstance(f, BoxIBox):
                reach = sorted(reach_composed(m, f.agent, args.world), key=m.world_order)
                print(f"reach({f.agent}, {args.world}): {{{', '.join(reach)}}}")
            elif isinstance(f, Aware):
                aware = sorted(m.awareness_at(f.agent, args.world))
                body = sorted(atoms_of(f.body))
                print(
                    f"awareness({f.agent}, {args.world}): {{{', '.join(aware)}}}; "
                    f"body atoms: {{{', '.join(body)}}}"
                )
        return EXIT_TRUE if value else EXIT_FALSE

    f = parse_hms(args.formula)
    s = hms_transform(m)
    if args.hms_state is not None:
        x = s.resolve_state(args.hms_state)
    else:
        if args.world is None:
            print("error: --world or --hms-state is required", file=sys.stderr)
            return EXIT_INPUT
        x = s.locate(args.world, atoms_of(f))
    value = sat_hms(s, x, f, args.variant)
    print("true" if value else "false")
    if args.verbose:
        ts = truth_set(s, f, args.variant)
        base = ", ".join(str(y) for y in sorted(ts.base))
        print(f"state: {x}; truth-set base: {{{base}}}; extension size: {len(extension(s, ts))}")
    return EXIT_TRUE if value else EXIT_FALSE


def _cmd_transform(args) -> int:
    m = _load(args.model)
    s = hms_transform(m, atom_cap=args.atom_cap)
    print(transform_summary(s))
    if args.dump:
        text = dump_transform(s)
        directory = os.path.dirname(os.path.abspath(args.dump))
        fd, tmp = tempfile.mkstemp(prefix=".awb-dump-", dir=directory)
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(text)
            os.replace(tmp, args.dump)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        print(f"wrote {args.dump}")
    return EXIT_TRUE


def _cmd_translate(args) -> int:
    f = parse_ail(args.formula)
    print(format_formula(translate(f)))
    return EXIT_TRUE


def _cmd_verify(args) -> int:
    seed = args.seed
    if seed is None:
        raw = os.environ.get("AWB_SEED", "42")
        try:
            seed = int(raw)
        except ValueError:
            print(f"error: AWB_SEED must be an integer, got {raw!r}", file=sys.stderr)
            return EXIT_INPUT
    cfg = TrialConfig(
        seed=seed,
        trials=args.trials,
        variant=args.variant,
        require_a_condition=not args.no_a_condition,
        both_variants=args.both_variants,
    )
    report = run_suite(cfg)
    if args.format == "json":
        sys.stdout.write(report.to_json(timing=args.timing))
    else:
        sys.stdout.write(report.to_text())
    return EXIT_TRUE if report.failures_total == 0 else EXIT_CONJECTURE


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "check":
            return _cmd_check(args)
        if args.command == "transform":
            return _cmd_transform(args)
        if args.command == "translate":
            return _cmd_translate(args)
        return _cmd_verify(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except TransformInapplicable as exc:
        print(f"error: transform inapplicable: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (ModelError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
