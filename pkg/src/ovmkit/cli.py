"""Batch command-line front end.

Commands: ``derive`` (layered model in, variability model out), ``reduce``
(variability model in, optimized model out, optional trace), ``report``
(before/after comparison with counts and reduction percentage), and
``configs`` (count, enumerate, or validate configurations).

Exit codes: 0 success, 1 model or validation error, 2 usage error,
3 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import configs as configspace
from . import documents
from .configs import BudgetExceededError
from .derivation import derive_initial_vm
from .model import ModelError, ProductLineModel
from .reduction import ReductionTrace, reduce

EXIT_OK = 0
EXIT_MODEL_ERROR = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


@dataclass(frozen=True)
class ReductionReport:
    """Before/after counts for a reduction run.

    ``merges`` lists (source, target) pairs and is only known when a trace
    is supplied; valid counts are omitted when enumeration would exceed the
    budget. The percentage is rounded to the nearest integer.
    """

    initial_vp_count: int
    final_vp_count: int
    reduction_percentage: int
    unconstrained_before: int
    unconstrained_after: int
    valid_before: int | None
    valid_after: int | None
    merges: tuple[tuple[str, str], ...] | None


def build_report(
    before: ProductLineModel,
    after: ProductLineModel,
    trace: ReductionTrace | None,
    budget: int,
) -> ReductionReport:
    initial = len(before.vm.variation_points)
    final = len(after.vm.variation_points)
    percentage = round(100 * (initial - final) / initial) if initial else 0

    def valid_count(plm: ProductLineModel) -> int | None:
        try:
            return len(configspace.enumerate_valid(plm, budget))
        except BudgetExceededError:
            return None

    merges = None
    if trace is not None:
        merges = tuple((m.source_vp_id, m.target_vp_id) for m in trace.merges)
        if len(merges) != initial - final:
            raise ModelError(
                f"trace lists {len(merges)} merges but the models differ by "
                f"{initial - final} variation points")
    return ReductionReport(
        initial_vp_count=initial,
        final_vp_count=final,
        reduction_percentage=percentage,
        unconstrained_before=configspace.unconstrained_count(before.vm),
        unconstrained_after=configspace.unconstrained_count(after.vm),
        valid_before=valid_count(before),
        valid_after=valid_count(after),
        merges=merges,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ovmkit",
        description="Derive, reduce, and analyze variability models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    derive_p = sub.add_parser("derive", help="derive a variability model from a layered model")
    derive_p.add_argument("-i", "--input", required=True, help="layered-model document ('-' for stdin)")
    derive_p.add_argument("-o", "--output", required=True, help="output path ('-' for stdout)")
    derive_p.add_argument(
        "--strict-alg1", action="store_true",
        help="only add hierarchy edges witnessed by an interaction between variable activities")

    reduce_p = sub.add_parser("reduce", help="merge variation points where checks allow")
    reduce_p.add_argument("-i", "--input", required=True, help="variability or product-line document ('-' for stdin)")
    reduce_p.add_argument("-o", "--output", required=True, help="output path ('-' for stdout)")
    reduce_p.add_argument("--trace", help="also write the merge trace document here")

    report_p = sub.add_parser("report", help="compare models before and after reduction")
    report_p.add_argument("before", help="model document before reduction")
    report_p.add_argument("after", help="model document after reduction")
    report_p.add_argument("--trace", help="trace document (adds the merge list)")
    report_p.add_argument("--budget", type=int, help="enumeration budget for valid counts")
    report_p.add_argument("--format", choices=("json", "table"), default="table")

    configs_p = sub.add_parser("configs", help="count, enumerate, or validate configurations")
    configs_p.add_argument("-i", "--input", required=True, help="model document ('-' for stdin)")
    mode = configs_p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--count", action="store_true", help="print unconstrained and valid counts")
    mode.add_argument("--enumerate", action="store_true", help="list all valid configurations")
    mode.add_argument("--validate", metavar="CONFIG", help="check a configuration document")
    configs_p.add_argument("--budget", type=int, help="enumeration budget")
    configs_p.add_argument("--format", choices=("json", "table"), default="table")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    handlers = {
        "derive": _cmd_derive,
        "reduce": _cmd_reduce,
        "report": _cmd_report,
        "configs": _cmd_configs,
    }
    try:
        return handlers[args.command](args)
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ModelError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODEL_ERROR


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    return Path(path).read_bytes()


def _write(path: str, data: bytes) -> None:
    if path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        Path(path).write_bytes(data)


def _budget(args) -> int:
    if getattr(args, "budget", None) is not None:
        if args.budget <= 0:
            raise ModelError("budget must be positive")
        return args.budget
    return configspace.default_budget()


def _cmd_derive(args) -> int:
    model, products = documents.parse_layered_model(_read(args.input))
    plm = derive_initial_vm(model, products, strict=args.strict_alg1)
    _write(args.output, documents.serialize(plm))
    return EXIT_OK


def _cmd_reduce(args) -> int:
    plm = documents.parse_variability_model(_read(args.input))
    reduced, trace = reduce(plm)
    _write(args.output, documents.serialize(reduced))
    if args.trace:
        _write(args.trace, documents.serialize(trace))
    return EXIT_OK


def _cmd_report(args) -> int:
    before = documents.parse_variability_model(_read(args.before))
    after = documents.parse_variability_model(_read(args.after))
    trace = documents.parse_trace(_read(args.trace)) if args.trace else None
    report = build_report(before, after, trace, _budget(args))

    if args.format == "json":
        payload = {
            "initial_vp_count": report.initial_vp_count,
            "final_vp_count": report.final_vp_count,
            "reduction_percentage": report.reduction_percentage,
            "unconstrained_before": str(report.unconstrained_before),
            "unconstrained_after": str(report.unconstrained_after),
        }
        if report.valid_before is not None:
            payload["valid_before"] = str(report.valid_before)
        if report.valid_after is not None:
            payload["valid_after"] = str(report.valid_after)
        if report.merges is not None:
            payload["merges"] = [
                {"source": s, "target": t} for s, t in report.merges
            ]
        _print_json(payload)
    else:
        print(f"initial variation points: {report.initial_vp_count}")
        print(f"final variation points:   {report.final_vp_count}")
        print(f"reduction:                {report.reduction_percentage}%")
        if report.merges is not None:
            if report.merges:
                for source, target in report.merges:
                    print(f"merged:                   {target} into {source}")
            else:
                print("merged:                   none")
        print(
            f"unconstrained configs:    {report.unconstrained_before} -> "
            f"{report.unconstrained_after}")
        if report.valid_before is not None and report.valid_after is not None:
            print(f"valid configs:            {report.valid_before} -> {report.valid_after}")
    return EXIT_OK


def _cmd_configs(args) -> int:
    plm = documents.parse_variability_model(_read(args.input))
    budget = _budget(args)

    if args.validate:
        cfg = documents.parse_configuration(_read(args.validate))
        violations = configspace.validate_config(plm, cfg)
        if args.format == "json":
            _print_json({
                "violations": [
                    {"invariant": v.invariant, "subjects": list(v.subject_ids),
                     "message": v.message}
                    for v in violations
                ],
            })
        elif violations:
            for violation in violations:
                print(str(violation))
        else:
            print("configuration is valid")
        return EXIT_MODEL_ERROR if violations else EXIT_OK

    if args.count:
        unconstrained = configspace.unconstrained_count(plm.vm)
        valid = len(configspace.enumerate_valid(plm, budget))
        if args.format == "json":
            _print_json({"unconstrained": str(unconstrained), "valid": str(valid)})
        else:
            print(f"{unconstrained} unconstrained, {valid} valid")
        return EXIT_OK

    valid_configs = configspace.enumerate_valid(plm, budget)
    if args.format == "json":
        _print_json({"configurations": [list(c.sorted_ids()) for c in valid_configs]})
    else:
        for cfg in valid_configs:
            print(" ".join(cfg.sorted_ids()) if cfg.selection else "(empty)")
    return EXIT_OK


def _print_json(payload: dict) -> None:
    print(json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True))


if __name__ == "__main__":
    sys.exit(main())
