"""Command line entry point: ``hamrec recover|sweep|table1|predict``."""
from __future__ import annotations

import argparse
import csv
import dataclasses
import datetime
import io
import json
import logging
import sys

import numpy as np

from .models import ModelKind
from .ose import critical_length, profile_lie_counts
from .pipeline import parse_profile, recover, spec_from_profile
from .spectral import SteadyStateSpec
from .sweep import SWEEP_COLUMNS, TABLE1_COLUMNS, SweepConfig, run_sweep, table1

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def render_csv(columns, rows, stamp: str | None) -> str:
    buf = io.StringIO()
    if stamp:
        buf.write(f"# generated_at={stamp}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(row[c]) for c in columns])
    return buf.getvalue()


def render_json(payload, stamp: str | None) -> str:
    if stamp:
        payload = {"generated_at": stamp, **payload}
    return json.dumps(payload, indent=2) + "\n"


def emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _stamp(args) -> str | None:
    if args.reproducible:
        return None
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")


def _profile(text: str):
    try:
        return parse_profile(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _model(text: str) -> ModelKind:
    try:
        return ModelKind.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--reproducible", action="store_true", help="omit the timestamp field")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="hamrec",
        description="Recover generic local spin-chain Hamiltonians from degenerate steady states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("recover", parents=[common], help="run one recovery and print its report as JSON")
    p.add_argument("--model", type=_model, required=True)
    p.add_argument("-L", "--length", type=int, required=True)
    p.add_argument("--profile", type=_profile, default=None,
                   help="degeneracies such as 2 or 2,2, or rho-me")
    p.add_argument("--spec", help="steady-state JSON file {classes: [{weight, indices}]}")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--hoe", action="store_true", help="also report the commutator-map rank r")

    p = sub.add_parser("sweep", parents=[common], help="recovery error statistics versus chain length")
    p.add_argument("--model", type=_model, required=True)
    p.add_argument("--profile", type=_profile, required=True)
    p.add_argument("--lmin", type=int, default=None)
    p.add_argument("--lmax", type=int, default=10)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0, help="base seed; trial i uses seed + i")
    p.add_argument("--threshold", type=float, default=1e-8)
    p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("table1", parents=[common], help="S, N and HOE rank r for the rho-me state")
    p.add_argument("--lmax", type=int, default=10)
    p.add_argument("--seeds", type=int, default=5, help="number of random instances per cell")
    p.add_argument("--seed", type=int, default=0, help="base seed")

    p = sub.add_parser("predict", parents=[common], help="LIE counts and critical length, no simulation")
    p.add_argument("--model", type=_model, required=True)
    p.add_argument("--profile", type=lambda t: "full" if t.strip().lower() == "full" else _profile(t), required=True,
                   help="degeneracies, rho-me, or full (one class spanning the whole space)")
    p.add_argument("--lmax", type=int, default=10)
    return parser


def cmd_recover(args, parser) -> str:
    if (args.profile is None) == (args.spec is None):
        parser.error("recover needs exactly one of --profile or --spec")
    if args.spec:
        with open(args.spec) as fh:
            spec = SteadyStateSpec.from_json(fh.read())
    else:
        if args.profile == "full":
            parser.error("profile 'full' is only meaningful for predict")
        spec = spec_from_profile(args.profile)
    if args.length < args.model.min_length:
        parser.error(f"{args.model.name} needs -L >= {args.model.min_length}")
    if sum(spec.profile) > 2**args.length:
        parser.error(f"profile {spec.profile} needs more than 2**{args.length} eigenstates")
    result = recover(args.model, args.length, spec, args.seed)
    payload = result.report.to_dict()
    if args.hoe:
        from .hoe import hoe_gram, hoe_rank
        from .pipeline import prepare

        basis, _, _, blocks = prepare(args.model, args.length, spec, args.seed)
        payload["r"] = hoe_rank(hoe_gram(basis, blocks))
    return render_json(payload, _stamp(args))


def cmd_sweep(args, parser) -> str:
    lmin = args.lmin if args.lmin is not None else args.model.min_length
    try:
        config = SweepConfig(args.model, args.profile, lmin, args.lmax, args.trials,
                             args.seed, args.threshold, args.workers)
    except ValueError as exc:
        parser.error(str(exc))
    rows = [dataclasses.asdict(r) for r in run_sweep(config)]
    if args.format == "json":
        meta = {"kind": config.kind.value, "profile": list(config.profile), "base_seed": config.base_seed,
                "threshold": config.threshold}
        return render_json({**meta, "rows": rows}, _stamp(args))
    return render_csv(SWEEP_COLUMNS, rows, _stamp(args))


def cmd_table1(args, parser) -> str:
    if not 2 <= args.lmax <= 12 or args.seeds < 1:
        parser.error("table1 needs 2 <= --lmax <= 12 and --seeds >= 1")
    rows = table1(args.lmax, args.seeds, args.seed)
    if args.format == "json":
        return render_json({"rows": rows}, _stamp(args))
    return render_csv(TABLE1_COLUMNS, rows, _stamp(args))


def cmd_predict(args, parser) -> str:
    lengths = range(args.model.min_length, args.lmax + 1)
    Lc = critical_length(args.model, args.profile, args.lmax)
    rows = [
        {"L": L, "S": S, "N": N, "recoverable": ok, "is_critical": L == Lc}
        for L, S, N, ok in profile_lie_counts(args.model, args.profile, lengths)
    ]
    if args.format == "json":
        profile = args.profile if isinstance(args.profile, str) else list(args.profile)
        return render_json({"kind": args.model.value, "profile": profile, "L_c": Lc, "rows": rows}, _stamp(args))
    return render_csv(["L", "S", "N", "recoverable", "is_critical"], rows, _stamp(args))


COMMANDS = {"recover": cmd_recover, "sweep": cmd_sweep, "table1": cmd_table1, "predict": cmd_predict}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        text = COMMANDS[args.command](args, parser)
    except (np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"hamrec: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, IndexError, OSError) as exc:
        print(f"hamrec: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    emit(text, args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
