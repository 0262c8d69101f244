"""Command-line front end: ``schedule``, ``recover``, ``validate``, ``bench``.

Exit codes: 0 success, 1 input/load errors, 2 safety violations.
"""

from __future__ import annotations

import argparse
import sys
from itertools import groupby
from pathlib import Path

from . import bench as bench_mod
from .context import (
    FAILURE,
    MODE_CHANGE,
    PROFILES,
    ModeTable,
    apply_events,
    load_context,
    load_mode_table,
)
from .errors import ReconstructionError, SafetyViolationError
from .evaluator import evaluate
from .models import load_application, load_platform
from .priorities import SpatialPriorities, builtin_temporal, ingest_priorities
from .reconstructor import reconstruct_full, reconstruct_temporal, recover_failure
from .recovery import build_log, load_log, serialize_log
from .safety import safety_check
from .schedule import load_schedule, serialize_schedule

EXIT_OK, EXIT_INPUT, EXIT_UNSAFE = 0, 1, 2


class InputError(Exception):
    pass


def _read(path: str | None, what: str, binary: bool = False):
    if path is None:
        return None
    try:
        p = Path(path)
        return p.read_bytes() if binary else p.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {what} file {path!r}: {exc.strerror or exc}") from None


def _parse(loader, path, what, *args):
    text = _read(path, what)
    try:
        return loader(text, *args)
    except (ReconstructionError, ValueError) as exc:
        raise InputError(f"{what} file {path!r}: {exc}") from None


def _load_models(args):
    if not args.tasks:
        raise InputError("--tasks is required")
    if not args.platform:
        raise InputError("--platform is required")
    messages = _read(args.messages, "messages")
    am = _parse(load_application, args.tasks, "tasks", messages)
    pm = _parse(load_platform, args.platform, "platform")
    mt = _parse(load_mode_table, args.mode_table, "mode table") if args.mode_table else ModeTable.default()
    return am, pm, mt


def _priorities(args, am, pm):
    if not args.priorities:
        return builtin_temporal(am), SpatialPriorities.least_loaded()
    return _parse(ingest_priorities, args.priorities, "priorities", am, pm)


def _write(path: str | None, data, binary: bool = False):
    if path is None:
        if not binary:
            sys.stdout.write(data)
        return
    p = Path(path)
    if binary:
        p.write_bytes(data)
    else:
        p.write_text(data, encoding="utf-8")


def _report(violations, file=None) -> None:
    file = file or sys.stdout
    if not violations:
        print("safety check: OK", file=file)
        return
    print(f"safety check: {len(violations)} violation(s)", file=file)
    for v in violations:
        print(f"  {v}", file=file)


def cmd_schedule(args) -> int:
    am, pm, mt = _load_models(args)
    profile = args.profile
    if args.context:
        events = _parse(load_context, args.context, "context")
        am, pm, profile = apply_events(am, pm, events, mt, profile)
    tp, sp = _priorities(args, am, pm)
    try:
        sched, log = reconstruct_full(am, pm, tp, sp)
    except SafetyViolationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSAFE
    _write(args.out, serialize_schedule(sched))
    if args.log_out:
        _write(args.log_out, serialize_log(log), binary=True)
    metrics, objective = evaluate(sched, am, pm, profile)
    if args.metrics:
        _write(args.metrics, metrics.to_json() + "\n")
    out = sys.stderr if args.out is None else sys.stdout
    print(metrics.to_json(), file=out)
    print(f"profile={profile} objective={objective!r}", file=out)
    violations = safety_check(sched, am, pm)
    _report(violations, out)
    return EXIT_UNSAFE if violations else EXIT_OK


def cmd_recover(args) -> int:
    am, pm, mt = _load_models(args)
    if not args.schedule:
        raise InputError("--schedule (prior schedule) is required")
    if not args.context:
        raise InputError("--context is required")
    current = _parse(load_schedule, args.schedule, "schedule")
    events = _parse(load_context, args.context, "context")
    log = None
    if args.log:
        try:
            log = load_log(_read(args.log, "recovery log", binary=True))
        except ValueError as exc:
            raise InputError(f"recovery log {args.log!r}: {exc}") from None
    old = current.makespan
    profile = args.profile
    tp_file = _priorities(args, am, pm)[0] if args.priorities else None

    for t, group in groupby(sorted(events, key=lambda e: e.sort_key()), key=lambda e: e.time):
        group = list(group)
        kinds = {e.kind for e in group}
        new_am, new_pm, profile = apply_events(am, pm, group, mt, profile)
        if new_am == am and new_pm == pm:
            print(f"t={t}: event(s) change nothing, schedule kept", file=sys.stderr)
            continue
        try:
            if FAILURE in kinds:
                if log is None:
                    raise InputError("failure recovery needs --log (no snapshot available)")
                current, _ = recover_failure(new_am, new_pm, log, t, FAILURE, tp_file)
                action = "failure recovery"
            elif MODE_CHANGE in kinds:
                current, _ = reconstruct_full(new_am, new_pm, tp_file or builtin_temporal(new_am))
                action = "full reconstruction"
            else:
                current, _ = reconstruct_temporal(new_am, new_pm, current, tp_file, t)
                action = "temporal recovery"
        except SafetyViolationError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_UNSAFE
        am, pm = new_am, new_pm
        log = build_log(current, pm)
        print(f"t={t}: {action} ({', '.join(sorted(kinds))})", file=sys.stderr)

    _write(args.out, serialize_schedule(current))
    if args.log_out:
        _write(args.log_out, serialize_log(log if log is not None else build_log(current, pm)), binary=True)
    out = sys.stderr if args.out is None else sys.stdout
    print(f"makespan: old={old} new={current.makespan}", file=out)
    violations = safety_check(current, am, pm)
    _report(violations, out)
    return EXIT_UNSAFE if violations else EXIT_OK


def cmd_validate(args) -> int:
    am, pm, mt = _load_models(args)
    if not args.schedule:
        raise InputError("--schedule is required")
    sched = _parse(load_schedule, args.schedule, "schedule")
    if args.context:
        events = _parse(load_context, args.context, "context")
        try:
            am, pm, _ = apply_events(am, pm, events, mt)
        except ReconstructionError as exc:
            raise InputError(f"context file {args.context!r}: {exc}") from None
    violations = safety_check(sched, am, pm)
    _report(violations)
    return EXIT_UNSAFE if violations else EXIT_OK


def cmd_bench(args) -> int:
    try:
        counts = tuple(int(c) for c in args.counts.split(",") if c.strip())
        config = bench_mod.BenchConfig(
            task_counts=counts,
            repetitions=args.reps,
            seed=args.seed,
            profiles=tuple(args.profile) if args.profile else PROFILES,
            workers=args.workers,
        )
    except ValueError as exc:
        raise InputError(f"bench config: {exc}") from None

    def progress(rec):
        print(
            f"[bench] n={rec.task_count} {rec.profile}: {rec.mean_runtime_s:.3g}s mean",
            file=sys.stderr,
        )

    records = bench_mod.run_bench(config, progress if args.verbose else None)
    _write(args.out, bench_mod.to_csv(records))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reconsched", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def model_flags(p):
        p.add_argument("--tasks", help="tasks file")
        p.add_argument("--messages", help="separate messages file (tx,rx,size)")
        p.add_argument("--platform", help="platform file")
        p.add_argument("--mode-table", dest="mode_table", help="mode table file")

    p = sub.add_parser("schedule", help="build a schedule from scratch")
    model_flags(p)
    p.add_argument("--priorities", help="external temporal/spatial priorities")
    p.add_argument("--context", help="context events applied before scheduling")
    p.add_argument("--profile", choices=PROFILES, default="makespan")
    p.add_argument("--out", help="schedule output (default: stdout)")
    p.add_argument("--log-out", dest="log_out", help="write the recovery log here")
    p.add_argument("--metrics", help="write metrics JSON here")
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("recover", help="recover a schedule after context events")
    model_flags(p)
    p.add_argument("--schedule", help="prior schedule file")
    p.add_argument("--log", help="recovery log of the prior schedule")
    p.add_argument("--context", help="context events file")
    p.add_argument("--priorities", help="external temporal priorities")
    p.add_argument("--profile", choices=PROFILES, default="makespan")
    p.add_argument("--out", help="recovered schedule output (default: stdout)")
    p.add_argument("--log-out", dest="log_out", help="write the new recovery log here")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("validate", help="safety-check a schedule file")
    model_flags(p)
    p.add_argument("--schedule", help="schedule file")
    p.add_argument("--context", help="context events to apply to the models first")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("bench", help="scaling benchmark, CSV output")
    p.add_argument("--counts", default="5,15,30,50,100")
    p.add_argument("--reps", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=13)
    p.add_argument("--profile", action="append", choices=PROFILES)
    p.add_argument("--out", help="CSV output (default: stdout)")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ReconstructionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
