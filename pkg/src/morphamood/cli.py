"""Command-line entry point.

Subcommands: interp, validate-map, select-stimuli, serve, replay,
durations, icc. All reports are deterministic tab-delimited text (JSON for
select-stimuli); the optional ``--figures DIR`` flag on the report commands
additionally renders PNG charts next to the text output.

Exit codes: 0 success, 2 usage, 3 unreadable input/output, 4 invalid map
configuration, 5 domain error in a query, 6 selection failure, 7 malformed
or inconsistent event log, 8 statistics error.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .analysis import (
    AnalysisError,
    RatingsFormatError,
    icc_a_k,
    icc_by_stimulus,
    pivot,
    read_ratings_csv,
)
from .expression import Cursor, MapConfigError, load_default_map, load_map_file
from .reports import (
    durations_report,
    icc_report,
    interp_report,
    map_summary,
    replay_report,
    selection_report,
)
from .service import MoodService
from .session import (
    ClockError,
    EventValidationError,
    compute_durations,
    read_event_log,
    replay,
)
from .stimuli import (
    DEFAULT_CATEGORY_ORDER,
    SelectionError,
    read_corpus_csv,
    select_protocol,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_MAP = 4
EXIT_DOMAIN = 5
EXIT_SELECTION = 6
EXIT_LOG = 7
EXIT_ANALYSIS = 8

MAP_ENV_VAR = "MORPHAMOOD_MAP"


def _fail(message: str) -> None:
    print(f"morphamood: error: {message}", file=sys.stderr)


def _load_map(map_arg: str | None):
    path = map_arg or os.environ.get(MAP_ENV_VAR)
    if path:
        return load_map_file(path)
    return load_default_map()


def _figures_dir(args) -> Path | None:
    if not getattr(args, "figures", None):
        return None
    directory = Path(args.figures)
    directory.mkdir(parents=True, exist_ok=True)
    return directory


def cmd_interp(args) -> int:
    try:
        pmap = _load_map(args.map)
    except OSError as exc:
        _fail(str(exc))
        return EXIT_IO
    except MapConfigError as exc:
        _fail(str(exc))
        return EXIT_MAP
    try:
        cursor = Cursor(args.r, args.phi)
    except ValueError as exc:
        _fail(str(exc))
        return EXIT_DOMAIN
    print(interp_report(pmap, cursor), end="")
    return EXIT_OK


def cmd_validate_map(args) -> int:
    try:
        pmap = load_map_file(args.path)
    except OSError as exc:
        _fail(str(exc))
        return EXIT_IO
    except MapConfigError as exc:
        _fail(str(exc))
        return EXIT_MAP
    print(map_summary(pmap), end="")
    return EXIT_OK


def cmd_select_stimuli(args) -> int:
    order = tuple(part.strip() for part in args.precedence.split(",") if part.strip())
    try:
        corpus = read_corpus_csv(args.corpus)
    except OSError as exc:
        _fail(str(exc))
        return EXIT_IO
    except SelectionError as exc:
        _fail(str(exc))
        return EXIT_SELECTION
    try:
        result = select_protocol(corpus, order)
    except SelectionError as exc:
        _fail(str(exc))
        return EXIT_SELECTION
    print(selection_report(result), end="")
    figures = _figures_dir(args)
    if figures is not None:
        from .figures import selection_figure

        selection_figure(corpus, result, str(figures / "selection.png"))
    return EXIT_OK


def cmd_serve(args) -> int:
    try:
        pmap = _load_map(args.map)
    except OSError as exc:
        _fail(str(exc))
        return EXIT_IO
    except MapConfigError as exc:
        _fail(str(exc))
        return EXIT_MAP
    try:
        service = MoodService(pmap, args.log_dir, host=args.host, port=args.port)
    except OSError as exc:
        _fail(str(exc))
        return EXIT_IO
    print(f"listening on {service.host}:{service.port}", flush=True)
    try:
        service.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        service.shutdown()
    return EXIT_OK


class _LogFailure(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _read_log(path: str):
    try:
        return read_event_log(path)
    except OSError as exc:
        raise _LogFailure(EXIT_IO, str(exc)) from None
    except (EventValidationError, ClockError) as exc:
        raise _LogFailure(EXIT_LOG, str(exc)) from None


def cmd_replay(args) -> int:
    try:
        pmap = _load_map(args.map)
    except OSError as exc:
        _fail(str(exc))
        return EXIT_IO
    except MapConfigError as exc:
        _fail(str(exc))
        return EXIT_MAP
    try:
        events = _read_log(args.log)
    except _LogFailure as exc:
        _fail(str(exc))
        return exc.code
    try:
        result = replay(events, pmap)
        durations = compute_durations(events)
    except ClockError as exc:
        _fail(str(exc))
        return EXIT_LOG
    print(replay_report(result, durations), end="")
    figures = _figures_dir(args)
    if figures is not None:
        from .figures import durations_figure

        durations_figure(durations, str(figures / "durations.png"))
    return EXIT_OK


def cmd_durations(args) -> int:
    try:
        events = _read_log(args.log)
    except _LogFailure as exc:
        _fail(str(exc))
        return exc.code
    try:
        report = compute_durations(events)
    except ClockError as exc:
        _fail(str(exc))
        return EXIT_LOG
    print(durations_report(report), end="")
    figures = _figures_dir(args)
    if figures is not None:
        from .figures import durations_figure

        durations_figure(report, str(figures / "durations.png"))
    return EXIT_OK


def cmd_icc(args) -> int:
    try:
        records = read_ratings_csv(args.ratings)
    except OSError as exc:
        _fail(str(exc))
        return EXIT_IO
    except RatingsFormatError as exc:
        _fail(str(exc))
        return EXIT_ANALYSIS
    grouped = records[0].stimulus_id is not None
    try:
        if grouped:
            summary = icc_by_stimulus(records, args.alpha)
            report = icc_report(records, summary, None, args.alpha)
        else:
            _, _, matrix = pivot(records)
            single = icc_a_k(matrix, args.alpha)
            report = icc_report(records, None, single, args.alpha)
    except (AnalysisError, RatingsFormatError) as exc:
        _fail(str(exc))
        return EXIT_ANALYSIS
    print(report, end="")
    figures = _figures_dir(args)
    if figures is not None:
        from .analysis import mean_difference_matrix, per_method_means, scores_by_method
        from .figures import mean_difference_figure, method_means_figure

        by_method = scores_by_method(records)
        method_means_figure(per_method_means(by_method), str(figures / "method_means.png"))
        if len(by_method) >= 2:
            methods, matrix = mean_difference_matrix(by_method)
            mean_difference_figure(methods, matrix, str(figures / "mean_differences.png"))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="morphamood",
        description="Continuous pictographic affect-scale toolkit: polar-map "
        "interpolation, stimulus selection, rating sessions, and agreement "
        "statistics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("interp", help="interpolate the expression at a cursor")
    p.add_argument("--r", type=float, required=True, help="radius in [0, 1]")
    p.add_argument("--phi", type=float, required=True, help="angle in degrees")
    p.add_argument("--map", help=f"map config path (default: ${MAP_ENV_VAR} or built-in)")
    p.set_defaults(func=cmd_interp)

    p = sub.add_parser("validate-map", help="check a map configuration file")
    p.add_argument("path", help="JSON map configuration")
    p.set_defaults(func=cmd_validate_map)

    p = sub.add_parser("select-stimuli", help="pick the 16-clip stimulus subset")
    p.add_argument("corpus", help="CSV with header id,valence,arousal,usable")
    p.add_argument(
        "--precedence",
        default=",".join(DEFAULT_CATEGORY_ORDER),
        help="category precedence for conflict resolution "
        f"(default: {','.join(DEFAULT_CATEGORY_ORDER)})",
    )
    p.add_argument("--figures", help="directory for PNG charts")
    p.set_defaults(func=cmd_select_stimuli)

    p = sub.add_parser("serve", help="run the local rating-session service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=7757)
    p.add_argument("--log-dir", required=True, help="directory for session event logs")
    p.add_argument("--map", help=f"map config path (default: ${MAP_ENV_VAR} or built-in)")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("replay", help="recompute ratings and durations from a log")
    p.add_argument("log", help="JSONL event log")
    p.add_argument("--map", help=f"map config path (default: ${MAP_ENV_VAR} or built-in)")
    p.add_argument("--figures", help="directory for PNG charts")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("durations", help="rating-duration statistics from a log")
    p.add_argument("log", help="JSONL event log")
    p.add_argument("--figures", help="directory for PNG charts")
    p.set_defaults(func=cmd_durations)

    p = sub.add_parser("icc", help="agreement statistics from a ratings table")
    p.add_argument("ratings", help="CSV with header target_id,method,score "
                   "(optionally prefixed by stimulus_id)")
    p.add_argument("--alpha", type=float, default=0.05,
                   help="significance level for the confidence interval")
    p.add_argument("--figures", help="directory for PNG charts")
    p.set_defaults(func=cmd_icc)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        if code in (0, None):
            return EXIT_OK
        return EXIT_USAGE
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
