"""Command-line entry point: ``biphoton {run,figure,check,export}``.

Exit codes: 0 success, 1 configuration error, 2 flagged or non-finite
record under ``--strict`` (or a failed ``check``), 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .acceptance import run_all
from .config import FORMATS, PRESETS, ConfigError, load_config, preset
from .export import ExportError, RecordWriter, read_records, write_plotdata, write_records
from .sweep import is_finite_record, iter_sweep

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3


def _common(p: argparse.ArgumentParser):
    p.add_argument("--out", help="output file (csv/json) or directory (plotdata); stdout if omitted")
    p.add_argument("--format", choices=FORMATS, help="output format (default: config value or csv)")
    p.add_argument("--threads", type=int, default=1, help="worker threads for sweep points")
    p.add_argument("--grid-points", type=int, help="override the idler grid size and disable the ladder")
    p.add_argument("--strict", action="store_true", help="exit 2 if any record is flagged or non-finite")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="biphoton", description="Biphoton spectral simulation and cavity-compression sweeps.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a sweep described by a TOML config")
    run.add_argument("--config", required=True)
    _common(run)

    fig = sub.add_parser("figure", help="run a built-in figure preset")
    fig.add_argument("name", choices=sorted(PRESETS))
    _common(fig)

    chk = sub.add_parser("check", help="run the acceptance criteria")
    chk.add_argument("--only", type=int, nargs="+", metavar="N", help="criterion numbers to run")

    exp = sub.add_parser("export", help="convert a saved CSV/JSON record file")
    exp.add_argument("--in", dest="inp", required=True)
    exp.add_argument("--out", required=True)
    exp.add_argument("--format", choices=FORMATS, required=True)
    return parser


def _bad(rec) -> bool:
    return bool(rec.flag) or not is_finite_record(rec)


def _sweep(cfg, args) -> int:
    if args.grid_points is not None:
        cfg = cfg.with_grid_points(args.grid_points)
    if args.threads < 1:
        raise ConfigError("--threads must be >= 1")
    fmt = args.format or cfg.output_format
    out = args.out or cfg.output_path
    records = iter_sweep(cfg, args.threads)
    bad = 0
    if fmt == "plotdata":
        if out is None:
            raise ConfigError("plotdata output needs --out DIR")
        recs = list(records)
        bad = sum(map(_bad, recs))
        for path in write_plotdata(recs, out):
            print(path)
    else:
        with RecordWriter(out, fmt) as w:
            for rec in records:
                w.write(rec)
                bad += _bad(rec)
        if out is None:
            sys.stdout.write(w.text)
    if bad:
        print(f"{bad} record(s) flagged", file=sys.stderr)
        if args.strict:
            return EXIT_NUMERIC
    return EXIT_OK


def _check(args) -> int:
    failed = 0
    for crit in run_all(args.only):
        print(crit.line(), flush=True)
        failed += not crit.passed
    return EXIT_NUMERIC if failed else EXIT_OK


def _export(args) -> int:
    recs = read_records(args.inp)
    write_records(recs, args.out, args.format)
    return EXIT_OK


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        # argparse uses 2 for usage errors, which is reserved for numerical flags here
        return EXIT_CONFIG if e.code == 2 else e.code
    try:
        if args.command == "run":
            cfg = load_config(args.config)
            return _sweep(cfg, args)
        if args.command == "figure":
            return _sweep(preset(args.name), args)
        if args.command == "check":
            return _check(args)
        return _export(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (ExportError, OSError) as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        # malformed input record files
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO if args.command == "export" else EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
