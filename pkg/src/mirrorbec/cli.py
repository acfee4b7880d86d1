"""Command-line entry point: ``mirrorbec <subcommand> [options]``.

Exit codes: 0 success, 1 validation error, 2 numerical failure, 3 partial
sweep failure.
"""
import argparse
import sys
import time
from pathlib import Path

from . import commands
from .config import list_presets, load_config, preset_path
from .errors import (
    ConfigError,
    DepletionError,
    EmptyBandError,
    NumericalError,
    SingularityError,
)
from .outputs import write_manifest

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_PARTIAL = 0, 1, 2, 3


def build_parser():
    parser = argparse.ArgumentParser(prog="mirrorbec", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=Path, help="YAML run configuration")
        p.add_argument("--preset", help="named preset used as the base configuration")
        p.add_argument("--out", type=Path, help="output directory (overrides output.directory)")
        p.add_argument("--format", choices=("csv", "svg", "both"),
                       help="csv always; svg adds plots rendered from the CSVs")
        p.add_argument("--workers", type=int, help="concurrent sweep points")

    for name, text in [
        ("fringe", "mean photon numbers versus injected phase"),
        ("reflectivity", "Bragg-mirror reflectivity spectrum and bandwidth"),
        ("carl", "CARL-BEC reflected-intensity evolution"),
        ("scenario", "heralded recoil correlation table and momentum profiles"),
        ("sweep", "grid of runs over configured parameter axes"),
    ]:
        common(sub.add_parser(name, help=text))
    presets = sub.add_parser("presets", help="list presets, or print one with --preset")
    presets.add_argument("--preset", help="preset to print")
    return parser


def _print_summary(summary):
    for key, value in summary.items():
        print(f"{key}: {value}")


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "presets":
            if args.preset:
                sys.stdout.write(preset_path(args.preset).read_text())
            else:
                for name, path in list_presets().items():
                    print(f"{name}\t{path}")
            return EXIT_OK

        cfg = load_config(args.config, args.preset)
        out_dir = Path(args.out or cfg["output"]["directory"])
        fmt = args.format or cfg["output"]["formats"]
        workers = args.workers if args.workers is not None else cfg["workers"]
        if workers < 1:
            raise ConfigError("must be >= 1", "workers")
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigError(f"cannot create {out_dir}: {exc.strerror}", "output.directory") from None

        start = time.perf_counter()
        if args.command == "sweep":
            summary, results = commands.run_sweep(cfg, out_dir, fmt, workers)
            timings = {"total": time.perf_counter() - start,
                       "points": [r["seconds"] for r in results]}
            write_manifest(out_dir, "sweep", cfg, timings,
                           {"points": [{"status": r["status"], "error": r["error"]} for r in results]})
            _print_summary(summary)
            return EXIT_PARTIAL if summary["failed"] else EXIT_OK

        summary = commands.RUNNERS[args.command](cfg, out_dir, fmt)
        write_manifest(out_dir, args.command, cfg, {"total": time.perf_counter() - start},
                       {"summary": summary})
        _print_summary(summary)
        return EXIT_OK
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NumericalError, EmptyBandError, DepletionError, SingularityError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
