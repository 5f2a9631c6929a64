#!/usr/bin/env python3
"""Main entry point for Tailgate: DSS follow-up drive scenario generation and safety evaluation."""

import sys
import argparse
from pathlib import Path
from typing import List, Optional

from .simulation.pipeline import BatchGenerationError, generate_batch
from .simulation.safety import BatchEvaluationError, evaluate_batch, select_critical
from .simulation.scenario import A_MIN_DEFAULT, ConfigError, GenerationConfig
from .simulation.validation import run_validation
from .utils.config_io import read_config
from .utils.dataset_io import DatasetFormatError, dataset_format, read_dataset, write_dataset
from .utils.metrics import REPORT_FORMATS, emit_plot, generate_report, summarize
from .utils.telemetry import TelemetryLogger

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_INTERRUPTED = 130


# Line-buffered output when piped
sys.stdout.reconfigure(line_buffering=True) if hasattr(sys.stdout, 'reconfigure') else None
sys.stderr.reconfigure(line_buffering=True) if hasattr(sys.stderr, 'reconfigure') else None


class CommandError(Exception):
    """Ends a command with ``exit_code`` after printing ``message`` and ``tips``."""

    def __init__(self, message: str, exit_code: int = EXIT_USAGE, tips: Optional[List[str]] = None):
        super().__init__(message)
        self.exit_code = exit_code
        self.tips = tips or []


def _seed(value: str) -> int:
    seed = int(value, 0)
    if not 0 <= seed < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed must fit in 64 unsigned bits, got {value}")
    return seed


def _positive_int(value: str) -> int:
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return number


def _non_negative_int(value: str) -> int:
    number = int(value)
    if number < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return number


class _ArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with EXIT_USAGE; 2 stays the I/O error code."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog='tailgate',
        description='Tailgate - generate follow-up drive scenarios and assess them with the DSS safety metric',
    )
    sub = parser.add_subparsers(dest='command', metavar='COMMAND')
    sub.required = True

    gen = sub.add_parser('generate', help='Generate a dataset of scenarios')
    gen.add_argument('--config', type=str, default=None, help='Config file (default: built-in defaults)')
    gen.add_argument('--out', type=str, required=True, help='Output dataset (.csv or .json)')
    gen.add_argument('--seed', type=_seed, default=None, help='Override the config seed (64-bit unsigned)')
    gen.add_argument('--n-series', type=_positive_int, default=None, help='Override the number of scenarios')
    gen.add_argument('--parallel', action='store_true', help='Enable parallel generation')
    gen.add_argument('--workers', type=_positive_int, default=None,
                     help='Number of parallel workers (default: CPU count - 1)')
    gen.add_argument('-v', '--verbose', action='store_true', help='Verbose output')

    ev = sub.add_parser('evaluate', help='Annotate a dataset with DSS and criticality')
    ev.add_argument('--in', dest='input', type=str, required=True, help='Input dataset (.json keeps parameters)')
    ev.add_argument('--out', type=str, required=True, help='Output dataset (.csv or .json)')
    ev.add_argument('--a-min', type=float, default=None,
                    help=f'Deceleration magnitude for DSS (default: dataset config, else {A_MIN_DEFAULT})')
    ev.add_argument('--critical-only', action='store_true', help='Keep only safety-critical series')
    ev.add_argument('--parallel', action='store_true', help='Enable parallel evaluation')
    ev.add_argument('--workers', type=_positive_int, default=None, help='Number of parallel workers')
    ev.add_argument('-v', '--verbose', action='store_true', help='Verbose output')

    val = sub.add_parser('validate', help='Check the deterministic validation scenario')
    val.add_argument('-v', '--verbose', action='store_true', help='Verbose output')

    st = sub.add_parser('stats', help='Summary statistics of an evaluated dataset')
    st.add_argument('--in', dest='input', type=str, required=True, help='Evaluated dataset')
    st.add_argument('--format', type=str, default='text', choices=list(REPORT_FORMATS),
                    help='Report format (default: text)')
    st.add_argument('--out', type=str, default=None, help='Also save the report to this file')
    st.add_argument('-v', '--verbose', action='store_true', help='Verbose output')

    pl = sub.add_parser('plot', help='Two-panel SVG of one scenario')
    pl.add_argument('--in', dest='input', type=str, required=True, help='Dataset (evaluated for critical markers)')
    pl.add_argument('--scenario', type=_non_negative_int, required=True, help='Position of the series in the dataset')
    pl.add_argument('--out', type=str, required=True, help='Output .svg file')
    pl.add_argument('--vehicle-length', type=float, default=None,
                    help='Vehicle length (m) for datasets without one (CSV input)')
    pl.add_argument('-v', '--verbose', action='store_true', help='Verbose output')

    return parser


def _load_dataset(path_str: str):
    path = Path(path_str).expanduser()
    if not path.exists():
        raise CommandError(
            f"Input dataset does not exist: {path_str}",
            exit_code=EXIT_IO,
            tips=["Check the path; generate one with: tailgate generate --out data.json"],
        )
    return read_dataset(path)


def _output_path(path_str: str) -> Path:
    """Expanded --out path; an unsupported extension fails before any work is done."""
    try:
        dataset_format(path_str)
    except DatasetFormatError as e:
        raise CommandError(str(e), tips=["Use --out data.csv or --out data.json."]) from e
    return Path(path_str).expanduser()


def cmd_generate(args) -> int:
    if args.config:
        config_path = Path(args.config).expanduser()
        if not config_path.exists():
            raise CommandError(
                f"Config file does not exist: {args.config}",
                exit_code=EXIT_IO,
                tips=["Presets live in config/ (reference_defaults.cfg, validation.cfg)."],
            )
        cfg = read_config(config_path)
    else:
        cfg = GenerationConfig()
    cfg = cfg.with_overrides(seed=args.seed, n_series=args.n_series)

    out = _output_path(args.out)
    dataset = generate_batch(
        cfg,
        parallel=args.parallel,
        max_workers=args.workers,
        verbose=args.verbose,
        telemetry_dir=str(out.resolve().parent),
    )
    write_dataset(dataset, out)
    print(f"✓ Generated {len(dataset)} series (seed {cfg.seed}) -> {out}")
    flagged = sum(1 for s in dataset.series if s.diagnostics.any)
    if flagged:
        print(f"⚠️  {flagged} series flagged (negative velocity or initial overlap)")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    dataset = _load_dataset(args.input)
    if args.a_min is not None:
        a_min = args.a_min
    elif dataset.provenance.config is not None:
        a_min = dataset.provenance.config.a_min
    else:
        a_min = A_MIN_DEFAULT
    if not a_min > 0:
        raise CommandError(f"--a-min must be > 0, got {a_min}")

    out = _output_path(args.out)
    payload = {'input': str(args.input), 'series': len(dataset), 'a_min': a_min,
               'critical_only': args.critical_only}
    with TelemetryLogger.for_output(out).timed('evaluate', payload) as event:
        evaluated = evaluate_batch(dataset, a_min, parallel=args.parallel, max_workers=args.workers)
        n_critical = sum(1 for _, report in evaluated.annotations if report.is_critical)
        if args.critical_only:
            evaluated = select_critical(evaluated)
        write_dataset(evaluated, out)
        event['critical'] = n_critical
    print(f"✓ Evaluated {len(dataset)} series (a_min = {a_min} m/s²): {n_critical} safety-critical")
    print(f"✓ Saved {len(evaluated)} series -> {out}")
    return EXIT_OK


def cmd_validate(args) -> int:
    report = run_validation()
    print("Validation scenario: x0 = 65/0 m, v0 = 27.78/33.33 m/s, a0 = -8.829 m/s² (both), tR = 0.7 s")
    print()
    print(report.format_table())
    print()
    for check in report.prefix_checks:
        mark = '✓' if check.passed else '✗'
        print(f"{mark} t = {check.t:.1f} s: DSS = {check.computed:.4f} m (published {check.reference:.2f} ± {check.tolerance})")
    print(f"⚠️  Known discrepancy at t = {report.divergence.t:.1f} s: "
          f"DSS = {report.divergence.computed:.3f} m, published {report.divergence.reference:.2f} m")
    for note in report.notes:
        print(f"   💡 {note}")

    scan = report.reference_scan
    weak = report.weak_follower_report
    print(f"{'✓' if report.reference_scan_passed else '✗'} Published values: first critical "
          f"{scan.first_critical} s, {len(scan.critical_times)} critical steps")
    print(f"{'✓' if report.weak_follower_passed else '✗'} Weak-follower scenario: first critical "
          f"{weak.first_critical} s, {len(weak.critical_times)} critical steps")
    if args.verbose:
        print(f"\nValidation scenario critical: {report.report.is_critical} "
              f"(minimum DSS {report.dss.minimum:.3f} m)")

    if report.passed:
        print("\n✓ Validation passed")
        return EXIT_OK
    print("\n✗ Validation failed")
    return EXIT_USAGE


def cmd_stats(args) -> int:
    dataset = _load_dataset(args.input)
    if not dataset.is_evaluated:
        raise CommandError(
            "Dataset has no safety annotations",
            tips=[f"Evaluate it first: tailgate evaluate --in {args.input} --out evaluated.json"],
        )
    stats = summarize(dataset)
    print(f"Dataset: {stats.n_series} series")
    content = generate_report(stats, output_path=Path(args.out) if args.out else None, format=args.format)
    print(content, end='')
    if args.out:
        print(f"✓ Report saved to: {args.out}")
    return EXIT_OK


def cmd_plot(args) -> int:
    dataset = _load_dataset(args.input)
    if args.scenario >= len(dataset):
        raise CommandError(
            f"Scenario index {args.scenario} out of range (dataset has {len(dataset)} series)",
            tips=[f"Use an index between 0 and {max(len(dataset) - 1, 0)}."],
        )
    out = Path(args.out).expanduser()
    with TelemetryLogger.for_output(out).timed('plot', {'input': str(args.input), 'scenario': args.scenario}):
        emit_plot(dataset, args.scenario, out, vehicle_length=args.vehicle_length)
    print(f"✓ Plot saved to: {out}")
    return EXIT_OK


COMMANDS = {
    'generate': cmd_generate,
    'evaluate': cmd_evaluate,
    'validate': cmd_validate,
    'stats': cmd_stats,
    'plot': cmd_plot,
}


def _report_error(message: str, tips: List[str]) -> None:
    # Errors go to both streams
    for stream in (sys.stdout, sys.stderr):
        print(f"\n✗ Error: {message}", file=stream)
        for tip in tips:
            print(f"   💡 Tip: {tip}", file=stream)
        stream.flush()


def run(argv: Optional[List[str]] = None) -> int:
    """Parse ``argv`` and run one command; returns the exit code."""
    args = build_parser().parse_args(argv)
    verbose = getattr(args, 'verbose', False)
    try:
        return COMMANDS[args.command](args)
    except CommandError as e:
        _report_error(str(e), e.tips)
        return e.exit_code
    except ConfigError as e:
        _report_error(f"Invalid configuration: {e}", ["Keys and defaults are listed in config/reference_defaults.cfg."])
        return EXIT_USAGE
    except DatasetFormatError as e:
        _report_error(f"Malformed dataset: {e}", ["Datasets must be written by 'tailgate generate' or 'tailgate evaluate'."])
        return EXIT_IO
    except OSError as e:
        _report_error(f"I/O error: {e}", ["Check the path and that you have read/write permission."])
        return EXIT_IO
    except (BatchGenerationError, BatchEvaluationError) as e:
        _report_error(str(e), ["Run with --verbose for progress details."])
        return EXIT_USAGE
    except (ValueError, IndexError) as e:
        _report_error(str(e), [])
        return EXIT_USAGE
    except KeyboardInterrupt:
        print("\n\n⚠️  Interrupted by user")
        return EXIT_INTERRUPTED
    except Exception as e:
        error_type = type(e).__name__
        _report_error(f"Unexpected error ({error_type}): {e}", [
            "Run with --verbose flag to see the full stack trace.",
            "Check that all dependencies are installed: pip install -r requirements.txt",
        ])
        if verbose:
            import traceback
            print("\nFull traceback:")
            traceback.print_exc()
        return EXIT_USAGE


def main(argv: Optional[List[str]] = None):
    """Main CLI entry point."""
    sys.exit(run(argv))


if __name__ == '__main__':
    main()
