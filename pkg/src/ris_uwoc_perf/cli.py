"""Command line front end.

Run ``ris-uwoc [-h | --help]`` for the accepted arguments. Default arguments are read
from the ``[defaults]`` section of ``config.ini`` and logging defaults from its
``[Logging]`` section (``setup.cfg`` is read first, so ``config.ini`` wins). Arguments can
also come from a file with ``ris-uwoc @args.txt``.

Exit codes: 0 on success, 1 when some sweep points failed numerically, 2 when a
sweep specification is invalid.
"""
import argparse
import configparser
import logging
import sys

from . import sweep, uwoc_link
from .exceptions import SpecValidationError
from .logger import configure_logger

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED_POINTS = 1
EXIT_INVALID_SPEC = 2

CONFIG_FILES = ["setup.cfg", "config.ini"]
LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


def read_config(files=None) -> configparser.ConfigParser:
    config = configparser.ConfigParser()
    config.read(files or CONFIG_FILES)
    return config


def _add_logging_arguments(parser, config) -> None:
    parser.add_argument(
        "-l",
        "--level",
        type=str.upper,
        choices=LOG_LEVELS,
        default=config.get("Logging", "log_level", fallback="INFO"),
        help="Logging level",
    )
    parser.add_argument(
        "-lf",
        "--log_file",
        metavar="",
        type=str,
        default=config.get("Logging", "log_path", fallback=None) or None,
        help="Path to the log file",
    )
    parser.add_argument(
        "-q",
        "--quiet",
        action="store_true",
        default=config.getboolean("Logging", "console_log_not_enabled", fallback=False),
        help="Do not display console logs or progress bars",
    )


def build_parser(config=None) -> argparse.ArgumentParser:
    """Argument parser with ``sweep`` and ``tables`` subcommands."""
    config = config if config is not None else read_config()
    defaults = dict(config["defaults"]) if config.has_section("defaults") else {}

    parser = argparse.ArgumentParser(
        prog="ris-uwoc",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        description="Outage, bit-error-rate and capacity sweeps of the RIS-assisted "
        "RF-underwater optical relay link.",
        epilog="Default arguments are stored in config.ini file.",
        fromfile_prefix_chars="@",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    run = subparsers.add_parser(
        "sweep",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        help="Evaluate the sweeps of a spec file",
        fromfile_prefix_chars="@",
    )
    run.add_argument("spec_file", type=str, help="INI file with [sweep.<name>] sections")
    run.add_argument("-o", "--out", metavar="", type=str, help="Output path (stdout if omitted)")
    run.add_argument(
        "-f", "--format", type=str, choices=["csv", "json"], help="Output format"
    )
    run.add_argument(
        "-s",
        "--sweeps",
        nargs="+",
        metavar="NAME",
        help="Only run these sweeps (section names without the 'sweep.' prefix)",
    )
    run.add_argument(
        "-m",
        "--methods",
        nargs="+",
        choices=[m.value for m in sweep.Method],
        help="Override the methods of every sweep",
    )
    run.add_argument("--seed", type=int, help="Override the Monte-Carlo seed")
    run.add_argument("--samples", type=int, help="Override the Monte-Carlo sample count")
    run.add_argument("-j", "--jobs", metavar="", type=int, help="Workers over sweep points")
    run.add_argument("--track", action="store_true", help="Log the sweeps to MLflow")
    run.add_argument("--experiment", metavar="", type=str, help="MLflow experiment name")
    run.add_argument("--tracking_uri", metavar="", type=str, help="MLflow tracking URI")
    _add_logging_arguments(run, config)
    run.set_defaults(**{k: v for k, v in defaults.items() if k in ("format", "jobs", "experiment")})
    run.set_defaults(handler=run_command)

    tables = subparsers.add_parser(
        "tables",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        help="Write the embedded turbulence parameter rows as CSV",
    )
    tables.add_argument("-o", "--out", metavar="", type=str, help="Output path (stdout if omitted)")
    _add_logging_arguments(tables, config)
    tables.set_defaults(handler=tables_command)
    return parser


def run_command(args) -> int:
    try:
        specs = sweep.load_specs(args.spec_file, args.sweeps)
        specs = [
            spec.override(methods=args.methods, seed=args.seed, samples=args.samples)
            for spec in specs
        ]
    except SpecValidationError as exc:
        logger.error(f"invalid sweep specification: {exc}")
        return EXIT_INVALID_SPEC

    result = sweep.run_sweep(specs, jobs=args.jobs or 1, quiet=args.quiet)
    text = result.write(args.out, fmt=args.format or "csv")
    if text is not None:
        sys.stdout.write(text)

    if args.track:
        from .tracking import track_sweeps

        track_sweeps(result, specs, args.experiment or "ris-uwoc", args.tracking_uri)

    if not result.ok:
        logger.warning(f"{result.failures} point(s) failed, see the error column")
        return EXIT_FAILED_POINTS
    return EXIT_OK


def tables_command(args) -> int:
    frame = uwoc_link.table_records()
    if args.out:
        frame.to_csv(args.out, index=False)
        logger.info(f"{len(frame)} rows written to {args.out}")
    else:
        sys.stdout.write(frame.to_csv(index=False))
    return EXIT_OK


def main(argv=None) -> int:
    config = read_config()
    args = build_parser(config).parse_args(argv)

    configure_logger(log_file=args.log_file, console=args.quiet, log_level_var=args.level)
    for arg, value in vars(args).items():
        if arg != "handler":
            logger.debug(f"{arg.upper()} - {value}")

    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())
