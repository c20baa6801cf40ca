"""Command-line application: argument parsing, dispatch and exit codes."""
import argparse
import json
import logging
import sys
from typing import List, Optional, TextIO

from sqlalchemy.exc import SQLAlchemyError

from config import APP_NAME, APP_VERSION, DUALITY_GAP_TOL, LOG_BASE
from core import units
from core.exceptions import CapExceededError, CertificationError, ParseError, ToolkitError
from core.hypothesis_testing import Tolerances, configure_default_solver
from database.db import ResultArchive
from .commands import CommandOutput, setup_handlers
from .files import write_csv

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_PARSE = 2
EXIT_CERTIFICATION = 3
EXIT_CAP = 4


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--nats", action="store_true", help="report natural-log units instead of bits")
    common.add_argument("--out", default=None, help="write CSV here instead of stdout")
    common.add_argument("--tol-gap", type=float, default=DUALITY_GAP_TOL, help="duality gap tolerance")
    common.add_argument("--log-level", default=None, choices=("DEBUG", "INFO", "WARNING", "ERROR"))
    common.add_argument("--archive", action="store_true", help="store the run in the results archive")
    common.add_argument("--archive-url", default=None, help="archive database URL (defaults to config)")
    return common


class ToolkitApp:
    """Parses a command line, runs the handler and emits its CSV."""

    def __init__(self) -> None:
        self.parser = argparse.ArgumentParser(
            prog=APP_NAME,
            description="Hypothesis-testing bounds for classical-quantum channel coding.",
        )
        self.parser.add_argument("--version", action="version", version=f"{APP_NAME} {APP_VERSION}")
        subparsers = self.parser.add_subparsers(dest="command", required=True)
        setup_handlers(subparsers, parents=[_common_flags()])

    def _configure(self, args: argparse.Namespace) -> None:
        if args.log_level:
            logging.getLogger().setLevel(args.log_level)
        units.set_log_base("e" if args.nats else (LOG_BASE if LOG_BASE in ("2", "e") else "2"))
        configure_default_solver(Tolerances(duality_gap_tol=args.tol_gap))

    def _emit(self, output: CommandOutput, args: argparse.Namespace, stdout: TextIO) -> None:
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                write_csv(output.rows, output.columns, fh)
            logger.info(f"wrote {len(output.rows)} row(s) to {args.out}")
        else:
            write_csv(output.rows, output.columns, stdout)

    def _archive(self, output: CommandOutput, args: argparse.Namespace) -> None:
        skip = {"handler", "archive", "archive_url", "log_level", "out"}
        arguments = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
        archive = ResultArchive(args.archive_url)
        try:
            archive.init_db()
            archive.record_run(
                args.command,
                arguments,
                output.certificates,
                seed=output.seed,
                log_base=units.unit_name(),
            )
        finally:
            archive.dispose()

    def run(self, argv: Optional[List[str]] = None, stdout: Optional[TextIO] = None) -> int:
        """Run one command; returns the process exit code."""
        stdout = stdout or sys.stdout
        args = self.parser.parse_args(argv)
        self._configure(args)
        logger.debug(f"running {args.command} with {json.dumps(vars(args), default=str, sort_keys=True)}")

        try:
            output = args.handler(args)
        except ParseError as e:
            logger.error(f"parse error: {e}")
            return EXIT_PARSE
        except CertificationError as e:
            logger.error(f"certification failed: {e}")
            return EXIT_CERTIFICATION
        except CapExceededError as e:
            logger.error(f"cap exceeded: {e}")
            return EXIT_CAP
        except ToolkitError as e:
            logger.error(f"{type(e).__name__}: {e}")
            return EXIT_FAILURE

        self._emit(output, args, stdout)
        if args.archive:
            try:
                self._archive(output, args)
            except SQLAlchemyError as e:
                logger.error(f"archiving failed: {e}")
                return EXIT_FAILURE
        return output.exit_code


def run(argv: Optional[List[str]] = None, stdout: Optional[TextIO] = None) -> int:
    return ToolkitApp().run(argv, stdout)
