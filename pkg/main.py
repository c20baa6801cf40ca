#!/usr/bin/env python3
"""dhtoolkit - Main Application Entry Point."""

import sys
import logging
from pathlib import Path

# Add project root to sys.path
sys.path.insert(0, str(Path(__file__).parent))

from config import DEBUG, LOG_LEVEL
from cli.app import run


def configure_logging(debug: bool = False, level: str = "INFO") -> None:
    """Set up logging configuration. Logs go to stderr so CSV on stdout stays clean."""
    logging.basicConfig(
        level=logging.DEBUG if debug else getattr(logging, level, logging.INFO),
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
        stream=sys.stderr,
    )


def main() -> None:
    """Main entry point for the dhtoolkit command line."""
    configure_logging(debug=DEBUG, level=LOG_LEVEL)
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
