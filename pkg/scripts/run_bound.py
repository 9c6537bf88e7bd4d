"""Bound-ratio report for the reference configuration (or ``--config``)."""

import sys

from tfop.cli import main

if __name__ == "__main__":
    sys.exit(main(["bound", *sys.argv[1:]]))
