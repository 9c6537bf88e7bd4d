"""Schatten norms over a family of increasingly localized amplitudes."""

import sys

from tfop.cli import main

if __name__ == "__main__":
    sys.exit(main(["schatten", *sys.argv[1:]]))
