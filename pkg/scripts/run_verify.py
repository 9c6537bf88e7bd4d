"""Run the identity verification suite and write reports under ``results/verify``."""

import sys

from tfop.cli import main

if __name__ == "__main__":
    sys.exit(main(["verify", *sys.argv[1:]]))
