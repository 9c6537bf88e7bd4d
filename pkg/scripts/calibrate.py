"""Re-measure the committed calibration constants.

Prints the current values next to the committed ones. Nothing is written;
updating ``tfop/calibration.py`` is a deliberate manual step.
"""

import argparse
import logging

from tfop import calibration
from tfop.checks import symbol_kernel_ratios
from tfop.harness import bundled_config, run_bound_experiment

LOGGER = logging.getLogger(__name__)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--members", type=int, default=10, help="size of the symbol family")
    args = parser.parse_args()

    rep = run_bound_experiment(bundled_config("reference_bound"))
    drift = abs(rep.ratio / calibration.BOUND_RATIO_REFERENCE - 1.0)
    print(f"bound ratio      measured {rep.ratio:.17g}  committed {calibration.BOUND_RATIO_REFERENCE:.17g}  drift {drift:.2e}")

    r = symbol_kernel_ratios(args.members)
    mean = float(r.mean())
    drift = abs(mean / calibration.SYMBOL_KERNEL_CONSTANT - 1.0)
    print(f"symbol constant  measured {mean:.17g}  committed {calibration.SYMBOL_KERNEL_CONSTANT:.17g}  drift {drift:.2e}")
    print(f"symbol spread    {float(r.max() / r.min() - 1.0):.2e} over {args.members} members")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
