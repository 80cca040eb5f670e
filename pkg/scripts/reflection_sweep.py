"""Reflected-pair probability versus envelope-to-input width ratio.

Sweeps the matched-filter curve for three total rates; the peak sits at
width ratio one and grows toward the saturated quarter as the rate
dominates the input bandwidth.
"""

import argparse
import sys

from quadwg.cli import run


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="data")
    args = parser.parse_args()
    return run(["sweep-reflection", "--outdir", args.outdir])


if __name__ == "__main__":
    sys.exit(main())
