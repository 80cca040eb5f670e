"""Controlled-phase gate infidelity versus rate-to-bandwidth ratio.

Writes one two-column CSV per pulse shape (Gaussian, Lorentzian) with the
worst-case infidelity on a log scale, plus a JSON report at the reference
ratio.
"""

import argparse
import sys

from quadwg.cli import run


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="data")
    args = parser.parse_args()
    return run(["gate", "--outdir", args.outdir])


if __name__ == "__main__":
    sys.exit(main())
