"""Filtered-pair entanglement entropy over width and detuning ratios.

Writes the entropy surface against envelope-width-to-rate and
filter-detuning-to-rate ratios, plus a summary two-qubit state in the
narrow-envelope limit with its Bell-state fidelities.
"""

import argparse
import sys

from quadwg.cli import run


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="data")
    args = parser.parse_args()
    return run(["entangle", "--outdir", args.outdir])


if __name__ == "__main__":
    sys.exit(main())
