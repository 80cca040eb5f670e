"""Joint two-photon emission spectra for narrow and wide envelopes.

Writes one CSV/JSON pair per combination of envelope kind (Gaussian,
Lorentzian) and envelope-FWHM-to-linewidth ratio (0.2 and 5), showing the
switch from positively correlated to anticorrelated photon pairs.
"""

import argparse
import math
import sys

from quadwg.cli import run

TOTAL_RATE = 0.004
RATIOS = {"narrow": 0.2, "wide": 5.0}


def width_parameter(kind: str, fwhm_over_rate: float) -> float:
    fwhm = fwhm_over_rate * TOTAL_RATE
    if kind == "gaussian":
        return fwhm / (2.0 * math.sqrt(2.0 * math.log(2.0)))
    return fwhm


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="data")
    args = parser.parse_args()
    for kind in ("gaussian", "lorentzian"):
        for label, ratio in RATIOS.items():
            code = run([
                "emit", "--outdir", args.outdir,
                "--set", f"total_rate={TOTAL_RATE}",
                "--set", f"envelope={kind}",
                "--set", f"envelope_width={width_parameter(kind, ratio)!r}",
                "--set", f"output_stem=emission_{kind}_{label}",
            ])
            if code != 0:
                return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
