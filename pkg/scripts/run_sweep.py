#!/usr/bin/env python3
"""Range-RMSE vs SNR sweep for the classical decoder and the LS baseline.

Writes a CSV (and optionally a PNG) comparing methods over the default
13..21 dB range.  Equivalent to `cotans sweep` with a couple of
conveniences baked in.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from cotans.cli import main as cli_main


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="sweep.csv")
    ap.add_argument("--plot", default="sweep.png")
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--snrs", default="13,15,17,19,21")
    ap.add_argument("--methods", default="cotans-classical,ls")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    return cli_main([
        "sweep",
        "--methods", args.methods,
        "--snrs", args.snrs,
        "--trials", str(args.trials),
        "--seed", str(args.seed),
        "--out", args.out,
        "--plot", args.plot,
    ])


if __name__ == "__main__":
    sys.exit(main())
