#!/usr/bin/env python3
"""Export a paired accumulator/target image dataset for the trainer.

Each trial writes <split>/<snr>/<id>.cotans.f32 (input) and .bei.f32
(target), both raw little-endian float32 of shape 101x360, plus a
manifest with per-pair ground truth.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from cotans.cli import main as cli_main


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="dataset")
    ap.add_argument("--train", type=int, default=1400)
    ap.add_argument("--val", type=int, default=100)
    ap.add_argument("--test", type=int, default=167)
    ap.add_argument("--snrs", default="13,17,21")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    return cli_main([
        "dataset",
        "--out", args.out,
        "--train", str(args.train),
        "--val", str(args.val),
        "--test", str(args.test),
        "--snrs", args.snrs,
        "--seed", str(args.seed),
    ])


if __name__ == "__main__":
    sys.exit(main())
