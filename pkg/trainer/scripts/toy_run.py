#!/usr/bin/env python3
"""Toy-scale end-to-end run: dataset export, training, prediction, decoding.

Exports ~5,000 image pairs across three SNRs with the simulator CLI,
trains the toy U-Net, predicts heatmaps for 500 held-out 21 dB trials,
and decodes both the predictions and the raw accumulators (classical
baseline) with the simulator's `decode` command.  Writes loss_curve.csv,
checkpoint.pt, and metrics.txt under --out-dir.
"""

import argparse
import re
import subprocess
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from segnet_trainer.cli import main as trainer_main


def sh(cmd: list[str]) -> str:
    print("+", " ".join(cmd), flush=True)
    proc = subprocess.run(cmd, capture_output=True, text=True)
    sys.stdout.write(proc.stdout)
    if proc.returncode != 0:
        sys.stderr.write(proc.stderr)
        raise SystemExit(f"command failed: {cmd[0]}")
    return proc.stdout


def decode_metrics(stdout: str) -> tuple[float, float]:
    m = re.search(r"count_accuracy=([\d.]+) +rho_rmse_m=([\d.]+|nan)", stdout)
    if not m:
        raise SystemExit("could not parse decode output")
    return float(m.group(1)), float(m.group(2))


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--work-dir", default="/tmp/toy_run",
                    help="scratch space for datasets and predictions")
    ap.add_argument("--out-dir", default="runs/toy")
    ap.add_argument("--train", type=int, default=1566, help="pairs per SNR")
    ap.add_argument("--val", type=int, default=100, help="pairs per SNR")
    ap.add_argument("--test", type=int, default=500, help="held-out 21 dB trials")
    ap.add_argument("--epochs", type=int, default=2)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    work = Path(args.work_dir)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    data = work / "data"
    held = work / "held21"

    if not (data / "manifest.txt").exists():
        sh(["cotans", "dataset", "--out", str(data),
            "--train", str(args.train), "--val", str(args.val), "--test", "0",
            "--snrs", "13,17,21", "--seed", str(args.seed)])
    if not (held / "manifest.txt").exists():
        sh(["cotans", "dataset", "--out", str(held),
            "--train", "0", "--val", "0", "--test", str(args.test),
            "--snrs", "21", "--seed", str(args.seed + 1)])

    rc = trainer_main([
        "train", "--dataset-dir", str(data), "--out-dir", str(out_dir),
        "--epochs", str(args.epochs), "--seed", str(args.seed),
    ])
    if rc != 0:
        return rc

    preds = work / "preds"
    rc = trainer_main([
        "predict", "--checkpoint", str(out_dir / "checkpoint.pt"),
        "--manifest", str(held / "manifest.txt"), "--split", "test",
        "--out-dir", str(preds), "--normalize",
    ])
    if rc != 0:
        return rc

    nn_out = sh(["cotans", "decode", "--manifest", str(held / "manifest.txt"),
                 "--pred-dir", str(preds), "--out", str(work / "nn.csv")])
    cl_out = sh(["cotans", "decode", "--manifest", str(held / "manifest.txt"),
                 "--pred-dir", str(held), "--pred-suffix", ".cotans.f32",
                 "--out", str(work / "classical.csv")])
    nn_acc, nn_rmse = decode_metrics(nn_out)
    cl_acc, cl_rmse = decode_metrics(cl_out)

    import csv
    with open(out_dir / "loss_curve.csv") as f:
        rows = list(csv.DictReader(f))
    val0 = float(rows[0]["val_loss"])
    val_last = float(rows[-1]["val_loss"])
    drop = 100.0 * (1.0 - val_last / val0)

    lines = [
        f"pairs_train_val={3 * (args.train + args.val)}",
        f"epochs={args.epochs}",
        f"val_loss_epoch0={val0:.9g}",
        f"val_loss_final={val_last:.9g}",
        f"val_loss_decrease_pct={drop:.2f}",
        f"heldout_trials={args.test}",
        f"nn_count_accuracy={nn_acc:.4f}",
        f"nn_rho_rmse_m={nn_rmse:.4f}",
        f"classical_count_accuracy={cl_acc:.4f}",
        f"classical_rho_rmse_m={cl_rmse:.4f}",
        f"gate_val_drop_ge_50={'pass' if drop >= 50.0 else 'FAIL'}",
        f"gate_count_acc_ge_90={'pass' if nn_acc >= 0.90 else 'FAIL'}",
        f"gate_rmse_le_classical={'pass' if nn_rmse <= cl_rmse else 'FAIL'}",
    ]
    (out_dir / "metrics.txt").write_text("\n".join(lines) + "\n")
    print("\n".join(lines))
    return 0


if __name__ == "__main__":
    sys.exit(main())
