"""Command-line interface: train, predict."""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from segnet_trainer.data import read_manifest
from segnet_trainer.predict import predict_pairs
from segnet_trainer.train import TrainConfig, load_checkpoint, train


def _parse_config_file(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SystemExit(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value
    return out


def _build_train_config(args) -> TrainConfig:
    overrides: dict[str, str] = {}
    if args.config:
        overrides.update(_parse_config_file(args.config))
    for item in args.set or []:
        key, _, value = item.partition("=")
        if not value:
            raise SystemExit(f"--set expects key=value, got {item!r}")
        overrides[key.strip()] = value.strip()

    fields = {f.name: f for f in dataclasses.fields(TrainConfig)}
    kwargs = {}
    for key, value in overrides.items():
        if key not in fields:
            raise SystemExit(f"unknown config key {key!r}")
        hint = str(fields[key].type)
        if hint == "int":
            kwargs[key] = int(value)
        elif hint == "float":
            kwargs[key] = float(value)
        elif hint.startswith("tuple"):
            kwargs[key] = tuple(int(v) for v in value.split(","))
        else:
            kwargs[key] = value
    for name in ("dataset_dir", "out_dir", "epochs", "batch_size", "seed",
                 "loss", "limit_train", "limit_val"):
        flag = getattr(args, name, None)
        if flag is not None:
            kwargs[name] = flag
    return TrainConfig(**kwargs)


def cmd_train(args) -> int:
    cfg = _build_train_config(args)
    history = train(cfg)
    first, last = history["val_loss"][0], history["val_loss"][-1]
    drop = 100.0 * (1.0 - last / first) if first > 0 else float("nan")
    print(f"validation loss {first:.6g} -> {last:.6g} ({drop:.1f}% decrease)")
    print(f"wrote {Path(cfg.out_dir) / 'checkpoint.pt'} and loss_curve.csv")
    return 0


def cmd_predict(args) -> int:
    model, blob = load_checkpoint(args.checkpoint)
    manifest = read_manifest(args.manifest)
    if (manifest.n_rho, manifest.n_theta) != (blob["n_rho"], blob["n_theta"]):
        raise SystemExit(
            f"grid mismatch: checkpoint {blob['n_rho']}x{blob['n_theta']} vs "
            f"manifest {manifest.n_rho}x{manifest.n_theta}"
        )
    pairs = manifest.split(args.split) if args.split else manifest.pairs
    if not pairs:
        raise SystemExit(f"no pairs in split {args.split!r}")
    written = predict_pairs(model, manifest, pairs, args.out_dir,
                            batch_size=args.batch_size,
                            normalize=args.normalize)
    print(f"wrote {len(written)} predictions under {args.out_dir}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="segnet-trainer",
        description="toy U-Net: accumulator images -> boundary heatmaps",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train from an exported dataset")
    p.add_argument("--config", help="key=value config file mirroring TrainConfig")
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.add_argument("--dataset-dir", dest="dataset_dir")
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", dest="batch_size", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--loss", choices=["mse", "bce"])
    p.add_argument("--limit-train", dest="limit_train", type=int)
    p.add_argument("--limit-val", dest="limit_val", type=int)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="write predicted heatmap files")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--split", default="test")
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.add_argument("--batch-size", dest="batch_size", type=int, default=16)
    p.add_argument("--normalize", action="store_true",
                   help="rescale each prediction so its peak is 1")
    p.set_defaults(func=cmd_predict)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
