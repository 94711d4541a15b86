"""Training loop: SGD on pixelwise MSE (or BCE) over exported image pairs."""

from __future__ import annotations

import csv
import dataclasses
import time
from dataclasses import dataclass, field
from pathlib import Path

import torch
import torch.nn.functional as F
from torch.utils.data import DataLoader

from segnet_trainer.data import PairDataset, read_manifest
from segnet_trainer.model import UNet

LOSSES = ("mse", "bce")


@dataclass
class TrainConfig:
    dataset_dir: str = "dataset"
    out_dir: str = "runs/default"
    channels: int = 1
    learning_rate: float = 0.05
    weight_decay: float = 0.0
    momentum: float = 0.9
    depth: int = 3
    widths: tuple[int, int, int] = (8, 32, 192)
    epochs: int = 2
    batch_size: int = 16
    seed: int = 0
    loss: str = "mse"
    train_split: str = "train"
    val_split: str = "val"
    limit_train: int = 0  # 0 = use all pairs
    limit_val: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.depth != 3:
            raise ValueError("only the depth-3 network is implemented")
        if self.loss not in LOSSES:
            raise ValueError(f"loss must be one of {LOSSES}")


def _loss_fn(name: str):
    if name == "bce":
        return lambda pred, target: F.binary_cross_entropy_with_logits(pred, target)
    return lambda pred, target: F.mse_loss(pred, target)


def _evaluate(model, loader, loss_fn) -> float:
    model.eval()
    total, count = 0.0, 0
    with torch.no_grad():
        for x, y in loader:
            total += float(loss_fn(model(x), y)) * x.shape[0]
            count += x.shape[0]
    return total / max(count, 1)


def train(cfg: TrainConfig, log=print) -> dict:
    """Train per config; writes checkpoint.pt and loss_curve.csv to out_dir.

    Returns a history dict with per-epoch train/validation losses, where
    the epoch-0 validation entry is the untrained model's loss.
    """
    torch.manual_seed(cfg.seed)
    manifest = read_manifest(Path(cfg.dataset_dir) / "manifest.txt")

    def subset(split, limit):
        pairs = manifest.split(split)
        if not pairs:
            raise ValueError(f"no pairs in split {split!r}")
        return PairDataset(manifest, pairs[:limit] if limit else pairs)

    train_set = subset(cfg.train_split, cfg.limit_train)
    val_set = subset(cfg.val_split, cfg.limit_val)
    gen = torch.Generator().manual_seed(cfg.seed)
    train_loader = DataLoader(
        train_set, batch_size=cfg.batch_size, shuffle=True, generator=gen
    )
    val_loader = DataLoader(val_set, batch_size=cfg.batch_size)

    model = UNet(in_channels=cfg.channels, widths=tuple(cfg.widths))
    opt = torch.optim.SGD(
        model.parameters(), lr=cfg.learning_rate,
        momentum=cfg.momentum, weight_decay=cfg.weight_decay,
    )
    loss_fn = _loss_fn(cfg.loss)

    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    history = {"epoch": [0], "train_loss": [float("nan")],
               "val_loss": [_evaluate(model, val_loader, loss_fn)]}
    log(f"model: {model.n_parameters()} parameters; "
        f"train {len(train_set)} / val {len(val_set)} pairs")
    log(f"epoch 0: val_loss {history['val_loss'][0]:.6g} (untrained)")

    for epoch in range(1, cfg.epochs + 1):
        model.train()
        t0 = time.time()
        total, count = 0.0, 0
        for x, y in train_loader:
            opt.zero_grad()
            loss = loss_fn(model(x), y)
            loss.backward()
            opt.step()
            total += float(loss.detach()) * x.shape[0]
            count += x.shape[0]
        train_loss = total / count
        val_loss = _evaluate(model, val_loader, loss_fn)
        history["epoch"].append(epoch)
        history["train_loss"].append(train_loss)
        history["val_loss"].append(val_loss)
        log(f"epoch {epoch}: train_loss {train_loss:.6g} "
            f"val_loss {val_loss:.6g} ({time.time() - t0:.1f} s)")
        save_checkpoint(out_dir / "checkpoint.pt", model, cfg, manifest)

    with open(out_dir / "loss_curve.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["epoch", "train_loss", "val_loss"])
        for row in zip(history["epoch"], history["train_loss"], history["val_loss"]):
            w.writerow([row[0], f"{row[1]:.9g}", f"{row[2]:.9g}"])
    return history


def save_checkpoint(path: str | Path, model: UNet, cfg: TrainConfig, manifest) -> None:
    torch.save({
        "state_dict": model.state_dict(),
        "config": dataclasses.asdict(cfg),
        "n_rho": manifest.n_rho,
        "n_theta": manifest.n_theta,
    }, path)


def load_checkpoint(path: str | Path) -> tuple[UNet, dict]:
    blob = torch.load(path, map_location="cpu", weights_only=False)
    cfg = blob["config"]
    model = UNet(in_channels=cfg["channels"], widths=tuple(cfg["widths"]))
    model.load_state_dict(blob["state_dict"])
    model.eval()
    return model, blob
