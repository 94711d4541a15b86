"""Batch prediction: accumulator files in, clamped heatmap files out.

Outputs mirror the dataset layout so the simulator's `decode` command can
consume them via its --pred-dir/--pred-suffix options: each pair's target
path has its `.bei.f32` suffix replaced by `.pred.f32`.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import torch

from segnet_trainer.data import Manifest, read_image, write_image
from segnet_trainer.model import UNet

PRED_SUFFIX = ".pred.f32"


def predict_array(model: UNet, values: np.ndarray) -> np.ndarray:
    """Single-image forward pass, output clamped to [0, 1]."""
    with torch.no_grad():
        x = torch.from_numpy(values).float().unsqueeze(0).unsqueeze(0)
        y = model(x).clamp_(0.0, 1.0)
    return y.squeeze(0).squeeze(0).numpy()

def predict_pairs(
    model: UNet,
    manifest: Manifest,
    pairs,
    out_dir: str | Path,
    batch_size: int = 16,
    normalize: bool = False,
) -> list[Path]:
    """Predict for each pair's input image; returns the written paths.

    With normalize=True each output is rescaled so its peak is 1 before
    clamping — the same convention the classical path applies to its
    accumulator before decoding.  Off by default so an all-zero input
    stays near zero.
    """
    model.eval()
    out_dir = Path(out_dir)
    written = []
    for start in range(0, len(pairs), batch_size):
        chunk = pairs[start:start + batch_size]
        batch = np.stack([
            read_image(manifest.root / p.cotans_path, manifest.n_rho, manifest.n_theta)
            for p in chunk
        ])
        with torch.no_grad():
            pred = model(torch.from_numpy(batch).float().unsqueeze(1))
            if normalize:
                peaks = pred.amax(dim=(2, 3), keepdim=True).clamp_min(1e-12)
                pred = pred / peaks
            pred = pred.clamp_(0.0, 1.0).squeeze(1).numpy()
        for p, img in zip(chunk, pred):
            rel = p.bei_path
            if rel.endswith(".bei.f32"):
                rel = rel[: -len(".bei.f32")] + PRED_SUFFIX
            else:
                rel += PRED_SUFFIX
            target = out_dir / rel
            target.parent.mkdir(parents=True, exist_ok=True)
            write_image(target, img)
            written.append(target)
    return written
