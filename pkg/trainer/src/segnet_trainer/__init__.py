"""Toy U-Net trainer: accumulator images in, boundary heatmaps out.

Interoperates with the boundary-estimation toolkit purely through its
exported dataset files (raw float32 images plus a text manifest) and its
`decode` command; nothing here imports that package.
"""

from segnet_trainer.data import Manifest, ManifestPair, PairDataset, read_manifest
from segnet_trainer.model import UNet
from segnet_trainer.train import TrainConfig, train

__all__ = [
    "Manifest",
    "ManifestPair",
    "PairDataset",
    "read_manifest",
    "UNet",
    "TrainConfig",
    "train",
]
