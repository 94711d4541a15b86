"""Dataset loading: text manifest + raw little-endian float32 images.

The manifest format is the one written by the simulation toolkit's
dataset exporter: header `key=value` lines (grid dims among them) and one
`pair=<input>;<target>;k=v;...` line per image pair, with paths relative
to the manifest's directory.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch
from torch.utils.data import Dataset


@dataclass(frozen=True)
class ManifestPair:
    cotans_path: str
    bei_path: str
    snr_db: float
    seed: int
    n_boundaries: int


@dataclass
class Manifest:
    root: Path
    n_rho: int
    n_theta: int
    meta: dict = field(default_factory=dict)
    pairs: list[ManifestPair] = field(default_factory=list)

    def split(self, name: str) -> list[ManifestPair]:
        """Pairs whose input path lives under the given split directory."""
        prefix = name + "/"
        return [p for p in self.pairs if p.cotans_path.startswith(prefix)]


def read_manifest(path: str | Path) -> Manifest:
    path = Path(path)
    meta: dict[str, str] = {}
    pairs: list[ManifestPair] = []
    for line in path.read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        if key != "pair":
            meta[key] = value
            continue
        fields = value.split(";")
        if len(fields) < 3:
            raise ValueError(f"malformed pair line: {line!r}")
        kv = dict(f.split("=", 1) for f in fields[2:])
        pairs.append(ManifestPair(
            cotans_path=fields[0],
            bei_path=fields[1],
            snr_db=float(kv.get("snr_db", "nan")),
            seed=int(kv.get("seed", "0")),
            n_boundaries=int(kv.get("n", "0")),
        ))
    for required in ("n_rho", "n_theta"):
        if required not in meta:
            raise ValueError(f"{path}: manifest is missing {required}")
    return Manifest(
        root=path.parent,
        n_rho=int(meta["n_rho"]),
        n_theta=int(meta["n_theta"]),
        meta=meta,
        pairs=pairs,
    )


def read_image(path: str | Path, n_rho: int, n_theta: int) -> np.ndarray:
    data = np.frombuffer(Path(path).read_bytes(), dtype="<f4")
    if data.size != n_rho * n_theta:
        raise ValueError(
            f"{path}: expected {n_rho * n_theta} float32 values, got {data.size}"
        )
    return data.reshape(n_rho, n_theta).copy()


def write_image(path: str | Path, values: np.ndarray) -> None:
    Path(path).write_bytes(np.ascontiguousarray(values, dtype="<f4").tobytes())


class PairDataset(Dataset):
    """(input, target) image tensors of shape (1, n_rho, n_theta)."""

    def __init__(self, manifest: Manifest, pairs: list[ManifestPair] | None = None):
        self.manifest = manifest
        self.pairs = manifest.pairs if pairs is None else pairs

    def __len__(self) -> int:
        return len(self.pairs)

    def __getitem__(self, idx: int):
        p = self.pairs[idx]
        m = self.manifest
        x = read_image(m.root / p.cotans_path, m.n_rho, m.n_theta)
        y = read_image(m.root / p.bei_path, m.n_rho, m.n_theta)
        return (
            torch.from_numpy(x).unsqueeze(0).float(),
            torch.from_numpy(y).unsqueeze(0).float(),
        )
