import numpy as np
import pytest

from segnet_trainer.data import write_image


def gaussian_blob(n_rho, n_theta, center, sigma=2.0):
    r = np.arange(n_rho)[:, None] - center[0]
    t = np.arange(n_theta)[None, :] - center[1]
    return np.exp(-(r ** 2 + t ** 2) / (2.0 * sigma * sigma)).astype(np.float32)


def make_dataset(root, pairs_by_split, n_rho=16, n_theta=24, snr_db=21.0):
    """Write a dataset directory in the exporter's manifest format.

    pairs_by_split maps split name -> list of (input, target) arrays.
    """
    root.mkdir(parents=True, exist_ok=True)
    lines = [
        "format=f32_le_rowmajor",
        "rho_max=10",
        f"n_rho={n_rho}",
        f"n_theta={n_theta}",
        f"snr_list={snr_db:g}",
    ]
    for split, pairs in pairs_by_split.items():
        subdir = root / split / f"{snr_db:g}"
        subdir.mkdir(parents=True, exist_ok=True)
        for i, (x, y) in enumerate(pairs):
            rel_c = f"{split}/{snr_db:g}/{i}.cotans.f32"
            rel_b = f"{split}/{snr_db:g}/{i}.bei.f32"
            write_image(root / rel_c, x)
            write_image(root / rel_b, y)
            lines.append(
                f"pair={rel_c};{rel_b};snr_db={snr_db:g};seed={i};n=1;"
                f"rho=5;theta=0"
            )
    (root / "manifest.txt").write_text("\n".join(lines) + "\n")
    return root


@pytest.fixture
def blob_dataset(tmp_path):
    """Small identity-ish task: target equals a denoised version of the input."""
    rng = np.random.default_rng(0)
    n_rho, n_theta = 16, 24

    def pair():
        center = (int(rng.integers(3, 13)), int(rng.integers(3, 21)))
        y = gaussian_blob(n_rho, n_theta, center)
        x = np.clip(y + 0.2 * rng.random((n_rho, n_theta)).astype(np.float32), 0, 1)
        return x, y

    return make_dataset(
        tmp_path / "ds",
        {"train": [pair() for _ in range(12)], "val": [pair() for _ in range(4)]},
        n_rho=n_rho, n_theta=n_theta,
    )
