"""Peak decoding of boundary images: iterative argmax, centroid refinement, suppression."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from cotans.geometry import Boundary
from cotans.imaging import GridSpec


@dataclass(frozen=True)
class BoundaryDetection:
    boundary: Boundary
    score: float


def decode_bei(
    values: np.ndarray,
    grid: GridSpec,
    n_max: int = 2,
    threshold: float = 0.5,
    window: int = 11,
) -> list[BoundaryDetection]:
    """Extract up to n_max boundaries from a (rho, theta) heatmap.

    Repeats: find the global maximum, stop if it is below threshold,
    refine by the intensity-weighted centroid of the surrounding
    window x window patch (theta wraps, rho clips), then zero the patch.
    Detections landing within one cell of an earlier one are discarded.
    """
    if n_max < 1 or not 0 < threshold < 1 or window % 2 == 0:
        raise ValueError("need n_max >= 1, 0 < threshold < 1, odd window")
    img = np.array(values, dtype=float)
    half = window // 2
    detections: list[BoundaryDetection] = []
    cells: list[tuple[float, float]] = []
    for _ in range(n_max):
        ri, ti = np.unravel_index(int(np.argmax(img)), img.shape)
        peak = float(img[ri, ti])
        if peak < threshold:
            break
        r_lo = max(ri - half, 0)
        r_hi = min(ri + half, grid.n_rho - 1)
        col_offsets = np.arange(-half, half + 1)
        cols = (ti + col_offsets) % grid.n_theta
        patch = img[r_lo:r_hi + 1][:, cols]
        total = float(patch.sum())
        rows = np.arange(r_lo, r_hi + 1, dtype=float)
        rho_idx = float(rows @ patch.sum(axis=1)) / total
        theta_idx = ti + float(patch.sum(axis=0) @ col_offsets) / total
        img[r_lo:r_hi + 1][:, cols] = 0.0
        duplicate = any(
            abs(rho_idx - pr) <= 1.0
            and min(abs(theta_idx - pt) % grid.n_theta,
                    grid.n_theta - abs(theta_idx - pt) % grid.n_theta) <= 1.0
            for pr, pt in cells
        )
        if duplicate:
            continue
        cells.append((rho_idx, theta_idx))
        rho = min(max(grid.rho_value(rho_idx), 0.0), grid.rho_max)
        detections.append(
            BoundaryDetection(
                boundary=Boundary(rho, grid.theta_value(theta_idx)),
                score=peak,
            )
        )
    return detections


def estimate_count(detections: list[BoundaryDetection]) -> int:
    """Number of boundaries: detections that survived the threshold."""
    return len(detections)
