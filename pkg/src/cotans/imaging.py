"""Accumulator images over the (rho, theta) boundary parameter space.

Each feasible echo delay defines an ellipse; its tangent-line support
curve rho(theta) is rasterized into a discretized rho x theta grid and
curve intersections mark boundaries.  Ground-truth targets are rendered
as truncated 2D Gaussian pulses (boundary estimate images).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from cotans.geometry import (
    Boundary,
    DegenerateEllipseError,
    Ellipse,
    Point2,
    support_rho,
    wrap_angle,
)

BEI_SIGMA_PX = 2.0
BEI_WINDOW = 11


@dataclass(frozen=True)
class GridSpec:
    rho_max: float = 10.0
    n_rho: int = 101
    n_theta: int = 360

    def __post_init__(self):
        if self.rho_max <= 0 or self.n_rho < 2 or self.n_theta < 4:
            raise ValueError(f"invalid grid {self}")

    @property
    def d_rho(self) -> float:
        return self.rho_max / (self.n_rho - 1)

    @property
    def d_theta(self) -> float:
        return 2.0 * math.pi / self.n_theta

    def theta_centers(self) -> np.ndarray:
        """Bin-center angles: -pi, -pi + d_theta, ..."""
        return -math.pi + np.arange(self.n_theta) * self.d_theta

    def rho_index(self, rho: float) -> int:
        # round half away from zero, e.g. 5.05 m -> bin 51 on the default
        # grid; the epsilon keeps exact halves from landing just below .5
        # after division
        return int(math.floor(rho / self.d_rho + 0.5 + 1e-9))

    def theta_index(self, theta: float) -> int:
        x = (wrap_angle(theta) + math.pi) / self.d_theta
        return int(math.floor(x + 0.5 + 1e-9)) % self.n_theta

    def rho_value(self, index: float) -> float:
        return index * self.d_rho

    def theta_value(self, index: float) -> float:
        return wrap_angle(-math.pi + index * self.d_theta)


def bin_of(grid: GridSpec, b: Boundary) -> tuple[int, int]:
    """Grid indices of a boundary; nearest-bin in both axes."""
    if not 0 <= b.rho <= grid.rho_max:
        raise ValueError(f"rho {b.rho} outside [0, {grid.rho_max}]")
    return grid.rho_index(b.rho), grid.theta_index(b.theta)


@dataclass
class CotansImage:
    grid: GridSpec
    values: np.ndarray
    n_curves: int = 0
    n_skipped: int = 0
    empty: bool = False

    @classmethod
    def zeros(cls, grid: GridSpec) -> "CotansImage":
        return cls(grid=grid, values=np.zeros((grid.n_rho, grid.n_theta)))


@dataclass
class BoundaryEstimateImage:
    grid: GridSpec
    values: np.ndarray


def rasterize_curve(image: CotansImage, e: Ellipse) -> None:
    """Add one tangent-support curve: a unit vote in the nearest rho bin per theta bin."""
    grid = image.grid
    rho = support_rho(e, grid.theta_centers())
    mask = (rho >= 0.0) & (rho <= grid.rho_max)
    rho_idx = np.floor(rho[mask] / grid.d_rho + 0.5).astype(int)
    np.add.at(image.values, (rho_idx, np.flatnonzero(mask)), 1.0)
    image.n_curves += 1


def accumulate_curves(
    emitter: Point2,
    receivers: list[Point2],
    sound_speed: float,
    nlos_taus: list[list[float]],
    grid: GridSpec,
) -> CotansImage:
    """Unnormalized accumulation of one curve per (receiver, NLOS delay) pair.

    Delays whose path distance c*tau does not exceed the emitter-receiver
    separation cannot define an ellipse and are skipped and counted.
    """
    image = CotansImage.zeros(grid)
    for receiver, taus in zip(receivers, nlos_taus):
        for tau in taus:
            d = sound_speed * tau
            try:
                ellipse = Ellipse(emitter, receiver, d)
            except DegenerateEllipseError:
                image.n_skipped += 1
                continue
            rasterize_curve(image, ellipse)
    return image


def normalize(image: CotansImage) -> CotansImage:
    """Scale to [0, 1] by the global maximum; all-zero images are flagged."""
    peak = float(image.values.max(initial=0.0))
    if peak > 0:
        image.values = image.values / peak
    else:
        image.empty = True
    return image


def build_cotans(
    emitter: Point2,
    receivers: list[Point2],
    sound_speed: float,
    nlos_taus: list[list[float]],
    grid: GridSpec,
) -> CotansImage:
    """Accumulate tangent curves for all receivers' NLOS delays and normalize."""
    return normalize(accumulate_curves(emitter, receivers, sound_speed, nlos_taus, grid))


def gaussian_patch(window: int = BEI_WINDOW, sigma: float = BEI_SIGMA_PX) -> np.ndarray:
    half = window // 2
    d = np.arange(-half, half + 1)
    g = np.exp(-(d[:, None] ** 2 + d[None, :] ** 2) / (2.0 * sigma * sigma))
    return g


def render_bei(
    boundaries: list[Boundary],
    grid: GridSpec,
    sigma: float = BEI_SIGMA_PX,
    window: int = BEI_WINDOW,
) -> BoundaryEstimateImage:
    """Truncated Gaussian pulse per boundary; theta wraps, rho clips, values in [0, 1]."""
    values = np.zeros((grid.n_rho, grid.n_theta))
    half = window // 2
    patch = gaussian_patch(window, sigma)
    for b in boundaries:
        ri, ti = bin_of(grid, b)
        r_lo = max(ri - half, 0)
        r_hi = min(ri + half, grid.n_rho - 1)
        cols = (ti + np.arange(-half, half + 1)) % grid.n_theta
        rows = values[r_lo:r_hi + 1]
        rows[:, cols] += patch[r_lo - ri + half:r_hi - ri + half + 1, :]
    np.clip(values, 0.0, 1.0, out=values)
    return BoundaryEstimateImage(grid=grid, values=values)


def write_image(path: str | Path, values: np.ndarray) -> None:
    """Raw little-endian float32, row-major (rho rows x theta columns)."""
    Path(path).write_bytes(np.ascontiguousarray(values, dtype="<f4").tobytes())


def read_image(path: str | Path, grid: GridSpec) -> np.ndarray:
    data = np.frombuffer(Path(path).read_bytes(), dtype="<f4")
    expected = grid.n_rho * grid.n_theta
    if data.size != expected:
        raise ValueError(
            f"{path}: expected {expected} float32 values, found {data.size}"
        )
    return data.reshape(grid.n_rho, grid.n_theta).astype(float)
