"""Exact 2D geometry: mirror images, reflected-path lengths, ellipse support function.

A planar boundary is the line {x : x . n = rho} with unit normal
n = (cos theta, sin theta).  A first-order echo off that boundary behaves
like a direct path from the mirror image of the emitter, and the set of
boundary candidates consistent with one echo delay is the family of
tangent lines to an ellipse whose foci are emitter and receiver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi


def wrap_angle(theta: float) -> float:
    """Wrap an angle to [-pi, pi)."""
    return (theta + math.pi) % TWO_PI - math.pi


@dataclass(frozen=True)
class Point2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")

    @property
    def xy(self) -> np.ndarray:
        return np.array([self.x, self.y])

    def dist(self, other: "Point2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class Boundary:
    """Planar reflector given by range rho >= 0 and normal azimuth theta in [-pi, pi)."""

    rho: float
    theta: float

    def __post_init__(self):
        if not math.isfinite(self.rho) or self.rho < 0:
            raise ValueError(f"rho must be finite and >= 0, got {self.rho}")
        if not (-math.pi <= self.theta < math.pi):
            raise ValueError(f"theta must lie in [-pi, pi), got {self.theta}")

    @property
    def normal(self) -> np.ndarray:
        return np.array([math.cos(self.theta), math.sin(self.theta)])

    def signed_distance(self, p: Point2) -> float:
        """rho - p.n: positive when p is on the origin side of the line."""
        return self.rho - float(p.xy @ self.normal)


class DegenerateEllipseError(ValueError):
    """Path distance does not exceed the focal separation."""


@dataclass(frozen=True)
class Ellipse:
    """Locus of points with |x - f1| + |x - f2| = path_distance."""

    focus1: Point2
    focus2: Point2
    path_distance: float

    def __post_init__(self):
        c2 = self.focus1.dist(self.focus2)
        if not self.path_distance > c2:
            raise DegenerateEllipseError(
                f"path_distance {self.path_distance} <= focal separation {c2}"
            )

    def axes(self) -> tuple[np.ndarray, np.ndarray, float, float]:
        """Return (center, major unit vector u, semi-major a, semi-minor b)."""
        f1, f2 = self.focus1.xy, self.focus2.xy
        center = 0.5 * (f1 + f2)
        d = f2 - f1
        c = 0.5 * float(np.hypot(*d))
        a = 0.5 * self.path_distance
        # circle degenerate case: any axis direction works
        u = d / (2.0 * c) if c > 0 else np.array([1.0, 0.0])
        b = math.sqrt(a * a - c * c)
        return center, u, a, b


@dataclass
class Scenario:
    """Ground truth for one trial: emitter, receivers, boundaries, sound speed."""

    emitter: Point2
    receivers: list[Point2]
    boundaries: list[Boundary] = field(default_factory=list)
    sound_speed: float = 1500.0

    def __post_init__(self):
        if len(self.receivers) < 3:
            raise ValueError("need at least 3 receivers")
        for i, r in enumerate(self.receivers):
            for other in self.receivers[i + 1:]:
                if r == other:
                    raise ValueError("receivers must be pairwise distinct")
        for b in self.boundaries:
            signs = [math.copysign(1.0, b.signed_distance(p))
                     for p in [self.emitter, *self.receivers]]
            if len(set(signs)) > 1:
                raise ValueError(
                    f"boundary (rho={b.rho}, theta={b.theta}) separates "
                    "the emitter from a receiver"
                )

    @property
    def n_receivers(self) -> int:
        return len(self.receivers)

    @property
    def n_boundaries(self) -> int:
        return len(self.boundaries)


def mirror_point(p: Point2, b: Boundary) -> Point2:
    """Reflect p across the boundary line."""
    n = b.normal
    s = b.rho - float(p.xy @ n)
    q = p.xy + 2.0 * s * n
    return Point2(float(q[0]), float(q[1]))


def nlos_distance(emitter: Point2, receiver: Point2, b: Boundary) -> float:
    """Length of the specular path emitter -> boundary -> receiver."""
    return mirror_point(emitter, b).dist(receiver)


def support_rho(e: Ellipse, theta):
    """Signed distance of the tangent line to e with outward normal (cos t, sin t).

    Accepts a scalar or an array of angles.  The returned line
    {x : x . n = rho} touches the ellipse from the +n side.
    """
    center, u, a, b = e.axes()
    v = np.array([-u[1], u[0]])
    theta = np.asarray(theta, dtype=float)
    n = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    rho = n @ center + np.sqrt((a * (n @ u)) ** 2 + (b * (n @ v)) ** 2)
    return float(rho) if rho.ndim == 0 else rho


def boundary_from_virtual(emitter: Point2, virtual: Point2) -> Boundary:
    """Perpendicular bisector of emitter-virtual as a canonical (rho, theta) boundary.

    Inverse of mirror_point: mirror_point(emitter, result) == virtual.
    """
    d = virtual.xy - emitter.xy
    norm = float(np.hypot(*d))
    if norm == 0.0:
        raise ValueError("virtual emitter coincides with the emitter")
    n = d / norm
    m = 0.5 * (emitter.xy + virtual.xy)
    rho = float(m @ n)
    theta = math.atan2(n[1], n[0])
    if rho < 0:
        rho, theta = -rho, theta + math.pi
    return Boundary(rho, wrap_angle(theta))
