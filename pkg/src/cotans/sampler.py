"""Randomized scenario generation for Monte-Carlo trials.

Boundary azimuths are drawn per angular quadrant (uniform within the
quadrant, quadrants chosen uniformly without replacement for N=2) with a
minimum pairwise separation; ranges are uniform above a per-quadrant
floor.  Emitter and receivers are drawn from fixed square placement
areas, and draws where a boundary would come between the emitter or a
receiver and the origin side are rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from cotans.geometry import Boundary, Point2, Scenario, wrap_angle

QUADRANT_LO = (0.0, 0.5 * math.pi, -math.pi, -0.5 * math.pi)


class SamplerError(RuntimeError):
    """Rejection budget exhausted."""


@dataclass
class SamplerConfig:
    rho_hi: float = 8.0
    rho_min_per_quadrant: tuple[float, float, float, float] = (1.0, 1.0, 3.0, 1.0)
    theta_min_sep_deg: float = 30.0
    emitter_center: tuple[float, float] = (3.5, 0.5)
    receiver_center: tuple[float, float] = (-2.5, 3.5)
    placement_width: float = 2.0
    n_receivers: int = 5
    n_max: int = 2
    p_single: float = 0.5
    sound_speed: float = 1500.0
    max_rejections: int = 1000

    def __post_init__(self):
        if self.theta_min_sep_deg <= 0:
            raise ValueError("theta_min_sep_deg must be positive")
        if not 0 <= self.p_single <= 1:
            raise ValueError("p_single must be a probability")


def _draw_boundaries(cfg: SamplerConfig, quads, rng: np.random.Generator) -> list[Boundary]:
    min_sep = math.radians(cfg.theta_min_sep_deg)
    for _ in range(cfg.max_rejections):
        thetas = [
            float(QUADRANT_LO[q] + rng.uniform(0.0, 0.5 * math.pi)) for q in quads
        ]
        seps = [
            abs(wrap_angle(a - b))
            for i, a in enumerate(thetas)
            for b in thetas[i + 1:]
        ]
        if all(s >= min_sep for s in seps):
            break
    else:
        raise SamplerError("could not satisfy the azimuth separation constraint")
    return [
        Boundary(float(rng.uniform(cfg.rho_min_per_quadrant[q], cfg.rho_hi)),
                 wrap_angle(t))
        for q, t in zip(quads, thetas)
    ]


def _draw_point(center: tuple[float, float], width: float,
                rng: np.random.Generator) -> Point2:
    half = width / 2.0
    return Point2(
        float(center[0] + rng.uniform(-half, half)),
        float(center[1] + rng.uniform(-half, half)),
    )


def sample_scenario(cfg: SamplerConfig, seed) -> Scenario:
    """Draw one scenario; seed may be an int or a numpy Generator.

    The boundary count and quadrant assignment are fixed up front so that
    the rejection loop (which redraws angles, ranges, and placements)
    cannot skew the quadrant frequencies or the N=1 fraction.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    n = 1 if rng.random() < cfg.p_single else cfg.n_max
    quads = rng.choice(4, size=n, replace=False)
    for _ in range(cfg.max_rejections):
        boundaries = _draw_boundaries(cfg, quads, rng)
        emitter = _draw_point(cfg.emitter_center, cfg.placement_width, rng)
        receivers = [
            _draw_point(cfg.receiver_center, cfg.placement_width, rng)
            for _ in range(cfg.n_receivers)
        ]
        # every point must stay strictly on the origin side of every boundary
        points = [emitter, *receivers]
        if all(b.signed_distance(p) > 0 for b in boundaries for p in points):
            return Scenario(
                emitter=emitter,
                receivers=receivers,
                boundaries=boundaries,
                sound_speed=cfg.sound_speed,
            )
    raise SamplerError("rejection budget exhausted while placing boundaries")
