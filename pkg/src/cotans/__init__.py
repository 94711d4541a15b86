"""2D reverberant-environment boundary estimation toolkit.

Simulates planar-boundary acoustic scenarios, estimates multipath time
delays, accumulates tangent-curve votes in a (rho, theta) image, and
decodes boundary count and parameters; includes an oracle-labeled
least-squares baseline and a seeded Monte-Carlo evaluation harness.
"""

from cotans.geometry import (
    Boundary,
    Ellipse,
    Point2,
    Scenario,
    boundary_from_virtual,
    mirror_point,
    nlos_distance,
    support_rho,
)
from cotans.imaging import BoundaryEstimateImage, CotansImage, GridSpec

__all__ = [
    "Point2",
    "Boundary",
    "Ellipse",
    "Scenario",
    "mirror_point",
    "nlos_distance",
    "support_rho",
    "boundary_from_virtual",
    "GridSpec",
    "CotansImage",
    "BoundaryEstimateImage",
]
