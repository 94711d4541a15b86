import numpy as np
import pytest

from cotans.geometry import Boundary, Ellipse, Point2


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_boundary(rng, rho_lo=0.5, rho_hi=8.0):
    return Boundary(
        float(rng.uniform(rho_lo, rho_hi)),
        float(rng.uniform(-np.pi, np.pi)),
    )


def random_point(rng, scale=5.0):
    return Point2(float(rng.uniform(-scale, scale)), float(rng.uniform(-scale, scale)))


def random_ellipse(rng, scale=5.0):
    f1 = random_point(rng, scale)
    f2 = random_point(rng, scale)
    d = f1.dist(f2) + float(rng.uniform(0.5, 10.0))
    return Ellipse(f1, f2, d)


def ellipse_points(e: Ellipse, n: int = 10_000) -> np.ndarray:
    """Dense parametric sampling of the ellipse, shape (n, 2)."""
    center, u, a, b = e.axes()
    v = np.array([-u[1], u[0]])
    t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    return center + np.outer(a * np.cos(t), u) + np.outer(b * np.sin(t), v)
