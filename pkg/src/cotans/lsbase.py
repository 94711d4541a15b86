"""Oracle-labeled least-squares baseline: virtual-emitter multilateration.

Given correctly labeled echo path distances per boundary and the true
virtual emitter as the starting point, a damped Gauss-Newton solver on
range residuals recovers each virtual emitter, which maps back to a
boundary via the perpendicular bisector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from cotans.geometry import (
    Boundary,
    Point2,
    Scenario,
    boundary_from_virtual,
    mirror_point,
    nlos_distance,
)


class LsSolverError(RuntimeError):
    """Normal equations singular or damping failed to find a descent step."""


@dataclass
class LabeledEchoSet:
    boundary_index: int
    distances: list[tuple[int, float]]  # (receiver_index, path distance in m)

    def __post_init__(self):
        if len(self.distances) < 3:
            raise ValueError("need at least 3 receivers per boundary")
        if any(d <= 0 for _, d in self.distances):
            raise ValueError("path distances must be positive")


def ls_virtual_emitter(
    receivers: list[Point2],
    echoes: LabeledEchoSet,
    init: Point2,
    max_iters: int = 50,
    step_tol: float = 1e-9,
) -> Point2:
    """Minimize sum_i (|v - p_i| - d_i)^2 by Gauss-Newton with Levenberg damping."""
    idx = [i for i, _ in echoes.distances]
    p = np.array([receivers[i].xy for i in idx])
    d = np.array([dist for _, dist in echoes.distances])
    v = init.xy.astype(float)

    def cost(vv: np.ndarray) -> float:
        r = np.linalg.norm(vv - p, axis=1) - d
        return float(r @ r)

    lam = 0.0
    for _ in range(max_iters):
        diff = v - p
        ranges = np.linalg.norm(diff, axis=1)
        if np.any(ranges == 0):
            raise LsSolverError("iterate coincides with a receiver")
        r = ranges - d
        jac = diff / ranges[:, None]
        jtj = jac.T @ jac
        jtr = jac.T @ r
        current = float(r @ r)
        step = None
        for _ in range(20):
            try:
                candidate = np.linalg.solve(jtj + lam * np.eye(2), -jtr)
            except np.linalg.LinAlgError:
                candidate = None
            if candidate is not None and cost(v + candidate) <= current + 1e-15:
                step = candidate
                lam = lam / 2.0
                break
            lam = max(lam * 10.0, 1e-8)
        if step is None:
            raise LsSolverError("no descent step found")
        v = v + step
        if float(np.linalg.norm(step)) < step_tol:
            break
    return Point2(float(v[0]), float(v[1]))


def ls_boundaries(
    scenario: Scenario,
    noise_sigma: float = 0.0,
    seed: int | None = None,
    echo_sets: list[LabeledEchoSet] | None = None,
) -> list[Boundary]:
    """Solve one virtual emitter per boundary and convert back to (rho, theta).

    With echo_sets=None the true NLOS distances are used, optionally
    perturbed by i.i.d. Gaussian error of std noise_sigma (the surrogate
    for a delay-estimation front-end).  Initialization is always the
    ground-truth virtual emitter, matching the advantaged protocol.
    """
    if scenario.n_boundaries < 1:
        raise ValueError("scenario has no boundaries")
    rng = np.random.default_rng(seed)
    if echo_sets is None:
        echo_sets = []
        for j, b in enumerate(scenario.boundaries):
            dists = [
                (i, nlos_distance(scenario.emitter, r, b))
                for i, r in enumerate(scenario.receivers)
            ]
            if noise_sigma > 0:
                dists = [
                    (i, d + rng.normal(0.0, noise_sigma)) for i, d in dists
                ]
            echo_sets.append(LabeledEchoSet(boundary_index=j, distances=dists))
    out = []
    for echoes in echo_sets:
        b_true = scenario.boundaries[echoes.boundary_index]
        init = mirror_point(scenario.emitter, b_true)
        v_hat = ls_virtual_emitter(scenario.receivers, echoes, init)
        out.append(boundary_from_virtual(scenario.emitter, v_hat))
    return out
