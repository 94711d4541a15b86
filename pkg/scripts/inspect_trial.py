#!/usr/bin/env python3
"""Render one Monte-Carlo trial's accumulator and target images to PNG.

Useful for eyeballing how the tangent-curve accumulator concentrates at
the true boundaries and what the Gaussian-pulse target looks like.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

import numpy as np

from cotans.geometry import nlos_distance
from cotans.harness import ExperimentConfig, trial_seed
from cotans.imaging import accumulate_curves, bin_of, render_bei
from cotans.sampler import sample_scenario


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trial", type=int, default=0)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="trial.png")
    args = ap.parse_args()

    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    cfg = ExperimentConfig()
    seed = trial_seed(args.seed, args.trial)
    ss = np.random.SeedSequence(seed)
    scenario_seed, *_ = ss.spawn(1 + cfg.sampler.n_receivers)
    sc = sample_scenario(cfg.sampler, np.random.default_rng(scenario_seed))

    taus = [
        [nlos_distance(sc.emitter, r, b) / sc.sound_speed for b in sc.boundaries]
        for r in sc.receivers
    ]
    acc = accumulate_curves(sc.emitter, sc.receivers, sc.sound_speed, taus, cfg.grid)
    bei = render_bei(sc.boundaries, cfg.grid)

    fig, axes = plt.subplots(1, 2, figsize=(12, 4), sharey=True)
    for ax, img, title in ((axes[0], acc.values, "accumulator"),
                           (axes[1], bei.values, "target heatmap")):
        ax.imshow(img, origin="lower", aspect="auto", cmap="viridis",
                  extent=[-180, 180, 0, cfg.grid.rho_max])
        for b in sc.boundaries:
            ri, ti = bin_of(cfg.grid, b)
            ax.plot(np.degrees(b.theta), b.rho, "rx", markersize=10)
        ax.set_title(title)
        ax.set_xlabel("theta (deg)")
    axes[0].set_ylabel("rho (m)")
    fig.tight_layout()
    fig.savefig(args.out, dpi=120)
    print(f"N={sc.n_boundaries} boundaries:",
          ", ".join(f"(rho={b.rho:.2f} m, theta={np.degrees(b.theta):.1f} deg)"
                    for b in sc.boundaries))
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
