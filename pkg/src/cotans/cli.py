"""Command-line interface: simulate, sweep, dataset, decode, ls-bench."""

from __future__ import annotations

import argparse
import csv
import math
import sys
from pathlib import Path

import numpy as np

from cotans import config as config_mod
from cotans.decoder import decode_bei
from cotans.harness import (
    METHODS,
    ExperimentConfig,
    count_accuracy,
    export_dataset,
    match_estimates,
    read_manifest,
    rmse_eval,
    run_sweep,
    run_trial,
    trial_seed,
)
from cotans.imaging import read_image, render_bei, write_image
from cotans.lsbase import LsSolverError, ls_boundaries
from cotans.sampler import sample_scenario


def _load_config(args) -> ExperimentConfig:
    overrides: dict[str, str] = {}
    if args.config:
        overrides.update(config_mod.parse_config_file(args.config))
    for item in args.set or []:
        key, _, value = item.partition("=")
        if not value:
            raise SystemExit(f"--set expects key=value, got {item!r}")
        overrides[key.strip()] = value.strip()
    cfg = config_mod.build_config(overrides)
    if getattr(args, "seed", None) is not None:
        cfg.master_seed = args.seed
    if getattr(args, "trials", None) is not None:
        cfg.trials_per_snr = args.trials
    if getattr(args, "snrs", None):
        cfg.snr_list = tuple(float(s) for s in args.snrs.split(","))
    return cfg


def _add_common(p):
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override a single config key (repeatable)")
    p.add_argument("--seed", type=int, help="master seed")


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    snr = float("inf") if args.snr is None else args.snr
    seed = trial_seed(cfg.master_seed, args.trial)
    rec = run_trial(cfg, snr, seed, args.method)
    # dump intermediates for inspection
    ss = np.random.SeedSequence(seed)
    scenario_seed, *_ = ss.spawn(1 + cfg.sampler.n_receivers)
    scenario = sample_scenario(cfg.sampler, np.random.default_rng(scenario_seed))
    bei = render_bei(scenario.boundaries, cfg.grid)
    write_image(out / "truth.bei.f32", bei.values)
    with open(out / "trial.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["kind", "rho_m", "theta_rad"])
        for b in rec.true_boundaries:
            w.writerow(["truth", f"{b.rho:.9g}", f"{b.theta:.9g}"])
        for b in rec.est_boundaries:
            w.writerow(["estimate", f"{b.rho:.9g}", f"{b.theta:.9g}"])
    print(f"method={rec.method} snr_db={snr:g} N={rec.n_true} N_hat={rec.n_est}")
    for j, k, d_rho, d_theta in rec.matched:
        print(f"  match truth[{j}]~est[{k}]: d_rho={d_rho:+.4f} m "
              f"d_theta={d_theta:+.3f} deg")
    print(f"wrote {out}/trial.csv and {out}/truth.bei.f32")
    return 0


def cmd_sweep(args) -> int:
    cfg = _load_config(args)
    methods = args.methods.split(",")
    for m in methods:
        if m not in METHODS:
            raise SystemExit(f"unknown method {m!r}; choose from {METHODS}")
    result = run_sweep(cfg, methods)
    text = result.to_csv()
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    if args.plot:
        _plot_sweep(result, args.plot)
    return 0


def _plot_sweep(result, path: str) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots()
    by_method: dict[str, list] = {}
    for row in result.rows:
        by_method.setdefault(row["method"], []).append(row)
    for method, rows in by_method.items():
        rows.sort(key=lambda r: r["snr_db"])
        ax.plot([r["snr_db"] for r in rows], [r["rho_rmse_m"] for r in rows],
                marker="o", label=method)
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("range RMSE (m)")
    ax.legend()
    fig.savefig(path, dpi=120)
    print(f"wrote {path}")


def cmd_dataset(args) -> int:
    cfg = _load_config(args)
    counts = {}
    for split, n in (("train", args.train), ("val", args.val), ("test", args.test)):
        if n > 0:
            counts[split] = n
    manifest = export_dataset(cfg, args.out, counts)
    print(f"wrote {manifest}")
    return 0


def cmd_decode(args) -> int:
    cfg = _load_config(args)
    manifest = read_manifest(args.manifest)
    root = Path(args.manifest).parent
    grid = manifest.grid
    rows = []
    n_exact = 0
    sq_err = []
    for pair in manifest.pairs:
        if args.pred_dir:
            path = Path(args.pred_dir) / pair.bei_path.replace(
                ".bei.f32", args.pred_suffix)
        else:
            path = root / pair.bei_path
        values = read_image(path, grid)
        dets = decode_bei(values, grid, n_max=cfg.sampler.n_max,
                          threshold=cfg.decode_threshold,
                          window=cfg.decode_window)
        est = [d.boundary for d in dets]
        matched = match_estimates(pair.boundaries, est, rho_max=grid.rho_max)
        n_exact += len(est) == len(pair.boundaries)
        sq_err += [d_rho ** 2 for _, _, d_rho, _ in matched]
        row = {
            "file": str(path),
            "n_true": len(pair.boundaries),
            "n_est": len(est),
            "rho_est": ":".join(f"{b.rho:.6g}" for b in est),
            "theta_est": ":".join(f"{b.theta:.6g}" for b in est),
        }
        rows.append(row)
    with open(args.out, "w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=list(rows[0].keys()))
        w.writeheader()
        w.writerows(rows)
    acc = n_exact / len(manifest.pairs)
    rmse = math.sqrt(sum(sq_err) / len(sq_err)) if sq_err else float("nan")
    print(f"decoded {len(rows)} images: count_accuracy={acc:.4f} "
          f"rho_rmse_m={rmse:.4f}")
    print(f"wrote {args.out}")
    return 0


def cmd_ls_bench(args) -> int:
    cfg = _load_config(args)
    sigmas = [float(s) for s in args.sigmas.split(",")]
    lines = ["sigma_m,n_trials,rho_rmse_m,n_failures"]
    for sigma in sigmas:
        errors = []
        failures = 0
        for t in range(cfg.trials_per_snr):
            seed = trial_seed(cfg.master_seed, t)
            scenario = sample_scenario(cfg.sampler, seed)
            try:
                est = ls_boundaries(scenario, noise_sigma=sigma, seed=seed + 1)
            except LsSolverError:
                failures += 1
                continue
            for _, _, d_rho, _ in match_estimates(scenario.boundaries, est,
                                                  rho_max=cfg.grid.rho_max):
                errors.append(d_rho ** 2)
        rmse = math.sqrt(sum(errors) / len(errors)) if errors else float("nan")
        lines.append(f"{sigma:.9g},{cfg.trials_per_snr},{rmse:.9g},{failures}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="cotans",
        description="2D boundary estimation: simulation, sweeps, datasets, decoding",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one trial and dump intermediates")
    _add_common(p)
    p.add_argument("--snr", type=float, help="SNR in dB (omit for noiseless)")
    p.add_argument("--trial", type=int, default=0, help="trial id")
    p.add_argument("--method", default="cotans-classical",
                   choices=[m for m in METHODS if m != "cotans-nn"])
    p.add_argument("--out", default="sim_out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="methods x SNRs Monte-Carlo sweep -> CSV")
    _add_common(p)
    p.add_argument("--methods", default="cotans-classical")
    p.add_argument("--snrs", help="comma-separated SNR list in dB")
    p.add_argument("--trials", type=int, help="trials per SNR")
    p.add_argument("--out", help="output CSV path (default: stdout)")
    p.add_argument("--plot", help="optional PNG line chart path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("dataset", help="export paired image dataset + manifest")
    _add_common(p)
    p.add_argument("--out", required=True)
    p.add_argument("--train", type=int, default=100)
    p.add_argument("--val", type=int, default=20)
    p.add_argument("--test", type=int, default=100)
    p.add_argument("--snrs", help="comma-separated SNR list in dB")
    p.set_defaults(func=cmd_dataset)

    p = sub.add_parser("decode", help="decode BEI files against a manifest")
    _add_common(p)
    p.add_argument("--manifest", required=True)
    p.add_argument("--pred-dir", help="root of predicted images mirroring the layout")
    p.add_argument("--pred-suffix", default=".pred.f32",
                   help="suffix replacing .bei.f32 under --pred-dir")
    p.add_argument("--out", required=True, help="boundary CSV path")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("ls-bench", help="LS baseline RMSE vs distance noise")
    _add_common(p)
    p.add_argument("--sigmas", default="0.01,0.05,0.1")
    p.add_argument("--trials", type=int, help="trials per sigma")
    p.add_argument("--out", help="output CSV path (default: stdout)")
    p.set_defaults(func=cmd_ls_bench)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
