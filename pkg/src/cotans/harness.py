"""End-to-end trial execution, metrics, SNR sweeps, and dataset export.

A trial is keyed by (snr_db, seed): the seed fixes the scenario and the
per-receiver noise streams, so repeating a sweep with the same master
seed reproduces results exactly and different SNR levels share paired
scenarios and noise realizations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.optimize import linear_sum_assignment

from cotans.decoder import decode_bei, estimate_count
from cotans.delays import DelayEstimates, sage_delays, strip_los
from cotans.geometry import Boundary, Scenario, mirror_point, nlos_distance, wrap_angle
from cotans.imaging import GridSpec, build_cotans, render_bei, write_image
from cotans.lsbase import LabeledEchoSet, LsSolverError, ls_boundaries
from cotans.sampler import SamplerConfig, sample_scenario
from cotans.signals import PulseSpec, render_received, synth_pulse

METHODS = ("cotans-classical", "cotans-nn", "ls")
DEFAULT_SNRS = tuple(float(s) for s in range(13, 22))


@dataclass
class ExperimentConfig:
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    grid: GridSpec = field(default_factory=GridSpec)
    pulse: PulseSpec = field(default_factory=PulseSpec)
    n_paths: int = 3  # LOS + n_max echoes per receiver
    sage_max_iters: int = 20
    decode_threshold: float = 0.5
    decode_window: int = 11
    snr_list: tuple[float, ...] = DEFAULT_SNRS
    trials_per_snr: int = 200
    master_seed: int = 0


@dataclass
class TrialRecord:
    seed: int
    snr_db: float
    method: str
    n_true: int
    n_est: int
    true_boundaries: list[Boundary]
    est_boundaries: list[Boundary]
    # matched: (truth index, estimate index, rho error m, wrapped theta error deg)
    matched: list[tuple[int, int, float, float]]
    diagnostics: dict = field(default_factory=dict)

    @property
    def n_missed(self) -> int:
        return self.n_true - len(self.matched)


@dataclass
class SweepResult:
    rows: list[dict]  # one row per (method, snr)

    def to_csv(self) -> str:
        cols = [
            "method", "snr_db", "n_trials", "rho_rmse_m", "theta_rmse_deg",
            "count_accuracy", "miss_rate", "n_solver_failures",
        ]
        lines = [",".join(cols)]
        for row in self.rows:
            lines.append(",".join(_fmt(row[c]) for c in cols))
        return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if isinstance(v, float):
        return "nan" if math.isnan(v) else f"{v:.9g}"
    return str(v)


def trial_seed(master_seed: int, trial_id: int) -> int:
    """Trial seed shared across SNR levels so per-trial comparisons are paired."""
    return int(np.random.SeedSequence((master_seed, trial_id)).generate_state(1)[0])


def estimate_nlos_delays(
    scenario: Scenario,
    cfg: ExperimentConfig,
    snr_db: float,
    noise_seeds: list,
    pulse: np.ndarray,
) -> list[DelayEstimates]:
    """SAGE front-end per receiver with the direct-path estimate stripped."""
    out = []
    for i in range(scenario.n_receivers):
        sig = render_received(scenario, cfg.pulse, i, snr_db, noise_seeds[i], pulse)
        est = sage_delays(sig, pulse, cfg.n_paths, max_iters=cfg.sage_max_iters)
        out.append(strip_los(est, scenario, i))
    return out


def match_estimates(
    truth: list[Boundary], est: list[Boundary], rho_max: float = 10.0
) -> list[tuple[int, int, float, float]]:
    """Minimum-cost bipartite matching of estimates to ground truth.

    Cost per pair is (d_rho / rho_max)^2 + (d_theta_wrapped / 180 deg)^2.
    Returns (truth index, estimate index, rho error, theta error in degrees)
    for each matched pair; unmatched truths are misses.
    """
    if not truth or not est:
        return []
    cost = np.zeros((len(truth), len(est)))
    d_rho = np.zeros_like(cost)
    d_theta = np.zeros_like(cost)
    for j, t in enumerate(truth):
        for k, e in enumerate(est):
            d_rho[j, k] = t.rho - e.rho
            d_theta[j, k] = math.degrees(wrap_angle(t.theta - e.theta))
            cost[j, k] = (d_rho[j, k] / rho_max) ** 2 + (d_theta[j, k] / 180.0) ** 2
    rows, cols = linear_sum_assignment(cost)
    return [
        (int(j), int(k), float(d_rho[j, k]), float(d_theta[j, k]))
        for j, k in zip(rows, cols)
    ]


def _oracle_labeled_echoes(
    scenario: Scenario, nlos: list[DelayEstimates]
) -> list[LabeledEchoSet]:
    """Assign each NLOS estimate to the boundary with the nearest true delay."""
    c = scenario.sound_speed
    per_boundary: dict[int, dict[int, float]] = {
        j: {} for j in range(scenario.n_boundaries)
    }
    for est in nlos:
        i = est.receiver_index
        true_delays = [
            nlos_distance(scenario.emitter, scenario.receivers[i], b) / c
            for b in scenario.boundaries
        ]
        for tau in est.taus:
            if tau <= 0:
                continue
            j = int(np.argmin([abs(tau - td) for td in true_delays]))
            err = abs(tau - true_delays[j])
            prev = per_boundary[j].get(i)
            if prev is None or err < abs(prev / c - true_delays[j]):
                per_boundary[j][i] = c * tau
    sets = []
    for j, dists in per_boundary.items():
        if len(dists) >= 3:
            sets.append(LabeledEchoSet(
                boundary_index=j, distances=sorted(dists.items())
            ))
    return sets


def run_trial(
    cfg: ExperimentConfig,
    snr_db: float,
    seed: int,
    method: str,
    predictor: Callable[[np.ndarray], np.ndarray] | None = None,
) -> TrialRecord:
    """Simulate one scenario and evaluate one estimation method on it."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    ss = np.random.SeedSequence(seed)
    scenario_seed, *noise_seeds = ss.spawn(1 + cfg.sampler.n_receivers)
    scenario = sample_scenario(cfg.sampler, np.random.default_rng(scenario_seed))
    pulse = synth_pulse(cfg.pulse)
    diagnostics: dict = {"solver_failures": 0, "skipped_curves": 0}

    nlos = estimate_nlos_delays(scenario, cfg, snr_db, noise_seeds, pulse)

    if method == "ls":
        est_boundaries = []
        echo_sets = _oracle_labeled_echoes(scenario, nlos)
        for echoes in echo_sets:
            try:
                est_boundaries += ls_boundaries(scenario, echo_sets=[echoes])
            except LsSolverError:
                diagnostics["solver_failures"] += 1
        n_est = scenario.n_boundaries  # count is an input to LS, not an output
    else:
        img = build_cotans(
            scenario.emitter, scenario.receivers, scenario.sound_speed,
            [d.taus for d in nlos], cfg.grid,
        )
        diagnostics["skipped_curves"] = img.n_skipped
        values = img.values
        if method == "cotans-nn":
            if predictor is None:
                raise ValueError("cotans-nn requires a predictor")
            values = predictor(values)
        detections = decode_bei(
            values, cfg.grid, n_max=cfg.sampler.n_max,
            threshold=cfg.decode_threshold, window=cfg.decode_window,
        )
        est_boundaries = [d.boundary for d in detections]
        n_est = estimate_count(detections)

    matched = match_estimates(
        scenario.boundaries, est_boundaries, rho_max=cfg.grid.rho_max
    )
    return TrialRecord(
        seed=seed,
        snr_db=snr_db,
        method=method,
        n_true=scenario.n_boundaries,
        n_est=n_est,
        true_boundaries=list(scenario.boundaries),
        est_boundaries=est_boundaries,
        matched=matched,
        diagnostics=diagnostics,
    )


def rmse_eval(records: list[TrialRecord]) -> tuple[float, float]:
    """(rho RMSE in m, theta RMSE in deg) over all matched pairs in the records."""
    rho_sq = [d_rho ** 2 for rec in records for _, _, d_rho, _ in rec.matched]
    theta_sq = [d_th ** 2 for rec in records for _, _, _, d_th in rec.matched]
    if not rho_sq:
        raise ValueError("no matched pairs in the given records")
    return (
        math.sqrt(sum(rho_sq) / len(rho_sq)),
        math.sqrt(sum(theta_sq) / len(theta_sq)),
    )


def count_accuracy(records: list[TrialRecord]) -> float:
    """Fraction of trials with the boundary count estimated exactly."""
    if not records:
        return 0.0
    return sum(r.n_est == r.n_true for r in records) / len(records)


def run_sweep(
    cfg: ExperimentConfig,
    methods: list[str],
    predictor: Callable[[np.ndarray], np.ndarray] | None = None,
    per_trial_hook: Callable[[TrialRecord], None] | None = None,
) -> SweepResult:
    """Methods x SNRs Monte-Carlo sweep with paired per-trial seeds."""
    rows = []
    for method in methods:
        for snr_db in cfg.snr_list:
            records = []
            for t in range(cfg.trials_per_snr):
                rec = run_trial(
                    cfg, snr_db, trial_seed(cfg.master_seed, t), method,
                    predictor=predictor,
                )
                records.append(rec)
                if per_trial_hook is not None:
                    per_trial_hook(rec)
            try:
                rho_rmse, theta_rmse = rmse_eval(records)
            except ValueError:
                rho_rmse = theta_rmse = float("nan")
            n_truth = sum(r.n_true for r in records)
            n_miss = sum(r.n_missed for r in records)
            rows.append({
                "method": method,
                "snr_db": snr_db,
                "n_trials": len(records),
                "rho_rmse_m": rho_rmse,
                "theta_rmse_deg": theta_rmse,
                "count_accuracy": count_accuracy(records),
                "miss_rate": n_miss / n_truth if n_truth else 0.0,
                "n_solver_failures": sum(
                    r.diagnostics.get("solver_failures", 0) for r in records
                ),
            })
    return SweepResult(rows=rows)


# ---------------------------------------------------------------------------
# dataset export


def _boundary_csv(boundaries: list[Boundary]) -> tuple[str, str]:
    rho = ":".join(f"{b.rho:.9g}" for b in boundaries)
    theta = ":".join(f"{b.theta:.9g}" for b in boundaries)
    return rho, theta


def export_dataset(
    cfg: ExperimentConfig,
    out_dir: str | Path,
    counts: dict[str, int],
    snr_list: tuple[float, ...] | None = None,
    master_seed: int | None = None,
) -> Path:
    """Write paired accumulator/target images plus a manifest; returns manifest path.

    Layout: <split>/<snr_db>/<trial_id>.cotans.f32 and .bei.f32, raw
    little-endian float32, rho rows x theta columns.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    snrs = tuple(snr_list) if snr_list is not None else cfg.snr_list
    seed0 = cfg.master_seed if master_seed is None else master_seed
    grid, pulse = cfg.grid, synth_pulse(cfg.pulse)
    lines = [
        "format=f32_le_rowmajor",
        f"rho_max={grid.rho_max:.9g}",
        f"n_rho={grid.n_rho}",
        f"n_theta={grid.n_theta}",
        f"n_receivers={cfg.sampler.n_receivers}",
        f"sample_rate={cfg.pulse.sample_rate:.9g}",
        f"seed={seed0}",
        "snr_list=" + ",".join(f"{s:g}" for s in snrs),
        "splits=" + ",".join(counts),
    ]
    lines += [f"count_{split}={n}" for split, n in counts.items()]
    for split_idx, (split, count) in enumerate(counts.items()):
        for snr_idx, snr_db in enumerate(snrs):
            subdir = out_dir / split / f"{snr_db:g}"
            subdir.mkdir(parents=True, exist_ok=True)
            for t in range(count):
                seed = int(np.random.SeedSequence(
                    (seed0, split_idx, snr_idx, t)
                ).generate_state(1)[0])
                ss = np.random.SeedSequence(seed)
                scenario_seed, *noise_seeds = ss.spawn(1 + cfg.sampler.n_receivers)
                scenario = sample_scenario(
                    cfg.sampler, np.random.default_rng(scenario_seed)
                )
                nlos = estimate_nlos_delays(scenario, cfg, snr_db, noise_seeds, pulse)
                img = build_cotans(
                    scenario.emitter, scenario.receivers, scenario.sound_speed,
                    [d.taus for d in nlos], grid,
                )
                bei = render_bei(scenario.boundaries, grid)
                rel_c = f"{split}/{snr_db:g}/{t}.cotans.f32"
                rel_b = f"{split}/{snr_db:g}/{t}.bei.f32"
                write_image(out_dir / rel_c, img.values)
                write_image(out_dir / rel_b, bei.values)
                rho_csv, theta_csv = _boundary_csv(scenario.boundaries)
                lines.append(
                    f"pair={rel_c};{rel_b};snr_db={snr_db:g};seed={seed};"
                    f"n={scenario.n_boundaries};rho={rho_csv};theta={theta_csv}"
                )
    manifest = out_dir / "manifest.txt"
    manifest.write_text("\n".join(lines) + "\n")
    return manifest


@dataclass
class ManifestPair:
    cotans_path: str
    bei_path: str
    snr_db: float
    seed: int
    boundaries: list[Boundary]


@dataclass
class Manifest:
    grid: GridSpec
    meta: dict[str, str]
    pairs: list[ManifestPair]


def read_manifest(path: str | Path) -> Manifest:
    meta: dict[str, str] = {}
    pairs: list[ManifestPair] = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        if key != "pair":
            meta[key] = value
            continue
        fields = value.split(";")
        kv = dict(f.split("=", 1) for f in fields[2:])
        rho = [float(x) for x in kv["rho"].split(":") if x]
        theta = [float(x) for x in kv["theta"].split(":") if x]
        pairs.append(ManifestPair(
            cotans_path=fields[0],
            bei_path=fields[1],
            snr_db=float(kv["snr_db"]),
            seed=int(kv["seed"]),
            boundaries=[Boundary(r, t) for r, t in zip(rho, theta)],
        ))
    grid = GridSpec(
        rho_max=float(meta["rho_max"]),
        n_rho=int(meta["n_rho"]),
        n_theta=int(meta["n_theta"]),
    )
    return Manifest(grid=grid, meta=meta, pairs=pairs)
