"""Multipath arrival-time estimation: matched filter and SAGE refinement.

Both estimators return unlabeled delays.  SAGE cycles over paths,
re-estimating each one against the residual of all the others, which
keeps overlapping arrivals from collapsing onto a single pulse copy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from cotans.geometry import Scenario
from cotans.signals import ReceivedSignal, delayed_pulse


@dataclass
class DelayEstimates:
    receiver_index: int
    taus: list[float]
    amplitudes: list[float]
    converged: bool = True
    n_cycles: int = 0
    residual_energies: list[float] = field(default_factory=list)


def _xcorr(signal: np.ndarray, pulse: np.ndarray) -> np.ndarray:
    """Cross-correlation indexed by lag in samples (lag 0 = pulse at signal start)."""
    return np.correlate(signal, pulse, mode="full")[pulse.size - 1:]


def _refine_peak(corr: np.ndarray, lag: int) -> float:
    """3-point parabolic interpolation around an integer-lag peak."""
    if lag <= 0 or lag >= corr.size - 1:
        return float(lag)
    sign = 1.0 if corr[lag] >= 0 else -1.0
    y0, y1, y2 = sign * corr[lag - 1], sign * corr[lag], sign * corr[lag + 1]
    denom = y0 - 2.0 * y1 + y2
    if denom == 0:
        return float(lag)
    delta = 0.5 * (y0 - y2) / denom
    return lag + float(np.clip(delta, -1.0, 1.0))


def mf_delays(
    signal: ReceivedSignal,
    pulse: np.ndarray,
    n_paths: int,
    min_sep: float,
) -> DelayEstimates:
    """Iterative matched-filter peak picking with sub-sample refinement.

    min_sep (seconds) excludes a band around each accepted peak so one
    arrival cannot be picked twice.
    """
    if signal.samples.size < pulse.size:
        raise ValueError("signal shorter than the pulse")
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    fs = signal.sample_rate
    sep = max(int(round(min_sep * fs)), 1)
    corr = _xcorr(signal.samples, pulse)
    mag = np.abs(corr)
    picks = []
    for _ in range(n_paths):
        lag = int(np.argmax(mag))
        if mag[lag] == 0:
            break
        refined = _refine_peak(corr, lag)
        picks.append((refined / fs, float(corr[lag])))
        mag[max(lag - sep, 0):lag + sep + 1] = 0.0
    picks.sort()
    return DelayEstimates(
        receiver_index=-1,
        taus=[t for t, _ in picks],
        amplitudes=[a for _, a in picks],
    )


def sage_delays(
    signal: ReceivedSignal,
    pulse: np.ndarray,
    n_paths: int,
    max_iters: int = 20,
    tol: float | None = None,
) -> DelayEstimates:
    """SAGE delay/amplitude estimation for potentially overlapping arrivals.

    Initialization is successive interference cancellation; each cycle
    re-estimates every path on the residual of the others and a candidate
    update is accepted only if it does not increase the residual energy.
    tol (seconds) defaults to 0.05 sample.
    """
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    y = signal.samples
    fs = signal.sample_rate
    if tol is None:
        tol = 0.05 / fs
    pulse_energy = float(pulse @ pulse)

    def template(tau_samples: float) -> np.ndarray:
        return delayed_pulse(pulse, tau_samples, y.size)

    def fit(x: np.ndarray) -> tuple[float, float, np.ndarray]:
        """Best (tau_samples, amplitude, template) for a single path on x.

        Coarse matched-filter peak plus parabolic interpolation, then a
        golden-section polish of |<x, template(tau)>| so the M-step is the
        continuous-delay maximizer, not the 3-point approximation.
        """
        corr = _xcorr(x, pulse)
        lag = int(np.argmax(np.abs(corr)))
        tau_s = _refine_peak(corr, lag)

        def score(ts: float) -> float:
            # concentrated likelihood: projection energy with the amplitude
            # profiled out (template energy varies slightly with the
            # fractional shift, so the raw dot product is biased)
            t = template(ts)
            return float(x @ t) ** 2 / float(t @ t)

        phi = 0.6180339887498949
        a_lo, a_hi = tau_s - 0.5, tau_s + 0.5
        c1 = a_hi - phi * (a_hi - a_lo)
        c2 = a_lo + phi * (a_hi - a_lo)
        f1, f2 = score(c1), score(c2)
        for _ in range(25):
            if f1 > f2:
                a_hi, c2, f2 = c2, c1, f1
                c1 = a_hi - phi * (a_hi - a_lo)
                f1 = score(c1)
            else:
                a_lo, c1, f1 = c1, c2, f2
                c2 = a_lo + phi * (a_hi - a_lo)
                f2 = score(c2)
        tau_s = c1 if f1 > f2 else c2
        t = template(tau_s)
        a = float(x @ t) / pulse_energy
        return tau_s, a, t

    # successive interference cancellation
    taus, amps, templates = [], [], []
    resid = y.copy()
    for _ in range(n_paths):
        tau_s, a, t = fit(resid)
        taus.append(tau_s)
        amps.append(a)
        templates.append(t)
        resid = resid - a * t

    energies = [float(resid @ resid)]
    converged = False
    cycle = 0
    for cycle in range(1, max_iters + 1):
        max_shift = 0.0
        for l in range(n_paths):
            x_l = resid + amps[l] * templates[l]
            old_energy = float(resid @ resid)
            tau_s, a, t = fit(x_l)
            new_resid = x_l - a * t
            new_energy = float(new_resid @ new_resid)
            if new_energy <= old_energy:
                max_shift = max(max_shift, abs(tau_s - taus[l]))
                taus[l], amps[l], templates[l] = tau_s, a, t
                resid = new_resid
        energies.append(float(resid @ resid))
        if max_shift < tol * fs:
            converged = True
            break

    order = np.argsort(taus)
    return DelayEstimates(
        receiver_index=-1,
        taus=[taus[i] / fs for i in order],
        amplitudes=[amps[i] for i in order],
        converged=converged,
        n_cycles=cycle,
        residual_energies=energies,
    )


def strip_los(
    est: DelayEstimates, scenario: Scenario, receiver_index: int
) -> DelayEstimates:
    """Drop the estimate nearest the predicted direct-path delay."""
    if not est.taus:
        raise ValueError("no delay estimates to strip")
    predicted = scenario.emitter.dist(scenario.receivers[receiver_index])
    predicted /= scenario.sound_speed
    i = int(np.argmin([abs(t - predicted) for t in est.taus]))
    return DelayEstimates(
        receiver_index=receiver_index,
        taus=est.taus[:i] + est.taus[i + 1:],
        amplitudes=est.amplitudes[:i] + est.amplitudes[i + 1:],
        converged=est.converged,
        n_cycles=est.n_cycles,
    )
