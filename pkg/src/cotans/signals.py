"""Pulse synthesis and received-signal rendering with AWGN at a target SNR.

The probe waveform is a Hann-windowed linear chirp scaled to unit energy,
so the received energy per unit-amplitude arrival is E_r = 1 and the SNR
E_r / N0 maps to a per-sample noise variance of N0 / 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from cotans.geometry import Scenario, nlos_distance

SINC_TAPS = 8


@dataclass(frozen=True)
class PulseSpec:
    sample_rate: float = 100_000.0
    duration: float = 0.002
    band_lo: float = 5_000.0
    band_hi: float = 20_000.0

    def __post_init__(self):
        if not (0 < self.band_lo < self.band_hi < self.sample_rate / 2):
            raise ValueError(
                f"need 0 < band_lo < band_hi < fs/2, got "
                f"({self.band_lo}, {self.band_hi}, fs={self.sample_rate})"
            )
        if self.duration * self.sample_rate < 16:
            raise ValueError("pulse must span at least 16 samples")

    @property
    def n_samples(self) -> int:
        return int(round(self.duration * self.sample_rate))


@dataclass(frozen=True)
class ChannelTap:
    delay: float
    amplitude: float = 1.0

    def __post_init__(self):
        if self.delay < 0:
            raise ValueError("tap delay must be >= 0")


@dataclass
class ReceivedSignal:
    samples: np.ndarray
    sample_rate: float
    snr_db: float


def synth_pulse(spec: PulseSpec) -> np.ndarray:
    """Hann-windowed linear chirp band_lo -> band_hi, unit energy."""
    n = spec.n_samples
    t = np.arange(n) / spec.sample_rate
    sweep_rate = (spec.band_hi - spec.band_lo) / spec.duration
    phase = 2.0 * math.pi * (spec.band_lo * t + 0.5 * sweep_rate * t * t)
    s = np.hanning(n) * np.sin(phase)
    return s / math.sqrt(float(s @ s))


def frac_delay_kernel(frac: float, n_taps: int = SINC_TAPS) -> tuple[np.ndarray, int]:
    """Windowed-sinc interpolation kernel for a sub-sample shift frac in [0, 1).

    Returns (kernel, offset) such that convolving a signal with the kernel
    and placing the result offset samples earlier delays it by frac samples.
    """
    half = n_taps // 2
    k = np.arange(n_taps) - (half - 1)
    x = k - frac
    w = np.where(np.abs(x) < half, 0.5 * (1.0 + np.cos(np.pi * x / half)), 0.0)
    return np.sinc(x) * w, half - 1


def delayed_pulse(pulse: np.ndarray, delay_samples: float, length: int) -> np.ndarray:
    """Pulse shifted by a (fractional) number of samples into a buffer of length."""
    out = np.zeros(length)
    n0 = math.floor(delay_samples)
    frac = delay_samples - n0
    kern, offset = frac_delay_kernel(frac)
    shifted = np.convolve(pulse, kern)
    start = n0 - offset
    lo, hi = max(start, 0), min(start + shifted.size, length)
    if lo < hi:
        out[lo:hi] = shifted[lo - start:hi - start]
    return out


def channel_taps(scenario: Scenario, receiver_index: int) -> list[ChannelTap]:
    """LOS tap plus one first-order echo tap per boundary, sorted by delay."""
    e = scenario.emitter
    r = scenario.receivers[receiver_index]
    c = scenario.sound_speed
    taps = [ChannelTap(e.dist(r) / c)]
    taps += [ChannelTap(nlos_distance(e, r, b) / c) for b in scenario.boundaries]
    return sorted(taps, key=lambda t: t.delay)


def noise_sigma(snr_db: float) -> float:
    """Per-sample noise std for unit received pulse energy: sqrt(N0 / 2)."""
    n0 = 10.0 ** (-snr_db / 10.0)
    return math.sqrt(n0 / 2.0)


def render_received(
    scenario: Scenario,
    spec: PulseSpec,
    receiver_index: int,
    snr_db: float,
    seed: int,
    pulse: np.ndarray | None = None,
) -> ReceivedSignal:
    """Sum of delayed pulse copies plus white Gaussian noise; snr_db=inf disables noise."""
    if pulse is None:
        pulse = synth_pulse(spec)
    taps = channel_taps(scenario, receiver_index)
    fs = spec.sample_rate
    max_delay = taps[-1].delay
    length = int(math.ceil((max_delay * fs + pulse.size) * 1.1))
    sig = np.zeros(length)
    for tap in taps:
        sig += tap.amplitude * delayed_pulse(pulse, tap.delay * fs, length)
    if np.isfinite(snr_db):
        rng = np.random.default_rng(seed)
        sig = sig + rng.normal(0.0, noise_sigma(snr_db), length)
    return ReceivedSignal(samples=sig, sample_rate=fs, snr_db=snr_db)


def mainlobe_width(pulse: np.ndarray, sample_rate: float) -> float:
    """-3 dB full width of the autocorrelation envelope main lobe, in seconds.

    The envelope (analytic-signal magnitude) is used because the raw
    autocorrelation oscillates at the band center frequency.
    """
    from scipy.signal import hilbert

    env = np.abs(hilbert(np.correlate(pulse, pulse, mode="full")))
    peak = int(np.argmax(env))
    level = env[peak] / math.sqrt(2.0)
    # main lobe only: contiguous run containing the peak
    lo = hi = peak
    while lo - 1 >= 0 and env[lo - 1] >= level:
        lo -= 1
    while hi + 1 < env.size and env[hi + 1] >= level:
        hi += 1
    return (hi - lo + 1) / sample_rate


def dump_waveform(sig: ReceivedSignal, path: str | Path) -> None:
    """Raw little-endian float32 dump with a sidecar text header."""
    path = Path(path)
    path.write_bytes(sig.samples.astype("<f4").tobytes())
    header = path.with_suffix(path.suffix + ".hdr")
    header.write_text(
        f"sample_rate={sig.sample_rate}\nlength={sig.samples.size}\n"
        f"snr_db={sig.snr_db}\nformat=float32_le\n"
    )
