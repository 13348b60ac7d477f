"""Tag-side downlink demodulator.

envelope -> hysteresis trigger -> inverted clock -> integrator reset on
each symbol boundary -> discriminator against the pivot.

Edge polarity follows the differentiated clock: a positive step (clock
rises, trigger falls) is the start of a symbol's low pulse; a negative
step (clock falls, trigger rises) is the boundary between two symbols.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import signal

from .errors import ParameterError, SyncLossError
from .params import LinkParams
from .pie import PW_FRACTION, PreambleSpec, parse_header
from .reader_modem import ModulationConfig, detect_envelope
from .waveform import Waveform

HYSTERESIS_HI = 0.6
HYSTERESIS_LO = 0.4
PEAK_DECAY_TARIS = 10.0


@dataclass(frozen=True, eq=False)
class TriggerOutput:
    levels: np.ndarray
    hysteresis_hi: float
    hysteresis_lo: float


@dataclass(frozen=True, eq=False)
class ClockTaps:
    clock: np.ndarray
    diff_clock: np.ndarray
    boundary_edges: np.ndarray  # trigger rising
    pulse_edges: np.ndarray     # trigger falling


@dataclass(frozen=True, eq=False)
class ClockAndData:
    clock_edges: np.ndarray
    bits: list[int]
    interval_durations: np.ndarray
    high_durations: np.ndarray = field(default_factory=lambda: np.zeros(0))
    header: PreambleSpec | None = None
    pivot: float = 0.0
    taps: dict = field(default_factory=dict)


def front_end_filter(wave: Waveform, carrier_freq: float, half_bandwidth: float,
                     order: int = 2) -> Waveform:
    """Zero-phase Butterworth band-pass of +/- ``half_bandwidth`` around the carrier.

    Stands in for the antenna/matching network: without it, wideband noise
    is rectified by the envelope detector into a level-dependent bias.

    Implemented as its low-pass equivalent at complex baseband. Frames
    start and end on unmodulated carrier, which is flat there, so the
    even-extension padding of the zero-phase pass adds no end transient.
    """
    fs = wave.sample_rate
    lo, hi = carrier_freq - half_bandwidth, carrier_freq + half_bandwidth
    if not 0 < lo < hi < fs / 2:
        raise ParameterError(f"front-end band {lo:g}..{hi:g} Hz outside (0, fs/2)")
    n = wave.samples.size
    lo_phase = np.exp(-2j * np.pi * carrier_freq / fs * np.arange(n))
    sos = signal.butter(order, half_bandwidth, fs=fs, output="sos")
    pad = min(n - 1, int(10 * fs / (2 * np.pi * half_bandwidth)))
    bb = signal.sosfiltfilt(sos, 2 * wave.samples * lo_phase, padtype="even", padlen=pad)
    return Waveform(np.real(bb * np.conj(lo_phase)), fs)


def track_peak(envelope, decay_samples: float | None) -> np.ndarray:
    """Running maximum that decays by e every ``decay_samples``.

    ``decay_samples=None`` returns the global maximum everywhere.
    """
    env = np.asarray(envelope, dtype=float)
    if decay_samples is None:
        return np.full(env.shape, env.max() if env.size else 0.0)
    # peak[n] = max_k env[k] * exp(-(n-k)/tau), evaluated in the log domain
    tiny = np.finfo(float).tiny
    n = np.arange(env.size)
    log_env = np.log(np.maximum(env, tiny))
    return np.exp(np.maximum.accumulate(log_env + n / decay_samples) - n / decay_samples)


def _drop_glitches(levels: np.ndarray, min_dwell: int) -> np.ndarray:
    """Remove pairs of transitions closer together than ``min_dwell`` samples."""
    edges = list(np.flatnonzero(np.diff(levels)) + 1)
    kept = []
    for e in edges:
        if kept and e - kept[-1] < min_dwell:
            kept.pop()
        else:
            kept.append(e)
    out = np.full(levels.shape, levels[0])
    for e in kept:
        out[e:] = 1 - out[e - 1]
    return out


def trigger(envelope, hysteresis_hi: float = HYSTERESIS_HI,
            hysteresis_lo: float = HYSTERESIS_LO, *, peak_decay: float | None = None,
            min_dwell: int = 0) -> TriggerOutput:
    """Schmitt trigger on the envelope, thresholds relative to its tracked peak.

    Goes high when ``envelope > hysteresis_hi * peak`` and low when
    ``envelope < hysteresis_lo * peak``; holds its state in between.
    """
    if not 0 < hysteresis_lo < hysteresis_hi < 1:
        raise ParameterError("need 0 < hysteresis_lo < hysteresis_hi < 1")
    env = np.asarray(envelope, dtype=float)
    if env.size == 0 or not np.any(env > 0):
        return TriggerOutput(np.zeros(env.size, dtype=int), hysteresis_hi, hysteresis_lo)
    peak = track_peak(env, peak_decay)
    events = np.full(env.size, -1)
    events[env > hysteresis_hi * peak] = 1
    events[env < hysteresis_lo * peak] = 0
    if events[0] < 0:
        events[0] = int(env[0] > 0.5 * (hysteresis_hi + hysteresis_lo) * peak[0])
    last = np.maximum.accumulate(np.where(events >= 0, np.arange(env.size), 0))
    levels = events[last]
    if min_dwell > 1:
        levels = _drop_glitches(levels, min_dwell)
    return TriggerOutput(levels.astype(int), hysteresis_hi, hysteresis_lo)


def extract_clock(trig: TriggerOutput, sample_rate: float | None = None) -> ClockTaps:
    """Invert the trigger to get the clock and split its edges by polarity."""
    clock = 1 - np.asarray(trig.levels, dtype=int)
    diff = np.diff(clock, prepend=clock[:1])
    pulse = np.flatnonzero(diff > 0)
    boundary = np.flatnonzero(diff < 0)
    if pulse.size == 0 and boundary.size == 0:
        raise SyncLossError("trigger output has no edges")
    return ClockTaps(clock, diff, boundary, pulse)


def integrate(levels, resets) -> tuple[np.ndarray, np.ndarray]:
    """Integrator dumped and reset at each index in ``resets``.

    Returns, per interval, the elapsed sample count and the trigger-high
    sample count.
    """
    resets = np.asarray(resets, dtype=int)
    if resets.size < 2:
        return np.zeros(0, dtype=int), np.zeros(0, dtype=int)
    csum = np.concatenate([[0], np.cumsum(np.asarray(levels, dtype=int))])
    return np.diff(resets), np.diff(csum[resets])


def discriminate(intervals, pivot: float) -> list[int]:
    """Bit 0 if the interval is shorter than ``pivot``, otherwise bit 1."""
    if pivot <= 0:
        raise ParameterError("pivot must be positive")
    return [0 if d < pivot else 1 for d in intervals]


def demodulate_downlink(wave: Waveform, params: LinkParams, config: ModulationConfig, *,
                        pivot: float | None = None, pw: float | None = None,
                        smoothing_cutoff: float | None = None,
                        front_end_bandwidth: float | None = None,
                        hysteresis: tuple[float, float] = (HYSTERESIS_HI, HYSTERESIS_LO),
                        ) -> ClockAndData:
    """Run the full tag demodulator on a received reader transmission.

    ``front_end_bandwidth`` (default 6/Tari, 0 disables) sets the
    half-bandwidth of the band-pass ahead of the envelope detector.

    The pivot is learned from the RTcal field when the header is a full
    preamble; after a frame-sync the caller's ``pivot`` (or RTcal/2 from
    ``params``) is used, since only a Query can change it.
    """
    params.check()
    fs = wave.sample_rate
    pw = PW_FRACTION * params.tari if pw is None else pw
    cutoff = 6 / params.tari if smoothing_cutoff is None else smoothing_cutoff
    band = 6 / params.tari if front_end_bandwidth is None else front_end_bandwidth

    rx = front_end_filter(wave, config.carrier_freq, band) if band > 0 else wave
    env = detect_envelope(rx, config.hilbert_taps, cutoff)
    trig = trigger(env, *hysteresis, peak_decay=PEAK_DECAY_TARIS * params.tari * fs,
                   min_dwell=int(0.1 * pw * fs))
    clk = extract_clock(trig, fs)
    header, offset = parse_header(trig.levels, fs)
    if not header.is_frame_sync:
        pivot = header.rtcal / 2
    elif pivot is None:
        pivot = params.rtcal / 2

    resets = clk.boundary_edges[clk.boundary_edges > offset]
    if trig.levels[-1] == 0:
        resets = np.concatenate([resets, [len(trig.levels)]])
    resets = np.concatenate([[offset], resets])
    elapsed, high = integrate(trig.levels, resets)
    durations = elapsed / fs
    bits = discriminate(durations, pivot)
    taps = {
        "envelope": env,
        "trigger": trig.levels.astype(float),
        "clock": clk.clock.astype(float),
        "diff_clock": clk.diff_clock.astype(float),
    }
    return ClockAndData(resets, bits, durations, high / fs, header, pivot, taps)
