"""Uplink RF path: reader CW, tag ASK backscatter, reader mixer + low-pass.

Two equivalent time bases are supported. The full-RF configuration uses
an 896 MHz carrier sampled at 5x. ``BackscatterConfig.scaled`` divides
every frequency by the same factor, which leaves the discrete-time
samples unchanged while keeping the numbers small.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy import signal

from .errors import ParameterError
from .params import LinkParams, uplink_320k
from .uplink import UplinkSymbolStream, decode_stream, render, samples_per_symbol
from .waveform import Waveform

CW_FREQ = 896e6
UPLINK_RATE = 320e3


@dataclass(frozen=True)
class BackscatterConfig:
    cw_freq: float = CW_FREQ
    sample_rate: float = 5 * CW_FREQ
    tag_mod: str = "ASK"
    ask_depth: float = 1.0
    lpf_order: int = 1
    lpf_cutoff: float | None = None
    uplink_rate: float = UPLINK_RATE
    lo_phase_deg: float = 0.0

    @classmethod
    def scaled(cls, cw_freq: float = 1e6, **kw) -> "BackscatterConfig":
        """Every frequency divided by ``CW_FREQ / cw_freq``."""
        base = cls(**kw)
        k = cw_freq / base.cw_freq
        cutoff = None if base.lpf_cutoff is None else base.lpf_cutoff * k
        return replace(base, cw_freq=cw_freq, sample_rate=base.sample_rate * k,
                       uplink_rate=base.uplink_rate * k, lpf_cutoff=cutoff)

    @property
    def time_scale(self) -> float:
        """Ratio of simulated to physical frequencies (1.0 at full RF)."""
        return self.cw_freq / CW_FREQ

    @property
    def cutoff(self) -> float:
        return 2 * self.uplink_rate if self.lpf_cutoff is None else self.lpf_cutoff

    @property
    def samples_per_symbol(self) -> int:
        return samples_per_symbol(self.sample_rate, self.uplink_rate)

    def check(self) -> "BackscatterConfig":
        bad = []
        if self.sample_rate < 4 * self.cw_freq:
            bad.append("sample rate below 4 x CW frequency")
        if not 0 < self.ask_depth <= 1:
            bad.append(f"ASK depth {self.ask_depth} outside (0, 1]")
        if self.tag_mod.upper() != "ASK":
            bad.append(f"tag modulation {self.tag_mod!r} unsupported (ASK only)")
        if self.lpf_order < 1:
            bad.append("LPF order must be >= 1")
        if not 0 < self.cutoff < self.sample_rate / 2:
            bad.append("LPF cutoff outside (0, fs/2)")
        if bad:
            raise ParameterError("; ".join(bad))
        return self


def generate_cw(config: BackscatterConfig, duration: float, phase: float = 0.0) -> Waveform:
    """Unit-amplitude sine at ``cw_freq``; ``phase`` in radians."""
    config.check()
    if duration <= 0:
        raise ParameterError("duration must be positive")
    n = int(round(duration * config.sample_rate))
    k = np.arange(n)
    return Waveform(np.sin(2 * np.pi * config.cw_freq / config.sample_rate * k + phase),
                    config.sample_rate)


def ask_amplitude(stream: UplinkSymbolStream, config: BackscatterConfig) -> np.ndarray:
    """Reflection amplitude per sample: 1 for +a, 1 - depth for -a."""
    levels = render(stream, config.samples_per_symbol)
    return np.where(levels > 0, 1.0, 1.0 - config.ask_depth)


def backscatter(cw: Waveform, stream: UplinkSymbolStream,
                config: BackscatterConfig) -> Waveform:
    """Amplitude-modulate the CW with the tag's encoded stream.

    Samples after the end of the stream are reflected unmodulated.
    """
    config.check()
    if not np.isclose(cw.sample_rate, config.sample_rate, rtol=1e-12):
        raise ParameterError("CW and backscatter sample rates differ")
    amp = ask_amplitude(stream, config)
    if amp.size > cw.samples.size:
        raise ParameterError("encoded stream is longer than the CW")
    gain = np.ones(cw.samples.size)
    gain[: amp.size] = amp
    return Waveform(cw.samples * gain, cw.sample_rate)


def lowpass(x, config: BackscatterConfig) -> np.ndarray:
    b, a = signal.butter(config.lpf_order, config.cutoff, fs=config.sample_rate)
    return signal.lfilter(b, a, x)


def mix(received: Waveform, config: BackscatterConfig) -> np.ndarray:
    """Product with the local CW replica (offset by ``lo_phase_deg``)."""
    k = np.arange(received.samples.size)
    lo = np.sin(2 * np.pi * config.cw_freq / config.sample_rate * k
                + np.deg2rad(config.lo_phase_deg))
    return received.samples * lo


def mix_and_filter(received: Waveform, config: BackscatterConfig) -> np.ndarray:
    """Mixer output low-passed by a Butterworth section (DC term retained)."""
    config.check()
    if not np.isclose(received.sample_rate, config.sample_rate, rtol=1e-12):
        raise ParameterError("received waveform is not at the configured sample rate")
    return lowpass(mix(received, config), config)


def remove_dc(baseband, n_samples: int | None = None) -> np.ndarray:
    """Subtract the mean over the first ``n_samples`` (the tag reply)."""
    x = np.asarray(baseband, dtype=float)
    n = x.size if n_samples is None else n_samples
    return x[:n] - x[:n].mean()


def receive(received: Waveform, n_symbols: int, config: BackscatterConfig,
            params: LinkParams | None = None) -> tuple[list[int], np.ndarray, np.ndarray]:
    """Mix, filter, remove DC and decode ``n_symbols`` symbols.

    Returns the bits, the raw mixer/LPF output and the DC-free baseband.
    """
    params = uplink_320k() if params is None else params
    n = n_symbols * config.samples_per_symbol
    mixed = mix_and_filter(received, config)
    base = remove_dc(mixed, n)
    bits = decode_stream(base, params, config.sample_rate,
                         link_frequency_hz=config.uplink_rate)
    return bits, mixed, base


def collapsed(base: np.ndarray, config: BackscatterConfig, fraction: float = 0.05) -> bool:
    """True when the recovered swing is a small fraction of the coherent one.

    A coherent mixer gives levels of +/- depth/4 around the mean; a local
    oscillator near quadrature drives them toward zero.
    """
    expected = config.ask_depth / 4
    return bool(np.sqrt(np.mean(np.square(base))) < fraction * expected)


def loopback(stream: UplinkSymbolStream, config: BackscatterConfig,
             params: LinkParams | None = None, guard_symbols: int = 1) -> dict:
    """CW -> backscatter -> mixer/LPF -> decode, returning every stage."""
    sps = config.samples_per_symbol
    duration = (stream.n_symbols + guard_symbols) * sps / config.sample_rate
    rf = backscatter(generate_cw(config, duration), stream, config)
    bits, mixed, base = receive(rf, stream.n_symbols, config, params)
    return {
        "baseband": render(stream, sps),
        "rf": rf.samples,
        "mixer": mixed,
        "bits": bits,
        "collapsed": collapsed(base, config),
    }
