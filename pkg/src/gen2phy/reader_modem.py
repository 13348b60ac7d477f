"""Reader transmitter (DSB-ASK, PR-ASK, SSB-ASK) and envelope detection.

The PIE baseband is smoothed with a raised-cosine pulse, mapped to RF
envelope levels A (high) and B = A * (1 - depth) (low), then placed on a
cosine carrier. Envelope detection forms the analytic signal with an
odd-length FIR Hilbert transformer, the real branch delayed by the
filter's group delay, and smooths ``|analytic|`` with a first-order
low-pass run forward and backward so the result stays time-aligned.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal

from .errors import ParameterError, ResolutionError
from .pie import PieWaveform
from .waveform import Waveform

SCHEMES = ("dsb", "pr", "ssb")
_ALIASES = {
    "dsb": "dsb", "dsb-ask": "dsb", "ask": "dsb",
    "pr": "pr", "pr-ask": "pr",
    "ssb": "ssb", "ssb-ask": "ssb",
}
MIN_DEPTH = 0.8


def scheme_name(scheme: str) -> str:
    try:
        return _ALIASES[scheme.lower()]
    except (KeyError, AttributeError):
        raise ParameterError(f"unsupported modulation scheme {scheme!r}") from None


@dataclass(frozen=True)
class ModulationConfig:
    scheme: str = "dsb"
    carrier_freq: float = 910e6
    sample_rate: float = 5 * 910e6
    mod_depth: float = 0.9
    rc_rolloff: float = 0.99
    hilbert_taps: int = 129
    amplitude: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "scheme", scheme_name(self.scheme))

    @classmethod
    def scaled(cls, carrier_freq: float = 10e6, **kw) -> "ModulationConfig":
        """Same 5x oversampling ratio at a lower carrier, for fast runs."""
        return cls(carrier_freq=carrier_freq, sample_rate=5 * carrier_freq, **kw)

    @property
    def low_level(self) -> float:
        return self.amplitude * (1 - self.mod_depth)

    def violations(self) -> list[str]:
        bad = []
        if not MIN_DEPTH <= self.mod_depth <= 1:
            bad.append(f"modulation depth {self.mod_depth} outside [0.8, 1]")
        if self.sample_rate < 4 * self.carrier_freq:
            bad.append("sample rate below 4 x carrier")
        if not 0 < self.rc_rolloff <= 1:
            bad.append(f"roll-off {self.rc_rolloff} outside (0, 1]")
        if self.hilbert_taps < 3 or self.hilbert_taps % 2 == 0:
            bad.append(f"Hilbert length {self.hilbert_taps} must be odd and >= 3")
        if self.amplitude <= 0:
            bad.append("amplitude must be positive")
        return bad

    def check(self) -> "ModulationConfig":
        bad = self.violations()
        if bad:
            raise ParameterError("; ".join(bad))
        return self


@dataclass(frozen=True, eq=False)
class AnalyticSignal:
    real_part: np.ndarray
    imag_part: np.ndarray
    group_delay: int

    @property
    def magnitude(self) -> np.ndarray:
        return np.hypot(self.real_part, self.imag_part)


def raised_cosine_taps(period: float, sample_rate: float, rolloff: float,
                       span: int = 4) -> np.ndarray:
    """Raised-cosine impulse response over +/- ``span`` periods, unit DC gain."""
    if not 0 < rolloff <= 1:
        raise ParameterError(f"roll-off must lie in (0, 1], got {rolloff}")
    half = max(1, int(round(span * period * sample_rate)))
    x = np.arange(-half, half + 1) / (period * sample_rate)
    h = np.sinc(x) * np.cos(np.pi * rolloff * x)
    den = 1 - (2 * rolloff * x) ** 2
    singular = np.abs(den) < 1e-10
    h[~singular] /= den[~singular]
    # limit at x = +/- 1/(2 alpha)
    h[singular] = np.pi / 4 * np.sinc(1 / (2 * rolloff))
    return h / h.sum()


def _smooth(levels: np.ndarray, taps: np.ndarray) -> np.ndarray:
    half = len(taps) // 2
    padded = np.pad(levels, half, mode="edge")
    return signal.oaconvolve(padded, taps, mode="valid")


def shape_baseband(wave: PieWaveform, rc_rolloff: float = 0.99,
                   rc_period: float | None = None) -> np.ndarray:
    """Raised-cosine smoothing of the rectangular PIE levels.

    ``rc_period`` defaults to a quarter of the low pulse width, which lets
    the pulse settle to within 0.5 % of the low level at its centre.
    Output has the same length and timeline as the input.
    """
    if len(wave.samples) == 0:
        return np.zeros(0)
    if rc_period is None:
        if wave.pw <= 0:
            raise ParameterError("rc_period required when the waveform carries no pulse width")
        rc_period = wave.pw / 4
    return _smooth(wave.samples, raised_cosine_taps(rc_period, wave.sample_rate, rc_rolloff))


def phase_reversal_signs(n_samples: int, boundaries) -> np.ndarray:
    """+/-1 per sample, flipping at every interior symbol boundary."""
    flips = np.zeros(n_samples, dtype=int)
    b = np.asarray(boundaries, dtype=int)
    b = b[(b > 0) & (b < n_samples)]
    np.add.at(flips, b, 1)
    return np.where(np.cumsum(flips) % 2 == 0, 1.0, -1.0)


def modulate(wave: PieWaveform, config: ModulationConfig) -> Waveform:
    """Put the PIE baseband on the carrier using ``config.scheme``."""
    config.check()
    if not np.isclose(wave.sample_rate, config.sample_rate, rtol=1e-12):
        raise ParameterError("baseband and modulator sample rates differ")
    fs = config.sample_rate
    a, b = config.amplitude, config.low_level
    rc_period = wave.pw / 4
    taps = raised_cosine_taps(rc_period, fs, config.rc_rolloff)
    levels = b + (a - b) * wave.samples
    n = np.arange(len(levels))
    carrier_phase = 2 * np.pi * config.carrier_freq / fs * n

    if config.scheme == "dsb":
        rf = _smooth(levels, taps) * np.cos(carrier_phase)
    elif config.scheme == "pr":
        signed = levels * phase_reversal_signs(len(levels), wave.symbol_boundaries)
        rf = _smooth(signed, taps) * np.cos(carrier_phase)
    else:
        env = _smooth(levels, taps)
        z = signal.hilbert(env)
        rf = np.real(z * np.exp(1j * carrier_phase))
    return Waveform(rf, fs)


def hilbert_fir(n_taps: int = 129) -> np.ndarray:
    """Type-III linear-phase Hilbert transformer, Blackman-windowed."""
    if n_taps < 3 or n_taps % 2 == 0:
        raise ParameterError("Hilbert FIR length must be odd and >= 3")
    k = np.arange(n_taps) - (n_taps - 1) // 2
    h = np.zeros(n_taps)
    odd = k % 2 != 0
    h[odd] = 2 / (np.pi * k[odd])
    return h * np.blackman(n_taps)


def analytic_signal(samples, n_taps: int = 129) -> AnalyticSignal:
    """Causal analytic signal; both branches lag the input by ``group_delay``."""
    x = np.asarray(samples, dtype=float)
    d = (n_taps - 1) // 2
    imag = signal.oaconvolve(x, hilbert_fir(n_taps))[: len(x)]
    real = np.concatenate([np.zeros(d), x[: len(x) - d]])
    return AnalyticSignal(real, imag, d)


def detect_envelope(wave: Waveform, hilbert_taps: int = 129,
                    smoothing_cutoff: float | None = None) -> np.ndarray:
    """Envelope ``|x + j H{x}|``, low-pass smoothed, on the input timeline.

    ``smoothing_cutoff`` defaults to ``sample_rate / 10`` (half the carrier
    at 5x oversampling); narrow features such as the PR-ASK phase-reversal
    null need the wide default.
    """
    x = wave.samples
    if len(x) < hilbert_taps:
        raise ResolutionError(
            f"{len(x)} samples is shorter than the {hilbert_taps}-tap Hilbert filter"
        )
    z = analytic_signal(x, hilbert_taps)
    d = z.group_delay
    mag = z.magnitude
    aligned = np.concatenate([mag[d:], np.full(d, mag[-1])])
    fs = wave.sample_rate
    cutoff = fs / 10 if smoothing_cutoff is None else smoothing_cutoff
    if not 0 < cutoff < fs / 2:
        raise ParameterError(f"smoothing cutoff {cutoff:g} Hz outside (0, fs/2)")
    b, a = signal.butter(1, cutoff, fs=fs)
    # even extension: anchoring the pad on a single (noisy) end sample skews the ends
    tau = fs / (2 * np.pi * cutoff)
    return signal.filtfilt(b, a, aligned, padtype="even",
                           padlen=min(len(aligned) - 1, int(10 * tau) + 1))


# -- measurement helpers -------------------------------------------------------

def settled_levels(envelope, wave: PieWaveform) -> tuple[np.ndarray, np.ndarray]:
    """Envelope values at the centres of each symbol's high part and low pulse."""
    env = np.asarray(envelope)
    b = wave.symbol_boundaries
    pw_n = wave.pw * wave.sample_rate
    highs, lows = [], []
    for start, stop in zip(b[:-1], b[1:]):
        if wave.samples[start] < 0.5 or stop - start <= pw_n * 1.5:  # delimiter
            continue
        hi_end = stop - pw_n
        highs.append(env[int(round((start + hi_end) / 2))])
        lows.append(env[int(round(stop - pw_n / 2))])
    return np.array(highs), np.array(lows)


def measure_modulation_depth(envelope, wave: PieWaveform) -> float:
    """(A - B) / A from settled high and low envelope samples."""
    highs, lows = settled_levels(envelope, wave)
    a, b = np.max(highs), np.min(lows)
    return (a - b) / a


def sideband_powers(rf: Waveform, carrier_freq: float, bandwidth: float,
                    guard_bins: int = 3) -> tuple[float, float]:
    """Integrated Hann-windowed periodogram power below and above the carrier.

    The carrier bin and ``guard_bins`` either side are excluded.
    """
    f, pxx = signal.periodogram(rf.samples, fs=rf.sample_rate, window="hann")
    df = f[1] - f[0]
    k = int(round(carrier_freq / df))
    nb = int(round(bandwidth / df))
    lower = pxx[max(0, k - nb): k - guard_bins].sum()
    upper = pxx[k + guard_bins + 1: k + nb + 1].sum()
    return float(lower), float(upper)


def occupied_bandwidth(rf: Waveform, carrier_freq: float, level_db: float = -20.0) -> float:
    """Width of the span around the carrier where the smoothed PSD stays above
    ``level_db`` relative to its peak (carrier excluded)."""
    f, pxx = signal.welch(rf.samples, fs=rf.sample_rate, nperseg=min(len(rf.samples), 4096))
    df = f[1] - f[0]
    k = int(round(carrier_freq / df))
    p = pxx.copy()
    p[max(0, k - 1): k + 2] = 0
    thresh = p.max() * 10 ** (level_db / 10)
    idx = np.flatnonzero(p >= thresh)
    return float((idx.max() - idx.min() + 1) * df)
