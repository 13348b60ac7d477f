"""FM0 and Miller-subcarrier line codes for the tag-to-reader link.

Streams are kept at half-wave resolution: FM0 has two half-symbols per
bit, Miller with subcarrier size ``m`` has ``2 m`` subcarrier half-cycles
per bit. Detection integrates each received symbol over its two halves
and applies the sign-product rule; Miller symbols are first despread by a
local subcarrier replica, and the rule's polarity is flipped because a
mid-symbol inversion means Data-1 in Miller but Data-0 in FM0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import FramingError, ParameterError
from .params import LinkParams, link_frequency

FM0 = "fm0"
MILLER = "miller"


@dataclass(frozen=True, eq=False)
class UplinkSymbolStream:
    halves: np.ndarray
    m: int
    symbol_duration: float
    trailing_state: float

    @property
    def halves_per_symbol(self) -> int:
        return 2 * self.m

    @property
    def n_symbols(self) -> int:
        return len(self.halves) // self.halves_per_symbol

    @property
    def code(self) -> str:
        return FM0 if self.m == 1 else MILLER


def _bits(bits):
    arr = np.asarray(list(bits), dtype=int)
    if np.any((arr != 0) & (arr != 1)):
        raise ParameterError("bits must be 0 or 1")
    return arr


def _level(initial_level):
    if initial_level == 0:
        raise ParameterError("initial level must be non-zero (+a or -a)")
    return float(initial_level)


def _duration(params, symbol_duration):
    return 1 / link_frequency(params) if params is not None else symbol_duration


def fm0_encode(bits: Sequence[int], initial_level: float = 1.0, *,
               params: LinkParams | None = None,
               symbol_duration: float = 1.0) -> UplinkSymbolStream:
    """FM0: invert at every symbol boundary, and mid-symbol for Data-0.

    ``initial_level`` is the level of the first half of the first symbol.
    """
    level = _level(initial_level)
    halves = np.empty(2 * len(bits))
    for i, b in enumerate(_bits(bits)):
        if i:
            level = -level
        halves[2 * i] = level
        if b == 0:
            level = -level
        halves[2 * i + 1] = level
    return UplinkSymbolStream(halves, 1, _duration(params, symbol_duration), level)


def miller_baseband(bits: Sequence[int], initial_level: float = 1.0) -> np.ndarray:
    """Miller half-symbol levels before the subcarrier.

    Data-1 inverts mid-symbol; the boundary between two consecutive
    Data-0s inverts; all other boundaries keep the level.
    """
    level = _level(initial_level)
    bits = _bits(bits)
    halves = np.empty(2 * len(bits))
    prev = None
    for i, b in enumerate(bits):
        if b == 0 and prev == 0:
            level = -level
        halves[2 * i] = level
        if b == 1:
            level = -level
        halves[2 * i + 1] = level
        prev = b
    return halves


def subcarrier(m: int, n_symbols: int = 1) -> np.ndarray:
    """Square subcarrier at half-cycle resolution: +1, -1, ... (2 m per symbol)."""
    return np.tile(np.array([1.0, -1.0]), m * n_symbols)


def miller_encode(bits: Sequence[int], m: int, initial_level: float = 1.0, *,
                  params: LinkParams | None = None,
                  symbol_duration: float = 1.0) -> UplinkSymbolStream:
    """Miller baseband multiplied by an ``m``-cycle-per-symbol square subcarrier."""
    if m not in (2, 4, 8):
        raise ParameterError(f"Miller size must be 2, 4 or 8 (use fm0_encode for 1), got {m}")
    if params is not None and params.m != m:
        raise ParameterError(f"params carry M={params.m}, encoder asked for M={m}")
    base = miller_baseband(bits, initial_level)
    halves = np.repeat(base, m) * subcarrier(m, len(base) // 2)
    trailing = base[-1] if len(base) else _level(initial_level)
    return UplinkSymbolStream(halves, m, _duration(params, symbol_duration), trailing)


def encode(bits, m: int = 1, initial_level: float = 1.0, **kw) -> UplinkSymbolStream:
    if m == 1:
        return fm0_encode(bits, initial_level, **kw)
    return miller_encode(bits, m, initial_level, **kw)


def render(stream: UplinkSymbolStream, samples_per_symbol: int) -> np.ndarray:
    """Sample-level waveform, holding each half-wave level."""
    hps = stream.halves_per_symbol
    if samples_per_symbol % hps:
        raise ParameterError(
            f"{samples_per_symbol} samples per symbol not divisible by {hps} half-waves"
        )
    return np.repeat(stream.halves, samples_per_symbol // hps)


def decide_symbol(first_half: float, second_half: float, code: str = FM0) -> int:
    """Sign-product decision on the two half-symbol integrals.

    FM0: product >= 0 (no mid-symbol inversion) -> 1, otherwise 0.
    Miller (after despreading): product >= 0 -> 0, otherwise 1.
    """
    same = first_half * second_half >= 0
    if code == FM0:
        return int(same)
    if code == MILLER:
        return int(not same)
    raise ParameterError(f"unknown code {code!r}")


def decide_symbols(first, second, code: str = FM0) -> np.ndarray:
    same = np.asarray(first) * np.asarray(second) >= 0
    if code == FM0:
        return same.astype(int)
    if code == MILLER:
        return (~same).astype(int)
    raise ParameterError(f"unknown code {code!r}")


def half_integrals(wave, samples_per_symbol: int, m: int = 1,
                   dt: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Per-symbol integrals over the first and second half, after despreading."""
    x = np.asarray(wave, dtype=float)
    sps = samples_per_symbol
    if sps % 2:
        raise ParameterError("samples per symbol must be even")
    if x.size % sps:
        raise FramingError(f"{x.size} samples is not a whole number of {sps}-sample symbols")
    sym = x.reshape(-1, sps)
    if m > 1:
        if sps % (2 * m):
            raise ParameterError(f"{sps} samples per symbol not divisible by 2M={2 * m}")
        sym = sym * np.repeat(subcarrier(m), sps // (2 * m))
    half = sps // 2
    return sym[:, :half].sum(axis=1) * dt, sym[:, half:].sum(axis=1) * dt


def samples_per_symbol(sample_rate: float, symbol_rate: float) -> int:
    ratio = sample_rate / symbol_rate
    sps = int(round(ratio))
    if abs(ratio - sps) > 1e-6 * ratio or sps < 2:
        raise ParameterError(
            f"sample rate {sample_rate:g} Hz is not an integer multiple of the "
            f"{symbol_rate:g} Hz symbol rate"
        )
    return sps


def decode_stream(wave, params: LinkParams, sample_rate: float, *,
                  link_frequency_hz: float | None = None,
                  code: str | None = None) -> list[int]:
    """Symbol-by-symbol detection of a symbol-aligned baseband stream.

    ``code`` defaults to FM0 when ``params.m == 1`` and Miller otherwise.
    ``link_frequency_hz`` overrides the rate derived from ``params`` (used
    by time-scaled simulations).
    """
    lf = link_frequency(params) if link_frequency_hz is None else link_frequency_hz
    sps = samples_per_symbol(sample_rate, lf)
    code = code or (FM0 if params.m == 1 else MILLER)
    despread = params.m if code == MILLER else 1
    a, b = half_integrals(wave, sps, despread, 1 / sample_rate)
    return decide_symbols(a, b, code).tolist()
