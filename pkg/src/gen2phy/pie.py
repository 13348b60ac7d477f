"""Pulse-interval encoding of reader commands, plus preamble / frame-sync.

Every PIE symbol is a high interval closed by a fixed-width low pulse
``pw``. Data-0 lasts one Tari, Data-1 lasts ``data1_len``. Levels are
1.0 (high) and 0.0 (low); modulation depth is applied by the modem.

A preamble is ``delimiter | Data-0 | RTcal | TRcal``; a frame-sync drops
the TRcal field. Field lengths are measured rising edge to rising edge,
i.e. high portion plus the closing low pulse.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import FramingError, ParameterError, ProtocolError, ResolutionError
from .params import LinkParams, REL_TOL
from .waveform import Waveform

DEFAULT_DELIMITER = 12.5e-6
PW_FRACTION = 0.25
MIN_SAMPLES_PER_TARI = 20
# A low run shorter than this cannot be a delimiter (longest pw is 6.25 us).
MIN_DELIMITER = 10e-6


@dataclass(frozen=True, eq=False)
class PieWaveform(Waveform):
    symbol_boundaries: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    pw: float = 0.0
    n_header: int = 0

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(
            self, "symbol_boundaries", np.asarray(self.symbol_boundaries, dtype=int)
        )

    @property
    def payload_boundaries(self) -> np.ndarray:
        return self.symbol_boundaries[self.n_header:]


@dataclass(frozen=True)
class PreambleSpec:
    delimiter_len: float
    data0_len: float
    rtcal: float
    trcal: float | None = None

    @property
    def is_frame_sync(self) -> bool:
        return self.trcal is None

    @classmethod
    def from_params(cls, params: LinkParams, frame_sync: bool = False,
                    delimiter: float = DEFAULT_DELIMITER) -> "PreambleSpec":
        return cls(delimiter, params.tari, params.rtcal, None if frame_sync else params.trcal)


def _close(a, b):
    return abs(a - b) <= REL_TOL * max(abs(a), abs(b))


def _default_pw(params: LinkParams, pw):
    pw = PW_FRACTION * params.tari if pw is None else pw
    if not 0 < pw < params.tari:
        raise ParameterError(f"pw must lie in (0, Tari), got {pw}")
    return pw


def _check_rate(params: LinkParams, sample_rate: float):
    if sample_rate * params.tari < MIN_SAMPLES_PER_TARI * (1 - REL_TOL):
        raise ResolutionError(
            f"sample rate {sample_rate:g} Hz gives fewer than "
            f"{MIN_SAMPLES_PER_TARI} samples per Tari"
        )


def _render(segments, sample_rate: float):
    """Render (level, duration) segments; returns samples and segment start indices.

    Segment edges are rounded from cumulative time so that no rounding
    error accumulates across a long waveform.
    """
    if not segments:
        return np.zeros(0), np.zeros(1, dtype=int)
    levels = np.array([s[0] for s in segments], dtype=float)
    ends = np.cumsum([s[1] for s in segments])
    edges = np.concatenate([[0], np.round(ends * sample_rate).astype(int)])
    samples = np.repeat(levels, np.diff(edges))
    return samples, edges


def _symbol(length: float, pw: float):
    return [(1.0, length - pw), (0.0, pw)]


def _assemble(fields, sample_rate, pw, n_header=0, lead=0.0, tail=0.0):
    """fields: list of segment lists, one per symbol/field."""
    segments = []
    starts = []
    if lead > 0:
        segments.append((1.0, lead))
    for f in fields:
        starts.append(len(segments))
        segments.extend(f)
    end_seg = len(segments)
    if tail > 0:
        segments.append((1.0, tail))
    samples, edges = _render(segments, sample_rate)
    boundaries = np.array([edges[i] for i in starts] + [edges[end_seg]], dtype=int)
    return PieWaveform(samples, sample_rate, boundaries, pw, n_header)


def pie_encode(bits: Sequence[int], params: LinkParams, sample_rate: float,
               pw: float | None = None) -> PieWaveform:
    """Encode ``bits`` as back-to-back PIE symbols (no header)."""
    pw = _default_pw(params, pw)
    _check_rate(params, sample_rate)
    fields = [_symbol(params.data1_len if b else params.tari, pw) for b in _bits(bits)]
    return _assemble(fields, sample_rate, pw)


def _bits(bits):
    bits = [int(b) for b in bits]
    if any(b not in (0, 1) for b in bits):
        raise ParameterError("bits must be 0 or 1")
    return bits


def _header_fields(spec: PreambleSpec, pw: float):
    fields = [[(0.0, spec.delimiter_len)], _symbol(spec.data0_len, pw), _symbol(spec.rtcal, pw)]
    if spec.trcal is not None:
        fields.append(_symbol(spec.trcal, pw))
    return fields


def _check_spec(spec: PreambleSpec, params: LinkParams, pw: float):
    params.check()
    if not _close(spec.data0_len, params.tari):
        raise ParameterError("preamble Data-0 length differs from Tari")
    if not _close(spec.rtcal, params.rtcal):
        raise ParameterError("preamble RTcal differs from link parameters")
    if spec.trcal is not None and not _close(spec.trcal, params.trcal):
        raise ParameterError("preamble TRcal differs from link parameters")
    if spec.delimiter_len <= pw:
        raise ParameterError("delimiter must be longer than the low pulse")


def build_preamble(spec: PreambleSpec, params: LinkParams, sample_rate: float,
                   pw: float | None = None) -> PieWaveform:
    """Delimiter + Data-0 + RTcal (+ TRcal unless ``spec`` is a frame-sync)."""
    pw = _default_pw(params, pw)
    _check_rate(params, sample_rate)
    _check_spec(spec, params, pw)
    fields = _header_fields(spec, pw)
    return _assemble(fields, sample_rate, pw, n_header=len(fields))


def build_frame(bits: Sequence[int], params: LinkParams, sample_rate: float, *,
                frame_sync: bool = False, pw: float | None = None,
                delimiter: float = DEFAULT_DELIMITER, lead: float | None = None,
                tail: float | None = None) -> PieWaveform:
    """A complete reader transmission: CW lead-in, header, payload, CW tail.

    The lead-in and tail (default 4 and 2 Tari of unmodulated carrier) give
    the receiver a settled envelope before the delimiter and a rising edge
    closing the last payload symbol.
    """
    pw = _default_pw(params, pw)
    _check_rate(params, sample_rate)
    spec = PreambleSpec.from_params(params, frame_sync, delimiter)
    _check_spec(spec, params, pw)
    header = _header_fields(spec, pw)
    payload = [_symbol(params.data1_len if b else params.tari, pw) for b in _bits(bits)]
    lead = 4 * params.tari if lead is None else lead
    tail = 2 * params.tari if tail is None else tail
    return _assemble(header + payload, sample_rate, pw, n_header=len(header),
                     lead=lead, tail=tail)


def _runs(high: np.ndarray):
    """Run-length encode a boolean array: (starts, lengths, values)."""
    n = len(high)
    if n == 0:
        return np.zeros(0, int), np.zeros(0, int), np.zeros(0, bool)
    change = np.flatnonzero(high[1:] != high[:-1]) + 1
    starts = np.concatenate([[0], change])
    lengths = np.diff(np.concatenate([starts, [n]]))
    return starts, lengths, high[starts]


def rising_edges(levels: np.ndarray) -> np.ndarray:
    """Indices of the first high sample after each low run."""
    high = np.asarray(levels) > 0.5
    return np.flatnonzero(~high[:-1] & high[1:]) + 1


def parse_header(wave, sample_rate: float | None = None, *,
                 min_delimiter: float = MIN_DELIMITER,
                 slack_samples: int = 2, rel_tol: float = 0.1,
                 ) -> tuple[PreambleSpec, int]:
    """Recover header timing from a two-level waveform.

    Leading high samples (carrier before the delimiter) are skipped. The
    first low run must be at least ``min_delimiter`` long. Returns the
    spec and the sample index where the first payload symbol starts.

    Ratio checks allow ``rel_tol`` plus ``slack_samples`` of measurement
    error, since edges recovered from a smoothed envelope are biased by a
    few samples.

    Raises
    ------
    FramingError
        No delimiter, or fewer than two calibration fields after it.
    ProtocolError
        RTcal outside 2.5..3.0 Data-0 lengths, or TRcal outside 1.1..3 RTcal.
    """
    if isinstance(wave, Waveform):
        sample_rate = wave.sample_rate if sample_rate is None else sample_rate
        samples = wave.samples
    else:
        samples = np.asarray(wave, dtype=float)
    if sample_rate is None:
        raise ParameterError("sample_rate required for a bare sample array")
    high = samples > 0.5
    starts, lengths, values = _runs(high)
    low_runs = np.flatnonzero(~values)
    if len(low_runs) == 0:
        raise FramingError("no delimiter: waveform never goes low")
    d = low_runs[0]
    delim_len = lengths[d] / sample_rate
    if delim_len < min_delimiter:
        raise FramingError(
            f"no delimiter: first low run is {delim_len * 1e6:.3g} us, "
            f"shorter than {min_delimiter * 1e6:.3g} us"
        )

    r0 = starts[d] + lengths[d]
    if r0 >= len(samples):
        raise FramingError("truncated header: waveform ends inside the delimiter")
    edges = rising_edges(high)
    edges = edges[edges > r0]
    if not high[-1]:
        edges = np.concatenate([edges, [len(samples)]])
    marks = np.concatenate([[r0], edges])
    if len(marks) < 3:
        raise FramingError("truncated header: Data-0 and RTcal fields not both present")

    data0 = (marks[1] - marks[0]) / sample_rate
    rtcal = (marks[2] - marks[1]) / sample_rate
    slack = slack_samples / sample_rate
    lo, hi = 1 - rel_tol, 1 + rel_tol
    if not (2.5 * data0 * lo - slack <= rtcal <= 3.0 * data0 * hi + slack):
        raise ProtocolError(
            f"RTcal {rtcal * 1e6:.4g} us outside 2.5..3.0 x Data-0 ({data0 * 1e6:.4g} us)"
        )
    trcal = None
    offset = marks[2]
    if len(marks) >= 4:
        third = (marks[3] - marks[2]) / sample_rate
        # Payload symbols are at most 2 Tari <= 0.8 RTcal; TRcal is >= 1.1 RTcal.
        if third > 0.95 * rtcal:
            if not (1.1 * rtcal * lo - slack <= third <= 3.0 * rtcal * hi + slack):
                raise ProtocolError(f"TRcal {third * 1e6:.4g} us outside 1.1..3 x RTcal")
            trcal = third
            offset = marks[3]
    spec = PreambleSpec(delim_len, data0, rtcal, trcal)
    return spec, int(offset)


def concat(*waves: PieWaveform) -> PieWaveform:
    """Join PIE waveforms end to end, merging their symbol boundaries."""
    if not waves:
        raise ValueError("nothing to concatenate")
    fs = waves[0].sample_rate
    if any(w.sample_rate != fs for w in waves):
        raise ParameterError("sample rates differ")
    parts, bounds, offset = [], [], 0
    for w in waves:
        parts.append(w.samples)
        b = w.symbol_boundaries + offset
        bounds.append(b if not bounds else b[1:] if len(b) and bounds[-1][-1] == b[0] else b)
        offset += len(w.samples)
    return PieWaveform(np.concatenate(parts), fs, np.concatenate(bounds), waves[0].pw,
                       waves[0].n_header)
