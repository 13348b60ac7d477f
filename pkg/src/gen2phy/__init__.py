"""EPC Gen-2 style RFID physical-layer simulator.

Reader-to-tag: PIE encoding, DSB/PR/SSB-ASK modulation, Hilbert envelope
detection and the tag's trigger/clock/integrator demodulator.
Tag-to-reader: FM0 and Miller line codes, ASK backscatter, mixer and
low-pass receive chain, and symbol-by-symbol detection in AWGN.
"""

from .errors import (FramingError, Gen2Error, ParameterError, ProtocolError,
                     ResolutionError, SyncLossError)
from .params import LinkParams, link_frequency, min_query_gap, pivot, validate
from .waveform import Waveform, dump_waveform, load_waveform

__version__ = "0.1.0"

__all__ = [
    "FramingError", "Gen2Error", "ParameterError", "ProtocolError", "ResolutionError",
    "SyncLossError", "LinkParams", "link_frequency", "min_query_gap", "pivot",
    "validate", "Waveform", "dump_waveform", "load_waveform",
]
