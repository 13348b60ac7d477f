"""Sampled real-valued signals and the plain-text dump format.

Dump layout::

    # sample_rate_hz=<decimal>
    <amplitude>
    <amplitude>
    ...
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

_HEADER_KEY = "sample_rate_hz"


@dataclass(frozen=True, eq=False)
class Waveform:
    samples: np.ndarray
    sample_rate: float

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=float))

    def __len__(self):
        return len(self.samples)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate

    @property
    def time(self) -> np.ndarray:
        return np.arange(len(self.samples)) / self.sample_rate


def dump_waveform(path, samples, sample_rate: float) -> Path:
    """Write ``samples`` in the shared dump format (12 significant digits)."""
    path = Path(path)
    samples = np.asarray(samples, dtype=float).ravel()
    lines = [f"# {_HEADER_KEY}={sample_rate!r}"]
    lines.extend(f"{v:.12g}" for v in samples)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path


def load_waveform(path) -> Waveform:
    text = Path(path).read_text(encoding="utf-8").splitlines()
    if not text or not text[0].startswith("#"):
        raise ValueError(f"{path}: missing '# {_HEADER_KEY}=' header")
    key, _, value = text[0].lstrip("#").strip().partition("=")
    if key.strip() != _HEADER_KEY:
        raise ValueError(f"{path}: unexpected header key {key!r}")
    data = np.array([float(v) for v in text[1:] if v.strip()], dtype=float)
    return Waveform(data, float(value))
