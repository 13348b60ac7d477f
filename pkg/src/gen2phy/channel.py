"""Real AWGN channel calibrated in Eb/N0.

Energies are ``sum(s**2) * dt`` with ``dt = 1 / sample_rate``. With two-sided
noise PSD N0/2 the per-sample variance is ``N0 / 2 * sample_rate``, so a
matched filter over one bit of antipodal signalling sees SNR 2 Eb/N0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FramingError, ParameterError


@dataclass(frozen=True)
class NoiseSpec:
    ebn0_db: float
    bit_energy: float | None = None
    seed: int = 0

    @property
    def enabled(self) -> bool:
        return math.isfinite(self.ebn0_db)


def measure_bit_energy(wave, samples_per_bit: int, sample_rate: float = 1.0) -> float:
    """Mean energy per bit window."""
    x = np.asarray(wave, dtype=float)
    if samples_per_bit < 1 or x.size % samples_per_bit:
        raise FramingError(
            f"{x.size} samples is not a whole number of {samples_per_bit}-sample bits"
        )
    if x.size == 0:
        return 0.0
    per_bit = (x.reshape(-1, samples_per_bit) ** 2).sum(axis=1) / sample_rate
    return float(per_bit.mean())


def noise_sigma(ebn0_db: float, bit_energy: float, sample_rate: float = 1.0) -> float:
    n0 = bit_energy / 10 ** (ebn0_db / 10)
    return math.sqrt(n0 / 2 * sample_rate)


def add_awgn(wave, spec: NoiseSpec, samples_per_bit: int = 2, sample_rate: float = 1.0,
             rng: np.random.Generator | None = None) -> np.ndarray:
    """Return ``wave`` plus white Gaussian noise at ``spec.ebn0_db``.

    ``spec.bit_energy`` of ``None`` measures Eb from ``wave`` itself using
    ``samples_per_bit`` windows. An infinite Eb/N0 returns a copy of the
    input. Pass ``rng`` to draw from an existing generator instead of
    seeding a fresh one from ``spec.seed``.
    """
    if samples_per_bit < 2:
        raise ParameterError("samples_per_bit must be >= 2")
    x = np.array(wave, dtype=float)
    if not spec.enabled:
        return x
    eb = spec.bit_energy
    if eb is None:
        eb = measure_bit_energy(x, samples_per_bit, sample_rate)
    rng = np.random.default_rng(spec.seed) if rng is None else rng
    return x + rng.normal(0.0, noise_sigma(spec.ebn0_db, eb, sample_rate), x.shape)
