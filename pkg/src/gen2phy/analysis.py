"""Closed-form error-rate oracles and the seeded Monte-Carlo sweep harness.

FM0 symbol error rate with symbol-by-symbol sign-product detection::

    Pe = 2 q (1 - q),   q = Q(sqrt(E / N0)),   E = Eb

Preamble detection needs every one of its ``n`` symbols right, so with
independent symbol errors it succeeds with probability ``(1 - Pe) ** n``.

Sweep point ``i`` draws from ``np.random.default_rng(base_seed + i)``, so
results do not depend on how points are scheduled across workers.
"""

from __future__ import annotations

import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Callable, Sequence

import numpy as np
from scipy import optimize, special, stats

from .channel import measure_bit_energy, noise_sigma
from .errors import ParameterError
from .params import link_frequency, uplink_for
from .uplink import FM0, MILLER, decode_stream, encode, render

MIN_BITS_PER_POINT = 10_000
MIN_PREAMBLE_TRIALS = 1_000
PREAMBLE_SYMBOLS = 6
PREAMBLE_PATTERN = (1, 0, 1, 0, 1, 1)
# Crossing quoted alongside our analytic one.
CLAIMED_CROSSING_DB = 13.0
TARGET_SER = 1e-3


def q_function(x):
    """Gaussian tail probability Q(x) = P(N(0, 1) > x)."""
    out = 0.5 * special.erfc(np.asarray(x, dtype=float) / math.sqrt(2))
    return float(out) if np.ndim(out) == 0 else out


def _ratio(ebn0_db):
    return np.power(10.0, np.asarray(ebn0_db, dtype=float) / 10)


def theoretical_ser(ebn0_db):
    """FM0 symbol error rate for sign-product detection (E = Eb)."""
    q = q_function(np.sqrt(_ratio(ebn0_db)))
    return 2 * q * (1 - q)


def bpsk_ber(ebn0_db):
    """Antipodal matched-filter bit error rate Q(sqrt(2 Eb/N0))."""
    return q_function(np.sqrt(2 * _ratio(ebn0_db)))


def preamble_detect_prob(pe, n: int = PREAMBLE_SYMBOLS):
    """Probability that all ``n`` independent symbols are received correctly."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    pe = np.asarray(pe, dtype=float)
    if np.any((pe < 0) | (pe > 1)):
        raise ParameterError("pe must lie in [0, 1]")
    out = (1 - pe) ** n
    return float(out) if out.ndim == 0 else out


def ser_crossing(target: float = TARGET_SER, lo: float = -10.0, hi: float = 30.0) -> float:
    """Eb/N0 in dB at which ``theoretical_ser`` equals ``target``."""
    if not 0 < target < 0.5:
        raise ParameterError("target must lie in (0, 0.5)")
    return optimize.bisect(lambda x: math.log(theoretical_ser(x)) - math.log(target),
                           lo, hi, xtol=1e-12)


def crossing_report(target: float = TARGET_SER) -> dict:
    """Analytic crossing next to the quoted 13 dB, with the SER at each."""
    x = ser_crossing(target)
    return {
        "target_ser": target,
        "analytic_crossing_db": x,
        "claimed_crossing_db": CLAIMED_CROSSING_DB,
        "ser_at_claimed": float(theoretical_ser(CLAIMED_CROSSING_DB)),
        "gap_db": CLAIMED_CROSSING_DB - x,
    }


def binomial_interval(k: int, n: int, confidence: float = 0.95) -> tuple[float, float]:
    """Two-sided interval for a proportion ``k / n``.

    Normal approximation, or Clopper-Pearson when fewer than 20 events fall
    on either side.
    """
    if n <= 0 or not 0 <= k <= n:
        raise ParameterError("need 0 <= k <= n and n > 0")
    alpha = 1 - confidence
    if min(k, n - k) < 20:
        lo = 0.0 if k == 0 else float(stats.beta.ppf(alpha / 2, k, n - k + 1))
        hi = 1.0 if k == n else float(stats.beta.ppf(1 - alpha / 2, k + 1, n - k))
        return lo, hi
    p = k / n
    half = stats.norm.ppf(1 - alpha / 2) * math.sqrt(p * (1 - p) / n)
    return max(0.0, p - half), min(1.0, p + half)


def two_proportion_test(k1: int, n1: int, k2: int, n2: int) -> tuple[float, float]:
    """Pooled two-proportion z-test; returns (z, two-sided p-value)."""
    pooled = (k1 + k2) / (n1 + n2)
    se = math.sqrt(pooled * (1 - pooled) * (1 / n1 + 1 / n2))
    if se == 0:
        return 0.0, 1.0
    z = (k1 / n1 - k2 / n2) / se
    return z, float(2 * stats.norm.sf(abs(z)))


def _sigma(p: float, n: int) -> float:
    return math.sqrt(p * (1 - p) / n)


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.10g}"


def _csv(rows, columns) -> str:
    buf = io.StringIO(newline="")
    buf.write(",".join(columns) + "\n")
    for r in rows:
        buf.write(",".join(_fmt(getattr(r, c)) for c in columns) + "\n")
    return buf.getvalue()


@dataclass(frozen=True)
class BerPoint:
    ebn0_db: float
    trials: int
    errors: int
    measured: float
    theoretical: float
    ci_lo: float
    ci_hi: float

    @property
    def sigma(self) -> float:
        """Binomial standard deviation under the theoretical rate."""
        return _sigma(self.theoretical, self.trials)

    def within(self, k: float = 3.0) -> bool:
        return abs(self.measured - self.theoretical) <= k * self.sigma


@dataclass(frozen=True)
class BerCurve:
    points: tuple[BerPoint, ...]
    code: str = FM0
    m: int = 1

    COLUMNS = tuple(f.name for f in fields(BerPoint))

    def to_csv(self) -> str:
        return _csv(self.points, self.COLUMNS)

    def within(self, k: float = 3.0) -> list[bool]:
        return [p.within(k) for p in self.points]


@dataclass(frozen=True)
class PreamblePoint:
    ebn0_db: float
    trials: int
    detections: int
    measured: float
    theoretical: float
    predicted: float
    ci_lo: float
    ci_hi: float
    n_symbols: int
    symbol_errors: int
    symbol_error_rate: float

    @property
    def sigma(self) -> float:
        """Binomial standard deviation of the detection rate at ``predicted``."""
        return _sigma(self.predicted, self.trials)

    def within(self, k: float = 3.0) -> bool:
        """Measured detection against ``(1 - measured SER) ** n``."""
        return abs(self.measured - self.predicted) <= k * self.sigma


@dataclass(frozen=True)
class PreambleCurve:
    points: tuple[PreamblePoint, ...]

    COLUMNS = tuple(f.name for f in fields(PreamblePoint))

    def to_csv(self) -> str:
        return _csv(self.points, self.COLUMNS)

    def within(self, k: float = 3.0) -> list[bool]:
        return [p.within(k) for p in self.points]


def write_csv(curve, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(curve.to_csv())


def _parallel_map(fn: Callable, items: Sequence, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def default_samples_per_symbol(m: int) -> int:
    """8 samples per FM0 symbol, 4 M per Miller symbol (two per half-wave)."""
    return 8 if m == 1 else 4 * m


def _code_m(code: str, m: int | None) -> int:
    code = code.lower()
    if code == FM0:
        if m not in (None, 1):
            raise ParameterError("FM0 has no subcarrier; m must be 1")
        return 1
    if code == MILLER:
        if m not in (2, 4, 8):
            raise ParameterError("Miller needs m in {2, 4, 8}")
        return m
    raise ParameterError(f"unknown code {code!r}")


def _ber_point(ebn0_db: float, n_bits: int, m: int, sps: int, seed: int) -> BerPoint:
    params = uplink_for(m)
    fs = link_frequency(params) * sps
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, n_bits)
    x = render(encode(bits, m), sps)
    if math.isfinite(ebn0_db):
        eb = measure_bit_energy(x, sps, fs)
        x = x + rng.normal(0.0, noise_sigma(ebn0_db, eb, fs), x.size)
    errors = int(np.count_nonzero(np.asarray(decode_stream(x, params, fs)) != bits))
    lo, hi = binomial_interval(errors, n_bits)
    return BerPoint(float(ebn0_db), n_bits, errors, errors / n_bits,
                    float(theoretical_ser(ebn0_db)), lo, hi)


def run_ber_sweep(code: str = FM0, ebn0_points: Sequence[float] = (0, 2, 4, 6, 8),
                  bits_per_point: int = 100_000, base_seed: int = 0, *,
                  m: int | None = None, samples_per_symbol: int | None = None,
                  workers: int = 1) -> BerCurve:
    """Monte-Carlo uplink BER through baseband AWGN and symbol-by-symbol detection."""
    m = _code_m(code, m)
    if bits_per_point < MIN_BITS_PER_POINT:
        raise ParameterError(f"bits_per_point must be >= {MIN_BITS_PER_POINT}")
    sps = default_samples_per_symbol(m) if samples_per_symbol is None else samples_per_symbol
    pts = list(ebn0_points)
    out = _parallel_map(
        lambda i: _ber_point(pts[i], bits_per_point, m, sps, base_seed + i),
        range(len(pts)), workers)
    return BerCurve(tuple(out), FM0 if m == 1 else MILLER, m)


def _preamble_point(ebn0_db: float, trials: int, pattern: np.ndarray, sps: int,
                    seed: int, pe_override: float | None) -> PreamblePoint:
    params = uplink_for(1)
    fs = link_frequency(params) * sps
    n = pattern.size
    x = render(encode(pattern, 1), sps)
    rng = np.random.default_rng(seed)
    rx = np.broadcast_to(x, (trials, x.size))
    if math.isfinite(ebn0_db):
        eb = measure_bit_energy(x, sps, fs)
        rx = rx + rng.normal(0.0, noise_sigma(ebn0_db, eb, fs), rx.shape)
    got = np.asarray(decode_stream(rx.ravel(), params, fs)).reshape(trials, n)
    wrong = got != pattern
    sym_err = int(wrong.sum())
    detections = int(trials - wrong.any(axis=1).sum())
    ser_meas = sym_err / (trials * n)
    pe = theoretical_ser(ebn0_db) if pe_override is None else pe_override
    lo, hi = binomial_interval(detections, trials)
    return PreamblePoint(float(ebn0_db), trials, detections, detections / trials,
                         preamble_detect_prob(pe, n), preamble_detect_prob(ser_meas, n),
                         lo, hi, n, sym_err, ser_meas)


def run_preamble_sweep(n_symbols: int = PREAMBLE_SYMBOLS,
                       ebn0_points: Sequence[float] = tuple(range(0, 15)),
                       trials_per_point: int = 10_000, base_seed: int = 0, *,
                       pattern: Sequence[int] | None = None,
                       pe_override: float | None = None,
                       samples_per_symbol: int = 8, workers: int = 1) -> PreambleCurve:
    """Fully error-free reception rate of an ``n_symbols`` FM0 preamble.

    The preamble bits default to ``1 0 1 0 1 1`` cycled to length
    ``n_symbols``. ``theoretical`` uses the closed-form SER (or
    ``pe_override``); ``predicted`` uses the SER measured in the same run.
    """
    if n_symbols < 1:
        raise ParameterError("n_symbols must be >= 1")
    if trials_per_point < MIN_PREAMBLE_TRIALS:
        raise ParameterError(f"trials_per_point must be >= {MIN_PREAMBLE_TRIALS}")
    if pe_override is not None and not 0 <= pe_override <= 1:
        raise ParameterError("pe_override must lie in [0, 1]")
    base = PREAMBLE_PATTERN if pattern is None else tuple(pattern)
    pat = np.resize(np.asarray(base, dtype=int), n_symbols)
    pts = list(ebn0_points)
    out = _parallel_map(
        lambda i: _preamble_point(pts[i], trials_per_point, pat, samples_per_symbol,
                                  base_seed + i, pe_override),
        range(len(pts)), workers)
    return PreambleCurve(tuple(out))


def _bpsk_point(ebn0_db: float, n_bits: int, sps: int, seed: int) -> BerPoint:
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, n_bits)
    x = np.repeat(2.0 * bits - 1, sps)
    eb = measure_bit_energy(x, sps, 1.0)
    x = x + rng.normal(0.0, noise_sigma(ebn0_db, eb, 1.0), x.size)
    decided = (x.reshape(-1, sps).sum(axis=1) >= 0).astype(int)
    errors = int(np.count_nonzero(decided != bits))
    lo, hi = binomial_interval(errors, n_bits)
    return BerPoint(float(ebn0_db), n_bits, errors, errors / n_bits,
                    float(bpsk_ber(ebn0_db)), lo, hi)


def run_bpsk_selftest(ebn0_points: Sequence[float] = (0, 2, 4, 6),
                      bits_per_point: int = 100_000, base_seed: int = 0, *,
                      samples_per_bit: int = 4, workers: int = 1) -> BerCurve:
    """Antipodal signalling through the AWGN path against Q(sqrt(2 Eb/N0)).

    Checks the Eb/N0 calibration independently of any line code.
    """
    pts = list(ebn0_points)
    out = _parallel_map(lambda i: _bpsk_point(pts[i], bits_per_point, samples_per_bit,
                                              base_seed + i),
                        range(len(pts)), workers)
    return BerCurve(tuple(out), "bpsk", 1)


def curve_records(curve) -> list[dict]:
    return [asdict(p) for p in curve.points]
