import numpy as np
import pytest
from scipy import signal

from gen2phy import backscatter as bs, reader_modem as rm, uplink as ul
from gen2phy.backscatter import BackscatterConfig
from gen2phy.errors import ParameterError
from gen2phy.waveform import Waveform

REFERENCE_UPLINK_BITS = [1, 1, 0, 0, 1, 0, 0, 1]


@pytest.fixture
def cfg():
    return BackscatterConfig.scaled()


def test_scaled_config_keeps_ratios(cfg):
    full = BackscatterConfig()
    assert cfg.sample_rate / cfg.cw_freq == full.sample_rate / full.cw_freq
    assert cfg.samples_per_symbol == full.samples_per_symbol == 14000
    assert cfg.cutoff == pytest.approx(2 * cfg.uplink_rate)


def test_cw_sample_count_and_rms(cfg):
    cw = bs.generate_cw(cfg, 10 / cfg.cw_freq)
    assert len(cw) == 50
    assert np.sqrt(np.mean(cw.samples ** 2)) == pytest.approx(1 / np.sqrt(2), abs=1e-3)


def test_cw_spectral_peak(cfg):
    cw = bs.generate_cw(cfg, 200 / cfg.cw_freq)
    f, pxx = signal.periodogram(cw.samples, fs=cw.sample_rate)
    assert abs(f[np.argmax(pxx)] - cfg.cw_freq) <= f[1] - f[0]


def test_cw_nyquist_violation():
    with pytest.raises(ParameterError):
        bs.generate_cw(BackscatterConfig(cw_freq=1e6, sample_rate=3e6), 1e-5)


def test_cw_needs_positive_duration(cfg):
    with pytest.raises(ParameterError):
        bs.generate_cw(cfg, 0.0)


def test_all_high_stream_leaves_cw(cfg):
    stream = ul.fm0_encode([1])
    stream = ul.UplinkSymbolStream(np.ones(4), 1, stream.symbol_duration, 1.0)
    cw = bs.generate_cw(cfg, 2 * cfg.samples_per_symbol / cfg.sample_rate)
    assert np.array_equal(bs.backscatter(cw, stream, cfg).samples, cw.samples)


def test_reference_on_off_pattern(cfg):
    stream = ul.fm0_encode(REFERENCE_UPLINK_BITS)
    sps = cfg.samples_per_symbol
    cw = bs.generate_cw(cfg, 8 * sps / cfg.sample_rate)
    rf = bs.backscatter(cw, stream, cfg).samples
    levels = ul.render(stream, sps)
    assert np.all(rf[levels < 0] == 0)
    assert np.array_equal(rf[levels > 0], cw.samples[levels > 0])


def test_half_depth_measured(cfg):
    c = BackscatterConfig.scaled(ask_depth=0.5)
    stream = ul.fm0_encode(REFERENCE_UPLINK_BITS)
    sps = c.samples_per_symbol
    rf = bs.backscatter(bs.generate_cw(c, 8 * sps / c.sample_rate), stream, c)
    env = rm.detect_envelope(rf)
    centres = (np.arange(16) + 0.5) * sps / 2
    vals = env[centres.astype(int)]
    hi, lo = vals[stream.halves > 0].mean(), vals[stream.halves < 0].mean()
    assert (hi - lo) / hi == pytest.approx(0.5, abs=0.02)


def test_rate_mismatch(cfg):
    stream = ul.fm0_encode([1, 0])
    cw = Waveform(np.ones(30000), 2 * cfg.sample_rate)
    with pytest.raises(ParameterError):
        bs.backscatter(cw, stream, cfg)
    with pytest.raises(ParameterError):
        bs.mix_and_filter(cw, cfg)


def test_stream_longer_than_cw(cfg):
    with pytest.raises(ParameterError):
        bs.backscatter(bs.generate_cw(cfg, 1e-4), ul.fm0_encode(REFERENCE_UPLINK_BITS), cfg)


def test_clean_cw_mixes_to_half(cfg):
    cw = bs.generate_cw(cfg, 4 * cfg.samples_per_symbol / cfg.sample_rate)
    y = bs.mix_and_filter(cw, cfg)
    assert np.allclose(y[len(y) // 2:], 0.5, atol=2e-3)


def test_reference_loopback(cfg):
    out = bs.loopback(ul.fm0_encode(REFERENCE_UPLINK_BITS), cfg)
    assert out["bits"] == REFERENCE_UPLINK_BITS
    assert not out["collapsed"]


def test_lpf_removes_double_frequency(cfg):
    stream = ul.fm0_encode(REFERENCE_UPLINK_BITS)
    out = bs.loopback(stream, cfg)
    y = out["mixer"][: 8 * cfg.samples_per_symbol]
    f, pxx = signal.periodogram(y - y.mean(), fs=cfg.sample_rate, window="hann")
    base = pxx[f < 4 * cfg.uplink_rate].sum()
    near = np.abs(f - 2 * cfg.cw_freq) < 4 * cfg.uplink_rate
    assert 10 * np.log10(base / pxx[near].sum()) >= 40


def test_mixer_spectrum_baseband_and_double_carrier(cfg):
    stream = ul.fm0_encode(REFERENCE_UPLINK_BITS)
    sps = cfg.samples_per_symbol
    rf = bs.backscatter(bs.generate_cw(cfg, 8 * sps / cfg.sample_rate), stream, cfg)
    x = bs.mix(rf, cfg)
    f, pxx = signal.periodogram(x, fs=cfg.sample_rate, window="hann")
    band = 20 * cfg.uplink_rate
    wanted = (f < band) | (np.abs(f - 2 * cfg.cw_freq) < band)
    # what remains outside is the 1/f^2 tail of the rectangular keying
    assert pxx[~wanted].sum() < 0.02 * pxx[wanted].sum()


@pytest.mark.parametrize("phase", [-59, -30, 0, 30, 59])
def test_phase_offset_tolerated(phase):
    c = BackscatterConfig.scaled(lo_phase_deg=phase)
    rng = np.random.default_rng(phase + 100)
    for _ in range(10):
        bits = rng.integers(0, 2, 8).tolist()
        assert bs.loopback(ul.fm0_encode(bits), c)["bits"] == bits


def test_quadrature_lo_collapses():
    out = bs.loopback(ul.fm0_encode(REFERENCE_UPLINK_BITS), BackscatterConfig.scaled(lo_phase_deg=90))
    assert out["collapsed"]
    assert np.max(np.abs(bs.remove_dc(out["mixer"]))) < 0.01


def test_config_rejects_psk():
    with pytest.raises(ParameterError):
        BackscatterConfig.scaled(tag_mod="PSK").check()
