import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gen2phy import params as lp, uplink as ul
from gen2phy.errors import FramingError, ParameterError

REFERENCE_UPLINK_BITS = [1, 1, 0, 0, 1, 0, 0, 1]
ALL_8BIT = [list(b) for b in itertools.product([0, 1], repeat=8)]


def inversions(halves):
    return np.flatnonzero(np.diff(halves) != 0) + 1


def test_fm0_single_symbols():
    assert ul.fm0_encode([1]).halves.tolist() == [1, 1]
    assert ul.fm0_encode([0]).halves.tolist() == [1, -1]
    assert ul.fm0_encode([0], -1).halves.tolist() == [-1, 1]


def test_fm0_reference_transition_counts():
    s = ul.fm0_encode(REFERENCE_UPLINK_BITS)
    inv = inversions(s.halves)
    boundary = inv[inv % 2 == 0]
    mid = inv[inv % 2 == 1]
    assert len(s.halves) == 16
    assert len(boundary) == 7
    assert len(mid) == REFERENCE_UPLINK_BITS.count(0)
    assert sorted((mid // 2).tolist()) == [i for i, b in enumerate(REFERENCE_UPLINK_BITS) if b == 0]


def test_fm0_zero_level_rejected():
    with pytest.raises(ParameterError):
        ul.fm0_encode([1], 0)


def test_miller_data1_m2():
    s = ul.miller_encode([1], 2)
    # baseband [+a, -a] spread by two subcarrier cycles: the mid inversion
    # shows up as a repeated level where the subcarrier alone would flip
    assert s.halves.tolist() == [1, -1, -1, 1]
    assert len(s.halves) == 4


def test_miller_two_zeros_boundary_inversion():
    base = ul.miller_baseband([0, 0])
    assert base.tolist() == [1, 1, -1, -1]
    s = ul.miller_encode([0, 0], 2)
    despread = s.halves * ul.subcarrier(2, 2)
    assert despread.tolist() == [1, 1, 1, 1, -1, -1, -1, -1]


def test_miller_rejects_m1():
    with pytest.raises(ParameterError):
        ul.miller_encode([1, 0], 1)


def test_miller_slowest_symbol_duration():
    p = lp.slowest_corner()
    s = ul.miller_encode([1, 0], 8, params=p)
    assert s.symbol_duration == pytest.approx(200e-6)


def test_miller_half_wave_count():
    for m in (2, 4, 8):
        assert len(ul.miller_encode([0, 1, 1], m).halves) == 2 * m * 3


@pytest.mark.parametrize("pair, code, bit", [
    ((1.0, 1.0), ul.FM0, 1),
    ((1.0, -1.0), ul.FM0, 0),
    ((0.0, -3.0), ul.FM0, 1),
    ((-2.0, 0.0), ul.FM0, 1),
    ((1.0, -1.0), ul.MILLER, 1),
    ((1.0, 1.0), ul.MILLER, 0),
])
def test_decide_symbol(pair, code, bit):
    assert ul.decide_symbol(*pair, code) == bit


def test_fm0_exhaustive_round_trip():
    p = lp.uplink_for(1)
    sps = 8
    fs = lp.link_frequency(p) * sps
    for bits in ALL_8BIT:
        assert ul.decode_stream(ul.render(ul.fm0_encode(bits), sps), p, fs) == bits


@pytest.mark.parametrize("m", [2, 4, 8])
def test_miller_exhaustive_round_trip(m):
    p = lp.uplink_for(m)
    sps = 4 * m
    fs = lp.link_frequency(p) * sps
    for bits in ALL_8BIT:
        assert ul.decode_stream(ul.render(ul.miller_encode(bits, m), sps), p, fs) == bits


def test_partial_symbol_is_framing_error():
    p = lp.uplink_for(1)
    fs = lp.link_frequency(p) * 8
    with pytest.raises(FramingError):
        ul.decode_stream(np.ones(20), p, fs)


def test_render_needs_divisible_sps():
    with pytest.raises(ParameterError):
        ul.render(ul.miller_encode([1], 4), 12)


@given(st.lists(st.integers(0, 1), min_size=1, max_size=64), st.floats(1e-3, 1e3),
       st.sampled_from([1, 2, 4, 8]), st.sampled_from([1.0, -1.0]))
def test_decode_scale_invariant(bits, c, m, level):
    p = lp.uplink_for(m)
    sps = 4 * m if m > 1 else 8
    fs = lp.link_frequency(p) * sps
    x = ul.render(ul.encode(bits, m, level), sps)
    assert ul.decode_stream(c * x, p, fs) == ul.decode_stream(x, p, fs) == bits


@given(st.lists(st.integers(0, 1), min_size=1, max_size=40))
def test_fm0_invariants(bits):
    h = ul.fm0_encode(bits).halves
    # inversion at every boundary, extra mid-symbol inversion only for 0
    assert np.all(h[2::2] == -h[1:-1:2])
    assert np.all((h[0::2] != h[1::2]) == (np.array(bits) == 0))


@given(st.lists(st.integers(0, 1), min_size=2, max_size=40))
def test_miller_baseband_invariants(bits):
    h = ul.miller_baseband(bits)
    b = np.array(bits)
    assert np.all((h[0::2] != h[1::2]) == (b == 1))
    flips = h[2::2] != h[1:-1:2]
    assert np.all(flips == ((b[:-1] == 0) & (b[1:] == 0)))


def test_detect_rate_mismatch():
    with pytest.raises(ParameterError):
        ul.samples_per_symbol(1e6, 3e5)
