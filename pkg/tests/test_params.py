from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from gen2phy import params as lp
from gen2phy.errors import ParameterError
from gen2phy.params import LinkParams

US = 1e-6


def test_fastest_corner_is_valid():
    p = LinkParams(6.25 * US, 15.625 * US, 33.3 * US, Fraction(64, 3), 1, 9.375 * US)
    assert lp.validate(p) == []
    assert p.is_valid()


def test_tari_below_minimum_is_named():
    p = LinkParams(5 * US, 12.5 * US, 30 * US)
    assert "tari_min" in lp.validate(p)


def test_trcal_below_lower_bound_is_named():
    p = LinkParams(25 * US, 62.5 * US, 60 * US)
    assert lp.validate(p) == ["trcal_min"]


@pytest.mark.parametrize("p, lf", [
    (lp.slowest_corner(), 5e3),
    (LinkParams(25 * US, 62.5 * US, 100 * US, Fraction(8), 1), 80e3),
])
def test_link_frequency(p, lf):
    assert lp.link_frequency(p) == pytest.approx(lf, rel=1e-12)


def test_link_frequency_upper_corner():
    lf = lp.link_frequency(lp.fastest_corner())
    assert lf == pytest.approx(64 / 3 / 33.3e-6, rel=1e-15)
    assert lf == pytest.approx(640.64e3, abs=1.0)


def test_link_frequency_rejects_invalid():
    with pytest.raises(ParameterError, match="tari_min"):
        lp.link_frequency(LinkParams(5 * US, 12.5 * US, 30 * US))


@pytest.mark.parametrize("rtcal, expected", [(62.5 * US, 31.25 * US), (15.625 * US, 7.8125 * US)])
def test_pivot(rtcal, expected):
    tari = rtcal / 2.5
    p = LinkParams(tari, rtcal, 1.5 * rtcal)
    assert lp.pivot(p) == pytest.approx(expected, rel=1e-12)


def test_pivot_rejects_rtcal_out_of_range():
    with pytest.raises(ParameterError, match="rtcal_max"):
        lp.pivot(LinkParams(10 * US, 35 * US, 50 * US))


@pytest.mark.parametrize("trcal, gap", [(200 * US, 1.6e-3), (33.3 * US, 266.4 * US)])
def test_min_query_gap(trcal, gap):
    p = lp.slowest_corner() if trcal > 100 * US else lp.fastest_corner()
    assert lp.min_query_gap(p) == pytest.approx(gap, rel=1e-12)


def test_min_query_gap_invalid():
    with pytest.raises(ParameterError):
        lp.min_query_gap(LinkParams(25 * US, 62.5 * US, 600 * US))


def test_dr_bit_mapping():
    assert lp.decode_dr(0) == 8
    assert lp.decode_dr(1) == Fraction(64, 3)
    for b in (0, 1):
        assert lp.encode_dr(lp.decode_dr(b)) == b
    with pytest.raises(ParameterError):
        lp.decode_dr(2)


def test_dr_float_snaps_to_exact():
    assert lp.as_divide_ratio(64 / 3) == Fraction(64, 3)
    assert lp.as_divide_ratio("64/3") == Fraction(64, 3)


def test_data1_defaults_to_one_and_a_half_tari():
    assert LinkParams(10 * US, 25 * US, 40 * US).data1_len == pytest.approx(15 * US)


def test_config_round_trip(tmp_path):
    p = lp.downlink_default()
    path = lp.save_params(p, tmp_path / "link.cfg")
    text = path.read_text()
    assert "dr=64/3\n" in text
    q = lp.load_params(path)
    assert q == p


def test_config_rejects_unknown_key():
    with pytest.raises(ParameterError, match="unknown"):
        lp.params_from_text("tari_s=1e-5\nrtcal_s=2.5e-5\ntrcal_s=4e-5\nbogus=1\n")


# -- properties ---------------------------------------------------------------

tari_st = st.floats(6.25e-6, 25e-6)


@st.composite
def valid_params(draw):
    tari = draw(tari_st)
    rtcal = tari * draw(st.floats(2.5, 3.0))
    dr = draw(st.sampled_from([Fraction(8), Fraction(64, 3)]))
    m = draw(st.sampled_from([1, 2, 4, 8]))
    # keep the link frequency inside [5 kHz, 640.64 kHz]
    lo = max(1.1 * rtcal, float(dr) / (m * lp.LF_MAX))
    hi = min(3.0 * rtcal, float(dr) / (m * lp.LF_MIN))
    if lo > hi:
        m = 1
        lo = max(1.1 * rtcal, float(dr) / lp.LF_MAX)
        hi = min(3.0 * rtcal, float(dr) / lp.LF_MIN)
    trcal = draw(st.floats(lo, hi)) if lo < hi else lo
    data1 = tari * draw(st.floats(1.5, 2.0))
    return LinkParams(tari, rtcal, trcal, dr, m, data1)


@given(valid_params())
def test_valid_params_have_lf_in_range(p):
    if not p.is_valid():
        return
    assert lp.LF_MIN * (1 - 1e-9) <= lp.link_frequency(p) <= lp.LF_MAX * (1 + 1e-9)


@given(st.floats(6.25e-6, 25e-6), st.floats(2.5, 2.99), st.floats(1e-3, 0.01))
def test_pivot_monotone(tari, ratio, step):
    a = LinkParams(tari, ratio * tari, 1.5 * ratio * tari, Fraction(8))
    b = a.replace(rtcal=a.rtcal * (1 + step / 10))
    if a.is_valid() and b.is_valid():
        assert lp.pivot(b) > lp.pivot(a)


BASE = LinkParams(12.5e-6, 34.375e-6, 60e-6, Fraction(8), 1, 21.875e-6)
BOUNDS = {
    # constraint prefix: (attribute, lower, upper)
    "rtcal": ("rtcal", 2.5 * BASE.tari, 3.0 * BASE.tari),
    "trcal": ("trcal", 1.1 * BASE.rtcal, 3.0 * BASE.rtcal),
    "data1": ("data1_len", 1.5 * BASE.tari, 2.0 * BASE.tari),
}


@given(st.sampled_from(sorted(BOUNDS)), st.booleans(), st.floats(0.001, 0.3))
def test_each_bound_is_enforced(prefix, above, margin):
    attr, lo, hi = BOUNDS[prefix]
    outside = hi * (1 + margin) if above else lo * (1 - margin)
    assert lp.validate(BASE.replace(**{attr: outside})) == [
        f"{prefix}_max" if above else f"{prefix}_min"
    ]
    inside = lo + (hi - lo) * margin
    assert lp.validate(BASE.replace(**{attr: inside})) == []


@given(st.floats(1e-7, 6.2e-6) | st.floats(25.1e-6, 1e-4))
def test_tari_outside_range_rejected(tari):
    p = LinkParams(tari, 2.75 * tari, 2 * 2.75 * tari)
    assert {"tari_min", "tari_max"} & set(lp.validate(p))
