"""Air-interface timing parameters: Tari, RTcal, TRcal, DR and Miller size.

All durations are in seconds. The divide ratio is kept as an exact
``Fraction`` so link-frequency arithmetic does not drift.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path

from .errors import ParameterError

TARI_MIN = 6.25e-6
TARI_MAX = 25e-6
DR_8 = Fraction(8)
DR_64_3 = Fraction(64, 3)
MILLER_SIZES = (1, 2, 4, 8)

LF_MIN = 5e3
# Upper link-frequency corner: DR=64/3, TRcal=33.3 us, FM0 gives 640.64 kHz,
# which the air interface treats as its nominal 640 kbps maximum.
LF_MAX = float(DR_64_3) / 33.3e-6

REL_TOL = 1e-9

# Constraint names reported by validate(), with human-readable meaning.
CONSTRAINTS = {
    "tari_min": "Tari below 6.25 us",
    "tari_max": "Tari above 25 us",
    "rtcal_min": "RTcal below 2.5 x Tari",
    "rtcal_max": "RTcal above 3.0 x Tari",
    "trcal_min": "TRcal below 1.1 x RTcal",
    "trcal_max": "TRcal above 3 x RTcal",
    "data1_min": "Data-1 length below 1.5 x Tari",
    "data1_max": "Data-1 length above 2 x Tari",
    "dr": "divide ratio is neither 8 nor 64/3",
    "m": "Miller size not in {1, 2, 4, 8}",
    "lf_min": "link frequency below 5 kHz",
    "lf_max": "link frequency above 640 kHz",
}


def _ge(x, lo):
    return x >= lo * (1 - REL_TOL)


def _le(x, hi):
    return x <= hi * (1 + REL_TOL)


def as_divide_ratio(value) -> Fraction:
    """Coerce ``8``, ``"64/3"``, ``21.333...`` etc. to an exact :class:`Fraction`.

    Floats are snapped to the nearest fraction with denominator <= 3, so a
    value that came out of a float division still compares exactly.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        return Fraction(value).limit_denominator(3)
    return Fraction(value)


def decode_dr(bit: int) -> Fraction:
    """Divide ratio signalled by the one-bit DR field of a Query."""
    if bit == 0:
        return DR_8
    if bit == 1:
        return DR_64_3
    raise ParameterError(f"DR bit must be 0 or 1, got {bit!r}")


def encode_dr(dr) -> int:
    dr = as_divide_ratio(dr)
    if dr == DR_8:
        return 0
    if dr == DR_64_3:
        return 1
    raise ParameterError(f"divide ratio must be 8 or 64/3, got {dr}")


@dataclass(frozen=True)
class LinkParams:
    tari: float
    rtcal: float
    trcal: float
    dr: Fraction = DR_8
    m: int = 1
    data1_len: float = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "dr", as_divide_ratio(self.dr))
        if self.data1_len is None:
            object.__setattr__(self, "data1_len", 1.5 * self.tari)

    @property
    def link_frequency_unchecked(self) -> float:
        return float(self.dr) / (self.trcal * self.m)

    def replace(self, **changes) -> "LinkParams":
        return replace(self, **changes)

    def violations(self) -> list[str]:
        return validate(self)

    def is_valid(self) -> bool:
        return not validate(self)

    def check(self) -> "LinkParams":
        bad = validate(self)
        if bad:
            raise ParameterError(
                "invalid link parameters: "
                + "; ".join(f"{name} ({CONSTRAINTS[name]})" for name in bad)
            )
        return self


def validate(params: LinkParams) -> list[str]:
    """Return the names of violated constraints; an empty list means valid."""
    p = params
    bad = []
    if not _ge(p.tari, TARI_MIN):
        bad.append("tari_min")
    if not _le(p.tari, TARI_MAX):
        bad.append("tari_max")
    if not _ge(p.rtcal, 2.5 * p.tari):
        bad.append("rtcal_min")
    if not _le(p.rtcal, 3.0 * p.tari):
        bad.append("rtcal_max")
    if not _ge(p.trcal, 1.1 * p.rtcal):
        bad.append("trcal_min")
    if not _le(p.trcal, 3.0 * p.rtcal):
        bad.append("trcal_max")
    if not _ge(p.data1_len, 1.5 * p.tari):
        bad.append("data1_min")
    if not _le(p.data1_len, 2.0 * p.tari):
        bad.append("data1_max")
    dr_ok = p.dr in (DR_8, DR_64_3)
    if not dr_ok:
        bad.append("dr")
    m_ok = p.m in MILLER_SIZES
    if not m_ok:
        bad.append("m")
    if dr_ok and m_ok and p.trcal > 0:
        lf = p.link_frequency_unchecked
        if not _ge(lf, LF_MIN):
            bad.append("lf_min")
        if not _le(lf, LF_MAX):
            bad.append("lf_max")
    return bad


def link_frequency(params: LinkParams) -> float:
    """LF = DR / (TRcal * M), in Hz."""
    params.check()
    return params.link_frequency_unchecked


def pivot(params: LinkParams) -> float:
    """Data-0/Data-1 decision threshold, RTcal / 2."""
    params.check()
    return params.rtcal / 2


def min_query_gap(params: LinkParams) -> float:
    """Shortest allowed spacing between consecutive Query commands (8 TRcal)."""
    params.check()
    return 8 * params.trcal


# -- flat key=value config ---------------------------------------------------

_KEYS = ("tari_s", "rtcal_s", "trcal_s", "dr", "m", "data1_len_s")


def format_dr(dr: Fraction) -> str:
    return str(dr.numerator) if dr.denominator == 1 else f"{dr.numerator}/{dr.denominator}"


def params_to_text(params: LinkParams) -> str:
    return (
        f"tari_s={params.tari!r}\n"
        f"rtcal_s={params.rtcal!r}\n"
        f"trcal_s={params.trcal!r}\n"
        f"dr={format_dr(params.dr)}\n"
        f"m={params.m}\n"
        f"data1_len_s={params.data1_len!r}\n"
    )


def parse_config_lines(lines) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ParameterError(f"line {lineno}: expected key=value, got {raw!r}")
        out[key.strip()] = value.strip()
    return out


def params_from_mapping(values: dict[str, str]) -> LinkParams:
    unknown = set(values) - set(_KEYS)
    if unknown:
        raise ParameterError(f"unknown config keys: {sorted(unknown)}")
    missing = {"tari_s", "rtcal_s", "trcal_s"} - set(values)
    if missing:
        raise ParameterError(f"missing config keys: {sorted(missing)}")
    try:
        return LinkParams(
            tari=float(values["tari_s"]),
            rtcal=float(values["rtcal_s"]),
            trcal=float(values["trcal_s"]),
            dr=as_divide_ratio(values.get("dr", "8")),
            m=int(values.get("m", 1)),
            data1_len=float(values["data1_len_s"]) if "data1_len_s" in values else None,
        )
    except (ValueError, ZeroDivisionError) as exc:
        raise ParameterError(f"malformed config value: {exc}") from exc


def params_from_text(text: str) -> LinkParams:
    return params_from_mapping(parse_config_lines(text.splitlines()))


def load_params(path) -> LinkParams:
    return params_from_text(Path(path).read_text(encoding="utf-8"))


def save_params(params: LinkParams, path) -> Path:
    path = Path(path)
    path.write_text(params_to_text(params), encoding="utf-8", newline="\n")
    return path


# -- reference configurations --------------------------------------------------

def downlink_default() -> LinkParams:
    """Fast downlink setup: Tari 6.25 us, Data-1 1.5 Tari, RTcal 2.5 Tari."""
    return LinkParams(tari=6.25e-6, rtcal=15.625e-6, trcal=33.3e-6, dr=DR_64_3, m=1,
                      data1_len=9.375e-6)


def uplink_320k() -> LinkParams:
    """FM0 at exactly 320 kbps (DR=64/3)."""
    return LinkParams(tari=12.5e-6, rtcal=31.25e-6, trcal=float(DR_64_3) / 320e3,
                      dr=DR_64_3, m=1)


def slowest_corner() -> LinkParams:
    """Miller M=8, TRcal=200 us, DR=8: 5 kbps."""
    return LinkParams(tari=25e-6, rtcal=75e-6, trcal=200e-6, dr=DR_8, m=8)


def fastest_corner() -> LinkParams:
    """FM0, TRcal=33.3 us, DR=64/3: ~640 kbps."""
    return downlink_default()


def uplink_for(m: int) -> LinkParams:
    """Valid parameters for Miller size ``m`` (1 = FM0) at TRcal=100 us, DR=8."""
    return LinkParams(tari=25e-6, rtcal=62.5e-6, trcal=100e-6, dr=DR_8, m=m)
