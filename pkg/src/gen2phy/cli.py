"""Command-line front end: ``gen2phy {params,downlink,ber,preamble,backscatter}``.

Exit status: 0 success, 2 configuration/validation error, 3 recovery or
self-check failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analysis, backscatter as bs, params as lp
from .errors import Gen2Error, ParameterError, ResolutionError
from .reader_modem import ModulationConfig
from .scenarios import REFERENCE_DOWNLINK_BITS, TAP_NAMES, downlink_roundtrip
from .uplink import encode
from .waveform import dump_waveform

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_FAILURE = 3

PRESETS = {
    "downlink": lp.downlink_default,
    "uplink-320k": lp.uplink_320k,
    "slowest": lp.slowest_corner,
    "fastest": lp.fastest_corner,
}


class ConfigError(Exception):
    pass


class RecoveryFailure(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    params_file: Path | None = None
    output_dir: Path = Path(".")
    base_seed: int = 0
    overrides: list[str] = field(default_factory=list)
    preset: str | None = None

    def load_params(self, default: str) -> lp.LinkParams:
        if self.params_file is not None:
            if not self.params_file.is_file():
                raise ConfigError(f"params file not found: {self.params_file}")
            values = lp.parse_config_lines(self.params_file.read_text().splitlines())
        else:
            values = lp.parse_config_lines(lp.params_to_text(PRESETS[self.preset or default]())
                                           .splitlines())
        for item in self.overrides:
            key, sep, value = item.partition("=")
            if not sep:
                raise ConfigError(f"--set expects key=value, got {item!r}")
            values[key.strip()] = value.strip()
        return lp.params_from_mapping(values)

    def out(self, name: str) -> Path:
        self.output_dir.mkdir(parents=True, exist_ok=True)
        return self.output_dir / name


def parse_range(text: str) -> list[float]:
    """``start:step:stop`` (inclusive), a comma list, or a single value."""
    try:
        if ":" in text:
            start, step, stop = (float(v) for v in text.split(":"))
            if step <= 0 or stop < start:
                raise ValueError
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
            return [round(start + i * step, 12) for i in range(n)]
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise ConfigError(f"bad Eb/N0 range {text!r}; use start:step:stop or a,b,c") from None


def parse_bits(text: str) -> list[int]:
    if not text or any(c not in "01" for c in text):
        raise ConfigError(f"bits must be a string of 0/1, got {text!r}")
    return [int(c) for c in text]


def _fmt_bits(bits) -> str:
    return "".join(str(b) for b in bits)


def _emit(line: str = "") -> None:
    print(line)


# -- commands ------------------------------------------------------------------


def cmd_params(cfg: RunConfig, args) -> int:
    p = cfg.load_params("uplink-320k")
    bad = p.violations()
    if bad:
        print("invalid", file=sys.stderr)
        for name in bad:
            print(f"  {name}: {lp.CONSTRAINTS[name]}", file=sys.stderr)
        return EXIT_CONFIG
    _emit("valid")
    _emit(f"tari_s={p.tari:.6g}")
    _emit(f"rtcal_s={p.rtcal:.6g}")
    _emit(f"trcal_s={p.trcal:.6g}")
    _emit(f"dr={lp.format_dr(p.dr)}")
    _emit(f"m={p.m}")
    _emit(f"link_frequency_hz={lp.link_frequency(p):.10g}")
    _emit(f"pivot_s={lp.pivot(p):.6g}")
    _emit(f"min_query_gap_s={lp.min_query_gap(p):.6g}")
    return EXIT_OK


def cmd_downlink(cfg: RunConfig, args) -> int:
    p = cfg.load_params("downlink")
    kw = dict(scheme=args.modulation, mod_depth=args.depth)
    mc = ModulationConfig(**kw) if args.full_rf else ModulationConfig.scaled(**kw)
    mc.check()
    bits = parse_bits(args.bits) if args.bits else list(REFERENCE_DOWNLINK_BITS)
    try:
        run = downlink_roundtrip(bits, p, mc, ebn0_db=args.ebn0, seed=cfg.base_seed)
    except (ParameterError, ResolutionError):
        raise
    except Gen2Error as exc:
        raise RecoveryFailure(f"demodulation failed: {exc}") from exc
    fs = run.received.sample_rate
    for name in TAP_NAMES:
        dump_waveform(cfg.out(f"{name}.txt"), run.result.taps[name], fs)
    _emit(f"scheme={mc.scheme} carrier_hz={mc.carrier_freq:.6g} ebn0_db={args.ebn0}")
    _emit(f"sent={_fmt_bits(run.sent)}")
    _emit(f"recovered={_fmt_bits(run.result.bits)}")
    _emit(f"pivot_s={run.result.pivot:.6g}")
    if not run.ok:
        raise RecoveryFailure(f"bit mismatch at positions {run.mismatches()}")
    return EXIT_OK


def cmd_ber(cfg: RunConfig, args) -> int:
    points = parse_range(args.ebn0)
    code = args.code.lower()
    m = args.m if code == "miller" else None
    curve = analysis.run_ber_sweep(code, points, args.bits, cfg.base_seed, m=m,
                                   workers=args.workers)
    path = cfg.out(args.output)
    analysis.write_csv(curve, path)
    rep = analysis.crossing_report()
    _emit(f"wrote {path} ({len(curve.points)} points)")
    _emit(f"analytic SER=1e-3 crossing: {rep['analytic_crossing_db']:.4f} dB "
          f"(quoted: {rep['claimed_crossing_db']:g} dB, where SER={rep['ser_at_claimed']:.3g})")
    if args.self_check:
        bad = [p.ebn0_db for p in curve.points if not p.within(3.0)]
        if bad:
            raise RecoveryFailure(f"measured BER outside 3 sigma at Eb/N0 {bad}")
        _emit("self-check: all points within 3 sigma")
    return EXIT_OK


def cmd_preamble(cfg: RunConfig, args) -> int:
    curve = analysis.run_preamble_sweep(args.n, parse_range(args.ebn0), args.trials,
                                        cfg.base_seed, pe_override=args.pe_override,
                                        workers=args.workers)
    path = cfg.out(args.output)
    analysis.write_csv(curve, path)
    _emit(f"wrote {path} ({len(curve.points)} points, n={args.n})")
    return EXIT_OK


def cmd_backscatter(cfg: RunConfig, args) -> int:
    kw = dict(lo_phase_deg=args.lo_phase, ask_depth=args.depth)
    bc = bs.BackscatterConfig(**kw) if args.full_rf else bs.BackscatterConfig.scaled(**kw)
    bc.check()
    if args.bits:
        bits = parse_bits(args.bits)
    else:
        bits = np.random.default_rng(cfg.base_seed).integers(0, 2, 8).tolist()
    p = cfg.load_params("uplink-320k")
    if p.m != 1:
        raise ConfigError("backscatter demo uses FM0 (m=1)")
    res = bs.loopback(encode(bits), bc, p)
    fs = bc.sample_rate
    dump_waveform(cfg.out("baseband.txt"), res["baseband"], fs)
    dump_waveform(cfg.out("rf.txt"), res["rf"], fs)
    dump_waveform(cfg.out("mixer.txt"), res["mixer"], fs)
    _emit(f"cw_hz={bc.cw_freq:.6g} sample_rate_hz={bc.sample_rate:.6g} "
          f"lo_phase_deg={bc.lo_phase_deg:g}")
    _emit(f"sent={_fmt_bits(bits)}")
    _emit(f"recovered={_fmt_bits(res['bits'])}")
    if res["collapsed"]:
        raise RecoveryFailure("mixer output collapsed: local oscillator near quadrature")
    if res["bits"] != bits:
        wrong = [i for i, (a, b) in enumerate(zip(bits, res["bits"])) if a != b]
        raise RecoveryFailure(f"bit mismatch at positions {wrong}")
    return EXIT_OK


# -- parser --------------------------------------------------------------------


def _common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--params-file", type=Path, help="key=value link parameter file")
    sp.add_argument("--preset", choices=sorted(PRESETS), help="built-in parameter set")
    sp.add_argument("--set", dest="overrides", action="append", default=[],
                    metavar="KEY=VALUE", help="override one parameter (repeatable)")
    sp.add_argument("--output-dir", type=Path, default=Path("."))
    sp.add_argument("--seed", type=int, default=0, help="base seed")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gen2phy", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("params", help="validate link parameters and report derived timing")
    _common(sp)
    sp.set_defaults(func=cmd_params)

    sp = sub.add_parser("downlink", help="PIE reader-to-tag round trip with tap dumps")
    _common(sp)
    sp.add_argument("--modulation", default="dsb",
                    help="dsb-ask | pr-ask | ssb-ask (short forms dsb/pr/ssb)")
    sp.add_argument("--depth", type=float, default=0.9)
    sp.add_argument("--bits", help="payload as a 0/1 string (default 100110)")
    sp.add_argument("--ebn0", type=float, default=math.inf, help="dB; default noiseless")
    sp.add_argument("--full-rf", action="store_true", help="910 MHz carrier instead of 10 MHz")
    sp.set_defaults(func=cmd_downlink)

    sp = sub.add_parser("ber", help="uplink BER sweep to CSV")
    _common(sp)
    sp.add_argument("--code", choices=["fm0", "miller"], default="fm0")
    sp.add_argument("--m", type=int, default=2, choices=[2, 4, 8])
    sp.add_argument("--ebn0", default="0:2:12", help="start:step:stop dB (inclusive)")
    sp.add_argument("--bits", type=int, default=100_000, help="bits per point")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--output", default="ber.csv")
    sp.add_argument("--self-check", action="store_true",
                    help="fail unless every point is within 3 sigma of theory")
    sp.set_defaults(func=cmd_ber)

    sp = sub.add_parser("preamble", help="preamble detection sweep to CSV")
    _common(sp)
    sp.add_argument("--n", type=int, default=analysis.PREAMBLE_SYMBOLS)
    sp.add_argument("--ebn0", default="0:1:14")
    sp.add_argument("--trials", type=int, default=10_000)
    sp.add_argument("--pe-override", type=float)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--output", default="preamble.csv")
    sp.set_defaults(func=cmd_preamble)

    sp = sub.add_parser("backscatter", help="CW/backscatter/mixer loopback with dumps")
    _common(sp)
    sp.add_argument("--bits", help="payload as a 0/1 string (default: 8 seeded random bits)")
    sp.add_argument("--full-rf", action="store_true", help="896 MHz instead of scaled 1 MHz")
    sp.add_argument("--lo-phase", type=float, default=0.0, help="LO phase offset, degrees")
    sp.add_argument("--depth", type=float, default=1.0, help="ASK depth")
    sp.set_defaults(func=cmd_backscatter)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    cfg = RunConfig(args.command, args.params_file, args.output_dir, args.seed,
                    args.overrides, args.preset)
    try:
        return args.func(cfg, args)
    except (ConfigError, ParameterError, ResolutionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RecoveryFailure as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
