"""Dump the tag demodulator's internal taps for the 6-bit reference frame.

Writes envelope, trigger, clock and differentiated clock in the shared
waveform format, one directory per modulation scheme.

    python scripts/downlink_trace.py --out results/downlink
"""

import argparse
from pathlib import Path

from gen2phy.reader_modem import ModulationConfig
from gen2phy.scenarios import TAP_NAMES, downlink_roundtrip
from gen2phy.waveform import dump_waveform


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("results/downlink"))
    ap.add_argument("--full-rf", action="store_true", help="910 MHz carrier")
    args = ap.parse_args()

    for scheme in ("dsb", "pr", "ssb"):
        cfg = ModulationConfig(scheme=scheme) if args.full_rf else ModulationConfig.scaled(scheme=scheme)
        run = downlink_roundtrip(config=cfg)
        d = args.out / scheme
        d.mkdir(parents=True, exist_ok=True)
        dump_waveform(d / "rf.txt", run.rf.samples, cfg.sample_rate)
        for name in TAP_NAMES:
            dump_waveform(d / f"{name}.txt", run.result.taps[name], cfg.sample_rate)
        durations = ", ".join(f"{x * 1e6:.3f}" for x in run.result.interval_durations)
        print(f"{scheme}: sent {run.sent} got {run.result.bits} "
              f"pivot {run.result.pivot * 1e6:.3f} us, intervals [{durations}] us")


if __name__ == "__main__":
    main()
