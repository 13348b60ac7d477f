"""Frame success rate of the tag demodulator versus downlink Eb/N0.

Eb is the RF energy per payload bit. Reports the fraction of frames whose
payload is recovered exactly, as CSV.

    python scripts/downlink_noise.py --out results/
"""

import argparse
from pathlib import Path

import numpy as np

from gen2phy.errors import Gen2Error
from gen2phy.reader_modem import ModulationConfig
from gen2phy.scenarios import downlink_roundtrip


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("results"))
    ap.add_argument("--trials", type=int, default=300)
    ap.add_argument("--scheme", default="dsb")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    cfg = ModulationConfig.scaled(scheme=args.scheme)
    rows = ["ebn0_db,trials,exact,rate"]
    for ebn0 in range(14, 32, 2):
        exact = 0
        for seed in range(args.trials):
            bits = np.random.default_rng(10_000 + seed).integers(0, 2, 6).tolist()
            try:
                exact += downlink_roundtrip(bits, config=cfg, ebn0_db=ebn0, seed=seed).ok
            except Gen2Error:
                pass
        rows.append(f"{ebn0},{args.trials},{exact},{exact / args.trials:.6g}")
        print(rows[-1])
    (args.out / f"downlink_noise_{args.scheme}.csv").write_text("\n".join(rows) + "\n")


if __name__ == "__main__":
    main()
