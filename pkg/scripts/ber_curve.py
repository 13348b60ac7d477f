"""FM0 and Miller uplink BER against the closed-form SER, written as CSV.

    python scripts/ber_curve.py --out results/
"""

import argparse
from pathlib import Path

from gen2phy import analysis as an


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("results"))
    ap.add_argument("--bits", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=4)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    points = list(range(0, 13))
    runs = [("fm0", None)] + [("miller", m) for m in (2, 4, 8)]
    for i, (code, m) in enumerate(runs):
        curve = an.run_ber_sweep(code, points, args.bits, args.seed + 1000 * i, m=m,
                                 workers=args.workers)
        name = code if m is None else f"{code}{m}"
        an.write_csv(curve, args.out / f"ber_{name}.csv")
        inside = sum(curve.within(3.0))
        print(f"{name:8s} {inside}/{len(points)} points within 3 sigma")

    rep = an.crossing_report()
    print(f"SER = 1e-3 reached at {rep['analytic_crossing_db']:.3f} dB (closed form); "
          f"quoted {rep['claimed_crossing_db']:g} dB, where the closed form gives "
          f"{rep['ser_at_claimed']:.3g}")


if __name__ == "__main__":
    main()
